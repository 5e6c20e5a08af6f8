"""The pseudo-hyperbolic metric, its constrained analogue, and the exact
two-point representation.

The constrained metric between disk points is the supremum of |f(z)| over
unit-ball functions with f(w) = 0 and vanishing derivative at the origin.
It is computed as a minimum over the kernel-parameter sphere of a closed
2 x 2 determinant expression; against the origin it has the closed form
|z|^2, attained by explicitly known parameters.

Two-point quotients of any uniform algebra embed completely isometrically
into 2 x 2 matrices, which turns two-point interpolation (scalar or
matrix-valued) into a single operator-norm evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import InvalidInputError
from .kernels import DISK_MARGIN, KernelParam, as_disk_point, gram_tensor
from .numerics import SphereDomain, maximize_over_sphere, operator_norm

ENVELOPE_M2 = "M2"
ENVELOPE_DIAGONAL = "C+C"


def pseudo_metric_dH(z, w) -> float:
    """Pseudo-hyperbolic distance |z - w| / |1 - conj(w) z|."""
    zv = as_disk_point(z).value
    wv = as_disk_point(w).value
    return abs((zv - wv) / (1.0 - np.conj(wv) * zv))


def d1_objective_batch(r: np.ndarray, theta: np.ndarray, z: complex, w: complex) -> np.ndarray:
    """The 2 x 2 determinant expression 1 - |K(w,z)|^2 / (K(w,w) K(z,z)).

    Parameters where a diagonal kernel value vanishes impose no constraint
    when the off-diagonal vanishes with it (the only case that occurs);
    the value is the neutral limit 1 there.  A vanishing diagonal with a
    surviving off-diagonal would make the PSD condition unsatisfiable, so
    it maps to 0.
    """
    pts = np.array([w, z], dtype=complex)
    g = gram_tensor(r, theta, pts)
    kww = g[:, 0, 0].real
    kzz = g[:, 1, 1].real
    kwz = np.abs(g[:, 0, 1]) ** 2
    denom = kww * kzz
    tiny = 1e-30
    ratio = np.where(
        denom > tiny,
        kwz / np.where(denom > tiny, denom, 1.0),
        np.where(kwz <= tiny, 0.0, 1.0),
    )
    return 1.0 - ratio


def constrained_metric_d1(
    z, w, dom: Optional[SphereDomain] = None, return_param: bool = False
):
    """Distance in the constrained metric, by scanning the kernel sphere.

    With ``return_param=True`` also returns the minimizing parameter.
    """
    zv = as_disk_point(z).value
    wv = as_disk_point(w).value
    if abs(zv - wv) < 1e-15:
        return (0.0, None) if return_param else 0.0

    def batch(r, theta):
        return -d1_objective_batch(r, theta, zv, wv)

    param, neg_min = maximize_over_sphere(dom=dom, batch_objective=batch)
    value = math.sqrt(min(max(-neg_min, 0.0), 1.0))
    return (value, param) if return_param else value


def argmin_param_origin(z, s: float = 0.0) -> KernelParam:
    """Kernel parameter minimizing the metric objective against the origin.

    For z = rho * e^{i tau} the minimizing pair is proportional to
    (e^{i tau}, rho); the phase ``s`` rotates the representative and is
    removed by canonicalization (beta >= 0).  The objective value at the
    returned parameter equals |z|^4.
    """
    zv = as_disk_point(z).value
    if abs(zv) <= DISK_MARGIN:
        raise InvalidInputError("all parameters tie at z = 0")
    del s  # only changes the representative phase, which is canonicalized away
    rho = abs(zv)
    tau = math.atan2(zv.imag, zv.real)
    return KernelParam(1.0 / math.sqrt(1.0 + rho * rho), tau)


def _two_point_block(w1, w2, b: float) -> np.ndarray:
    a1 = np.atleast_2d(np.asarray(w1, dtype=complex))
    a2 = np.atleast_2d(np.asarray(w2, dtype=complex))
    if a1.shape != a2.shape or a1.shape[0] != a1.shape[1]:
        raise InvalidInputError(
            f"values must be square matrices of equal shape, got {a1.shape} and {a2.shape}"
        )
    k = a1.shape[0]
    zero = np.zeros((k, k), dtype=complex)
    return np.block([[a1, b * (a1 - a2)], [zero, a2]])


@dataclass(frozen=True)
class TwoPointRep:
    """Upper-triangular 2 x 2 (block) representation of a two-point quotient.

    ``norm`` is the exact minimal interpolation norm for the two-point
    problem in the underlying uniform algebra, and ``envelope`` classifies
    the quotient's enveloping C*-algebra: full 2 x 2 matrices when the
    two points are at metric distance < 1, two diagonal copies of the
    scalars at distance exactly 1.
    """

    b: float
    values: Tuple
    norm: float
    envelope: str

    def matrix(self) -> np.ndarray:
        return _two_point_block(self.values[0], self.values[1], self.b)


def two_point_representation(w1, w2, d: float) -> TwoPointRep:
    """Representation [[w1, b (w1 - w2)], [0, w2]] with b = sqrt(1/d^2 - 1).

    ``d`` is the metric distance between the two interpolation points in
    the algebra at hand (the constrained metric for this package's main
    use).  Accepts scalars or k x k matrices as values.
    """
    if not (0.0 < d <= 1.0):
        raise InvalidInputError(f"metric distance must lie in (0, 1], got {d}")
    b = math.sqrt(max(1.0 / (d * d) - 1.0, 0.0))
    block = _two_point_block(w1, w2, b)
    envelope = ENVELOPE_DIAGONAL if d == 1.0 else ENVELOPE_M2
    return TwoPointRep(
        b=b,
        values=(w1, w2),
        norm=operator_norm(block),
        envelope=envelope,
    )


def two_point_matrix_norm(w1, w2, b: float) -> float:
    """Norm of the block matrix [[W1, b (W1 - W2)], [0, W2]]."""
    if b < 0:
        raise InvalidInputError("b must be nonnegative")
    return operator_norm(_two_point_block(w1, w2, b))
