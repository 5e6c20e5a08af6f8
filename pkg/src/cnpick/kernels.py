"""The sphere-parameterized reproducing kernel family and its Pick matrices.

Each parameter point selects the codimension-one subspace
``span{alpha + beta*z} + z^2 H^2`` of the Hardy space, whose reproducing
kernel is

    K(z, w) = (alpha + beta*z) * conj(alpha + beta*w)
              + z^2 * conj(w)^2 / (1 - z*conj(w)).

Parameters are taken up to a common phase, so the family is indexed by a
real 2-sphere; we fix the chart (alpha, beta) = (r e^{i theta}, sqrt(1-r^2))
with beta real and nonnegative.  At r = 1 the kernel no longer depends on
theta, and the chart collapses that circle to the single point theta = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidInputError
from .numerics import TWO_PI, HermitianMatrix

DISK_MARGIN = 1e-12
NODE_SEPARATION = 1e-10


@dataclass(frozen=True)
class KernelParam:
    """A point of the projective parameter sphere in polar-chart form."""

    r: float
    theta: float = 0.0

    def __post_init__(self):
        r = float(self.r)
        t = float(self.theta)
        if not (math.isfinite(r) and math.isfinite(t)):
            raise InvalidInputError("kernel parameter must be finite")
        if r < 0.0 or r > 1.0:
            raise InvalidInputError(f"radius {r} outside [0, 1]")
        t = math.fmod(t, TWO_PI)
        if t < 0.0:
            t += TWO_PI
        if r == 1.0:
            t = 0.0  # chart collapse: all theta give the same kernel
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "theta", t)

    @property
    def alpha(self) -> complex:
        return self.r * complex(math.cos(self.theta), math.sin(self.theta))

    @property
    def beta(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.r * self.r))


def make_param(r: float, theta: float) -> KernelParam:
    """Canonicalized kernel parameter for the chart (r, theta)."""
    return KernelParam(r, theta)


@dataclass(frozen=True)
class DiskPoint:
    """A point strictly inside the unit disk (margin 1e-12)."""

    value: complex

    def __post_init__(self):
        v = complex(self.value)
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise InvalidInputError("disk point must be finite")
        if abs(v) > 1.0 - DISK_MARGIN:
            raise InvalidInputError(f"point {v} is not in the open unit disk")
        object.__setattr__(self, "value", v)


def as_disk_point(x) -> DiskPoint:
    return x if isinstance(x, DiskPoint) else DiskPoint(complex(x))


def _check_separated(values: np.ndarray, what: str = "nodes") -> None:
    n = len(values)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) < NODE_SEPARATION:
                raise InvalidInputError(
                    f"{what} {i} and {j} coincide (separation below "
                    f"{NODE_SEPARATION:g})"
                )


@dataclass(frozen=True)
class ScalarProblem:
    """Interpolation nodes in the disk, scalar targets, optional norm bound."""

    nodes: Tuple[DiskPoint, ...]
    targets: Tuple[complex, ...]
    bound: Optional[float] = None

    def __post_init__(self):
        nodes = tuple(as_disk_point(z) for z in self.nodes)
        targets = tuple(complex(w) for w in self.targets)
        if len(nodes) != len(targets):
            raise InvalidInputError(
                f"{len(nodes)} nodes but {len(targets)} targets"
            )
        if len(nodes) < 1:
            raise InvalidInputError("at least one node is required")
        if any(not (math.isfinite(w.real) and math.isfinite(w.imag)) for w in targets):
            raise InvalidInputError("targets must be finite")
        _check_separated(np.array([z.value for z in nodes]))
        if self.bound is not None and not self.bound > 0:
            raise InvalidInputError("bound must be positive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "targets", targets)

    @property
    def n(self) -> int:
        return len(self.nodes)

    def node_values(self) -> np.ndarray:
        return np.array([z.value for z in self.nodes], dtype=complex)

    def target_values(self) -> np.ndarray:
        return np.array(self.targets, dtype=complex)

    def zero_node_index(self) -> Optional[int]:
        """Index of the node at the origin, if present."""
        for i, z in enumerate(self.nodes):
            if abs(z.value) <= DISK_MARGIN:
                return i
        return None


def kernel_eval(p: KernelParam, z, w) -> complex:
    """Evaluate the kernel for parameter ``p`` at a pair of disk points."""
    zv = as_disk_point(z).value
    wv = as_disk_point(w).value
    a = p.alpha
    b = p.beta
    return (a + b * zv) * np.conj(a + b * wv) + (
        zv * zv * np.conj(wv * wv) / (1.0 - zv * np.conj(wv))
    )


def gram_matrix(p: KernelParam, nodes: Sequence) -> HermitianMatrix:
    """Gram matrix [K(z_i, z_j)] of the kernel vectors at the nodes.

    Positive definite whenever alpha != 0; for alpha = 0 the kernel vector
    at the origin vanishes, so the matrix is singular exactly when a node
    sits at 0.
    """
    z = np.array([as_disk_point(x).value for x in nodes], dtype=complex)
    _check_separated(z)
    g = gram_tensor(np.array([p.r]), np.array([p.theta]), z)[0]
    return HermitianMatrix(g)


def gram_tensor(r: np.ndarray, theta: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Stacked kernel Gram matrices for arrays of chart parameters.

    Returns shape ``(len(r), n, n)`` with entry ``[g, i, j] = K_g(z_i, z_j)``.
    The construction is exactly Hermitian in floating point (outer products
    and conjugate-symmetric divisions only).
    """
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    alpha = r * np.exp(1j * theta)
    beta = np.sqrt(np.clip(1.0 - r * r, 0.0, None))
    u = alpha[:, None] + beta[:, None] * z[None, :]  # (G, n)
    first = u[:, :, None] * u.conj()[:, None, :]
    v = z * z
    tail = v[:, None] * v.conj()[None, :] / (1.0 - z[:, None] * z.conj()[None, :])
    return first + tail[None, :, :]


def family_pick_matrix(p: KernelParam, prob: ScalarProblem, bound: float) -> HermitianMatrix:
    """Pick matrix [(A^2 - w_i conj(w_j)) K(z_i, z_j)] for one parameter.

    Positive semidefiniteness of this matrix for every parameter on the
    sphere is the feasibility criterion for interpolation by a function of
    sup-norm at most A with vanishing derivative at the origin.
    """
    if not bound > 0:
        raise InvalidInputError("bound must be positive")
    w = prob.target_values()
    weight = bound * bound - w[:, None] * w.conj()[None, :]
    g = gram_tensor(
        np.array([p.r]), np.array([p.theta]), prob.node_values()
    )[0]
    return HermitianMatrix(weight * g)


def pick_weight_matrix(targets: np.ndarray, bound: float) -> np.ndarray:
    """The Hermitian weight [(A^2 - w_i conj(w_j))] used by Pick matrices."""
    w = np.asarray(targets, dtype=complex)
    return bound * bound - w[:, None] * w.conj()[None, :]
