"""Classical (unconstrained) Nevanlinna-Pick machinery.

Moebius maps, finite Blaschke products, the classical Pick matrix, and a
Schur-algorithm solver that constructs an explicit interpolant of sup-norm
at most one from feasible data.  The constrained solver reduces to this
module after peeling off its Moebius wrap and the z^2 factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np

from .errors import DegenerateDataError, InfeasibleError, InvalidInputError
from .kernels import DiskPoint, ScalarProblem, as_disk_point
from .numerics import HermitianMatrix, feasibility_status

# |gamma| at or above this counts as unimodular: the interpolant is forced
# to a constant from that recursion level outward.
BOUNDARY_MODULUS = 1.0 - 1e-10


def moebius_map(lam, z):
    """Disk automorphism (z - lam) / (1 - conj(lam) z), sending lam to 0.

    ``z`` may be a complex scalar or an ndarray with |z| <= 1.
    """
    lv = as_disk_point(lam).value
    return (z - lv) / (1.0 - np.conj(lv) * z)


@dataclass(frozen=True)
class BlaschkeProduct:
    """Finite Blaschke product with the given simple zeros."""

    zeros: Tuple[DiskPoint, ...]
    unimodular_factor: complex = 1.0 + 0.0j

    def __post_init__(self):
        zeros = tuple(as_disk_point(z) for z in self.zeros)
        u = complex(self.unimodular_factor)
        if abs(abs(u) - 1.0) > 1e-12:
            raise InvalidInputError(f"factor {u} is not unimodular")
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "unimodular_factor", u)


def blaschke_eval(b: BlaschkeProduct, z):
    """Evaluate a Blaschke product at |z| <= 1 (scalar or ndarray)."""
    out = np.multiply(np.ones_like(np.asarray(z, dtype=complex)), b.unimodular_factor)
    for zero in b.zeros:
        out = out * moebius_map(zero, z)
    if np.isscalar(z) or np.asarray(z).ndim == 0:
        return complex(out)
    return out


def classical_pick_matrix(nodes: Sequence, targets: Sequence, bound: float) -> HermitianMatrix:
    """The classical Pick matrix [(A^2 - w_i conj(w_j)) / (1 - z_i conj(z_j))]."""
    prob = ScalarProblem(tuple(nodes), tuple(targets))
    if not bound > 0:
        raise InvalidInputError("bound must be positive")
    z = prob.node_values()
    w = prob.target_values()
    num = bound * bound - w[:, None] * w.conj()[None, :]
    den = 1.0 - z[:, None] * z.conj()[None, :]
    return HermitianMatrix(num / den)


def classical_feasibility(nodes: Sequence, targets: Sequence, bound: float):
    """Classical Pick matrix together with its PSD status.

    Returns ``(matrix, status)`` with status one of
    ``feasible | marginal | infeasible`` under the library tolerance
    convention.  Status is monotone in the bound.
    """
    m = classical_pick_matrix(nodes, targets, bound)
    eigs = np.linalg.eigvalsh(m.entries)
    return m, feasibility_status(float(eigs[0]), m.scale)


@dataclass(frozen=True)
class SchurInterpolant:
    """Schur-parameter chain representing an interpolant of sup-norm <= 1.

    ``steps`` holds pairs (node, gamma).  Evaluation unwinds the chain from
    the innermost function (the constant ``tail``) outward; a unimodular
    gamma makes the function constant from that level on.
    """

    steps: Tuple[Tuple[complex, complex], ...]
    tail: complex = 0.0 + 0.0j

    def __post_init__(self):
        steps = tuple((complex(z), complex(g)) for z, g in self.steps)
        tail = complex(self.tail)
        if abs(tail) > 1.0 + 1e-12:
            raise InvalidInputError("tail must lie in the closed unit disk")
        for k, (_, g) in enumerate(steps):
            if abs(g) > 1.0 + 1e-9:
                raise InvalidInputError(f"Schur parameter {k} has modulus > 1")
            if k + 1 < len(steps) and abs(g) >= BOUNDARY_MODULUS:
                raise InvalidInputError(
                    "unimodular Schur parameter before the terminal step"
                )
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "tail", tail)

    def __call__(self, z):
        return schur_eval(self, z)


def schur_eval(s: SchurInterpolant, z):
    """Evaluate a Schur chain at |z| <= 1 (scalar or ndarray)."""
    zs = np.asarray(z, dtype=complex)
    w = np.full_like(zs, s.tail)
    for zj, gj in reversed(s.steps):
        if abs(gj) >= BOUNDARY_MODULUS:
            # forced constant: (u + g)/(1 + conj(g) u) == g when |g| = 1
            w = np.full_like(zs, gj / max(abs(gj), 1.0))
            continue
        inner = moebius_map(zj, zs) * w
        w = (inner + gj) / (1.0 + np.conj(gj) * inner)
    if np.isscalar(z) or np.asarray(z).ndim == 0:
        return complex(w)
    return w


def schur_solve(nodes: Sequence, targets: Sequence) -> SchurInterpolant:
    """Construct a sup-norm <= 1 interpolant by the Schur recursion.

    Requires the classical Pick matrix at bound 1 to be PSD within the
    library tolerance (marginal data is allowed).  Each step stores the
    current value gamma_j at node j and maps the remaining data through

        w_i  <-  moebius(gamma_j, w_i) / moebius(z_j, z_i).

    The terminal free parameter is fixed to the constant 0, which keeps the
    output deterministic and of minimal degree.  If a unimodular gamma
    appears, the interpolant is the forced constant from that level on;
    remaining targets inconsistent with it (beyond 1e-8) raise
    :class:`DegenerateDataError`.
    """
    m, status = classical_feasibility(nodes, targets, 1.0)
    if status == "infeasible":
        min_eig = float(np.linalg.eigvalsh(m.entries)[0])
        raise InfeasibleError(
            f"classical Pick matrix is not PSD (min eigenvalue {min_eig:.3e})",
            min_eig=min_eig,
        )
    z = np.array([as_disk_point(x).value for x in nodes], dtype=complex)
    w = np.array([complex(t) for t in targets], dtype=complex)

    steps = []
    for j in range(len(z)):
        gamma = w[j]
        mag = abs(gamma)
        if mag > 1.0 + 1e-8:
            raise InfeasibleError(
                f"transformed target at step {j} has modulus {mag:.3e} > 1"
            )
        if mag >= BOUNDARY_MODULUS:
            gamma = gamma / mag  # snap to the circle; function is constant now
            rest = w[j + 1:]
            if rest.size and np.abs(rest - gamma).max() > 1e-8:
                raise DegenerateDataError(
                    "unimodular Schur parameter with inconsistent remaining "
                    f"targets at step {j}"
                )
            steps.append((complex(z[j]), complex(gamma)))
            return SchurInterpolant(tuple(steps), 0.0)
        steps.append((complex(z[j]), complex(gamma)))
        if j + 1 < len(z):
            zs = z[j + 1:]
            ws = w[j + 1:]
            w = np.concatenate(
                (w[: j + 1], moebius_map(gamma, ws) / moebius_map(z[j], zs))
            )
    return SchurInterpolant(tuple(steps), 0.0)


def boundary_sup_norm(
    f: Callable,
    samples: int = 4096,
    return_gap: bool = False,
):
    """Max of |f| over equispaced boundary samples (a sup-norm lower bound).

    With ``return_gap=True`` also returns a Lipschitz-based estimate of how
    far the sample maximum can sit below the true boundary supremum, using
    the sampled maximum of |f'| along the circle.
    """
    if samples < 8:
        raise InvalidInputError("need at least 8 boundary samples")
    zs = np.exp(2j * math.pi * np.arange(samples) / samples)
    try:
        vals = np.asarray(f(zs), dtype=complex)
        if vals.shape != zs.shape:
            raise TypeError
    except TypeError:
        vals = np.array([f(zk) for zk in zs], dtype=complex)
    mags = np.abs(vals)
    peak = float(mags.max())
    if not return_gap:
        return peak
    dz = np.abs(np.diff(np.concatenate((zs, zs[:1]))))
    df = np.abs(np.diff(np.concatenate((vals, vals[:1]))))
    lip = float((df / dz).max()) if samples > 1 else 0.0
    gap = lip * math.pi / samples
    return peak, gap
