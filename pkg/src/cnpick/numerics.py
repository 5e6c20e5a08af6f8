"""Dense Hermitian matrix primitives and a derivative-free grid maximizer.

Everything else in the package builds on the contracts here: the
tolerance-aware positive-semidefinite convention, generalized eigenvalues
of Hermitian pencils, principal square roots, operator norms, and a
deterministic coarse-grid-plus-refinement maximizer over a two-parameter
compact domain.

PSD convention (library-wide): a Hermitian matrix counts as positive
semidefinite when its minimum eigenvalue is at least ``-PSD_TOL * scale``
with ``scale = max(1, max |entry|)``; it is "marginal" when the minimum
eigenvalue lies within ``PSD_TOL * scale`` of zero on either side.  Every
feasibility boundary handled by this package is an exact eigenvalue-zero
set, which is why the convention is centralized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import EvaluationError, InvalidInputError, SingularGramError

PSD_TOL = 1e-9
PSD_FLOOR = 1e-12

FEASIBLE = "feasible"
MARGINAL = "marginal"
INFEASIBLE = "infeasible"

TWO_PI = 2.0 * math.pi


def matrix_scale(entries: np.ndarray) -> float:
    """Scale used by all relative tolerances: max(1, max |entry|)."""
    if entries.size == 0:
        return 1.0
    return max(1.0, float(np.abs(entries).max()))


def feasibility_status(min_eig: float, scale: float, tol: float = PSD_TOL) -> str:
    """Classify a minimum eigenvalue under the library PSD convention."""
    cut = tol * scale
    if min_eig < -cut:
        return INFEASIBLE
    if min_eig <= cut:
        return MARGINAL
    return FEASIBLE


@dataclass(frozen=True)
class HermitianMatrix:
    """Dense complex Hermitian matrix with tolerance-aware semantics.

    Hermiticity is validated on construction: every entry must match the
    conjugate of its transpose partner within ``hermitian_tol * scale``.
    """

    entries: np.ndarray
    hermitian_tol: float = 1e-10

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInputError(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] < 1:
            raise InvalidInputError("matrix dimension must be at least 1")
        if self.hermitian_tol < 0:
            raise InvalidInputError("hermitian_tol must be nonnegative")
        if not np.isfinite(a).all():
            raise InvalidInputError("matrix contains non-finite entries")
        dev = np.abs(a - a.conj().T)
        worst = float(dev.max())
        if worst > self.hermitian_tol * matrix_scale(a):
            i, j = np.unravel_index(int(dev.argmax()), dev.shape)
            raise InvalidInputError(
                f"matrix is not Hermitian: entries ({i},{j}) and ({j},{i}) "
                f"differ by {worst:.3e}"
            )
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def scale(self) -> float:
        return matrix_scale(self.entries)


def _as_hermitian(m) -> HermitianMatrix:
    if isinstance(m, HermitianMatrix):
        return m
    return HermitianMatrix(np.asarray(m))


def hermitian_eigenvalues(h) -> np.ndarray:
    """All eigenvalues of a Hermitian matrix, ascending.

    The input is validated through :class:`HermitianMatrix`; non-Hermitian
    data beyond tolerance raises ``InvalidInputError`` naming the worst
    entry pair.
    """
    h = _as_hermitian(h)
    # eigvalsh works on the lower triangle; symmetrize first so that the
    # tolerated anti-Hermitian part cannot bias the result.
    sym = 0.5 * (h.entries + h.entries.conj().T)
    return np.linalg.eigvalsh(sym)


def generalized_max_eigenvalue(a, b) -> float:
    """Largest lambda with det(A - lambda B) = 0 for Hermitian A, B with B > 0.

    Equals the maximum eigenvalue of B^{-1/2} A B^{-1/2}.  B must be
    positive definite: its minimum eigenvalue has to clear the floor
    ``PSD_FLOOR * scale`` or a :class:`SingularGramError` is raised.
    """
    a = _as_hermitian(a)
    b = _as_hermitian(b)
    if a.dim != b.dim:
        raise InvalidInputError(f"dimension mismatch: {a.dim} vs {b.dim}")
    s, u = np.linalg.eigh(0.5 * (b.entries + b.entries.conj().T))
    floor = PSD_FLOOR * b.scale
    if s[0] <= floor:
        raise SingularGramError(
            f"matrix B is not positive definite (min eigenvalue {s[0]:.3e})",
            min_eig=float(s[0]),
        )
    w = u * (1.0 / np.sqrt(s))
    m = w.conj().T @ a.entries @ w
    return float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[-1])


def hpd_sqrt(b) -> HermitianMatrix:
    """Principal square root of a Hermitian positive definite matrix."""
    b = _as_hermitian(b)
    s, u = np.linalg.eigh(0.5 * (b.entries + b.entries.conj().T))
    if s[0] <= PSD_FLOOR * b.scale:
        raise InvalidInputError(
            f"matrix is not positive definite: eigenvalue {s[0]:.3e}"
        )
    root = (u * np.sqrt(s)) @ u.conj().T
    return HermitianMatrix(0.5 * (root + root.conj().T))


def operator_norm(m) -> float:
    """Largest singular value of a (possibly rectangular) complex matrix."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise InvalidInputError(f"expected a matrix, got ndim={a.ndim}")
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0])


@dataclass(frozen=True)
class SphereDomain:
    """Search domain for the two-parameter polar chart (r, theta).

    ``coarse_grid`` points are evaluated first; each of ``refine_rounds``
    then re-grids a window around the incumbent whose size shrinks by
    ``refine_shrink`` per round.  The search is fully deterministic for a
    fixed domain (ties broken by grid index).

    Radial grid lines are uniform in the polar angle asin(r), not in r
    itself: the chart compresses the sphere near r = 1 (a bump at sphere
    distance ~0.1 from that pole spans only ~0.005 in r), and uniform-in-r
    grids go blind exactly there.
    """

    r_range: Tuple[float, float] = (0.0, 1.0)
    theta_range: Tuple[float, float] = (0.0, TWO_PI)
    coarse_grid: Tuple[int, int] = (64, 128)
    refine_rounds: int = 3
    refine_shrink: float = 0.25

    def __post_init__(self):
        r_lo, r_hi = self.r_range
        t_lo, t_hi = self.theta_range
        n_r, n_t = self.coarse_grid
        if not (0.0 <= r_lo < r_hi):
            raise InvalidInputError(f"bad r_range {self.r_range}")
        if not (t_lo < t_hi <= t_lo + TWO_PI + 1e-12):
            raise InvalidInputError(f"bad theta_range {self.theta_range}")
        if n_r < 2 or n_t < 4:
            raise InvalidInputError("coarse grid must be at least 2 x 4")
        if self.refine_rounds < 0:
            raise InvalidInputError("refine_rounds must be nonnegative")
        if not (0.0 < self.refine_shrink < 1.0):
            raise InvalidInputError("refine_shrink must lie in (0, 1)")

    @property
    def periodic_theta(self) -> bool:
        t_lo, t_hi = self.theta_range
        return abs((t_hi - t_lo) - TWO_PI) <= 1e-12


def _grid_axes(dom: SphereDomain, center: Optional[Tuple[float, float]], round_idx: int):
    """Grid axes for one scan round; round 0 is the coarse grid.

    The radial axis is built uniformly in psi = asin(r).  When the
    incumbent sits on a chart-collapsed pole (r = 0, or r = 1 when the
    range reaches it) its theta coordinate is meaningless, so the theta
    axis is rescanned over the full circle instead of a shrunk window.
    """
    r_lo, r_hi = dom.r_range
    t_lo, t_hi = dom.theta_range
    n_r, n_t = dom.coarse_grid
    psi_lo = math.asin(r_lo)
    psi_hi = math.asin(r_hi)
    if round_idx == 0:
        psis = np.linspace(psi_lo, psi_hi, n_r)
        ts = np.linspace(t_lo, t_hi, n_t, endpoint=not dom.periodic_theta)
        return np.clip(np.sin(psis), r_lo, r_hi), ts
    shrink = dom.refine_shrink ** round_idx
    cr, ct = center
    half_psi = 0.5 * (psi_hi - psi_lo) * shrink
    half_t = 0.5 * (t_hi - t_lo) * shrink
    c_psi = math.asin(min(max(cr, r_lo), r_hi))
    lo = max(psi_lo, c_psi - half_psi)
    hi = min(psi_hi, c_psi + half_psi)
    rs = np.clip(np.sin(np.linspace(lo, hi, n_r)), r_lo, r_hi)
    at_pole = cr <= 1e-12 or (cr >= 1.0 - 1e-12 and r_hi >= 1.0)
    if dom.periodic_theta and at_pole:
        ts = np.linspace(t_lo, t_hi, n_t, endpoint=False)
    elif dom.periodic_theta:
        ts = np.linspace(ct - half_t, ct + half_t, n_t)
    else:
        ts = np.linspace(max(t_lo, ct - half_t), min(t_hi, ct + half_t), n_t)
    return rs, ts


def maximize_over_sphere(
    objective: Optional[Callable] = None,
    dom: Optional[SphereDomain] = None,
    *,
    batch_objective: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None,
):
    """Maximize a function of a kernel parameter over a polar-chart domain.

    ``objective`` takes a :class:`~cnpick.kernels.KernelParam` and returns a
    float.  Internal callers may instead supply ``batch_objective`` taking
    flat arrays ``(r, theta)`` and returning an array of values; it must
    agree pointwise with ``objective``.  Returns the incumbent argmax as a
    ``KernelParam`` together with its value.  Non-finite objective values
    raise :class:`EvaluationError` carrying the offending parameter.
    """
    from .kernels import KernelParam  # deferred: kernels depends on this module

    if objective is None and batch_objective is None:
        raise InvalidInputError("an objective is required")
    dom = dom if dom is not None else SphereDomain()

    best_val = -math.inf
    best_rt: Optional[Tuple[float, float]] = None
    for round_idx in range(dom.refine_rounds + 1):
        rs, ts = _grid_axes(dom, best_rt, round_idx)
        rr, tt = np.meshgrid(rs, ts, indexing="ij")
        r_flat = rr.ravel()
        t_flat = np.mod(tt.ravel(), TWO_PI)
        if batch_objective is not None:
            vals = np.asarray(batch_objective(r_flat, t_flat), dtype=float)
        else:
            vals = np.array(
                [objective(KernelParam(r, t)) for r, t in zip(r_flat, t_flat)],
                dtype=float,
            )
        if not np.isfinite(vals).all():
            k = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise EvaluationError(
                f"objective returned a non-finite value at r={r_flat[k]}, "
                f"theta={t_flat[k]}",
                param=KernelParam(float(r_flat[k]), float(t_flat[k])),
            )
        k = int(vals.argmax())
        if vals[k] > best_val:
            best_val = float(vals[k])
            best_rt = (float(r_flat[k]), float(t_flat[k]))
    return KernelParam(best_rt[0], best_rt[1]), best_val
