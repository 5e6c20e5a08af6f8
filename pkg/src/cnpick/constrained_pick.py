"""Feasibility, minimal norms, and constructive solutions for interpolation
by bounded analytic functions on the disk with vanishing derivative at 0.

Two complementary criteria are implemented.  The *family* criterion scans
the kernel-parameter sphere: the data is feasible at bound A exactly when
the weighted Pick matrix is PSD for every parameter, so one violating
parameter certifies infeasibility while "feasible" is only as strong as
the grid density.  The *Moebius* criterion searches for a single disk
point lambda making the matrix

    [ (z_i^2 conj(z_j)^2 - phi_lambda(w_i) conj(phi_lambda(w_j)))
      / (1 - z_i conj(z_j)) ]

positive semidefinite; a found lambda certifies feasibility and feeds the
constructive solver, which returns f(z) = A * phi_{-lambda}(z^2 h(z)) with
h produced by the classical Schur algorithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .classical_pick import (
    SchurInterpolant,
    boundary_sup_norm,
    moebius_map,
    schur_eval,
    schur_solve,
)
from .errors import (
    DegenerateDataError,
    InfeasibleError,
    InvalidInputError,
    MarginalDataError,
)
from .kernels import (
    DISK_MARGIN,
    DiskPoint,
    KernelParam,
    ScalarProblem,
    gram_tensor,
    pick_weight_matrix,
)
from .numerics import (
    INFEASIBLE,
    PSD_TOL,
    HermitianMatrix,
    SphereDomain,
    feasibility_status,
    generalized_max_eigenvalue,
    matrix_scale,
    maximize_over_sphere,
)

# Search chart for the Moebius parameter: polar grid over the open disk.
LAMBDA_DOMAIN = SphereDomain(r_range=(0.0, 1.0 - 1e-9))


@dataclass(frozen=True)
class FeasibilityReport:
    """Decision plus numeric witness for one feasibility query.

    ``certified`` records the asymmetry of grid-based scans: an infeasible
    verdict from the family scan is rigorous (one bad parameter suffices),
    a feasible verdict holds only at grid density.  For the Moebius
    criterion the roles flip, and a feasible verdict is the certified one.
    """

    status: str
    min_eig: float
    worst_param: Optional[KernelParam] = None
    witness_lambda: Optional[DiskPoint] = None
    certified: bool = False
    domain: Optional[SphereDomain] = None


def _resolve_bound(prob: ScalarProblem, bound: Optional[float]) -> float:
    if bound is None:
        bound = prob.bound
    if bound is None:
        raise InvalidInputError("a norm bound is required (problem has none)")
    if not bound > 0:
        raise InvalidInputError("bound must be positive")
    return float(bound)


def family_feasibility(
    prob: ScalarProblem,
    bound: Optional[float] = None,
    dom: Optional[SphereDomain] = None,
) -> FeasibilityReport:
    """Scan the kernel sphere for the worst-case Pick matrix eigenvalue.

    Minimizes the minimum eigenvalue of the weighted Pick matrix over the
    parameter domain and classifies the result under the PSD tolerance
    convention.
    """
    bound = _resolve_bound(prob, bound)
    dom = dom if dom is not None else SphereDomain()
    z = prob.node_values()
    weight = pick_weight_matrix(prob.target_values(), bound)

    def batch(r, theta):
        g = gram_tensor(r, theta, z)
        return -np.linalg.eigvalsh(weight[None, :, :] * g)[:, 0]

    worst, neg_val = maximize_over_sphere(dom=dom, batch_objective=batch)
    min_eig = -neg_val
    m = gram_tensor(np.array([worst.r]), np.array([worst.theta]), z)[0] * weight
    status = feasibility_status(min_eig, matrix_scale(m))
    return FeasibilityReport(
        status=status,
        min_eig=min_eig,
        worst_param=worst,
        certified=(status == INFEASIBLE),
        domain=dom,
    )


def moebius_test_matrix(nodes: Sequence, targets: Sequence, lam) -> HermitianMatrix:
    """The Moebius-criterion matrix for one candidate lambda."""
    prob = ScalarProblem(tuple(nodes), tuple(targets))
    z = prob.node_values()
    w = prob.target_values()
    lv = complex(lam.value if isinstance(lam, DiskPoint) else lam)
    u = (w - lv) / (1.0 - np.conj(lv) * w)
    z2 = z * z
    num = z2[:, None] * z2.conj()[None, :] - u[:, None] * u.conj()[None, :]
    den = 1.0 - z[:, None] * z.conj()[None, :]
    return HermitianMatrix(num / den)


def _moebius_scan(prob: ScalarProblem, dom: Optional[SphereDomain]):
    """Best lambda for the Moebius criterion: (lambda, min_eig, scale)."""
    z = prob.node_values()
    w = prob.target_values()
    mags = np.abs(w)
    if mags.max() > 1.0 + 1e-9:
        raise InvalidInputError(
            "Moebius criterion needs |target| <= 1; rescale by the bound first"
        )
    w = np.where(mags > 1.0, w / np.maximum(mags, 1.0), w)

    zero_idx = prob.zero_node_index()
    if zero_idx is not None:
        # A node at the origin pins lambda: the diagonal entry there is
        # -|phi_lambda(w)|^2, so PSD forces phi_lambda(w) = 0.
        lam = complex(w[zero_idx])
        if abs(lam) > 1.0 - DISK_MARGIN:
            return None, -math.inf, 1.0
        m = moebius_test_matrix(prob.nodes, tuple(w), lam)
        min_eig = float(np.linalg.eigvalsh(m.entries)[0])
        return lam, min_eig, m.scale

    z2 = z * z
    num0 = z2[:, None] * z2.conj()[None, :]
    den = 1.0 - z[:, None] * z.conj()[None, :]

    def batch(r, theta):
        lam = r * np.exp(1j * theta)
        u = (w[None, :] - lam[:, None]) / (1.0 - lam.conj()[:, None] * w[None, :])
        m = (num0[None, :, :] - u[:, :, None] * u.conj()[:, None, :]) / den[None, :, :]
        return np.linalg.eigvalsh(m)[:, 0]

    dom = dom if dom is not None else LAMBDA_DOMAIN
    best, min_eig = maximize_over_sphere(dom=dom, batch_objective=batch)
    lam = complex(best.r * np.exp(1j * best.theta))
    m = moebius_test_matrix(prob.nodes, tuple(w), lam)
    return lam, float(min_eig), m.scale


def moebius_search(
    prob: ScalarProblem,
    dom: Optional[SphereDomain] = None,
) -> Optional[DiskPoint]:
    """Search the disk for a lambda certifying feasibility at bound 1.

    Maximizes the minimum eigenvalue of the criterion matrix over a polar
    grid with refinement and returns the maximizing lambda when the matrix
    is PSD within tolerance, else ``None``.  With a node at the origin the
    search space collapses to the single forced point.
    """
    lam, min_eig, scale = _moebius_scan(prob, dom)
    if lam is None:
        return None
    if min_eig >= -PSD_TOL * scale:
        return DiskPoint(lam)
    return None


def feasibility_via_moebius(
    prob: ScalarProblem,
    bound: Optional[float] = None,
    dom: Optional[SphereDomain] = None,
) -> FeasibilityReport:
    """Feasibility decision through the Moebius criterion.

    Targets are rescaled by the bound; targets larger than the bound in
    modulus are immediately infeasible.  A found lambda certifies
    feasibility exactly (the constructive direction), while "infeasible"
    here only means the grid found no witness.
    """
    bound = _resolve_bound(prob, bound)
    w = prob.target_values()
    if np.abs(w).max() > bound * (1.0 + 1e-12):
        return FeasibilityReport(
            status=INFEASIBLE,
            min_eig=-float(np.abs(w).max() / bound - 1.0),
            certified=True,
            domain=dom,
        )
    scaled = ScalarProblem(prob.nodes, tuple(w / bound))
    lam, min_eig, scale = _moebius_scan(scaled, dom)
    if lam is None:
        return FeasibilityReport(
            status=INFEASIBLE, min_eig=-math.inf, certified=False, domain=dom
        )
    status = feasibility_status(min_eig, scale)
    if status == INFEASIBLE:
        return FeasibilityReport(
            status=INFEASIBLE, min_eig=min_eig, certified=False, domain=dom
        )
    return FeasibilityReport(
        status=status,
        min_eig=min_eig,
        witness_lambda=DiskPoint(lam),
        certified=True,
        domain=dom,
    )


def _stacked_pencil_max(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Top generalized eigenvalue of stacked Hermitian pencils (A_g, B_g).

    B may be singular only through kernel vectors that vanish, in which
    case the matching rows of A vanish too; clipping tiny eigenvalues of B
    then reproduces the deflated (reduced-space) value.
    """
    s, u = np.linalg.eigh(b)
    floor = 1e-14 * np.maximum(s[:, -1], 1.0)
    s = np.maximum(s, floor[:, None])
    w = u * (1.0 / np.sqrt(s))[:, None, :]
    m = np.matmul(w.conj().transpose(0, 2, 1), np.matmul(a, w))
    m = 0.5 * (m + m.conj().transpose(0, 2, 1))
    return np.linalg.eigvalsh(m)[:, -1]


def minimal_norm(
    prob: ScalarProblem,
    dom: Optional[SphereDomain] = None,
) -> Tuple[float, KernelParam]:
    """Smallest feasible sup-norm bound, with the attaining kernel parameter.

    The square of the minimal norm equals the supremum over the parameter
    sphere of the top generalized eigenvalue of the pencil

        ( [w_i conj(w_j) K(z_i, z_j)],  [K(z_i, z_j)] ).

    Parameters where a kernel vector degenerates (alpha = 0 with a node at
    the origin) are evaluated on the span of the surviving kernel vectors.
    """
    z = prob.node_values()
    w = prob.target_values()
    ww = w[:, None] * w.conj()[None, :]

    def batch(r, theta):
        g = gram_tensor(r, theta, z)
        return _stacked_pencil_max(ww[None, :, :] * g, g)

    param, val = maximize_over_sphere(dom=dom, batch_objective=batch)
    return math.sqrt(max(val, 0.0)), param


def _zero_reordered(prob: ScalarProblem):
    idx = prob.zero_node_index()
    if idx is None:
        raise InvalidInputError(
            "this construction needs a node at the origin; "
            "use family_feasibility / minimal_norm for general node sets"
        )
    order = [idx] + [i for i in range(prob.n) if i != idx]
    return prob.node_values()[order], prob.target_values()[order]


def zero_border_coeffs(z: np.ndarray) -> np.ndarray:
    """Structural coefficients of the bordered matrix for a zero-first node
    list: entry (r, c) multiplies (A^2 - w_r conj(w_c)) with the targets
    expanded so that rows 0 and 1 both belong to the origin node."""
    n = len(z)
    c = np.zeros((n + 1, n + 1), dtype=complex)
    c[0, 0] = 1.0
    c[1, 1] = 1.0
    for m in range(2, n + 1):
        zm = z[m - 1]
        c[0, m] = 1.0
        c[m, 0] = 1.0
        c[1, m] = np.conj(zm)
        c[m, 1] = zm
        for l in range(2, n + 1):
            c[m, l] = 1.0 / (1.0 - zm * np.conj(z[l - 1]))
    return c


def _zero_split(prob: ScalarProblem):
    """Split the bordered matrix as A^2 * C - W with C, W bound-free."""
    z, w = _zero_reordered(prob)
    coeffs = zero_border_coeffs(z)
    wx = np.concatenate(([w[0]], w))  # doubled origin row
    wpart = (wx[:, None] * wx.conj()[None, :]) * coeffs
    return coeffs, wpart


def zero_node_matrix(prob: ScalarProblem, bound: Optional[float] = None) -> HermitianMatrix:
    """Exact bordered feasibility matrix for problems with a node at 0.

    The (n+1) x (n+1) matrix doubles the origin row against the basis
    {1, z, k_{z_2}, ..., k_{z_n}}; it is PSD exactly when the data is
    feasible at the bound, with no sphere scan involved.
    """
    bound = _resolve_bound(prob, bound)
    coeffs, wpart = _zero_split(prob)
    return HermitianMatrix(bound * bound * coeffs - wpart)


def minimal_norm_zero(prob: ScalarProblem) -> float:
    """Exact minimal bound for problems with a node at the origin."""
    coeffs, wpart = _zero_split(prob)
    top = generalized_max_eigenvalue(
        HermitianMatrix(wpart), HermitianMatrix(coeffs)
    )
    return math.sqrt(max(top, 0.0))


@dataclass(frozen=True)
class ConstrainedInterpolant:
    """Interpolant f(z) = scale * phi_{-lam}(z^2 * inner(z)).

    The wrap guarantees f'(0) = 0 identically and |f| <= scale on the
    closed disk whenever the inner Schur chain has sup-norm <= 1.
    """

    scale: float
    lam: complex
    inner: SchurInterpolant

    def __post_init__(self):
        if not self.scale > 0:
            raise InvalidInputError("scale must be positive")
        lam = complex(self.lam)
        if abs(lam) > 1.0 - DISK_MARGIN:
            raise InvalidInputError("lambda must lie in the open unit disk")
        object.__setattr__(self, "lam", lam)

    def __call__(self, z):
        zs = np.asarray(z, dtype=complex)
        g = zs * zs * schur_eval(self.inner, zs)
        out = self.scale * (g + self.lam) / (1.0 + np.conj(self.lam) * g)
        if np.isscalar(z) or np.asarray(z).ndim == 0:
            return complex(out)
        return out


def derivative_at_origin(f) -> float:
    """|f'(0)| estimate by central differences in two directions."""
    h = 1e-4
    d_re = (f(h) - f(-h)) / (2.0 * h)
    d_im = (f(1j * h) - f(-1j * h)) / (2j * h)
    return max(abs(d_re), abs(d_im))


def solve(
    prob: ScalarProblem,
    bound: Optional[float] = None,
    dom: Optional[SphereDomain] = None,
) -> ConstrainedInterpolant:
    """Construct an interpolant of sup-norm <= bound with f'(0) = 0.

    Checks family feasibility, finds the Moebius parameter, peels the
    problem down to a classical one for the Schur solver, and verifies the
    three postconditions (node residuals, derivative at 0, boundary norm)
    before returning.  Strictly feasible data is recommended: marginal
    data that defeats the lambda search at tolerance raises
    :class:`MarginalDataError` advising a retry at a slightly larger bound.
    """
    bound = _resolve_bound(prob, bound)
    report = family_feasibility(prob, bound, dom)
    if report.status == INFEASIBLE:
        raise InfeasibleError(
            f"no interpolant exists at bound {bound:g} "
            f"(min eigenvalue {report.min_eig:.3e} at the worst parameter)",
            min_eig=report.min_eig,
            report=report,
        )

    z = prob.node_values()
    u = prob.target_values() / bound
    mags = np.abs(u)
    if mags.max() > 1.0 + 1e-9:
        raise InfeasibleError(
            f"target modulus {bound * mags.max():.6g} exceeds the bound"
        )
    u = np.where(mags > 1.0, u / np.maximum(mags, 1.0), u)

    zero_idx = prob.zero_node_index()
    if zero_idx is not None:
        lam = complex(u[zero_idx])
        if abs(lam) > 1.0 - DISK_MARGIN:
            raise MarginalDataError(
                "origin target sits on the bound; retry with bound*(1+1e-6)"
            )
    else:
        found = moebius_search(ScalarProblem(prob.nodes, tuple(u)), dom=None)
        if found is None:
            raise MarginalDataError(
                "no Moebius parameter found at tolerance; "
                "retry with bound*(1+1e-6)"
            )
        lam = found.value

    keep = [i for i in range(prob.n) if i != zero_idx]
    hz = z[keep]
    hw = moebius_map(lam, u[keep]) / (hz * hz) if len(keep) else np.array([])

    if len(keep):
        try:
            inner = schur_solve(tuple(hz), tuple(hw))
        except (InfeasibleError, DegenerateDataError, InvalidInputError) as exc:
            raise MarginalDataError(
                f"inner Schur step failed ({exc}); retry with bound*(1+1e-6)"
            ) from exc
    else:
        inner = SchurInterpolant((), 0.0)

    f = ConstrainedInterpolant(bound, lam, inner)

    residual = float(np.abs(f(z) - prob.target_values()).max())
    deriv = derivative_at_origin(f)
    sup = boundary_sup_norm(f, 4096)
    if residual > 1e-7 * bound or deriv > 1e-7 * bound or sup > bound * (1.0 + 1e-7):
        raise MarginalDataError(
            f"postcondition check failed (residual {residual:.3e}, "
            f"|f'(0)| {deriv:.3e}, sup {sup:.9g}); retry with bound*(1+1e-6)"
        )
    return f


@dataclass(frozen=True)
class FourierFunction:
    """Finitely supported Fourier series on the circle: sum c_m e^{imt}."""

    coefficients: Dict[int, complex]

    def __post_init__(self):
        coeffs = {}
        for m, c in dict(self.coefficients).items():
            if int(m) != m:
                raise InvalidInputError(f"frequency {m!r} is not an integer")
            cv = complex(c)
            if not (math.isfinite(cv.real) and math.isfinite(cv.imag)):
                raise InvalidInputError(f"coefficient at {m} is not finite")
            coeffs[int(m)] = cv
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def top_frequency(self) -> int:
        if not self.coefficients:
            return 0
        return max(abs(m) for m in self.coefficients)


def _section_norm(f: FourierFunction, n: int, dom: SphereDomain) -> float:
    """Sup over the parameter sphere of ||(I - P) M_f P|| on the section
    of frequencies -n..n, where P projects onto the truncated subspace
    span{alpha e_0 + beta e_1} + span{e_2, ..., e_n}."""
    dim = 2 * n + 1
    conv = np.zeros((dim, dim), dtype=complex)
    for m, c in f.coefficients.items():
        for q in range(dim):
            p = q + m
            if 0 <= p < dim:
                conv[p, q] += c
    i0 = n       # row/column of frequency 0
    i1 = n + 1   # frequency 1
    col0 = conv[:, i0]
    col1 = conv[:, i1]
    high = conv[:, n + 2 : 2 * n + 1]  # images of e_2 .. e_n

    def batch(r, theta):
        alpha = r * np.exp(1j * theta)
        beta = np.sqrt(np.clip(1.0 - r * r, 0.0, None))
        out = np.empty(len(r))
        for g in range(len(r)):
            a, b = alpha[g], beta[g]
            y = np.empty((dim, n), dtype=complex)
            y[:, 0] = a * col0 + b * col1
            y[:, 1:] = high
            coef = np.conj(a) * y[i0, :] + b * y[i1, :]
            y[n + 2 :, :] = 0.0
            y[i0, :] -= coef * a
            y[i1, :] -= coef * b
            out[g] = np.linalg.svd(y, compute_uv=False)[0]
        return out

    _, val = maximize_over_sphere(dom=dom, batch_objective=batch)
    return float(val)


def dist_to_subalgebra(
    f: FourierFunction,
    truncation: int,
    dom: Optional[SphereDomain] = None,
) -> Tuple[float, float]:
    """Finite-section distance from f to the constrained analytic algebra.

    Returns ``(value, estimate)`` where the estimate is the difference
    between the values at the requested truncation and at half of it.  The
    truncation must satisfy N >= 2*M + 4 for top frequency M.
    """
    m_top = f.top_frequency
    min_n = 2 * m_top + 4
    if truncation < min_n:
        raise InvalidInputError(
            f"truncation {truncation} too small; need at least {min_n}"
        )
    dom = dom if dom is not None else SphereDomain()
    value = _section_norm(f, truncation, dom)
    half = max(truncation // 2, min_n)
    estimate = abs(value - _section_norm(f, half, dom)) if half < truncation else 0.0
    return value, estimate
