"""Matrix-valued interpolation: exact test with a node at the origin, the
compressed-map norms over the kernel family, and a seeded scan harness that
measures the gap between the two.

For scalar data the family bound equals the true minimal norm.  For matrix
data it is only a lower bound, and the scan harness searches for instances
where the inequality is strict; the configuration keeps a node at the
origin so the true norm stays exactly computable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .constrained_pick import zero_border_coeffs
from .errors import InvalidInputError
from .kernels import (
    DISK_MARGIN,
    DiskPoint,
    KernelParam,
    as_disk_point,
    gram_tensor,
    _check_separated,
)
from .numerics import (
    HermitianMatrix,
    SphereDomain,
    feasibility_status,
    generalized_max_eigenvalue,
    maximize_over_sphere,
    operator_norm,
)


@dataclass(frozen=True)
class MatrixProblem:
    """Nodes in the disk with k x k matrix targets and an optional bound."""

    nodes: Tuple[DiskPoint, ...]
    targets: Tuple[np.ndarray, ...]
    k: int
    bound: Optional[float] = None

    def __post_init__(self):
        nodes = tuple(as_disk_point(z) for z in self.nodes)
        if len(nodes) < 1:
            raise InvalidInputError("at least one node is required")
        if self.k < 1:
            raise InvalidInputError("k must be a positive integer")
        targets = []
        for i, t in enumerate(self.targets):
            a = np.array(t, dtype=complex)
            if a.shape != (self.k, self.k):
                raise InvalidInputError(
                    f"target {i} has shape {a.shape}, expected ({self.k}, {self.k})"
                )
            if not np.isfinite(a).all():
                raise InvalidInputError(f"target {i} has non-finite entries")
            targets.append(a)
        if len(targets) != len(nodes):
            raise InvalidInputError(
                f"{len(nodes)} nodes but {len(targets)} targets"
            )
        _check_separated(np.array([z.value for z in nodes]))
        if self.bound is not None and not self.bound > 0:
            raise InvalidInputError("bound must be positive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "targets", tuple(targets))

    @property
    def n(self) -> int:
        return len(self.nodes)

    def node_values(self) -> np.ndarray:
        return np.array([z.value for z in self.nodes], dtype=complex)

    def target_stack(self) -> np.ndarray:
        return np.stack(self.targets)

    def zero_node_index(self) -> Optional[int]:
        for i, z in enumerate(self.nodes):
            if abs(z.value) <= DISK_MARGIN:
                return i
        return None


def _resolve_bound(prob: MatrixProblem, bound: Optional[float]) -> float:
    if bound is None:
        bound = prob.bound
    if bound is None:
        raise InvalidInputError("a norm bound is required (problem has none)")
    if not bound > 0:
        raise InvalidInputError("bound must be positive")
    return float(bound)


def _block_weights(targets: np.ndarray, bound: float) -> np.ndarray:
    """Stacked blocks (A^2 I - W_r W_c^*) with shape (n, n, k, k)."""
    k = targets.shape[-1]
    ww = np.einsum("rab,cdb->rcad", targets, targets.conj())
    return bound * bound * np.eye(k)[None, None, :, :] - ww


def _assemble_blocks(coeffs: np.ndarray, blocks: np.ndarray) -> np.ndarray:
    """Scalar coefficients (n, n) times blocks (n, n, k, k) -> (nk, nk)."""
    n, k = blocks.shape[0], blocks.shape[-1]
    full = coeffs[:, :, None, None] * blocks
    return full.transpose(0, 2, 1, 3).reshape(n * k, n * k)


def block_family_matrix(
    p: KernelParam, prob: MatrixProblem, bound: Optional[float] = None
) -> HermitianMatrix:
    """Block Pick matrix [(A^2 I - W_i W_j^*) K(z_i, z_j)] for one parameter."""
    bound = _resolve_bound(prob, bound)
    g = gram_tensor(np.array([p.r]), np.array([p.theta]), prob.node_values())[0]
    blocks = _block_weights(prob.target_stack(), bound)
    return HermitianMatrix(_assemble_blocks(g, blocks))


def _zero_reordered(prob: MatrixProblem):
    idx = prob.zero_node_index()
    if idx is None:
        raise InvalidInputError(
            "this construction needs a node at the origin"
        )
    order = [idx] + [i for i in range(prob.n) if i != idx]
    return prob.node_values()[order], prob.target_stack()[order]


def _zero_block_split(prob: MatrixProblem):
    """Bordered block matrix split as A^2 * G - W with G, W bound-free."""
    z, w = _zero_reordered(prob)
    coeffs = zero_border_coeffs(z)
    wx = np.concatenate((w[:1], w))  # doubled origin block row
    k = prob.k
    gpart = _assemble_blocks(coeffs, np.broadcast_to(
        np.eye(k), (len(wx), len(wx), k, k)
    ))
    ww = np.einsum("rab,cdb->rcad", wx, wx.conj())
    wpart = _assemble_blocks(coeffs, ww)
    return gpart, wpart


def zero_block_matrix(
    prob: MatrixProblem, bound: Optional[float] = None
) -> HermitianMatrix:
    """Exact bordered block matrix for matrix problems with a node at 0.

    PSD exactly when a matrix interpolant of norm <= bound exists.  Reduces
    entrywise to the scalar bordered matrix when k = 1.
    """
    bound = _resolve_bound(prob, bound)
    gpart, wpart = _zero_block_split(prob)
    return HermitianMatrix(bound * bound * gpart - wpart)


def matrix_feasible_zero(prob: MatrixProblem, bound: Optional[float] = None) -> str:
    """PSD status of the bordered block matrix (exact criterion)."""
    m = zero_block_matrix(prob, bound)
    min_eig = float(np.linalg.eigvalsh(m.entries)[0])
    return feasibility_status(min_eig, m.scale)


def minimal_matrix_norm_zero(prob: MatrixProblem) -> float:
    """Exact minimal interpolation norm when a node sits at the origin."""
    gpart, wpart = _zero_block_split(prob)
    top = generalized_max_eigenvalue(
        HermitianMatrix(wpart), HermitianMatrix(gpart)
    )
    return math.sqrt(max(top, 0.0))


def q_matrix_zero(nodes: Sequence) -> HermitianMatrix:
    """Gram matrix of the basis {1, z, k_{z_2}, ..., k_{z_n}} in the Hardy
    space, for a node list containing the origin (reordered zero-first).

    Built from the inner products themselves with entry (i, j) pairing the
    j-th basis vector against the i-th, so that c* Q c = ||sum c_j v_j||^2:
    <1,1> = 1, <z,1> = 0, <k_w,1> = 1, <z,k_w> = w, <k_w,z> = conj(w),
    <k_w,k_v> = 1/(1 - v conj(w)).  (The bordered display of this matrix is
    easy to mistranscribe: the row-1 border must conjugate-pair with the
    Cauchy interior or the result is not a Gram matrix at all.)
    """
    z = np.array([as_disk_point(x).value for x in nodes], dtype=complex)
    _check_separated(z)
    idx = [i for i, v in enumerate(z) if abs(v) <= DISK_MARGIN]
    if not idx:
        raise InvalidInputError("the node list must contain the origin")
    order = idx + [i for i in range(len(z)) if i != idx[0]]
    z = z[order]
    n = len(z)
    q = np.zeros((n + 1, n + 1), dtype=complex)
    q[0, 0] = 1.0
    q[1, 1] = 1.0
    for m in range(2, n + 1):
        zm = z[m - 1]
        q[0, m] = 1.0           # <k_{z_m}, 1>
        q[m, 0] = 1.0           # <1, k_{z_m}>
        q[1, m] = np.conj(zm)   # <k_{z_m}, z>
        q[m, 1] = zm            # <z, k_{z_m}>
        for l in range(2, n + 1):
            # <k_{z_l}, k_{z_m}> = 1/(1 - z_m conj(z_l))
            q[m, l] = 1.0 / (1.0 - zm * np.conj(z[l - 1]))
    return HermitianMatrix(q)


def phi_map_norm(prob: MatrixProblem, p: KernelParam) -> float:
    """Norm of the compression of multiplication by the data to the model
    space of one kernel parameter.

    Computed as the top generalized eigenvalue of the pencil
    ``([K_ij W_i W_j^*], [K_ij I_k])``; parameters with a degenerate kernel
    vector are handled on the reduced space, never raising.
    """
    vals = _phi_norm_batch(
        np.array([p.r]), np.array([p.theta]), prob.node_values(), prob.target_stack()
    )
    return float(vals[0])


def _phi_norm_batch(
    r: np.ndarray, theta: np.ndarray, z: np.ndarray, targets: np.ndarray
) -> np.ndarray:
    # The pencil ([K_ij W_i W_j^*], [K_ij I_k]) factors through the n x n
    # Gram: its top eigenvalue is ||(G^{-1/2} x I) blockdiag(W) (G^{1/2} x I)||^2,
    # so only small eigenproblems and one stacked SVD are needed.
    g = gram_tensor(r, theta, z)
    n, k = targets.shape[0], targets.shape[-1]
    s, u = np.linalg.eigh(g)
    floor = 1e-14 * np.maximum(s[:, -1], 1.0)
    s = np.maximum(s, floor[:, None])
    root = np.sqrt(s)
    g_half = np.matmul(u * root[:, None, :], u.conj().transpose(0, 2, 1))
    g_invhalf = np.matmul(u * (1.0 / root)[:, None, :], u.conj().transpose(0, 2, 1))
    mix = np.einsum("gia,gaj->gija", g_invhalf, g_half)
    x = np.einsum("gija,akl->gikjl", mix, targets).reshape(len(r), n * k, n * k)
    sq = np.matmul(x.conj().transpose(0, 2, 1), x)
    top = np.linalg.eigvalsh(sq)[:, -1]
    return np.sqrt(np.maximum(top, 0.0))


def phi_sup_norm(prob: MatrixProblem, dom: Optional[SphereDomain] = None) -> float:
    """Supremum of the compressed-map norm over the kernel sphere.

    This is the family lower bound on the true minimal matrix
    interpolation norm; for scalar data it equals it.
    """
    z = prob.node_values()
    targets = prob.target_stack()

    def batch(r, theta):
        return _phi_norm_batch(r, theta, z, targets)

    _, val = maximize_over_sphere(dom=dom, batch_objective=batch)
    return float(val)


@dataclass(frozen=True)
class ScanReport:
    """Result of a counterexample scan: per-trial gaps plus the worst case."""

    nodes: Tuple[complex, ...]
    k: int
    trials: int
    seed: int
    rows: Tuple[Tuple[int, float, float, float], ...]
    max_gap_trial: int
    max_gap: float
    max_gap_targets: Tuple[np.ndarray, ...]

    def to_csv(self) -> str:
        lines = ["trial,gap,A_true,A_family,seed"]
        for trial, gap, a_true, a_family in self.rows:
            lines.append(
                f"{trial},{gap:.12g},{a_true:.12g},{a_family:.12g},{self.seed}"
            )
        return "\n".join(lines) + "\n"


def gap_for_targets(
    nodes: Sequence,
    targets: Sequence[np.ndarray],
    dom: Optional[SphereDomain] = None,
) -> Tuple[float, float, float]:
    """(gap, A_true, A_family) for one matrix data set with a node at 0."""
    k = np.asarray(targets[0]).shape[0]
    prob = MatrixProblem(tuple(nodes), tuple(targets), k)
    a_true = minimal_matrix_norm_zero(prob)
    a_family = phi_sup_norm(prob, dom)
    return a_true - a_family, a_true, a_family


def counterexample_scan(
    nodes: Sequence,
    k: int,
    trials: int,
    seed: int,
    dom: Optional[SphereDomain] = None,
) -> ScanReport:
    """Seeded random search for a gap between the exact minimal matrix norm
    and the kernel-family lower bound.

    Targets are drawn with i.i.d. complex Gaussian entries, each scaled to
    operator norm 0.9 * u with u uniform in (0, 1).  A strictly positive
    maximal gap is numerical evidence that the family conditions are not
    sufficient for matrix data; absence of a gap refutes nothing (the scan
    sees the sphere only at grid density).  Trials are deterministic for a
    fixed seed.
    """
    node_pts = tuple(as_disk_point(z) for z in nodes)
    if len(node_pts) < 3:
        raise InvalidInputError(
            "the scan needs at least three nodes (two-point problems never gap)"
        )
    if k < 1:
        raise InvalidInputError("k must be a positive integer")
    if all(abs(z.value) > DISK_MARGIN for z in node_pts):
        raise InvalidInputError("the scan needs a node at the origin")

    rng = np.random.default_rng(seed)
    rows = []
    max_gap = -math.inf
    max_trial = -1
    max_targets: Tuple[np.ndarray, ...] = ()
    for trial in range(trials):
        targets = []
        for _ in node_pts:
            w = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
            radius = 0.9 * rng.uniform()
            targets.append(w * (radius / operator_norm(w)))
        gap, a_true, a_family = gap_for_targets(node_pts, targets, dom)
        rows.append((trial, gap, a_true, a_family))
        if gap > max_gap:
            max_gap = gap
            max_trial = trial
            max_targets = tuple(t.copy() for t in targets)
    return ScanReport(
        nodes=tuple(z.value for z in node_pts),
        k=k,
        trials=trials,
        seed=seed,
        rows=tuple(rows),
        max_gap_trial=max_trial,
        max_gap=max_gap,
        max_gap_targets=max_targets,
    )
