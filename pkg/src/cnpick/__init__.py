"""Constrained Nevanlinna-Pick interpolation on the unit disk.

Decides, quantifies, and constructs interpolants f with sup-norm at most A
and f'(0) = 0, through a sphere-parameterized family of reproducing
kernels, a Moebius-parameter search criterion, exact bordered-matrix tests
when a node sits at the origin, matrix-valued analogues, and the induced
pseudo-hyperbolic metric.
"""

from .classical_pick import (
    BlaschkeProduct,
    SchurInterpolant,
    blaschke_eval,
    boundary_sup_norm,
    classical_feasibility,
    classical_pick_matrix,
    moebius_map,
    schur_eval,
    schur_solve,
)
from .constrained_pick import (
    ConstrainedInterpolant,
    FeasibilityReport,
    FourierFunction,
    dist_to_subalgebra,
    family_feasibility,
    feasibility_via_moebius,
    minimal_norm,
    minimal_norm_zero,
    moebius_search,
    moebius_test_matrix,
    solve,
    zero_node_matrix,
)
from .errors import (
    CnpickError,
    DegenerateDataError,
    EvaluationError,
    InfeasibleError,
    InvalidInputError,
    MarginalDataError,
    SingularGramError,
)
from .kernels import (
    DiskPoint,
    KernelParam,
    ScalarProblem,
    family_pick_matrix,
    gram_matrix,
    kernel_eval,
    make_param,
)
from .matrix_level import (
    MatrixProblem,
    ScanReport,
    block_family_matrix,
    counterexample_scan,
    gap_for_targets,
    matrix_feasible_zero,
    minimal_matrix_norm_zero,
    phi_map_norm,
    phi_sup_norm,
    q_matrix_zero,
    zero_block_matrix,
)
from .metric_twopoint import (
    TwoPointRep,
    argmin_param_origin,
    constrained_metric_d1,
    pseudo_metric_dH,
    two_point_matrix_norm,
    two_point_representation,
)
from .numerics import (
    FEASIBLE,
    INFEASIBLE,
    MARGINAL,
    HermitianMatrix,
    SphereDomain,
    generalized_max_eigenvalue,
    hermitian_eigenvalues,
    hpd_sqrt,
    maximize_over_sphere,
    operator_norm,
)

__version__ = "0.1.0"
