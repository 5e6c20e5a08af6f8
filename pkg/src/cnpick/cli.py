"""Problem-file parsing, command dispatch, and CSV/report emission.

Problem files are JSON with a ``version`` field; complex numbers are
``[re, im]`` pairs throughout (no string-encoded complex parsing), matrix
targets are nested row lists, and unknown fields are rejected.  Reports go
to stdout as JSON so they can be re-parsed; CSV outputs go to ``--out`` or
stdout.  Exit codes: 0 success, 2 infeasible, 3 invalid input,
4 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from . import constrained_pick as cp
from . import matrix_level as ml
from . import metric_twopoint as mt
from .classical_pick import boundary_sup_norm
from .errors import (
    CnpickError,
    DegenerateDataError,
    EvaluationError,
    InfeasibleError,
    InvalidInputError,
    MarginalDataError,
    SingularGramError,
)
from .kernels import KernelParam, ScalarProblem, gram_tensor, pick_weight_matrix
from .numerics import INFEASIBLE, SphereDomain

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_INVALID = 3
EXIT_DEGENERATE = 4

KINDS = ("scalar", "matrix", "metric", "distance")

_SCHEMA = {
    "version", "kind", "nodes", "targets", "k", "bound", "scan", "seed",
    "coefficients",
}
_SCAN_SCHEMA = {"grid", "refine_rounds", "refine_shrink"}


@dataclass(frozen=True)
class ProblemFile:
    """Validated problem-file contents."""

    version: int
    kind: str
    nodes: Tuple[complex, ...]
    targets: Optional[tuple] = None
    k: Optional[int] = None
    bound: Optional[float] = None
    scan: Optional[SphereDomain] = None
    seed: Optional[int] = None
    coefficients: Optional[dict] = None

    def scalar_problem(self) -> ScalarProblem:
        if self.kind not in ("scalar", "metric"):
            raise InvalidInputError(f"kind '{self.kind}' is not a scalar problem")
        if self.targets is None:
            raise InvalidInputError("problem file has no targets")
        return ScalarProblem(self.nodes, self.targets, self.bound)

    def matrix_problem(self) -> ml.MatrixProblem:
        if self.kind != "matrix":
            raise InvalidInputError(f"kind '{self.kind}' is not a matrix problem")
        if self.targets is None:
            raise InvalidInputError("problem file has no targets")
        return ml.MatrixProblem(self.nodes, self.targets, self.k, self.bound)

    def fourier_function(self) -> cp.FourierFunction:
        if self.kind != "distance":
            raise InvalidInputError(f"kind '{self.kind}' carries no coefficients")
        return cp.FourierFunction(self.coefficients or {})


def _complex_pair(value, path: str) -> complex:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or not all(isinstance(x, (int, float)) for x in value)
    ):
        raise InvalidInputError(f"{path}: expected a [re, im] pair, got {value!r}")
    return complex(float(value[0]), float(value[1]))


def _parse_scan(raw, path: str) -> SphereDomain:
    if not isinstance(raw, dict):
        raise InvalidInputError(f"{path}: expected an object")
    unknown = set(raw) - _SCAN_SCHEMA
    if unknown:
        raise InvalidInputError(f"{path}: unknown fields {sorted(unknown)}")
    kwargs = {}
    if "grid" in raw:
        g = raw["grid"]
        if not (isinstance(g, list) and len(g) == 2):
            raise InvalidInputError(f"{path}.grid: expected [n_r, n_theta]")
        kwargs["coarse_grid"] = (int(g[0]), int(g[1]))
    if "refine_rounds" in raw:
        kwargs["refine_rounds"] = int(raw["refine_rounds"])
    if "refine_shrink" in raw:
        kwargs["refine_shrink"] = float(raw["refine_shrink"])
    return SphereDomain(**kwargs)


def parse_problem(text: str) -> ProblemFile:
    """Parse and validate a JSON problem file."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise InvalidInputError("problem file must be a JSON object")
    unknown = set(raw) - _SCHEMA
    if unknown:
        raise InvalidInputError(f"unknown fields {sorted(unknown)}")

    version = raw.get("version")
    if version != 1:
        raise InvalidInputError(f"version: expected 1, got {version!r}")
    kind = raw.get("kind")
    if kind not in KINDS:
        raise InvalidInputError(f"kind: expected one of {KINDS}, got {kind!r}")

    nodes_raw = raw.get("nodes")
    if not isinstance(nodes_raw, list) or not nodes_raw:
        raise InvalidInputError("nodes: expected a non-empty list")
    nodes = tuple(
        _complex_pair(v, f"nodes[{i}]") for i, v in enumerate(nodes_raw)
    )
    for i, z in enumerate(nodes):
        if abs(z) >= 1.0 - 1e-12:
            raise InvalidInputError(f"nodes[{i}]: {z} is not in the open unit disk")

    targets = None
    k = raw.get("k")
    if kind == "scalar":
        targets_raw = raw.get("targets")
        if not isinstance(targets_raw, list) or len(targets_raw) != len(nodes):
            raise InvalidInputError(
                f"targets: expected a list of {len(nodes)} complex pairs"
            )
        targets = tuple(
            _complex_pair(v, f"targets[{i}]") for i, v in enumerate(targets_raw)
        )
    elif kind == "matrix":
        if k is None or int(k) < 1:
            raise InvalidInputError("k: matrix problems need a positive integer k")
        k = int(k)
        targets_raw = raw.get("targets")
        if targets_raw is not None:
            if not isinstance(targets_raw, list) or len(targets_raw) != len(nodes):
                raise InvalidInputError(
                    f"targets: expected a list of {len(nodes)} matrices"
                )
            mats = []
            for i, mat in enumerate(targets_raw):
                if not isinstance(mat, list) or len(mat) != k:
                    raise InvalidInputError(f"targets[{i}]: expected {k} rows")
                rows = []
                for r, row in enumerate(mat):
                    if not isinstance(row, list) or len(row) != k:
                        raise InvalidInputError(
                            f"targets[{i}][{r}]: expected {k} entries, got "
                            f"{len(row) if isinstance(row, list) else type(row).__name__}"
                        )
                    rows.append(
                        [_complex_pair(v, f"targets[{i}][{r}][{c}]")
                         for c, v in enumerate(row)]
                    )
                mats.append(np.array(rows, dtype=complex))
            targets = tuple(mats)
    elif kind == "metric":
        if len(nodes) != 2:
            raise InvalidInputError("metric problems need exactly 2 nodes")
        if raw.get("targets") is not None:
            raise InvalidInputError("metric problems take no targets")
    elif kind == "distance":
        coeffs_raw = raw.get("coefficients")
        if not isinstance(coeffs_raw, list) or not coeffs_raw:
            raise InvalidInputError(
                "coefficients: expected a non-empty list of [m, re, im]"
            )

    coefficients = None
    if kind == "distance":
        coefficients = {}
        for i, item in enumerate(raw["coefficients"]):
            if not (isinstance(item, list) and len(item) == 3):
                raise InvalidInputError(
                    f"coefficients[{i}]: expected [m, re, im], got {item!r}"
                )
            m = item[0]
            if not isinstance(m, int):
                raise InvalidInputError(f"coefficients[{i}]: frequency must be an integer")
            coefficients[m] = complex(float(item[1]), float(item[2]))

    bound = raw.get("bound")
    if bound is not None:
        bound = float(bound)
        if not bound > 0:
            raise InvalidInputError(f"bound: must be positive, got {bound}")

    seed = raw.get("seed")
    if seed is not None and not isinstance(seed, int):
        raise InvalidInputError("seed: expected an integer")

    scan = _parse_scan(raw["scan"], "scan") if raw.get("scan") is not None else None

    return ProblemFile(
        version=1,
        kind=kind,
        nodes=nodes,
        targets=targets,
        k=k,
        bound=bound,
        scan=scan,
        seed=seed,
        coefficients=coefficients,
    )


def _param_json(p: Optional[KernelParam]):
    if p is None:
        return None
    return {"r": p.r, "theta": p.theta}


def _cjson(z: complex):
    return [z.real, z.imag]


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _domain_from_args(args, file_scan: Optional[SphereDomain]) -> SphereDomain:
    base = file_scan if file_scan is not None else SphereDomain()
    kwargs = {
        "coarse_grid": base.coarse_grid,
        "refine_rounds": base.refine_rounds,
        "refine_shrink": base.refine_shrink,
    }
    if getattr(args, "grid", None):
        parts = args.grid.lower().split("x")
        if len(parts) != 2:
            raise InvalidInputError("--grid expects NRxNT, e.g. 64x128")
        kwargs["coarse_grid"] = (int(parts[0]), int(parts[1]))
    if getattr(args, "refine", None) is not None:
        kwargs["refine_rounds"] = args.refine
    return SphereDomain(**kwargs)


def _load(args) -> ProblemFile:
    try:
        with open(args.problem, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {args.problem}: {exc}") from exc
    return parse_problem(text)


def _emit(report: dict) -> None:
    print(json.dumps(report, indent=2, sort_keys=True))


def _write_csv(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_check(args) -> int:
    pf = _load(args)
    prob = pf.scalar_problem()
    dom = _domain_from_args(args, pf.scan)
    bound = args.bound if args.bound is not None else pf.bound
    if args.via == "moebius":
        report = cp.feasibility_via_moebius(prob, bound)
    else:
        report = cp.family_feasibility(prob, bound, dom)
    _emit({
        "command": "check",
        "via": args.via,
        "status": report.status,
        "min_eig": report.min_eig,
        "worst_param": _param_json(report.worst_param),
        "witness_lambda": (
            _cjson(report.witness_lambda.value) if report.witness_lambda else None
        ),
        "certified": report.certified,
    })
    return EXIT_INFEASIBLE if report.status == INFEASIBLE else EXIT_OK


def _cmd_solve(args) -> int:
    pf = _load(args)
    prob = pf.scalar_problem()
    dom = _domain_from_args(args, pf.scan)
    bound = args.bound if args.bound is not None else pf.bound
    f = cp.solve(prob, bound, dom)
    z = prob.node_values()
    residuals = np.abs(f(z) - prob.target_values())
    samples = args.samples if args.samples is not None else 4096
    sup = boundary_sup_norm(f, samples)
    _emit({
        "command": "solve",
        "bound": f.scale,
        "lambda": _cjson(f.lam),
        "schur_steps": [
            {"node": _cjson(zj), "gamma": _cjson(gj)} for zj, gj in f.inner.steps
        ],
        "schur_tail": _cjson(f.inner.tail),
        "node_residuals": [float(r) for r in residuals],
        "max_residual": float(residuals.max()),
        "boundary_sup_norm": sup,
        "derivative_at_origin": cp.derivative_at_origin(f),
    })
    if args.out:
        radii = np.linspace(0.03, 0.96, 32)
        angles = np.linspace(0.0, 2.0 * math.pi, 64, endpoint=False)
        lines = ["z_re,z_im,f_re,f_im"]
        for r in radii:
            zs = r * np.exp(1j * angles)
            vals = f(zs)
            for zk, vk in zip(zs, vals):
                lines.append(
                    f"{_fmt(zk.real)},{_fmt(zk.imag)},{_fmt(vk.real)},{_fmt(vk.imag)}"
                )
        _write_csv("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _cmd_norm(args) -> int:
    pf = _load(args)
    prob = pf.scalar_problem()
    dom = _domain_from_args(args, pf.scan)
    value, param = cp.minimal_norm(prob, dom)
    _emit({
        "command": "norm",
        "norm": value,
        "param": _param_json(param),
    })
    return EXIT_OK


def _cmd_metric(args) -> int:
    pf = _load(args)
    if len(pf.nodes) != 2:
        raise InvalidInputError("metric needs exactly 2 nodes")
    dom = _domain_from_args(args, pf.scan)
    z, w = pf.nodes
    d1, param = mt.constrained_metric_d1(z, w, dom, return_param=True)
    _emit({
        "command": "metric",
        "d_H": mt.pseudo_metric_dH(z, w),
        "d_1": d1,
        "argmin_param": _param_json(param),
    })
    return EXIT_OK


def _cmd_dist_alg(args) -> int:
    pf = _load(args)
    f = pf.fourier_function()
    dom = _domain_from_args(args, pf.scan)
    truncation = args.samples if args.samples is not None else 64
    value, estimate = cp.dist_to_subalgebra(f, truncation, dom)
    _emit({
        "command": "dist-alg",
        "distance": value,
        "estimate": estimate,
        "truncation": truncation,
    })
    return EXIT_OK


def _cmd_matrix_check(args) -> int:
    pf = _load(args)
    prob = pf.matrix_problem()
    dom = _domain_from_args(args, pf.scan)
    bound = args.bound if args.bound is not None else pf.bound
    status = ml.matrix_feasible_zero(prob, bound)
    _emit({
        "command": "matrix-check",
        "status": status,
        "exact_minimal_norm": ml.minimal_matrix_norm_zero(prob),
        "family_lower_bound": ml.phi_sup_norm(prob, dom),
    })
    return EXIT_INFEASIBLE if status == INFEASIBLE else EXIT_OK


def _cmd_scan(args) -> int:
    pf = _load(args)
    if pf.kind != "matrix" or pf.k is None:
        raise InvalidInputError("scan needs a matrix-kind problem file with k")
    dom = _domain_from_args(args, pf.scan)
    seed = args.seed if args.seed is not None else (pf.seed or 0)
    trials = args.samples if args.samples is not None else 100
    report = ml.counterexample_scan(pf.nodes, pf.k, trials, seed, dom)
    _write_csv(report.to_csv(), args.out)
    if args.out:
        _emit({
            "command": "scan",
            "trials": trials,
            "seed": seed,
            "max_gap": report.max_gap,
            "max_gap_trial": report.max_gap_trial,
            "csv": args.out,
        })
    return EXIT_OK


def _cmd_landscape(args) -> int:
    pf = _load(args)
    prob = pf.scalar_problem()
    dom = _domain_from_args(args, pf.scan)
    bound = args.bound if args.bound is not None else pf.bound
    if bound is None:
        bound = 1.0
    n_r, n_t = dom.coarse_grid
    rs = np.linspace(dom.r_range[0], dom.r_range[1], n_r)
    ts = np.linspace(dom.theta_range[0], dom.theta_range[1], n_t, endpoint=False)
    rr, tt = np.meshgrid(rs, ts, indexing="ij")
    weight = pick_weight_matrix(prob.target_values(), bound)
    g = gram_tensor(rr.ravel(), tt.ravel(), prob.node_values())
    eigs = np.linalg.eigvalsh(weight[None, :, :] * g)[:, 0]
    lines = ["r,theta,min_eig"]
    for r, t, e in zip(rr.ravel(), tt.ravel(), eigs):
        lines.append(f"{_fmt(r)},{_fmt(t)},{_fmt(e)}")
    _write_csv("\n".join(lines) + "\n", args.out)
    return EXIT_OK


_COMMANDS = {
    "check": _cmd_check,
    "solve": _cmd_solve,
    "norm": _cmd_norm,
    "metric": _cmd_metric,
    "dist-alg": _cmd_dist_alg,
    "matrix-check": _cmd_matrix_check,
    "scan": _cmd_scan,
    "landscape": _cmd_landscape,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cnpick",
        description=(
            "Decide, quantify, and construct solutions to Nevanlinna-Pick "
            "interpolation on the disk constrained by f'(0) = 0."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "check": "feasibility decision for a scalar problem",
        "solve": "construct an interpolant and report diagnostics",
        "norm": "minimal feasible sup-norm bound",
        "metric": "pseudo-hyperbolic and constrained metrics for two points",
        "dist-alg": "finite-section distance to the constrained algebra",
        "matrix-check": "exact matrix feasibility (node at the origin)",
        "scan": "seeded random gap scan between exact and family norms",
        "landscape": "minimum-eigenvalue landscape over the parameter grid",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("problem", help="path to a JSON problem file")
        p.add_argument("--bound", type=float, default=None, help="norm bound A")
        p.add_argument("--grid", default=None, help="coarse grid as NRxNT")
        p.add_argument("--refine", type=int, default=None, help="refinement rounds")
        p.add_argument("--seed", type=int, default=None, help="random seed")
        p.add_argument(
            "--samples", type=int, default=None,
            help="boundary samples / truncation / scan trials, per command",
        )
        p.add_argument("--out", default=None, help="CSV output path")
        if name == "check":
            p.add_argument(
                "--via", choices=("family", "moebius"), default="family",
                help="criterion: sphere scan (family) or Moebius search",
            )
    return parser


def run(argv: Sequence[str]) -> int:
    """Execute one CLI command; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
        return _COMMANDS[args.command](args)
    except InvalidInputError as exc:
        _fail("invalid-input", exc)
        return EXIT_INVALID
    except InfeasibleError as exc:
        _fail("infeasible", exc)
        return EXIT_INFEASIBLE
    except (MarginalDataError, DegenerateDataError, SingularGramError,
            EvaluationError) as exc:
        _fail("degenerate", exc)
        return EXIT_DEGENERATE
    except CnpickError as exc:
        _fail("error", exc)
        return EXIT_DEGENERATE


def _fail(category: str, exc: Exception) -> None:
    sys.stderr.write(json.dumps({"error": category, "message": str(exc)}) + "\n")


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
