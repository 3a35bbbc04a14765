"""Command-line front end.

Exit codes: 0 success, 1 a verdict or hypothesis failed, 2 bad input.
Reports are canonical JSON (sorted keys, fixed float formatting) so a given
request and seed always produce identical bytes.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import fileio
from .apps import beurling_lax, dilate
from .kernels import KernelHandle, kernel_gram
from .linalg import spectral_norm
from .registry import RUNNERS, run_example
from .reporting import dumps_canonical
from .spaces import gleason_check, gleason_from_pair
from .stein import (
    ab_gramian,
    c_abelian_defect,
    nc_gramian,
    observability_analysis,
    q_stein_analysis,
    reverse_stein_residual,
    strong_stability,
)
from .systems import (
    commutativity_defect,
    is_commutative,
    lattice_simulate,
    nc_simulate,
    project_input,
    project_trajectory,
)
from .util import HypothesisError


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--truncation", type=int, default=20, help="series depth")
    parser.add_argument("--tol", type=float, default=1e-9)
    parser.add_argument(
        "--mode", choices=["nc", "commutative", "both"], default="both"
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=str, default=None, help="report path")
    parser.add_argument(
        "--param",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="substitute a named parameter into string-tagged entries",
    )


def _params(args) -> dict[str, complex]:
    out = {}
    for item in args.param:
        if "=" not in item:
            raise ValueError(f"--param expects NAME=VALUE, got {item!r}")
        name, raw = item.split("=", 1)
        out[name.strip()] = fileio.parse_param_value(raw.strip())
    return out


def _emit(report: dict, args) -> None:
    text = dumps_canonical(report)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _request_echo(args, command: str) -> dict:
    return {
        "command": command,
        "truncation": args.truncation,
        "tolerance": args.tol,
        "mode": args.mode,
        "seed": args.seed,
    }


def _gram_section(report) -> dict:
    return {
        "verdict": report.verdict,
        "levelsUsed": report.levels_used,
        "tailEstimate": report.tail_estimate,
        "steinResidual": report.stein_residual,
        "value": None if report.diverged else report.value,
        "levelNorms": report.level_norms,
        "partialNorms": report.partial_norms,
    }


def cmd_analyze(args) -> int:
    sys_ = fileio.load_system(args.system, _params(args))
    pair = sys_.pair
    tol = args.tol
    sections: dict = {
        "dimensions": {
            "d": pair.d,
            "stateDim": pair.state_dim,
            "inputDim": sys_.input_dim,
            "outputDim": pair.output_dim,
        }
    }
    sections["commutativity"] = {
        "defect": commutativity_defect(pair.A),
        "isCommutative": is_commutative(pair.A, tol),
    }
    sections["cAbelianDefect"] = c_abelian_defect(pair, max_total=min(6, args.truncation))
    stab = strong_stability(pair.A, max_level=args.truncation, tol=tol)
    sections["stability"] = {
        "verdict": stab.verdict,
        "levels": stab.levels,
        "tupleContractive": stab.tuple_contractive,
        "deltaNorm": spectral_norm(stab.delta),
    }
    gram = nc_gramian(pair, max_level=max(args.truncation, 40), tol=tol)
    sections["wordGramian"] = _gram_section(gram)
    ab = ab_gramian(pair, max_total_degree=max(args.truncation, 40), tol=tol)
    sections["latticeGramian"] = _gram_section(ab)
    if ab.converged or ab.terminated_exactly:
        rs = reverse_stein_residual(pair, ab, tol)
        sections["reverseStein"] = {
            "display": rs.display,
            "displayIsPsd": rs.display_verdict.is_psd,
            "inequalityHolds": rs.q_verdict.is_psd,
            "inequalityMinEigenvalue": rs.q_verdict.min_eigenvalue,
        }
    obs = observability_analysis(pair, tol)
    sections["observability"] = {
        "observable": obs.observable,
        "exactlyObservable": obs.exactly_observable,
        "aObservable": obs.a_observable,
        "exactlyAObservable": obs.exactly_a_observable,
        "unobservableDim": obs.unobservable_basis.shape[1],
        "aUnobservableDim": obs.a_unobservable_basis.shape[1],
        "unobservableBasis": obs.unobservable_basis,
        "aUnobservableBasis": obs.a_unobservable_basis,
        "kernelInclusionOk": obs.kernel_inclusion_ok,
    }
    try:
        q = q_stein_analysis(pair, tol)
        sections["qStein"] = {
            "inequalityHolds": q.inequality.is_psd,
            "equalityHolds": q.equality_holds,
            "equalityResidual": q.equality_residual,
            "gramBelowQ": None if q.gram_below_q is None else q.gram_below_q.is_psd,
            "offBlockNorms": q.off_block_norms,
            "restrictedPairIsometric": q.restricted_pair_isometric,
        }
    except HypothesisError as exc:
        sections["qStein"] = {"skipped": str(exc)}
    report = {"request": _request_echo(args, "analyze"), "sections": sections}
    _emit(report, args)
    return 0


def cmd_simulate(args) -> int:
    sys_ = fileio.load_system(args.system, _params(args))
    data = fileio.load_input_map(args.input, "nc") if args.input else {}
    import json

    x0 = np.zeros(sys_.pair.state_dim, dtype=complex)
    if args.input:
        raw = json.loads(Path(args.input).read_text())
        if "x0" in raw:
            x0 = np.array([fileio.parse_scalar(v, {}) for v in raw["x0"]])
    depth = args.depth if args.depth is not None else min(args.truncation, 8)
    traj = nc_simulate(sys_, x0, data, depth)
    sections: dict = {
        "ncOutputs": {
            fileio.word_to_str(v): y for v, y in sorted(traj.y.items())
        }
    }
    residual = None
    if args.mode in ("commutative", "both"):
        lattice = lattice_simulate(sys_, x0, project_input(data, sys_.d), depth)
        projected = project_trajectory(traj, sys_.d)
        worst = 0.0
        for n, val in lattice.y.items():
            worst = max(worst, float(np.abs(val - projected.y[n]).max()))
            worst = max(worst, float(np.abs(lattice.x[n] - projected.x[n]).max()))
        residual = worst
        sections["latticeOutputs"] = {
            ",".join(map(str, n)): y for n, y in sorted(lattice.y.items())
        }
        sections["projectionResidual"] = residual
    report = {"request": _request_echo(args, "simulate"), "sections": sections}
    _emit(report, args)
    if residual is not None and residual > max(args.tol, 1e-10):
        return 1
    return 0


def cmd_kernel(args) -> int:
    sys_ = fileio.load_system(args.system, _params(args))
    points = fileio.load_points(args.points)
    flavor = "commutative-inverse-gramian" if args.inverse_gramian else "commutative"
    kh = KernelHandle(pair=sys_.pair, flavor=flavor)
    verdict = kernel_gram(kh, points, args.tol)
    report = {
        "request": _request_echo(args, "kernel"),
        "sections": {
            "flavor": flavor,
            "points": len(points),
            "gramIsPsd": verdict.is_psd,
            "gramMinEigenvalue": verdict.min_eigenvalue,
            "toleranceUsed": verdict.tolerance,
        },
    }
    _emit(report, args)
    return 0 if verdict.is_psd else 1


def cmd_gleason(args) -> int:
    sys_ = fileio.load_system(args.system, _params(args))
    sol = gleason_from_pair(sys_.pair, degree=args.truncation, tol=args.tol)
    chk = gleason_check(sol, d=sys_.pair.d, tol=args.tol)
    report = {
        "request": _request_echo(args, "gleason"),
        "sections": {
            "solves": chk.solves,
            "contractive": chk.contractive,
            "equalsBackshift": chk.equals_backshift,
            "coeffResidual": chk.coeff_residual,
            "sampleResidual": sol.sample_residual,
            "sampleTolerance": sol.sample_tol,
            "divisionMatrices": [T for T in sol.T],
        },
    }
    _emit(report, args)
    return 0 if chk.solves else 1


def cmd_dilate(args) -> int:
    sys_ = fileio.load_system(args.system, _params(args))
    mode = "commutative" if args.mode == "commutative" else "nc"
    rep = dilate(sys_.pair.A, mode=mode, depth=max(args.truncation, 20), tol=args.tol)
    report = {
        "request": _request_echo(args, "dilate"),
        "sections": {
            "hypotheses": rep.hypotheses,
            "coefficientSpaceDim": rep.coefficient_space_dim,
            "obsIsometryResidual": rep.obs_isometry_residual,
            "tailBound": rep.tail_bound,
            "compressionResiduals": rep.compression_residuals,
            "intertwiningResidual": rep.intertwining_residual,
            "poissonUnitalResidual": rep.poisson_unital_residual,
        },
    }
    _emit(report, args)
    return 0 if rep.ok else 1


def cmd_beurling_lax(args) -> int:
    basis = fileio.load_subspace(args.subspace)
    mode = "commutative" if args.mode == "commutative" else "nc"
    res = beurling_lax(basis, mode=mode, tol=args.tol)
    ok = (
        bool(res.hypotheses.get("shift_invariant"))
        and bool(res.hypotheses.get("row_contraction"))
        and bool(res.hypotheses.get("adjoint_strongly_stable"))
        and res.range_residual <= max(args.tol, 1e-7)
        and res.multiplier_norm <= 1 + 1e-9
    )
    report = {
        "request": _request_echo(args, "beurling-lax"),
        "sections": {
            "inputDim": res.input_dim,
            "hypotheses": res.hypotheses,
            "rangeResidual": res.range_residual,
            "multiplierNorm": res.multiplier_norm,
            "partialIsometryDefect": res.partial_isometry_defect,
            "singularValues": res.singular_values,
            "operatorSingularValues": res.operator_singular_values,
            "thetaSupport": sorted(
                "".join(map(str, k)) if res.theta.flavor == "nc" else str(list(k))
                for k in res.theta.coeffs
            ),
        },
    }
    _emit(report, args)
    return 0 if ok else 1


def cmd_paper_example(args) -> int:
    try:
        rep = run_example(args.name, tol=args.tol, seed=args.seed)
    except KeyError as exc:
        print(exc.args[0], file=sys.stderr)
        return 2
    report = {"request": _request_echo(args, "paper-example"), "sections": rep.to_dict()}
    _emit(report, args)
    for check in rep.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {rep.example}:{check.name} (error {check.error:.3e})")
    print(("PASS" if rep.passed else "FAIL") + f" {rep.example}")
    return 0 if rep.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdlsys",
        description="Gramian, Stein, model-space and factorization analyses "
        "of multidimensional Fornasini-Marchesini systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="stability/gramian/observability report")
    p.add_argument("system")
    _common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="run both evolutions and compare")
    p.add_argument("system")
    p.add_argument("input", nargs="?", default=None)
    p.add_argument("--depth", type=int, default=None)
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("kernel", help="sampled Gram positivity of the kernel")
    p.add_argument("system")
    p.add_argument("--points", required=True)
    p.add_argument("--inverse-gramian", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("gleason", help="division operators on the range space")
    p.add_argument("system")
    _common(p)
    p.set_defaults(func=cmd_gleason)

    p = sub.add_parser("dilate", help="shift dilation of the state tuple")
    p.add_argument("system")
    _common(p)
    p.set_defaults(func=cmd_dilate)

    p = sub.add_parser("beurling-lax", help="factor a shift-invariant subspace")
    p.add_argument("subspace")
    _common(p)
    p.set_defaults(func=cmd_beurling_lax)

    p = sub.add_parser("paper-example", help="run a bundled reference example")
    p.add_argument("name", help="one of: " + ", ".join(sorted(RUNNERS)))
    _common(p)
    p.set_defaults(func=cmd_paper_example)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except HypothesisError as exc:
        print(f"hypothesis failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
