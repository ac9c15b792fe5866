"""Batch front end.

Verbs: ptrace, dilate, check, kappa, majorize, werner-search, witness,
sweep, report. Machine-readable JSON-lines go to stdout, diagnostics to
stderr. Exit codes: 0 all verdicts pass, 1 a verdict failed (a certificate
file is written), 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .applications import (
    SearchConfig,
    WitnessSpec,
    check_two_copy,
    confirm_violation,
    search_two_copy_violation,
    sharp_witness_example,
    witness_matrix,
    witness_value,
)
from .core import (
    MatrixFormatError,
    RandomSpec,
    generate,
    matrix_from_payload,
    matrix_to_payload,
)
from .dilations import (
    JordanSpec,
    adjust_dilation_rank,
    check_dimension_constraint,
    idempotent_dilation,
    joint_rank_one_dilation,
    joint_rank_two_dilation,
    nilpotent_dilation,
    normal_dilation,
    purify,
    unitary_dilation,
)
from .inequalities import (
    NormSpec,
    check_audenaert_family,
    check_individual_bound,
    check_kron_majorization,
    check_kyfan_family,
    check_large_rank,
    check_normal_rank_r,
    check_rank_one_gamma,
    check_template,
    kyfan_tilde,
)
from .kappa import KappaQuery, kappa_bruteforce, kappa_value
from .reporting import kappa_curve, sweep_report
from .tensor import TensorSpace, partial_trace

SWEEP_INEQS = (
    "individual",
    "template",
    "kyfan",
    "audenaert",
    "large-rank",
    "rank-one",
    "normal-rank-r",
    "two-copy",
    "dimension",
    "kron",
)


class CliError(Exception):
    """Usage or input problem; maps to exit code 2."""


def _emit(obj: dict) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _note(text: str) -> None:
    sys.stderr.write(text + "\n")


def _load_json(path: str):
    try:
        with open(path, "r") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"{path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(
            f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})"
        ) from exc


def _load_matrix(path: str):
    obj = _load_json(path)
    try:
        return matrix_from_payload(obj)
    except MatrixFormatError as exc:
        raise CliError(f"{path}: {exc}") from exc


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise CliError(f"bad dimension list {text!r}") from exc
    if not dims or any(d < 1 for d in dims):
        raise CliError(f"bad dimension list {text!r}")
    return dims


def _space_for(matrix: np.ndarray, space_arg: str | None, payload_dims) -> TensorSpace:
    if space_arg:
        dims = _parse_dims(space_arg)
    elif payload_dims:
        dims = tuple(payload_dims)
    else:
        raise CliError("no factorization: pass --space d1,d2[,d3] or embed dims")
    side = int(np.prod(dims))
    if matrix.shape[0] != side:
        raise CliError(
            f"space {dims} implies side {side}, matrix side is {matrix.shape[0]}"
        )
    return TensorSpace(dims)


def _jordan_from_payload(obj, path: str) -> JordanSpec:
    if not isinstance(obj, dict) or "blocks" not in obj:
        raise CliError(f"{path}: expected an object with a 'blocks' list")
    blocks = []
    for entry in obj["blocks"]:
        try:
            blocks.append(
                (complex(entry.get("re", 0.0), entry.get("im", 0.0)), int(entry["size"]))
            )
        except (TypeError, KeyError, ValueError) as exc:
            raise CliError(f"{path}: bad block entry {entry!r}") from exc
    basis = None
    if obj.get("basis") is not None:
        try:
            basis, _ = matrix_from_payload(obj["basis"])
        except MatrixFormatError as exc:
            raise CliError(f"{path}: bad basis ({exc})") from exc
    try:
        return JordanSpec(blocks=tuple(blocks), basis=basis)
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from exc


def _write_certificate(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
    _note(f"certificate written to {path}")


# ---------------------------------------------------------------------------
# verb handlers


def _cmd_ptrace(args) -> int:
    matrix, payload_dims = _load_matrix(args.input)
    space = _space_for(matrix, args.space, payload_dims)
    full = complex(np.trace(matrix))
    for i in range(1, space.n_factors + 1):
        others = tuple(j for j in range(1, space.n_factors + 1) if j != i)
        part = partial_trace(matrix, space, out=others)
        _emit(
            {
                "kind": "ptrace",
                "factor": i,
                "matrix": matrix_to_payload(part),
                "trace_residual": abs(complex(np.trace(part)) - full),
            }
        )
    _emit({"kind": "trace", "re": full.real, "im": full.imag})
    return 0


def _cmd_dilate(args) -> int:
    structure = args.structure
    try:
        if structure in ("normal", "unitary", "nilpotent", "idempotent", "purify"):
            if not args.target:
                raise CliError(f"--structure {structure} needs --target")
            target, _ = _load_matrix(args.target)
            if structure == "normal":
                result = normal_dilation(target)
            elif structure == "unitary":
                result = unitary_dilation(target, m_ancilla=args.ancilla)
            elif structure == "nilpotent":
                result = nilpotent_dilation(target)
            elif structure == "idempotent":
                result = idempotent_dilation(target)
            else:
                if args.ancilla is None:
                    raise CliError("--structure purify needs --ancilla")
                result = purify(target, args.ancilla)
        elif structure == "joint-rank-one":
            if not (args.jordan_a and args.jordan_b):
                raise CliError("joint-rank-one needs --jordan-a and --jordan-b")
            spec_a = _jordan_from_payload(_load_json(args.jordan_a), args.jordan_a)
            spec_b = _jordan_from_payload(_load_json(args.jordan_b), args.jordan_b)
            result = joint_rank_one_dilation(spec_a, spec_b)
        elif structure == "rank-two":
            if not (args.target and args.partner):
                raise CliError("rank-two needs --target and --partner")
            a, _ = _load_matrix(args.target)
            b, _ = _load_matrix(args.partner)
            result = joint_rank_two_dilation(a, b)
        elif structure == "adjust":
            if not (args.input and args.space and args.rank is not None):
                raise CliError("adjust needs --input, --space, and --rank")
            matrix, payload_dims = _load_matrix(args.input)
            space = _space_for(matrix, args.space, payload_dims)
            result = adjust_dilation_rank(matrix, space, args.rank)
        else:  # pragma: no cover - argparse restricts choices
            raise CliError(f"unknown structure {structure!r}")
    except (ValueError, RuntimeError) as exc:
        raise CliError(str(exc)) from exc
    payload = result.to_payload()
    payload["kind"] = "dilation"
    _emit(payload)
    return 0


def _norm_spec_from_args(args) -> NormSpec:
    if args.k is not None:
        return NormSpec.kyfan(args.k)
    return NormSpec.schatten(args.p if args.p is not None else 2.0)


def _check_reports(args, matrix, space) -> list:
    ineq = args.ineq
    if ineq == "individual":
        return list(check_individual_bound(matrix, space, _norm_spec_from_args(args)))
    if ineq == "template":
        spec = _norm_spec_from_args(args)
        c = args.c if args.c is not None else 1.0
        kappa = args.kappa
        if kappa is None:
            query = KappaQuery(
                spec=spec,
                c=c,
                n=space.n_factors,
                dims=space.dims,
                r=space.total_dim,
            )
            kappa = kappa_value(query).value
        return [check_template(matrix, space, spec, c, kappa)]
    if ineq == "kyfan":
        if args.k is None:
            raise CliError("check --ineq kyfan needs --k")
        c = args.c if args.c is not None else 1.0
        return [
            check_kyfan_family(matrix, space, args.k, variant=args.variant, c=c)
        ]
    if ineq == "audenaert":
        p = args.p if args.p is not None else 2.0
        gamma = args.gamma if args.gamma is not None else 2.0
        return list(check_audenaert_family(matrix, space, p, gamma))
    if ineq == "large-rank":
        p = args.p if args.p is not None else 2.0
        return [check_large_rank(matrix, space, p)]
    if ineq == "rank-one":
        gamma = args.gamma if args.gamma is not None else 2.0
        return [check_rank_one_gamma(matrix, space, gamma)]
    if ineq == "normal-rank-r":
        return [check_normal_rank_r(matrix, space)]
    if ineq == "two-copy":
        if args.alpha is None:
            raise CliError("check --ineq two-copy needs --alpha")
        return [check_two_copy(matrix, args.alpha)]
    if ineq == "dimension":
        return [check_dimension_constraint(matrix, space)]
    raise CliError(f"unknown inequality {ineq!r}")  # pragma: no cover


def _cmd_check(args) -> int:
    matrix, payload_dims = _load_matrix(args.input)
    if args.ineq == "two-copy":
        side = matrix.shape[0]
        d = math.isqrt(side)
        if d * d != side:
            raise CliError(f"two-copy needs a d*d by d*d matrix, side {side}")
        space = TensorSpace((d, d))
    else:
        space = _space_for(matrix, args.space, payload_dims)
    try:
        reports = _check_reports(args, matrix, space)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    failed = []
    for report in reports:
        line = report.to_dict()
        line["kind"] = "check"
        line["ineq"] = args.ineq
        _emit(line)
        if not report.verdict:
            failed.append(report)
    if failed:
        path = args.certificate or f"violation-{args.ineq}.json"
        _write_certificate(
            path,
            {
                "ineq": args.ineq,
                "matrix": matrix_to_payload(matrix, dims=space.dims),
                "reports": [r.to_dict() for r in failed],
            },
        )
        return 1
    return 0


def _cmd_kappa(args) -> int:
    if args.norm == "kyfan":
        if args.k is None:
            raise CliError("kappa --norm kyfan needs --k")
        spec = NormSpec.kyfan(args.k)
    else:
        spec = NormSpec.schatten(args.p if args.p is not None else 2.0)
    if args.dims:
        dims = _parse_dims(args.dims)
        if len(dims) != args.n:
            raise CliError(f"--dims lists {len(dims)} factors but --n is {args.n}")
    elif args.d:
        dims = (args.d,) * args.n
    else:
        raise CliError("kappa needs --d or --dims")
    total = int(np.prod(dims))
    r = args.r if args.r is not None else total
    try:
        query = KappaQuery(spec=spec, c=args.c, n=args.n, dims=dims, r=r)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    if args.brute:
        est = kappa_bruteforce(query, budget=args.budget, seed=args.seed)
        _emit(
            {
                "kind": "kappa",
                "value": est.value,
                "branch": "brute-force",
                "bound": "lower",
                "diagnostics": {"spread": est.spread, "starts": est.starts},
            }
        )
    else:
        res = kappa_value(query, budget=args.budget, seed=args.seed)
        line = res.to_dict()
        line["kind"] = "kappa"
        _emit(line)
    return 0


def _cmd_majorize(args) -> int:
    paths = [p for p in args.inputs.split(",") if p]
    space = TensorSpace(_parse_dims(args.space))
    if len(paths) != space.n_factors:
        raise CliError(
            f"{len(paths)} inputs for a {space.n_factors}-factor space"
        )
    cs = [_load_matrix(p)[0] for p in paths]
    try:
        report = check_kron_majorization(cs, space)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    line = report.to_dict()
    line["kind"] = "majorize"
    _emit(line)
    if not report.verdict:
        path = args.certificate or "violation-kron.json"
        _write_certificate(
            path,
            {
                "ineq": "kron",
                "matrices": [matrix_to_payload(c) for c in cs],
                "report": report.to_dict(),
            },
        )
        return 1
    return 0


def _cmd_werner_search(args) -> int:
    cfg = SearchConfig(
        seed=args.seed,
        starts=args.starts,
        iterations=args.iterations,
        step_init=args.step,
    )
    try:
        result = search_two_copy_violation(args.d, args.alpha, cfg, jobs=args.jobs)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    violation = confirm_violation(result.matrix, args.alpha)
    _emit(
        {
            "kind": "werner-search",
            "alpha": args.alpha,
            "d": args.d,
            "starts": cfg.starts,
            "objective": result.objective,
            "slack": result.report.slack,
            "start_index": result.start_index,
            "violation": violation,
        }
    )
    if violation:
        path = args.certificate or "violation-two-copy.json"
        _write_certificate(
            path,
            {
                "params": {"alpha": args.alpha, "d": args.d, "seed": cfg.seed},
                "matrix": matrix_to_payload(result.matrix),
                "slack": result.report.slack,
                "tolerance": result.report.tolerance,
                "start_index": result.start_index,
            },
        )
        return 1
    return 0


def _cmd_witness(args) -> int:
    try:
        spec = WitnessSpec(d=args.d, n=args.n, k=args.k)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    if args.input:
        matrix, _ = _load_matrix(args.input)
    elif args.example == "sharp":
        matrix = sharp_witness_example(spec)
    else:
        raise CliError("witness needs --input or --example sharp")
    try:
        value = witness_value(spec, matrix)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    line = {
        "kind": "witness",
        "n": args.n,
        "d": args.d,
        "k": args.k,
        "value": value,
    }
    _emit(line)
    if args.matrix:
        try:
            wk = witness_matrix(spec)
        except ValueError as exc:
            raise CliError(str(exc)) from exc
        _emit({"kind": "witness-matrix", "matrix": matrix_to_payload(wk)})
    return 0


# ---------------------------------------------------------------------------
# sweep


def _sweep_cell(task) -> list[dict]:
    ineq, dims, seed = task
    space = TensorSpace(dims)
    side = space.total_dim
    n = space.n_factors
    equal = len(set(dims)) == 1

    def rand(kind: str, rank: int | None = None) -> np.ndarray:
        return generate(RandomSpec(seed=seed, kind=kind, shape=(side, side), rank=rank))

    reports = []
    if ineq == "individual" and n == 2:
        reports.extend(check_individual_bound(rand("ginibre"), space, NormSpec.schatten(2.0)))
    elif ineq == "template":
        if n == 2:
            reports.append(
                check_template(rand("ginibre"), space, NormSpec.schatten(2.0), 1.0, 1.0)
            )
        elif equal:
            kt = kyfan_tilde(n, dims[0], 1)
            reports.append(
                check_template(rand("ginibre"), space, NormSpec.kyfan(1), 1.0, float(kt))
            )
    elif ineq == "kyfan" and equal:
        m = rand("ginibre")
        reports.append(check_kyfan_family(m, space, 1, variant="general"))
        if n == 2:
            reports.append(check_kyfan_family(m, space, 1, variant="n2"))
        reports.append(
            check_kyfan_family(rand("fixed_rank", rank=1), space, 1, variant="lowrank", c=0.5)
        )
    elif ineq == "audenaert":
        reports.extend(check_audenaert_family(rand("ginibre"), space, 2.0, 2.0))
    elif ineq == "large-rank" and equal:
        reports.append(check_large_rank(rand("ginibre"), space, 2.0))
    elif ineq == "rank-one" and n == 2:
        reports.append(check_rank_one_gamma(rand("fixed_rank", rank=1), space, 2.0))
    elif ineq == "normal-rank-r" and n == 2:
        reports.append(check_normal_rank_r(rand("normal"), space))
    elif ineq == "two-copy" and n == 2 and equal:
        reports.append(check_two_copy(rand("fixed_rank", rank=2), -1.0 / 3.0))
    elif ineq == "dimension" and n == 2:
        reports.append(check_dimension_constraint(rand("ginibre"), space))
    elif ineq == "kron":
        cs = [
            generate(
                RandomSpec(seed=seed * 8 + i + 1, kind="ginibre", shape=(d_i, d_i))
            )
            for i, d_i in enumerate(dims)
        ]
        reports.append(check_kron_majorization(cs, space))

    shape_label = "x".join(str(d_i) for d_i in dims)
    lines = []
    for report in reports:
        line = report.to_dict()
        line["kind"] = "sweep"
        line["ineq"] = ineq
        line["shape"] = shape_label
        line["seed"] = seed
        lines.append(line)
    return lines


def _cmd_sweep(args) -> int:
    shapes = [
        _parse_dims(text.replace("x", ",")) for text in args.shapes.split(",") if text
    ]
    if not shapes:
        raise CliError("empty --shapes")
    ineqs = SWEEP_INEQS if args.ineq == "all" else (args.ineq,)
    for ineq in ineqs:
        if ineq not in SWEEP_INEQS:
            raise CliError(f"unknown inequality {ineq!r}")
    tasks = [
        (ineq, dims, seed)
        for ineq in ineqs
        for dims in shapes
        for seed in range(args.seeds)
    ]
    if args.jobs > 1:
        chunk = max(1, len(tasks) // (args.jobs * 8))
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            batches = list(pool.map(_sweep_cell, tasks, chunksize=chunk))
    else:
        batches = [_sweep_cell(t) for t in tasks]
    failures = []
    summary: dict[tuple[str, str], list] = {}
    for lines in batches:
        for line in lines:
            _emit(line)
            key = (line["ineq"], line["name"])
            entry = summary.setdefault(key, [0, 0, math.inf])
            entry[0] += 1
            if not line["verdict"]:
                entry[1] += 1
                failures.append(line)
            entry[2] = min(entry[2], line["slack"])
    if args.summary:
        _note(f"{'ineq':<14} {'report':<28} {'count':>6} {'fail':>5} {'min slack':>12}")
        for (ineq, name), (count, fail, min_slack) in sorted(summary.items()):
            _note(f"{ineq:<14} {name:<28} {count:>6} {fail:>5} {min_slack:>12.3e}")
    if failures:
        path = args.certificate or "violation-sweep.json"
        _write_certificate(path, {"failures": failures})
        return 1
    return 0


def _cmd_report(args) -> int:
    if args.kind == "kappa":
        files = kappa_curve(
            args.out,
            p=args.p if args.p is not None else 2.0,
            d=args.d if args.d else 2,
            c_max=args.c_max,
            points=args.points,
            budget=args.budget,
            seed=args.seed,
        )
    else:
        if not args.input:
            raise CliError("report --kind sweep needs --input JSONL")
        files = sweep_report(args.out, args.input)
    _emit({"kind": "report", "files": files})
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptrace-lab",
        description="partial-trace constructions, inequalities, and searches",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("ptrace", help="partial traces of a matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--space")
    p.set_defaults(func=_cmd_ptrace)

    p = sub.add_parser("dilate", help="structured and joint dilations")
    p.add_argument(
        "--structure",
        required=True,
        choices=[
            "normal",
            "unitary",
            "nilpotent",
            "idempotent",
            "purify",
            "joint-rank-one",
            "rank-two",
            "adjust",
        ],
    )
    p.add_argument("--target")
    p.add_argument("--partner")
    p.add_argument("--input")
    p.add_argument("--jordan-a", dest="jordan_a")
    p.add_argument("--jordan-b", dest="jordan_b")
    p.add_argument("--ancilla", type=int)
    p.add_argument("--space")
    p.add_argument("--rank", type=int)
    p.set_defaults(func=_cmd_dilate)

    p = sub.add_parser("check", help="evaluate one inequality on one matrix")
    p.add_argument(
        "--ineq",
        required=True,
        choices=[
            "individual",
            "template",
            "kyfan",
            "audenaert",
            "large-rank",
            "rank-one",
            "normal-rank-r",
            "two-copy",
            "dimension",
        ],
    )
    p.add_argument("--input", required=True)
    p.add_argument("--space")
    p.add_argument("--p", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--variant", default="general", choices=["general", "n2", "lowrank"])
    p.add_argument("--certificate")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("kappa", help="template constant kappa(c)")
    p.add_argument("--norm", required=True, choices=["schatten", "kyfan"])
    p.add_argument("--p", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--d", type=int)
    p.add_argument("--dims")
    p.add_argument("--r", type=int)
    p.add_argument("--brute", action="store_true")
    p.add_argument("--budget", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_kappa)

    p = sub.add_parser("majorize", help="Kronecker-sum weak submajorization")
    p.add_argument("--inputs", required=True, help="comma separated matrix files")
    p.add_argument("--space", required=True)
    p.add_argument("--certificate")
    p.set_defaults(func=_cmd_majorize)

    p = sub.add_parser("werner-search", help="two-copy counterexample search")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--starts", type=int, default=1000)
    p.add_argument("--iterations", type=int, default=60)
    p.add_argument("--step", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--certificate")
    p.set_defaults(func=_cmd_werner_search)

    p = sub.add_parser("witness", help="Schmidt-number witness values")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--input")
    p.add_argument("--example", choices=["sharp"])
    p.add_argument("--matrix", action="store_true", help="also emit the dense witness")
    p.set_defaults(func=_cmd_witness)

    p = sub.add_parser("sweep", help="seeded random sweeps of the checkers")
    p.add_argument("--ineq", default="all")
    p.add_argument("--shapes", default="2x2,2x3,3x3,2x2x2")
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--summary", action="store_true")
    p.add_argument("--certificate")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("report", help="figures and tables from results")
    p.add_argument("--kind", required=True, choices=["kappa", "sweep"])
    p.add_argument("--out", required=True)
    p.add_argument("--input")
    p.add_argument("--p", type=float)
    p.add_argument("--d", type=int)
    p.add_argument("--c-max", dest="c_max", type=float, default=2.5)
    p.add_argument("--points", type=int, default=26)
    p.add_argument("--budget", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_report)

    return parser


def run(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CliError as exc:
        _note(f"error: {exc}")
        return 2
    except (MatrixFormatError, ValueError) as exc:
        _note(f"error: {exc}")
        return 2


def entry() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    entry()
