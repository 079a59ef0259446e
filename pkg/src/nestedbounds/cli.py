"""Command-line interface.

Usage:
    nestedbounds validate --input m.json
    nestedbounds bound --input m.json --ordering 1,2,3,4 --max-level 2
    nestedbounds search --input m.json --max-level 4 [--format csv] [--workers 4]
    nestedbounds check --input m.json --ordering 4,3,2,1
    nestedbounds generate uniform --n 6 --seed 3 --output m.json
    nestedbounds oracle --random --n-el 6 --n 5 --seed 1
    nestedbounds experiment ti --trials 1000000 --seed 1

Exit status: 0 on success, 2 when an input fails validation, 1 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

from . import conditions, datasets, experiments, oracle, search
from .bounds import LevelError, bound_all_levels
from .matrix import (
    DeltaModel,
    DeltaRangeError,
    MatrixShapeError,
    OrderingError,
    ProbabilityMatrix,
    check_ordering,
    generate_conditional_uniform,
    generate_delta,
    matrix_from_dict,
    matrix_to_dict,
    parse_ordering,
    validate,
)

EXIT_OK, EXIT_USAGE, EXIT_INVALID = 0, 1, 2


class UsageError(Exception):
    pass


class InvalidInput(Exception):
    def __init__(self, message: str, details: list | None = None):
        super().__init__(message)
        self.details = details or []


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}")


def _load_matrix(path: str) -> ProbabilityMatrix:
    doc = _read_json(path)
    try:
        matrix = matrix_from_dict(doc)
    except (MatrixShapeError, ValueError, TypeError) as exc:
        raise InvalidInput(str(exc))
    report = validate(matrix)
    if not report.ok:
        raise InvalidInput("matrix failed validation", [v.to_dict() for v in report.violations])
    return matrix


def _ordering(args, n: int) -> tuple[int, ...]:
    if not getattr(args, "ordering", None):
        return tuple(range(n))
    try:
        return check_ordering(parse_ordering(args.ordering), n)
    except (OrderingError, ValueError) as exc:
        raise InvalidInput(str(exc))


def _max_level(args, n: int, default: int | None = None) -> int:
    level = args.max_level if args.max_level is not None else (default or max(n - 1, 1))
    if n > 1 and not 1 <= level <= n - 1:
        raise InvalidInput(f"level {level} outside 1..{n - 1}")
    return level


def _emit(args, doc) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    _write(args, text)


def _write(args, text: str) -> None:
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


# -- commands -------------------------------------------------------------------


def cmd_validate(args) -> int:
    doc = _read_json(args.input)
    if args.system:
        try:
            system = oracle.system_from_dict(doc)
        except (ValueError, KeyError, TypeError) as exc:
            _emit(args, {"valid": False, "violations": [{"message": str(exc)}]})
            return EXIT_INVALID
        _emit(args, {"valid": True, "n_el": system.n_el, "n": system.n, "violations": []})
        return EXIT_OK
    try:
        matrix = matrix_from_dict(doc)
    except (MatrixShapeError, ValueError, TypeError) as exc:
        _emit(args, {"valid": False, "violations": [{"message": str(exc)}]})
        return EXIT_INVALID
    report = validate(matrix)
    _emit(args, {"valid": report.ok, "n": matrix.n, "violations": [v.to_dict() for v in report.violations]})
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_bound(args) -> int:
    matrix = _load_matrix(args.input)
    sigma = _ordering(args, matrix.n)
    if args.level is not None:
        args.max_level = args.level
    L = _max_level(args, matrix.n)
    lb = bound_all_levels(matrix, sigma, L)
    values = list(lb.values)
    levels = list(range(1, len(values) + 1))
    if args.level is not None and matrix.n > 1:
        values, levels = values[-1:], levels[-1:]
    _emit(args, {"n": matrix.n, "ordering": [k + 1 for k in sigma], "levels": levels, "values": values})
    return EXIT_OK


def cmd_search(args) -> int:
    matrix = _load_matrix(args.input)
    L = _max_level(args, matrix.n)
    t0 = time.perf_counter()
    try:
        orderings, values = search.all_level_bounds(matrix, L, workers=args.workers, cap=args.cap)
    except search.SearchCapError as exc:
        raise UsageError(str(exc))
    elapsed = 0.0 if args.no_timing else time.perf_counter() - t0
    if args.format == "csv":
        buf = io.StringIO()
        search.write_orderings_csv(buf, orderings, values)
        _write(args, buf.getvalue())
        return EXIT_OK
    summaries = search.summarize(orderings, values, args.tolerance, args.max_argmin, elapsed)
    greedy = None
    if matrix.n >= 2:
        value, order = search.greedy_bound(matrix, 1)
        greedy = {"ordering": [k + 1 for k in order], "B1": value}
    _emit(args, {
        "n": matrix.n,
        "orderings": len(orderings),
        "levels": [s.to_dict() for s in summaries],
        "greedy": greedy,
    })
    return EXIT_OK


def cmd_check(args) -> int:
    matrix = _load_matrix(args.input)
    n = matrix.n
    sigma = _ordering(args, n)
    if n < 3:
        raise InvalidInput("condition checks need at least 3 events")
    lb = bound_all_levels(matrix, sigma)
    w1 = conditions.condition1(matrix, sigma)
    out = {
        "n": n,
        "ordering": [k + 1 for k in sigma],
        "bounds": list(lb.values),
        "condition1": w1.to_dict() if w1 else None,
        "condition1_min_orderings": conditions.count_orderings_condition1(n, w1.indices[2] + 1) if w1 else None,
        "condition2": {},
    }
    for m in range(1, n - 1):
        w2 = conditions.condition2_any(matrix, sigma, m)
        out["condition2"][str(m)] = w2.to_dict() if w2 else None
    if args.level is not None and args.line is not None:
        try:
            out["condition2_at"] = conditions.condition2_at(matrix, sigma, args.level, args.line - 1)
        except LevelError as exc:
            raise InvalidInput(str(exc))
    _emit(args, out)
    return EXIT_OK


def cmd_generate(args) -> int:
    try:
        if args.kind == "delta":
            matrix = generate_delta(DeltaModel(tuple(_float_list(args.first_order)), args.delta))
        elif args.kind == "uniform":
            matrix = generate_conditional_uniform(args.n, args.seed, args.draw)
        else:
            matrix = datasets.EXAMPLES[args.name]()
    except DeltaRangeError as exc:
        raise InvalidInput(str(exc))
    except ValueError as exc:
        raise UsageError(str(exc))
    _emit(args, matrix_to_dict(matrix))
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.input:
        try:
            system = oracle.system_from_dict(_read_json(args.input))
        except (ValueError, KeyError, TypeError) as exc:
            raise InvalidInput(str(exc))
    else:
        try:
            system = oracle.random_system(args.n_el, args.n, args.seed)
        except ValueError as exc:
            raise UsageError(str(exc))
    if args.save_system:
        oracle.save_system(system, args.save_system)
    matrix = oracle.project_second_order(system)
    doc = {
        "n_el": system.n_el,
        "n": system.n,
        "cut_sets": [sorted(e + 1 for e in c) for c in system.cut_sets],
        "union_probability": oracle.atom_union_probability(system),
        "matrix": matrix.p.tolist(),
    }
    if matrix.n > 1:
        doc["best_bounds"] = [
            search.optimal_bound(matrix, m)[0] for m in range(1, matrix.n)
        ] if matrix.n <= args.cap else None
    _emit(args, doc)
    return EXIT_OK


def cmd_experiment(args) -> int:
    kind = args.kind
    if kind == "ti":
        est = experiments.estimate_Ti_probability(args.trials, args.seed)
        parts = experiments.estimate_Ti_partition(args.trials, args.seed)
        _emit(args, {
            **est.to_dict(),
            "target": float(experiments.TI_PROBABILITY),
            "partition": {k: {**v.to_dict(), "target": float(experiments.TI_PARTITION[k])}
                          for k, v in parts.items()},
        })
        return EXIT_OK
    if kind == "lower-bound":
        rows = [{"n": n, "lower_bound": experiments.improvement_lower_bound(n)} for n in _int_list(args.n)]
        return _emit_rows(args, rows)
    if kind == "improvement":
        m, m1 = args.pair
        rows = []
        for n in _int_list(args.n):
            try:
                est = experiments.estimate_improvement_probability(
                    n, (m, m1), args.trials, args.seed, workers=args.workers, tolerance=args.tolerance
                )
            except ValueError as exc:
                raise UsageError(str(exc))
            rows.append({"n": n, "pair": [m, m1], "trials": est.trials, "seed": est.seed,
                         "estimate": est.estimate, "std_error": est.std_error,
                         "lower_bound": experiments.improvement_lower_bound(n) if n >= 3 else 0.0})
        return _emit_rows(args, rows)
    if kind == "delta-sweep":
        try:
            sweep = experiments.delta_sweep(_float_list(args.first_order), _float_list(args.deltas), args.max_level)
        except DeltaRangeError as exc:
            raise InvalidInput(str(exc))
        if args.format == "csv":
            rows = [{"delta": r.delta, "top_beats_previous": r.top_beats_previous,
                     "top_beats_first": r.top_beats_first,
                     **{f"B{s.level}_min": s.min for s in r.summaries},
                     **{f"B{s.level}_max": s.max for s in r.summaries}} for r in sweep]
            return _emit_rows(args, rows)
        docs = [r.to_dict() for r in sweep]
        if args.no_timing:
            for d in docs:
                for s in d["summaries"]:
                    s["wall_time"] = 0.0
        _emit(args, docs)
        return EXIT_OK
    raise UsageError(f"unknown experiment {kind}")


def _emit_rows(args, rows: list[dict]) -> int:
    if getattr(args, "format", "json") == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (f"{v:.9g}" if isinstance(v, float) else
                                 "-".join(map(str, v)) if isinstance(v, list) else v)
                             for k, v in row.items()})
        _write(args, buf.getvalue())
    else:
        _emit(args, rows[0] if len(rows) == 1 else rows)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nestedbounds", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, matrix=True):
        if matrix:
            p.add_argument("--input", "-i", required=True, help="matrix JSON document")
        p.add_argument("--output", "-o", help="write output here instead of stdout")

    p = sub.add_parser("validate", help="check a matrix (or --system) document")
    common(p)
    p.add_argument("--system", action="store_true", help="input is an atom-system document")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bound", help="bounds for one ordering")
    common(p)
    p.add_argument("--ordering", help="1-based ordering, e.g. 4,3,2,1 (default identity)")
    p.add_argument("--level", type=int, help="single level m")
    p.add_argument("--max-level", type=int, help="levels 1..L (default n-1)")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("search", help="statistics over all n! orderings")
    common(p)
    p.add_argument("--max-level", type=int)
    p.add_argument("--tolerance", type=float, default=search.REL_TOL)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--cap", type=int, default=search.DEFAULT_CAP)
    p.add_argument("--max-argmin", type=int, default=24)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--no-timing", action="store_true", help="report wall_time as 0")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("check", help="conditions for strict improvement in one ordering")
    common(p)
    p.add_argument("--ordering")
    p.add_argument("--level", type=int, help="with --line: evaluate condition 2 at one line")
    p.add_argument("--line", type=int, help="1-based line index")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("generate", help="write a matrix document")
    gsub = p.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    g = gsub.add_parser("delta")
    common(g, matrix=False)
    g.add_argument("--first-order", required=True, help="comma-separated P_i")
    g.add_argument("--delta", type=float, default=0.0)
    g = gsub.add_parser("uniform")
    common(g, matrix=False)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--draw", type=int, default=0)
    g = gsub.add_parser("example")
    common(g, matrix=False)
    g.add_argument("name", choices=sorted(datasets.EXAMPLES))
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("oracle", help="exact union probability of an atom system")
    common(p, matrix=False)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", "-i", help="system JSON document")
    src.add_argument("--random", action="store_true")
    p.add_argument("--n-el", type=int, default=6)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=8, help="largest n for which optima are searched")
    p.add_argument("--save-system", help="also write the system document here")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("experiment", help="Monte Carlo experiments")
    esub = p.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    e = esub.add_parser("ti")
    common(e, matrix=False)
    e.add_argument("--trials", type=int, default=1_000_000)
    e.add_argument("--seed", type=int, default=0)
    e = esub.add_parser("improvement")
    common(e, matrix=False)
    e.add_argument("--n", default="4", help="comma-separated sizes")
    e.add_argument("--pair", type=int, nargs=2, default=(1, 2), metavar=("M", "M1"))
    e.add_argument("--trials", type=int, default=1000)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--tolerance", type=float, default=search.REL_TOL)
    e.add_argument("--format", choices=["json", "csv"], default="json")
    e = esub.add_parser("lower-bound")
    common(e, matrix=False)
    e.add_argument("--n", default="3,6,9,12")
    e.add_argument("--format", choices=["json", "csv"], default="json")
    e = esub.add_parser("delta-sweep")
    common(e, matrix=False)
    e.add_argument("--first-order", default=",".join(map(str, datasets.DELTA_FIRST_ORDER)))
    e.add_argument("--deltas", default=",".join(map(str, datasets.DELTA_VALUES)))
    e.add_argument("--max-level", type=int)
    e.add_argument("--format", choices=["json", "csv"], default="json")
    e.add_argument("--no-timing", action="store_true")
    p.set_defaults(func=cmd_experiment)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help or a usage error
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except InvalidInput as exc:
        json.dump({"error": str(exc), "violations": exc.details}, sys.stderr, indent=2)
        sys.stderr.write("\n")
        return EXIT_INVALID
    except UsageError as exc:
        sys.stderr.write(f"nestedbounds: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
