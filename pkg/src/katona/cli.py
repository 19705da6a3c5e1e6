"""Command-line front end: ``katona verify | search | lym | average | list-theorems | construct``.

Exit codes: 0 success, 1 usage or domain error, 2 a registered statement was
falsified (bound exceeded, or a claimed construction or uniqueness failed),
3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import Sequence

from . import averaging
from .constructions import CONSTRUCTIONS, build
from .core import ArcFamily, DomainError, SetFamily, load_family
from .search import BudgetExceeded, SearchProblem, maximize, parse_range
from .theorems import THEOREMS, BoundViolation, verify_bound

EXIT_OK, EXIT_USAGE, EXIT_FALSIFIED, EXIT_BUDGET = 0, 1, 2, 3

GRID_FLAGS = ("n", "k", "l", "s", "r", "q", "c")

VERIFY_CSV_COLUMNS = [
    "theorem", "n", "k", "l", "s", "r", "c", "ls",
    "bound", "achieved", "tight", "extremal_count", "construction_ok", "claims_ok", "ok", "nodes",
]

VERIFY_EPILOG = (
    "CSV columns: " + ",".join(VERIFY_CSV_COLUMNS) + ". "
    "Ranges accept 'a..b', comma lists or single values; --c also takes fractions like 5/2. "
    "For cross-union, --s gives the number of families and --l the allowed lengths; "
    "every sorted length tuple is checked."
)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    grid: dict[str, tuple] = field(default_factory=dict)
    fmt: str = "human"
    budget_nodes: int | None = None
    budget_seconds: float | None = None
    seed: int = 0
    jobs: int = 1
    timing: bool = False

    def validate(self) -> None:
        for name, values in self.grid.items():
            if not values:
                raise UsageError(f"--{name} range is empty")
        if self.budget_nodes is not None and self.budget_nodes <= 0:
            raise UsageError("--budget-nodes must be positive")
        if self.budget_seconds is not None and self.budget_seconds <= 0:
            raise UsageError("--budget-seconds must be positive")
        if self.jobs < 1:
            raise UsageError("--jobs must be at least 1")


# -- argument helpers --------------------------------------------------------------------


def parse_rationals(text: str) -> tuple[Fraction, ...]:
    """'1,2,5/2' or '1..3' into a tuple of Fractions."""
    out: list[Fraction] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            out.extend(Fraction(x) for x in parse_range(part))
        else:
            try:
                out.append(Fraction(part))
            except (ValueError, ZeroDivisionError):
                raise UsageError(f"cannot read {part!r} as a rational") from None
    return tuple(out)


def _int_range(text: str | None, flag: str) -> tuple[int, ...] | None:
    if text is None:
        return None
    try:
        values = parse_range(text)
    except (ValueError, DomainError) as exc:
        raise UsageError(f"--{flag}: {exc}") from None
    if not values:
        raise UsageError(f"--{flag} range is empty")
    return values


def _budget_seconds(args) -> float | None:
    if args.budget_seconds is not None:
        return args.budget_seconds
    env = os.environ.get("KATONA_BUDGET_SECONDS")
    if env:
        try:
            return float(env)
        except ValueError:
            raise UsageError(f"KATONA_BUDGET_SECONDS={env!r} is not a number") from None
    return None


def _read_json(source: str):
    """A path, '-' for stdin, or an inline JSON document."""
    if source == "-":
        return json.load(sys.stdin)
    stripped = source.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        return json.loads(source)
    with open(source, encoding="utf-8") as fh:
        return json.load(fh)


def _plain(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return x


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


# -- verify --------------------------------------------------------------------------------


def grid_points(theorem_id: str, grid: dict[str, tuple]) -> list[dict]:
    """All parameter dictionaries for a theorem from the flag ranges."""
    th = THEOREMS[theorem_id]
    if "ls" in th.params:
        if any(f not in grid for f in ("n", "s", "l")):
            raise UsageError(f"{theorem_id} needs --n, --s (number of families) and --l (lengths)")
        return [
            {"n": n, "ls": ls}
            for n in grid["n"]
            for s in grid["s"]
            for ls in combinations_with_replacement(sorted(grid["l"]), s)
        ]
    missing = [p for p in th.params if p not in grid]
    if missing:
        raise UsageError(f"{theorem_id} needs " + ", ".join(f"--{p}" for p in missing))
    names = list(th.params)
    return [dict(zip(names, values)) for values in product(*(grid[p] for p in names))]


def _unused_flags(theorem_id: str, grid: dict) -> list[str]:
    used = set(THEOREMS[theorem_id].params)
    if "ls" in used:
        used |= {"l", "s"}
    return [f for f in grid if f not in used]


def _verify_point(theorem_id: str, params: dict, budget_nodes, budget_seconds, with_witnesses: bool):
    try:
        res = verify_bound(theorem_id, budget_nodes=budget_nodes, budget_seconds=budget_seconds, **params)
    except BoundViolation as exc:
        return "violation", exc.to_json()
    except BudgetExceeded as exc:
        out = exc.to_json()
        out.update({"theorem": theorem_id, "params": _json_params(params)})
        return "budget", out
    except DomainError as exc:
        return "error", {"theorem": theorem_id, "params": _json_params(params), "error": str(exc)}
    return "ok", res.to_json(with_witnesses)


def _json_params(params: dict) -> dict:
    return {k: (list(v) if isinstance(v, tuple) else _plain(v)) for k, v in params.items()}


def _param_sort_key(params: dict) -> tuple:
    out = []
    for name in ("n", "k", "l", "s", "r", "q", "c", "ls"):
        v = params.get(name)
        if v is None:
            out.append((0,))
        elif isinstance(v, list):
            out.append((1, len(v), tuple(v)))
        else:
            out.append((1, Fraction(v)))
    return tuple(out)


def cmd_verify(args, cfg: RunConfig, out, err) -> int:
    theorem_id = args.theorem
    if theorem_id not in THEOREMS:
        raise UsageError(f"unknown theorem {theorem_id!r}; try list-theorems")
    th = THEOREMS[theorem_id]
    for flag in _unused_flags(theorem_id, cfg.grid):
        print(f"warning: --{flag} is not a parameter of {theorem_id}; ignored", file=err)
    points = grid_points(theorem_id, cfg.grid)
    runnable = []
    for params in points:
        try:
            th.check_hypothesis(**params)
        except DomainError as exc:
            print(f"warning: skipping: {exc}", file=err)
            continue
        runnable.append(params)
    if not runnable:
        print("warning: no grid point satisfies the hypotheses", file=err)
    with_witnesses = cfg.fmt == "json"
    jobs = [(theorem_id, p, cfg.budget_nodes, cfg.budget_seconds, with_witnesses) for p in runnable]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_verify_point, *zip(*jobs)))
    else:
        results = [_verify_point(*j) for j in jobs]
    results.sort(key=lambda r: _param_sort_key(r[1].get("params", {})))
    if not cfg.timing:
        for _, body in results:
            body.pop("elapsed", None)

    code = EXIT_OK
    for kind, body in results:
        if kind == "violation":
            code = EXIT_FALSIFIED
        elif kind == "budget" and code == EXIT_OK:
            code = EXIT_BUDGET
        elif kind == "error" and code == EXIT_OK:
            code = EXIT_USAGE
        elif kind == "ok" and not body["ok"]:
            code = EXIT_FALSIFIED
    _emit_verify(cfg.fmt, theorem_id, results, out)
    for kind, body in results:
        if kind == "violation":
            print(f"BOUND VIOLATED: {body['theorem']} {body['params']} achieved {body['achieved']} > {body['bound']}", file=err)
        elif kind == "budget":
            print(f"budget exhausted at {body['params']}: result is not exact", file=err)
        elif kind == "error":
            print(f"error at {body['params']}: {body['error']}", file=err)
    return code


def _fmt_params(params: dict) -> str:
    return " ".join(f"{k}={_plain(v) if not isinstance(v, tuple) else list(v)}" for k, v in params.items())


def _emit_verify(fmt: str, theorem_id: str, results, out) -> None:
    if fmt == "json":
        doc = {"theorem": theorem_id, "results": [dict(body, status=kind) for kind, body in results]}
        out.write(_dump(doc) + "\n")
        return
    rows = []
    for kind, body in results:
        p = body.get("params", {})
        row = {c: "" for c in VERIFY_CSV_COLUMNS}
        row["theorem"] = theorem_id
        for name in ("n", "k", "l", "s", "r", "c"):
            if name in p:
                row[name] = p[name]
        if "ls" in p:
            row["ls"] = " ".join(str(x) for x in p["ls"])
        if kind == "ok":
            row.update(
                bound=body["bound"], achieved=body["achieved"], tight=body["tight"],
                extremal_count="" if body["extremal_count"] is None else body["extremal_count"],
                construction_ok="" if body["construction_ok"] is None else body["construction_ok"],
                claims_ok=all(body["claims"].values()), ok=body["ok"], nodes=body["nodes"],
            )
        elif kind == "violation":
            row.update(bound=body["bound"], achieved=body["achieved"], tight=False, ok=False)
        elif kind == "budget":
            row.update(achieved=_plain(body.get("best")), ok="budget")
        else:
            row.update(ok="error")
        rows.append(row)
    if fmt == "csv":
        w = csv.DictWriter(out, fieldnames=VERIFY_CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return
    cols = ["theorem"] + [c for c in VERIFY_CSV_COLUMNS[1:] if any(r[c] != "" for r in rows)]
    _table(cols, rows, out)


def _table(cols, rows, out) -> None:
    cells = [[str(r[c]) for c in cols] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
    out.write("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip() + "\n")
    for row in cells:
        out.write("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() + "\n")


# -- search ---------------------------------------------------------------------------------


def _problem_from_args(args) -> SearchProblem:
    if args.problem is not None:
        return SearchProblem.from_json(_read_json(args.problem))
    if args.n is None:
        raise UsageError("search needs a problem JSON (path, '-' or inline) or --n")
    n = _int_range(args.n, "n")
    if len(n) != 1:
        raise UsageError("search takes a single --n")
    data: dict = {"n": n[0], "predicate": list(args.predicate or [])}
    if args.k is not None:
        data["k"] = args.k
    if args.nonempty:
        data["nonempty"] = True
    return SearchProblem.from_json(data)


def cmd_search(args, cfg: RunConfig, out, err) -> int:
    problem = _problem_from_args(args)
    try:
        rep = maximize(problem, mode=args.mode, budget_nodes=cfg.budget_nodes, budget_seconds=cfg.budget_seconds)
    except BudgetExceeded as exc:
        body = exc.to_json()
        body["problem"] = problem.to_json()
        out.write(_dump(body) + "\n")
        print(f"budget exhausted: {exc}; the reported bound is not exact", file=err)
        return EXIT_BUDGET
    body = rep.to_json()
    body["problem"] = problem.to_json()
    if not cfg.timing:
        body.pop("elapsed", None)
    if cfg.fmt == "json":
        out.write(_dump(body) + "\n")
    elif cfg.fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["optimum", "extremal_count", "nodes_explored", "root_bound"])
        w.writerow([body["optimum"], "" if body["extremal_count"] is None else body["extremal_count"], body["nodes_explored"], body["root_bound"]])
    else:
        out.write(f"optimum {body['optimum']}  (root bound {body['root_bound']}, {body['nodes_explored']} nodes)\n")
        if body["extremal_count"] is not None:
            out.write(f"extremal configurations up to symmetry: {body['extremal_count']}\n")
        for w in rep.witnesses:
            out.write("  " + "  |  ".join(repr(f) for f in w) + "\n")
    return EXIT_OK


# -- lym / average --------------------------------------------------------------------------


def _family_from_args(args):
    if args.construction:
        return build(args.construction)
    if args.family is None:
        raise UsageError("give a family JSON (path, '-' or inline) or --construction")
    return load_family(_read_json(args.family))


def _fraction_out(x: Fraction) -> dict:
    return averaging.fraction_report(x)


def cmd_lym(args, cfg: RunConfig, out, err) -> int:
    fam = _family_from_args(args)
    value = averaging.lym_sum(fam, args.mode)
    body = {"n": fam.n, "size": len(fam), "mode": args.mode, "lym": _fraction_out(value)}
    _emit_simple(cfg.fmt, body, ["n", "size", "mode", "lym"], out)
    return EXIT_OK


def cmd_average(args, cfg: RunConfig, out, err) -> int:
    fam = _family_from_args(args)
    sets = SetFamily.from_arcs(fam) if isinstance(fam, ArcFamily) else fam
    n = sets.n
    k = args.k
    if k is None:
        sizes = set(sets.sizes())
        if len(sizes) != 1:
            raise UsageError("the family is not uniform; pass --k")
        k = sizes.pop()
    target = Fraction(len(sets.members), math.comb(n, k))
    body: dict = {"n": n, "k": k, "size": len(sets.members), "target": _fraction_out(target)}
    if args.sample:
        est = averaging.sample_average(sets, k, args.sample, cfg.seed)
        body.update(
            exact=False,
            average=_fraction_out(est.estimate),
            stderr=est.stderr,
            trials=est.trials,
            seed=est.seed,
            z_score=est.z_score,
        )
    else:
        if n > averaging.ENUMERATION_LIMIT:
            raise UsageError(
                f"n={n} is beyond the exact enumeration limit {averaging.ENUMERATION_LIMIT}; use --sample TRIALS"
            )
        avg = averaging.exact_average(sets, k)
        mt = averaging.max_trace(sets, k)
        body.update(
            exact=True,
            average=_fraction_out(avg),
            max_trace=mt,
            max_trace_over_n=_fraction_out(Fraction(mt, n)),
            lifted_bound=_fraction_out(averaging.lift_bound(mt, n, k)),
        )
    _emit_simple(cfg.fmt, body, list(body), out)
    return EXIT_OK


def _emit_simple(fmt: str, body: dict, cols: list[str], out) -> None:
    if fmt == "json":
        out.write(_dump(body) + "\n")
        return
    flat = {c: (body[c]["fraction"] if isinstance(body[c], dict) else body[c]) for c in cols}
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(cols)
        w.writerow([flat[c] for c in cols])
        return
    for c in cols:
        v = body[c]
        if isinstance(v, dict):
            out.write(f"{c}: {v['fraction']} ({v['decimal']:.6g})\n")
        else:
            out.write(f"{c}: {v}\n")


# -- list-theorems / construct ---------------------------------------------------------------


def cmd_list(args, cfg: RunConfig, out, err) -> int:
    rows = [
        {"id": th.id, "params": " ".join(th.params), "statement": th.summary}
        for th in sorted(THEOREMS.values(), key=lambda t: t.id)
    ]
    if cfg.fmt == "json":
        out.write(_dump(rows) + "\n")
    elif cfg.fmt == "csv":
        w = csv.DictWriter(out, fieldnames=["id", "params", "statement"], lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    else:
        _table(["id", "params", "statement"], rows, out)
    return EXIT_OK


def cmd_construct(args, cfg: RunConfig, out, err) -> int:
    fam = build(args.construction)
    out.write(json.dumps(fam.to_json(), sort_keys=True) + "\n")
    return EXIT_OK


# -- entry point --------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="katona", description="Extremal arc families on the cycle: exact checks.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "human"), default="human")
    common.add_argument("--budget-nodes", type=int, default=None, help="abort after this many search nodes")
    common.add_argument(
        "--budget-seconds", type=float, default=None,
        help="abort after this many seconds (default: $KATONA_BUDGET_SECONDS, else unlimited)",
    )
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1, help="worker processes for grid points")
    common.add_argument("--timing", action="store_true", help="include wall-clock times (output no longer reproducible)")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="check a registered bound over a parameter grid", epilog=VERIFY_EPILOG)
    v.add_argument("theorem")
    for flag in GRID_FLAGS:
        v.add_argument(f"--{flag}", default=None)

    s = sub.add_parser("search", parents=[common], help="solve a search problem given as JSON or flags")
    s.add_argument("problem", nargs="?", default=None, help="problem JSON: a path, '-' for stdin, or inline")
    s.add_argument("--n", default=None)
    s.add_argument("--k", default=None, help="arc lengths; omitted means every length 1..n-1")
    s.add_argument("--predicate", action="append", help="predicate id such as intersecting or matching-at-most:2; repeatable")
    s.add_argument("--nonempty", action="store_true", help="require every slot to be non-empty")
    s.add_argument("--mode", choices=("all", "value"), default="all")

    for name, helptext in (("lym", "LYM-type sum of a family"), ("average", "average trace over cyclic orders")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("family", nargs="?", default=None, help="family JSON: a path, '-' for stdin, or inline")
        p.add_argument("--construction", default=None, help="build the family from a construction id instead")
        if name == "lym":
            p.add_argument("--mode", choices=("standard", "shifted", "circle"), default="standard")
        else:
            p.add_argument("--k", type=int, default=None)
            p.add_argument("--sample", type=int, default=None, help="Monte Carlo with this many random orders")

    sub.add_parser("list-theorems", parents=[common], help="show the theorem registry")
    c = sub.add_parser(
        "construct", parents=[common],
        help="emit a construction as family JSON; ids: " + ", ".join(sorted(CONSTRUCTIONS)),
    )
    c.add_argument("construction", help="for example star_arcs:8,3,1 or erdos_levels:5,{2,3}")
    return parser


COMMANDS = {
    "verify": cmd_verify,
    "search": cmd_search,
    "lym": cmd_lym,
    "average": cmd_average,
    "list-theorems": cmd_list,
    "construct": cmd_construct,
}


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        grid: dict[str, tuple] = {}
        if args.command == "verify":
            for flag in GRID_FLAGS:
                raw = getattr(args, flag)
                if raw is None:
                    continue
                grid[flag] = parse_rationals(raw) if flag == "c" else _int_range(raw, flag)
        cfg = RunConfig(
            args.command, grid, args.format, args.budget_nodes, _budget_seconds(args), args.seed, args.jobs, args.timing
        )
        cfg.validate()
        return COMMANDS[args.command](args, cfg, out, err)
    except (UsageError, DomainError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE


def run(argv: Sequence[str]) -> tuple[int, str, str]:
    """Run the CLI in-process and capture (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


if __name__ == "__main__":
    sys.exit(main())
