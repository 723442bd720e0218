"""Command-line entry point: ``patternlab <subcommand> [flags]``.

Every subcommand handler returns a JSON-serialisable payload (and, where a
tabular form makes sense, a CSV header plus rows). Exact rationals are
emitted as ``"p/q"`` strings and floats with 17 significant digits.

Exit codes: 0 success, 1 a batch check failed, 2 malformed input,
3 domain error, 4 precision or size cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import mpmath

from . import __version__
from .combi import LIMITS, ArcPattern, Multiset, PermPattern, SetPartition
from .errors import DomainError, ParseError, PatternLabError, SizeLimitError
from .moments import (
    ArcIndicator,
    EnumerationOracle,
    MPermClosedOracle,
    MPermIndicator,
    joint_cumulant,
)
from .patterns import count_arc_pattern, count_perm_pattern
from .samplers import murn_law, replica_rng, sample_multiset_perm, sample_stam
from .wdg import estimate_Cr, scan_Cr_multisets


# ---------------------------------------------------------------------------
# Output formatting


def fmt_rational(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def fmt_float(x) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    return format(x, ".17g")


def to_json(obj) -> str:
    """Compact JSON with 17-digit floats and rationals as ``"p/q"`` strings."""
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, Fraction):
        return json.dumps(fmt_rational(obj))
    if isinstance(obj, (float, mpmath.mpf)):
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(to_json(v) for v in obj) + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return to_json(obj.item())
    return json.dumps(str(obj))


def _cell(v) -> str:
    if isinstance(v, Fraction):
        return fmt_rational(v)
    if isinstance(v, (float, mpmath.mpf)):
        return fmt_float(v)
    return str(v)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


class Result:
    """Handler output: a payload plus an optional table (header, rows) or JSONL lines."""

    def __init__(self, payload, table=None, lines=None):
        self.payload = payload
        self.table = table
        self.lines = lines

    def render(self, emit: str) -> str:
        if self.lines is not None:
            return "".join(to_json(x) + "\n" for x in self.lines)
        if emit == "csv":
            if self.table is None:
                raise DomainError("this subcommand has no CSV form")
            return to_csv(*self.table)
        return to_json(self.payload) + "\n"


# ---------------------------------------------------------------------------
# Argument helpers


def _parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise ParseError(f"bad size list {text!r}") from exc
    if not sizes:
        raise ParseError("empty size list")
    return sizes


def _parse_indicators(text: str, family: str):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        sep = ":" if family == "mperm" else "-"
        a, _, b = tok.partition(sep)
        try:
            i, j = int(a), int(b)
        except ValueError as exc:
            raise ParseError(f"bad indicator {tok!r} (expected i{sep}j)") from exc
        out.append(MPermIndicator(i, j) if family == "mperm" else ArcIndicator(i, j))
    return out


def _order_cap(order: str, r: int) -> int:
    if order == "auto":
        return LIMITS.cumulant_order
    try:
        cap = int(order)
    except ValueError as exc:
        raise ParseError(f"--order must be 'auto' or an integer, got {order!r}") from exc
    if cap < r:
        raise DomainError(f"bag has {r} indicators but --order is {cap}")
    return cap


def _require(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise ParseError(f"--{name.replace('_', '-')} is required here")


# ---------------------------------------------------------------------------
# Handlers


def cmd_sample(args) -> Result:
    if args.reps < 1:
        raise DomainError("--reps must be >= 1")
    lines = []
    if args.family == "setpart":
        _require(args, "n")
        law = murn_law(args.n, args.tail_tol)
        for k in range(args.reps):
            d = sample_stam(args.n, law, replica_rng(args.seed, k))
            lines.append({"replica": k, "M": d.urn_count, "partition": str(d.partition)})
    else:
        _require(args, "multiset")
        M = Multiset.parse(args.multiset)
        for k in range(args.reps):
            w = sample_multiset_perm(M, replica_rng(args.seed, k))
            lines.append({"replica": k, "word": ",".join(map(str, w)) if M.k > 9 else "".join(map(str, w))})
    return Result(lines, lines=lines)


def cmd_count(args) -> Result:
    word = args.word
    if "," in word:
        try:
            word = [int(x) for x in word.split(",")]
        except ValueError as exc:
            raise ParseError(f"bad word {args.word!r}") from exc
    elif not word.isdigit():
        raise ParseError(f"bad word {args.word!r}")
    return Result({"count": count_perm_pattern(word, PermPattern.parse(args.pattern))})


def cmd_count_arcs(args) -> Result:
    pi = SetPartition.parse(args.partition)
    pattern = ArcPattern.parse(args.arcs)
    return Result({"count": count_arc_pattern(pi, pattern)})


def cmd_cumulant(args) -> Result:
    bag = _parse_indicators(args.indicators, args.family)
    cap = _order_cap(args.order, len(bag))
    if args.family == "mperm":
        _require(args, "multiset")
        M = Multiset.parse(args.multiset)
        for x in bag:
            if not 1 <= x.pos <= M.n:
                raise DomainError(f"position {x.pos} outside [1,{M.n}]")
        oracle, size = MPermClosedOracle(M), str(M)
    else:
        _require(args, "n")
        if args.n > LIMITS.partition_cap:
            raise SizeLimitError(f"set-partition enumeration limited to n <= {LIMITS.partition_cap}")
        for x in bag:
            if not 1 <= x.start < x.end <= args.n:
                raise DomainError(f"arc {x} not inside [1,{args.n}]")
        oracle, size = EnumerationOracle(args.n), args.n
    kappa = joint_cumulant(oracle, bag, max_order=cap)
    return Result({
        "family": args.family,
        "size": size,
        "bag": [str(x) for x in bag],
        "order": len(bag),
        "cumulant": kappa,
    })


def cmd_verify(args) -> Result:
    r = args.order
    if args.family == "setpart":
        _require(args, "n")
        rep = estimate_Cr("setpart", args.n, r, strict=False)
    elif args.multiset is not None:
        rep = estimate_Cr("mperm", Multiset.parse(args.multiset), r, strict=False)
    else:
        _require(args, "n")
        rep = scan_Cr_multisets(args.n, r)
    payload = {
        "family": rep["family"],
        "size": rep["size"],
        "r": rep["r"],
        "max_ratio": Fraction(rep["max_ratio"]),
        "argmax_bag": rep["argmax_bag"],
        "violations": rep["violations"],
        "bags": rep["bags"],
    }
    if args.report:
        Path(args.report).write_text(to_json(payload) + "\n")
    return Result(payload)


def cmd_cond_exp(args) -> Result:
    from .conditional import cond_exp_table

    pattern = ArcPattern.parse(args.arcs)
    law = murn_law(args.n, args.tail_tol)
    rows = cond_exp_table(args.n, pattern, law=law)
    with mpmath.workdps(law.dps):
        total = mpmath.fsum(w for _, w, _ in rows)
        mean = mpmath.fsum(w * mpmath.mpf(e.numerator) / e.denominator for _, w, e in rows)
        var = mpmath.fsum(w * (mpmath.mpf(e.numerator) / e.denominator - mean / total) ** 2 for _, w, e in rows)
    payload = {
        "n": args.n,
        "arcs": str(pattern),
        "m_min": law.m_min,
        "m_max": law.m_max,
        "tail_mass": law.tail_mass,
        "expectation": mean,
        "var_cond_expectation": var / total,
        "rows": [{"m": m, "p": w, "cond_exp": e} for m, w, e in rows],
    }
    table = (["m", "P(M=m)", "E[Occ|m]"], [(m, w, e) for m, w, e in rows])
    return Result(payload, table=table)


def cmd_mc(args) -> Result:
    from .mc import mc_table

    if args.family == "mperm":
        _require(args, "pattern")
        pattern = args.pattern
        PermPattern.parse(pattern)
    else:
        _require(args, "arcs")
        pattern = args.arcs
        ArcPattern.parse(pattern)
    sizes = _parse_sizes(args.sizes)
    rows = mc_table(args.family, pattern, sizes, args.reps, args.seed, args.threads,
                    letters=args.letters, tail_tol=args.tail_tol)
    cols = ["size", "mean", "variance", "ks", "k3", "k4"]
    payload = {
        "family": args.family,
        "pattern": pattern,
        "reps": args.reps,
        "seed": args.seed,
        "rows": rows,
    }
    return Result(payload, table=(cols, [[row[c] for c in cols] for row in rows]))


# ---------------------------------------------------------------------------
# Batch runner

_OPS = {
    "eq": lambda a, b: a == b,
    "ne": lambda a, b: a != b,
    "lt": lambda a, b: a < b,
    "le": lambda a, b: a <= b,
    "gt": lambda a, b: a > b,
    "ge": lambda a, b: a >= b,
    "abs_le": lambda a, b: abs(a) <= b,
}


def _as_number(v):
    if isinstance(v, str) and "/" in v:
        try:
            return Fraction(v)
        except ValueError:
            return v
    return v


def _lookup(payload, path: str):
    cur = payload
    for part in path.split(".") if path else []:
        if isinstance(cur, list):
            cur = cur[int(part)]
        else:
            cur = cur[part]
    return cur


def evaluate_check(payload, check: dict) -> dict:
    """One check: ``{"path": "rows.0.ks", "op": "lt", "value": 0.05}``.

    ``op`` may also be ``"len_eq"`` (length of a list) or ``"all_lt"`` /
    ``"decreasing_one_inversion"`` over ``rows.*.<field>`` style paths given as
    ``{"path": "rows", "field": "ks", ...}``.
    """
    op = check.get("op", "eq")
    path = check.get("path", "")
    expected = check.get("value")
    try:
        got = json.loads(to_json(_lookup(payload, path)))
        if "field" in check:
            got = [_as_number(row[check["field"]]) for row in got]
        if op == "len_eq":
            ok = len(got) == expected
        elif op == "decreasing_one_inversion":
            from .mc import decreases_with_one_inversion

            ok = decreases_with_one_inversion(got)
        elif op.startswith("all_"):
            cmp = _OPS[op[4:]]
            ok = all(cmp(x, _as_number(expected)) for x in got)
        elif op in _OPS:
            ok = bool(_OPS[op](_as_number(got), _as_number(expected)))
        else:
            raise ParseError(f"unknown check op {op!r}")
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        return {"check": check, "observed": None, "status": "FAIL", "error": str(exc)}
    return {"check": check, "observed": got, "status": "PASS" if ok else "FAIL"}


def _job_argv(job: dict, seed) -> list[str]:
    argv = str(job["command"]).split()
    args = dict(job.get("args", {}))
    if seed is not None and argv[0] in ("sample", "mc"):
        args.setdefault("seed", seed)
    for key, val in args.items():
        flag = "--" + key.replace("_", "-")
        if val is True:
            argv.append(flag)
        elif val is False or val is None:
            continue
        else:
            argv += [flag, str(val)]
    return argv


def load_config(path: str) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict) or not isinstance(cfg.get("jobs", []), list):
        raise ParseError("config must be an object with a 'jobs' list")
    names = [j.get("name") for j in cfg.get("jobs", [])]
    if any(not isinstance(n, str) for n in names) or len(set(names)) != len(names):
        raise ParseError("job names must be unique strings")
    for j in cfg.get("jobs", []):
        if "command" not in j:
            raise ParseError(f"job {j['name']!r} has no command")
    return cfg


def run_batch(cfg: dict, out_dir: str | None = None, keep_going: bool = False) -> tuple[dict, int]:
    out = Path(out_dir or cfg.get("out_dir", "batch_out"))
    out.mkdir(parents=True, exist_ok=True)
    seed = cfg.get("seed")
    parser = build_parser()
    jobs, failed = [], False
    for job in cfg.get("jobs", []):
        entry = {"name": job["name"], "command": job["command"]}
        try:
            args = parser.parse_args(_job_argv(job, seed))
        except SystemExit as exc:
            raise ParseError(f"job {job['name']!r}: bad arguments") from exc
        try:
            result = args.handler(args)
        except PatternLabError as exc:
            entry.update(status="ERROR", error=str(exc), exit_code=exc.exit_code)
            jobs.append(entry)
            failed = True
            if not keep_going:
                break
            continue
        artifact = out / f"{job['name']}.json"
        artifact.write_text(result.render("json"))
        checks = [evaluate_check(result.payload, c) for c in job.get("checks", [])]
        status = "PASS" if all(c["status"] == "PASS" for c in checks) else "FAIL"
        entry.update(status=status, artifact=str(artifact), checks=checks)
        jobs.append(entry)
        if status == "FAIL":
            failed = True
            if not keep_going:
                break
    summary = {
        "jobs": jobs,
        "passed": sum(1 for j in jobs if j["status"] == "PASS"),
        "failed": sum(1 for j in jobs if j["status"] != "PASS"),
    }
    (out / "summary.json").write_text(to_json(summary) + "\n")
    return summary, 1 if failed else 0


def cmd_batch(args) -> Result:
    cfg = load_config(args.config)
    summary, code = run_batch(cfg, args.out_dir, args.keep_going)
    res = Result(summary)
    res.exit_code = code
    return res


# ---------------------------------------------------------------------------
# Parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(2) from ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--emit", choices=["json", "csv"], default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--tail-tol", type=float, default=1e-12)

    p = _Parser(prog="patternlab", description="Pattern statistics in multiset permutations and set partitions.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sample", parents=[common], help="dump uniform samples as JSON lines")
    s.add_argument("--family", choices=["setpart", "mperm"], default="setpart")
    s.add_argument("--n", type=int)
    s.add_argument("--multiset")
    s.add_argument("--reps", type=int, default=1)
    s.set_defaults(handler=cmd_sample)

    s = sub.add_parser("count", parents=[common], help="occurrences of a permutation pattern in a word")
    s.add_argument("--word", required=True)
    s.add_argument("--pattern", required=True)
    s.set_defaults(handler=cmd_count)

    s = sub.add_parser("count-arcs", parents=[common], help="occurrences of an arc pattern in a set partition")
    s.add_argument("--partition", required=True)
    s.add_argument("--arcs", required=True)
    s.set_defaults(handler=cmd_count_arcs)

    s = sub.add_parser("cumulant", parents=[common], help="exact joint cumulant of an indicator bag")
    s.add_argument("--family", choices=["mperm", "setpart"], required=True)
    s.add_argument("--multiset")
    s.add_argument("--n", type=int)
    s.add_argument("--indicators", required=True)
    s.add_argument("--order", default="auto")
    s.set_defaults(handler=cmd_cumulant)

    s = sub.add_parser("verify", parents=[common], help="empirical check of the cumulant bound")
    s.add_argument("target", choices=["wdg"])
    s.add_argument("--family", choices=["mperm", "setpart"], required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--multiset")
    s.add_argument("--order", type=int, default=2)
    s.add_argument("--report")
    s.set_defaults(handler=cmd_verify)

    s = sub.add_parser("cond-exp", parents=[common], help="E[Occ | M=m] over the law of M")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--arcs", required=True)
    s.set_defaults(handler=cmd_cond_exp)

    s = sub.add_parser("mc", parents=[common], help="Monte Carlo normality and scaling diagnostics")
    s.add_argument("--family", choices=["mperm", "setpart"], required=True)
    s.add_argument("--pattern")
    s.add_argument("--arcs")
    s.add_argument("--sizes", required=True)
    s.add_argument("--reps", type=int, default=10000)
    s.add_argument("--letters", type=int, default=4, help="distinct letters of the balanced multiset (mperm)")
    s.set_defaults(handler=cmd_mc)

    s = sub.add_parser("batch", parents=[common], help="run a JSON experiment config")
    s.add_argument("config")
    s.add_argument("--out-dir")
    s.add_argument("--keep-going", action="store_true")
    s.set_defaults(handler=cmd_batch)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.handler(args)
        text = result.render(args.emit)
    except PatternLabError as exc:
        print(f"patternlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return getattr(result, "exit_code", 0)


if __name__ == "__main__":
    sys.exit(main())
