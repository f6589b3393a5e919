"""Command-line front end: ``treecube analyze|verify|sweep|generate|brute``.

Exit codes: 0 success, 2 input error, 3 oracle budget exceeded.  JSON output
carries ``"schema": 1`` and contains nothing run-dependent; wall time goes to
stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass
from typing import Optional

from . import __version__, oracle
from .bounds import (
    AUGMENT,
    DEFAULT_EXACT_CAP,
    EXTRA_A_I,
    EXTRA_A_II,
    EXTRA_B,
    bounds_report,
)
from .families import FamilySpecError, parse_family_spec
from .resolvability import check_conditions, is_resolving_set
from .tree_model import Tree, TreeError, classify, parse_tree_labeled, to_dot

SCHEMA = 1
EXIT_OK, EXIT_INPUT, EXIT_BUDGET = 0, 2, 3
EXTRA_RULES = (EXTRA_A_I, EXTRA_A_II, EXTRA_B, AUGMENT)

log = logging.getLogger("treecube.cli")


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    path: Optional[str] = None
    family: Optional[str] = None
    cap: int = DEFAULT_EXACT_CAP
    budget: int = oracle.DEFAULT_BUDGET
    seed: int = 0
    fmt: str = "json"
    jobs: int = 1
    exact: bool = False

    def __post_init__(self):
        if self.cap < 2:
            raise InputError("--cap must be at least 2")
        if self.budget < 1:
            raise InputError("--budget must be positive")


def _load(cfg: RunConfig) -> tuple[Tree, dict[int, int]]:
    """The input tree and a map from input labels to vertices."""
    if (cfg.path is None) == (cfg.family is None):
        raise InputError("give exactly one input: an edge-list file or --family")
    if cfg.family is not None:
        t = parse_family_spec(cfg.family).build()
        return t, {v: v for v in range(t.n)}
    if cfg.path == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(cfg.path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise InputError(f"cannot read {cfg.path}: {e.strerror}") from None
    return parse_tree_labeled(text)


def _tree_dict(t: Tree, labels: dict[int, int]) -> dict:
    out = {"n": t.n, "edges": [list(e) for e in t.edges]}
    inv = {v: raw for raw, v in labels.items()}
    if any(inv[v] != v for v in range(t.n)):
        out["input_labels"] = [inv[v] for v in range(t.n)]
    return out


def _dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


# --- commands --------------------------------------------------------------


def cmd_analyze(cfg: RunConfig) -> tuple[str, int]:
    t, labels = _load(cfg)
    rep = bounds_report(t, with_exact=cfg.exact, cap=cfg.cap, budget=cfg.budget)
    if cfg.fmt == "dot":
        basis, extras = [], []
        if rep.trace is not None:
            for v, (rule, _) in rep.trace.entries.items():
                (extras if rule in EXTRA_RULES else basis).append(v)
        elif rep.exact_witness:
            basis = list(rep.exact_witness)
        return to_dot(t, basis, extras), EXIT_OK
    body = rep.to_dict()
    body["exact_skipped"] = bool(cfg.exact and t.n > cfg.cap)
    doc = {
        "schema": SCHEMA,
        "command": "analyze",
        "tree": _tree_dict(t, labels),
        "classification": classify(t).summary(),
        "report": body,
    }
    if cfg.fmt == "json":
        return _dumps(doc), EXIT_OK
    lines = [f"n = {t.n} ({'path' if rep.path else 'tree'})"]
    if not rep.path:
        lines += [
            f"beta(T)            = {rep.beta_tree}",
            f"lower bound (T^3)  = {rep.lower}",
            f"upper bound (T^3)  = {rep.upper}",
            f"constructed set    = {list(rep.constructed_set)} (size {rep.constructed_size}"
            + (", augmented)" if rep.augmented else ")"),
            rep.trace.to_table(),
        ]
    if rep.exact is not None:
        lines.append(f"exact beta(T^3)    = {rep.exact}  witness {list(rep.exact_witness)}")
    elif cfg.exact:
        lines.append(f"exact beta(T^3)    skipped (n > cap {cfg.cap})")
    return "\n".join(lines) + "\n", EXIT_OK


def cmd_verify(cfg: RunConfig, raw_set: str) -> tuple[str, int]:
    t, labels = _load(cfg)
    try:
        raw = [int(x) for x in raw_set.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"--set must be comma-separated integers, got {raw_set!r}") from None
    missing = [x for x in raw if x not in labels]
    if missing:
        raise InputError(f"unknown vertices {missing}")
    S = [labels[x] for x in raw]
    report = check_conditions(t, S)
    in_tree = is_resolving_set(t, S, 1)
    in_cube = is_resolving_set(t, S, 3)
    if cfg.fmt == "dot":
        return to_dot(t, basis=S), EXIT_OK
    if cfg.fmt == "text":
        text = report.to_text()
        text += f"\nresolves T:   {in_tree}\nresolves T^3: {in_cube}\n"
        return text, EXIT_OK
    doc = {
        "schema": SCHEMA,
        "command": "verify",
        "tree": _tree_dict(t, labels),
        **report.to_dict(),
        "resolves_tree": in_tree,
        "resolves_cube": in_cube,
    }
    return _dumps(doc), EXIT_OK


def cmd_sweep(cfg: RunConfig, args) -> tuple[str, int]:
    from . import sweep

    if args.exhaustive is not None:
        if args.random is not None:
            raise InputError("use either --exhaustive or --random")
        if not 2 <= args.exhaustive <= oracle.MAX_ALL:
            raise InputError(f"--exhaustive supports 2 <= n <= {oracle.MAX_ALL}")
        rep = sweep.sweep_exhaustive(args.exhaustive, cap=cfg.cap, budget=cfg.budget, jobs=cfg.jobs)
    elif args.random is not None:
        if args.n is None or args.n < 2 or args.random < 0:
            raise InputError("--random COUNT needs --n N with N >= 2")
        rep = sweep.sweep_random(
            args.n, args.random, cfg.seed, cap=cfg.cap, budget=cfg.budget, jobs=cfg.jobs
        )
    else:
        raise InputError("sweep needs --exhaustive N or --random COUNT --n N")
    code = EXIT_BUDGET if rep.budget_exceeded else EXIT_OK
    if cfg.fmt == "json":
        return _dumps({"schema": SCHEMA, "command": "sweep", **rep.to_dict()}), code
    lines = [f"trees checked: {rep.trees} (paths {rep.paths})"]
    for name, c in rep.suites.items():
        lines.append(f"  {name:<20} checked {c.checked:>8}  violations {c.violations}")
    lines.append(f"augmentation events: {rep.augmentations}")
    if rep.exact_skipped:
        lines.append(f"exact oracle skipped on {rep.exact_skipped} trees")
    if rep.budget_exceeded:
        lines.append("oracle budget exceeded: report is partial")
    return "\n".join(lines) + "\n", code


def cmd_generate(cfg: RunConfig) -> tuple[str, int]:
    if cfg.family is None:
        raise InputError("generate needs --family")
    t = parse_family_spec(cfg.family).build()
    if cfg.fmt == "json":
        return _dumps({"schema": SCHEMA, "command": "generate", "family": cfg.family,
                       "tree": _tree_dict(t, {v: v for v in range(t.n)})}), EXIT_OK
    if cfg.fmt == "dot":
        return to_dot(t), EXIT_OK
    return "".join(f"{u} {v}\n" for u, v in t.edges), EXIT_OK


def cmd_brute(cfg: RunConfig, power: int) -> tuple[str, int]:
    t, labels = _load(cfg)
    if t.n > cfg.cap:
        raise InputError(f"n={t.n} exceeds --cap {cfg.cap}")
    k, witness = oracle.brute_metric_dimension(oracle.GraphDistances.of_tree(t, power), cfg.budget)
    if cfg.fmt == "dot":
        return to_dot(t, basis=witness), EXIT_OK
    if cfg.fmt == "text":
        return f"beta(T^{power}) = {k}  witness {list(witness)}\n", EXIT_OK
    doc = {"schema": SCHEMA, "command": "brute", "tree": _tree_dict(t, labels),
           "power": power, "dimension": k, "witness": list(witness)}
    return _dumps(doc), EXIT_OK


# --- argument parsing ------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="treecube",
        description="Metric dimension bounds, resolving sets and exact checks for cubes of trees.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log warnings and progress")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmts=("json", "text", "dot"), tree_input=True):
        if tree_input:
            sp.add_argument("input", nargs="?", help="edge-list file ('-' for stdin)")
        sp.add_argument("--family", help="family spec, e.g. spider:1,1,3 or dimn:8")
        sp.add_argument("--format", choices=fmts, default=fmts[0], dest="fmt")
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--cap", type=int, default=DEFAULT_EXACT_CAP,
                        help="largest n for the exact oracle (default %(default)s)")
        sp.add_argument("--budget", type=int, default=oracle.DEFAULT_BUDGET,
                        help="max subsets the oracle may test before giving up")

    a = sub.add_parser("analyze", help="bounds, construction and optional exact value")
    common(a)
    a.add_argument("--exact", action="store_true", help="run the oracle when n <= cap")

    v = sub.add_parser("verify", help="check a candidate set against the five conditions")
    common(v)
    v.add_argument("--set", required=True, dest="vset", help="comma-separated vertices")

    s = sub.add_parser("sweep", help="property suites over many trees")
    s.add_argument("--exhaustive", type=int, metavar="N", help="all labeled trees on N vertices")
    s.add_argument("--random", type=int, metavar="COUNT", help="COUNT seeded random trees")
    s.add_argument("--n", type=int, help="tree size for --random")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    s.add_argument("--format", choices=("json", "text"), default="json", dest="fmt")
    s.add_argument("--out")
    s.add_argument("--cap", type=int, default=DEFAULT_EXACT_CAP)
    s.add_argument("--budget", type=int, default=oracle.DEFAULT_BUDGET)

    g = sub.add_parser("generate", help="emit a family tree")
    g.add_argument("--family", required=True)
    g.add_argument("--format", choices=("text", "json", "dot"), default="text", dest="fmt")
    g.add_argument("--out")

    b = sub.add_parser("brute", help="exact metric dimension only")
    common(b)
    b.add_argument("--power", type=int, choices=(1, 3), default=3)
    return p


def _config(args) -> RunConfig:
    return RunConfig(
        command=args.command,
        path=getattr(args, "input", None),
        family=getattr(args, "family", None),
        cap=getattr(args, "cap", DEFAULT_EXACT_CAP),
        budget=getattr(args, "budget", oracle.DEFAULT_BUDGET),
        seed=getattr(args, "seed", 0),
        fmt=args.fmt,
        jobs=getattr(args, "jobs", 1),
        exact=getattr(args, "exact", False),
    )


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.ERROR,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    start = time.perf_counter()
    try:
        cfg = _config(args)
        if args.command == "analyze":
            text, code = cmd_analyze(cfg)
        elif args.command == "verify":
            text, code = cmd_verify(cfg, args.vset)
        elif args.command == "sweep":
            if args.jobs < 1:
                raise InputError("--jobs must be at least 1")
            text, code = cmd_sweep(cfg, args)
        elif args.command == "generate":
            text, code = cmd_generate(cfg)
        else:
            text, code = cmd_brute(cfg, args.power)
    except (InputError, TreeError, FamilySpecError, ValueError) as e:
        print(f"treecube: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except oracle.BudgetExceeded as e:
        print(f"treecube: {e}", file=sys.stderr)
        return EXIT_BUDGET

    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as e:
            print(f"treecube: error: cannot write {args.out}: {e.strerror}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    print(f"wall time: {time.perf_counter() - start:.3f}s", file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
