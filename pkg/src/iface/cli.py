"""Command-line front end.

Instances come from a JSON file, the built-in ``chain`` example, or
``grid118:cfg1`` .. ``grid118:cfg4``. Sensor ids on the command line are
0-based pool positions; grid reports label generators 1..54.
"""

import argparse
import csv
import io
import json
import math
import sys

from .awareness import awareness_family, expand_sitaware, is_situation_aware
from .errors import IfaceError, InputError
from .model import SensorSet, TrustLevel, build_chain_example, load_instance, validate_instance
from .powergrid import CONFIGURATIONS, configuration, load_case118
from .solver import solve
from .uii import GammaOracle

TRUST_LEVELS = ("high", "moderate", "none")
GRID_CSV_COLUMNS = (
    "configuration", "k_trust", "regime", "family_size", "cardinality", "delta", "solution", "time_s",
)
DEFAULT_EXPAND_LIMIT = 4096


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _grid_config(name):
    cfg = name.split(":", 1)[1]
    if not (cfg.startswith("cfg") and cfg[3:].isdigit() and int(cfg[3:]) in CONFIGURATIONS):
        raise UsageError(f"unknown grid instance {name!r}; use grid118:cfg1 .. grid118:cfg4")
    return int(cfg[3:])


def load_source(name, parity="odd"):
    """``(system, pool, task, trust)`` for a file path or built-in name."""
    if name == "chain":
        system, pool, task = build_chain_example()
        return system, pool, task, None
    if name.startswith("grid118:"):
        cfg = _grid_config(name)
        system, pool, task = configuration(load_case118(), config_id=cfg, parity=parity)
        return system, pool, task, None
    return load_instance(name)


def _parse_ids(text, size):
    if text is None or not text.strip():
        return []
    try:
        ids = [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"--ids must be integers, got {text!r}") from None
    bad = [i for i in ids if not 0 <= i < size]
    if bad:
        raise UsageError(f"sensor ids {bad} outside the pool [0, {size - 1}]")
    return ids


def _oracle(args, system, pool):
    return GammaOracle(system, pool, cache_cap=args.cache_cap)


def _prune(args):
    return not args.no_prune


def cmd_gamma(args):
    system, pool, task, _ = load_source(args.instance, args.parity)
    validate_instance(system, pool, task)
    ids = _parse_ids(args.ids, pool.size)
    oracle = _oracle(args, system, pool)
    s = SensorSet.from_ids(ids, pool.size)
    return {
        "ids": ids,
        "gamma": oracle.gamma(s),
        "gamma_union_task": oracle.gamma_union_task(s, task),
        "gamma_full": oracle.gamma_full,
        "task_sensor_ids": task.s_task.ids,
    }


def cmd_enumerate(args):
    system, pool, task, _ = load_source(args.instance, args.parity)
    validate_instance(system, pool, task)
    oracle = _oracle(args, system, pool)
    family = awareness_family(oracle, task, prune=_prune(args))
    limit = args.expand_limit if args.expand_limit is not None else DEFAULT_EXPAND_LIMIT
    expanded = expand_sitaware(family, pool.size, limit + 1)
    truncated = len(expanded) > limit
    expanded = expanded[:limit]
    report = family.to_dict()
    report.update(
        family_size=len(family),
        expanded_size=len(expanded),
        expanded_truncated=truncated,
    )
    if args.expand_limit is not None:
        report["expanded"] = [s.ids for s in expanded]
    return report


def _resolve_k(args, trust, oracle):
    if args.k_trust is not None:
        trust = TrustLevel(args.k_trust)
    if trust is None:
        raise UsageError("solve needs --k-trust (or k_trust in the instance file)")
    g = oracle.gamma_full
    if not 1 <= trust.k_trust <= g:
        raise UsageError(f"k_trust={trust.k_trust} is out of range; legal range is [1, {g}]")
    return trust


def cmd_solve(args):
    system, pool, task, trust = load_source(args.instance, args.parity)
    oracle = _oracle(args, system, pool)
    trust = _resolve_k(args, trust, oracle)
    validate_instance(system, pool, task, trust)
    family = awareness_family(oracle, task, prune=_prune(args))
    sol = solve(oracle, task, family, trust, workers=args.workers, alt=args.alt_heuristic)
    report = sol.to_dict()
    report["k_trust"] = trust.k_trust
    report["is_situation_aware"] = is_situation_aware(oracle, task, family, sol.selected)
    return report


def grid_trust_levels(gamma_task, gamma_full):
    return {
        "high": gamma_task - 10,
        "moderate": gamma_task + 10,
        "none": gamma_full,
    }


def _is_long(cfg, level):
    return cfg == 4 and level in ("high", "moderate")


def cmd_grid(args):
    case = load_case118()
    configs = [args.config] if args.config else sorted(CONFIGURATIONS)
    levels = [args.trust] if args.trust else list(TRUST_LEVELS)
    cells, skipped = [], []
    for cfg in configs:
        system, pool, task = configuration(case, config_id=cfg, parity=args.parity)
        oracle = _oracle(args, system, pool)
        gamma_task = oracle.gamma(task.s_task)
        ks = grid_trust_levels(gamma_task, oracle.gamma_full)
        family = None
        for level in levels:
            if _is_long(cfg, level) and not args.include_long:
                skipped.append({"configuration": cfg, "trust": level, "reason": "long-running; pass --include-long"})
                continue
            k = ks[level]
            if family is None and level != "none":
                family = awareness_family(oracle, task, prune=_prune(args))
            sol = solve(oracle, task, family, k, workers=args.workers, alt=args.alt_heuristic)
            delta = 1.0 if sol.is_optimal else sol.bound_delta
            task_ids = set(task.s_task.ids)
            chosen = set(sol.selected.ids)
            cells.append({
                "configuration": cfg,
                "description": CONFIGURATIONS[cfg],
                "trust": level,
                "k_trust": k,
                "gamma_task": gamma_task,
                "task_generators": [i + 1 for i in task.s_task.ids],
                "regime": sol.regime,
                "certified": sol.certified,
                "family_size": None if level == "none" else len(family),
                "cardinality": sol.cardinality,
                "delta": delta,
                "solution": [i + 1 for i in sol.selected.ids],
                "added_to_task": sorted(i + 1 for i in chosen - task_ids),
                "removed_from_task": sorted(i + 1 for i in task_ids - chosen),
                "wall_time_ms": round(sol.wall_time * 1000.0, 3),
            })
    return {"cells": cells, "skipped": skipped}


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return "inf" if math.isinf(x) else f"{x:.4f}"
    return str(x)


def to_csv(command, report):
    if command == "gamma":
        return _csv_text(
            ("ids", "gamma", "gamma_union_task"),
            [(" ".join(map(str, report["ids"])), report["gamma"], report["gamma_union_task"])],
        )
    if command == "enumerate":
        return _csv_text(
            ("cardinality", "ids"),
            [(len(p), " ".join(map(str, p))) for p in report["sitaware_reduced"]],
        )
    if command == "solve":
        cells = [report]
        rows = [("", c["k_trust"], c["regime"], _fmt(c["family_size"]), c["cardinality"],
                 _fmt(c["bound_delta"]), " ".join(map(str, c["selected"])),
                 _fmt(c["wall_time_ms"] / 1000.0)) for c in cells]
        return _csv_text(GRID_CSV_COLUMNS, rows)
    rows = [(c["configuration"], c["k_trust"], c["regime"], _fmt(c["family_size"]), c["cardinality"],
             _fmt(c["delta"]), " ".join(map(str, c["solution"])), _fmt(c["wall_time_ms"] / 1000.0))
            for c in report["cells"]]
    return _csv_text(GRID_CSV_COLUMNS, rows)


def _clean(x):
    # JSON has no infinity; unbounded terms are written as null.
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_clean(v) for v in x]
    return x


def render(command, report, fmt):
    if fmt == "csv":
        return to_csv(command, report)
    return json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"


COMMANDS = {"gamma": cmd_gamma, "enumerate": cmd_enumerate, "solve": cmd_solve, "grid": cmd_grid}


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--workers", type=int, default=1, help="threads for the moderate-trust loop")
    common.add_argument("--cache-cap", type=int, default=None, help="bound on cached Γ values")
    common.add_argument("--parity", choices=("odd", "even"), default="odd",
                        help="which generators keep their input in grid configuration 4")
    prune = common.add_mutually_exclusive_group()
    prune.add_argument("--aggressive-prune", action="store_true",
                       help="superset pruning in the family sweep (the default)")
    prune.add_argument("--no-prune", action="store_true", help="plain sweep without pruning")
    common.add_argument("--alt-heuristic", action="store_true",
                        help="moderate trust: complete only the smallest family member (no bound)")

    parser = _Parser(prog="iface", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gamma", parents=[common], help="information index of a sensor set")
    p.add_argument("--instance", required=True)
    p.add_argument("--ids", default="", help="comma-separated sensor ids")

    p = sub.add_parser("enumerate", parents=[common], help="minimal situation-awareness family")
    p.add_argument("--instance", required=True)
    p.add_argument("--expand-limit", type=int, default=None,
                   help="also list up to this many aware sets")

    p = sub.add_parser("solve", parents=[common], help="minimum aware interface for a trust level")
    p.add_argument("--instance", required=True)
    p.add_argument("--k-trust", type=int, default=None)

    p = sub.add_parser("grid", parents=[common], help="118-bus experiment matrix")
    p.add_argument("--config", type=int, choices=sorted(CONFIGURATIONS), default=None)
    p.add_argument("--trust", choices=TRUST_LEVELS, default=None)
    p.add_argument("--include-long", action="store_true",
                   help="also run the configuration-4 high and moderate trust cells")
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        if args.workers < 1:
            raise UsageError("--workers must be at least 1")
        if args.cache_cap is not None and args.cache_cap < 1:
            raise UsageError("--cache-cap must be at least 1")
        if getattr(args, "expand_limit", None) is not None and args.expand_limit < 0:
            raise UsageError("--expand-limit must be non-negative")
        report = COMMANDS[args.command](args)
        text = render(args.command, report, args.format)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except IfaceError as exc:
        print(f"iface: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"iface: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
