"""Command-line interface.

Subcommands:
  reduce     run a strategy on a term and print the trace
  factorize  rearrange a recorded reduction sequence, essential steps first
  level      least level of a term and the level of each of its redexes
  check      run a property or normalization suite and report PASS/FAIL

Exit codes: 0 success / normal form, 1 usage or parse error, 2 fuel
exhausted, 3 property FAIL, 4 property INCONCLUSIVE.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import threading

from .engine import (
    InvalidTraceError,
    Outcome,
    SYSTEMS,
    UnsupportedPropertyError,
    check_normalization,
    check_property,
    check_subst_index,
    factorize,
    get_system,
    normalize,
    trace_from_positions,
)
from .parallel import Flavor
from .reductions import (
    Base,
    Step,
    StepKind,
    SystemId,
    least_level,
    level_indexed_steps,
    redexes,
    step_at,
)
from .terms import InvalidPositionError, ParseError, Position, parse, parse_position, show

CONFIG_ENV = "ESSENTIAL_REWRITE_CONFIG"

DEFAULTS = {
    "fuel": 1000,
    "size": 8,
    "budget": 20000,
    "depth": 64,
    "output": "text",
    "seed": 0,
    "parallel": 1,
    "samples": 500,
}

_BASE_ONLY = {"beta": Base.BETA, "betav": Base.BETAV}

# term operations recurse on term depth, and reducts can grow deep well
# within the default fuel; commands therefore run on a thread with a large
# (lazily committed) stack instead of the ~10k-frame default
_STACK_BYTES = 256 * 1024 * 1024
_RECURSION_LIMIT = 150_000


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    config = _load_config()
    for key, fallback in DEFAULTS.items():
        if getattr(args, key, None) is None and hasattr(args, key):
            setattr(args, key, config.get(key, fallback))
    try:
        return _run_deep(args.handler, args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    except (InvalidTraceError, InvalidPositionError, UnsupportedPropertyError,
            OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RecursionError:
        print("error: term grew too deep to process; lower --fuel",
              file=sys.stderr)
        return 1


def _run_deep(handler, args) -> int:
    outcome: dict = {}

    def run():
        try:
            outcome["code"] = handler(args)
        except BaseException as exc:  # transported back to the caller
            outcome["error"] = exc

    old_stack = threading.stack_size(_STACK_BYTES)
    old_limit = sys.getrecursionlimit()
    sys.setrecursionlimit(_RECURSION_LIMIT)
    try:
        worker = threading.Thread(target=run, daemon=True)
        worker.start()
        worker.join()
    finally:
        sys.setrecursionlimit(old_limit)
        threading.stack_size(old_stack)
    if "error" in outcome:
        raise outcome["error"]
    return outcome["code"]


def _load_config() -> dict:
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    config = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            key, value = line.split("=", 1)
            key, value = key.strip(), value.strip()
            if key in ("fuel", "size", "budget", "depth", "seed", "parallel", "samples"):
                config[key] = int(value)
            elif key == "output":
                config[key] = value
    return config


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="essential-rewrite",
        description="Reduction strategies, factorization and property checking "
                    "for the lambda calculus.")
    sub = parser.add_subparsers(dest="command", required=True)

    reduce_p = sub.add_parser("reduce", help="reduce a term with a strategy")
    reduce_p.add_argument("term")
    reduce_p.add_argument("--system", required=True,
                          choices=["head", "lo", "weak-cbv", "ll", "beta", "betav"])
    _common_flags(reduce_p)
    reduce_p.set_defaults(handler=cmd_reduce)

    fact_p = sub.add_parser("factorize", help="factorize a reduction sequence file")
    fact_p.add_argument("file")
    fact_p.add_argument("--system", required=True,
                        choices=["head", "lo", "weak-cbv", "ll"])
    _common_flags(fact_p)
    fact_p.set_defaults(handler=cmd_factorize)

    level_p = sub.add_parser("level", help="least level and per-redex levels")
    level_p.add_argument("term")
    _common_flags(level_p)
    level_p.set_defaults(handler=cmd_level)

    check_p = sub.add_parser("check", help="run a property suite")
    check_p.add_argument("property",
                         choices=sorted(["determinism", "diamond", "persistence",
                                         "fullness", "decomposition", "merge", "split",
                                         "indexed-split", "ll-monotone", "ll-invariant",
                                         "normalization", "subst-index"]))
    check_p.add_argument("--system", choices=["head", "lo", "weak-cbv", "ll"])
    check_p.add_argument("--flavor", choices=["cbn", "cbv"], default="cbn")
    check_p.add_argument("--samples", type=int, default=None)
    _common_flags(check_p)
    check_p.set_defaults(handler=cmd_check)

    return parser


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fuel", type=int, default=None)
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--parallel", type=int, default=None, metavar="N")
    p.add_argument("--output", choices=["text", "json"], default=None)


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.output == "json":
        print(json.dumps(payload, indent=2))
    else:
        for line in text_lines:
            print(line)


def _step_line(step, term) -> str:
    pos = ".".join(step.position) or "root"
    extra = f" level={step.level}" if step.level is not None else ""
    return f"  {step.kind.value} @ {pos}{extra} -> {show(term)}"


def cmd_reduce(args) -> int:
    term = parse(args.term)
    if args.system in _BASE_ONLY:
        trace_steps = []
        current = term
        base = _BASE_ONLY[args.system]
        outcome = Outcome.NORMAL_FORM
        for _ in range(args.fuel):
            positions = redexes(current, base)
            if not positions:
                break
            nxt = step_at(current, positions[0], base)
            trace_steps.append((Step(positions[0], StepKind.PLAIN), nxt))
            current = nxt
        if redexes(current, base):
            outcome = Outcome.FUEL_EXHAUSTED
        payload = {
            "start": show(term),
            "system": args.system,
            "steps": [dict(s.to_json(), term=show(u)) for s, u in trace_steps],
            "outcome": outcome.value,
        }
        lines = [show(term)] + [_step_line(s, u) for s, u in trace_steps]
        lines.append(f"outcome: {outcome.value}")
        _emit(args, payload, lines)
        return 2 if outcome is Outcome.FUEL_EXHAUSTED else 0

    system = get_system(args.system)
    trace, outcome = normalize(term, system, fuel=args.fuel)
    payload = {
        "start": show(term),
        "system": args.system,
        "steps": [dict(s.to_json(), term=show(u)) for s, u in trace.steps],
        "outcome": outcome.value,
    }
    lines = [show(term)] + [_step_line(s, u) for s, u in trace.steps]
    lines.append(f"outcome: {outcome.value}")
    _emit(args, payload, lines)
    return 2 if outcome is Outcome.FUEL_EXHAUSTED else 0


def _read_sequence_file(path: str) -> tuple:
    """Sequence files: first line a term, then one `pos <path>` line per step,
    with <path> a dot-separated string of L|R|B (omitted or `root` for the
    root redex)."""
    with open(path, encoding="utf-8") as handle:
        raw = [line.rstrip("\n") for line in handle]
    lines = [(i + 1, line.strip()) for i, line in enumerate(raw)
             if line.strip() and not line.strip().startswith("#")]
    if not lines:
        raise InvalidTraceError("sequence file is empty")
    first_no, term_text = lines[0]
    try:
        term = parse(term_text)
    except ParseError as exc:
        raise InvalidTraceError(f"line {first_no}: {exc}") from exc
    positions: list[Position] = []
    line_numbers: list[int] = []
    for no, line in lines[1:]:
        tokens = line.split()
        if tokens[0] != "pos" or len(tokens) > 2:
            raise InvalidTraceError(f"line {no}: expected 'pos <path>'")
        try:
            positions.append(parse_position(tokens[1] if len(tokens) == 2 else ""))
        except InvalidPositionError as exc:
            raise InvalidTraceError(f"line {no}: {exc}") from exc
        line_numbers.append(no)
    return term, positions, line_numbers


def cmd_factorize(args) -> int:
    term, positions, line_numbers = _read_sequence_file(args.file)
    system = get_system(args.system)
    try:
        trace = trace_from_positions(term, positions, system)
    except InvalidTraceError as exc:
        if exc.index is not None:
            raise InvalidTraceError(f"line {line_numbers[exc.index]}: {exc}") from exc
        raise
    result = factorize(trace, system)
    payload = result.to_json()
    lines = [f"input: {show(term)} ({len(trace.steps)} steps)", "essential prefix:"]
    lines += [_step_line(s, u) for s, u in result.essential.steps] or ["  (empty)"]
    lines.append("inessential suffix:")
    lines += [_step_line(s, u) for s, u in result.inessential.steps] or ["  (empty)"]
    _emit(args, payload, lines)
    return 0


def cmd_level(args) -> int:
    term = parse(args.term)
    level = least_level(term)
    steps = level_indexed_steps(term)
    payload = {
        "term": show(term),
        "least_level": level.to_json(),
        "steps": [dict(s.to_json(), term=show(u)) for s, u in steps],
    }
    lines = [f"least level of {show(term)}: {level}"]
    for s, u in steps:
        pos = ".".join(s.position) or "root"
        lines.append(f"  level {s.level} @ {pos} [{s.kind.value}] -> {show(u)}")
    _emit(args, payload, lines)
    return 0


def cmd_check(args) -> int:
    if args.property == "subst-index":
        report = check_subst_index(Flavor(args.flavor), samples=args.samples,
                                   seed=args.seed)
    else:
        if not args.system:
            print("error: this property needs --system", file=sys.stderr)
            return 1
        system = SYSTEMS[SystemId(args.system)]
        if args.property == "normalization":
            report = check_normalization(system, size_bound=args.size,
                                         fuel=args.fuel, node_budget=args.budget,
                                         depth_budget=args.depth)
        else:
            report = check_property(args.property, system, size_bound=args.size,
                                    workers=args.parallel)
    payload = report.to_json()
    lines = [f"{report.property} [{report.system}] size<={report.size_bound}: "
             f"{report.result} ({report.checked_count} checked)"]
    if report.counterexample:
        lines.append(f"counterexample: {report.counterexample}")
    _emit(args, payload, lines)
    if report.result == "PASS":
        return 0
    return 3 if report.result == "FAIL" else 4


if __name__ == "__main__":
    sys.exit(main())
