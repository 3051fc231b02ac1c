"""Essential/inessential reduction engines and the property harness.

An essential system pairs a base reduction (beta or beta-value) with a
distinguished sub-relation: head, weak call-by-value, leftmost-outermost or
least-level steps.  This module makes the standard rearrangement results
about such systems executable:

* `split` peels essential steps off a parallel step until only an
  inessential parallel step remains,
* `merge` absorbs an essential step following an inessential parallel step
  into a single parallel step,
* `factorize` rewrites an arbitrary reduction sequence into essential steps
  followed by inessential ones by iterating merge and split,
* `normalize` runs a strategy to its (essential) normal form,
* `check_property` / `check_normalization` sweep every term up to a size
  bound and report the first counterexample, if any.
"""

from __future__ import annotations

import random
from collections import Counter, deque
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .enumeration import EnumSpec, enumerate_terms, random_term
from .graphs import Decision, explore, weakly_normalizing
from .parallel import (
    Flavor,
    FlavorMismatchError,
    InvalidSelectionError,
    ParDerivation,
    Rule,
    all_parallel_steps,
    base_of,
    derive,
    is_parallel_inessential,
    realize,
    selection_of,
    sequential_index,
    subst_parallel,
)
from .reductions import (
    Base,
    Step,
    StepKind,
    SystemId,
    beta_redexes,
    betav_redexes,
    head_steps,
    least_level,
    level_indexed_steps,
    ll_steps,
    lo_steps,
    neg_head_steps,
    neg_ll_steps,
    neg_lo_steps,
    neg_weak_steps,
    position_level,
    redexes,
    step_at,
    weak_cbv_steps,
)
from .terms import (
    BODY,
    LEFT,
    Position,
    RIGHT,
    Term,
    alpha_eq,
    bound_positions,
    count_occurrences,
    is_neutral,
    is_normal,
    is_value,
    show,
    substitute,
    subterm_at,
)


class NotInessentialError(ValueError):
    pass


class NotComposableError(ValueError):
    pass


class InvalidTraceError(ValueError):
    def __init__(self, message: str, index: int | None = None):
        self.index = index
        super().__init__(message)


class Outcome(Enum):
    NORMAL_FORM = "normal-form"
    ESSENTIAL_NORMAL = "essential-normal"
    FUEL_EXHAUSTED = "fuel-exhausted"


@dataclass(frozen=True)
class EssentialSystem:
    """A base reduction split into essential and inessential steps."""

    id: SystemId
    base: Base
    flavor: Flavor

    def base_steps(self, t: Term) -> list[tuple[Step, Term]]:
        return [(self.make_step(t, p), step_at(t, p, self.base)) for p in redexes(t, self.base)]

    def essential_steps(self, t: Term) -> list[tuple[Step, Term]]:
        if self.id is SystemId.HEAD:
            return head_steps(t)
        if self.id is SystemId.LO:
            return lo_steps(t)
        if self.id is SystemId.WEAK_CBV:
            return weak_cbv_steps(t)
        return ll_steps(t)

    def inessential_steps(self, t: Term) -> list[tuple[Step, Term]]:
        if self.id is SystemId.HEAD:
            return neg_head_steps(t)
        if self.id is SystemId.LO:
            return neg_lo_steps(t)
        if self.id is SystemId.WEAK_CBV:
            return neg_weak_steps(t)
        return neg_ll_steps(t)

    def essential_positions(self, t: Term) -> frozenset[Position]:
        return frozenset(s.position for s, _ in self.essential_steps(t))

    def classify(self, t: Term, pos: Position) -> StepKind:
        return StepKind.ESSENTIAL if pos in self.essential_positions(t) else StepKind.INESSENTIAL

    def make_step(self, t: Term, pos: Position) -> Step:
        level = position_level(pos) if self.id is SystemId.LEAST_LEVEL else None
        return Step(pos, self.classify(t, pos), level)

    def base_normal(self, t: Term) -> bool:
        return not redexes(t, self.base)


SYSTEMS: dict[SystemId, EssentialSystem] = {
    SystemId.HEAD: EssentialSystem(SystemId.HEAD, Base.BETA, Flavor.CBN),
    SystemId.WEAK_CBV: EssentialSystem(SystemId.WEAK_CBV, Base.BETAV, Flavor.CBV),
    SystemId.LO: EssentialSystem(SystemId.LO, Base.BETA, Flavor.CBN),
    SystemId.LEAST_LEVEL: EssentialSystem(SystemId.LEAST_LEVEL, Base.BETA, Flavor.LEVELED),
}


def get_system(sys) -> EssentialSystem:
    if isinstance(sys, EssentialSystem):
        return sys
    if isinstance(sys, SystemId):
        return SYSTEMS[sys]
    if isinstance(sys, str):
        return SYSTEMS[SystemId(sys)]
    raise TypeError(f"not a system: {sys!r}")


# ---------------------------------------------------------------------------
# Traces


@dataclass
class Trace:
    """A recorded reduction sequence; each step stores its reduct."""

    start: Term
    steps: list[tuple[Step, Term]]

    @property
    def end(self) -> Term:
        return self.steps[-1][1] if self.steps else self.start

    def __len__(self) -> int:
        return len(self.steps)

    def to_json(self):
        return {
            "start": show(self.start),
            "steps": [dict(step.to_json(), term=show(term)) for step, term in self.steps],
        }


@dataclass
class Factorization:
    """Essential prefix then inessential suffix, same endpoints as the input."""

    essential: Trace
    inessential: Trace

    def validate(self) -> None:
        if not alpha_eq(self.essential.end, self.inessential.start):
            raise InvalidTraceError("factorization prefix and suffix do not meet")
        for step, _ in self.essential.steps:
            if step.kind is not StepKind.ESSENTIAL:
                raise InvalidTraceError("prefix contains a non-essential step")
        for step, _ in self.inessential.steps:
            if step.kind is not StepKind.INESSENTIAL:
                raise InvalidTraceError("suffix contains a non-inessential step")

    def to_json(self):
        return {"essential": self.essential.to_json(), "inessential": self.inessential.to_json()}


# ---------------------------------------------------------------------------
# Split


def _essential_redex(d: ParDerivation, system: SystemId) -> Optional[Position]:
    """The essential redex a derivation contracts, or None if it is an
    inessential parallel step.  Follows the same descent the indexed-split
    argument makes, so peeling it decreases the sequential index by one."""
    if system is SystemId.HEAD:
        return _head_redex_of(d)
    if system is SystemId.LO:
        return _lo_redex_of(d)
    if system is SystemId.WEAK_CBV:
        return _weak_redex_of(d)
    if d.index.is_infinite or d.index > least_level(d.source):
        return None
    return _ll_redex_of(d)


def _head_redex_of(d: ParDerivation) -> Optional[Position]:
    if d.rule is Rule.BETA:
        return ()
    if d.rule is Rule.ABS:
        inner = _head_redex_of(d.children[0])
        return None if inner is None else (BODY,) + inner
    if d.rule is Rule.APP:
        left = d.children[0]
        if left.rule is Rule.ABS:
            return None
        inner = _head_redex_of(left)
        return None if inner is None else (LEFT,) + inner
    return None


def _lo_redex_of(d: ParDerivation) -> Optional[Position]:
    if d.rule is Rule.BETA:
        return ()
    if d.rule is Rule.ABS:
        inner = _lo_redex_of(d.children[0])
        return None if inner is None else (BODY,) + inner
    if d.rule is Rule.APP:
        left, right = d.children
        if left.rule is Rule.ABS:
            return None
        if is_neutral(left.source):
            inner = _lo_redex_of(right)
            return None if inner is None else (RIGHT,) + inner
        inner = _lo_redex_of(left)
        return None if inner is None else (LEFT,) + inner
    return None


def _weak_redex_of(d: ParDerivation) -> Optional[Position]:
    if d.rule is Rule.BETA:
        return ()
    if d.rule is Rule.APP:
        inner = _weak_redex_of(d.children[0])
        if inner is not None:
            return (LEFT,) + inner
        inner = _weak_redex_of(d.children[1])
        if inner is not None:
            return (RIGHT,) + inner
    return None


def _ll_redex_of(d: ParDerivation) -> Position:
    # invariant: d's level equals the least level of its source, and is finite
    if d.rule is Rule.BETA:
        return ()
    if d.rule is Rule.ABS:
        return (BODY,) + _ll_redex_of(d.children[0])
    left, right = d.children
    if left.index <= right.index + 1:
        return (LEFT,) + _ll_redex_of(left)
    return (RIGHT,) + _ll_redex_of(right)


def _residual(d: ParDerivation, pos: Position, flavor: Flavor) -> ParDerivation:
    """The derivation left over after firing the selected redex at `pos` first.

    Selections outside the redex stay put; selections in its body keep their
    paths; selections in its argument reappear once per binder occurrence.
    """
    sel = selection_of(d)
    body_prefix = pos + (LEFT, BODY)
    arg_prefix = pos + (RIGHT,)
    nb, na = len(body_prefix), len(arg_prefix)
    keep = {p for p in sel if p[: len(pos)] != pos}
    body_sel = [p[nb:] for p in sel if p[:nb] == body_prefix]
    arg_sel = [p[na:] for p in sel if p[:na] == arg_prefix]
    redex = subterm_at(d.source, pos)
    occurrences = list(bound_positions(redex.fun.body))
    new_sel = keep
    new_sel.update(pos + q for q in body_sel)
    new_sel.update(pos + o + r for o in occurrences for r in arg_sel)
    return derive(step_at(d.source, pos, base_of(flavor)), new_sel, flavor)


def split(d: ParDerivation, sys) -> tuple[Trace, ParDerivation]:
    """Decompose a parallel step into essential steps and an inessential rest.

    Iterates single essential extractions; each round decreases the
    sequential index by exactly one, which bounds the loop.
    """
    system = get_system(sys)
    if d.flavor is not system.flavor:
        raise FlavorMismatchError(
            f"{system.id.value} splits {system.flavor.value} derivations, got {d.flavor.value}")
    steps: list[tuple[Step, Term]] = []
    current = d
    for _ in range(sequential_index(d) + 1):
        pos = _essential_redex(current, system.id)
        if pos is None:
            return Trace(d.source, steps), current
        target = step_at(current.source, pos, system.base)
        steps.append((system.make_step(current.source, pos), target))
        current = _residual(current, pos, system.flavor)
    raise AssertionError("split did not terminate within its index bound")


# ---------------------------------------------------------------------------
# Merge


def merge(d: ParDerivation, e: tuple[Step, Term], sys) -> ParDerivation:
    """Absorb an essential step taken after an inessential parallel step.

    The result is the parallel step from d's source that additionally
    contracts the essential redex; its target is the essential step's target.
    """
    system = get_system(sys)
    if not is_parallel_inessential(d, system.id):
        raise NotInessentialError("merge needs an inessential parallel step")
    step, target = e
    following = {(s.position, u) for s, u in system.essential_steps(d.target)}
    if (step.position, target) not in following:
        raise NotComposableError(
            f"{show(target)} is not an essential reduct of {show(d.target)} "
            f"at {'.'.join(step.position) or 'root'}")
    try:
        merged = derive(d.source, selection_of(d) | {step.position}, system.flavor)
    except InvalidSelectionError as exc:
        raise NotComposableError(str(exc)) from exc
    if not alpha_eq(merged.target, target):
        raise NotComposableError("merged derivation misses the essential target")
    return merged


# ---------------------------------------------------------------------------
# Factorization


def factorize(trace: Trace, sys) -> Factorization:
    """Rearrange a base-step sequence into essential then inessential steps.

    Each inessential input step is lifted to a one-redex parallel step, then
    pushed to the right over the essential steps after it: merging with the
    next essential step and splitting the result moves essential work to the
    front while leaving a smaller inessential remainder.  The remainders are
    finally expanded back into single inessential steps.
    """
    system = get_system(sys)
    items = _lift(trace, system)

    e_steps: deque[tuple[Step, Term]] = deque()
    residuals: deque[ParDerivation] = deque()
    for item in reversed(items):
        if isinstance(item, tuple):
            e_steps.appendleft(item)
        else:
            d = item
            pushed: list[tuple[Step, Term]] = []
            for e in e_steps:
                merged = merge(d, e, system)
                prefix, d = split(merged, system)
                pushed.extend(prefix.steps)
            e_steps = deque(pushed)
            residuals.appendleft(d)

    essential = Trace(trace.start, list(e_steps))
    middle = essential.end
    i_steps: list[tuple[Step, Term]] = []
    current = middle
    for d in residuals:
        if not alpha_eq(d.source, current):
            raise InvalidTraceError("inessential remainder does not compose")
        for pos in realize(d):
            nxt = step_at(current, pos, system.base)
            i_steps.append((system.make_step(current, pos), nxt))
            current = nxt
    result = Factorization(essential, Trace(middle, i_steps))
    if not alpha_eq(result.inessential.end, trace.end):
        raise InvalidTraceError("factorization changed the endpoint")
    result.validate()
    return result


def _lift(trace: Trace, system: EssentialSystem):
    """Validate a base trace and lift each step to an E item or a parallel
    inessential derivation."""
    items = []
    current = trace.start
    for i, (step, target) in enumerate(trace.steps):
        valid = set(redexes(current, system.base))
        if step.position not in valid:
            raise InvalidTraceError(
                f"step {i + 1}: no {system.base.value} redex at "
                f"{'.'.join(step.position) or 'root'} in {show(current)}", index=i)
        real = step_at(current, step.position, system.base)
        if not alpha_eq(real, target):
            raise InvalidTraceError(f"step {i + 1}: recorded reduct does not match", index=i)
        if system.classify(current, step.position) is StepKind.ESSENTIAL:
            items.append((system.make_step(current, step.position), target))
        else:
            items.append(derive(current, {step.position}, system.flavor))
        current = target
    return items


def trace_from_positions(start: Term, positions: list[Position], sys) -> Trace:
    """Build a validated trace by contracting the given positions in order."""
    system = get_system(sys)
    steps: list[tuple[Step, Term]] = []
    current = start
    for i, pos in enumerate(positions):
        if pos not in set(redexes(current, system.base)):
            raise InvalidTraceError(
                f"step {i + 1}: no {system.base.value} redex at "
                f"{'.'.join(pos) or 'root'} in {show(current)}", index=i)
        target = step_at(current, pos, system.base)
        steps.append((system.make_step(current, pos), target))
        current = target
    return Trace(start, steps)


# ---------------------------------------------------------------------------
# Normalization


def normalize(t: Term, sys, fuel: int = 1000) -> tuple[Trace, Outcome]:
    """Run the essential strategy until it halts or the fuel runs out.

    Head and leftmost-outermost are deterministic; for the other systems the
    first step in traversal order is taken (the diamond property makes the
    choice irrelevant for termination and length).
    """
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    system = get_system(sys)
    steps: list[tuple[Step, Term]] = []
    current = t
    for _ in range(fuel):
        available = system.essential_steps(current)
        if not available:
            break
        step, nxt = available[0]
        steps.append((step, nxt))
        current = nxt
    trace = Trace(t, steps)
    if system.essential_steps(current):
        return trace, Outcome.FUEL_EXHAUSTED
    if system.base_normal(current):
        return trace, Outcome.NORMAL_FORM
    return trace, Outcome.ESSENTIAL_NORMAL


# ---------------------------------------------------------------------------
# Property harness


@dataclass
class Report:
    property: str
    system: str
    size_bound: int
    checked_count: int
    result: str  # PASS | FAIL | INCONCLUSIVE
    counterexample: Optional[str] = None

    def to_json(self):
        out = {
            "property": self.property,
            "system": self.system,
            "size_bound": self.size_bound,
            "checked_count": self.checked_count,
            "result": self.result,
        }
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


class _Inconclusive(Exception):
    pass


def _check_determinism(system: EssentialSystem, t: Term) -> Optional[str]:
    if len(system.essential_steps(t)) > 1:
        return f"{show(t)} has several essential steps"
    return None


def _check_diamond(system: EssentialSystem, t: Term) -> Optional[str]:
    reducts = [u for _, u in system.essential_steps(t)]
    for i, s in enumerate(reducts):
        for u in reducts[i + 1:]:
            if alpha_eq(s, u):
                continue
            close_s = {v for _, v in system.essential_steps(s)}
            close_u = {v for _, v in system.essential_steps(u)}
            if not close_s & close_u:
                return f"{show(t)} diverges to {show(s)} / {show(u)} without closing"
    return None


def _check_persistence(system: EssentialSystem, t: Term) -> Optional[str]:
    if not system.essential_steps(t):
        return None
    for _, u in system.inessential_steps(t):
        if not system.essential_steps(u):
            return f"the essential step of {show(t)} is lost by passing to {show(u)}"
    return None


def _check_fullness(system: EssentialSystem, t: Term) -> Optional[str]:
    has_essential = bool(system.essential_steps(t))
    if has_essential != (not system.base_normal(t)):
        return f"fullness fails on {show(t)}"
    return None


def _check_decomposition(system: EssentialSystem, t: Term) -> Optional[str]:
    base = Counter((p, u) for p in redexes(t, system.base)
                   for u in [step_at(t, p, system.base)])
    ess = Counter((s.position, u) for s, u in system.essential_steps(t))
    ines = Counter((s.position, u) for s, u in system.inessential_steps(t))
    if base != ess + ines:
        return f"essential and inessential steps do not partition the redexes of {show(t)}"
    return None


def _check_ll_monotone(system: EssentialSystem, t: Term) -> Optional[str]:
    ll = least_level(t)
    for _, u in level_indexed_steps(t):
        if least_level(u) < ll:
            return f"step from {show(t)} to {show(u)} lowered the least level"
    return None


def _check_ll_invariant(system: EssentialSystem, t: Term) -> Optional[str]:
    ll = least_level(t)
    for _, u in neg_ll_steps(t):
        if least_level(u) != ll:
            return f"inessential step from {show(t)} to {show(u)} changed the least level"
    return None


def _check_merge(system: EssentialSystem, t: Term) -> Optional[str]:
    for d in all_parallel_steps(t, system.flavor):
        if not is_parallel_inessential(d, system.id):
            continue
        for s, u in system.essential_steps(d.target):
            try:
                merged = merge(d, (s, u), system)
            except (NotComposableError, InvalidSelectionError) as exc:
                return f"merge failed on {show(t)}: {exc}"
            if not (alpha_eq(merged.source, t) and alpha_eq(merged.target, u)):
                return f"merge produced wrong endpoints on {show(t)}"
    return None


def _check_split(system: EssentialSystem, t: Term) -> Optional[str]:
    for d in all_parallel_steps(t, system.flavor):
        prefix, rest = split(d, system)
        if not alpha_eq(prefix.start, t):
            return f"split moved the start of {show(t)}"
        current = t
        for s, u in prefix.steps:
            if system.classify(current, s.position) is not StepKind.ESSENTIAL:
                return f"split emitted a non-essential step on {show(t)}"
            current = u
        if not alpha_eq(rest.source, current):
            return f"split prefix and residual do not meet on {show(t)}"
        if not is_parallel_inessential(rest, system.id):
            return f"split residual is not inessential on {show(t)}"
        if not alpha_eq(rest.target, d.target):
            return f"split changed the target of {show(t)}"
    return None


def _check_indexed_split(system: EssentialSystem, t: Term) -> Optional[str]:
    for d in all_parallel_steps(t, system.flavor):
        current = d
        index = sequential_index(d)
        while True:
            pos = _essential_redex(current, system.id)
            if pos is None:
                break
            current = _residual(current, pos, system.flavor)
            if sequential_index(current) != index - 1:
                return (f"peeling the essential redex of {show(t)} changed the index by "
                        f"{index - sequential_index(current)}")
            index -= 1
    return None


PROPERTY_CHECKS = {
    "determinism": (_check_determinism, (SystemId.HEAD, SystemId.LO)),
    "diamond": (_check_diamond, (SystemId.WEAK_CBV, SystemId.LEAST_LEVEL)),
    "persistence": (_check_persistence, tuple(SystemId)),
    "fullness": (_check_fullness, (SystemId.LO, SystemId.LEAST_LEVEL)),
    "decomposition": (_check_decomposition, tuple(SystemId)),
    "merge": (_check_merge, tuple(SystemId)),
    "split": (_check_split, tuple(SystemId)),
    "indexed-split": (_check_indexed_split, tuple(SystemId)),
    "ll-monotone": (_check_ll_monotone, (SystemId.LEAST_LEVEL,)),
    "ll-invariant": (_check_ll_invariant, (SystemId.LEAST_LEVEL,)),
}


class UnsupportedPropertyError(ValueError):
    pass


def check_property(prop: str, sys, size_bound: int = 8,
                   free_names: tuple[str, ...] = ("x", "y"),
                   workers: int = 1) -> Report:
    """Exhaustively check one property of one system on all terms up to a size."""
    system = get_system(sys)
    try:
        checker, supported = PROPERTY_CHECKS[prop]
    except KeyError:
        raise UnsupportedPropertyError(f"unknown property {prop!r}") from None
    if system.id not in supported:
        raise UnsupportedPropertyError(
            f"property {prop!r} is not claimed for system {system.id.value!r}")
    terms = list(enumerate_terms(EnumSpec(max_size=size_bound, free_names=free_names)))
    checked = 0
    counterexample = None
    if workers > 1:
        counterexample, checked = _parallel_sweep(prop, system, terms, workers)
    else:
        for t in terms:
            checked += 1
            counterexample = checker(system, t)
            if counterexample is not None:
                break
    result = "PASS" if counterexample is None else "FAIL"
    return Report(prop, system.id.value, size_bound, checked, result, counterexample)


def _sweep_chunk(args):
    prop, system_value, chunk = args
    system = SYSTEMS[SystemId(system_value)]
    checker, _ = PROPERTY_CHECKS[prop]
    for i, t in enumerate(chunk):
        failure = checker(system, t)
        if failure is not None:
            return i + 1, failure
    return len(chunk), None


def _parallel_sweep(prop: str, system: EssentialSystem, terms, workers: int):
    from concurrent.futures import ProcessPoolExecutor

    chunk_size = max(1, len(terms) // (workers * 8))
    chunks = [terms[i:i + chunk_size] for i in range(0, len(terms), chunk_size)]
    checked = 0
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for done, failure in pool.map(
                _sweep_chunk, [(prop, system.id.value, c) for c in chunks]):
            checked += done
            if failure is not None:
                return failure, checked
    return None, checked


# ---------------------------------------------------------------------------
# Normalization checks


def check_normalization(sys, size_bound: int = 8, fuel: int = 1000,
                        node_budget: int = 20000, depth_budget: int = 64) -> Report:
    """Desk-scale normalization theorems.

    For every enumerated term whose reduction graph certifies the relevant
    hypothesis, run the strategy (or search its whole essential graph) and
    verify the claimed conclusion.  Budget hits yield INCONCLUSIVE, not PASS.
    """
    system = get_system(sys)
    closed_only = system.id is SystemId.WEAK_CBV
    spec = EnumSpec(max_size=size_bound, closed_only=closed_only)
    checked = 0
    inconclusive = None
    for t in enumerate_terms(spec):
        try:
            relevant, failure = _check_normalization_one(system, t, fuel,
                                                         node_budget, depth_budget)
        except _Inconclusive as stop:
            inconclusive = f"{show(t)}: {stop}"
            continue
        if relevant:
            checked += 1
        if failure is not None:
            return Report("normalization", system.id.value, size_bound, checked,
                          "FAIL", failure)
    if inconclusive is not None:
        return Report("normalization", system.id.value, size_bound, checked,
                      "INCONCLUSIVE", inconclusive)
    return Report("normalization", system.id.value, size_bound, checked, "PASS")


def _check_normalization_one(system: EssentialSystem, t: Term, fuel: int,
                             node_budget: int, depth_budget: int):
    graph = explore(t, system.base, node_budget=node_budget, depth_budget=depth_budget)
    if system.id is SystemId.HEAD:
        # hypothesis: some essential-normal form is base-reachable
        if not any(not head_steps(n) for n in graph.nodes):
            return False, None
        _, outcome = normalize(t, system, fuel)
        if outcome is Outcome.FUEL_EXHAUSTED:
            raise _Inconclusive("head reduction hit the fuel bound")
        return True, None
    if system.id is SystemId.LO:
        if weakly_normalizing(graph) is not Decision.YES:
            return False, None
        trace, outcome = normalize(t, system, fuel)
        if outcome is Outcome.FUEL_EXHAUSTED:
            raise _Inconclusive("leftmost-outermost reduction hit the fuel bound")
        if outcome is not Outcome.NORMAL_FORM or not is_normal(trace.end):
            return True, f"leftmost-outermost missed the normal form of {show(t)}"
        return True, None
    if system.id is SystemId.LEAST_LEVEL:
        if weakly_normalizing(graph) is not Decision.YES:
            return False, None
        failure = _uniform_terminal(
            t, lambda u: [v for _, v in ll_steps(u)],
            terminal_ok=is_normal, budget=node_budget,
            what="least-level")
        return True, failure
    # weak CbV: closed terms reaching a value must always end in a value
    if not any(is_value(n) for n in graph.nodes):
        return False, None
    failure = _uniform_terminal(
        t, lambda u: [v for _, v in weak_cbv_steps(u)],
        terminal_ok=is_value, budget=node_budget,
        what="weak CbV")
    return True, failure


def _uniform_terminal(t: Term, successors, terminal_ok, budget: int, what: str):
    """All maximal essential sequences from t are finite, of equal length, and
    end in an accepted terminal.  Returns a failure message or None.

    Iterative post-order walk: terms can outgrow the Python stack long before
    they exhaust the node budget.
    """
    memo: dict[Term, object] = {}
    children: dict[Term, list[Term]] = {}
    on_path: set[Term] = set()
    stack: list[tuple[Term, bool]] = [(t, False)]
    while stack:
        u, expanded = stack.pop()
        if not expanded:
            if u in memo or u in on_path:
                continue
            if len(memo) + len(on_path) >= budget:
                raise _Inconclusive(f"{what} graph search hit the node budget")
            nexts = successors(u)
            children[u] = nexts
            if not nexts:
                memo[u] = 0 if terminal_ok(u) else (
                    f"{what} reduction from {show(t)} halts at the bad term {show(u)}")
                continue
            on_path.add(u)
            stack.append((u, True))
            for v in nexts:
                if v in on_path:
                    return f"{what} reduction loops below {show(t)}"
                if v not in memo:
                    stack.append((v, False))
        else:
            on_path.discard(u)
            lengths = set()
            result = None
            for v in children.pop(u):
                sub = memo[v]
                if isinstance(sub, str):
                    result = sub
                    break
                lengths.add(sub)
            if result is None:
                if len(lengths) != 1:
                    result = f"{what} sequences from {show(t)} have different lengths"
                else:
                    result = lengths.pop() + 1
            memo[u] = result
    outcome = memo[t]
    return outcome if isinstance(outcome, str) else None


# ---------------------------------------------------------------------------
# Substitutivity sweep


def check_subst_index(flavor: Flavor, samples: int = 500, seed: int = 0,
                      max_size: int = 9) -> Report:
    """Randomized check of the substitutivity index law.

    Combines two random parallel steps through a substitution and verifies
    the combined index both against the closed formula and against a full
    re-derivation from the induced redex selection.
    """
    if flavor not in (Flavor.CBN, Flavor.CBV):
        raise UnsupportedPropertyError("substitutivity indexes exist for CBN and CBV")
    rng = random.Random(seed)
    spec = EnumSpec(max_size=max_size)
    checked = 0
    for _ in range(samples):
        t = random_term(rng.randrange(2 ** 30), rng.randint(4, max_size), spec)
        d1 = _random_derivation(rng, t, flavor)
        s = _random_substituend(rng, flavor, spec, max_size)
        d2 = _random_derivation(rng, s, flavor)
        name = rng.choice(("x", "y"))
        combined = subst_parallel(d1, name, d2, flavor)
        checked += 1
        expected = d1.index + count_occurrences(d1.target, name) * d2.index
        failure = None
        if combined.index != expected:
            failure = (f"index {combined.index} instead of {expected} substituting "
                       f"{name} := {show(s)} in {show(t)}")
        elif not alpha_eq(combined.source, substitute(t, name, s)):
            failure = f"wrong source substituting {name} := {show(s)} in {show(t)}"
        elif not alpha_eq(combined.target, substitute(d1.target, name, d2.target)):
            failure = f"wrong target substituting {name} := {show(s)} in {show(t)}"
        else:
            rederived = derive(combined.source, selection_of(combined), flavor)
            if rederived.index != combined.index or not alpha_eq(rederived.target, combined.target):
                failure = (f"re-derivation disagrees substituting {name} := {show(s)} "
                           f"in {show(t)}")
        if failure is not None:
            return Report("subst-index", flavor.value, max_size, checked, "FAIL", failure)
    return Report("subst-index", flavor.value, max_size, checked, "PASS")


def _random_derivation(rng: random.Random, t: Term, flavor: Flavor) -> ParDerivation:
    positions = beta_redexes(t) if flavor is not Flavor.CBV else betav_redexes(t)
    sel = [p for p in positions if rng.random() < 0.6]
    return derive(t, sel, flavor)


def _random_substituend(rng: random.Random, flavor: Flavor, spec: EnumSpec,
                        max_size: int) -> Term:
    s = random_term(rng.randrange(2 ** 30), rng.randint(2, max_size - 1), spec)
    if flavor is Flavor.CBV and not is_value(s):
        from .terms import Lam
        s = Lam(s, "v")  # dangling-free wrapper: any abstraction is a value
    return s
