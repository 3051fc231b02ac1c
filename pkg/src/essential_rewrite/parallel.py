"""Indexed parallel reduction as explicit derivation trees.

A parallel step contracts a chosen set of redexes of its source term
simultaneously.  Steps are driven by explicit redex selections (any subset of
the source's redex positions), which makes enumeration, equality and index
recomputation deterministic.

Three flavours share the tree shape and differ in the index decoration:

* CBN / CBV: the index counts a canonical sequentialization of the step, so 0
  is the identity, 1 is exactly one base step, and a redex node costs the body
  steps, the argument steps once per surviving binder occurrence, plus one.
* LEVELED: the index is the least level among the contracted redexes
  (infinite when nothing is contracted).
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable, Iterator

from .reductions import (
    Base,
    INFINITY,
    Level,
    SystemId,
    beta_redexes,
    betav_redexes,
    least_level,
)
from .terms import (
    App,
    BODY,
    Free,
    LEFT,
    Lam,
    Position,
    RIGHT,
    Term,
    bound_positions,
    count_bound,
    instantiate,
    is_neutral,
    is_value,
)


class Flavor(Enum):
    CBN = "cbn"
    CBV = "cbv"
    LEVELED = "leveled"


class Rule(Enum):
    VAR = "var"
    ABS = "abs"
    APP = "app"
    BETA = "beta"


class InvalidSelectionError(ValueError):
    pass


class NonValueError(InvalidSelectionError):
    """CBV requires values where it substitutes."""


class FlavorMismatchError(ValueError):
    pass


class ParDerivation:
    """One node of a parallel-step derivation.

    `children` is () for VAR, (body,) for ABS, (left, right) for APP and
    (body, argument) for BETA.  Sources and targets of inner nodes may carry
    dangling indices pointing at binders crossed higher in the tree.
    """

    __slots__ = ("flavor", "rule", "children", "source", "target", "index")

    def __init__(self, flavor: Flavor, rule: Rule, children: tuple,
                 source: Term, target: Term, index):
        self.flavor = flavor
        self.rule = rule
        self.children = children
        self.source = source
        self.target = target
        self.index = index

    def __repr__(self):
        return f"<{self.rule.value} {self.source!r} => {self.target!r} @ {self.index}>"

    def to_json(self):
        out = {
            "rule": self.rule.value,
            "flavor": self.flavor.value,
            "index": self.index.to_json() if isinstance(self.index, Level) else self.index,
            "children": [c.to_json() for c in self.children],
        }
        return out


def _leaf_index(flavor: Flavor):
    return INFINITY if flavor is Flavor.LEVELED else 0


def _var(flavor: Flavor, t: Term) -> ParDerivation:
    return ParDerivation(flavor, Rule.VAR, (), t, t, _leaf_index(flavor))


def _abs(flavor: Flavor, hint: str, child: ParDerivation) -> ParDerivation:
    return ParDerivation(
        flavor, Rule.ABS, (child,),
        Lam(child.source, hint), Lam(child.target, hint), child.index,
    )


def _app(flavor: Flavor, left: ParDerivation, right: ParDerivation) -> ParDerivation:
    if flavor is Flavor.LEVELED:
        index = min(left.index, right.index + 1)
    else:
        index = left.index + right.index
    return ParDerivation(
        flavor, Rule.APP, (left, right),
        App(left.source, right.source), App(left.target, right.target), index,
    )


def _beta(flavor: Flavor, hint: str, body: ParDerivation, arg: ParDerivation) -> ParDerivation:
    if flavor is Flavor.CBV and not is_value(arg.source):
        raise NonValueError("selected redex has a non-value argument")
    if flavor is Flavor.LEVELED:
        index = Level(0)
    else:
        index = body.index + count_bound(body.target) * arg.index + 1
    return ParDerivation(
        flavor, Rule.BETA, (body, arg),
        App(Lam(body.source, hint), arg.source),
        instantiate(body.target, arg.target),
        index,
    )


def derive(t: Term, selection: Iterable[Position], flavor: Flavor) -> ParDerivation:
    """The unique derivation from `t` contracting exactly `selection`.

    Raises InvalidSelectionError if a position is not a redex of the base
    reduction the flavour pairs with (beta for CBN/LEVELED, beta-v for CBV).
    """
    sel = frozenset(tuple(p) for p in selection)
    valid = set(beta_redexes(t) if flavor is not Flavor.CBV else betav_redexes(t))
    bad = sel - valid
    if bad:
        pos = sorted(bad)[0]
        if flavor is Flavor.CBV and pos in set(beta_redexes(t)):
            raise NonValueError(f"redex at {'.'.join(pos) or 'root'} has a non-value argument")
        raise InvalidSelectionError(f"{'.'.join(pos) or 'root'} is not a redex position")
    return _derive(t, sel, flavor)


def _derive(t: Term, sel: frozenset[Position], flavor: Flavor) -> ParDerivation:
    if not sel:
        return _congruence(t, flavor)
    if () in sel:
        body = _derive(t.fun.body, _strip(sel, (LEFT, BODY)), flavor)
        arg = _derive(t.arg, _strip(sel, (RIGHT,)), flavor)
        return _beta(flavor, t.fun.hint, body, arg)
    if isinstance(t, Lam):
        return _abs(flavor, t.hint, _derive(t.body, _strip(sel, (BODY,)), flavor))
    left = _derive(t.fun, _strip(sel, (LEFT,)), flavor)
    right = _derive(t.arg, _strip(sel, (RIGHT,)), flavor)
    return _app(flavor, left, right)


def _congruence(t: Term, flavor: Flavor) -> ParDerivation:
    """The identity derivation on t."""
    if isinstance(t, Lam):
        return _abs(flavor, t.hint, _congruence(t.body, flavor))
    if isinstance(t, App):
        return _app(flavor, _congruence(t.fun, flavor), _congruence(t.arg, flavor))
    return _var(flavor, t)


def _strip(sel: frozenset[Position], prefix: Position) -> frozenset[Position]:
    k = len(prefix)
    return frozenset(p[k:] for p in sel if p[:k] == prefix)


def identity_derivation(t: Term, flavor: Flavor) -> ParDerivation:
    return _congruence(t, flavor)


def selection_of(d: ParDerivation) -> frozenset[Position]:
    """The redex positions of the source that the derivation contracts."""
    out: set[Position] = set()
    _collect_selection(d, (), out)
    return frozenset(out)


def _collect_selection(d: ParDerivation, prefix: Position, out: set[Position]) -> None:
    if d.rule is Rule.ABS:
        _collect_selection(d.children[0], prefix + (BODY,), out)
    elif d.rule is Rule.APP:
        _collect_selection(d.children[0], prefix + (LEFT,), out)
        _collect_selection(d.children[1], prefix + (RIGHT,), out)
    elif d.rule is Rule.BETA:
        out.add(prefix)
        _collect_selection(d.children[0], prefix + (LEFT, BODY), out)
        _collect_selection(d.children[1], prefix + (RIGHT,), out)


def all_parallel_steps(t: Term, flavor: Flavor, cap: int = 2 ** 14) -> Iterator[ParDerivation]:
    """Every parallel step from t, as derivations, capped at `cap` of them.

    Selections are enumerated as bit masks over the redex list in traversal
    order, so the identity derivation comes first.
    """
    positions = beta_redexes(t) if flavor is not Flavor.CBV else betav_redexes(t)
    total = 1 << len(positions)
    for mask in range(min(total, cap)):
        sel = frozenset(p for i, p in enumerate(positions) if mask >> i & 1)
        yield _derive(t, sel, flavor)


def sequential_index(d: ParDerivation) -> int:
    """The CBN/CBV-style index of any derivation tree, whatever its flavour."""
    if d.rule is Rule.VAR:
        return 0
    if d.rule is Rule.ABS:
        return sequential_index(d.children[0])
    if d.rule is Rule.APP:
        return sequential_index(d.children[0]) + sequential_index(d.children[1])
    body, arg = d.children
    return sequential_index(body) + count_bound(body.target) * sequential_index(arg) + 1


def parallel_level(d: ParDerivation) -> Level:
    """The least level contracted by a LEVELED derivation."""
    if d.flavor is not Flavor.LEVELED:
        raise FlavorMismatchError("parallel_level needs a LEVELED derivation")
    return d.index


# ---------------------------------------------------------------------------
# Substitutivity


def subst_parallel(d1: ParDerivation, name: str, d2: ParDerivation,
                   flavor: Flavor) -> ParDerivation:
    """Combine a step on t with a step on s into a step on t[name := s].

    Every leaf of d1 standing on the free variable `name` is replaced by a
    copy of d2; the rest of the tree is rebuilt around it.  The resulting
    index is the substitutivity sum: d1's index plus d2's index once per
    occurrence of `name` in d1's target (the index suites verify this).
    """
    if flavor not in (Flavor.CBN, Flavor.CBV):
        raise FlavorMismatchError("substitutivity indexes exist for CBN and CBV only")
    if d1.flavor is not flavor or d2.flavor is not flavor:
        raise FlavorMismatchError(
            f"derivation flavours {d1.flavor.value}/{d2.flavor.value} do not match {flavor.value}")
    if flavor is Flavor.CBV and not is_value(d2.source):
        raise NonValueError("CBV substituends must be values")
    return _graft(d1, name, d2, flavor)


def _graft(d: ParDerivation, name: str, d2: ParDerivation, flavor: Flavor) -> ParDerivation:
    if d.rule is Rule.VAR:
        return d2 if d.source == Free(name) else d
    if d.rule is Rule.ABS:
        return _abs(flavor, d.source.hint, _graft(d.children[0], name, d2, flavor))
    left = _graft(d.children[0], name, d2, flavor)
    right = _graft(d.children[1], name, d2, flavor)
    if d.rule is Rule.APP:
        return _app(flavor, left, right)
    return _beta(flavor, d.source.fun.hint, left, right)


# ---------------------------------------------------------------------------
# Parallel-inessential recognizers


def is_parallel_inessential(d: ParDerivation, system: SystemId) -> bool:
    """Is the derivation an inessential parallel step of the given system?

    For head, weak CbV and leftmost-outermost this checks the derivation tree
    against the system's inessential congruence rules; for least-level it is
    the index predicate (infinite, or above the least level of the source).
    """
    _require_flavor(d, system)
    if system is SystemId.HEAD:
        return _ines_head(d)
    if system is SystemId.WEAK_CBV:
        return _ines_weak(d)
    if system is SystemId.LO:
        return _ines_lo(d)
    return d.index.is_infinite or d.index > least_level(d.source)


def _require_flavor(d: ParDerivation, system: SystemId) -> None:
    wanted = flavor_of(system)
    if d.flavor is not wanted:
        raise FlavorMismatchError(
            f"{system.value} expects {wanted.value} derivations, got {d.flavor.value}")


def flavor_of(system: SystemId) -> Flavor:
    if system is SystemId.WEAK_CBV:
        return Flavor.CBV
    if system is SystemId.LEAST_LEVEL:
        return Flavor.LEVELED
    return Flavor.CBN


def _ines_head(d: ParDerivation) -> bool:
    # never contracts the head redex: fine under an applied abstraction,
    # otherwise only the function side is constrained
    if d.rule is Rule.VAR:
        return True
    if d.rule is Rule.BETA:
        return False
    if d.rule is Rule.ABS:
        return _ines_head(d.children[0])
    left = d.children[0]
    return left.rule is Rule.ABS or _ines_head(left)


def _ines_weak(d: ParDerivation) -> bool:
    # contractions are free under abstractions; spines of applications must
    # themselves be inessential on both sides
    if d.rule is Rule.VAR or d.rule is Rule.ABS:
        return True
    if d.rule is Rule.BETA:
        return False
    return _ines_weak(d.children[0]) and _ines_weak(d.children[1])


def _ines_lo(d: ParDerivation) -> bool:
    if d.rule is Rule.VAR:
        return True
    if d.rule is Rule.BETA:
        return False
    if d.rule is Rule.ABS:
        return _ines_lo(d.children[0])
    left, right = d.children
    if left.rule is Rule.ABS:
        return True
    if is_neutral(left.source):
        # a neutral function side has no redexes, so the constraint moves right
        return _ines_lo(right)
    return _ines_lo(left)


# ---------------------------------------------------------------------------
# Sequentialization


def realize(d: ParDerivation) -> list[Position]:
    """Replay the derivation as single steps, innermost-first, left to right.

    Contracting the returned positions in order (on the evolving term) leads
    from d.source to d.target; the list length is the number of redexes the
    derivation contracts.
    """
    out: list[Position] = []
    _realize(d, (), out)
    return out


def _realize(d: ParDerivation, prefix: Position, out: list[Position]) -> None:
    if d.rule is Rule.ABS:
        _realize(d.children[0], prefix + (BODY,), out)
    elif d.rule is Rule.APP:
        _realize(d.children[0], prefix + (LEFT,), out)
        _realize(d.children[1], prefix + (RIGHT,), out)
    elif d.rule is Rule.BETA:
        _realize(d.children[0], prefix + (LEFT, BODY), out)
        _realize(d.children[1], prefix + (RIGHT,), out)
        out.append(prefix)


def sequentialize(d: ParDerivation) -> list[Position]:
    """Replay the derivation as exactly sequential_index(d) base steps.

    Each contracted redex fires first, then the body's steps happen in place,
    then the argument's steps run once under every surviving binder
    occurrence.  This is the sequentialization the CBN/CBV index counts, so
    the returned list has exactly that length (duplicated argument work and
    all), unlike `realize`, which fires each selected redex once.
    """
    out: list[Position] = []
    _sequentialize(d, (), out)
    return out


def _sequentialize(d: ParDerivation, prefix: Position, out: list[Position]) -> None:
    if d.rule is Rule.ABS:
        _sequentialize(d.children[0], prefix + (BODY,), out)
    elif d.rule is Rule.APP:
        _sequentialize(d.children[0], prefix + (LEFT,), out)
        _sequentialize(d.children[1], prefix + (RIGHT,), out)
    elif d.rule is Rule.BETA:
        body, arg = d.children
        out.append(prefix)
        # the contractum sits where the redex was, so body steps keep prefix
        _sequentialize(body, prefix, out)
        arg_steps: list[Position] = []
        _sequentialize(arg, (), arg_steps)
        for occurrence in bound_positions(body.target):
            out.extend(prefix + occurrence + q for q in arg_steps)


def base_of(flavor: Flavor) -> Base:
    return Base.BETAV if flavor is Flavor.CBV else Base.BETA
