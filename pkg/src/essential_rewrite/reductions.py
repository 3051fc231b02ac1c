"""Single-step reduction relations.

Plain beta and beta-value contraction with redex enumeration, the four
essential strategies (head, weak call-by-value, leftmost-outermost,
least-level) and their inessential complements, and level arithmetic.

Every enumerator returns steps sorted by position, which coincides with
leftmost-outermost traversal order, so step lists and traces are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .terms import (
    App,
    BODY,
    Free,
    InvalidPositionError,
    LEFT,
    Lam,
    Position,
    RIGHT,
    Term,
    Var,
    instantiate,
    is_neutral,
    is_value,
    subterm_at,
    replace_at,
)


class Base(Enum):
    """Which contraction rule applications fire under."""

    BETA = "beta"
    BETAV = "betav"


class SystemId(Enum):
    HEAD = "head"
    WEAK_CBV = "weak-cbv"
    LO = "lo"
    LEAST_LEVEL = "ll"


class StepKind(Enum):
    ESSENTIAL = "essential"
    INESSENTIAL = "inessential"
    PLAIN = "plain"


class Level:
    """A natural number or infinity, with saturating arithmetic (inf + 1 = inf)."""

    __slots__ = ("value",)

    def __init__(self, value: int | None = None):
        if value is not None and value < 0:
            raise ValueError("levels are naturals")
        self.value = value

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __add__(self, n: int) -> "Level":
        return self if self.value is None else Level(self.value + n)

    def __eq__(self, other):
        return isinstance(other, Level) and other.value == self.value

    def __lt__(self, other: "Level") -> bool:
        if self.value is None:
            return False
        if other.value is None:
            return True
        return self.value < other.value

    def __le__(self, other: "Level") -> bool:
        return self == other or self < other

    def __gt__(self, other: "Level") -> bool:
        return not self <= other

    def __ge__(self, other: "Level") -> bool:
        return not self < other

    def __hash__(self):
        return hash(("level", self.value))

    def __repr__(self):
        return "inf" if self.value is None else str(self.value)

    def to_json(self):
        return "inf" if self.value is None else self.value


INFINITY = Level(None)


@dataclass(frozen=True)
class Step:
    """One reduction step: where it fired, how it is classified, and (for the
    least-level system) the level of the contracted redex."""

    position: Position
    kind: StepKind
    level: Level | None = None

    def to_json(self):
        out = {"position": ".".join(self.position), "kind": self.kind.value}
        if self.level is not None:
            out["level"] = self.level.to_json()
        return out


# ---------------------------------------------------------------------------
# Redex enumeration and contraction


def beta_redexes(t: Term, prefix: Position = ()) -> list[Position]:
    """Positions of all beta-redexes, outermost-leftmost first."""
    out: list[Position] = []
    if isinstance(t, App):
        if isinstance(t.fun, Lam):
            out.append(prefix)
        out.extend(beta_redexes(t.fun, prefix + (LEFT,)))
        out.extend(beta_redexes(t.arg, prefix + (RIGHT,)))
    elif isinstance(t, Lam):
        out.extend(beta_redexes(t.body, prefix + (BODY,)))
    return out


def betav_redexes(t: Term, prefix: Position = ()) -> list[Position]:
    """Beta-redex positions whose argument is a value."""
    out: list[Position] = []
    if isinstance(t, App):
        if isinstance(t.fun, Lam) and is_value(t.arg):
            out.append(prefix)
        out.extend(betav_redexes(t.fun, prefix + (LEFT,)))
        out.extend(betav_redexes(t.arg, prefix + (RIGHT,)))
    elif isinstance(t, Lam):
        out.extend(betav_redexes(t.body, prefix + (BODY,)))
    return out


def redexes(t: Term, base: Base) -> list[Position]:
    return beta_redexes(t) if base is Base.BETA else betav_redexes(t)


def step_at(t: Term, pos: Position, base: Base = Base.BETA) -> Term:
    """Contract exactly the redex at `pos`."""
    sub = subterm_at(t, pos)
    if not (isinstance(sub, App) and isinstance(sub.fun, Lam)):
        raise InvalidPositionError(f"no redex at {'.'.join(pos) or 'root'}")
    if base is Base.BETAV and not is_value(sub.arg):
        raise InvalidPositionError(f"argument at {'.'.join(pos) or 'root'} is not a value")
    return replace_at(t, pos, instantiate(sub.fun.body, sub.arg))


def _sorted_steps(t: Term, positions, base: Base, kind: StepKind,
                  with_level: bool = False) -> list[tuple[Step, Term]]:
    out = []
    for pos in sorted(set(positions)):
        level = position_level(pos) if with_level else None
        out.append((Step(pos, kind, level), step_at(t, pos, base)))
    return out


# ---------------------------------------------------------------------------
# Head reduction


def _head_positions(t: Term, prefix: Position = ()) -> list[Position]:
    # root rule; application rule only when the function part is not an
    # abstraction; congruence under binders.
    if isinstance(t, App):
        if isinstance(t.fun, Lam):
            return [prefix]
        return _head_positions(t.fun, prefix + (LEFT,))
    if isinstance(t, Lam):
        return _head_positions(t.body, prefix + (BODY,))
    return []


def head_steps(t: Term) -> list[tuple[Step, Term]]:
    """All head steps (at most one, which the determinism suite verifies)."""
    return _sorted_steps(t, _head_positions(t), Base.BETA, StepKind.ESSENTIAL)


def head_step(t: Term) -> Optional[Term]:
    steps = head_steps(t)
    return steps[0][1] if steps else None


def _neg_head_positions(t: Term, prefix: Position = ()) -> set[Position]:
    out: set[Position] = set()
    if isinstance(t, App):
        if isinstance(t.fun, Lam):
            # any step inside the body of the applied abstraction
            out.update(prefix + (LEFT, BODY) + p for p in beta_redexes(t.fun.body))
        # any step inside an argument
        out.update(prefix + (RIGHT,) + p for p in beta_redexes(t.arg))
        # congruence on the function side
        out.update(prefix + (LEFT,) + p for p in _neg_head_positions(t.fun))
    elif isinstance(t, Lam):
        out.update(prefix + (BODY,) + p for p in _neg_head_positions(t.body))
    return out


def neg_head_steps(t: Term) -> list[tuple[Step, Term]]:
    """All one-step non-head reducts, deduplicated by position."""
    return _sorted_steps(t, _neg_head_positions(t), Base.BETA, StepKind.INESSENTIAL)


# ---------------------------------------------------------------------------
# Weak call-by-value reduction


def _weak_positions(t: Term, prefix: Position = ()) -> list[Position]:
    out: list[Position] = []
    if isinstance(t, App):
        if isinstance(t.fun, Lam) and is_value(t.arg):
            out.append(prefix)
        out.extend(_weak_positions(t.fun, prefix + (LEFT,)))
        out.extend(_weak_positions(t.arg, prefix + (RIGHT,)))
    # never under an abstraction
    return out


def weak_cbv_steps(t: Term) -> list[tuple[Step, Term]]:
    """All weak CbV steps; non-deterministic across application sides."""
    return _sorted_steps(t, _weak_positions(t), Base.BETAV, StepKind.ESSENTIAL)


def _neg_weak_positions(t: Term, prefix: Position = ()) -> set[Position]:
    out: set[Position] = set()
    if isinstance(t, Lam):
        # any beta-v step inside a function body
        out.update(prefix + (BODY,) + p for p in betav_redexes(t.body))
    elif isinstance(t, App):
        out.update(_neg_weak_positions(t.fun, prefix + (LEFT,)))
        out.update(_neg_weak_positions(t.arg, prefix + (RIGHT,)))
    return out


def neg_weak_steps(t: Term) -> list[tuple[Step, Term]]:
    return _sorted_steps(t, _neg_weak_positions(t), Base.BETAV, StepKind.INESSENTIAL)


# ---------------------------------------------------------------------------
# Leftmost-outermost reduction


def _lo_positions(t: Term, prefix: Position = ()) -> list[Position]:
    if isinstance(t, App):
        if isinstance(t.fun, Lam):
            return [prefix]
        if not is_neutral(t.fun):
            return _lo_positions(t.fun, prefix + (LEFT,))
        # function side is neutral: the step, if any, is on the argument side
        return _lo_positions(t.arg, prefix + (RIGHT,))
    if isinstance(t, Lam):
        return _lo_positions(t.body, prefix + (BODY,))
    return []


def lo_steps(t: Term) -> list[tuple[Step, Term]]:
    return _sorted_steps(t, _lo_positions(t), Base.BETA, StepKind.ESSENTIAL)


def lo_step(t: Term) -> Optional[Term]:
    steps = lo_steps(t)
    return steps[0][1] if steps else None


def _neg_lo_positions(t: Term, prefix: Position = ()) -> set[Position]:
    out: set[Position] = set()
    if isinstance(t, App):
        if isinstance(t.fun, Lam):
            out.update(prefix + (LEFT, BODY) + p for p in beta_redexes(t.fun.body))
        if not is_neutral(t.fun):
            out.update(prefix + (RIGHT,) + p for p in beta_redexes(t.arg))
        out.update(prefix + (LEFT,) + p for p in _neg_lo_positions(t.fun))
        out.update(prefix + (RIGHT,) + p for p in _neg_lo_positions(t.arg))
    elif isinstance(t, Lam):
        out.update(prefix + (BODY,) + p for p in _neg_lo_positions(t.body))
    return out


def neg_lo_steps(t: Term) -> list[tuple[Step, Term]]:
    return _sorted_steps(t, _neg_lo_positions(t), Base.BETA, StepKind.INESSENTIAL)


# ---------------------------------------------------------------------------
# Least-level reduction


def least_level(t: Term) -> Level:
    """Minimal number of argument-nestings containing a redex; inf if normal."""
    if isinstance(t, (Var, Free)):
        return INFINITY
    if isinstance(t, Lam):
        return least_level(t.body)
    if isinstance(t.fun, Lam):
        return Level(0)
    return min(least_level(t.fun), least_level(t.arg) + 1)


def position_level(pos: Position) -> Level:
    """Level of a redex: how many argument sides its position crosses."""
    return Level(sum(1 for tag in pos if tag == RIGHT))


def level_indexed_steps(t: Term) -> list[tuple[Step, Term]]:
    """Every beta-redex with its level, classified against least_level(t)."""
    ll = least_level(t)
    out = []
    for pos in beta_redexes(t):
        level = position_level(pos)
        kind = StepKind.ESSENTIAL if level == ll else StepKind.INESSENTIAL
        out.append((Step(pos, kind, level), step_at(t, pos, Base.BETA)))
    return out


def ll_steps(t: Term) -> list[tuple[Step, Term]]:
    """Steps firing a redex of least level."""
    return [(s, u) for (s, u) in level_indexed_steps(t) if s.kind is StepKind.ESSENTIAL]


def neg_ll_steps(t: Term) -> list[tuple[Step, Term]]:
    """Steps firing a redex strictly above the least level."""
    return [(s, u) for (s, u) in level_indexed_steps(t) if s.kind is StepKind.INESSENTIAL]
