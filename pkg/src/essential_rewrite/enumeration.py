"""Exhaustive and random generation of lambda terms.

The enumerator produces every alpha-distinct term up to a size bound, in a
deterministic size-then-structure order, over a fixed pool of free names.
Generated terms share subterm objects aggressively, which keeps the sweeps
used by the property checkers cheap.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator

from .terms import App, Free, Lam, Term, Var


@dataclass(frozen=True)
class EnumSpec:
    """What to enumerate: size bound, allowed free names, closedness."""

    max_size: int
    free_names: tuple[str, ...] = ("x", "y")
    closed_only: bool = False

    def pool(self) -> tuple[str, ...]:
        return () if self.closed_only else self.free_names


def enumerate_terms(spec: EnumSpec) -> Iterator[Term]:
    """All alpha-distinct terms of size <= spec.max_size, smaller sizes first."""
    if spec.max_size < 1:
        raise ValueError("max_size must be >= 1")
    memo: dict[tuple[int, int], list[Term]] = {}
    for n in range(1, spec.max_size + 1):
        yield from _exact(n, 0, spec.pool(), memo)


def count_terms(spec: EnumSpec) -> dict[int, int]:
    """Term counts by exact size, via the same recursion as the enumerator."""
    memo: dict[tuple[int, int], list[Term]] = {}
    return {n: len(_exact(n, 0, spec.pool(), memo)) for n in range(1, spec.max_size + 1)}


def _exact(n: int, depth: int, pool: tuple[str, ...], memo) -> list[Term]:
    key = (n, depth)
    cached = memo.get(key)
    if cached is not None:
        return cached
    out: list[Term] = []
    if n == 1:
        out.extend(Var(i) for i in range(depth))
        out.extend(Free(name) for name in pool)
    else:
        out.extend(Lam(body) for body in _exact(n - 1, depth + 1, pool, memo))
        for left_size in range(1, n - 1):
            rights = _exact(n - 1 - left_size, depth, pool, memo)
            for fun in _exact(left_size, depth, pool, memo):
                out.extend(App(fun, arg) for arg in rights)
    memo[key] = out
    return out


def random_term(seed: int, target_size: int, spec: EnumSpec | None = None) -> Term:
    """Reproducible pseudo-random term of exactly `target_size` nodes."""
    if spec is None:
        spec = EnumSpec(max_size=target_size)
    if target_size < 1:
        raise ValueError("target_size must be >= 1")
    if spec.closed_only and target_size < 2:
        raise ValueError("no closed term has size 1")
    rng = random.Random(seed)
    return _random(rng, target_size, 0, spec.pool())


def _random(rng: random.Random, n: int, depth: int, pool: tuple[str, ...]) -> Term:
    leaves = depth + len(pool)
    if n == 1:
        i = rng.randrange(leaves)
        return Var(i) if i < depth else Free(pool[i - depth])
    choices = []
    if n >= 2:
        choices.append("lam")
    # an application needs both sides buildable: size-1 sides need a leaf in scope
    if n >= 3 and (leaves > 0 or n >= 5):
        choices.append("app")
        choices.append("app")  # favour branching so terms are not lambda towers
    kind = rng.choice(choices)
    if kind == "lam":
        return Lam(_random(rng, n - 1, depth + 1, pool))
    lo = 1 if leaves > 0 else 2
    hi = n - 1 - lo
    left = rng.randint(lo, hi)
    return App(
        _random(rng, left, depth, pool),
        _random(rng, n - 1 - left, depth, pool),
    )
