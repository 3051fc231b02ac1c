"""Shared helpers for the test suite."""

import pytest

from essential_rewrite import EnumSpec, enumerate_terms, parse

# the identity combinator, spelled out since the grammar has no constants
I = r"(\z.z)"
OMEGA = r"(\x.x x) (\x.x x)"


def p(text: str):
    return parse(text)


def terms_up_to(size: int, closed_only: bool = False):
    return list(enumerate_terms(EnumSpec(max_size=size, closed_only=closed_only)))


@pytest.fixture(scope="session")
def small_terms():
    """Every term of size <= 6 over free names {x, y}; includes closed terms."""
    return terms_up_to(6)
