"""Single-step relations: strategy steps, their complements, and levels."""

import random

import pytest

from essential_rewrite import (
    INFINITY,
    Level,
    alpha_eq,
    beta_redexes,
    betav_redexes,
    head_step,
    head_steps,
    least_level,
    level_indexed_steps,
    ll_steps,
    lo_step,
    lo_steps,
    neg_head_steps,
    neg_ll_steps,
    neg_lo_steps,
    neg_weak_steps,
    step_at,
    substitute,
    weak_cbv_steps,
)
from essential_rewrite.enumeration import EnumSpec, random_term
from essential_rewrite.reductions import Base, position_level
from essential_rewrite.terms import InvalidPositionError, is_normal
from conftest import OMEGA, p


class TestLevelArithmetic:
    def test_saturation(self):
        assert INFINITY + 1 == INFINITY

    def test_min_with_infinity_is_identity(self):
        assert min(Level(3), INFINITY) == Level(3)
        assert min(INFINITY, Level(0)) == Level(0)

    def test_total_order(self):
        assert Level(0) < Level(2) < INFINITY
        assert not INFINITY < INFINITY

    def test_repr(self):
        assert str(Level(4)) == "4" and str(INFINITY) == "inf"


class TestRedexEnumeration:
    def test_i_ii_has_root_and_arg(self):
        t = p(r"(\z.z) ((\z.z) (\z.z))")
        assert beta_redexes(t) == [(), ("R",)]

    def test_normal_term_has_none(self):
        assert beta_redexes(p(r"\x.x")) == []

    def test_omega_root_only(self):
        assert beta_redexes(p(OMEGA)) == [()]

    def test_betav_requires_value_argument(self):
        assert betav_redexes(p(r"(\x.x) (y y)")) == []

    def test_betav_value_argument(self):
        assert betav_redexes(p(r"(\x.x) (\y.y)")) == [()]

    def test_betav_inner_redex_only(self):
        t = p(r"(\x.x) ((\y.y) (\z.z))")
        assert betav_redexes(t) == [("R",)]

    def test_order_is_preorder(self, small_terms):
        # enumeration order is exactly sorted position order
        for t in small_terms[::5]:
            got = beta_redexes(t)
            assert got == sorted(got)

    def test_normality_is_redex_freeness(self, small_terms):
        for t in small_terms:
            assert is_normal(t) == (not beta_redexes(t))


class TestStepAt:
    def test_root_contraction(self):
        t = p(r"(\z.z) ((\z.z) (\z.z))")
        assert step_at(t, ()) == p(r"(\z.z) (\z.z)")

    def test_arg_contraction_same_reduct(self):
        # both redexes of I(II) coincidentally lead to the same term
        t = p(r"(\z.z) ((\z.z) (\z.z))")
        assert step_at(t, ("R",)) == step_at(t, ())

    def test_omega_reproduces_itself(self):
        omega = p(OMEGA)
        assert alpha_eq(step_at(omega, ()), omega)

    def test_invalid_position_rejected(self):
        with pytest.raises(InvalidPositionError):
            step_at(p("x y"), ())

    def test_betav_rejects_nonvalue_argument(self):
        with pytest.raises(InvalidPositionError):
            step_at(p(r"(\x.x) (y y)"), (), Base.BETAV)


class TestHead:
    def test_head_step_examples(self):
        assert head_step(p(r"(\z.z) (x ((\z.z) (\z.z)))")) == p(r"x ((\z.z) (\z.z))")
        assert head_step(p(r"x ((\z.z) (\z.z))")) is None
        assert head_step(p(r"\x.(\z.z) x")) == p(r"\x.x")

    def test_neg_head_examples(self):
        t = p(r"(\z.z) ((\z.z) (\z.z))")
        assert p(r"(\z.z) (\z.z)") in [u for _, u in neg_head_steps(t)]
        assert neg_head_steps(p("x")) == []
        t2 = p(r"(\x.(\z.z) (\z.z)) y")
        assert [u for _, u in neg_head_steps(t2)] == [p(r"(\x.\z.z) y")]

    def test_head_and_neg_head_can_meet(self):
        # the root and argument redexes of I(II) give the same reduct
        t = p(r"(\z.z) ((\z.z) (\z.z))")
        head_reduct = head_step(t)
        assert head_reduct in [u for _, u in neg_head_steps(t)]

    def test_complement_of_head_position(self, small_terms):
        # rule-derived non-head steps are exactly all redexes but the head one
        for t in small_terms:
            head = {s.position for s, _ in head_steps(t)}
            neg = {s.position for s, _ in neg_head_steps(t)}
            assert neg == set(beta_redexes(t)) - head


class TestWeakCbv:
    def test_root_value_step(self):
        assert [u for _, u in weak_cbv_steps(p(r"(\x.x) (\y.y)"))] == [p(r"\y.y")]

    def test_never_under_abstraction(self):
        assert weak_cbv_steps(p(r"\x.(\z.z) (\z.z)")) == []

    def test_nondeterministic_application(self):
        t = p(r"((\z.z) (\z.z)) ((\z.z) (\z.z))")
        reducts = [u for _, u in weak_cbv_steps(t)]
        assert len(reducts) == 2
        assert reducts[0] == p(r"(\z.z) ((\z.z) (\z.z))")
        assert reducts[1] == p(r"((\z.z) (\z.z)) (\z.z)")

    def test_neg_weak_examples(self):
        assert [u for _, u in neg_weak_steps(p(r"\x.(\y.y) (\z.z)"))] == [p(r"\x.\z.z")]
        assert neg_weak_steps(p("x")) == []
        t = p(r"(\x.(\y.y) (\z.z)) w")
        assert [u for _, u in neg_weak_steps(t)] == [p(r"(\x.\z.z) w")]

    def test_complement_of_weak_positions(self, small_terms):
        # weak steps fire exactly at binder-free positions of beta-v redexes
        for t in small_terms:
            weak = {s.position for s, _ in weak_cbv_steps(t)}
            neg = {s.position for s, _ in neg_weak_steps(t)}
            all_v = set(betav_redexes(t))
            assert weak == {q for q in all_v if "B" not in q}
            assert neg == all_v - weak


class TestLeftmostOutermost:
    def test_lo_examples(self):
        assert lo_step(p(r"x ((\z.z) y)")) == p("x y")
        t = p(r"x (x ((\z.z) (\z.z))) ((\z.z) (\z.z))")
        assert lo_step(t) == p(r"x (x (\z.z)) ((\z.z) (\z.z))")
        assert lo_step(p(r"(\x.(\z.z) (\z.z)) y")) == p(r"(\z.z) (\z.z)")

    def test_lo_absent_iff_normal(self, small_terms):
        for t in small_terms:
            assert (lo_step(t) is None) == is_normal(t)

    def test_lo_is_first_redex_in_traversal_order(self, small_terms):
        for t in small_terms:
            positions = beta_redexes(t)
            got = {s.position for s, _ in lo_steps(t)}
            assert got == ({positions[0]} if positions else set())

    def test_lo_not_left_substitutive(self):
        # the motivating counterexample: substituting a self-applying function
        # turns the leftmost redex into the root
        t = p(r"x ((\z.z) y)")
        assert lo_step(t) == p("x y")
        instance = substitute(t, "x", p(r"\z.z z"))
        assert lo_step(instance) == p(r"((\z.z) y) ((\z.z) y)")

    def test_neg_lo_examples(self):
        t = p(r"(\x.(\z.z) (\z.z)) y")
        assert p(r"(\x.\z.z) y") in [u for _, u in neg_lo_steps(t)]
        assert neg_lo_steps(p("x y")) == []
        t2 = p(r"x (x ((\z.z) (\z.z))) ((\z.z) (\z.z))")
        assert p(r"x (x ((\z.z) (\z.z))) (\z.z)") in [u for _, u in neg_lo_steps(t2)]

    def test_complement_of_lo_position(self, small_terms):
        for t in small_terms:
            lo = {s.position for s, _ in lo_steps(t)}
            neg = {s.position for s, _ in neg_lo_steps(t)}
            assert neg == set(beta_redexes(t)) - lo


class TestLeastLevel:
    def test_level_values(self):
        assert least_level(p("x")) == INFINITY
        assert least_level(p(r"(\x.(\z.z) (\z.z)) y")) == Level(0)
        assert least_level(p(r"x (x ((\z.z) (\z.z))) ((\z.z) (\z.z))")) == Level(1)

    def test_level_indexed_examples(self):
        t = p(r"(\x.(\z.z) (\z.z)) y")
        got = {(s.position, s.level) for s, _ in level_indexed_steps(t)}
        assert got == {((), Level(0)), (("L", "B"), Level(0))}
        t2 = p(r"x ((\z.z) (\z.z))")
        got2 = [(s.position, s.level) for s, _ in level_indexed_steps(t2)]
        assert got2 == [(("R",), Level(1))]
        assert level_indexed_steps(p("x")) == []

    def test_ll_steps_examples(self):
        t = p(r"(\x.(\z.z) (\z.z)) y")
        assert p(r"(\x.\z.z) y") in [u for _, u in ll_steps(t)]
        t2 = p(r"x (x ((\z.z) (\z.z))) ((\z.z) (\z.z))")
        assert [u for _, u in ll_steps(t2)] == [p(r"x (x ((\z.z) (\z.z))) (\z.z)")]
        assert p(r"x (x (\z.z)) ((\z.z) (\z.z))") in [u for _, u in neg_ll_steps(t2)]

    def test_both_empty_on_normal_terms(self):
        assert ll_steps(p("x y")) == [] and neg_ll_steps(p("x y")) == []

    def test_incomparable_with_lo(self):
        # one direction: a least-level step that is not the leftmost one
        t = p(r"(\x.(\z.z) (\z.z)) y")
        inner = p(r"(\x.\z.z) y")
        assert inner in [u for _, u in ll_steps(t)]
        assert not alpha_eq(lo_step(t), inner)
        # other direction: the leftmost step may sit above the least level
        t2 = p(r"x (x ((\z.z) (\z.z))) ((\z.z) (\z.z))")
        lo_reduct = lo_step(t2)
        assert lo_reduct in [u for _, u in neg_ll_steps(t2)]
        assert lo_reduct not in [u for _, u in ll_steps(t2)]

    def test_computational_meaning(self, small_terms):
        # the least level is the least level of an actual step
        for t in small_terms:
            levels = [s.level for s, _ in level_indexed_steps(t)]
            assert least_level(t) == (min(levels) if levels else INFINITY)

    def test_ll_fullness(self, small_terms):
        for t in small_terms:
            assert bool(ll_steps(t)) == (not is_normal(t))

    def test_monotonicity(self, small_terms):
        for t in small_terms:
            ll = least_level(t)
            for _, u in level_indexed_steps(t):
                assert least_level(u) >= ll

    def test_invariance_under_inessential(self, small_terms):
        for t in small_terms:
            ll = least_level(t)
            for _, u in neg_ll_steps(t):
                assert least_level(u) == ll

    def test_shape_preservation(self, small_terms):
        # a positive-level essential step cannot create a root abstraction
        from essential_rewrite.terms import Lam
        for t in small_terms:
            if isinstance(t, Lam) or least_level(t) <= Level(0):
                continue
            for _, u in ll_steps(t):
                assert not isinstance(u, Lam)

    def test_substitutivity_by_level(self):
        # a step keeps its level under substitution of a free variable
        rng = random.Random(11)
        spec = EnumSpec(max_size=9)
        checked = 0
        for i in range(300):
            t = random_term(rng.randrange(2 ** 30), rng.randint(4, 9), spec)
            s = random_term(rng.randrange(2 ** 30), rng.randint(1, 6), spec)
            for step, u in level_indexed_steps(t):
                t_sub = substitute(t, "x", s)
                u_sub = substitute(u, "x", s)
                assert alpha_eq(step_at(t_sub, step.position), u_sub)
                assert position_level(step.position) == step.level
                checked += 1
        assert checked > 100


class TestDecompositions:
    def test_each_base_step_classified_once(self, small_terms):
        # positions of beta (resp. beta-v) split between strategy and complement
        from collections import Counter
        pairs = [
            (beta_redexes, Base.BETA, head_steps, neg_head_steps),
            (beta_redexes, Base.BETA, lo_steps, neg_lo_steps),
            (beta_redexes, Base.BETA, ll_steps, neg_ll_steps),
            (betav_redexes, Base.BETAV, weak_cbv_steps, neg_weak_steps),
        ]
        for t in small_terms[::3]:
            for enum, base, ess, ines in pairs:
                whole = Counter((q, step_at(t, q, base)) for q in enum(t))
                parts = Counter((s.position, u) for s, u in ess(t))
                parts += Counter((s.position, u) for s, u in ines(t))
                assert whole == parts
