"""DFA construction, minimization, equivalence, translation from
formulas, and slice counting/sampling.

Counting oracles below are brute-force enumerations written against the
language definitions, not against count_slice.
"""

import itertools
import random

import pytest

from tal import Alphabet, parse_formula
from tal.dfa import (
    Dfa,
    complement,
    count_slice,
    dfa_from_json,
    dfa_to_json,
    equivalent,
    ltl_to_dfa,
    make_dfa,
    minimize,
    run,
    sample_slice,
)
from tal.formulas import UnsupportedNodeError, accepts

AB = Alphabet.of("a", "b")


def ends_a():
    return make_dfa(AB, 2, 0, [1], {0: {"a": 1, "b": 0}, 1: {"a": 1, "b": 0}})


def words_of(alphabet, n):
    return itertools.product(alphabet.tokens, repeat=n)


class TestRun:
    def test_accepts_and_trace(self):
        d = ends_a()
        r = run(d, "aba")
        assert r.accepted is True
        assert r.trace == (0, 1, 0, 1)
        assert run(d, "").accepted is False

    def test_rejects_unknown_token(self):
        with pytest.raises(ValueError):
            run(ends_a(), "ac")


class TestMakeDfa:
    def test_completes_partial_automata_with_sink(self):
        d = make_dfa(AB, 2, 0, [0], {0: {"a": 1}, 1: {"b": 0}})
        assert d.completed_with_sink is True
        assert d.n_states == 3
        assert run(d, "ab").accepted is True
        assert run(d, "b").accepted is False
        assert run(d, "ba").accepted is False

    def test_total_automata_untouched(self):
        d = ends_a()
        assert d.completed_with_sink is False
        assert d.n_states == 2

    def test_validates_states(self):
        with pytest.raises(ValueError):
            make_dfa(AB, 2, 5, [0], {0: {"a": 0, "b": 0}, 1: {"a": 0, "b": 0}})


class TestMinimize:
    def test_merges_equivalent_states(self):
        # states 1 and 2 behave identically
        d = make_dfa(
            AB,
            3,
            0,
            [1, 2],
            {
                0: {"a": 1, "b": 2},
                1: {"a": 1, "b": 0},
                2: {"a": 2, "b": 0},
            },
        )
        m = minimize(d)
        assert m.n_states == 2
        eq, _ = equivalent(m, d)
        assert eq

    def test_drops_unreachable_states(self):
        d = make_dfa(
            AB,
            3,
            0,
            [0],
            {
                0: {"a": 0, "b": 0},
                1: {"a": 2, "b": 2},
                2: {"a": 1, "b": 1},
            },
        )
        assert minimize(d).n_states == 1

    def test_canonical_numbering_is_deterministic(self):
        d = ends_a()
        m1, m2 = minimize(d), minimize(d)
        assert m1.delta == m2.delta and m1.finals == m2.finals
        assert m1.init == 0

    def test_empty_language(self):
        d = make_dfa(AB, 1, 0, [], {0: {"a": 0, "b": 0}})
        assert minimize(d).n_states == 1
        assert minimize(d).finals == frozenset()


class TestEquivalent:
    def test_equal_languages(self):
        eq, cex = equivalent(ends_a(), minimize(ends_a()))
        assert eq and cex is None

    def test_shortest_counterexample(self):
        d1 = ends_a()
        d2 = complement(ends_a())
        eq, cex = equivalent(d1, d2)
        assert not eq
        assert cex == ()

    def test_counterexample_distinguishes(self):
        # ends with a versus contains a
        d1 = ends_a()
        d2 = make_dfa(AB, 2, 0, [1], {0: {"a": 1, "b": 0}, 1: {"a": 1, "b": 1}})
        eq, cex = equivalent(d1, d2)
        assert not eq
        assert cex == ("a", "b")
        assert run(d1, cex).accepted != run(d2, cex).accepted

    def test_alphabet_mismatch(self):
        abc = Alphabet.of("a", "b", "c")
        d = make_dfa(abc, 1, 0, [0], {0: {"a": 0, "b": 0, "c": 0}})
        with pytest.raises(ValueError):
            equivalent(ends_a(), d)


class TestComplement:
    def test_flips_membership(self):
        d = ends_a()
        c = complement(d)
        for n in range(5):
            for w in words_of(AB, n):
                assert run(d, w).accepted != run(c, w).accepted


class TestLtlToDfa:
    @pytest.mark.parametrize(
        "text",
        [
            "Y a",
            "P (a & !P true)",
            "Y (b & Y a)",
            "a S b",
            "Y^3 a",
            "Ystar (a & Y b)",
            "MOD(2,0) & Y a",
            "(a S b) | P (b & Y a)",
        ],
    )
    def test_matches_direct_evaluation(self, text):
        f = parse_formula(text, AB)
        d = ltl_to_dfa(f, AB)
        for n in range(7):
            for w in words_of(AB, n):
                assert run(d, w).accepted == accepts(f, w), w

    def test_rejects_until(self):
        with pytest.raises(UnsupportedNodeError):
            ltl_to_dfa(parse_formula("a U b", AB), AB)


class TestCountSlice:
    def test_brute_force_oracle(self):
        d = make_dfa(
            Alphabet.of("a", "b", "c"),
            3,
            0,
            [2],
            {
                0: {"a": 1, "b": 0, "c": 0},
                1: {"a": 1, "b": 2, "c": 1},
                2: {"a": 2, "b": 2, "c": 2},
            },
        )
        for n in range(7):
            want = sum(1 for w in words_of(d.alphabet, n) if run(d, w).accepted)
            assert count_slice(d, n) == want

    def test_frozen_values(self):
        # "ends with a" doubles each length; alternation language is thin
        assert [count_slice(ends_a(), n) for n in range(7)] == [0, 1, 2, 4, 8, 16, 32]
        alt = make_dfa(
            AB,
            3,
            0,
            [0],
            {0: {"a": 1, "b": 2}, 1: {"a": 2, "b": 0}, 2: {"a": 2, "b": 2}},
        )
        assert [count_slice(alt, n) for n in range(7)] == [1, 0, 1, 0, 1, 0, 1]


class TestSampleSlice:
    def test_samples_lie_in_slice(self):
        d = ends_a()
        rng = random.Random(5)
        for _ in range(50):
            w = sample_slice(d, 4, rng)
            assert len(w) == 4
            assert run(d, w).accepted

    def test_empty_slice_raises(self):
        with pytest.raises(ValueError):
            sample_slice(ends_a(), 0, random.Random(0))

    def test_seed_reproducible(self):
        a = [sample_slice(ends_a(), 5, 9) for _ in range(5)]
        b = [sample_slice(ends_a(), 5, 9) for _ in range(5)]
        assert a == b


class TestJson:
    def test_round_trip(self):
        d = ends_a()
        d2 = dfa_from_json(dfa_to_json(d))
        eq, _ = equivalent(d, d2)
        assert eq
        assert d2.alphabet.tokens == d.alphabet.tokens

    def test_partial_json_completed(self):
        payload = {
            "alphabet": ["a", "b"],
            "states": 1,
            "init": 0,
            "finals": [0],
            "delta": {"0": {"a": 0}},
        }
        d = dfa_from_json(payload)
        assert run(d, "aaa").accepted is True
        assert run(d, "ab").accepted is False
