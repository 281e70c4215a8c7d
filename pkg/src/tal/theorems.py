"""Agreement suites: independent characterizations of the same language
properties, run against corpora of random minimal DFAs."""

from __future__ import annotations

import random
from typing import Optional

from . import algebra
from .dfa import Dfa, minimize
from .formulas import Alphabet

_TOKENS = ("a", "b", "c")


def random_minimal_dfa(rng: random.Random, max_states: int = 5, max_alphabet: int = 3) -> Dfa:
    n = rng.randint(1, max_states)
    k = rng.randint(1, max_alphabet)
    alphabet = Alphabet(_TOKENS[:k])
    delta = tuple(
        tuple(rng.randrange(n) for _ in range(k)) for _ in range(n)
    )
    finals = frozenset(q for q in range(n) if rng.random() < 0.5)
    return minimize(Dfa(alphabet, n, 0, finals, delta))


def suffix_definite_oracle(d: Dfa) -> bool:
    """Direct check: membership depends only on a bounded-length suffix.

    Searches window sizes m up to 2^|Q| using the pair recurrence
    "some length-m word separates q and q'".
    """
    dm = minimize(d)
    n = dm.n_states
    na = len(dm.alphabet)
    bad = {
        (q, q2)
        for q in range(n)
        for q2 in range(n)
        if (q in dm.finals) != (q2 in dm.finals)
    }
    for _ in range(2**n + 1):
        if not bad:
            return True
        bad = {
            (q, q2)
            for q in range(n)
            for q2 in range(n)
            if any((dm.delta[q][a], dm.delta[q2][a]) in bad for a in range(na))
        }
    return not bad


def thm1_report(trials: int, seed: int) -> dict:
    """Definiteness three ways: right-zero idempotents, non-permutational
    transformations, bounded suffix search."""
    rng = random.Random(seed)
    disagreements = []
    for i in range(trials):
        dm = random_minimal_dfa(rng)
        a = algebra.is_definite(dm).holds
        b = algebra.is_nonpermutational(dm).holds
        c = suffix_definite_oracle(dm)
        if not (a == b == c):
            disagreements.append(
                {"trial": i, "right_zero": a, "nonpermutational": b, "suffix": c}
            )
    return {
        "name": "thm1",
        "trials": trials,
        "seed": seed,
        "agreements": trials - len(disagreements),
        "disagreements": disagreements,
        "ok": not disagreements,
    }


def thm2_report(trials: int, seed: int) -> dict:
    """Local R-triviality versus absence of the forbidden configuration."""
    rng = random.Random(seed)
    disagreements = []
    for i in range(trials):
        dm = random_minimal_dfa(rng)
        sg = algebra.transition_semigroup(dm)
        a = algebra.is_locally_r_trivial(sg).holds
        b = algebra.find_forbidden_config(dm) is None
        if a != b:
            disagreements.append(
                {"trial": i, "locally_r_trivial": a, "no_forbidden_config": b}
            )
    return {
        "name": "thm2",
        "trials": trials,
        "seed": seed,
        "agreements": trials - len(disagreements),
        "disagreements": disagreements,
        "ok": not disagreements,
    }
