"""Transition semigroups and the algebraic decision procedures:
definiteness, non-permutationality, local R-triviality, forbidden
configurations, and aperiodicity."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

from .dfa import Dfa, minimize
from .formulas import Word

DEFAULT_ELEMENT_BUDGET = 10**6

Transformation = tuple[int, ...]


class BudgetExceededError(Exception):
    """Semigroup closure exceeded the configured element budget."""


def element_budget() -> int:
    raw = os.environ.get("TAL_ELEMENT_BUDGET")
    return int(raw) if raw else DEFAULT_ELEMENT_BUDGET


def compose(s: Transformation, t: Transformation) -> Transformation:
    """Apply s first, then t (left-to-right string composition)."""
    return tuple(t[q] for q in s)


@dataclass(frozen=True)
class Semigroup:
    n_states: int
    elements: tuple[Transformation, ...]
    # parallel to elements: shortest word (BFS order) inducing each
    witnesses: tuple[Word, ...]
    generators: dict[str, int]

    def __len__(self) -> int:
        return len(self.elements)

    def index(self, t: Transformation) -> int:
        return self.elements.index(t)

    def witness(self, t: Transformation) -> Word:
        return self.witnesses[self.elements.index(t)]

    def table(self) -> list[list[int]]:
        """Full composition table; rows and columns index elements."""
        ix = {t: i for i, t in enumerate(self.elements)}
        return [
            [ix[compose(s, t)] for t in self.elements] for s in self.elements
        ]


def transition_semigroup(d: Dfa, budget: Optional[int] = None) -> Semigroup:
    """Closure of the per-token transformations under composition.

    Elements are discovered breadth-first by word length (then token
    order), so each element's witness is a shortest inducing word.
    """
    if budget is None:
        budget = element_budget()
    na = len(d.alphabet)
    gens = [
        tuple(d.delta[q][a] for q in range(d.n_states)) for a in range(na)
    ]
    index: dict[Transformation, int] = {}
    elements: list[Transformation] = []
    witnesses: list[Word] = []
    generators: dict[str, int] = {}
    for a, g in enumerate(gens):
        if g not in index:
            index[g] = len(elements)
            elements.append(g)
            witnesses.append((d.alphabet.tokens[a],))
        generators[d.alphabet.tokens[a]] = index[g]
    i = 0
    while i < len(elements):
        s = elements[i]
        w = witnesses[i]
        i += 1
        for a, g in enumerate(gens):
            t = compose(s, g)
            if t not in index:
                if len(elements) >= budget:
                    raise BudgetExceededError(
                        f"semigroup closure exceeded {budget} elements"
                    )
                index[t] = len(elements)
                elements.append(t)
                witnesses.append(w + (d.alphabet.tokens[a],))
    return Semigroup(d.n_states, tuple(elements), tuple(witnesses), generators)


def idempotents(s: Semigroup) -> list[Transformation]:
    return [e for e in s.elements if compose(e, e) == e]


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.holds


def is_definite(d: Dfa, budget: Optional[int] = None) -> Verdict:
    """Right-zero test: every idempotent e must satisfy s*e = e for all s."""
    dm = minimize(d)
    sg = transition_semigroup(dm, budget)
    for e in idempotents(sg):
        for s in sg.elements:
            if compose(s, e) != e:
                return Verdict(
                    False,
                    {
                        "s_word": list(sg.witness(s)),
                        "e_word": list(sg.witness(e)),
                    },
                )
    return Verdict(True)


def _cyclic_points(t: Transformation) -> list[int]:
    """States lying on a cycle of the functional graph of t."""
    n = len(t)
    out = []
    for q in range(n):
        # iterate n steps to land inside the eventual cycle
        x = q
        for _ in range(n):
            x = t[x]
        # q is cyclic iff it is reachable from the cycle point x
        y = x
        cyclic = False
        for _ in range(n):
            if y == q:
                cyclic = True
                break
            y = t[y]
        if cyclic:
            out.append(q)
    return out


def is_nonpermutational(d: Dfa, budget: Optional[int] = None) -> Verdict:
    """No induced transformation may act as a bijection on >= 2 states."""
    dm = minimize(d)
    sg = transition_semigroup(dm, budget)
    for t in sg.elements:
        cyc = _cyclic_points(t)
        if len(cyc) >= 2:
            return Verdict(
                False, {"word": list(sg.witness(t)), "states": cyc}
            )
    return Verdict(True)


def is_locally_r_trivial(s: Semigroup) -> Verdict:
    """Each local monoid e*S*e (with identity e) must have trivial Green's R.

    Two elements are R-related iff their principal right ideals within the
    local monoid coincide; triviality means distinct elements always have
    distinct ideals.
    """
    for e in idempotents(s):
        local: dict[Transformation, None] = {e: None}
        for t in s.elements:
            local[compose(e, compose(t, e))] = None
        members = list(local)
        ideals: dict[frozenset[Transformation], Transformation] = {}
        for x in members:
            ideal = frozenset(compose(x, m) for m in members)
            prev = ideals.get(ideal)
            if prev is not None:
                return Verdict(
                    False,
                    {
                        "e_word": list(s.witness(e)),
                        "x_word": list(s.witness(prev)),
                        "y_word": list(s.witness(x)),
                    },
                )
            ideals[ideal] = x
    return Verdict(True)


@dataclass(frozen=True)
class ConfigWitness:
    q: int
    q2: int
    u: Word
    v: Word
    x: Word


def _shortest_paths_from(d: Dfa, src: int) -> dict[int, Word]:
    """Shortest non-empty word from src to each reachable state."""
    na = len(d.alphabet)
    dist: dict[int, Word] = {}
    queue: list[tuple[int, Word]] = []
    for a in range(na):
        nq = d.delta[src][a]
        if nq not in dist:
            dist[nq] = (d.alphabet.tokens[a],)
            queue.append((nq, dist[nq]))
    i = 0
    while i < len(queue):
        q, w = queue[i]
        i += 1
        for a in range(na):
            nq = d.delta[q][a]
            if nq not in dist:
                dist[nq] = w + (d.alphabet.tokens[a],)
                queue.append((nq, dist[nq]))
    return dist


def find_forbidden_config(d: Dfa, budget: Optional[int] = None) -> Optional[ConfigWitness]:
    """Search for q != q' mutually reachable and both fixed by a common word."""
    dm = minimize(d)
    sg = transition_semigroup(dm, budget)
    paths = [_shortest_paths_from(dm, q) for q in range(dm.n_states)]
    for t_ix, t in enumerate(sg.elements):
        fixed = [q for q in range(dm.n_states) if t[q] == q]
        for i in range(len(fixed)):
            for j in range(i + 1, len(fixed)):
                q, q2 = fixed[i], fixed[j]
                if q2 in paths[q] and q in paths[q2]:
                    return ConfigWitness(
                        q, q2, paths[q][q2], paths[q2][q], sg.witnesses[t_ix]
                    )
    return None


def is_aperiodic(s: Semigroup) -> Verdict:
    """Every element's power sequence must stabilize at a fixed point."""
    for t in s.elements:
        seen = {t: 0}
        cur = t
        step = 0
        while True:
            nxt = compose(cur, t)
            step += 1
            if nxt == cur:
                break
            if nxt in seen:
                return Verdict(False, {"word": list(s.witness(t))})
            seen[nxt] = step
            cur = nxt
    return Verdict(True)
