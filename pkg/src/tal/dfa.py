"""Complete DFAs: runs, minimization, equivalence, formula compilation,
and exact uniform sampling from length slices."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from math import lcm
from typing import Optional, Sequence

from .formulas import (
    Alphabet,
    And,
    Atom,
    Bot,
    Formula,
    Mod,
    Not,
    Or,
    Past,
    Since,
    Top,
    Until,
    UnsupportedNodeError,
    Word,
    Yesterday,
    as_word,
    expand_bounded,
    subformulas,
)


@dataclass(frozen=True)
class Dfa:
    alphabet: Alphabet
    n_states: int
    init: int
    finals: frozenset[int]
    # delta[state][token_index] -> state
    delta: tuple[tuple[int, ...], ...]
    completed_with_sink: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not 0 <= self.init < self.n_states:
            raise ValueError("init out of range")
        if any(not 0 <= q < self.n_states for q in self.finals):
            raise ValueError("final state out of range")
        if len(self.delta) != self.n_states:
            raise ValueError("delta must cover every state")
        for row in self.delta:
            if len(row) != len(self.alphabet):
                raise ValueError("delta must cover every token")
            if any(not 0 <= q < self.n_states for q in row):
                raise ValueError("delta target out of range")

    def step(self, q: int, token: str) -> int:
        return self.delta[q][self.alphabet.index(token)]


@dataclass(frozen=True)
class RunResult:
    accepted: bool
    trace: tuple[int, ...]


def run(d: Dfa, w: Sequence[str] | str) -> RunResult:
    word = as_word(w)
    idx = {t: i for i, t in enumerate(d.alphabet.tokens)}
    q = d.init
    trace = [q]
    for t in word:
        if t not in idx:
            raise ValueError(f"token {t!r} not in alphabet")
        q = d.delta[q][idx[t]]
        trace.append(q)
    return RunResult(q in d.finals, tuple(trace))


def make_dfa(
    alphabet: Alphabet,
    n_states: int,
    init: int,
    finals: Sequence[int],
    edges: dict[int, dict[str, int]],
) -> Dfa:
    """Build a Dfa from a partial edge map, adding a sink if incomplete."""
    complete = all(
        t in edges.get(q, {}) for q in range(n_states) for t in alphabet
    )
    total = n_states if complete else n_states + 1
    sink = n_states
    delta = []
    for q in range(total):
        row = []
        for t in alphabet:
            row.append(edges.get(q, {}).get(t, sink))
        delta.append(tuple(row))
    return Dfa(
        alphabet,
        total,
        init,
        frozenset(finals),
        tuple(delta),
        completed_with_sink=not complete,
    )


def complement(d: Dfa) -> Dfa:
    return Dfa(
        d.alphabet,
        d.n_states,
        d.init,
        frozenset(range(d.n_states)) - d.finals,
        d.delta,
    )


def _reachable(d: Dfa) -> list[int]:
    """States reachable from init, in BFS order with alphabet-ordered edges."""
    order = [d.init]
    seen = {d.init}
    i = 0
    while i < len(order):
        q = order[i]
        i += 1
        for nq in d.delta[q]:
            if nq not in seen:
                seen.add(nq)
                order.append(nq)
    return order


def minimize(d: Dfa) -> Dfa:
    """Moore partition refinement plus canonical BFS renumbering."""
    reach = _reachable(d)
    pos = {q: i for i, q in enumerate(reach)}
    n = len(reach)
    na = len(d.alphabet)
    delta = [[pos[d.delta[q][a]] for a in range(na)] for q in reach]
    finals = [pos[q] for q in reach if q in d.finals]

    block = [1 if q in set(finals) else 0 for q in range(n)]
    while True:
        sig = {}
        new_block = [0] * n
        for q in range(n):
            key = (block[q], tuple(block[delta[q][a]] for a in range(na)))
            if key not in sig:
                sig[key] = len(sig)
            new_block[q] = sig[key]
        if new_block == block:
            break
        block = new_block

    n_blocks = max(block) + 1
    rep = [0] * n_blocks
    for q in range(n - 1, -1, -1):
        rep[block[q]] = q
    b_init = block[pos[d.init]]
    b_delta = {b: [block[delta[rep[b]][a]] for a in range(na)] for b in range(n_blocks)}
    b_finals = {block[q] for q in finals}

    # canonical renumbering by BFS from the initial block
    order = [b_init]
    seen = {b_init}
    i = 0
    while i < len(order):
        b = order[i]
        i += 1
        for nb in b_delta[b]:
            if nb not in seen:
                seen.add(nb)
                order.append(nb)
    number = {b: i for i, b in enumerate(order)}
    out_delta = tuple(
        tuple(number[b_delta[b][a]] for a in range(na)) for b in order
    )
    out_finals = frozenset(number[b] for b in b_finals if b in number)
    return Dfa(d.alphabet, len(order), 0, out_finals, out_delta)


def equivalent(d1: Dfa, d2: Dfa) -> tuple[bool, Optional[Word]]:
    """Language equality; on failure returns a shortest distinguishing word."""
    if d1.alphabet != d2.alphabet:
        raise ValueError("alphabet mismatch")
    na = len(d1.alphabet)
    start = (d1.init, d2.init)
    seen = {start}
    queue: list[tuple[tuple[int, int], tuple[int, ...]]] = [(start, ())]
    i = 0
    while i < len(queue):
        (q1, q2), path = queue[i]
        i += 1
        if (q1 in d1.finals) != (q2 in d2.finals):
            return False, tuple(d1.alphabet.tokens[a] for a in path)
        for a in range(na):
            nxt = (d1.delta[q1][a], d2.delta[q2][a])
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, path + (a,)))
    return True, None


def ltl_to_dfa(f: Formula, alphabet: Alphabet) -> Dfa:
    """Compile a formula without Until to an equivalent complete DFA.

    A state is the truth assignment carried forward for each memoryful
    subformula (one latch per Y, P, and S node) together with a position
    counter modulo the lcm of all Mod moduli.
    """
    g = expand_bounded(f)
    subs = subformulas(g)
    if any(isinstance(s, Until) for s in subs):
        raise UnsupportedNodeError("U is not supported by DFA compilation")
    latches = [s for s in subs if isinstance(s, (Yesterday, Past, Since))]
    latch_ix = {s: i for i, s in enumerate(latches)}
    moduli = [s.m for s in subs if isinstance(s, Mod)]
    period = lcm(*moduli) if moduli else 1

    def values(hist: tuple[bool, ...], count: int, token: Optional[str]) -> dict[Formula, bool]:
        """Truth of every subformula at the current position.

        count is (position - 1) mod period; token None means the
        past-the-end acceptance position.
        """
        val: dict[Formula, bool] = {}
        for s in subs:
            if isinstance(s, Top):
                val[s] = True
            elif isinstance(s, Bot):
                val[s] = False
            elif isinstance(s, Atom):
                val[s] = token == s.token
            elif isinstance(s, Mod):
                val[s] = (count + 1) % s.m == s.r
            elif isinstance(s, Not):
                val[s] = not val[s.child]
            elif isinstance(s, And):
                val[s] = val[s.left] and val[s.right]
            elif isinstance(s, Or):
                val[s] = val[s.left] or val[s.right]
            elif isinstance(s, (Yesterday, Past, Since)):
                val[s] = hist[latch_ix[s]]
            else:
                raise UnsupportedNodeError(f"unsupported node: {s!r}")
        return val

    def advance(hist: tuple[bool, ...], val: dict[Formula, bool]) -> tuple[bool, ...]:
        out = list(hist)
        for s in latches:
            if isinstance(s, Yesterday):
                out[latch_ix[s]] = val[s.child]
            elif isinstance(s, Past):
                out[latch_ix[s]] = hist[latch_ix[s]] or val[s.child]
            else:
                out[latch_ix[s]] = val[s.right] or (val[s.left] and hist[latch_ix[s]])
        return tuple(out)

    init_state = (tuple([False] * len(latches)), 0)
    index = {init_state: 0}
    order = [init_state]
    delta_rows = []
    finals = []
    i = 0
    while i < len(order):
        hist, count = order[i]
        i += 1
        row = []
        for token in alphabet:
            val = values(hist, count, token)
            nxt = (advance(hist, val), (count + 1) % period)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row.append(index[nxt])
        delta_rows.append(tuple(row))
        if values(hist, count, None)[g]:
            finals.append(index[(hist, count)])
    return Dfa(alphabet, len(order), 0, frozenset(finals), tuple(delta_rows))


def count_slice(d: Dfa, n: int) -> int:
    """Number of accepted strings of length exactly n (exact integer)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    counts = [1 if q in d.finals else 0 for q in range(d.n_states)]
    for _ in range(n):
        counts = [sum(counts[nq] for nq in d.delta[q]) for q in range(d.n_states)]
    return counts[d.init]


def sample_slice(d: Dfa, n: int, seed: int | random.Random) -> Word:
    """Uniform draw from the accepted strings of length n, exact weights."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    # counts[j][q] = accepted completions of length j starting at q
    counts = [[1 if q in d.finals else 0 for q in range(d.n_states)]]
    for _ in range(n):
        prev = counts[-1]
        counts.append([sum(prev[nq] for nq in d.delta[q]) for q in range(d.n_states)])
    if counts[n][d.init] == 0:
        raise ValueError(f"empty slice at length {n}")
    q = d.init
    out = []
    for j in range(n, 0, -1):
        weights = [counts[j - 1][d.delta[q][a]] for a in range(len(d.alphabet))]
        r = rng.randrange(sum(weights))
        for a, wgt in enumerate(weights):
            if r < wgt:
                out.append(d.alphabet.tokens[a])
                q = d.delta[q][a]
                break
            r -= wgt
    return tuple(out)


def dfa_to_json(d: Dfa) -> dict:
    return {
        "alphabet": list(d.alphabet.tokens),
        "states": d.n_states,
        "init": d.init,
        "finals": sorted(d.finals),
        "delta": {
            str(q): {t: d.delta[q][a] for a, t in enumerate(d.alphabet.tokens)}
            for q in range(d.n_states)
        },
    }


def dfa_from_json(obj: dict) -> Dfa:
    alphabet = Alphabet(tuple(obj["alphabet"]))
    n = int(obj["states"])
    edges: dict[int, dict[str, int]] = {}
    for q_str, row in obj.get("delta", {}).items():
        q = int(q_str)
        if not 0 <= q < n:
            raise ValueError(f"state {q} out of range")
        edges[q] = {}
        for t, nq in row.items():
            if t not in alphabet:
                raise ValueError(f"token {t!r} not in alphabet")
            edges[q][t] = int(nq)
    return make_dfa(alphabet, n, int(obj["init"]), [int(x) for x in obj["finals"]], edges)


def load_dfa(path: str) -> Dfa:
    with open(path) as fh:
        return dfa_from_json(json.load(fh))
