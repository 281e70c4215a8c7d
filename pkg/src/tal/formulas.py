"""Past-time temporal logic: syntax trees, evaluation, and rewrites.

Formulas are immutable trees over an alphabet of atomic token predicates.
Positions are 1-based; a string of length N is evaluated at positions
1..N+1, where N+1 is the acceptance position just past the end.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class FormulaError(Exception):
    pass


class UnsupportedNodeError(FormulaError):
    """An operator not supported by the requested transformation."""


@dataclass(frozen=True)
class Alphabet:
    tokens: tuple[str, ...]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("alphabet must be non-empty")
        if len(set(self.tokens)) != len(self.tokens):
            raise ValueError("alphabet tokens must be distinct")
        for t in self.tokens:
            if not t or not t.isprintable() or any(c.isspace() for c in t):
                raise ValueError(f"bad alphabet token: {t!r}")

    @staticmethod
    def of(*tokens: str) -> "Alphabet":
        return Alphabet(tuple(tokens))

    def index(self, token: str) -> int:
        return self.tokens.index(token)

    def __contains__(self, token: str) -> bool:
        return token in self.tokens

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


Word = tuple[str, ...]


def as_word(w: Sequence[str] | str) -> Word:
    """Normalize a string (one char per token) or token sequence to a tuple."""
    if isinstance(w, str):
        return tuple(w)
    return tuple(w)


class Formula:
    """Base class; subclasses are frozen dataclasses compared structurally."""

    __slots__ = ()

    def children(self) -> tuple["Formula", ...]:
        return ()

    def __str__(self) -> str:
        from .syntax import format_formula

        return format_formula(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    token: str


@dataclass(frozen=True)
class Not(Formula):
    child: Formula

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Yesterday(Formula):
    child: Formula

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class YesterdayBounded(Formula):
    """Disjunction of 1..k steps into the past (written Y^k)."""

    k: int
    child: Formula

    def __post_init__(self):
        if self.k < 1:
            raise FormulaError("Y^k requires k >= 1")

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class YesterdayStar(Formula):
    """Unbounded lookback; coincides with Past."""

    child: Formula

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Past(Formula):
    child: Formula

    def children(self):
        return (self.child,)


@dataclass(frozen=True)
class Since(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Mod(Formula):
    """Positional predicate: holds at position n iff n = r (mod m)."""

    m: int
    r: int

    def __post_init__(self):
        if self.m < 1:
            raise FormulaError("MOD requires m >= 1")
        object.__setattr__(self, "r", self.r % self.m)


def subformulas(f: Formula) -> list[Formula]:
    """Unique subformulas in bottom-up (children-first) order."""
    seen: dict[Formula, None] = {}

    def walk(g: Formula):
        if g in seen:
            return
        for c in g.children():
            walk(c)
        seen[g] = None

    walk(f)
    return list(seen)


def atoms(f: Formula) -> set[str]:
    return {g.token for g in subformulas(f) if isinstance(g, Atom)}


def operator_depth(f: Formula) -> int:
    if isinstance(f, (Top, Bot, Atom, Mod)):
        return 0
    if isinstance(f, Not):
        return operator_depth(f.child)
    if isinstance(f, (And, Or)):
        return max(operator_depth(f.left), operator_depth(f.right))
    if isinstance(f, (Yesterday, YesterdayBounded, YesterdayStar, Past)):
        return 1 + operator_depth(f.child)
    if isinstance(f, (Since, Until)):
        return 1 + max(operator_depth(f.left), operator_depth(f.right))
    raise TypeError(f"not a formula node: {f!r}")


def satisfaction_table(f: Formula, w: Sequence[str] | str) -> dict[Formula, list[bool]]:
    """Truth values of every subformula at positions 1..N+1.

    Returned lists are indexed by position (entry 0 is a dummy).
    """
    word = as_word(w)
    n_len = len(word)
    table: dict[Formula, list[bool]] = {}
    for g in subformulas(f):
        row = [False] * (n_len + 2)
        if isinstance(g, Top):
            for n in range(1, n_len + 2):
                row[n] = True
        elif isinstance(g, Bot):
            pass
        elif isinstance(g, Atom):
            for n in range(1, n_len + 1):
                row[n] = word[n - 1] == g.token
        elif isinstance(g, Mod):
            for n in range(1, n_len + 2):
                row[n] = n % g.m == g.r
        elif isinstance(g, Not):
            c = table[g.child]
            for n in range(1, n_len + 2):
                row[n] = not c[n]
        elif isinstance(g, And):
            a, b = table[g.left], table[g.right]
            for n in range(1, n_len + 2):
                row[n] = a[n] and b[n]
        elif isinstance(g, Or):
            a, b = table[g.left], table[g.right]
            for n in range(1, n_len + 2):
                row[n] = a[n] or b[n]
        elif isinstance(g, Yesterday):
            c = table[g.child]
            for n in range(2, n_len + 2):
                row[n] = c[n - 1]
        elif isinstance(g, YesterdayBounded):
            c = table[g.child]
            for n in range(2, n_len + 2):
                lo = max(1, n - g.k)
                row[n] = any(c[m] for m in range(lo, n))
        elif isinstance(g, (YesterdayStar, Past)):
            c = table[g.child]
            acc = False
            for n in range(2, n_len + 2):
                acc = acc or c[n - 1]
                row[n] = acc
        elif isinstance(g, Since):
            a, b = table[g.left], table[g.right]
            for n in range(2, n_len + 2):
                row[n] = b[n - 1] or (a[n - 1] and row[n - 1])
        elif isinstance(g, Until):
            a, b = table[g.left], table[g.right]
            for n in range(n_len, 0, -1):
                row[n] = b[n + 1] or (a[n + 1] and row[n + 1])
        else:
            raise TypeError(f"not a formula node: {g!r}")
        table[g] = row
    return table


def evaluate(f: Formula, w: Sequence[str] | str, position: int) -> bool:
    word = as_word(w)
    if not 1 <= position <= len(word) + 1:
        raise ValueError(f"position {position} outside [1, {len(word) + 1}]")
    return satisfaction_table(f, word)[f][position]


def accepts(f: Formula, w: Sequence[str] | str) -> bool:
    word = as_word(w)
    return satisfaction_table(f, word)[f][len(word) + 1]


def expand_bounded(f: Formula) -> Formula:
    """Eliminate Y^k (as a disjunction of nested Y chains) and Ystar (as P)."""
    if isinstance(f, (Top, Bot, Atom, Mod)):
        return f
    if isinstance(f, Not):
        return Not(expand_bounded(f.child))
    if isinstance(f, And):
        return And(expand_bounded(f.left), expand_bounded(f.right))
    if isinstance(f, Or):
        return Or(expand_bounded(f.left), expand_bounded(f.right))
    if isinstance(f, Yesterday):
        return Yesterday(expand_bounded(f.child))
    if isinstance(f, YesterdayBounded):
        child = expand_bounded(f.child)
        out: Formula | None = None
        for i in range(1, f.k + 1):
            term: Formula = child
            for _ in range(i):
                term = Yesterday(term)
            out = term if out is None else Or(out, term)
        assert out is not None
        return out
    if isinstance(f, YesterdayStar):
        return Past(expand_bounded(f.child))
    if isinstance(f, Past):
        return Past(expand_bounded(f.child))
    if isinstance(f, Since):
        return Since(expand_bounded(f.left), expand_bounded(f.right))
    if isinstance(f, Until):
        return Until(expand_bounded(f.left), expand_bounded(f.right))
    raise TypeError(f"not a formula node: {f!r}")


def rewrite_with_mod(f: Formula, k: int, m: int) -> Formula:
    """Replace each Y node by a residue-cased Y^k over positional predicates.

    Requires 2 <= k <= m and a formula built from booleans, atoms, Y, and P.
    """
    if not 2 <= k <= m:
        raise ValueError("requires 2 <= k <= m")

    def rec(g: Formula) -> Formula:
        if isinstance(g, (Top, Bot, Atom)):
            return g
        if isinstance(g, Not):
            return Not(rec(g.child))
        if isinstance(g, And):
            return And(rec(g.left), rec(g.right))
        if isinstance(g, Or):
            return Or(rec(g.left), rec(g.right))
        if isinstance(g, Past):
            return Past(rec(g.child))
        if isinstance(g, Yesterday):
            child = rec(g.child)
            out: Formula | None = None
            for i in range(1, m + 1):
                term: Formula = And(
                    Mod(m, i % m),
                    YesterdayBounded(k, And(Mod(m, (i - 1) % m), child)),
                )
                out = term if out is None else Or(out, term)
            assert out is not None
            return out
        raise UnsupportedNodeError(f"node not supported by mod rewrite: {g!r}")

    return rec(f)


def locally_testable_formula(kind: str, u: Sequence[str] | str, m: int) -> Formula:
    """Formula for a basic locally testable constraint of window size m.

    kind "factor": some length-m factor equals u (|u| = m).
    kind "prefix": the string starts with u (|u| = m-1).
    kind "suffix": the string ends with u (|u| = m-1).
    """
    word = as_word(u)
    if kind == "factor":
        if len(word) != m or m < 1:
            raise ValueError(f"factor requires |u| = m >= 1, got |u|={len(word)}, m={m}")
        chain: Formula = Atom(word[0])
        for t in word[1:]:
            chain = And(Atom(t), Yesterday(chain))
        return Past(chain)
    if kind == "prefix":
        if len(word) != m - 1 or m < 1:
            raise ValueError(f"prefix requires |u| = m-1, got |u|={len(word)}, m={m}")
        if m == 1:
            return Top()
        chain = And(Atom(word[0]), Not(Past(Top())))
        for t in word[1:]:
            chain = And(Atom(t), Yesterday(chain))
        return Past(chain)
    if kind == "suffix":
        if len(word) != m - 1 or m < 1:
            raise ValueError(f"suffix requires |u| = m-1, got |u|={len(word)}, m={m}")
        if m == 1:
            return Top()
        chain = Atom(word[0])
        for t in word[1:]:
            chain = And(Atom(t), Yesterday(chain))
        return Yesterday(chain)
    raise ValueError(f"unknown kind: {kind!r}")
