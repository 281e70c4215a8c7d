"""Concrete syntax for formulas: a recursive-descent parser and a printer.

Grammar (lowest precedence first):

    formula := or_expr ( ("S" | "U") formula )?      # right-associative
    or_expr := and_expr ( "|" and_expr )*
    and_expr := unary ( "&" unary )*
    unary := ("!" | "Y" | "Y^<k>" | "Ystar" | "P") unary | primary
    primary := "true" | "false" | ident | "MOD" "(" int "," int ")" | "(" formula ")"

Atoms are bare identifiers drawn from the alphabet; whitespace is
insignificant. The printer emits a canonical form that parses back to a
structurally equal tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .formulas import (
    Alphabet,
    And,
    Atom,
    Bot,
    Formula,
    FormulaError,
    Mod,
    Not,
    Or,
    Past,
    Since,
    Top,
    Until,
    Yesterday,
    YesterdayBounded,
    YesterdayStar,
)

KEYWORDS = {"true", "false", "Y", "Ystar", "P", "S", "U", "MOD"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<ybound>Y\^\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<num>\d+)
  | (?P<sym>[!&|(),])
  | (?P<bad>.)
""",
    re.VERBOSE,
)


class ParseError(FormulaError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    column: int


def _lex(text: str) -> list[_Tok]:
    toks = []
    line, col = 1, 1
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        s = m.group()
        if kind == "bad":
            raise ParseError(f"unexpected character {s!r}", line, col)
        if kind != "ws":
            toks.append(_Tok(kind, s, line, col))
        for c in s:
            if c == "\n":
                line += 1
                col = 1
            else:
                col += 1
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str, alphabet: Alphabet):
        self.toks = _lex(text)
        self.pos = 0
        self.alphabet = alphabet

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.next()
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.line, t.column)
        return t

    def formula(self) -> Formula:
        left = self.or_expr()
        t = self.peek()
        if t.kind == "ident" and t.text in ("S", "U"):
            self.next()
            right = self.formula()
            return Since(left, right) if t.text == "S" else Until(left, right)
        return left

    def or_expr(self) -> Formula:
        f = self.and_expr()
        while self.peek().text == "|":
            self.next()
            f = Or(f, self.and_expr())
        return f

    def and_expr(self) -> Formula:
        f = self.unary()
        while self.peek().text == "&":
            self.next()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        t = self.peek()
        if t.text == "!":
            self.next()
            return Not(self.unary())
        if t.kind == "ybound":
            self.next()
            k = int(t.text[2:])
            if k < 1:
                raise ParseError("Y^k requires k >= 1", t.line, t.column)
            return YesterdayBounded(k, self.unary())
        if t.kind == "ident" and t.text in ("Y", "Ystar", "P"):
            self.next()
            child = self.unary()
            if t.text == "Y":
                return Yesterday(child)
            if t.text == "Ystar":
                return YesterdayStar(child)
            return Past(child)
        return self.primary()

    def primary(self) -> Formula:
        t = self.next()
        if t.text == "(":
            f = self.formula()
            self.expect(")")
            return f
        if t.text == "true":
            return Top()
        if t.text == "false":
            return Bot()
        if t.text == "MOD":
            self.expect("(")
            m_tok = self.next()
            if not m_tok.text.isdigit():
                raise ParseError("expected integer modulus", m_tok.line, m_tok.column)
            m = int(m_tok.text)
            if m < 1:
                raise ParseError("MOD requires m >= 1", m_tok.line, m_tok.column)
            self.expect(",")
            r_tok = self.next()
            if not r_tok.text.isdigit():
                raise ParseError("expected integer residue", r_tok.line, r_tok.column)
            self.expect(")")
            return Mod(m, int(r_tok.text))
        if t.kind == "ident":
            if t.text in KEYWORDS:
                raise ParseError(f"unexpected keyword {t.text!r}", t.line, t.column)
            if t.text not in self.alphabet:
                raise ParseError(f"unknown atom {t.text!r}", t.line, t.column)
            return Atom(t.text)
        raise ParseError(f"unexpected token {t.text or 'end of input'!r}", t.line, t.column)


def parse_formula(text: str, alphabet: Alphabet) -> Formula:
    p = _Parser(text, alphabet)
    f = p.formula()
    t = p.peek()
    if t.kind != "eof":
        raise ParseError(f"trailing input {t.text!r}", t.line, t.column)
    return f


def _wrap(f: Formula) -> str:
    if isinstance(f, (Top, Bot, Atom, Mod)):
        return format_formula(f)
    return f"({format_formula(f)})"


def format_formula(f: Formula) -> str:
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Atom):
        return f.token
    if isinstance(f, Mod):
        return f"MOD({f.m},{f.r})"
    if isinstance(f, Not):
        return f"!{_wrap(f.child)}"
    if isinstance(f, Yesterday):
        return f"Y {_wrap(f.child)}"
    if isinstance(f, YesterdayBounded):
        return f"Y^{f.k} {_wrap(f.child)}"
    if isinstance(f, YesterdayStar):
        return f"Ystar {_wrap(f.child)}"
    if isinstance(f, Past):
        return f"P {_wrap(f.child)}"
    if isinstance(f, And):
        return f"{_wrap(f.left)} & {_wrap(f.right)}"
    if isinstance(f, Or):
        return f"{_wrap(f.left)} | {_wrap(f.right)}"
    if isinstance(f, Since):
        return f"{_wrap(f.left)} S {_wrap(f.right)}"
    if isinstance(f, Until):
        return f"{_wrap(f.left)} U {_wrap(f.right)}"
    raise TypeError(f"not a formula node: {f!r}")
