"""Parser and printer for the ASCII formula grammar."""

import pytest

from tal import (
    Alphabet,
    And,
    Atom,
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
    format_formula,
    parse_formula,
)
from tal.syntax import ParseError

AB = Alphabet.of("a", "b")


class TestParse:
    def test_atoms_and_constants(self):
        assert parse_formula("a", AB) == Atom("a")
        assert parse_formula("true", AB) == Top()

    def test_precedence_not_binds_tightest(self):
        assert parse_formula("!a & b", AB) == And(Not(Atom("a")), Atom("b"))

    def test_precedence_and_over_or(self):
        assert parse_formula("a | b & a", AB) == Or(
            Atom("a"), And(Atom("b"), Atom("a"))
        )

    def test_since_lowest_and_right_associative(self):
        f = parse_formula("a S b S a", AB)
        assert f == Since(Atom("a"), Since(Atom("b"), Atom("a")))
        g = parse_formula("a & b S a", AB)
        assert g == Since(And(Atom("a"), Atom("b")), Atom("a"))

    def test_unary_operators(self):
        assert parse_formula("Y a", AB) == Yesterday(Atom("a"))
        assert parse_formula("Y^3 a", AB) == YesterdayBounded(3, Atom("a"))
        assert parse_formula("Ystar a", AB) == YesterdayStar(Atom("a"))
        assert parse_formula("P a", AB) == Past(Atom("a"))
        assert parse_formula("a U b", AB) == Until(Atom("a"), Atom("b"))

    def test_unary_chains(self):
        assert parse_formula("Y Y a", AB) == Yesterday(Yesterday(Atom("a")))
        assert parse_formula("!Y a", AB) == Not(Yesterday(Atom("a")))

    def test_mod(self):
        assert parse_formula("MOD(3,1)", AB) == Mod(3, 1)

    def test_mod_residue_reduced(self):
        assert parse_formula("MOD(2,5)", AB) == parse_formula("MOD(2,1)", AB)

    def test_parens(self):
        assert parse_formula("Y (a & b)", AB) == Yesterday(And(Atom("a"), Atom("b")))

    def test_whitespace_insignificant(self):
        assert parse_formula(" Y  ( a&b ) ", AB) == parse_formula("Y(a&b)", AB)


class TestParseErrors:
    @pytest.mark.parametrize(
        "text",
        [
            "",
            "c",  # not in the alphabet
            "a &",
            "(a",
            "a b",
            "Y^0 a",
            "MOD(0,1)",
            "MOD(2)",
            "P",
            "true true",
            "@",
        ],
    )
    def test_rejects(self, text):
        with pytest.raises(ParseError):
            parse_formula(text, AB)

    def test_error_carries_position(self):
        with pytest.raises(ParseError) as exc:
            parse_formula("a &\n @", AB)
        assert exc.value.line == 2
        assert "line 2" in str(exc.value)

    def test_keyword_not_usable_as_atom(self):
        abp = Alphabet.of("a", "b")
        with pytest.raises(ParseError):
            parse_formula("true & P", abp)


class TestFormat:
    @pytest.mark.parametrize(
        "text",
        [
            "a",
            "true",
            "false",
            "!a",
            "a & b",
            "a | (b & a)",
            "Y a",
            "Y^4 (a & b)",
            "Ystar a",
            "P (a & (!(P true)))",
            "a S b",
            "(Y a) U (b S a)",
            "MOD(3,2)",
        ],
    )
    def test_round_trip(self, text):
        f = parse_formula(text, AB)
        assert parse_formula(format_formula(f), AB) == f

    def test_canonical_output_frozen(self):
        f = parse_formula("P(a&!P true)", AB)
        assert format_formula(f) == "P (a & (!(P true)))"
