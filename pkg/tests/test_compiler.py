"""Formula-to-transformer compilation and the model/formula comparator."""

import pytest

from tal import Alphabet, FpFormat, parse_formula
from tal.classify import classify_formula
from tal.compiler import (
    CompileError,
    CompileParams,
    compile_formula,
    mask_census,
    verify_compiled,
)
from tal.formulas import accepts, operator_depth
from tal.transformer import model_run

AB = Alphabet.of("a", "b")


def compiled(text, alphabet=AB, params=CompileParams()):
    f = parse_formula(text, alphabet)
    return f, compile_formula(f, alphabet, params)


class TestStructure:
    @pytest.mark.parametrize(
        "text,layers",
        [
            ("a & !b", 1),  # purely boolean formulas still get one layer
            ("Y a", 1),
            ("Y (b & Y a)", 2),
            ("P (a & !P true)", 2),
            ("Y^3 (a & Y b)", 2),
        ],
    )
    def test_layer_count_is_operator_depth(self, text, layers):
        f, model = compiled(text)
        assert len(model.layers) == layers
        assert len(model.layers) == max(1, operator_depth(f))

    def test_mask_census_matches_requirement(self):
        for text in ["Y a", "P a", "P (b & Y a)", "Y^4 a", "a & b"]:
            f, model = compiled(text)
            census = mask_census(model)
            req = classify_formula(f)
            if req.pattern == "boolean-only":
                assert census == {"global_heads": 0, "local_heads": []}
            elif req.pattern == "local-only":
                assert census["global_heads"] == 0
                assert max(census["local_heads"]) == req.k
            elif req.pattern == "global-only":
                assert census["global_heads"] > 0
                assert census["local_heads"] == []
            else:
                assert census["global_heads"] > 0
                assert max(census["local_heads"]) == req.k

    def test_one_channel_per_subformula(self):
        f, model = compiled("(Y a) | (a & Y a)")
        # bias + {a, Y a, a & Y a, whole}
        assert model.d == 5


class TestRejections:
    @pytest.mark.parametrize("text", ["a S b", "a U b", "MOD(2,1)"])
    def test_uncompilable_operators(self, text):
        with pytest.raises(CompileError):
            compiled(text)

    def test_margin_check(self):
        params = CompileParams(score_gain=2.0)  # exp(2)/(exp(2)+10000) << 3/4
        with pytest.raises(CompileError):
            compiled("Y a", params=params)

    def test_channel_budget(self):
        params = CompileParams(max_channels=3)
        with pytest.raises(CompileError):
            compiled("Y (a & Y (b & Y a))", params=params)


class TestCorrectness:
    @pytest.mark.parametrize(
        "text",
        [
            "Y a",
            "Y (b & Y a)",
            "P a",
            "P (a & !P true)",
            "P (b & P a)",
            "P (b & Y a)",
            "Y^2 a",
            "Y^3 (a & Y b)",
            "Ystar (a & b)",
            "!Y a",
            "(Y a) | (P b)",
            "(!P true) | (Y b)",
            "a & Y a",
        ],
    )
    def test_exhaustive_short_strings(self, text):
        f, model = compiled(text)
        fp = FpFormat()
        for n in range(6):
            from itertools import product

            for w in product(AB.tokens, repeat=n):
                assert model_run(model, w, fp) == (1 if accepts(f, w) else 0), w

    def test_three_letter_alphabet(self):
        abc = Alphabet.of("a", "b", "c")
        f = parse_formula("P (b & Y a)", abc)
        model = compile_formula(f, abc)
        report = verify_compiled(model, f, 5, [40], 10, 0)
        assert report.ok, report.mismatches

    def test_long_strings(self):
        f, model = compiled("P (b & P a)")
        report = verify_compiled(model, f, 0, [100, 500], 5, 2)
        assert report.checked == 11
        assert report.ok


class TestVerifyReport:
    def test_counts(self):
        f, model = compiled("Y a")
        report = verify_compiled(model, f, 2, [10], 3, 0)
        # 1 + 2 + 4 exhaustive plus 3 spots
        assert report.checked == 10
        assert report.to_json() == {"checked": 10, "mismatches": [], "ok": True}

    def test_detects_a_broken_model(self):
        f, model = compiled("Y a")
        broken = compile_formula(parse_formula("Y b", AB), AB)
        report = verify_compiled(broken, f, 3, [], 0, 0)
        assert not report.ok
        assert report.mismatches
