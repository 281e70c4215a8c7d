"""Benchmark language registry and length-stratified dataset generation.

The registry holds eight regular languages grouped by the temporal-logic
fragment that defines them, each with a hand-built DFA and, where one
exists, a defining formula. Datasets are JSONL files: a manifest line
followed by one record per string, the sole contract consumed by the
training harness.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .dfa import Dfa, complement, count_slice, make_dfa, run, sample_slice
from .formulas import Alphabet, Formula, Word
from .syntax import parse_formula

GENERATOR_VERSION = "1"

AB = Alphabet.of("a", "b")
ABC = Alphabet.of("a", "b", "c")
ABCD = Alphabet.of("a", "b", "c", "d")


@dataclass(frozen=True)
class BenchmarkLanguage:
    id: str
    alphabet: Alphabet
    dfa: Dfa
    formula: Optional[Formula]
    fragment_class: str  # "LTL[Y]" | "LTL[P]" | "LTL[Y,P]-only" | "LTL[S]-only"
    ltl_p_definable: str  # curated: "yes" | "no"


def _ends_a() -> BenchmarkLanguage:
    d = make_dfa(AB, 2, 0, [1], {0: {"a": 1, "b": 0}, 1: {"a": 1, "b": 0}})
    return BenchmarkLanguage("ends-a", AB, d, parse_formula("Y a", AB), "LTL[Y]", "no")


def _ends_ab() -> BenchmarkLanguage:
    # states: 0 neither, 1 last token a, 2 last two tokens ab
    d = make_dfa(
        AB,
        3,
        0,
        [2],
        {
            0: {"a": 1, "b": 0},
            1: {"a": 1, "b": 2},
            2: {"a": 1, "b": 0},
        },
    )
    return BenchmarkLanguage(
        "ends-ab", AB, d, parse_formula("Y (b & Y a)", AB), "LTL[Y]", "no"
    )


def _starts_a() -> BenchmarkLanguage:
    # 0 initial, 1 accept-everything, 2 sink
    d = make_dfa(
        AB,
        3,
        0,
        [1],
        {
            0: {"a": 1, "b": 2},
            1: {"a": 1, "b": 1},
            2: {"a": 2, "b": 2},
        },
    )
    return BenchmarkLanguage(
        "starts-a", AB, d, parse_formula("P (a & !P true)", AB), "LTL[P]", "yes"
    )


def _subseq_ab() -> BenchmarkLanguage:
    # an a somewhere, later a b: 0 no a yet, 1 a seen, 2 done
    d = make_dfa(
        ABC,
        3,
        0,
        [2],
        {
            0: {"a": 1, "b": 0, "c": 0},
            1: {"a": 1, "b": 2, "c": 1},
            2: {"a": 2, "b": 2, "c": 2},
        },
    )
    return BenchmarkLanguage(
        "subseq-ab", ABC, d, parse_formula("P (b & P a)", ABC), "LTL[P]", "yes"
    )


def _alt_ab() -> BenchmarkLanguage:
    # repetitions of "ab": 0 accept/expect a, 1 expect b, 2 sink
    d = make_dfa(
        AB,
        3,
        0,
        [0],
        {
            0: {"a": 1, "b": 2},
            1: {"a": 2, "b": 0},
            2: {"a": 2, "b": 2},
        },
    )
    # empty, or: starts with a, ends with b, never two equal tokens in a row
    text = "(!P true) | ((Y b) & P (a & !P true) & !P (a & Y a) & !P (b & Y b))"
    return BenchmarkLanguage(
        "alt-ab", AB, d, parse_formula(text, AB), "LTL[Y,P]-only", "no"
    )


def _factor_ab() -> BenchmarkLanguage:
    # contains "ab" as a factor: 0 other, 1 last was a, 2 done
    d = make_dfa(
        ABC,
        3,
        0,
        [2],
        {
            0: {"a": 1, "b": 0, "c": 0},
            1: {"a": 1, "b": 2, "c": 0},
            2: {"a": 2, "b": 2, "c": 2},
        },
    )
    return BenchmarkLanguage(
        "factor-ab", ABC, d, parse_formula("P (b & Y a)", ABC), "LTL[Y,P]-only", "no"
    )


def _rdet_poly() -> BenchmarkLanguage:
    # {a,b,d}* a {c,d}*; state = (prefix c-free?, pivot found?)
    # 0 = (clean, no), 1 = (clean, yes), 2 = (dirty, yes), 3 = sink
    d = make_dfa(
        ABCD,
        4,
        0,
        [1, 2],
        {
            0: {"a": 1, "b": 0, "c": 3, "d": 0},
            1: {"a": 1, "b": 0, "c": 2, "d": 1},
            2: {"a": 3, "b": 3, "c": 2, "d": 2},
            3: {"a": 3, "b": 3, "c": 3, "d": 3},
        },
    )
    return BenchmarkLanguage(
        "rdet-poly",
        ABCD,
        d,
        parse_formula("(c | d) S (a & !P c)", ABCD),
        "LTL[S]-only",
        "no",
    )


def _dyck_depth_2() -> BenchmarkLanguage:
    # balanced a/b with nesting depth <= 2; partial automaton gets a sink
    d = make_dfa(
        AB,
        3,
        0,
        [0],
        {
            0: {"a": 1},
            1: {"a": 2, "b": 0},
            2: {"b": 1},
        },
    )
    return BenchmarkLanguage("dyck-depth-2", AB, d, None, "LTL[S]-only", "no")


REGISTRY: dict[str, BenchmarkLanguage] = {
    lang.id: lang
    for lang in (
        _ends_a(),
        _ends_ab(),
        _starts_a(),
        _subseq_ab(),
        _alt_ab(),
        _factor_ab(),
        _rdet_poly(),
        _dyck_depth_2(),
    )
}

_ALIASES = {
    "ends-with-a": "ends-a",
    "ends-with-ab": "ends-ab",
    "starts-with-a": "starts-a",
}


def get_benchmark(name: str) -> BenchmarkLanguage:
    key = _ALIASES.get(name, name)
    if key not in REGISTRY:
        raise KeyError(f"unknown benchmark: {name!r}")
    return REGISTRY[key]


@dataclass(frozen=True)
class DatasetRecord:
    s: str
    label: int
    len: int


@dataclass
class Manifest:
    language: str
    seed: int
    balance: str
    version: str = GENERATOR_VERSION
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "type": "manifest",
            "language": self.language,
            "seed": self.seed,
            "balance": self.balance,
            "version": self.version,
            "warnings": self.warnings,
        }


def generate_split(
    lang: BenchmarkLanguage,
    lengths: Sequence[int],
    per_length: int,
    balance: str,
    seed: int,
) -> tuple[list[DatasetRecord], Manifest]:
    """Draw per_length strings at each length, uniform or label-balanced.

    Balanced mode samples half the strings uniformly from the language's
    length slice and half from the complement's; a length whose slice is
    empty on either side falls back to uniform with a manifest warning.
    """
    if balance not in ("uniform", "balanced"):
        raise ValueError(f"bad balance mode: {balance!r}")
    if balance == "balanced" and per_length < 2:
        raise ValueError("balanced mode needs per_length >= 2")
    manifest = Manifest(lang.id, seed, balance)
    records: list[DatasetRecord] = []
    neg_dfa = complement(lang.dfa)
    for n in lengths:
        rng = random.Random(seed ^ n)
        mode = balance
        if balance == "balanced":
            pos_count = count_slice(lang.dfa, n)
            neg_count = count_slice(neg_dfa, n)
            if pos_count == 0 or neg_count == 0:
                manifest.warnings.append(
                    f"length {n}: one-sided slice, fell back to uniform"
                )
                mode = "uniform"
        if mode == "uniform":
            for _ in range(per_length):
                word = tuple(rng.choice(lang.alphabet.tokens) for _ in range(n))
                records.append(_record(lang, word))
        else:
            half = per_length // 2
            for _ in range(half):
                records.append(_record(lang, sample_slice(lang.dfa, n, rng)))
            for _ in range(per_length - half):
                records.append(_record(lang, sample_slice(neg_dfa, n, rng)))
    return records, manifest


def _record(lang: BenchmarkLanguage, word: Word) -> DatasetRecord:
    label = 1 if run(lang.dfa, word).accepted else 0
    return DatasetRecord("".join(word), label, len(word))


def write_dataset(records: Sequence[DatasetRecord], path: str, manifest: Manifest) -> None:
    lang = get_benchmark(manifest.language)
    with open(path, "w") as fh:
        fh.write(json.dumps(manifest.to_json()) + "\n")
        for i, r in enumerate(records):
            expect = 1 if run(lang.dfa, r.s).accepted else 0
            if r.label != expect or r.len != len(r.s):
                raise ValueError(f"record {i} fails validation: {r}")
            fh.write(json.dumps({"s": r.s, "label": r.label, "len": r.len}) + "\n")


def read_dataset(path: str) -> tuple[list[DatasetRecord], Manifest]:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError("empty dataset file")
    head = json.loads(lines[0])
    if head.get("type") != "manifest":
        raise ValueError("first line must be a manifest")
    manifest = Manifest(
        head["language"], head["seed"], head["balance"], head["version"], head["warnings"]
    )
    lang = get_benchmark(manifest.language)
    records = []
    for i, line in enumerate(lines[1:], start=2):
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"line {i}: malformed JSON") from exc
        rec = DatasetRecord(obj["s"], int(obj["label"]), int(obj["len"]))
        expect = 1 if run(lang.dfa, rec.s).accepted else 0
        if rec.label != expect:
            raise ValueError(f"line {i}: label disagrees with the {lang.id} automaton")
        if rec.len != len(rec.s):
            raise ValueError(f"line {i}: recorded length {rec.len} != {len(rec.s)}")
        records.append(rec)
    return records, manifest
