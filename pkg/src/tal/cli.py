"""Command-line entry point exposing the toolkit for scripting and CI."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import algebra, theorems
from .classify import classify_formula, classify_language
from .compiler import CompileParams, compile_formula, mask_census, verify_compiled
from .datagen import REGISTRY, generate_split, get_benchmark, write_dataset
from .dfa import dfa_to_json, equivalent, load_dfa, ltl_to_dfa, minimize
from .fixedfloat import FpFormat
from .formulas import (
    Alphabet,
    Formula,
    FormulaError,
    atoms,
    expand_bounded,
    operator_depth,
    rewrite_with_mod,
)
from .syntax import format_formula, parse_formula
from .transformer import Mask, load_model, model_run, model_to_json, save_model


class UsageError(Exception):
    pass


def _alphabet_for(args, formula_text: str, string: str = "") -> Alphabet:
    if getattr(args, "alphabet", None):
        return Alphabet(tuple(args.alphabet.split(",")))
    # inferred default: atoms plus string tokens, with {a,b} as a floor so
    # compiled artifacts are usable on more than the mentioned tokens
    probe = Alphabet(tuple(sorted(set("abcdefghijklmnopqrstuvwxyz"))))
    f = parse_formula(formula_text, probe)
    tokens = sorted(atoms(f) | set(string) | {"a", "b"})
    return Alphabet(tuple(tokens))


def _parse(args, string: str = "") -> tuple[Formula, Alphabet]:
    if not args.formula:
        raise UsageError("--formula is required")
    alphabet = _alphabet_for(args, args.formula, string)
    return parse_formula(args.formula, alphabet), alphabet


def _emit(args, payload: dict) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
        return
    if getattr(args, "format", "json") == "text":
        for key, value in payload.items():
            print(f"{key}: {value}")
    else:
        print(json.dumps(payload, indent=1))


def _parse_lengths(spec: str) -> list[int]:
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in spec.split(",")]


def _cmd_eval(args) -> int:
    f, _ = _parse(args, args.string or "")
    from .formulas import accepts

    _emit(args, {"accepts": accepts(f, args.string or "")})
    return 0


def _cmd_depth(args) -> int:
    f, _ = _parse(args)
    _emit(args, {"operator_depth": operator_depth(f)})
    return 0


def _cmd_expand(args) -> int:
    f, _ = _parse(args)
    _emit(args, {"formula": format_formula(expand_bounded(f))})
    return 0


def _cmd_rewrite_mod(args) -> int:
    f, _ = _parse(args)
    if args.k is None or args.m is None:
        raise UsageError("--k and --m are required")
    _emit(args, {"formula": format_formula(rewrite_with_mod(f, args.k, args.m))})
    return 0


def _cmd_to_dfa(args) -> int:
    f, alphabet = _parse(args)
    _emit(args, dfa_to_json(ltl_to_dfa(f, alphabet)))
    return 0


def _cmd_dfa_minimize(args) -> int:
    _emit(args, dfa_to_json(minimize(load_dfa(args.dfa))))
    return 0


def _cmd_dfa_classify(args) -> int:
    report = classify_language(load_dfa(args.dfa))
    _emit(args, report.to_json())
    return 0


def _cmd_dfa_config(args) -> int:
    witness = algebra.find_forbidden_config(load_dfa(args.dfa))
    if witness is None:
        _emit(args, {"forbidden_config": None})
        return 0
    _emit(
        args,
        {
            "forbidden_config": {
                "q": witness.q,
                "q2": witness.q2,
                "u": "".join(witness.u),
                "v": "".join(witness.v),
                "x": "".join(witness.x),
            }
        },
    )
    return 1


def _cmd_semigroup(args) -> int:
    sg = algebra.transition_semigroup(minimize(load_dfa(args.dfa)))
    _emit(
        args,
        {
            "size": len(sg),
            "elements": [
                {"word": "".join(w), "map": list(t)}
                for t, w in zip(sg.elements, sg.witnesses)
            ],
        },
    )
    return 0


def _cmd_compile(args) -> int:
    f, alphabet = _parse(args)
    model = compile_formula(f, alphabet)
    payload = model_to_json(model, FpFormat())
    payload["mask_census"] = mask_census(model)
    payload["mask_requirement"] = classify_formula(f).to_json()
    _emit(args, payload)
    return 0


def _cmd_run_model(args) -> int:
    model, fp = load_model(args.model)
    _emit(args, {"output": model_run(model, args.string or "", fp)})
    return 0


def _cmd_verify(args) -> int:
    f, alphabet = _parse(args)
    model = compile_formula(f, alphabet)
    report = verify_compiled(
        model,
        f,
        args.exhaustive_len,
        _parse_lengths(args.spot_len),
        args.spot_count,
        args.seed,
    )
    _emit(args, report.to_json())
    return 0 if report.ok else 1


def _cmd_gen_data(args) -> int:
    lang = get_benchmark(args.language)
    records, manifest = generate_split(
        lang, _parse_lengths(args.lengths), args.per_length, args.balance, args.seed
    )
    if not args.out:
        raise UsageError("--out is required for gen-data")
    write_dataset(records, args.out, manifest)
    print(json.dumps({"written": len(records), "path": args.out, "warnings": manifest.warnings}))
    return 0


def _cmd_benchmark_list(args) -> int:
    from .classify import classify_benchmark

    _emit(
        args,
        {
            "benchmarks": [
                {
                    "id": lang.id,
                    "alphabet": list(lang.alphabet.tokens),
                    "fragment_class": lang.fragment_class,
                    "formula": format_formula(lang.formula) if lang.formula else None,
                    "classification": classify_benchmark(lang.id).to_json(),
                }
                for lang in REGISTRY.values()
            ]
        },
    )
    return 0


def _cmd_theorem_suite(args) -> int:
    if args.name == "thm1":
        report = theorems.thm1_report(args.trials, args.seed)
    elif args.name == "thm2":
        report = theorems.thm2_report(args.trials, args.seed)
    else:
        raise UsageError(f"unknown suite: {args.name!r}")
    _emit(args, report)
    return 0 if report["ok"] else 1


def _cmd_masks(args) -> int:
    if args.kind == "local":
        if not args.k:
            raise UsageError("--k is required for local masks")
        mask = Mask("local", args.k)
    else:
        mask = Mask("global")
    _emit(
        args,
        {
            "kind": mask.kind,
            "k": mask.k,
            "size": args.size,
            "mask": mask.materialize(args.size).tolist(),
        },
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tal")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(_name, _fn, **flags):
        p = sub.add_parser(_name)
        p.set_defaults(fn=_fn)
        for flag, kwargs in flags.items():
            p.add_argument(f"--{flag.replace('_', '-')}", **kwargs)
        p.add_argument("--format", default="json", choices=["json", "text"])
        p.add_argument("--out")
        return p

    formula_flags = {"formula": {}, "alphabet": {}}
    add("eval", _cmd_eval, **formula_flags, string={"default": ""})
    add("depth", _cmd_depth, **formula_flags)
    add("expand", _cmd_expand, **formula_flags)
    add(
        "rewrite-mod",
        _cmd_rewrite_mod,
        **formula_flags,
        k={"type": int},
        m={"type": int},
    )
    add("to-dfa", _cmd_to_dfa, **formula_flags)
    add("dfa-minimize", _cmd_dfa_minimize, dfa={"required": True})
    add("dfa-classify", _cmd_dfa_classify, dfa={"required": True})
    add("dfa-config", _cmd_dfa_config, dfa={"required": True})
    add("semigroup", _cmd_semigroup, dfa={"required": True})
    add("compile", _cmd_compile, **formula_flags)
    add("run-model", _cmd_run_model, model={"required": True}, string={"default": ""})
    add(
        "verify",
        _cmd_verify,
        **formula_flags,
        exhaustive_len={"type": int, "default": 8},
        spot_len={"default": "100"},
        spot_count={"type": int, "default": 25},
        seed={"type": int, "default": 0},
        jobs={"type": int, "default": 1},
    )
    add(
        "gen-data",
        _cmd_gen_data,
        language={"required": True},
        lengths={"required": True},
        per_length={"type": int, "default": 32},
        balance={"default": "balanced", "choices": ["uniform", "balanced"]},
        seed={"type": int, "default": 0},
    )
    add("benchmark-list", _cmd_benchmark_list)
    add(
        "theorem-suite",
        _cmd_theorem_suite,
        name={"required": True},
        trials={"type": int, "default": 200},
        seed={"type": int, "default": 7},
        jobs={"type": int, "default": 1},
    )
    add(
        "masks",
        _cmd_masks,
        kind={"default": "global", "choices": ["global", "local"]},
        k={"type": int},
        size={"type": int, "required": True},
    )
    return ap


def dispatch(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except algebra.BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (UsageError, FormulaError, ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
