"""Compile past-time formulas into fixed-precision transformers.

Each subformula owns a stream channel. Temporal operators become
attention heads at the layer given by their operator depth: unbounded
lookback uses the global mask, bounded lookback a k-local mask. Keys
score a large gain on positions where the child holds, so softmax mass
concentrates there and the head output separates cleanly from zero; the
layer's feed-forward stage snaps channels to exact 0/1 and evaluates the
boolean combinations scheduled at that depth.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .fixedfloat import FpFormat
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
    Yesterday,
    YesterdayBounded,
    YesterdayStar,
    accepts,
    as_word,
    operator_depth,
    subformulas,
)
from .transformer import (
    EOS_TOKEN,
    Ffn,
    Head,
    Layer,
    Mask,
    TransformerModel,
    model_run,
)


class CompileError(Exception):
    pass


@dataclass(frozen=True)
class CompileParams:
    score_gain: float = 20.0
    n_max: int = 10_000
    fp: FpFormat = field(default_factory=FpFormat)
    ln_mode: str = "identity"
    max_channels: int = 256


def _drop_star(f: Formula) -> Formula:
    if isinstance(f, YesterdayStar):
        return Past(_drop_star(f.child))
    if isinstance(f, Not):
        return Not(_drop_star(f.child))
    if isinstance(f, And):
        return And(_drop_star(f.left), _drop_star(f.right))
    if isinstance(f, Or):
        return Or(_drop_star(f.left), _drop_star(f.right))
    if isinstance(f, Yesterday):
        return Yesterday(_drop_star(f.child))
    if isinstance(f, YesterdayBounded):
        return YesterdayBounded(f.k, _drop_star(f.child))
    if isinstance(f, Past):
        return Past(_drop_star(f.child))
    return f


def _token_value(g: Formula, token: Optional[str]) -> float:
    """Truth of a depth-0 subformula at a position holding `token`."""
    if isinstance(g, Top):
        return 1.0
    if isinstance(g, Bot):
        return 0.0
    if isinstance(g, Atom):
        return 1.0 if token == g.token else 0.0
    if isinstance(g, Not):
        return 1.0 - _token_value(g.child, token)
    if isinstance(g, And):
        return _token_value(g.left, token) * _token_value(g.right, token)
    if isinstance(g, Or):
        return max(_token_value(g.left, token), _token_value(g.right, token))
    raise CompileError(f"not a depth-0 node: {g!r}")


def compile_formula(f: Formula, alphabet: Alphabet, params: CompileParams = CompileParams()) -> TransformerModel:
    for g in subformulas(f):
        if isinstance(g, (Until, Since)):
            raise CompileError(f"operator not compilable: {g.__class__.__name__}")
        if isinstance(g, Mod):
            raise CompileError("positional predicates are not compilable")
    f = _drop_star(f)
    fp = params.fp
    gain = fp.round(params.score_gain)
    e_gain = fp.exp(gain)
    ratio = fp.div(e_gain, fp.add(e_gain, fp.round(params.n_max)))
    if not ratio >= 0.75:
        raise CompileError(
            f"margin check failed: exp({params.score_gain}) /"
            f" (exp({params.score_gain}) + {params.n_max}) = {ratio} < 3/4"
        )

    subs = subformulas(f)
    d = 1 + len(subs)
    if d > params.max_channels:
        raise CompileError(f"channel budget exceeded: need {d} > {params.max_channels}")
    chan = {g: 1 + i for i, g in enumerate(subs)}
    depth = {g: operator_depth(g) for g in subs}
    n_layers = max(1, depth[f])

    encoder: dict[str, tuple[float, ...]] = {}
    for token in list(alphabet.tokens) + [EOS_TOKEN]:
        col = [0.0] * d
        col[0] = 1.0
        for g in subs:
            if depth[g] == 0:
                col[chan[g]] = _token_value(g, token if token != EOS_TOKEN else None)
        encoder[token] = tuple(col)

    def ready_expr(g: Formula, level: int) -> list:
        """Boolean expression over channels valid before this layer's FFN."""
        if depth[g] < level or isinstance(g, (Yesterday, YesterdayBounded, Past)):
            return ["ch", chan[g]]
        if isinstance(g, Not):
            return ["not", ready_expr(g.child, level)]
        if isinstance(g, And):
            return ["and", ready_expr(g.left, level), ready_expr(g.right, level)]
        if isinstance(g, Or):
            return ["or", ready_expr(g.left, level), ready_expr(g.right, level)]
        raise CompileError(f"unschedulable node: {g!r}")

    layers = []
    for level in range(1, n_layers + 1):
        heads = []
        assignments: list[tuple[int, list]] = []
        for g in subs:
            if depth[g] != level:
                continue
            if isinstance(g, (Yesterday, YesterdayBounded, Past)):
                wq = np.zeros((1, d))
                wq[0, 0] = 1.0
                wk = np.zeros((1, d))
                wk[0, chan[g.child]] = gain
                wv = np.zeros((1, d))
                wv[0, chan[g.child]] = 1.0
                wout = np.zeros((d, 1))
                wout[chan[g], 0] = 1.0
                if isinstance(g, Past):
                    mask = Mask("global")
                elif isinstance(g, Yesterday):
                    mask = Mask("local", 1)
                else:
                    mask = Mask("local", g.k)
                heads.append(Head(wq, wk, wv, wout, mask))
                assignments.append((chan[g], ["ch", chan[g]]))
            elif isinstance(g, (Not, And, Or)):
                assignments.append((chan[g], ready_expr(g, level)))
        layers.append(Layer(heads, Ffn("boolean", assignments), params.ln_mode))

    return TransformerModel(alphabet, d, encoder, layers, chan[f])


def mask_census(model: TransformerModel) -> dict:
    global_heads = 0
    local_heads: list[int] = []
    for layer in model.layers:
        for h in layer.heads:
            if h.mask.kind == "global":
                global_heads += 1
            else:
                local_heads.append(h.mask.k)
    return {"global_heads": global_heads, "local_heads": local_heads}


@dataclass
class VerifyReport:
    checked: int
    mismatches: list[str]

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {
            "checked": self.checked,
            "mismatches": self.mismatches,
            "ok": self.ok,
        }


def verify_compiled(
    model: TransformerModel,
    f: Formula,
    exhaustive_len: int,
    spot_len: int | Sequence[int],
    spot_count: int,
    seed: int,
    fp: Optional[FpFormat] = None,
) -> VerifyReport:
    """Compare the compiled model against direct evaluation.

    Exhaustive over all strings up to exhaustive_len, then spot_count
    random strings at each requested spot length.
    """
    fp = fp or FpFormat()
    alphabet = model.alphabet
    checked = 0
    mismatches: list[str] = []

    def check(word):
        nonlocal checked
        checked += 1
        got = model_run(model, word, fp)
        want = 1 if accepts(f, word) else 0
        if got != want:
            mismatches.append("".join(word))

    level: list[tuple[str, ...]] = [()]
    for n in range(exhaustive_len + 1):
        if n > 0:
            level = [w + (t,) for w in level for t in alphabet.tokens]
        for w in level:
            check(w)
    rng = random.Random(seed)
    lens = [spot_len] if isinstance(spot_len, int) else list(spot_len)
    for ln in lens:
        for _ in range(spot_count):
            w = tuple(rng.choice(alphabet.tokens) for _ in range(ln))
            check(w)
    return VerifyReport(checked, mismatches)
