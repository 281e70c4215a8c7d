"""Fixed-precision masked-attention transformer forward pass.

All arithmetic is carried out in a configurable floating-point format
with one rounding per primitive operation; softmax denominators and
value aggregations accumulate strictly left to right by position, so
results are bit-reproducible. A vectorized float32 path is used for the
binary32 format; it matches the scalar reference bit for bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .fixedfloat import FpFormat
from .formulas import Alphabet, as_word

EOS_TOKEN = "<eos>"

BoolExpr = list  # ["ch", i] | ["const", 0|1] | ["not", e] | ["and", e, e] | ["or", e, e]


@dataclass(frozen=True)
class Mask:
    kind: str  # "global" | "local"
    k: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("global", "local"):
            raise ValueError(f"bad mask kind: {self.kind!r}")
        if self.kind == "local" and (self.k is None or self.k < 1):
            raise ValueError("local mask requires k >= 1")
        if self.kind == "global" and self.k is not None:
            raise ValueError("global mask takes no k")

    def allows(self, n: int, m: int) -> bool:
        """1-based positions: may position n attend to position m."""
        if self.kind == "global":
            return m < n
        return max(1, n - self.k) <= m < n

    def materialize(self, size: int) -> np.ndarray:
        """size x size 0/1 matrix; entry [i][j] covers n=i+1, m=j+1."""
        below = np.tri(size, size, -1, dtype=np.int8)
        if self.kind == "global":
            return below
        # band 1 <= i - j <= k
        return below - np.tri(size, size, -self.k - 1, dtype=np.int8)


@dataclass
class Head:
    wq: np.ndarray  # d_K x d
    wk: np.ndarray  # d_K x d
    wv: np.ndarray  # d_V x d
    wout: np.ndarray  # d x d_V
    mask: Mask

    def __post_init__(self):
        self.wq = np.asarray(self.wq, dtype=np.float64)
        self.wk = np.asarray(self.wk, dtype=np.float64)
        self.wv = np.asarray(self.wv, dtype=np.float64)
        self.wout = np.asarray(self.wout, dtype=np.float64)
        if self.wq.shape != self.wk.shape:
            raise ValueError("wq and wk must agree in shape")
        if self.wv.shape[1] != self.wq.shape[1]:
            raise ValueError("wv width must match the stream dimension")
        if self.wout.shape[1] != self.wv.shape[0]:
            raise ValueError("wout must consume the value dimension")


@dataclass
class Ffn:
    kind: str = "identity"  # "identity" | "boolean"
    assignments: list[tuple[int, BoolExpr]] = field(default_factory=list)

    def target(self, column: np.ndarray) -> list[tuple[int, float]]:
        """Channel targets for one column under 1/2 thresholding."""
        bools = column >= 0.5

        def ev(e: BoolExpr) -> bool:
            op = e[0]
            if op == "ch":
                return bool(bools[e[1]])
            if op == "const":
                return bool(e[1])
            if op == "not":
                return not ev(e[1])
            if op == "and":
                return ev(e[1]) and ev(e[2])
            if op == "or":
                return ev(e[1]) or ev(e[2])
            raise ValueError(f"bad expression op: {op!r}")

        return [(c, 1.0 if ev(expr) else 0.0) for c, expr in self.assignments]


@dataclass
class Layer:
    heads: list[Head]
    ffn: Ffn
    ln_mode: str = "identity"  # "identity" | "standard"


@dataclass
class TransformerModel:
    alphabet: Alphabet
    d: int
    encoder: dict[str, tuple[float, ...]]  # token (incl. EOS) -> column
    layers: list[Layer]
    classifier_channel: int
    classifier_threshold: float = 0.5

    def __post_init__(self):
        if EOS_TOKEN not in self.encoder:
            raise ValueError("encoder must define the EOS token")
        for t in self.alphabet:
            if t not in self.encoder:
                raise ValueError(f"encoder missing token {t!r}")


def _matmul_scalar(w: np.ndarray, x: np.ndarray, fp: FpFormat) -> np.ndarray:
    out = np.zeros((w.shape[0], x.shape[1]))
    for i in range(w.shape[0]):
        for t in range(x.shape[1]):
            acc = 0.0
            for j in range(w.shape[1]):
                acc = fp.add(acc, fp.mul(w[i, j], x[j, t]))
            out[i, t] = acc
    return out


def _attention_scalar(x: np.ndarray, head: Head, fp: FpFormat) -> np.ndarray:
    d, size = x.shape
    q = _matmul_scalar(head.wq, x, fp)
    k = _matmul_scalar(head.wk, x, fp)
    v = _matmul_scalar(head.wv, x, fp)
    sqrt_dk = fp.sqrt(float(q.shape[0]))
    out = np.zeros((v.shape[0], size))
    for n in range(1, size + 1):
        cols = [m for m in range(1, size + 1) if head.mask.allows(n, m)]
        if not cols:
            continue
        exps = []
        for m in cols:
            acc = 0.0
            for i in range(q.shape[0]):
                acc = fp.add(acc, fp.mul(q[i, n - 1], k[i, m - 1]))
            score = fp.div(acc, sqrt_dk)
            exps.append(fp.exp(score))
        denom = fp.sum(exps)
        if denom == 0.0:
            # every unmasked score underflowed; treat like a masked row
            continue
        alphas = [fp.div(e, denom) for e in exps]
        for i in range(v.shape[0]):
            acc = 0.0
            for a, m in zip(alphas, cols):
                acc = fp.add(acc, fp.mul(a, v[i, m - 1]))
            out[i, n - 1] = acc
    return out


@lru_cache(maxsize=128)
def _mask_bool(kind: str, k: Optional[int], size: int) -> np.ndarray:
    out = Mask(kind, k).materialize(size).astype(bool)
    out.setflags(write=False)
    return out


def _clamp32(arr: np.ndarray, fp: FpFormat) -> np.ndarray:
    bad = np.isinf(arr)
    if bad.any():
        arr = np.where(bad, np.sign(arr) * np.float32(fp.max_finite), arr)
    return arr.astype(np.float32)


def _matmul_f32(w: np.ndarray, x: np.ndarray, fp: FpFormat) -> np.ndarray:
    prod = _clamp32(w[:, :, None].astype(np.float32) * x[None, :, :].astype(np.float32), fp)
    if w.shape[1] == 0:
        return np.zeros((w.shape[0], x.shape[1]), dtype=np.float32)
    return _clamp32(np.cumsum(prod, axis=1, dtype=np.float32)[:, -1, :], fp)


def _attention_f32(x: np.ndarray, head: Head, fp: FpFormat) -> np.ndarray:
    size = x.shape[1]
    xf = x.astype(np.float32)
    q = _matmul_f32(head.wq.astype(np.float32), xf, fp)
    k = _matmul_f32(head.wk.astype(np.float32), xf, fp)
    v = _matmul_f32(head.wv.astype(np.float32), xf, fp)
    sqrt_dk = np.float32(fp.sqrt(float(q.shape[0])))
    prod = _clamp32(q[:, :, None] * k[:, None, :], fp)
    raw = _clamp32(np.cumsum(prod, axis=0, dtype=np.float32)[-1], fp)
    scores = _clamp32(raw / sqrt_dk, fp)
    mask = _mask_bool(head.mask.kind, head.mask.k, size)
    exps = np.exp(scores.astype(np.float64))
    exps = _clamp32(exps, fp)
    exps = np.where(mask, exps, np.float32(0.0)).astype(np.float32)
    denom = np.cumsum(exps, axis=1, dtype=np.float32)[:, -1]
    row_any = mask.any(axis=1) & (denom > 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = _clamp32(exps / denom[:, None], fp)
    alpha = np.where(row_any[:, None] & mask, alpha, np.float32(0.0)).astype(np.float32)
    prod_v = _clamp32(v[:, None, :] * alpha[None, :, :], fp)
    out = _clamp32(np.cumsum(prod_v, axis=2, dtype=np.float32)[:, :, -1], fp)
    return out.astype(np.float64)


def attention_forward(x: np.ndarray, head: Head, fp: FpFormat) -> np.ndarray:
    """Pre-projection head output, d_V x size."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != head.wq.shape[1]:
        raise ValueError("input dimension does not match head matrices")
    if fp.is_binary32:
        out = _attention_f32(x, head, fp)
        if np.isfinite(out).all():
            return out
    return _attention_scalar(x, head, fp)


def multi_head(x: np.ndarray, heads: Sequence[Head], fp: FpFormat) -> np.ndarray:
    """Sum of projected head outputs, in declared head order."""
    x = np.asarray(x, dtype=np.float64)
    d, size = x.shape
    total = np.zeros((d, size))
    if fp.is_binary32:
        tot32 = np.zeros((d, size), dtype=np.float32)
        ok = True
        for head in heads:
            o = attention_forward(x, head, fp)
            proj = _matmul_f32(head.wout.astype(np.float32), o.astype(np.float32), fp)
            tot32 = _clamp32(tot32 + proj, fp)
            if not np.isfinite(tot32).all():
                ok = False
                break
        if ok:
            return tot32.astype(np.float64)
    for head in heads:
        o = attention_forward(x, head, fp)
        proj = _matmul_scalar(head.wout, o, fp)
        for i in range(d):
            for t in range(size):
                total[i, t] = fp.add(total[i, t], proj[i, t])
    return total


def _add_elem(a: np.ndarray, b: np.ndarray, fp: FpFormat) -> np.ndarray:
    if fp.is_binary32:
        out = _clamp32(a.astype(np.float32) + b.astype(np.float32), fp)
        return out.astype(np.float64)
    out = np.zeros_like(a)
    for ix in np.ndindex(a.shape):
        out[ix] = fp.add(float(a[ix]), float(b[ix]))
    return out


def _layer_norm(x: np.ndarray, fp: FpFormat) -> np.ndarray:
    d, size = x.shape
    eps = fp.round(1e-5)
    out = np.zeros_like(x)
    for t in range(size):
        col = x[:, t]
        mean = fp.div(fp.sum(col), fp.round(d))
        sq = [fp.mul(fp.sub(v, mean), fp.sub(v, mean)) for v in col]
        var = fp.div(fp.sum(sq), fp.round(d))
        denom = fp.sqrt(fp.add(var, eps))
        for i in range(d):
            out[i, t] = fp.div(fp.sub(col[i], mean), denom)
    return out


def _apply_ffn(x: np.ndarray, ffn: Ffn, fp: FpFormat) -> np.ndarray:
    """Residual delta so that assigned channels land exactly on target."""
    out = np.zeros_like(x)
    if ffn.kind == "identity":
        return out
    for t in range(x.shape[1]):
        for c, target in ffn.target(x[:, t]):
            out[c, t] = fp.sub(target, float(x[c, t]))
    return out


def encode(model: TransformerModel, w: Sequence[str] | str) -> np.ndarray:
    word = as_word(w)
    cols = [model.encoder[t] for t in word] + [model.encoder[EOS_TOKEN]]
    return np.array(cols, dtype=np.float64).T


def model_forward(model: TransformerModel, w: Sequence[str] | str, fp: FpFormat) -> np.ndarray:
    """Final residual stream, d x (N+1)."""
    x = encode(model, w)
    for layer in model.layers:
        att = multi_head(x, layer.heads, fp)
        x = _add_elem(x, att, fp)
        if layer.ln_mode == "standard":
            x = _layer_norm(x, fp)
        delta = _apply_ffn(x, layer.ffn, fp)
        x = _add_elem(x, delta, fp)
        if layer.ln_mode == "standard":
            x = _layer_norm(x, fp)
    return x

def model_run(model: TransformerModel, w: Sequence[str] | str, fp: FpFormat) -> int:
    x = model_forward(model, w, fp)
    return int(x[model.classifier_channel, -1] >= model.classifier_threshold)


def _matrix_to_json(m: np.ndarray) -> list[list[str]]:
    return [[repr(float(v)) for v in row] for row in m]


def _matrix_from_json(rows: list[list[str]]) -> np.ndarray:
    if not rows:
        return np.zeros((0, 0))
    return np.array([[float(v) for v in row] for row in rows], dtype=np.float64)


def model_to_json(model: TransformerModel, fp: FpFormat) -> dict:
    return {
        "format": {
            "exponent_bits": fp.exponent_bits,
            "mantissa_bits": fp.mantissa_bits,
        },
        "alphabet": list(model.alphabet.tokens),
        "d": model.d,
        "encoder": {t: [repr(v) for v in col] for t, col in model.encoder.items()},
        "layers": [
            {
                "heads": [
                    {
                        "mask": {"kind": h.mask.kind, "k": h.mask.k},
                        "wq": _matrix_to_json(h.wq),
                        "wk": _matrix_to_json(h.wk),
                        "wv": _matrix_to_json(h.wv),
                        "wout": _matrix_to_json(h.wout),
                    }
                    for h in layer.heads
                ],
                "ffn": {"kind": layer.ffn.kind, "assignments": [[c, e] for c, e in layer.ffn.assignments]},
                "ln_mode": layer.ln_mode,
            }
            for layer in model.layers
        ],
        "classifier": {
            "channel": model.classifier_channel,
            "threshold": repr(model.classifier_threshold),
        },
    }


def model_from_json(obj: dict) -> tuple[TransformerModel, FpFormat]:
    fp = FpFormat(obj["format"]["exponent_bits"], obj["format"]["mantissa_bits"])
    layers = []
    for lay in obj["layers"]:
        heads = [
            Head(
                _matrix_from_json(h["wq"]),
                _matrix_from_json(h["wk"]),
                _matrix_from_json(h["wv"]),
                _matrix_from_json(h["wout"]),
                Mask(h["mask"]["kind"], h["mask"]["k"]),
            )
            for h in lay["heads"]
        ]
        ffn = Ffn(lay["ffn"]["kind"], [(c, e) for c, e in lay["ffn"]["assignments"]])
        layers.append(Layer(heads, ffn, lay["ln_mode"]))
    model = TransformerModel(
        Alphabet(tuple(obj["alphabet"])),
        obj["d"],
        {t: tuple(float(v) for v in col) for t, col in obj["encoder"].items()},
        layers,
        obj["classifier"]["channel"],
        float(obj["classifier"]["threshold"]),
    )
    return model, fp


def save_model(model: TransformerModel, fp: FpFormat, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(model_to_json(model, fp), fh, indent=1)


def load_model(path: str) -> tuple[TransformerModel, FpFormat]:
    with open(path) as fh:
        return model_from_json(json.load(fh))
