"""Fragment classification of regular languages and of formulas.

Language-level verdicts come from the algebra module; the positive side
of past-fragment definability (ltl_p) has no decision procedure, so it is
three-valued with curated answers for the benchmark registry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import algebra
from .dfa import Dfa, equivalent, minimize
from .formulas import (
    Formula,
    Mod,
    Past,
    Since,
    Until,
    UnsupportedNodeError,
    YesterdayStar,
    Yesterday,
    YesterdayBounded,
    subformulas,
)


@dataclass(frozen=True)
class FragmentReport:
    definite: bool
    yptl_definable: bool
    star_free: bool
    ltl_p_definable: str  # "yes" | "no" | "unknown"
    witnesses: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {
            "definite": self.definite,
            "yptl_definable": self.yptl_definable,
            "star_free": self.star_free,
            "ltl_p_definable": self.ltl_p_definable,
            "witnesses": self.witnesses,
        }


@dataclass(frozen=True)
class MaskRequirement:
    pattern: str  # "boolean-only" | "local-only" | "global-only" | "hybrid"
    k: Optional[int] = None

    def to_json(self) -> dict:
        return {"pattern": self.pattern, "k": self.k}


def classify_language(d: Dfa, budget: Optional[int] = None) -> FragmentReport:
    dm = minimize(d)
    sg = algebra.transition_semigroup(dm, budget)
    definite = algebra.is_definite(dm, budget)
    config = algebra.find_forbidden_config(dm, budget)
    aperiodic = algebra.is_aperiodic(sg)
    yptl = config is None
    witnesses: dict = {}
    if definite.witness:
        witnesses["definite"] = definite.witness
    if config is not None:
        witnesses["forbidden_config"] = {
            "q": config.q,
            "q2": config.q2,
            "u": list(config.u),
            "v": list(config.v),
            "x": list(config.x),
        }
    ltl_p = "unknown" if yptl else "no"
    if yptl:
        curated = _curated_lookup(dm)
        if curated is not None:
            ltl_p = curated
    return FragmentReport(
        definite=definite.holds,
        yptl_definable=yptl,
        star_free=aperiodic.holds,
        ltl_p_definable=ltl_p,
        witnesses=witnesses,
    )


def _curated_lookup(dm: Dfa) -> Optional[str]:
    """ltl_p verdict when the language equals a curated benchmark language."""
    from .datagen import REGISTRY

    for lang in REGISTRY.values():
        if lang.dfa.alphabet != dm.alphabet:
            continue
        same, _ = equivalent(dm, lang.dfa)
        if same:
            return lang.ltl_p_definable
    return None


def classify_formula(f: Formula) -> MaskRequirement:
    """Mask pattern required to realize each temporal operator in f."""
    k_local = 0
    has_global = False
    for g in subformulas(f):
        if isinstance(g, (Until, Since)):
            raise UnsupportedNodeError(f"no mask pattern for node: {g!r}")
        if isinstance(g, Yesterday):
            k_local = max(k_local, 1)
        elif isinstance(g, YesterdayBounded):
            k_local = max(k_local, g.k)
        elif isinstance(g, (Past, YesterdayStar)):
            has_global = True
    if k_local and has_global:
        return MaskRequirement("hybrid", k_local)
    if k_local:
        return MaskRequirement("local-only", k_local)
    if has_global:
        return MaskRequirement("global-only")
    return MaskRequirement("boolean-only")


def classify_benchmark(name: str) -> FragmentReport:
    from .datagen import get_benchmark

    lang = get_benchmark(name)
    return FragmentReport(
        definite=lang.fragment_class == "LTL[Y]",
        yptl_definable=lang.fragment_class != "LTL[S]-only",
        star_free=True,
        ltl_p_definable=lang.ltl_p_definable,
    )
