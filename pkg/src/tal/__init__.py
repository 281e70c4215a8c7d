"""Past-time temporal logic, regular-language algebra, and
fixed-precision masked-attention toolkit."""

from .fixedfloat import FpFormat, fp_round
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
    Yesterday,
    YesterdayBounded,
    YesterdayStar,
    accepts,
    evaluate,
    expand_bounded,
    locally_testable_formula,
    operator_depth,
    rewrite_with_mod,
)
from .syntax import format_formula, parse_formula

__version__ = "0.1.0"
