"""
Exact truth values in [0,1] and the fixed basis of continuous connectives.

0 is truth. Every value is a reduced rational; nothing here touches floats.
"""
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from app.utils.error_handling import StructuralError, TruthValueRangeError

RationalLike = Union[int, str, Fraction]

_RATIONAL_PATTERN = re.compile(r"^-?\d+(/\d+)?$")


class TruthValue(Fraction):
    """A rational number constrained to [0,1]."""

    __slots__ = ()

    def __new__(cls, numerator: RationalLike = 0, denominator: Optional[int] = None):
        if isinstance(numerator, str) and denominator is None:
            numerator = parse_rational(numerator)
        value = super().__new__(cls, numerator, denominator)
        if value < 0 or value > 1:
            raise TruthValueRangeError(f"truth value {value} is outside [0,1]")
        return value

    def __repr__(self):
        return f"TruthValue({self})"


ZERO = TruthValue(0)
ONE = TruthValue(1)
HALF = TruthValue(1, 2)


def parse_rational(text: str) -> Fraction:
    """Read a rational literal "p/q" or an integer literal."""
    if not _RATIONAL_PATTERN.match(text):
        raise ValueError(f"not a rational literal: {text!r}")
    if "/" in text:
        numerator, denominator = text.split("/")
        if int(denominator) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(numerator), int(denominator))
    return Fraction(int(text))


def is_rational_literal(text: str) -> bool:
    return bool(_RATIONAL_PATTERN.match(text))


def format_rational(value: Fraction) -> str:
    """Serialize a rational in reduced "p/q" form ("0" and "1" for integers)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def as_truth_value(value: RationalLike) -> TruthValue:
    if isinstance(value, TruthValue):
        return value
    return TruthValue(value)


@dataclass(frozen=True)
class Connective:
    """One member of the connective basis."""
    name: str
    arity: int
    value: Optional[Fraction] = None  # only for const

    def __str__(self):
        if self.name == "const":
            return format_rational(self.value)
        return self.name


NEG = Connective("neg", 1)
HALF_CONNECTIVE = Connective("half", 1)
DOTMINUS = Connective("dotminus", 2)
DOTPLUS = Connective("dotplus", 2)
MIN = Connective("min", 2)
MAX = Connective("max", 2)
ABSDIFF = Connective("absdiff", 2)

BASIS = {c.name: c for c in (NEG, HALF_CONNECTIVE, DOTMINUS, DOTPLUS, MIN, MAX, ABSDIFF)}


def const(value: RationalLike) -> Connective:
    """The nullary connective with the given constant value."""
    return Connective("const", 0, as_truth_value(value))


def connective_by_name(name: str) -> Connective:
    try:
        return BASIS[name]
    except KeyError:
        raise StructuralError(f"unknown connective {name!r}") from None


def _apply(conn: Connective, args: Sequence[Fraction]) -> Fraction:
    """Unchecked evaluation on Fractions; callers guarantee arity."""
    name = conn.name
    if name == "const":
        return conn.value
    if name == "neg":
        return 1 - args[0]
    if name == "half":
        return args[0] / 2
    a, b = args
    if name == "dotminus":
        return a - b if a > b else Fraction(0)
    if name == "dotplus":
        s = a + b
        return s if s < 1 else Fraction(1)
    if name == "min":
        return a if a <= b else b
    if name == "max":
        return a if a >= b else b
    if name == "absdiff":
        return a - b if a >= b else b - a
    raise StructuralError(f"unknown connective {name!r}")


def apply_connective(conn: Connective, args: Sequence[RationalLike]) -> TruthValue:
    """
    Apply a basis connective to exact truth values.

    Args:
        conn: The connective
        args: Argument values, one per argument place

    Returns:
        The exact result, which always lies in [0,1]
    """
    if len(args) != conn.arity:
        raise StructuralError(
            f"connective {conn} expects {conn.arity} argument(s), got {len(args)}",
            details={"connective": str(conn)},
        )
    values = [as_truth_value(a) for a in args]
    return TruthValue(_apply(conn, values))


def lipschitz_constant(conn: Connective) -> Fraction:
    """Per-argument Lipschitz constant under the sup metric on arguments."""
    if conn.name == "const":
        return Fraction(0)
    if conn.name == "half":
        return Fraction(1, 2)
    return Fraction(1)
