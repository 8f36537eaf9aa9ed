"""
Positive formulas and positive interpretations on a dyadic grid.

With 0 as truth, `max` is conjunction and `min` is disjunction. A tuple
satisfies a positive formula when the formula evaluates to 0 on it.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Tuple

from app.models.syntax import Atom, Conn, Formula, Quant, constant
from app.models.vocabulary import Vocabulary
from app.utils.error_handling import StructuralError

_POSITIVE_CONNECTIVES = {"min", "max"}

GridKey = Tuple[str, Fraction]


def frame_variables(arity: int) -> Tuple[str, ...]:
    return tuple(f"x{i}" for i in range(1, arity + 1))


def is_positive(f: Formula) -> bool:
    if isinstance(f, Atom):
        return True
    if isinstance(f, Quant):
        return is_positive(f.body)
    if f.connective.name == "const":
        return f.connective.value in (0, 1)
    return f.connective.name in _POSITIVE_CONNECTIVES and all(is_positive(a) for a in f.args)


@dataclass(frozen=True)
class PositiveFormula:
    """A formula built from atoms with min, max, sup, inf and the constants 0 and 1."""
    formula: Formula

    def __post_init__(self):
        if not is_positive(self.formula):
            raise StructuralError("formula is not positive: only min, max, sup, inf, 0 and 1 are allowed")

    @classmethod
    def true(cls) -> "PositiveFormula":
        """The empty conjunction."""
        return cls(constant(0))


TRUE = PositiveFormula.true()


@dataclass(frozen=True)
class Interpretation:
    """
    Lower sets I(P,[0,r]) and upper sets I(P,[r,1]) for every grid point r.

    lower(P, 1) and upper(P, 0) default to true when not given.
    """
    denominator: int
    predicates: Tuple[Tuple[str, int], ...]
    lower: Dict[GridKey, PositiveFormula] = field(default_factory=dict)
    upper: Dict[GridKey, PositiveFormula] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "predicates", tuple(tuple(p) for p in self.predicates))
        den = self.denominator
        if den < 1 or den & (den - 1):
            raise StructuralError(f"grid denominator must be a power of two, got {den}")
        arities = dict(self.predicates)
        if len(arities) != len(self.predicates):
            raise StructuralError("interpreted predicate declared twice")
        grid = set(self.grid())

        for kind, table in (("lower", self.lower), ("upper", self.upper)):
            for (name, r), positive in table.items():
                if name not in arities:
                    raise StructuralError(f"{kind} entry for undeclared predicate {name!r}")
                if r not in grid:
                    raise StructuralError(f"{kind} entry for {name} at {r}, which is off the grid 1/{den}")
                extra = positive.formula.free_vars - set(frame_variables(arities[name]))
                if extra:
                    raise StructuralError(
                        f"{kind} entry for {name} at {r} uses variables {sorted(extra)} outside its frame"
                    )

        for name, _ in self.predicates:
            for r in grid:
                if r != 1 and (name, r) not in self.lower:
                    raise StructuralError(f"missing lower entry for {name} at {r}")
                if r != 0 and (name, r) not in self.upper:
                    raise StructuralError(f"missing upper entry for {name} at {r}")

    def grid(self) -> List[Fraction]:
        return [Fraction(j, self.denominator) for j in range(self.denominator + 1)]

    def arity(self, name: str) -> int:
        return dict(self.predicates)[name]

    def frame(self, name: str) -> Tuple[str, ...]:
        return frame_variables(self.arity(name))

    def lower_formula(self, name: str, r: Fraction) -> PositiveFormula:
        return self.lower.get((name, Fraction(r)), TRUE)

    def upper_formula(self, name: str, r: Fraction) -> PositiveFormula:
        return self.upper.get((name, Fraction(r)), TRUE)

    def target_vocabulary(self, source: Vocabulary) -> Vocabulary:
        """Interpreted predicates plus the source's functions and constants."""
        return Vocabulary(predicates=self.predicates, functions=source.functions, constants=source.constants)

    @classmethod
    def complement_pair(cls, denominator: int, name: str, arity: int,
                        holds: Formula, fails: Formula) -> "Interpretation":
        """
        P is 0 where `holds` is satisfied and 1 where `fails` is.

        Every lower set below 1 is `holds` and every upper set above 0 is `fails`.
        """
        lower, upper = {}, {}
        for j in range(denominator + 1):
            r = Fraction(j, denominator)
            if r != 1:
                lower[(name, r)] = PositiveFormula(holds)
            if r != 0:
                upper[(name, r)] = PositiveFormula(fails)
        return cls(denominator=denominator, predicates=((name, arity),), lower=lower, upper=upper)

    def merged(self, other: "Interpretation") -> "Interpretation":
        if other.denominator != self.denominator:
            raise StructuralError("cannot merge interpretations on different grids")
        return Interpretation(
            denominator=self.denominator,
            predicates=self.predicates + other.predicates,
            lower={**self.lower, **other.lower},
            upper={**self.upper, **other.upper},
        )
