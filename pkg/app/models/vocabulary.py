import re
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from app.utils.error_handling import StructuralError

# Words the surface syntax reserves for connectives and quantifiers
RESERVED_WORDS = frozenset({
    "sup", "inf", "neg", "dotminus", "dotplus", "min", "max", "half", "absdiff",
    "vocabulary", "structure", "universe", "predicate", "function", "constant",
    "theory", "sequence", "frame", "schedule", "interpretation", "grid", "lower", "upper",
})

NAME_PATTERN = re.compile(r"^[A-Za-z_][A-Za-z0-9_'.@\-]*$")

# alpha-normal forms name their bound variables v0, v1, ...
BOUND_NAME_PATTERN = re.compile(r"^v\d+$")


def _check_symbol_name(name: str, seen: set) -> None:
    if not NAME_PATTERN.match(name) or name in RESERVED_WORDS:
        raise StructuralError(f"invalid symbol name {name!r}")
    if name in seen:
        raise StructuralError(f"symbol {name!r} declared twice")
    seen.add(name)


class Vocabulary(BaseModel):
    """Predicate, function and constant symbols in declaration order."""
    model_config = ConfigDict(frozen=True)

    predicates: Tuple[Tuple[str, int], ...] = ()
    functions: Tuple[Tuple[str, int], ...] = ()
    constants: Tuple[str, ...] = ()

    @model_validator(mode="after")
    def _check_symbols(self) -> "Vocabulary":
        seen = set()
        for name, arity in list(self.predicates) + list(self.functions):
            if arity < 1:
                raise StructuralError(f"symbol {name!r} must have arity >= 1, got {arity}")
            _check_symbol_name(name, seen)
        for name in self.constants:
            _check_symbol_name(name, seen)
            if BOUND_NAME_PATTERN.match(name):
                raise StructuralError(f"constant name {name!r} is reserved for bound variables")
        return self

    @property
    def predicate_arities(self) -> Dict[str, int]:
        return dict(self.predicates)

    @property
    def function_arities(self) -> Dict[str, int]:
        return dict(self.functions)

    @property
    def symbols(self) -> List[str]:
        return [n for n, _ in self.predicates] + [n for n, _ in self.functions] + list(self.constants)

    @property
    def is_relational(self) -> bool:
        return not self.functions

    def predicate_arity(self, name: str) -> Optional[int]:
        return self.predicate_arities.get(name)

    def function_arity(self, name: str) -> Optional[int]:
        return self.function_arities.get(name)

    def has_constant(self, name: str) -> bool:
        return name in self.constants

    def fresh_symbol(self, base: str) -> str:
        """`base`, or `base` with trailing primes if it is already taken."""
        taken = set(self.symbols)
        name = base
        while name in taken:
            name += "'"
        return name

    def with_predicates(self, predicates: Tuple[Tuple[str, int], ...]) -> "Vocabulary":
        return Vocabulary(predicates=tuple(self.predicates) + tuple(predicates),
                          functions=self.functions, constants=self.constants)

    def relational_part(self) -> "Vocabulary":
        return Vocabulary(predicates=self.predicates, constants=self.constants)

    def reordered(self) -> "Vocabulary":
        """Same symbols with the predicate declaration order reversed."""
        return Vocabulary(predicates=tuple(reversed(self.predicates)),
                          functions=self.functions, constants=self.constants)
