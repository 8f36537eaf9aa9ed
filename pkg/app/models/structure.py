import itertools
from typing import Any, Callable, Dict, Hashable, Iterable, Iterator, List, Mapping, Tuple

from pydantic import BaseModel, ConfigDict, PrivateAttr, field_validator, model_validator

from app.core.kernel import TruthValue, as_truth_value
from app.models.vocabulary import Vocabulary
from app.utils.error_handling import StructureError

ElementTuple = Tuple[str, ...]


class GeneralStructure(BaseModel):
    """A finite structure whose predicates take exact truth values in [0,1]."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vocabulary: Vocabulary
    universe: Tuple[str, ...]
    predicate_tables: Dict[str, Dict[ElementTuple, TruthValue]] = {}
    function_tables: Dict[str, Dict[ElementTuple, str]] = {}
    constant_map: Dict[str, str] = {}

    _positions: Dict[str, int] = PrivateAttr(default_factory=dict)
    _derived: Dict[str, Any] = PrivateAttr(default_factory=dict)

    @field_validator("predicate_tables", mode="before")
    @classmethod
    def _coerce_truth_values(cls, tables):
        return {
            name: {tuple(args): as_truth_value(value) for args, value in table.items()}
            for name, table in tables.items()
        }

    @field_validator("function_tables", mode="before")
    @classmethod
    def _coerce_function_keys(cls, tables):
        return {name: {tuple(args): value for args, value in table.items()} for name, table in tables.items()}

    @model_validator(mode="after")
    def _check_totality(self) -> "GeneralStructure":
        if not self.universe:
            raise StructureError("the universe must be non-empty")
        if len(set(self.universe)) != len(self.universe):
            raise StructureError("universe labels must be distinct")
        members = set(self.universe)
        vocab = self.vocabulary

        for name, arity in vocab.predicates:
            table = self.predicate_tables.get(name)
            if table is None:
                raise StructureError(f"incomplete table {name}", details={"symbol": name})
            self._check_table(name, arity, table, members)
        for name in self.predicate_tables:
            if vocab.predicate_arity(name) is None:
                raise StructureError(f"table for undeclared predicate {name}", details={"symbol": name})

        for name, arity in vocab.functions:
            table = self.function_tables.get(name)
            if table is None:
                raise StructureError(f"incomplete table {name}", details={"symbol": name})
            self._check_table(name, arity, table, members)
            for args, value in table.items():
                if value not in members:
                    raise StructureError(
                        f"function {name} maps {args} outside the universe to {value!r}",
                        details={"symbol": name},
                    )
        for name in self.function_tables:
            if vocab.function_arity(name) is None:
                raise StructureError(f"table for undeclared function {name}", details={"symbol": name})

        for name in vocab.constants:
            if self.constant_map.get(name) not in members:
                raise StructureError(f"constant {name} is not bound to an element", details={"symbol": name})
        for name in self.constant_map:
            if not vocab.has_constant(name):
                raise StructureError(f"binding for undeclared constant {name}", details={"symbol": name})

        return self

    @staticmethod
    def _check_table(name: str, arity: int, table: Mapping[ElementTuple, object], members: set) -> None:
        expected = len(members) ** arity
        for args in table:
            if len(args) != arity or any(a not in members for a in args):
                raise StructureError(f"table {name} has a foreign entry {args}", details={"symbol": name})
        if len(table) != expected:
            raise StructureError(f"incomplete table {name}", details={"symbol": name})

    # -- lookups -----------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.universe)

    def __eq__(self, other):
        if not isinstance(other, GeneralStructure):
            return NotImplemented
        return (
            self.vocabulary == other.vocabulary
            and self.universe == other.universe
            and self.predicate_tables == other.predicate_tables
            and self.function_tables == other.function_tables
            and self.constant_map == other.constant_map
        )

    def _position_index(self) -> Dict[str, int]:
        if not self._positions:
            self._positions.update({label: i for i, label in enumerate(self.universe)})
        return self._positions

    def derived(self, key: str, factory: Callable[[], Any]) -> Any:
        """An object computed from this structure once and kept for its lifetime."""
        value = self._derived.get(key)
        if value is None:
            value = self._derived[key] = factory()
        return value

    def contains(self, label: str) -> bool:
        return label in self._position_index()

    def position(self, label: str) -> int:
        return self._position_index()[label]

    def tuples(self, arity: int) -> Iterator[ElementTuple]:
        """All tuples of the given length in universe-lexicographic order."""
        return itertools.product(self.universe, repeat=arity)

    def predicate_value(self, name: str, args: ElementTuple) -> TruthValue:
        return self.predicate_tables[name][tuple(args)]

    def function_value(self, name: str, args: ElementTuple) -> str:
        return self.function_tables[name][tuple(args)]

    def constant_value(self, name: str) -> str:
        return self.constant_map[name]

    def with_predicate_tables(self, vocabulary: Vocabulary,
                              predicate_tables: Dict[str, Dict[ElementTuple, TruthValue]]) -> "GeneralStructure":
        """Same universe, functions and constants over a vocabulary with other predicates."""
        return GeneralStructure(
            vocabulary=vocabulary,
            universe=self.universe,
            predicate_tables=predicate_tables,
            function_tables={n: t for n, t in self.function_tables.items() if vocabulary.function_arity(n)},
            constant_map={n: c for n, c in self.constant_map.items() if vocabulary.has_constant(n)},
        )


class ClassicalStructure(GeneralStructure):
    """A general structure whose predicates only take the values 0 (true) and 1 (false)."""

    @model_validator(mode="after")
    def _check_two_valued(self) -> "ClassicalStructure":
        for name, table in self.predicate_tables.items():
            for args, value in table.items():
                if value not in (0, 1):
                    raise StructureError(
                        f"classical predicate {name}{args} has value {value}, expected 0 or 1",
                        details={"symbol": name},
                    )
        return self

    def holds(self, name: str, args: ElementTuple) -> bool:
        return self.predicate_value(name, args) == 0

    @classmethod
    def from_structure(cls, structure: GeneralStructure) -> "ClassicalStructure":
        return cls(
            vocabulary=structure.vocabulary,
            universe=structure.universe,
            predicate_tables=structure.predicate_tables,
            function_tables=structure.function_tables,
            constant_map=structure.constant_map,
        )


class Partition(BaseModel):
    """A partition of a universe into blocks, in canonical order."""
    model_config = ConfigDict(frozen=True)

    universe: Tuple[str, ...]
    blocks: Tuple[Tuple[str, ...], ...]

    _block_ids: Dict[str, int] = PrivateAttr(default_factory=dict)

    @model_validator(mode="after")
    def _check_cover(self) -> "Partition":
        seen: Dict[str, int] = {}
        for block_id, block in enumerate(self.blocks):
            if not block:
                raise StructureError("partition blocks must be non-empty")
            for element in block:
                if element in seen:
                    raise StructureError(f"element {element!r} lies in two blocks")
                seen[element] = block_id
        if set(seen) != set(self.universe):
            raise StructureError("partition blocks do not cover the universe exactly")
        return self

    @classmethod
    def from_key(cls, universe: Iterable[str], key: Callable[[str], Hashable]) -> "Partition":
        """Group elements with equal keys; blocks ordered by first member."""
        universe = tuple(universe)
        groups: Dict[Hashable, List[str]] = {}
        for element in universe:
            groups.setdefault(key(element), []).append(element)
        return cls(universe=universe, blocks=tuple(tuple(g) for g in groups.values()))

    @classmethod
    def identity(cls, universe: Iterable[str]) -> "Partition":
        universe = tuple(universe)
        return cls(universe=universe, blocks=tuple((e,) for e in universe))

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.universe == other.universe and self.blocks == other.blocks

    def _index(self) -> Dict[str, int]:
        if not self._block_ids:
            self._block_ids.update(
                {element: block_id for block_id, block in enumerate(self.blocks) for element in block}
            )
        return self._block_ids

    def block_id(self, element: str) -> int:
        return self._index()[element]

    def same_block(self, a: str, b: str) -> bool:
        index = self._index()
        return index[a] == index[b]

    def representative(self, element: str) -> str:
        return self.blocks[self._index()[element]][0]

    @property
    def is_identity(self) -> bool:
        return len(self.blocks) == len(self.universe)

    def as_sets(self) -> List[frozenset]:
        return [frozenset(b) for b in self.blocks]
