"""
Seeded random structures for tests and acceptance sweeps.

Elements are drawn as copies of a smaller core, so random structures have
non-trivial Leibniz partitions. Every generator takes an explicit seed or
random.Random; nothing reads hidden entropy.
"""
import itertools
import random
from fractions import Fraction
from typing import Dict, Optional, Tuple, Union

from app.core.kernel import TruthValue
from app.models.interpretation import Interpretation
from app.models.structure import ClassicalStructure, GeneralStructure
from app.models.syntax import atom
from app.models.vocabulary import Vocabulary
from config.config import settings

Seed = Union[int, random.Random]


def _rng(seed: Seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_vocabulary(seed: Seed, max_predicates: Optional[int] = None, max_arity: Optional[int] = None,
                      functions: int = 0, constants: int = 0) -> Vocabulary:
    rng = _rng(seed)
    max_predicates = max_predicates or settings.RANDOM_MAX_PREDICATES
    max_arity = max_arity or settings.RANDOM_MAX_ARITY
    predicates = tuple((f"P{i}", rng.randint(1, max_arity)) for i in range(rng.randint(1, max_predicates)))
    return Vocabulary(
        predicates=predicates,
        functions=tuple((f"F{i}", 1) for i in range(functions)),
        constants=tuple(f"c{i}" for i in range(constants)),
    )


def _universe(rng: random.Random, size: Optional[int]) -> Tuple[Tuple[str, ...], Dict[str, str]]:
    """Element labels and the core element each one copies."""
    size = size or rng.randint(1, settings.RANDOM_MAX_UNIVERSE)
    universe = tuple(f"e{i}" for i in range(size))
    core_size = rng.randint(1, size)
    origin = {e: universe[i] if i < core_size else universe[rng.randrange(core_size)]
              for i, e in enumerate(universe)}
    return universe, origin


def random_structure(seed: Seed, vocab: Optional[Vocabulary] = None, size: Optional[int] = None,
                     denominator: Optional[int] = None) -> GeneralStructure:
    """
    A random structure with values j/denominator.

    Args:
        seed: Seed or generator
        vocab: Vocabulary (default: a random relational one)
        size: Universe size (default: random up to RANDOM_MAX_UNIVERSE)
        denominator: Value denominator (default RANDOM_DENOMINATOR)
    """
    rng = _rng(seed)
    vocab = vocab or random_vocabulary(rng)
    denominator = denominator or settings.RANDOM_DENOMINATOR
    universe, origin = _universe(rng, size)
    core = sorted(set(origin.values()), key=universe.index)

    def lift(args: Tuple[str, ...]) -> Tuple[str, ...]:
        return tuple(origin[a] for a in args)

    predicate_tables = {}
    for name, arity in vocab.predicates:
        core_table: Dict[Tuple[str, ...], TruthValue] = {}
        table = {}
        for args in itertools.product(universe, repeat=arity):
            key = lift(args)
            if key not in core_table:
                core_table[key] = TruthValue(Fraction(rng.randint(0, denominator), denominator))
            table[args] = core_table[key]
        predicate_tables[name] = table

    function_tables = {}
    for name, arity in vocab.functions:
        core_table = {}
        table = {}
        for args in itertools.product(universe, repeat=arity):
            key = lift(args)
            if key not in core_table:
                core_table[key] = rng.choice(core)
            table[args] = core_table[key]
        function_tables[name] = table

    constant_map = {name: rng.choice(universe) for name in vocab.constants}
    return GeneralStructure(
        vocabulary=vocab,
        universe=universe,
        predicate_tables=predicate_tables,
        function_tables=function_tables,
        constant_map=constant_map,
    )


def random_family(seed: Seed, factors: int, vocab: Optional[Vocabulary] = None,
                  max_size: int = 3, denominator: int = 4) -> Dict[str, GeneralStructure]:
    """A family indexed by "1".."n" sharing one vocabulary."""
    rng = _rng(seed)
    vocab = vocab or random_vocabulary(rng, max_predicates=2, max_arity=2)
    return {
        str(i): random_structure(rng, vocab, size=rng.randint(1, max_size), denominator=denominator)
        for i in range(1, factors + 1)
    }


def complement_name(name: str) -> str:
    return f"non{name}"


def random_classical_structure(seed: Seed, predicates: int = 2, size: Optional[int] = None) -> ClassicalStructure:
    """
    Unary predicates R0, R1, ... each paired with its complement nonR0, nonR1, ...

    The pairs let positive formulas express both a predicate and its negation.
    """
    rng = _rng(seed)
    names = [f"R{i}" for i in range(predicates)]
    vocab = Vocabulary(predicates=tuple((n, 1) for m in names for n in (m, complement_name(m))))
    universe = tuple(f"e{i}" for i in range(size or rng.randint(1, settings.RANDOM_MAX_UNIVERSE)))
    tables = {}
    for name in names:
        holds = {e: rng.random() < 0.5 for e in universe}
        tables[name] = {(e,): TruthValue(0 if holds[e] else 1) for e in universe}
        tables[complement_name(name)] = {(e,): TruthValue(1 if holds[e] else 0) for e in universe}
    return ClassicalStructure(vocabulary=vocab, universe=universe, predicate_tables=tables)


def complement_pair_interpretation(K: GeneralStructure, denominator: int = 4) -> Interpretation:
    """Interpret each unary R of K with lower sets R and upper sets nonR."""
    interp: Optional[Interpretation] = None
    for name, arity in K.vocabulary.predicates:
        if name.startswith("non"):
            continue
        part = Interpretation.complement_pair(
            denominator, name, arity, atom(name, "x1"), atom(complement_name(name), "x1")
        )
        interp = part if interp is None else interp.merged(part)
    return interp
