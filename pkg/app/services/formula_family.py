"""
Canonical formula families.

Formulas are generated level by level: level 0 holds constants and atoms, and
level n combines at least one level n-1 formula with quantifiers, unary
connectives and binary connectives, in that order. Every formula is kept in
alpha-normal form and duplicates are dropped, so the order is a stable
tie-breaker for searches.
"""
import itertools
import logging
from typing import Iterator, List, Optional, Sequence, Set

from app.core.kernel import ABSDIFF, DOTMINUS, DOTPLUS, MAX, MIN
from app.models.syntax import (
    Apply,
    Atom,
    Conn,
    Const,
    Formula,
    Term,
    Var,
    alpha_normalize,
    constant,
    half,
    inf,
    neg,
    sup,
)
from app.models.vocabulary import Vocabulary
from config.config import settings

# Configure logging
logger = logging.getLogger(__name__)

_BINARY = (DOTMINUS, DOTPLUS, MIN, MAX, ABSDIFF)
_POSITIVE_BINARY = (MIN, MAX)
_COMMUTATIVE = {"dotplus", "min", "max", "absdiff"}


def term_pool(vocab: Vocabulary, variables: Sequence[str]) -> List[Term]:
    """Variables, constant symbols and one-level function applications over variables."""
    pool: List[Term] = [Var(v) for v in variables]
    pool.extend(Const(c) for c in vocab.constants)
    for name, arity in vocab.functions:
        for args in itertools.product(variables, repeat=arity):
            pool.append(Apply(name, tuple(Var(a) for a in args)))
    return pool


def _base_level(vocab: Vocabulary, variables: Sequence[str], positive: bool,
                constants: Sequence[str]) -> Iterator[Formula]:
    if not positive:
        for literal in constants:
            yield constant(literal)
    pool = term_pool(vocab, variables)
    for name, arity in vocab.predicates:
        for args in itertools.product(pool, repeat=arity):
            yield Atom(name, tuple(args))


def _next_level(previous: List[Formula], known: List[Formula], variables: Sequence[str],
                positive: bool) -> Iterator[Formula]:
    for f in previous:
        for v in variables:
            if v in f.free_vars:
                yield sup(v, f)
                yield inf(v, f)
    if not positive:
        for f in previous:
            yield neg(f)
            yield half(f)
    connectives = _POSITIVE_BINARY if positive else _BINARY
    fresh = {id(f) for f in previous}
    for a in previous:
        for b in known:
            for conn in connectives:
                yield Conn(conn, (a, b))
                if id(b) not in fresh or conn.name not in _COMMUTATIVE:
                    yield Conn(conn, (b, a))


def generate_formulas(
    vocab: Vocabulary,
    depth: int,
    variables: Optional[Sequence[str]] = None,
    width: Optional[int] = None,
    positive: bool = False,
    constants: Optional[Sequence[str]] = None,
) -> List[Formula]:
    """
    Generate the canonical formula family up to the given depth.

    Args:
        vocab: Vocabulary the formulas range over
        depth: Maximum nesting of connectives and quantifiers
        variables: Free-variable pool (default settings.FORMULA_VARIABLES)
        width: Cap on new formulas per level (default settings.FORMULA_LEVEL_WIDTH)
        positive: Restrict to min, max, sup and inf over atoms
        constants: Rational literals used as nullary connectives

    Returns:
        Alpha-normal formulas in generation order, without duplicates
    """
    variables = tuple(variables or settings.FORMULA_VARIABLES)
    width = width or settings.FORMULA_LEVEL_WIDTH
    constants = settings.FORMULA_CONSTANTS if constants is None else tuple(constants)

    seen: Set[Formula] = set()
    family: List[Formula] = []

    def take(candidates: Iterator[Formula], cap: Optional[int]) -> List[Formula]:
        level: List[Formula] = []
        for candidate in candidates:
            normal = alpha_normalize(candidate, reserved=variables)
            if normal in seen:
                continue
            seen.add(normal)
            level.append(normal)
            if cap is not None and len(level) >= cap:
                break
        return level

    previous = take(_base_level(vocab, variables, positive, constants), None)
    family.extend(previous)
    for _ in range(depth):
        if not previous:
            break
        previous = take(_next_level(previous, list(family), variables, positive), width)
        family.extend(previous)

    logger.debug(f"Generated {len(family)} formulas up to depth {depth}")
    return family


def generate_sentences(vocab: Vocabulary, depth: int, positive: bool = False) -> List[Formula]:
    """The sentences of the canonical family, in generation order."""
    return [f for f in generate_formulas(vocab, depth, positive=positive) if f.is_sentence]
