"""
Depth-bounded atomic Morleyization.

Every atomic formula whose terms nest at most k deep is abstracted to a
pattern: the predicate applied to term shapes whose leaves are the distinct
variables x1, x2, ... in order. Each pattern becomes a new predicate whose
arguments are the leaves (variables, constants or element literals) of the
atom it abstracts.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from app.models.structure import GeneralStructure
from app.models.syntax import Apply, Atom, Formula, Term, Var, transform_atoms
from app.models.vocabulary import Vocabulary
from app.services.semantics import evaluator_for
from app.utils.error_handling import DepthExceededError, StructuralError, VocabularyMismatchError

# Configure logging
logger = logging.getLogger(__name__)

_HOLE = Var("_")


def _shapes(vocab: Vocabulary, depth: int) -> List[Term]:
    """Term shapes with holes as leaves, nesting at most `depth`, shallow first."""
    if depth == 0:
        return [_HOLE]
    smaller = _shapes(vocab, depth - 1)
    deeper = [
        Apply(name, tuple(args))
        for name, arity in vocab.functions
        for args in itertools.product(smaller, repeat=arity)
        if any(a.depth == depth - 1 for a in args)
    ]
    return smaller + deeper


def _split(t: Term, leaves: List[Term]) -> Term:
    """Replace each leaf of t by x_i (i counting leaves left to right) and collect the leaves."""
    if isinstance(t, Apply):
        return Apply(t.function, tuple(_split(a, leaves) for a in t.args))
    leaves.append(t)
    return Var(f"x{len(leaves)}")


def abstract_atom(a: Atom) -> Tuple[Atom, Tuple[Term, ...]]:
    """(pattern, leaves) for an atomic formula."""
    leaves: List[Term] = []
    pattern = Atom(a.predicate, tuple(_split(arg, leaves) for arg in a.args))
    return pattern, tuple(leaves)


@dataclass(frozen=True)
class MorleyTranslation:
    """Maps formulas of depth at most `depth` to the relational vocabulary."""
    source: Vocabulary
    target: Vocabulary
    depth: int
    definitions: Dict[str, Atom] = field(default_factory=dict)
    names: Dict[Atom, str] = field(default_factory=dict)

    def translate_atom(self, a: Atom) -> Atom:
        nesting = max((t.depth for t in a.args), default=0)
        if nesting > self.depth:
            raise DepthExceededError(
                f"atom over {a.predicate} nests terms {nesting} deep; the translation covers depth {self.depth}",
                details={"depth": nesting, "limit": self.depth},
            )
        pattern, leaves = abstract_atom(a)
        return Atom(self.names[pattern], leaves)

    def translate(self, f: Formula) -> Formula:
        """
        Rewrite every atom into the relational vocabulary.

        Raises:
            DepthExceededError: if some term nests deeper than the translation depth
        """
        return transform_atoms(f, self.translate_atom)

    def __call__(self, f: Formula) -> Formula:
        return self.translate(f)


def morleyize(vocab: Vocabulary, structure: GeneralStructure, depth: int
              ) -> Tuple[Vocabulary, GeneralStructure, MorleyTranslation]:
    """
    Replace function symbols by one predicate per atomic pattern up to `depth`.

    Args:
        vocab: Vocabulary of the structure
        structure: Structure to translate
        depth: Maximum term nesting k >= 1

    Returns:
        (relational vocabulary, translated structure, translation)
    """
    if depth < 1:
        raise StructuralError(f"Morleyization depth must be at least 1, got {depth}")
    if structure.vocabulary != vocab:
        raise VocabularyMismatchError("the structure is not over the given vocabulary")

    shapes = _shapes(vocab, depth)
    taken = set(vocab.symbols)
    definitions: Dict[str, Atom] = {}
    names: Dict[Atom, str] = {}
    predicates = []
    for name, arity in vocab.predicates:
        for index, args in enumerate(itertools.product(shapes, repeat=arity)):
            leaves: List[Term] = []
            pattern = Atom(name, tuple(_split(arg, leaves) for arg in args))
            new_name = f"{name}_m{index}"
            while new_name in taken:
                new_name += "'"
            taken.add(new_name)
            definitions[new_name] = pattern
            names[pattern] = new_name
            predicates.append((new_name, len(leaves)))

    target = Vocabulary(predicates=tuple(predicates), constants=vocab.constants)
    evaluator = evaluator_for(structure)
    tables = {}
    for new_name, arity in predicates:
        pattern = definitions[new_name]
        variables = [f"x{i}" for i in range(1, arity + 1)]
        tables[new_name] = {
            args: evaluator.value(pattern, dict(zip(variables, args)))
            for args in structure.tuples(arity)
        }
    translated = GeneralStructure(
        vocabulary=target,
        universe=structure.universe,
        predicate_tables=tables,
        constant_map=dict(structure.constant_map),
    )
    logger.info(f"Morleyized {len(vocab.predicates)} predicate(s) into {len(predicates)} at depth {depth}")
    return target, translated, MorleyTranslation(
        source=vocab, target=target, depth=depth, definitions=definitions, names=names
    )
