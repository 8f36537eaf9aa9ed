"""
Leibniz equality and reduction of finite general structures.

The partition is the greatest fixpoint of signature refinement (see
docs/leibniz_refinement.md for why one-position substitutions suffice).
"""
import itertools
import logging
from typing import Dict, Hashable, List, Tuple

from app.models.structure import ElementTuple, GeneralStructure, Partition

# Configure logging
logger = logging.getLogger(__name__)


def _substitutions(structure: GeneralStructure, arity: int, position: int,
                   element: str) -> List[ElementTuple]:
    """Every arity-tuple with `element` at `position`, others in universe order."""
    return [
        others[:position] + (element,) + others[position:]
        for others in structure.tuples(arity - 1)
    ]


def _predicate_profile(structure: GeneralStructure, element: str) -> Tuple[Hashable, ...]:
    profile = []
    for name, arity in structure.vocabulary.predicates:
        for position in range(arity):
            profile.append(tuple(
                structure.predicate_value(name, args)
                for args in _substitutions(structure, arity, position, element)
            ))
    return tuple(profile)


def _function_profile(structure: GeneralStructure, element: str, partition: Partition) -> Tuple[Hashable, ...]:
    profile = []
    for name, arity in structure.vocabulary.functions:
        for position in range(arity):
            profile.append(tuple(
                partition.block_id(structure.function_value(name, args))
                for args in _substitutions(structure, arity, position, element)
            ))
    return tuple(profile)


def leibniz_partition(structure: GeneralStructure) -> Partition:
    """
    Compute the coarsest partition invariant under one-position substitution.

    Starts from the split by predicate values and refines by the blocks of
    function values until the number of blocks stops growing.

    Args:
        structure: A finite general structure

    Returns:
        The Leibniz partition, blocks ordered by first member
    """
    universe = structure.universe
    predicate_profiles = {a: _predicate_profile(structure, a) for a in universe}
    partition = Partition.from_key(universe, predicate_profiles.__getitem__)

    rounds = 0
    while structure.vocabulary.functions:
        rounds += 1
        current = partition
        refined = Partition.from_key(
            universe,
            lambda a: (current.block_id(a), _function_profile(structure, a, current)),
        )
        if len(refined.blocks) == len(current.blocks):
            break
        partition = refined

    logger.debug(f"Leibniz partition: {len(partition.blocks)} block(s) after {rounds} refinement round(s)")
    return partition


def quotient(structure: GeneralStructure, partition: Partition) -> Tuple[GeneralStructure, Dict[str, str]]:
    """Quotient by a congruence, labelling each block by its first element."""
    rep = partition.representative
    universe = tuple(block[0] for block in partition.blocks)
    vocab = structure.vocabulary

    def tuples(arity: int):
        return itertools.product(universe, repeat=arity)

    predicate_tables = {
        name: {args: structure.predicate_value(name, args) for args in tuples(arity)}
        for name, arity in vocab.predicates
    }
    function_tables = {
        name: {args: rep(structure.function_value(name, args)) for args in tuples(arity)}
        for name, arity in vocab.functions
    }
    constant_map = {name: rep(structure.constant_value(name)) for name in vocab.constants}

    reduced = GeneralStructure(
        vocabulary=vocab,
        universe=universe,
        predicate_tables=predicate_tables,
        function_tables=function_tables,
        constant_map=constant_map,
    )
    return reduced, {a: rep(a) for a in structure.universe}


def reduce(structure: GeneralStructure) -> Tuple[GeneralStructure, Dict[str, str]]:
    """
    Quotient a structure by its Leibniz partition.

    Returns:
        (reduced structure, quotient map from elements to block representatives)
    """
    partition = leibniz_partition(structure)
    logger.info(f"Reducing {structure.size} element(s) to {len(partition.blocks)}")
    return quotient(structure, partition)
