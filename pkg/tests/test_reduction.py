"""
Tests for Leibniz partitions and reduction.
"""
import itertools

from hypothesis import given, settings as hypothesis_settings, strategies as st

from app.models.structure import GeneralStructure, Partition
from app.models.syntax import Apply, Atom, Const, Elem, Var
from app.models.vocabulary import Vocabulary
from app.services.formula_family import generate_formulas
from app.services.reduction import leibniz_partition, quotient, reduce
from app.services.semantics import assignments, evaluator_for
from app.services.textio import parse_structure
from app.utils.random_structures import random_structure, random_vocabulary

SEEDS = st.integers(min_value=0, max_value=100_000)
HOLE = "u"


def terms_up_to(structure: GeneralStructure, depth: int):
    """Terms in the hole u with element parameters up to the given depth, one per denotation."""
    evaluator = evaluator_for(structure)

    def denotation(t):
        return tuple(evaluator.term_value(t, {HOLE: e}) for e in structure.universe)

    seen = {}
    base = [Var(HOLE)] + [Elem(e) for e in structure.universe] + [Const(c) for c in structure.vocabulary.constants]
    for t in base:
        seen.setdefault(denotation(t), t)
    for _ in range(depth):
        pool = list(seen.values())
        for name, arity in structure.vocabulary.functions:
            for args in itertools.product(pool, repeat=arity):
                t = Apply(name, tuple(args))
                seen.setdefault(denotation(t), t)
    return list(seen.values())


def atomic_partition(structure: GeneralStructure, depth: int) -> Partition:
    """Elements grouped by their values on every atomic formula over terms_up_to."""
    terms = terms_up_to(structure, depth)
    atoms = [
        Atom(name, tuple(args))
        for name, arity in structure.vocabulary.predicates
        for args in itertools.product(terms, repeat=arity)
    ]
    evaluator = evaluator_for(structure)
    return Partition.from_key(structure.universe, lambda e: tuple(evaluator.value(a, {HOLE: e}) for a in atoms))


class TestLeibnizPartition:
    """Tests for leibniz_partition."""

    def test_twins_collapse(self, twins):
        partition = leibniz_partition(twins)
        assert partition.blocks == (("a",), ("b", "c"))

    def test_distinct_values_give_identity(self, m0):
        assert leibniz_partition(m0).is_identity

    def test_functions_refine(self, swap):
        # Q is constant and F only permutes the single block
        assert leibniz_partition(swap).blocks == (("a", "b"),)

    def test_function_values_split_blocks(self):
        m = parse_structure(
            "(structure (vocabulary (predicate Q 1) (function F 1)) (universe a b c)"
            " (predicate Q (a 0) (b 1) (c 1)) (function F (a a) (b a) (c b)))"
        )
        # b and c agree on Q, but F(b)=a and F(c)=b lie in different blocks
        assert leibniz_partition(m).blocks == (("a",), ("b",), ("c",))

    def test_term_enumeration_on_fixture(self, swap):
        assert set(atomic_partition(swap, 3).as_sets()) == set(leibniz_partition(swap).as_sets())

    @hypothesis_settings(max_examples=25, deadline=None)
    @given(SEEDS)
    def test_matches_term_enumeration(self, seed):
        # one unary function on at most three elements: every iterate F^k equals one with k <= 3
        vocab = random_vocabulary(seed, max_predicates=2, max_arity=2, functions=1, constants=seed % 2)
        m = random_structure(seed, vocab, size=3, denominator=2)
        assert set(atomic_partition(m, 3).as_sets()) == set(leibniz_partition(m).as_sets())

    @hypothesis_settings(max_examples=25, deadline=None)
    @given(SEEDS)
    def test_matches_atoms_without_functions(self, seed):
        m = random_structure(seed, size=4, denominator=2)
        assert set(atomic_partition(m, 0).as_sets()) == set(leibniz_partition(m).as_sets())


class TestReduce:
    """Tests for quotient and reduce."""

    def test_reduce_twins(self, twins):
        reduced, quotient_map = reduce(twins)
        assert reduced.universe == ("a", "b")
        assert quotient_map == {"a": "a", "b": "b", "c": "b"}
        assert leibniz_partition(reduced).is_identity

    def test_quotient_by_identity(self, m0):
        reduced, quotient_map = quotient(m0, Partition.identity(m0.universe))
        assert reduced == m0
        assert quotient_map == {"a": "a", "b": "b"}

    @hypothesis_settings(max_examples=20, deadline=None)
    @given(SEEDS)
    def test_reduce_is_idempotent(self, seed):
        m = random_structure(seed, size=4, denominator=4)
        reduced, _ = reduce(m)
        again, quotient_map = reduce(reduced)
        assert again == reduced
        assert all(a == b for a, b in quotient_map.items())

    @hypothesis_settings(max_examples=10, deadline=None)
    @given(SEEDS)
    def test_quotient_preserves_formula_values(self, seed):
        vocab = Vocabulary(predicates=(("P", 1), ("R", 2)), functions=(("F", 1),))
        m = random_structure(seed, vocab, size=4, denominator=4)
        reduced, quotient_map = reduce(m)
        left, right = evaluator_for(m), evaluator_for(reduced)
        for f in generate_formulas(vocab, 2, width=40):
            for env in assignments(m, f._free_sorted):
                image = {v: quotient_map[e] for v, e in env.items()}
                assert left.value(f, env) == right.value(f, image)
