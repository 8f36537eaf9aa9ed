"""
[0,1]-valued structures from two-valued ones through positive interpretations.

For a k-ary interpreted P and a tuple b, X is the set of grid points r whose
upper set I(P,[r,1]) contains b and Y the set whose lower set I(P,[0,r])
contains b. The upgraded value is sup X, which must equal inf Y.
"""
import logging
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Tuple

from app.core.kernel import TruthValue, format_rational
from app.models.interpretation import Interpretation, PositiveFormula
from app.models.reports import CheckStatus, InterpretationReport, InterpretationViolation
from app.models.structure import ClassicalStructure, ElementTuple, GeneralStructure, Partition
from app.services.semantics import check_formula, evaluator_for, type_partition
from app.utils.error_handling import InterpretationError

# Configure logging
logger = logging.getLogger(__name__)

CONDITIONS = ("a", "b", "c")


def as_classical(structure: GeneralStructure) -> ClassicalStructure:
    if isinstance(structure, ClassicalStructure):
        return structure
    return ClassicalStructure.from_structure(structure)


def satisfying_tuples(K: GeneralStructure, positive: PositiveFormula, frame: Tuple[str, ...]) -> FrozenSet[ElementTuple]:
    """Tuples on which the formula evaluates to 0."""
    check_formula(K, positive.formula)
    evaluator = evaluator_for(K)
    return frozenset(
        args for args in K.tuples(len(frame))
        if evaluator.value(positive.formula, dict(zip(frame, args))) == 0
    )


def _interval_sets(I: Interpretation, K: GeneralStructure, name: str
                   ) -> Tuple[Dict[Fraction, FrozenSet[ElementTuple]], Dict[Fraction, FrozenSet[ElementTuple]]]:
    frame = I.frame(name)
    lower = {r: satisfying_tuples(K, I.lower_formula(name, r), frame) for r in I.grid()}
    upper = {r: satisfying_tuples(K, I.upper_formula(name, r), frame) for r in I.grid()}
    return lower, upper


def check_interpretation_conditions(I: Interpretation, K: GeneralStructure) -> InterpretationReport:
    """
    Check monotonicity (a), disjointness (b) and covering (c) for all grid pairs r < s.

    (a) lower(r) within lower(s) and upper(s) within upper(r);
    (b) no tuple is in both lower(r) and upper(s);
    (c) every tuple is in lower(s) or upper(r).
    """
    K = as_classical(K)
    violations: Dict[str, InterpretationViolation] = {}
    first: Optional[InterpretationViolation] = None

    def record(condition: str, name: str, r: Fraction, s: Fraction, args: ElementTuple) -> None:
        nonlocal first
        if condition in violations:
            return
        violation = InterpretationViolation(
            condition=condition, predicate=name,
            r=format_rational(r), s=format_rational(s), elements=list(args),
        )
        violations[condition] = violation
        if first is None:
            first = violation
        logger.warning(f"Interpretation condition ({condition}) fails for {name} at r={violation.r}, s={violation.s}")

    grid = I.grid()
    for name, arity in I.predicates:
        lower, upper = _interval_sets(I, K, name)
        tuples = list(K.tuples(arity))
        for i, r in enumerate(grid):
            for s in grid[i + 1:]:
                for args in tuples:
                    if (args in lower[r] and args not in lower[s]) or (args in upper[s] and args not in upper[r]):
                        record("a", name, r, s, args)
                    if args in lower[r] and args in upper[s]:
                        record("b", name, r, s, args)
                    if args not in lower[s] and args not in upper[r]:
                        record("c", name, r, s, args)

    conditions = {c: CheckStatus.FAIL if c in violations else CheckStatus.PASS for c in CONDITIONS}
    status = CheckStatus.FAIL if violations else CheckStatus.PASS
    logger.info(f"Interpretation conditions: {status.value}")
    return InterpretationReport(status=status, conditions=conditions, first_violation=first, violations=violations)


def upgrade(I: Interpretation, K: GeneralStructure) -> GeneralStructure:
    """
    Build the [0,1]-valued structure the interpretation induces on K.

    Same universe, functions and constants as K. Each interpreted P(b) is
    sup X, computed exactly on the grid.

    Raises:
        InterpretationError: with a witness tuple when sup X differs from inf Y
    """
    K = as_classical(K)
    tables: Dict[str, Dict[ElementTuple, TruthValue]] = {}
    for name, arity in I.predicates:
        lower, upper = _interval_sets(I, K, name)
        table = {}
        for args in K.tuples(arity):
            X = [r for r in I.grid() if args in upper[r]]
            Y = [r for r in I.grid() if args in lower[r]]
            if not X or not Y or max(X) != min(Y):
                details = {
                    "predicate": name,
                    "elements": list(args),
                    "sup_X": format_rational(max(X)) if X else None,
                    "inf_Y": format_rational(min(Y)) if Y else None,
                }
                raise InterpretationError(f"sup X and inf Y disagree for {name}{args}", details=details)
            table[args] = TruthValue(max(X))
        tables[name] = table

    vocab = I.target_vocabulary(K.vocabulary)
    return GeneralStructure(
        vocabulary=vocab,
        universe=K.universe,
        predicate_tables=tables,
        function_tables=dict(K.function_tables),
        constant_map=dict(K.constant_map),
    )


def positive_type_partition(K: GeneralStructure, depth_budget: int) -> Partition:
    """Group elements that agree on every generated positive formula in one free variable."""
    return type_partition(as_classical(K), depth_budget, positive=True)


def check_type_transfer(I: Interpretation, K: GeneralStructure, depth_budget: int) -> Optional[List[str]]:
    """
    Look for two elements with equal bounded positive types in K but different
    bounded types in the upgrade. Returns such a pair, or None.
    """
    upgraded = upgrade(I, K)
    positive = positive_type_partition(K, depth_budget)
    continuous = type_partition(upgraded, depth_budget)
    for block in positive.blocks:
        for element in block[1:]:
            if not continuous.same_block(block[0], element):
                logger.warning(f"Bounded types of {block[0]} and {element} split after the upgrade")
                return [block[0], element]
    return None
