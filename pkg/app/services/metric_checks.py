"""
Exhaustive checks of pseudo-metric axioms and moduli, and the met axioms.

A distance may be given as a table, a formula in x and y, a binary predicate
of the structure, or an ApproximateDistance. First violations are the least
ones in canonical tuple order.
"""
import itertools
import logging
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple, Union

from app.core.kernel import TruthValue, format_rational
from app.models.reports import (
    CheckStatus,
    ModulusReport,
    ModulusViolation,
    PseudometricReport,
    PseudometricViolation,
    UniformEquivalenceReport,
)
from app.models.structure import GeneralStructure
from app.models.syntax import (
    Formula,
    Theory,
    absdiff,
    atom,
    constant,
    dotminus,
    dotplus,
    fmax,
    fmin,
    scaled,
    sup,
    sup_all,
)
from app.services.expansion import DISTANCE_FRAME, ApproximateDistance, MetricSignature, distance_table
from app.services.semantics import check_formula, evaluator_for
from app.utils.error_handling import EvaluationError, StructuralError

# Configure logging
logger = logging.getLogger(__name__)

DistanceTable = Dict[Tuple[str, str], Fraction]
DistanceLike = Union[Mapping[Tuple[str, str], Fraction], Formula, ApproximateDistance, str]


def distance_values(structure: GeneralStructure, d: DistanceLike) -> DistanceTable:
    """Tabulate a distance on every ordered pair of elements."""
    if isinstance(d, ApproximateDistance):
        return dict(distance_table(structure, d))
    if isinstance(d, Formula):
        x, y = DISTANCE_FRAME
        extra = d.free_vars - {x, y}
        if extra:
            raise StructuralError(f"a distance formula may only use x and y, found {sorted(extra)}")
        check_formula(structure, d)
        evaluator = evaluator_for(structure)
        return {(a, b): evaluator.value(d, {x: a, y: b}) for a, b in structure.tuples(2)}
    if isinstance(d, str):
        if structure.vocabulary.predicate_arity(d) != 2:
            raise StructuralError(f"{d!r} is not a binary predicate of the structure")
        return {(a, b): structure.predicate_value(d, (a, b)) for a, b in structure.tuples(2)}
    table = {tuple(k): TruthValue(v) for k, v in d.items()}
    for pair in structure.tuples(2):
        if pair not in table:
            raise EvaluationError(f"distance table has no entry for {pair}")
    return table


def check_pseudometric(structure: GeneralStructure, d: DistanceLike) -> PseudometricReport:
    """
    Check d(a,a) = 0, symmetry and the triangle inequality over all elements.

    Returns:
        PseudometricReport with the first violation in canonical order
    """
    table = distance_values(structure, d)
    universe = structure.universe
    n = len(universe)

    def fail(axiom: str, elements: List[str], values: Dict[str, Fraction]) -> PseudometricReport:
        violation = PseudometricViolation(
            axiom=axiom, elements=elements, values={k: format_rational(v) for k, v in values.items()}
        )
        logger.warning(f"Pseudo-metric {axiom} fails at {elements}")
        return PseudometricReport(status=CheckStatus.FAIL, triples_checked=n ** 3, first_violation=violation)

    for a in universe:
        if table[(a, a)] != 0:
            return fail("reflexivity", [a], {"d(a,a)": table[(a, a)]})
    for a, b in itertools.product(universe, repeat=2):
        if table[(a, b)] != table[(b, a)]:
            return fail("symmetry", [a, b], {"d(a,b)": table[(a, b)], "d(b,a)": table[(b, a)]})
    for a, b, c in itertools.product(universe, repeat=3):
        if table[(a, c)] > table[(a, b)] + table[(b, c)]:
            return fail(
                "triangle",
                [a, b, c],
                {"d(a,c)": table[(a, c)], "d(a,b)": table[(a, b)], "d(b,c)": table[(b, c)]},
            )

    logger.info(f"Pseudo-metric axioms hold on {n} element(s)")
    return PseudometricReport(status=CheckStatus.PASS, triples_checked=n ** 3)


def check_modulus(
    structure: GeneralStructure,
    predicate: str,
    coefficient: Fraction,
    d: DistanceLike,
    grid: Optional[int] = None,
) -> ModulusReport:
    """
    Check that `predicate` is uniformly continuous with modulus eps / coefficient.

    Without a grid the exact linear form |P(a) - P(b)| <= c * max_i d(a_i, b_i) is
    checked for every pair of tuples. With a grid denominator N, the condition
    checked is the discretized one the met axioms state: for every eps = j/N,
    max_i d(a_i, b_i) < eps / c implies |P(a) - P(b)| <= eps.
    """
    arity = structure.vocabulary.predicate_arity(predicate)
    if arity is None:
        raise StructuralError(f"unknown predicate {predicate!r}")
    coefficient = Fraction(coefficient)
    if coefficient <= 0:
        raise StructuralError(f"modulus coefficient must be positive, got {coefficient}")
    table = distance_values(structure, d)
    epsilons = [Fraction(j, grid) for j in range(1, grid + 1)] if grid else []

    worst_ratio: Optional[Fraction] = None
    worst_pair = None
    unbounded = False
    first_violation: Optional[ModulusViolation] = None
    pairs = 0
    tuples = list(structure.tuples(arity))
    for left in tuples:
        p_left = structure.predicate_value(predicate, left)
        for right in tuples:
            pairs += 1
            gap = abs(p_left - structure.predicate_value(predicate, right))
            dist = max(table[(a, b)] for a, b in zip(left, right))
            bound = coefficient * dist

            if dist > 0:
                ratio = gap / dist
                if not unbounded and (worst_ratio is None or ratio > worst_ratio):
                    worst_ratio, worst_pair = ratio, (list(left), list(right))
            elif gap > 0 and not unbounded:
                unbounded, worst_pair = True, (list(left), list(right))

            if first_violation is not None:
                continue
            if grid:
                broken = next((e for e in epsilons if bound < e and gap > e), None)
                if broken is not None:
                    first_violation = ModulusViolation(
                        left=list(left), right=list(right),
                        gap=format_rational(gap), bound=format_rational(broken),
                    )
            elif gap > bound:
                first_violation = ModulusViolation(
                    left=list(left), right=list(right),
                    gap=format_rational(gap), bound=format_rational(bound),
                )
            if first_violation is not None:
                logger.warning(f"Modulus for {predicate} fails at {list(left)} vs {list(right)}")

    if unbounded:
        ratio_text = "inf"
    else:
        ratio_text = format_rational(worst_ratio) if worst_ratio is not None else None
    return ModulusReport(
        predicate=predicate,
        coefficient=format_rational(coefficient),
        status=CheckStatus.PASS if first_violation is None else CheckStatus.FAIL,
        grid=grid,
        pairs_checked=pairs,
        worst_ratio=ratio_text,
        worst_pair=worst_pair,
        first_violation=first_violation,
    )


def _scaled_distance(distance: Formula, coefficient: Fraction, epsilon: Fraction) -> Formula:
    """eps - min(c * dist, 1), truncated at 0; positive exactly when c * dist < eps."""
    if coefficient.denominator == 1:
        return dotminus(constant(epsilon), scaled(distance, coefficient.numerator))
    delta = epsilon / coefficient
    if delta > 1:
        # every distance is below delta
        return constant(1)
    return dotminus(constant(delta), distance)


def met_axioms(signature: MetricSignature, grid: int) -> Theory:
    """
    Sentences over the expanded vocabulary whose finite models are the pre-metric ones at this grid.

    Three pseudo-metric sentences, then for each predicate and each eps = j/grid
    (j >= 1): sup min(|P(x) - P(y)| - eps, eps - c * max_i D(x_i, y_i)).
    """
    if grid < 1:
        raise StructuralError(f"grid denominator must be positive, got {grid}")
    D = signature.distance_symbol
    x, y = DISTANCE_FRAME
    z = "z"
    sentences = [
        sup(x, atom(D, x, x)),
        sup(x, sup(y, absdiff(atom(D, x, y), atom(D, y, x)))),
        sup(x, sup(y, sup(z, dotminus(atom(D, x, z), dotplus(atom(D, x, y), atom(D, y, z)))))),
    ]
    for name, arity in signature.vocabulary.predicates:
        coefficient = signature.coefficient(name)
        xs = [f"x{i}" for i in range(1, arity + 1)]
        ys = [f"y{i}" for i in range(1, arity + 1)]
        gap = absdiff(atom(name, *xs), atom(name, *ys))
        distance = fmax(*(atom(D, a, b) for a, b in zip(xs, ys)))
        for j in range(1, grid + 1):
            epsilon = Fraction(j, grid)
            body = fmin(dotminus(gap, constant(epsilon)), _scaled_distance(distance, coefficient, epsilon))
            sentences.append(sup_all(xs + ys, body))
    return Theory(tuple(sentences))


def _modulus_table(source: DistanceTable, target: DistanceTable) -> List[Tuple[str, str]]:
    rows = []
    for v in sorted(set(source.values())):
        worst = max(target[pair] for pair, value in source.items() if value <= v)
        rows.append((format_rational(v), format_rational(worst)))
    return rows


def check_uniform_equivalence(structure: GeneralStructure, first: DistanceLike,
                              second: DistanceLike) -> UniformEquivalenceReport:
    """
    Compare the zero sets of two distances and tabulate empirical moduli both ways.

    The forward table maps each value v of the first distance to the largest
    value of the second over pairs where the first is at most v.
    """
    d1 = distance_values(structure, first)
    d2 = distance_values(structure, second)
    mismatch = None
    for pair in structure.tuples(2):
        if (d1[pair] == 0) != (d2[pair] == 0):
            mismatch = list(pair)
            logger.warning(f"Zero sets differ at {mismatch}")
            break
    return UniformEquivalenceReport(
        status=CheckStatus.PASS if mismatch is None else CheckStatus.FAIL,
        zero_sets_equal=mismatch is None,
        first_mismatch=mismatch,
        forward_modulus=_modulus_table(d1, d2),
        backward_modulus=_modulus_table(d2, d1),
    )
