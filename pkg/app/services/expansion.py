"""
Pre-metric expansion of relational vocabularies.

Atomic patterns P(u, z1, ...) are arranged in a fixed order. Pattern m
contributes beta_m(x,y) = sup_z |alpha_m(x,z) - alpha_m(y,z)| with weight 2^-m,
and the distance D is the pointwise max of the weighted betas. With finitely
many patterns the limit is reached exactly.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from app.core.kernel import TruthValue, format_rational
from app.models.reports import CheckStatus, LosReport, LosViolation
from app.models.structure import GeneralStructure
from app.models.syntax import (
    EXPONENTIAL_SCHEDULE,
    Atom,
    Formula,
    FormulaSequence,
    Theory,
    absdiff,
    atom,
    constant,
    dotminus,
    dotplus,
    fmax,
    halved,
    sup,
    sup_all,
)
from app.models.vocabulary import Vocabulary
from app.services.semantics import evaluator_for
from app.services.ultra import Family, Ultrafilter, product_elements, ulim, ultraproduct_with_map
from app.utils.error_handling import EvaluationError, ExpansionError
from config.config import settings

# Configure logging
logger = logging.getLogger(__name__)

U = "u"
DISTANCE_FRAME = ("x", "y")


@dataclass(frozen=True)
class AtomicPattern:
    """P applied to u and canonical z-slots, numbered by first occurrence."""
    predicate: str
    slots: Tuple[str, ...]

    def __post_init__(self):
        if U not in self.slots:
            raise ExpansionError(f"pattern {self} has no u slot")

    def __str__(self):
        return f"{self.predicate}({','.join(self.slots)})"

    @property
    def arity(self) -> int:
        return len(self.slots)

    @property
    def z_slots(self) -> Tuple[str, ...]:
        seen: List[str] = []
        for s in self.slots:
            if s != U and s not in seen:
                seen.append(s)
        return tuple(seen)

    def instantiate(self, u_var: str) -> Atom:
        return atom(self.predicate, *(u_var if s == U else s for s in self.slots))

    def beta(self) -> Formula:
        """sup over the z-slots of |alpha(x, z) - alpha(y, z)|."""
        x, y = DISTANCE_FRAME
        return sup_all(self.z_slots, absdiff(self.instantiate(x), self.instantiate(y)))


def _slot_tuples(arity: int) -> List[Tuple[str, ...]]:
    """Restricted-growth slot tuples in lexicographic order under u < z1 < z2 < ..."""
    results: List[Tuple[str, ...]] = []

    def extend(prefix: Tuple[str, ...], used: int) -> None:
        if len(prefix) == arity:
            results.append(prefix)
            return
        extend(prefix + (U,), used)
        for j in range(1, used + 2):
            extend(prefix + (f"z{j}",), max(used, j))

    extend((), 0)
    return results


def require_relational(vocab: Vocabulary) -> None:
    if not vocab.is_relational:
        raise ExpansionError(
            "the vocabulary has function symbols; morleyize it first",
            details={"functions": [n for n, _ in vocab.functions]},
        )


def enumerate_patterns(vocab: Vocabulary) -> List[AtomicPattern]:
    """
    Every u-containing atomic pattern, predicates in declaration order.

    Raises:
        ExpansionError: if the vocabulary has function symbols
    """
    require_relational(vocab)
    return [
        AtomicPattern(name, slots)
        for name, arity in vocab.predicates
        for slots in _slot_tuples(arity)
        if U in slots
    ]


@dataclass(frozen=True)
class ApproximateDistance:
    """Weighted betas; the distance is their pointwise max."""
    terms: Tuple[Tuple[Fraction, Formula], ...] = ()
    patterns: Tuple[AtomicPattern, ...] = ()

    def __len__(self):
        return len(self.terms)

    def approximations(self) -> List[Formula]:
        """d_0, d_1, ... with d_m = max(d_(m-1), 2^-m beta_m), sharing subformulas."""
        result: List[Formula] = []
        current: Optional[Formula] = None
        for m, (_, beta) in enumerate(self.terms):
            weighted = halved(beta, m)
            current = weighted if current is None else fmax(current, weighted)
            result.append(current)
        return result

    @property
    def formula(self) -> Formula:
        """The limit distance in free variables x, y (constant 0 when empty)."""
        approximations = self.approximations()
        return approximations[-1] if approximations else constant(0)


@dataclass(frozen=True)
class MetricSignature:
    """A distance symbol and a linear modulus coefficient per predicate."""
    vocabulary: Vocabulary
    distance_symbol: str
    moduli: Dict[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        for name, c in self.moduli.items():
            if c <= 0:
                raise ExpansionError(f"modulus coefficient for {name} must be positive, got {c}")

    def coefficient(self, name: str) -> Fraction:
        return self.moduli[name]

    def modulus(self, name: str, epsilon: Fraction) -> Fraction:
        """The delta that guarantees an output change below epsilon."""
        return Fraction(epsilon) / self.moduli[name]

    @property
    def expanded_vocabulary(self) -> Vocabulary:
        return self.vocabulary.with_predicates(((self.distance_symbol, 2),))

    def as_json(self) -> Dict[str, str]:
        return {name: format_rational(c) for name, c in self.moduli.items()}


def _modulus_index(patterns: Sequence[AtomicPattern], name: str, arity: int) -> int:
    """Largest global index among the patterns with u at one place and distinct z's elsewhere."""
    index = {(p.predicate, p.slots): m for m, p in enumerate(patterns)}
    worst = 0
    for position in range(arity):
        slots, j = [], 0
        for i in range(arity):
            if i == position:
                slots.append(U)
            else:
                j += 1
                slots.append(f"z{j}")
        worst = max(worst, index[(name, tuple(slots))])
    return worst


def synthesize_distance(vocab: Vocabulary) -> Tuple[ApproximateDistance, MetricSignature, FormulaSequence]:
    """
    Build the approximate distance, its metric signature and the d_m sequence.

    Args:
        vocab: A relational vocabulary

    Returns:
        (distance, signature with c_P = 2^m * k, d_m sequence with schedule 2^-m)
    """
    patterns = enumerate_patterns(vocab)
    terms = tuple((Fraction(1, 2 ** m), p.beta()) for m, p in enumerate(patterns))
    distance = ApproximateDistance(terms=terms, patterns=tuple(patterns))

    moduli = {
        name: Fraction(2 ** _modulus_index(patterns, name, arity) * arity)
        for name, arity in vocab.predicates
    }
    signature = MetricSignature(
        vocabulary=vocab,
        distance_symbol=vocab.fresh_symbol(settings.DISTANCE_SYMBOL),
        moduli=moduli,
    )
    entries = tuple(distance.approximations()) or (constant(0),)
    sequence = FormulaSequence(entries, frame=DISTANCE_FRAME, schedule=EXPONENTIAL_SCHEDULE)

    logger.info(f"Synthesized a distance from {len(patterns)} pattern(s)")
    return distance, signature, sequence


def eval_distance(structure: GeneralStructure, distance: ApproximateDistance, a: str, b: str) -> TruthValue:
    """max over m of 2^-m * beta_m(a, b), exactly."""
    for element in (a, b):
        if not structure.contains(element):
            raise EvaluationError(f"foreign element {element!r}", details={"element": element})
    evaluator = evaluator_for(structure)
    x, y = DISTANCE_FRAME
    best = Fraction(0)
    for weight, beta in distance.terms:
        if weight <= best:
            # weights only decrease and every beta is at most 1
            break
        value = weight * evaluator.value(beta, {x: a, y: b})
        if value > best:
            best = value
    return TruthValue(best)


def distance_table(structure: GeneralStructure, distance: ApproximateDistance) -> Dict[Tuple[str, str], TruthValue]:
    return {
        (a, b): eval_distance(structure, distance, a, b)
        for a in structure.universe
        for b in structure.universe
    }


def expand_structure(structure: GeneralStructure, distance: ApproximateDistance,
                     signature: MetricSignature) -> GeneralStructure:
    """The pre-metric expansion: the structure plus a table for the distance symbol."""
    return expand_with_table(structure, signature, distance_table(structure, distance))


def expand_with_table(structure: GeneralStructure, signature: MetricSignature,
                      table: Mapping[Tuple[str, str], Fraction]) -> GeneralStructure:
    """The structure with `table` interpreting the signature's distance symbol."""
    tables = dict(structure.predicate_tables)
    tables[signature.distance_symbol] = dict(table)
    return structure.with_predicate_tables(signature.expanded_vocabulary, tables)


def definitional_axioms(distance: ApproximateDistance, signature: MetricSignature) -> Theory:
    """
    For each m: sup_x sup_y max(d_m - D, D - (d_m + 2^-m)), truncated at 0.

    The expansion by the limit distance models every one of them.
    """
    x, y = DISTANCE_FRAME
    d_symbol = atom(signature.distance_symbol, x, y)
    approximations = distance.approximations() or [constant(0)]
    sentences = []
    for m, d_m in enumerate(approximations):
        upper = dotplus(d_m, constant(Fraction(1, 2 ** m)))
        sentences.append(sup(x, sup(y, fmax(dotminus(d_m, d_symbol), dotminus(d_symbol, upper)))))
    return Theory(tuple(sentences))


def check_ultraproduct_commutation(family: Family, D: Ultrafilter, distance: ApproximateDistance) -> LosReport:
    """
    The distance of two ultraproduct elements equals the limit of factor distances.

    Checked for every pair of pre-ultraproduct elements through the quotient map.
    """
    reduced, quotient_map, pre = ultraproduct_with_map(family, D)
    elements = product_elements(family, D)
    index = D.index_set
    checked = 0
    for a in pre.universe:
        for b in pre.universe:
            checked += 1
            left = eval_distance(reduced, distance, quotient_map[a], quotient_map[b])
            right = ulim(D, {
                i: eval_distance(family[i], distance, elements[a][p], elements[b][p])
                for p, i in enumerate(index)
            })
            if left != right:
                violation = LosViolation(
                    formula="distance",
                    elements=[a, b],
                    ultraproduct_value=format_rational(left),
                    limit_value=format_rational(right),
                )
                logger.warning(f"Distance does not commute with the ultraproduct at ({a}, {b})")
                return LosReport(status=CheckStatus.FAIL, formulas_checked=1, tuples_checked=checked,
                                 first_violation=violation)
    return LosReport(status=CheckStatus.PASS, formulas_checked=1, tuples_checked=checked)

