"""
Ultrafilters over finite index sets, pre-ultraproducts and ultraproducts.

Over a finite index set every ultrafilter is principal, so a limit picks one
coordinate. Products still go through the general construction: coordinate
tables, limits, then reduction.
"""
import itertools
import logging
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from app.core.kernel import TruthValue, format_rational
from app.models.reports import CheckStatus, LosReport, LosViolation
from app.models.structure import GeneralStructure
from app.models.syntax import Formula
from app.services.reduction import reduce
from app.services.semantics import assignments, check_formula, evaluator_for, require_same_vocabulary
from app.services.textio import serialize_formula
from app.utils.error_handling import UltrafilterError

# Configure logging
logger = logging.getLogger(__name__)

Family = Mapping[str, GeneralStructure]


class Ultrafilter(BaseModel):
    """The principal ultrafilter at `principal_at` over a finite index set."""
    model_config = ConfigDict(frozen=True)

    index_set: Tuple[str, ...]
    principal_at: str

    @model_validator(mode="after")
    def _check_index(self) -> "Ultrafilter":
        if not self.index_set:
            raise UltrafilterError("the index set must be non-empty")
        if len(set(self.index_set)) != len(self.index_set):
            raise UltrafilterError("index labels must be distinct")
        if self.principal_at not in self.index_set:
            raise UltrafilterError(f"{self.principal_at!r} is not an index")
        return self

    def contains(self, subset) -> bool:
        """S is in the ultrafilter iff it contains the principal index."""
        return self.principal_at in set(subset)


def enumerate_ultrafilters(index_set: Sequence[str]) -> List[Ultrafilter]:
    """All ultrafilters over a finite index set, one principal per index."""
    index_set = tuple(index_set)
    if not index_set:
        raise UltrafilterError("the index set must be non-empty")
    return [Ultrafilter(index_set=index_set, principal_at=i) for i in index_set]


def ulim(D: Ultrafilter, g: Mapping[str, TruthValue]) -> TruthValue:
    """
    The D-limit of a truth-value family.

    Args:
        D: Ultrafilter over I
        g: Value for every index of I

    Returns:
        g at the principal index
    """
    missing = [i for i in D.index_set if i not in g]
    if missing:
        raise UltrafilterError(f"family is not total on the index set: missing {missing}")
    return TruthValue(g[D.principal_at])


def product_label(coordinates: Sequence[str]) -> str:
    return "⟨" + ",".join(coordinates) + "⟩"


def _factors(family: Family, D: Ultrafilter) -> List[GeneralStructure]:
    if not family:
        raise UltrafilterError("the index set must be non-empty")
    if set(family) != set(D.index_set):
        raise UltrafilterError("the family and the ultrafilter use different index sets")
    factors = [family[i] for i in D.index_set]
    require_same_vocabulary(*factors)
    return factors


def product_elements(family: Family, D: Ultrafilter) -> Dict[str, Tuple[str, ...]]:
    """Product labels mapped to their coordinates, in lexicographic order."""
    factors = _factors(family, D)
    return {
        product_label(coords): coords
        for coords in itertools.product(*(m.universe for m in factors))
    }


def pre_ultraproduct(family: Family, D: Ultrafilter) -> GeneralStructure:
    """
    Build the pre-ultraproduct of a finite family.

    Functions and constants act coordinatewise; each predicate value is the
    D-limit of the coordinate values.
    """
    factors = _factors(family, D)
    vocab = factors[0].vocabulary
    elements = product_elements(family, D)
    label_of = {coords: label for label, coords in elements.items()}
    universe = tuple(elements)
    index = D.index_set

    def coordinates(args: Tuple[str, ...], position: int) -> Tuple[str, ...]:
        return tuple(elements[a][position] for a in args)

    predicate_tables = {}
    for name, arity in vocab.predicates:
        table = {}
        for args in itertools.product(universe, repeat=arity):
            g = {i: m.predicate_value(name, coordinates(args, p)) for p, (i, m) in enumerate(zip(index, factors))}
            table[args] = ulim(D, g)
        predicate_tables[name] = table

    function_tables = {}
    for name, arity in vocab.functions:
        function_tables[name] = {
            args: label_of[tuple(m.function_value(name, coordinates(args, p)) for p, m in enumerate(factors))]
            for args in itertools.product(universe, repeat=arity)
        }

    constant_map = {
        name: label_of[tuple(m.constant_value(name) for m in factors)] for name in vocab.constants
    }

    logger.debug(f"Pre-ultraproduct over {len(index)} factor(s) has {len(universe)} element(s)")
    return GeneralStructure(
        vocabulary=vocab,
        universe=universe,
        predicate_tables=predicate_tables,
        function_tables=function_tables,
        constant_map=constant_map,
    )


def ultraproduct_with_map(family: Family, D: Ultrafilter) -> Tuple[GeneralStructure, Dict[str, str], GeneralStructure]:
    """(ultraproduct, quotient map from product labels, pre-ultraproduct)."""
    pre = pre_ultraproduct(family, D)
    reduced, quotient_map = reduce(pre)
    return reduced, quotient_map, pre


def ultraproduct(family: Family, D: Ultrafilter) -> GeneralStructure:
    """The reduction of the pre-ultraproduct."""
    return ultraproduct_with_map(family, D)[0]


def check_los(
    family: Family,
    D: Ultrafilter,
    formulas: Sequence[Formula],
    quotient_map: Optional[Mapping[str, str]] = None,
) -> LosReport:
    """
    Verify the ultraproduct value of every formula against the limit of factor values.

    Every assignment of product elements to a formula's free variables is
    checked. `quotient_map` replaces the computed quotient map, which lets a
    test harness inject a faulty one.
    """
    factors = _factors(family, D)
    reduced, computed_map, pre = ultraproduct_with_map(family, D)
    q = dict(quotient_map) if quotient_map is not None else computed_map
    elements = product_elements(family, D)
    for f in formulas:
        check_formula(reduced, f)

    reduced_eval = evaluator_for(reduced)
    factor_evals = [evaluator_for(m) for m in factors]
    tuples_checked = 0
    for f in formulas:
        variables = f._free_sorted
        for env in assignments(pre, variables):
            tuples_checked += 1
            left = reduced_eval.value(f, {v: q[b] for v, b in env.items()})
            g = {
                i: factor_evals[p].value(f, {v: elements[b][p] for v, b in env.items()})
                for p, i in enumerate(D.index_set)
            }
            right = ulim(D, g)
            if left != right:
                violation = LosViolation(
                    formula=serialize_formula(f),
                    elements=[env[v] for v in variables],
                    ultraproduct_value=format_rational(left),
                    limit_value=format_rational(right),
                )
                logger.warning(f"Limit law fails for {violation.formula} at {violation.elements}")
                return LosReport(
                    status=CheckStatus.FAIL,
                    formulas_checked=len(formulas),
                    tuples_checked=tuples_checked,
                    first_violation=violation,
                )

    logger.info(f"Limit law holds on {len(formulas)} formula(s), {tuples_checked} tuple(s)")
    return LosReport(status=CheckStatus.PASS, formulas_checked=len(formulas), tuples_checked=tuples_checked)
