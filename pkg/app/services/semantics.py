"""
Truth-value evaluation on finite general structures.

sup and inf range over the finite universe, so every value is an exact rational.
"""
import itertools
import logging
from fractions import Fraction
from typing import Dict, Iterator, Mapping, Optional, Sequence, Tuple

from app.core.kernel import TruthValue, _apply, format_rational
from app.models.reports import EmbeddingReport, ModelReport
from app.models.structure import GeneralStructure, Partition
from app.models.syntax import (
    Apply,
    Atom,
    Conn,
    Const,
    Elem,
    Formula,
    Quant,
    Term,
    Theory,
    Var,
    check_vocabulary,
    element_literals,
)
from app.models.vocabulary import Vocabulary
from app.services.formula_family import generate_formulas, generate_sentences
from app.services.textio import serialize_formula
from app.utils.error_handling import EvaluationError, StructuralError, VocabularyMismatchError
from config.config import settings

# Configure logging
logger = logging.getLogger(__name__)

_MISSING = object()


class Evaluator:
    """
    Evaluates formulas on one structure, memoizing compound subformulas.

    The memo is emptied whenever it reaches memo_limit entries.
    """

    def __init__(self, structure: GeneralStructure, memo_limit: Optional[int] = None):
        self.structure = structure
        self._universe = structure.universe
        self._memo: Dict[Tuple[int, Tuple[str, ...]], Tuple[Formula, Fraction]] = {}
        self._memo_limit = memo_limit or settings.EVALUATOR_MEMO_LIMIT

    def term_value(self, term: Term, env: Mapping[str, str]) -> str:
        if isinstance(term, Var):
            try:
                return env[term.name]
            except KeyError:
                raise EvaluationError(f"unbound free variable {term.name!r}") from None
        if isinstance(term, Elem):
            if not self.structure.contains(term.label):
                raise EvaluationError(f"foreign element literal {term.label!r}")
            return term.label
        if isinstance(term, Const):
            return self.structure.constant_value(term.name)
        if isinstance(term, Apply):
            args = tuple(self.term_value(a, env) for a in term.args)
            return self.structure.function_value(term.function, args)
        raise StructuralError(f"not a term: {term!r}")

    def value(self, f: Formula, env: Dict[str, str]) -> Fraction:
        """Exact value of f; env must bind every free variable of f."""
        if isinstance(f, Atom):
            args = tuple(self.term_value(a, env) for a in f.args)
            return self.structure.predicate_value(f.predicate, args)
        if isinstance(f, Conn) and not f.args:
            return f.connective.value

        key = (id(f), tuple(env[v] for v in f._free_sorted))
        cached = self._memo.get(key)
        if cached is not None and cached[0] is f:
            return cached[1]

        if isinstance(f, Conn):
            result = _apply(f.connective, [self.value(a, env) for a in f.args])
        else:
            result = self._quantify(f, env)
        if len(self._memo) >= self._memo_limit:
            self._memo.clear()
        self._memo[key] = (f, result)
        return result

    def _quantify(self, f: Quant, env: Dict[str, str]) -> Fraction:
        var = f.var
        saved = env.get(var, _MISSING)
        take_max = f.kind == "sup"
        best: Optional[Fraction] = None
        try:
            for element in self._universe:
                env[var] = element
                v = self.value(f.body, env)
                if best is None or (v > best if take_max else v < best):
                    best = v
                    # the range is [0,1], so an extreme value ends the search
                    if (take_max and best == 1) or (not take_max and best == 0):
                        break
        finally:
            if saved is _MISSING:
                env.pop(var, None)
            else:
                env[var] = saved
        return best


def evaluator_for(structure: GeneralStructure) -> Evaluator:
    """The structure's shared evaluator, kept for as long as the structure lives."""
    return structure.derived("evaluator", lambda: Evaluator(structure))


def assignments(structure: GeneralStructure, variables: Sequence[str]) -> Iterator[Dict[str, str]]:
    """Every assignment of the variables, in universe-lexicographic order."""
    variables = tuple(variables)
    for values in itertools.product(structure.universe, repeat=len(variables)):
        yield dict(zip(variables, values))


def check_formula(structure: GeneralStructure, f: Formula) -> None:
    """Raise unless f can be evaluated on the structure (given an assignment)."""
    check_vocabulary(f, structure.vocabulary)
    for label in sorted(element_literals(f)):
        if not structure.contains(label):
            raise EvaluationError(f"foreign element literal {label!r}", details={"element": label})


def evaluate(structure: GeneralStructure, f: Formula, assignment: Optional[Mapping[str, str]] = None) -> TruthValue:
    """
    Evaluate a formula on a finite general structure.

    Args:
        structure: The structure
        f: The formula, over the structure's vocabulary
        assignment: Elements for (at least) the free variables of f

    Returns:
        The exact truth value
    """
    assignment = dict(assignment or {})
    check_formula(structure, f)
    missing = sorted(f.free_vars - assignment.keys())
    if missing:
        raise EvaluationError(f"unbound free variable(s) {missing}", details={"variables": missing})
    for var, element in assignment.items():
        if not structure.contains(element):
            raise EvaluationError(f"variable {var} is assigned foreign element {element!r}")
    return TruthValue(evaluator_for(structure).value(f, assignment))


def require_same_vocabulary(*structures: GeneralStructure) -> Vocabulary:
    vocab = structures[0].vocabulary
    for other in structures[1:]:
        if other.vocabulary != vocab:
            raise VocabularyMismatchError("structures do not share a vocabulary")
    return vocab


def is_model(structure: GeneralStructure, theory: Theory, tolerance: Fraction = Fraction(0)) -> ModelReport:
    """
    Check whether every sentence of the theory evaluates to 0.

    A positive tolerance relaxes "exactly 0" to "at most tolerance".
    """
    for sentence in theory:
        check_formula(structure, sentence)
    evaluator = evaluator_for(structure)
    for index, sentence in enumerate(theory):
        value = evaluator.value(sentence, {})
        if value > tolerance:
            logger.info(f"Sentence {index} fails with value {format_rational(value)}")
            return ModelReport(
                holds=False,
                sentences_checked=index + 1,
                failing_index=index,
                failing_sentence=serialize_formula(sentence),
                value=format_rational(value),
            )
    return ModelReport(holds=True, sentences_checked=len(theory))


def is_embedding(
    h: Mapping[str, str],
    source: GeneralStructure,
    target: GeneralStructure,
    depth_budget: int = 0,
) -> EmbeddingReport:
    """
    Check that h preserves every atomic value; optionally test elementarity.

    The elementary flag is checked on the canonical formula family up to the
    depth budget: a False is a refutation, a True is bounded evidence.
    """
    vocab = require_same_vocabulary(source, target)
    missing = [a for a in source.universe if a not in h]
    if missing:
        raise StructuralError(f"map is not total: no image for {missing}", details={"missing": missing})
    for a in source.universe:
        if not target.contains(h[a]):
            raise StructuralError(f"map sends {a!r} outside the target universe")

    for name, arity in vocab.predicates:
        for args in source.tuples(arity):
            image = tuple(h[a] for a in args)
            if source.predicate_value(name, args) != target.predicate_value(name, image):
                return EmbeddingReport(
                    embedding=False,
                    depth_budget=depth_budget,
                    witness={"symbol": name, "elements": list(args), "image": list(image)},
                )
    for name, arity in vocab.functions:
        for args in source.tuples(arity):
            image = tuple(h[a] for a in args)
            if h[source.function_value(name, args)] != target.function_value(name, image):
                return EmbeddingReport(
                    embedding=False,
                    depth_budget=depth_budget,
                    witness={"symbol": name, "elements": list(args), "image": list(image)},
                )
    for name in vocab.constants:
        if h[source.constant_value(name)] != target.constant_value(name):
            return EmbeddingReport(embedding=False, depth_budget=depth_budget, witness={"symbol": name})

    if depth_budget <= 0:
        return EmbeddingReport(embedding=True, depth_budget=depth_budget)

    family = generate_formulas(vocab, depth_budget)
    source_eval, target_eval = evaluator_for(source), evaluator_for(target)
    for f in family:
        variables = f._free_sorted
        for env in assignments(source, variables):
            image = {v: h[e] for v, e in env.items()}
            left, right = source_eval.value(f, env), target_eval.value(f, image)
            if left != right:
                return EmbeddingReport(
                    embedding=True,
                    elementary=False,
                    depth_budget=depth_budget,
                    formulas_checked=len(family),
                    witness={
                        "formula": serialize_formula(f),
                        "assignment": env,
                        "source_value": format_rational(left),
                        "target_value": format_rational(right),
                    },
                )
    return EmbeddingReport(
        embedding=True, elementary=True, depth_budget=depth_budget, formulas_checked=len(family)
    )


def distinguish(
    left: GeneralStructure, right: GeneralStructure, depth_budget: int
) -> Optional[Tuple[Formula, TruthValue]]:
    """
    Search the canonical sentence family for a maximal-gap sentence.

    Returns the first sentence (in generation order) with the largest gap, or
    None when every generated sentence takes equal values in both structures.
    """
    vocab = require_same_vocabulary(left, right)
    left_eval, right_eval = evaluator_for(left), evaluator_for(right)
    best: Optional[Formula] = None
    best_gap = Fraction(0)
    for sentence in generate_sentences(vocab, depth_budget):
        gap = abs(left_eval.value(sentence, {}) - right_eval.value(sentence, {}))
        if gap > best_gap:
            best, best_gap = sentence, gap
    if best is None:
        return None
    return best, TruthValue(best_gap)


def type_partition(
    structure: GeneralStructure, depth_budget: int, positive: bool = False, variable: str = "x"
) -> Partition:
    """
    Group elements that agree on every generated formula in one free variable.

    A bounded surrogate for complete 1-types.
    """
    family = [
        f
        for f in generate_formulas(structure.vocabulary, depth_budget, positive=positive)
        if f.free_vars <= {variable}
    ]
    evaluator = evaluator_for(structure)

    def profile(element: str) -> Tuple[Fraction, ...]:
        env = {variable: element}
        return tuple(evaluator.value(f, dict(env)) for f in family)

    return Partition.from_key(structure.universe, profile)
