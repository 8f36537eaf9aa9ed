"""
Full-size seeded sweeps over random structures.

The test suite runs the same properties at reduced sizes. This script runs
them at the sizes the toolkit is accepted at and prints one JSON summary.

    python scripts/acceptance_sweep.py --seed 0
    python scripts/acceptance_sweep.py --only los expansion
"""
import argparse
import json
import logging
import os
import random
import sys
import time
from fractions import Fraction

# Add parent directory to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app.models.interpretation import Interpretation, PositiveFormula
from app.models.reports import CheckStatus
from app.models.syntax import FormulaSequence, LEMMA_SCHEDULE, atom, constant
from app.models.vocabulary import Vocabulary
from app.services.cauchy import check_cauchy
from app.services.expansion import check_ultraproduct_commutation, distance_table, synthesize_distance
from app.services.formula_family import generate_formulas
from app.services.metric_checks import check_modulus, check_pseudometric, distance_values
from app.services.positive_interpretation import check_interpretation_conditions, check_type_transfer, upgrade
from app.services.reduction import leibniz_partition, reduce
from app.services.semantics import assignments, evaluator_for
from app.services.textio import parse_structure, serialize_structure
from app.services.transforms import force_convergence, pseudometrize_formula
from app.services.ultra import check_los, enumerate_ultrafilters
from app.utils.random_structures import (
    complement_pair_interpretation,
    random_classical_structure,
    random_family,
    random_structure,
)
from config.config import settings

logger = logging.getLogger("acceptance_sweep")

BINARY = Vocabulary(predicates=(("R", 2),))


def sweep_los(rng):
    failures = 0
    checked = 0
    for factors in (1, 2, 3):
        for _ in range(5):
            family = random_family(rng, factors, max_size=3)
            vocab = next(iter(family.values())).vocabulary
            formulas = generate_formulas(vocab, 3)
            for D in enumerate_ultrafilters(tuple(family)):
                report = check_los(family, D, formulas)
                checked += report.tuples_checked
                failures += report.status != CheckStatus.PASS
    return {"tuples": checked, "failures": failures}


def sweep_expansion(rng, corpus):
    failures = 0
    for m in corpus:
        distance, signature, sequence = synthesize_distance(m.vocabulary)
        table = distance_table(m, distance)
        ok = check_pseudometric(m, table).status == CheckStatus.PASS
        for name, _ in m.vocabulary.predicates:
            ok &= check_modulus(m, name, signature.coefficient(name), table).status == CheckStatus.PASS
        ok &= check_cauchy(sequence, [m]).status == CheckStatus.PASS
        failures += not ok
    return {"structures": len(corpus), "failures": failures}


def sweep_kernel(rng, corpus):
    failures = 0
    for m in corpus:
        table = distance_table(m, synthesize_distance(m.vocabulary)[0])
        partition = leibniz_partition(m)
        failures += any((value == 0) != partition.same_block(a, b) for (a, b), value in table.items())
    return {"structures": len(corpus), "failures": failures}


def sweep_reordering(rng, corpus):
    failures = 0
    for m in corpus:
        forward = distance_table(m, synthesize_distance(m.vocabulary)[0])
        backward = distance_table(m, synthesize_distance(m.vocabulary.reordered())[0])
        failures += {k for k, v in forward.items() if v == 0} != {k for k, v in backward.items() if v == 0}
    return {"structures": len(corpus), "failures": failures}


def sweep_quotient(rng, corpus):
    failures = 0
    for m in corpus[:50]:
        reduced, q = reduce(m)
        source, target = evaluator_for(m), evaluator_for(reduced)
        ok = True
        for f in generate_formulas(m.vocabulary, 3):
            for env in assignments(m, f._free_sorted):
                if source.value(f, env) != target.value(f, {v: q[e] for v, e in env.items()}):
                    ok = False
                    break
            if not ok:
                break
        again, _ = reduce(reduced)
        ok &= again.size == reduced.size
        failures += not ok
    return {"structures": min(len(corpus), 50), "failures": failures}


def sweep_commutation(rng):
    failures = 0
    for _ in range(25):
        family = random_family(rng, rng.randint(1, 3), max_size=3)
        vocab = next(iter(family.values())).vocabulary
        distance = synthesize_distance(vocab)[0]
        for D in enumerate_ultrafilters(tuple(family)):
            failures += check_ultraproduct_commutation(family, D, distance).status != CheckStatus.PASS
    return {"families": 25, "failures": failures}


def sweep_transforms(rng):
    failures = 0
    for _ in range(50):
        m = random_structure(rng, BINARY, size=rng.randint(1, 4))
        evaluator = evaluator_for(m)

        seq = FormulaSequence(
            tuple(rng.choice((atom("R", "x", "y"), atom("R", "y", "x"), constant(0), constant(1))) for _ in range(6))
        )
        forced = force_convergence(seq, LEMMA_SCHEDULE)
        for env in assignments(m, ("x", "y")):
            values = [evaluator.value(f, env) for f in forced.entries]
            failures += any(abs(a - b) > LEMMA_SCHEDULE.bound(k) for k, (a, b) in enumerate(zip(values, values[1:])))

        e = pseudometrize_formula(atom("R", "x", "y"))
        failures += check_pseudometric(m, e).status != CheckStatus.PASS

        relational = random_structure(rng, size=rng.randint(1, 4))
        d = synthesize_distance(relational.vocabulary)[0].formula
        failures += distance_values(relational, pseudometrize_formula(d)) != distance_values(relational, d)
    return {"cases": 50, "failures": failures}


def _injected(K, denominator, lower, upper):
    return Interpretation(
        denominator=denominator,
        predicates=(("R0", 1),),
        lower={("R0", Fraction(j, denominator)): PositiveFormula(lower(j)) for j in range(denominator)},
        upper={("R0", Fraction(j, denominator)): PositiveFormula(upper(j)) for j in range(1, denominator + 1)},
    )


def sweep_interpretations(rng):
    failures = 0
    detected = {"a": 0, "b": 0, "c": 0}
    den = 4
    holds, fails = atom("R0", "x1"), atom("nonR0", "x1")
    for _ in range(25):
        K = random_classical_structure(rng, predicates=2, size=rng.randint(2, 5))
        interp = complement_pair_interpretation(K, den)
        upgraded = upgrade(interp, K)
        failures += any(
            upgraded.predicate_value(name, (e,)) != K.predicate_value(name, (e,))
            for name, _ in interp.predicates for e in K.universe
        )
        failures += check_type_transfer(interp, K, 2) is not None

        some_hold = any(K.holds("R0", (e,)) for e in K.universe)
        some_fail = any(not K.holds("R0", (e,)) for e in K.universe)
        cases = {
            # lower(0) is everything, later lower sets shrink
            "a": (some_fail, _injected(K, den, lambda j: constant(0) if j == 0 else holds, lambda j: fails)),
            # upper(1) is everything and meets lower(0)
            "b": (some_hold, _injected(K, den, lambda j: holds, lambda j: constant(0) if j == den else fails)),
            # upper sets above 0 are empty
            "c": (some_fail, _injected(K, den, lambda j: holds, lambda j: constant(1))),
        }
        for condition, (applicable, injected) in cases.items():
            if not applicable:
                continue
            report = check_interpretation_conditions(injected, K)
            if report.conditions[condition] == CheckStatus.FAIL and condition in report.violations:
                detected[condition] += 1
            else:
                failures += 1
    return {"structures": 25, "detected": detected, "failures": failures}


def sweep_parser(rng):
    failures = 0
    for _ in range(1000):
        m = random_structure(rng, size=rng.randint(1, 3), denominator=8)
        text = serialize_structure(m)
        failures += serialize_structure(parse_structure(text)) != text
    return {"objects": 1000, "failures": failures}


def main():
    parser = argparse.ArgumentParser(description="Run the full-size acceptance sweeps")
    parser.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    parser.add_argument("--only", nargs="*", help="sweep names to run")
    args = parser.parse_args()

    logging.basicConfig(level=settings.LOG_LEVEL, format=settings.LOG_FORMAT, stream=sys.stderr)
    rng = random.Random(args.seed)
    corpus = [random_structure(rng) for _ in range(100)]

    sweeps = {
        "los": lambda: sweep_los(rng),
        "expansion": lambda: sweep_expansion(rng, corpus),
        "kernel": lambda: sweep_kernel(rng, corpus),
        "reordering": lambda: sweep_reordering(rng, corpus),
        "quotient": lambda: sweep_quotient(rng, corpus),
        "commutation": lambda: sweep_commutation(rng),
        "transforms": lambda: sweep_transforms(rng),
        "interpretations": lambda: sweep_interpretations(rng),
        "parser": lambda: sweep_parser(rng),
    }
    summary = {}
    for name, sweep in sweeps.items():
        if args.only and name not in args.only:
            continue
        start = time.time()
        result = sweep()
        result["seconds"] = round(time.time() - start, 2)
        summary[name] = result
        logger.info(f"{name}: {result}")

    print(json.dumps({"seed": args.seed, "sweeps": summary}, indent=2, sort_keys=True))
    return 1 if any(r["failures"] for r in summary.values()) else 0


if __name__ == "__main__":
    sys.exit(main())
