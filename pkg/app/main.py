"""
Command-line entry point for the continuous-logic toolkit.

Every run writes exactly one JSON report. Exit status 0 means success, 1 a
failed check (the report carries a witness) and 2 an input error.
"""
import argparse
import json
import logging
import os
import random
import sys
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from app.core.kernel import format_rational, parse_rational
from app.models.reports import CheckStatus, CommandReport
from app.models.structure import GeneralStructure
from app.models.syntax import FormulaSequence, Var, schedule_from_text, substitute
from app.models.vocabulary import Vocabulary
from app.services.cauchy import check_cauchy
from app.services.expansion import (
    MetricSignature,
    check_ultraproduct_commutation,
    definitional_axioms,
    distance_table,
    expand_structure,
    expand_with_table,
    synthesize_distance,
)
from app.services.formula_family import generate_formulas
from app.services.metric_checks import check_modulus, check_pseudometric, distance_values, met_axioms
from app.services.morleyization import morleyize
from app.services.positive_interpretation import check_interpretation_conditions, upgrade
from app.services.reduction import leibniz_partition, reduce
from app.services.semantics import distinguish, evaluate, is_model, require_same_vocabulary
from app.services.textio import (
    parse_assignment,
    parse_formula,
    parse_interpretation,
    parse_sequence,
    parse_structure,
    parse_theory,
    parse_vocabulary,
    serialize_formula,
    serialize_sequence,
    serialize_structure,
    serialize_vocabulary,
)
from app.services.transforms import force_convergence, pseudometrize
from app.services.ultra import Ultrafilter, check_los, enumerate_ultrafilters, ultraproduct_with_map
from app.utils.error_handling import (
    EXIT_CHECK_FAILED,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    AppError,
    InterpretationError,
    UsageError,
    format_error_response,
    log_error,
)
from app.utils.random_structures import random_structure
from config.config import settings

logger = logging.getLogger(__name__)

Outcome = Tuple[CheckStatus, List[Dict[str, Any]], Dict[str, Any]]


class ReportingArgumentParser(argparse.ArgumentParser):
    """Argument errors become UsageError so they still produce a report."""

    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------

def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}", details={"path": path}) from None


def _text_or_file(value: str) -> str:
    """A flag value naming an existing file is read; anything else is inline text."""
    return _read(value) if os.path.isfile(value) else value


def _structures(args, minimum: int = 1) -> List[GeneralStructure]:
    paths = args.structure or []
    if len(paths) < minimum:
        raise UsageError(f"{args.command} needs at least {minimum} --structure")
    return [parse_structure(_read(p)) for p in paths]


def _require(args, name: str) -> str:
    value = getattr(args, name)
    if value is None:
        raise UsageError(f"{args.command} needs --{name}")
    return value


def _family(args) -> Dict[str, GeneralStructure]:
    structures = _structures(args)
    require_same_vocabulary(*structures)
    return {str(i): m for i, m in enumerate(structures, start=1)}


def _depth(args) -> int:
    return settings.DEFAULT_DEPTH if args.depth is None else args.depth


def _rational_option(flag: str, text: str) -> Fraction:
    try:
        return parse_rational(text.strip())
    except ValueError as e:
        raise UsageError(f"{flag}: {e}", details={"option": flag, "value": text}) from None


def _moduli(args, vocab: Vocabulary) -> Dict[str, Fraction]:
    """Coefficients given as --modulus P=p/q."""
    moduli: Dict[str, Fraction] = {}
    for item in args.modulus or []:
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or vocab.predicate_arity(name) is None:
            raise UsageError(f"--modulus expects PREDICATE=p/q over the structure's predicates, got {item!r}",
                             details={"option": "--modulus", "value": item})
        coefficient = _rational_option("--modulus", value)
        if coefficient <= 0:
            raise UsageError(f"--modulus for {name} must be positive, got {value.strip()}",
                             details={"option": "--modulus", "value": item})
        moduli[name] = coefficient
    return moduli


def _status(passed: bool) -> CheckStatus:
    return CheckStatus.PASS if passed else CheckStatus.FAIL


def _dump(model) -> Dict[str, Any]:
    return model.model_dump(mode="json")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_eval(args) -> Outcome:
    structure = _structures(args)[0]
    f = parse_formula(_text_or_file(_require(args, "formula")), structure.vocabulary)
    value = evaluate(structure, f, parse_assignment(args.assign or []))
    return CheckStatus.PASS, [], {"formula": serialize_formula(f), "value": format_rational(value)}


def cmd_check_model(args) -> Outcome:
    structure = _structures(args)[0]
    theory = parse_theory(_read(_require(args, "theory")), structure.vocabulary)
    tolerance = _rational_option("--tolerance", args.tolerance) if args.tolerance else Fraction(0)
    if not 0 <= tolerance <= 1:
        raise UsageError(f"--tolerance must lie in [0,1], got {args.tolerance}",
                         details={"option": "--tolerance", "value": args.tolerance})
    report = is_model(structure, theory, tolerance)
    witnesses = []
    if not report.holds:
        witnesses.append({"sentence": report.failing_sentence, "value": report.value, "index": report.failing_index})
    return report.status, witnesses, _dump(report)


def cmd_reduce(args) -> Outcome:
    structure = _structures(args)[0]
    partition = leibniz_partition(structure)
    reduced, quotient_map = reduce(structure)
    return CheckStatus.PASS, [], {
        "blocks": [list(block) for block in partition.blocks],
        "quotient_map": quotient_map,
        "structure": serialize_structure(reduced),
    }


def cmd_distinguish(args) -> Outcome:
    structures = _structures(args, minimum=2)
    if len(structures) != 2:
        raise UsageError("distinguish takes exactly two --structure")
    found = distinguish(structures[0], structures[1], _depth(args))
    if found is None:
        return CheckStatus.PASS, [], {"distinguished": False, "depth": _depth(args)}
    sentence, gap = found
    witness = {"sentence": serialize_formula(sentence), "gap": format_rational(gap)}
    return CheckStatus.PASS, [witness], {"distinguished": True, "depth": _depth(args)}


def _ultrafilters(args, family: Dict[str, GeneralStructure]) -> List[Ultrafilter]:
    index_set = tuple(family)
    if args.principal is None:
        return enumerate_ultrafilters(index_set)
    return [Ultrafilter(index_set=index_set, principal_at=args.principal)]


def cmd_ultraproduct(args) -> Outcome:
    family = _family(args)
    D = Ultrafilter(index_set=tuple(family), principal_at=args.principal or next(iter(family)))
    reduced, quotient_map, pre = ultraproduct_with_map(family, D)
    return CheckStatus.PASS, [], {
        "principal": D.principal_at,
        "pre_size": pre.size,
        "quotient_map": quotient_map,
        "structure": serialize_structure(reduced),
    }


def cmd_los_check(args) -> Outcome:
    family = _family(args)
    vocab = next(iter(family.values())).vocabulary
    formulas = generate_formulas(vocab, _depth(args))
    distance = synthesize_distance(vocab)[0] if vocab.is_relational else None
    reports = {}
    witnesses = []
    for D in _ultrafilters(args, family):
        checks = [check_los(family, D, formulas)]
        if distance is not None:
            checks.append(check_ultraproduct_commutation(family, D, distance))
        reports[D.principal_at] = [_dump(report) for report in checks]
        for report in checks:
            if report.first_violation is not None:
                witnesses.append({"principal": D.principal_at, **_dump(report.first_violation)})
    return _status(not witnesses), witnesses, {"formulas": len(formulas), "ultrafilters": reports}


def cmd_expand(args) -> Outcome:
    if args.vocab:
        vocab = parse_vocabulary(_read(args.vocab))
        structure = None
    else:
        structure = _structures(args)[0]
        vocab = structure.vocabulary
    distance, signature, sequence = synthesize_distance(vocab)
    values: Dict[str, Any] = {
        "patterns": [str(p) for p in distance.patterns],
        "distance": serialize_formula(distance.formula),
        "signature": signature.as_json(),
        "expanded_vocabulary": serialize_vocabulary(signature.expanded_vocabulary),
        "sequence": serialize_sequence(sequence),
    }
    if structure is None:
        return CheckStatus.PASS, [], values

    expanded = expand_structure(structure, distance, signature)
    report = is_model(expanded, definitional_axioms(distance, signature))
    values["structure"] = serialize_structure(expanded)
    values["definitional_axioms"] = _dump(report)
    witnesses = [] if report.holds else [{"sentence": report.failing_sentence, "value": report.value}]
    return report.status, witnesses, values


def _distance_argument(args, structure: GeneralStructure):
    """A binary predicate name or a formula in x and y."""
    text = _text_or_file(args.distance)
    if structure.vocabulary.predicate_arity(text.strip()) == 2:
        return text.strip()
    return parse_formula(text, structure.vocabulary)


def _given_signature(args, structure: GeneralStructure) -> MetricSignature:
    """Moduli from --modulus; predicates without one get the synthesized coefficient."""
    vocab = structure.vocabulary
    moduli = _moduli(args, vocab)
    missing = [name for name, _ in vocab.predicates if name not in moduli]
    if missing:
        synthesized = synthesize_distance(vocab)[1]
        moduli.update({name: synthesized.coefficient(name) for name in missing})
    return MetricSignature(
        vocabulary=vocab,
        distance_symbol=vocab.fresh_symbol(settings.DISTANCE_SYMBOL),
        moduli=moduli,
    )


def _metric_battery(structure: GeneralStructure, table, signature: MetricSignature,
                    grid: int) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
    """Pseudo-metric axioms, one modulus per predicate and the met axioms for a distance table."""
    witnesses: List[Dict[str, Any]] = []
    values: Dict[str, Any] = {}
    pseudometric = check_pseudometric(structure, table)
    values["pseudometric"] = _dump(pseudometric)
    if pseudometric.first_violation is not None:
        witnesses.append(_dump(pseudometric.first_violation))

    moduli = {}
    for name, _ in structure.vocabulary.predicates:
        report = check_modulus(structure, name, signature.coefficient(name), table, grid=grid)
        moduli[name] = _dump(report)
        if report.first_violation is not None:
            witnesses.append({"predicate": name, **_dump(report.first_violation)})
    values["moduli"] = moduli

    expanded = expand_with_table(structure, signature, table)
    met = is_model(expanded, met_axioms(signature, grid))
    values["met_axioms"] = _dump(met)
    if not met.holds:
        witnesses.append({"sentence": met.failing_sentence, "value": met.value})
    values["signature"] = signature.as_json()
    return witnesses, values


def _synthesized_checks(structure: GeneralStructure, grid: int) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
    """The metric battery plus the Cauchy rate of the synthesized distance."""
    distance, signature, sequence = synthesize_distance(structure.vocabulary)
    witnesses, values = _metric_battery(structure, distance_table(structure, distance), signature, grid)
    cauchy = check_cauchy(sequence, [structure])
    values["cauchy"] = _dump(cauchy)
    if cauchy.first_violation is not None:
        witnesses.append(_dump(cauchy.first_violation))
    return witnesses, values


def cmd_metric_check(args) -> Outcome:
    """
    Check a given distance, or the synthesized one.

    With --vocab and no --structure, the synthesized checks run on --samples
    seeded random structures over that vocabulary.
    """
    grid = args.grid or settings.DEFAULT_GRID
    if args.modulus and not args.distance:
        raise UsageError("--modulus applies to a given --distance")
    if args.vocab and not args.structure:
        vocab = parse_vocabulary(_read(args.vocab))
        rng = random.Random(args.seed)
        samples = args.samples or settings.DEFAULT_SAMPLES
        witnesses: List[Dict[str, Any]] = []
        for sample in range(samples):
            structure = random_structure(rng, vocab)
            found, _ = _synthesized_checks(structure, grid)
            if found:
                witnesses.append({"sample": sample, "structure": serialize_structure(structure), **found[0]})
                break
        return _status(not witnesses), witnesses, {"samples": samples, "seed": args.seed}

    structure = _structures(args)[0]
    if args.distance:
        table = distance_values(structure, _distance_argument(args, structure))
        witnesses, values = _metric_battery(structure, table, _given_signature(args, structure), grid)
        return _status(not witnesses), witnesses, values
    witnesses, values = _synthesized_checks(structure, grid)
    return _status(not witnesses), witnesses, values


def _sequence_inputs(args) -> Tuple[FormulaSequence, List[GeneralStructure]]:
    """The sequence plus any structures to check it on."""
    structures = [parse_structure(_read(p)) for p in args.structure or []]
    if args.vocab:
        vocab = parse_vocabulary(_read(args.vocab))
    elif structures:
        vocab = structures[0].vocabulary
    else:
        raise UsageError(f"{args.command} needs --vocab or --structure to read the sequence")
    return parse_sequence(_read(_require(args, "sequence")), vocab), structures


def cmd_force_converge(args) -> Outcome:
    seq, structures = _sequence_inputs(args)
    schedule = schedule_from_text(args.schedule) if args.schedule else None
    forced = force_convergence(seq, schedule)
    values: Dict[str, Any] = {"sequence": serialize_sequence(forced)}
    witnesses = []
    if structures:
        report = check_cauchy(forced, structures)
        values["cauchy"] = _dump(report)
        if report.first_violation is not None:
            witnesses.append(_dump(report.first_violation))
    return _status(not witnesses), witnesses, values


def cmd_pseudometrize(args) -> Outcome:
    seq, structures = _sequence_inputs(args)
    result = pseudometrize(seq)
    values: Dict[str, Any] = {"sequence": serialize_sequence(result)}
    witnesses = []
    checks = []
    # distances are checked in the variables x, y
    renaming = dict(zip(result.frame, (Var("x"), Var("y"))))
    for structure in structures:
        for index, entry in enumerate(result.entries):
            report = check_pseudometric(structure, substitute(entry, renaming))
            checks.append(report.status.value)
            if report.first_violation is not None:
                witnesses.append({"entry": index, **_dump(report.first_violation)})
    if checks:
        values["pseudometric"] = checks
    return _status(not witnesses), witnesses, values


def cmd_morleyize(args) -> Outcome:
    structure = _structures(args)[0]
    depth = _depth(args)
    target, translated, translation = morleyize(structure.vocabulary, structure, depth)
    values: Dict[str, Any] = {
        "vocabulary": serialize_vocabulary(target),
        "structure": serialize_structure(translated),
        "definitions": {name: serialize_formula(p) for name, p in translation.definitions.items()},
    }
    if args.formula:
        f = parse_formula(_text_or_file(args.formula), structure.vocabulary)
        values["formula"] = serialize_formula(translation(f))
    return CheckStatus.PASS, [], values


def _interpretation_inputs(args):
    structure = _structures(args)[0]
    interp = parse_interpretation(_read(_require(args, "interpretation")), structure.vocabulary)
    return interp, structure


def cmd_interpret_check(args) -> Outcome:
    interp, structure = _interpretation_inputs(args)
    report = check_interpretation_conditions(interp, structure)
    witnesses = [_dump(v) for _, v in sorted(report.violations.items())]
    return report.status, witnesses, _dump(report)


def cmd_interpret_upgrade(args) -> Outcome:
    interp, structure = _interpretation_inputs(args)
    try:
        upgraded = upgrade(interp, structure)
    except InterpretationError as e:
        logger.warning(f"Upgrade failed: {e.message}")
        return CheckStatus.FAIL, [e.details], {"error": e.message}
    return CheckStatus.PASS, [], {"structure": serialize_structure(upgraded)}


COMMANDS: Dict[str, Callable[[argparse.Namespace], Outcome]] = {
    "eval": cmd_eval,
    "check-model": cmd_check_model,
    "reduce": cmd_reduce,
    "distinguish": cmd_distinguish,
    "ultraproduct": cmd_ultraproduct,
    "los-check": cmd_los_check,
    "expand": cmd_expand,
    "metric-check": cmd_metric_check,
    "force-converge": cmd_force_converge,
    "pseudometrize": cmd_pseudometrize,
    "morleyize": cmd_morleyize,
    "interpret-check": cmd_interpret_check,
    "interpret-upgrade": cmd_interpret_upgrade,
}


def build_parser() -> argparse.ArgumentParser:
    parser = ReportingArgumentParser(prog=settings.APP_NAME, description="Finite continuous-logic toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    commands = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub = commands.add_parser(name)
        sub.add_argument("--structure", action="append", help="structure file (repeatable)")
        sub.add_argument("--vocab", help="vocabulary file")
        sub.add_argument("--formula", help="formula text or file")
        sub.add_argument("--theory", help="theory file")
        sub.add_argument("--distance", help="distance formula (text or file) or binary predicate name")
        sub.add_argument("--sequence", help="formula sequence file")
        sub.add_argument("--interpretation", help="interpretation file")
        sub.add_argument("--depth", type=int, help=f"depth budget (default {settings.DEFAULT_DEPTH})")
        sub.add_argument("--grid", type=int, help=f"grid denominator 2^g (default {settings.DEFAULT_GRID})")
        sub.add_argument("--schedule", help="lemma, stability, exponential, or a first step p/q halving after")
        sub.add_argument("--modulus", action="append", help="PREDICATE=p/q for a given --distance (repeatable)")
        sub.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
        sub.add_argument("--samples", type=int, help=f"random structures to sweep (default {settings.DEFAULT_SAMPLES})")
        sub.add_argument("--tolerance", help="p/q")
        sub.add_argument("--principal", help="index of the principal ultrafilter (default: all)")
        sub.add_argument("--assign", action="append", help="VAR=ELEMENT (repeatable)")
        sub.add_argument("--json", dest="json_path", help="also write the report to this path")
    return parser


def render_report(report: CommandReport) -> str:
    return json.dumps(report.model_dump(mode="json", by_alias=True), sort_keys=True,
                      indent=settings.REPORT_INDENT, ensure_ascii=False)


def run(argv: Sequence[str]) -> Tuple[int, CommandReport]:
    """
    Parse arguments, dispatch one command and build its report.

    Args:
        argv: Arguments without the program name

    Returns:
        (exit code, report)
    """
    command = argv[0] if argv else "unknown"
    try:
        args = build_parser().parse_args(list(argv))
        command = args.command
        if args.grid is not None and (args.grid < 1 or args.grid & (args.grid - 1)):
            raise UsageError(f"--grid must be a power of two, got {args.grid}")
        status, witnesses, values = COMMANDS[command](args)
    except AppError as e:
        log_error(e, {"command": command})
        report = CommandReport(command=command, status=CheckStatus.ERROR, values=format_error_response(e))
        return EXIT_INPUT_ERROR, report

    report = CommandReport(command=command, status=status, witnesses=witnesses, values=values)
    logger.info(f"{command}: {status.value}")
    return (EXIT_OK if status == CheckStatus.PASS else EXIT_CHECK_FAILED), report


def main(argv: Optional[Sequence[str]] = None) -> int:
    level = logging.DEBUG if settings.DEBUG else settings.LOG_LEVEL
    logging.basicConfig(level=level, format=settings.LOG_FORMAT, stream=sys.stderr)
    argv = sys.argv[1:] if argv is None else argv
    code, report = run(argv)
    text = render_report(report)
    json_path = _json_path(argv)
    if json_path:
        with open(json_path, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    print(text)
    return code


def _json_path(argv: Sequence[str]) -> Optional[str]:
    for i, arg in enumerate(argv):
        if arg == "--json" and i + 1 < len(argv):
            return argv[i + 1]
        if arg.startswith("--json="):
            return arg.split("=", 1)[1]
    return None


if __name__ == "__main__":
    sys.exit(main())
