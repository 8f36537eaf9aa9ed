import logging
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from app.core.kernel import format_rational
from app.models.reports import CauchyReport, CauchyViolation, CheckStatus
from app.models.structure import GeneralStructure
from app.models.syntax import FormulaSequence, Schedule
from app.services.semantics import assignments, check_formula, evaluator_for

# Configure logging
logger = logging.getLogger(__name__)


def check_cauchy(
    seq: FormulaSequence,
    witnesses: Sequence[GeneralStructure],
    schedule: Optional[Schedule] = None,
) -> CauchyReport:
    """
    Falsify the Cauchy condition of a formula sequence on finite witnesses.

    For every witness, every assignment of the frame and every m <= k, the gap
    |phi_m - phi_k| must not exceed the schedule bound at m.

    Args:
        seq: The formula sequence
        witnesses: Structures interpreting the sequence's vocabulary
        schedule: Rate to check against (default: the sequence's own schedule)

    Returns:
        CauchyReport with the largest gap seen and the first violation, if any
    """
    schedule = schedule or seq.schedule
    for structure in witnesses:
        for entry in seq.entries:
            check_formula(structure, entry)

    worst_pair: Optional[Tuple[int, int]] = None
    worst_gap = Fraction(-1)
    first_violation: Optional[CauchyViolation] = None
    n = len(seq)
    bounds = [schedule.bound(m) for m in range(n)]

    for witness_index, structure in enumerate(witnesses):
        evaluator = evaluator_for(structure)
        for env in assignments(structure, seq.frame):
            values = [evaluator.value(entry, dict(env)) for entry in seq.entries]
            for m in range(n):
                for k in range(m + 1, n):
                    gap = abs(values[m] - values[k])
                    if gap > worst_gap:
                        worst_gap, worst_pair = gap, (m, k)
                    if first_violation is None and gap > bounds[m]:
                        first_violation = CauchyViolation(
                            witness=witness_index,
                            assignment=env,
                            m=m,
                            k=k,
                            gap=format_rational(gap),
                            bound=format_rational(bounds[m]),
                        )
                        logger.warning(
                            f"Cauchy bound fails at (m,k)=({m},{k}) on witness {witness_index}: "
                            f"gap {first_violation.gap} > {first_violation.bound}"
                        )

    status = CheckStatus.PASS if first_violation is None else CheckStatus.FAIL
    logger.info(f"Cauchy check over {len(witnesses)} witness(es): {status.value}")
    return CauchyReport(
        status=status,
        witnesses_checked=len(witnesses),
        worst_pair=worst_pair,
        worst_gap=format_rational(worst_gap) if worst_pair is not None else None,
        first_violation=first_violation,
    )
