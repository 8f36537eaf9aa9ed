import logging
from fractions import Fraction
from typing import Optional

from app.models.syntax import (
    Formula,
    FormulaSequence,
    Schedule,
    Var,
    absdiff,
    constant,
    dotminus,
    dotplus,
    fmax,
    fmin,
    fresh_name,
    substitute,
    sup,
)
from app.utils.error_handling import StructuralError

# Configure logging
logger = logging.getLogger(__name__)


def _step(schedule: Schedule, m: int) -> Fraction:
    # steps of 1 or more already allow any move in [0,1]
    return min(schedule.bound(m), Fraction(1))


def force_convergence(seq: FormulaSequence, schedule: Optional[Schedule] = None) -> FormulaSequence:
    """
    Clamp each entry into the step band around its predecessor.

    phi_0 = theta_0 and phi_(m+1) = max(phi_m - s_m, min(phi_m + s_m, theta_(m+1))),
    so |phi_m - phi_(m+1)| <= s_m on every structure, and values are unchanged
    wherever the input already moves by at most s_m.

    Args:
        seq: Input sequence theta_0, theta_1, ...
        schedule: Step schedule s_m (default: the sequence's own schedule)

    Returns:
        The clamped sequence, carrying the step schedule
    """
    schedule = schedule or seq.schedule
    if not seq.entries:
        return FormulaSequence((), frame=seq.frame, schedule=schedule)
    result = [seq.entries[0]]
    for m, theta in enumerate(seq.entries[1:]):
        previous = result[-1]
        s = constant(_step(schedule, m))
        result.append(fmax(dotminus(previous, s), fmin(dotplus(previous, s), theta)))
    logger.debug(f"Forced convergence of {len(seq)} entries with schedule {schedule.name}")
    return FormulaSequence(tuple(result), frame=seq.frame, schedule=schedule)


def pseudometrize_formula(d: Formula, x: str = "x", y: str = "y") -> Formula:
    """e(x,y) = sup_z |d(x,z) - d(y,z)| with z fresh."""
    extra = d.free_vars - {x, y}
    if extra:
        raise StructuralError(f"distance formula has variables {sorted(extra)} outside ({x}, {y})")
    z = fresh_name("z", {x, y})
    left = substitute(d, {y: Var(z)})
    right = substitute(d, {x: Var(y), y: Var(z)})
    return sup(z, absdiff(left, right))


def pseudometrize(seq: FormulaSequence) -> FormulaSequence:
    """
    Replace every entry d_k by e_k(x,y) = sup_z |d_k(x,z) - d_k(y,z)|.

    Each e_k is a pseudo-metric on every structure, and equals d_k wherever d_k
    already is one.
    """
    if len(seq.frame) != 2:
        raise StructuralError(f"pseudometrize needs a two-variable frame, got {list(seq.frame)}")
    x, y = seq.frame
    entries = tuple(pseudometrize_formula(d, x, y) for d in seq.entries)
    return FormulaSequence(entries, frame=seq.frame, schedule=seq.schedule)
