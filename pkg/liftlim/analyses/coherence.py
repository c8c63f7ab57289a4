"""Coherence of threads and compatibility of base models."""

import logging
from typing import Any, Dict, List, Optional

from ..errors import CoherenceViolation, IncompatibleModel
from ..report import MODEL_DISCLAIMER, AnalysisReport, Certainty
from ..tower import BaseModel, Tower, model_check
from ..words import Word, format_word
from .chains import STAGE_TEST, STATIONARY_SYMBOLIC

logger = logging.getLogger(__name__)


def _step_witness(t: Tower, i: int) -> Optional[Word]:
    """Image of a generator of G_{i+1} that leaves G_i, or None."""
    upper_group, lower_group = t.group(i + 1), t.group(i)
    u = t.bonding(i)
    for g in upper_group.generators(t.subgroup(i + 1)):
        image = u(g)
        if not lower_group.contains(t.subgroup(i), image):
            return image
    return None


def _tail_symbolic(t: Tower) -> bool:
    """One symbolic step: ``b(s(seed)) ⊆ seed`` and ``b∘s = s∘b`` per component."""
    T = t.system.tail.group
    b = t.system.tail.bonding
    for c in t.thread.tail:
        if T.homs_equal(c.step.then(b), b.then(c.step), T) is not True:
            return False
        moved = T.image(b, T.image(c.step, c.seed, T), T)
        if not T.includes(c.seed, moved):
            return False
    return True


def check_coherence(t: Tower, horizon: Optional[int] = None) -> AnalysisReport:
    """Verify ``u_i(G_{i+1}) ⊆ G_i`` for every consecutive pair.

    Prefix pairs and the connector are checked directly. The tail is settled
    by one symbolic step when every thread component commutes with the tail
    bonding; otherwise tail pairs are checked up to the horizon.
    """
    last = t.last_stage(horizon)
    k = t.system.prefix_length
    violations: List[Dict[str, Any]] = []
    direct = range(k - 1 if t.system.tail is None else k)
    for i in direct:
        witness = _step_witness(t, i)
        if witness is not None:
            violations.append({"stage": i, "upper": i + 1, "element": format_word(witness)})

    certainty = Certainty.certified(STAGE_TEST)
    if t.system.tail is not None:
        if _tail_symbolic(t):
            certainty = Certainty.certified(STATIONARY_SYMBOLIC)
        else:
            for i in range(k, last):
                witness = _step_witness(t, i)
                if witness is not None:
                    violations.append({"stage": i, "upper": i + 1, "element": format_word(witness)})
                    break
            if not violations:
                certainty = Certainty.horizon_limited(last)
    if violations:
        certainty = Certainty.certified(STAGE_TEST)
    logger.debug("coherence: %d violations", len(violations))
    return AnalysisReport(
        command="check",
        verdict="Incoherent" if violations else "Coherent",
        certainty=certainty,
        witnesses=violations,
        stages=[{"stage": i, "thread": t.describe(i)} for i in range(min(last, max(k - 1, 0)) + 1)],
        provenance="thread coherence: every bonding maps G_{i+1} into G_i",
    )


def require_coherent(t: Tower, horizon: Optional[int] = None) -> AnalysisReport:
    """Run :func:`check_coherence` and raise on the first violation.

    Raises:
        CoherenceViolation: With the stage and the offending element
    """
    report = check_coherence(t, horizon)
    if report.witnesses:
        first = report.witnesses[0]
        raise CoherenceViolation(first["stage"], first["element"], "bonding image leaves the thread")
    return report


def check_base_model(t: Tower, m: BaseModel) -> AnalysisReport:
    """Compatibility of the base model maps with the bondings."""
    check = model_check(t.system, m)
    details: Dict[str, Any] = {}
    if check.unverified:
        details["unverified"] = check.unverified
    return AnalysisReport(
        command="check",
        verdict="Compatible" if not check.issues else "Incompatible",
        certainty=Certainty.certified(STATIONARY_SYMBOLIC if t.system.tail is not None else STAGE_TEST),
        witnesses=[{"issue": issue} for issue in check.issues],
        provenance="base model maps commute with the bondings",
        details=details,
        disclaimer=MODEL_DISCLAIMER,
    )


def require_compatible(t: Tower, m: BaseModel) -> List[str]:
    """Raise on the first base model map that disagrees with a bonding.

    Returns:
        Comparisons left undecided by the stage backends

    Raises:
        IncompatibleModel: With the first failing generator
    """
    check = model_check(t.system, m)
    if check.issues:
        raise IncompatibleModel(check.issues[0])
    return check.unverified
