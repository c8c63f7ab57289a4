"""Stable images, Mittag-Leffler, covering classification and fibres."""

import logging
from typing import Any, Dict, List, Optional, Tuple

from ..lattice import Lattice
from ..report import AnalysisReport, Certainty
from ..tower import Tower
from .chains import (
    FINITE_CHAIN,
    STATIONARY_CONSTANT,
    STATIONARY_INDEX_GROWTH,
    STATIONARY_PROPAGATION,
    StableImage,
    Step,
    TailFacts,
    coset_mode,
    coset_stable_images,
    coset_steps,
    group_stable_images,
    stage_count,
    tail_facts,
)

logger = logging.getLogger(__name__)


def _show(value) -> Optional[str]:
    if value is None:
        return None
    if isinstance(value, Lattice):
        return str(value)
    return f"{len(value)} cosets"


def classify(t: Tower, steps: List[Step], facts: Optional[TailFacts], last: int) -> Tuple[str, Certainty, Dict[str, Any]]:
    """Covering(N), StrictLifting or Unknown with the rule that decided it."""
    limit = facts.start if facts is not None else len(steps)
    declared = steps[:limit]
    details: Dict[str, Any] = {}
    if any(s.injective is None for s in declared):
        return "Unknown", Certainty.horizon_limited(last), {"reason": "coset maps not computable"}
    failures = [s.index for s in declared if not s.injective]
    stable_from = failures[-1] + 1 if failures else 0
    details["non_injective_steps"] = failures

    if facts is None:
        details["injective_from"] = stable_from
        return "Unknown", Certainty.horizon_limited(last), details

    first = steps[facts.start] if facts.start < len(steps) else None
    if first is None or first.injective is None:
        return "Unknown", Certainty.horizon_limited(last), details
    if facts.constant:
        if first.injective:
            return f"Covering({stable_from})", Certainty.certified(STATIONARY_CONSTANT), details
        return "StrictLifting", Certainty.certified(STATIONARY_CONSTANT), details
    if facts.single and facts.commuting is True:
        if not first.injective and facts.step_injective:
            return "StrictLifting", Certainty.certified(STATIONARY_PROPAGATION), details
        if first.injective and facts.step_automorphism:
            return f"Covering({stable_from})", Certainty.certified(STATIONARY_PROPAGATION), details
    if facts.index_growth:
        return "StrictLifting", Certainty.certified(STATIONARY_INDEX_GROWTH), details
    tail_failures = [s.index for s in steps[facts.start:] if s.injective is False]
    details["non_injective_steps"] = failures + tail_failures
    return "Unknown", Certainty.horizon_limited(last), details


def _analyse(t: Tower, horizon: Optional[int]):
    last = t.last_stage(horizon)
    facts = tail_facts(t)
    steps = coset_steps(t, last)
    groups, ml_holds, ml_rule = group_stable_images(t, last, facts)
    stable = coset_stable_images(t, last, steps, facts, groups)
    return last, facts, steps, groups, (ml_holds, ml_rule), stable


def _coset_ml(t: Tower, last: int, facts: Optional[TailFacts], stable: List[StableImage],
              group_ml: Tuple[Optional[bool], Optional[str]]) -> Tuple[Optional[bool], Certainty]:
    ml_holds, ml_rule = group_ml
    if ml_holds and ml_rule:
        return True, Certainty.certified(ml_rule)
    finite_prefix = all(stage_count(t, i) is not None for i in range(min(last, t.system.prefix_length - 1) + 1))
    if finite_prefix and (facts is None or facts.finite_index):
        return True, Certainty.certified(FINITE_CHAIN)
    if all(s.certified for s in stable):
        return True, Certainty.horizon_limited(last)
    return None, Certainty.horizon_limited(last)


def stability_analysis(t: Tower, horizon: Optional[int] = None) -> AnalysisReport:
    """Stable image chains, Mittag-Leffler verdicts and the covering classification.

    Args:
        t: Coherent tower
        horizon: Last stage examined (defaults to the tower's horizon)

    Returns:
        Report whose verdict is ``Covering(N)``, ``StrictLifting`` or ``Unknown``
    """
    last, facts, steps, groups, group_ml, stable = _analyse(t, horizon)
    verdict, certainty, details = classify(t, steps, facts, last)
    coset_ml, coset_certainty = _coset_ml(t, last, facts, stable, group_ml)
    ml_holds, ml_rule = group_ml
    details.update({
        "mittag_leffler": {
            "groups": ml_holds,
            "groups_certainty": str(Certainty.certified(ml_rule) if ml_rule else Certainty.horizon_limited(last)),
            "cosets": coset_ml,
            "cosets_certainty": str(coset_certainty),
        },
        "coset_mode": coset_mode(t, last),
    })
    stages = []
    for i in range(last + 1):
        row: Dict[str, Any] = {
            "stage": i,
            "thread": t.describe(i),
            "coset_stable_image": _show(stable[i].value),
            "coset_image_chain": stable[i].chain,
            "certified": stable[i].certified,
        }
        if groups[i].rule is not None or groups[i].value is not None:
            row["group_stable_image"] = "full" if groups[i].full else _show(groups[i].value)
        if i < len(steps):
            row["injective_to_previous"] = None if i == 0 else steps[i - 1].injective
        stages.append(row)
    logger.debug("classification %s (%s)", verdict, certainty)
    return AnalysisReport(
        command="classify",
        verdict=verdict,
        certainty=certainty,
        stages=stages,
        details=details,
        provenance="limit of coverings is a covering exactly when the coset maps are eventually injective",
    )


def fiber_model(t: Tower, horizon: Optional[int] = None) -> AnalysisReport:
    """Stage fibre sizes, stage maps and the cardinality class of the limit fibre.

    The limit class is ``Finite(k)`` for certified coverings with a certified
    stable fibre of size k, ``CountablyInfinite`` when that fibre is
    infinite, and ``Uncountable`` when every tail fibre is finite, the tail
    coset maps are onto and non-injectivity recurs under a certified rule.
    """
    last, facts, steps, groups, _, stable = _analyse(t, horizon)
    verdict, certainty, _ = classify(t, steps, facts, last)
    counts = [stage_count(t, i) for i in range(last + 1)]
    stage_maps = [
        {"from": s.index + 1, "to": s.index, "injective": s.injective, "surjective": s.surjective}
        for s in steps
    ]
    limit, limit_certainty = "Unknown", Certainty.horizon_limited(last)
    if verdict.startswith("Covering") and certainty.is_certified:
        n = int(verdict[len("Covering("):-1])
        anchor = stable[n]
        if anchor.certified:
            value = anchor.value
            size = t.subgroup(n).index_in(value) if isinstance(value, Lattice) else len(value)
            limit = f"Finite({size})" if size is not None else "CountablyInfinite"
            limit_certainty = Certainty.certified(anchor.rule)
    elif verdict == "StrictLifting" and certainty.is_certified:
        if facts.finite_index and facts.bonding_surjective:
            limit, limit_certainty = "Uncountable", certainty
    return AnalysisReport(
        command="fiber",
        verdict=limit,
        certainty=limit_certainty,
        stages=[{"stage": i, "cosets": counts[i]} for i in range(last + 1)],
        details={"classification": verdict, "counts": counts, "stage_maps": stage_maps,
                 "coset_mode": coset_mode(t, last)},
        provenance="the limit fibre is the inverse limit of the stage coset spaces",
    )
