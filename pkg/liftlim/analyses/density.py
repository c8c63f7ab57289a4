"""Density of the base model image in the limit fibre.

Every criterion is evaluated and reported on its own:

``stagewise``
    ``phi_i(P) G_i`` covers the coset stable image at every stage.
``stable-images``
    the group stable image covers the coset stable image at every stage
    (density for the universal lifting space).
``cor-1`` .. ``cor-4``
    Mittag-Leffler on groups, ``G_i`` inside the group stable image,
    ``G_i`` together with it generating the stage, and finite thread groups.
    These settle the universal space directly and the base model only
    together with ``base-surjective`` (``phi_i(P)`` contains the group
    stable image).
"""

import logging
from typing import Any, Dict, List, Optional

from ..errors import BudgetExceeded, UnsupportedBackend
from ..groups import AbelianGroup
from ..lattice import Lattice, image
from ..report import MODEL_DISCLAIMER, AnalysisReport, Certainty
from ..tower import BaseModel, Tower
from .chains import (
    LATTICE,
    OPAQUE,
    GroupImage,
    StableImage,
    TailFacts,
    coset_mode,
    matrix_of,
)
from .stability import _analyse

logger = logging.getLogger(__name__)

HOLDS = "holds"
FAILS = "fails"
UNKNOWN = "unknown"

SUFFICIENT_ORDER = ("cor-1", "cor-2", "cor-3", "cor-4")


def _base_image(t: Tower, m: BaseModel, i: int, mode: str):
    """``phi_i(P) G_i`` as a lattice, or as the set of cosets it reaches."""
    group, handle = t.group(i), t.subgroup(i)
    phi = m.map(i)
    if mode == LATTICE:
        return group.subgroup(list(phi.images)) + handle
    start = group.coset_key(handle, group.word("1"))
    reached = {start}
    frontier = [start]
    while frontier:
        key = frontier.pop()
        for g in phi.images:
            other = group.coset_act(handle, key, g)
            if other not in reached:
                reached.add(other)
                frontier.append(other)
    return frozenset(reached)


def _covers(big, small) -> bool:
    if isinstance(big, Lattice):
        return big.includes(small)
    return small <= big


def _maps_onto(t: Tower, m: BaseModel, i: int) -> Optional[bool]:
    return m.group.is_surjective(m.map(i), t.group(i))


def _tail_base_onto(t: Tower, m: BaseModel) -> bool:
    """Every tail map ``phi_{k+j}`` is onto the tail group."""
    T = t.system.tail.group
    k = t.system.prefix_length
    if _maps_onto(t, m, k) is not True:
        return False
    return m.tail_lift is None or T.is_surjective(m.tail_lift, T) is True


def _stagewise(t: Tower, m: BaseModel, last: int, mode: str, stable: List[StableImage],
               facts: Optional[TailFacts]) -> Dict[str, Any]:
    failures = []
    for i in range(last + 1):
        if stable[i].value is None:
            return {"status": UNKNOWN}
        if not _covers(_base_image(t, m, i, mode), stable[i].value):
            failures.append(i)
            if stable[i].certified:
                return {"status": FAILS, "stage": i, "certified": True}
    if failures:
        return {"status": FAILS, "stage": failures[0], "certified": False}
    if not all(s.certified for s in stable):
        return {"status": UNKNOWN}
    if facts is None:
        return {"status": HOLDS, "certified": False}
    constant_model = m.tail_lift is None or m.tail_lift.is_identity()
    if _tail_base_onto(t, m) or (facts.constant and constant_model):
        return {"status": HOLDS, "certified": True}
    return {"status": HOLDS, "certified": False}


def _all_stages(t: Tower, last: int, facts: Optional[TailFacts], prefix_test, tail_test) -> str:
    """Combine a per-stage test on checked stages with a test covering the tail."""
    for i in range(min(last, t.system.prefix_length + (0 if facts is None else 1) - 1) + 1):
        result = prefix_test(i)
        if result is None:
            return UNKNOWN
        if not result:
            return FAILS
    if facts is None:
        return HOLDS
    result = tail_test()
    return UNKNOWN if result is None else (HOLDS if result else FAILS)


def _sufficient_criteria(t: Tower, last: int, facts: Optional[TailFacts], groups: List[GroupImage],
                 ml: Optional[bool], ml_rule: Optional[str]) -> Dict[str, str]:
    statuses: Dict[str, str] = {}
    statuses["cor-1"] = HOLDS if ml and ml_rule else (FAILS if ml is False and ml_rule else UNKNOWN)

    def stable_group(i):
        g = groups[i]
        return g if g.rule is not None else None

    def inside(i):
        g = stable_group(i)
        if g is None:
            return None
        if g.full:
            return True
        return g.value.includes(t.subgroup(i)) if g.value is not None else None

    def spans(i):
        g = stable_group(i)
        if g is None:
            return None
        if g.full:
            return True
        return (g.value + t.subgroup(i)).is_full() if g.value is not None else None

    def tail_inside():
        g = stable_group(facts.start)
        if g is None:
            return None
        if g.full:
            return True
        if not isinstance(facts.group, AbelianGroup):
            return None
        core = g.value
        for c in t.thread.tail:
            if not core.includes(c.seed):
                return False
            if not core.includes(image(matrix_of(c.step), core)):
                return None
        return True

    def tail_spans():
        g = stable_group(facts.start)
        if g is None:
            return None
        if g.full:
            return True
        if not facts.constant or g.value is None:
            return None
        return (g.value + t.subgroup(facts.start)).is_full()

    def finite(i):
        try:
            return t.group(i).is_finite_subgroup(t.subgroup(i))
        except (UnsupportedBackend, BudgetExceeded):
            return None

    def tail_finite():
        T = facts.group
        if any(T.is_finite_subgroup(c.seed) for c in t.thread.tail):
            return True
        if facts.constant:
            return finite(facts.start)
        return None

    statuses["cor-2"] = _all_stages(t, last, facts, inside, tail_inside)
    statuses["cor-3"] = _all_stages(t, last, facts, spans, tail_spans)
    statuses["cor-4"] = _all_stages(t, last, facts, finite, tail_finite)
    return statuses


def _base_surjective(t: Tower, m: BaseModel, last: int, facts: Optional[TailFacts],
                     groups: List[GroupImage]) -> str:
    def prefix(i):
        g = groups[i]
        if g.rule is None:
            return None
        if g.full:
            return _maps_onto(t, m, i)
        if g.value is None:
            return None
        return t.group(i).subgroup(list(m.map(i).images)).includes(g.value)

    def tail():
        if _tail_base_onto(t, m):
            return True
        if m.tail_lift is None or m.tail_lift.is_identity():
            return prefix(facts.start)
        return None

    return _all_stages(t, last, facts, prefix, tail)


def _stable_images_criterion(t: Tower, last: int, stable: List[StableImage], groups: List[GroupImage]) -> Dict[str, Any]:
    for i in range(last + 1):
        g, s = groups[i], stable[i]
        if g.full:
            continue
        if g.value is None or s.value is None or not isinstance(s.value, Lattice):
            return {"status": UNKNOWN}
        if not (g.value + t.subgroup(i)).includes(s.value):
            if g.rule is not None and s.certified:
                return {"status": FAILS, "stage": i, "certified": True}
            return {"status": FAILS, "stage": i, "certified": False}
    return {"status": HOLDS, "certified": all(g.full for g in groups)}


def density(t: Tower, m: BaseModel, horizon: Optional[int] = None) -> AnalysisReport:
    """Whether the image of the base model is dense in the limit fibre.

    Returns:
        Report with verdict ``Dense(<criterion>)``, ``NotDense(<stage>)`` or
        ``Unknown``; ``details`` lists every criterion and the verdict for
        the universal lifting space
    """
    last, facts, steps, groups, (ml, ml_rule), stable = _analyse(t, horizon)
    mode = coset_mode(t, last)
    if mode == OPAQUE:
        stagewise = {"status": UNKNOWN}
    else:
        stagewise = _stagewise(t, m, last, mode, stable, facts)
    universal = _stable_images_criterion(t, last, stable, groups) if mode == LATTICE else {"status": UNKNOWN}
    sufficient = _sufficient_criteria(t, last, facts, groups, ml, ml_rule)
    base_surjective = _base_surjective(t, m, last, facts, groups)

    criteria = {"stagewise": stagewise["status"], "stable-images": universal["status"]}
    criteria.update(sufficient)
    criteria["base-surjective"] = base_surjective

    verdict, certainty = "Unknown", Certainty.horizon_limited(last)
    if stagewise["status"] == HOLDS and stagewise.get("certified"):
        verdict, certainty = "Dense(stagewise)", Certainty.certified("stagewise")
    elif base_surjective == HOLDS and any(sufficient[c] == HOLDS for c in SUFFICIENT_ORDER):
        rule = next(c for c in SUFFICIENT_ORDER if sufficient[c] == HOLDS)
        verdict, certainty = f"Dense({rule})", Certainty.certified(rule)
    elif stagewise["status"] == FAILS:
        verdict = f"NotDense({stagewise['stage']})"
        if stagewise.get("certified"):
            certainty = Certainty.certified("stagewise")

    held = [c for c in SUFFICIENT_ORDER if sufficient[c] == HOLDS]
    if universal["status"] == HOLDS and universal.get("certified"):
        universal_verdict = "Dense(stable-images)"
    elif held:
        universal_verdict = f"Dense({held[0]})"
    elif universal["status"] == FAILS and universal.get("certified"):
        universal_verdict = f"NotDense({universal['stage']})"
    else:
        universal_verdict = "Unknown"

    details: Dict[str, Any] = {
        "criteria": criteria,
        "dense_by": [c for c in ("stagewise",) + SUFFICIENT_ORDER if criteria[c] == HOLDS],
        "universal": universal_verdict,
    }
    if sufficient["cor-4"] == FAILS:
        details["cor-4-note"] = (
            "some thread group is infinite; cor-4 only applies to finite thread groups "
            "and its failure does not bear on density"
        )

    logger.debug("density criteria: %s", criteria)
    return AnalysisReport(
        command="density",
        verdict=verdict,
        certainty=certainty,
        details=details,
        provenance="the model image is dense exactly when it is stably surjective onto the coset stable images",
        disclaimer=MODEL_DISCLAIMER,
    )
