"""Fundamental group and path component questions relative to a base model."""

import logging
from typing import Any, Dict, Optional

from ..groups import AbelianGroup
from ..lattice import Lattice, divisible_core, image
from ..report import MODEL_DISCLAIMER, AnalysisReport, Certainty
from ..tower import BaseModel, Thread, ThreadComponent, Tower
from ..words import GroupHom, Word, format_word
from .chains import (
    STAGE_TEST,
    STATIONARY_ABELIAN,
    STATIONARY_CONSTANT,
    coset_mode,
    matrix_of,
)
from .stability import _analyse, classify

logger = logging.getLogger(__name__)

# Outside the divisible core some tail stage always rejects.
REJECTION_SEARCH_LIMIT = 100000


def _rejected(i: int, w: Word, image_word: Word) -> AnalysisReport:
    return AnalysisReport(
        command="pi1",
        verdict=f"RejectedAtStage({i})",
        certainty=Certainty.certified(STAGE_TEST),
        witnesses=[{"stage": i, "image": format_word(image_word)}],
        details={"word": format_word(w), "accepted": False, "stage": i},
        provenance="pi1 of the limit is the intersection of the preimages of the thread",
        disclaimer=MODEL_DISCLAIMER,
    )


def _accepted(w: Word, certainty: Certainty, checked: int) -> AnalysisReport:
    return AnalysisReport(
        command="pi1",
        verdict="InDescriptor",
        certainty=certainty,
        details={"word": format_word(w), "accepted": True, "checked_through": checked},
        provenance="pi1 of the limit is the intersection of the preimages of the thread",
        disclaimer=MODEL_DISCLAIMER,
    )


def _tail_decision(t: Tower, m: BaseModel, w: Word, last: int) -> Optional[AnalysisReport]:
    """Settle every tail stage at once, or return None to stay horizon-limited."""
    facts_start = t.system.prefix_length
    T = t.system.tail.group
    if m.tail_lift is not None and not m.tail_lift.is_identity():
        return None
    target = m.tail_map(w)
    components = t.thread.tail
    if all(T.same(T.image(c.step, c.seed, T), c.seed) for c in components):
        # every tail stage carries the same subgroup and the same map
        return _accepted(w, Certainty.certified(STATIONARY_CONSTANT), last)
    if not isinstance(T, AbelianGroup):
        return None
    if not all(c.seed.includes(image(matrix_of(c.step), c.seed)) for c in components):
        return None
    vector = T.vector(target)
    for c in components:
        core = divisible_core(matrix_of(c.step), c.seed)
        if vector not in core:
            for j in range(last - facts_start + 1, REJECTION_SEARCH_LIMIT):
                if not T.contains(t.subgroup(facts_start + j), target):
                    return _rejected(facts_start + j, w, target)
            return None
    return _accepted(w, Certainty.certified(STATIONARY_ABELIAN), last)


def pi1_membership(t: Tower, m: BaseModel, w: Word, horizon: Optional[int] = None) -> AnalysisReport:
    """Test ``phi_i(w) ∈ G_i`` stage by stage.

    Args:
        t: Coherent tower
        m: Base model compatible with the tower
        w: Word over the model's alphabet
        horizon: Last stage tested directly

    Returns:
        ``RejectedAtStage(i)`` at the first failing stage, otherwise
        ``InDescriptor``; acceptance is certified for the identity, for
        constant tails and for stationary abelian tails (divisible core)
    """
    if w.alphabet != m.group.alphabet:
        raise ValueError(f"word {w} is not over the base model alphabet {m.group.alphabet}")
    last = t.last_stage(horizon)
    for i in range(last + 1):
        image_word = m.map(i)(w)
        if not t.group(i).contains(t.subgroup(i), image_word):
            logger.debug("%s rejected at stage %d", w, i)
            return _rejected(i, w, image_word)
    if w.is_identity():
        return _accepted(w, Certainty.certified("identity"), last)
    if t.system.tail is None:
        return _accepted(w, Certainty.horizon_limited(last), last)
    decided = _tail_decision(t, m, w, last)
    if decided is not None:
        return decided
    return _accepted(w, Certainty.horizon_limited(last), last)


def trivial_thread(t: Tower) -> Tower:
    """The same system with every ``G_i`` trivial."""
    entries = tuple(g.trivial() for g in t.system.groups)
    tail = ()
    if t.system.tail is not None:
        T = t.system.tail.group
        tail = (ThreadComponent(T.trivial(), GroupHom.identity(T.alphabet)),)
    return t.with_thread(Thread(entries, tail))


def shape_kernel_membership(t: Tower, m: BaseModel, w: Word, horizon: Optional[int] = None) -> AnalysisReport:
    """Membership of ``w`` in the shape kernel: pi1 membership for the trivial thread."""
    report = pi1_membership(trivial_thread(t), m, w, horizon)
    report.provenance = "the shape kernel is the intersection of the kernels of the stage maps"
    return report


def _orbits(t: Tower, n: int, m: BaseModel, stable) -> Optional[int]:
    """Number of orbits of ``phi_n(P)`` on the stable coset image at stage n."""
    group, handle = t.group(n), t.subgroup(n)
    phi = m.map(n)
    if isinstance(stable, Lattice):
        reached = group.subgroup(list(phi.images)) + handle
        return reached.index_in(stable)
    parent = {key: key for key in stable}

    def find(key):
        while parent[key] != key:
            parent[key] = parent[parent[key]]
            key = parent[key]
        return key

    for key in stable:
        for g in phi.images:
            other = group.coset_act(handle, key, g)
            parent.setdefault(other, other)
            a, b = find(key), find(other)
            if a != b:
                parent[max(a, b, key=repr)] = min(a, b, key=repr)
    return len({find(key) for key in stable})


def pi0_report(t: Tower, m: BaseModel, horizon: Optional[int] = None) -> AnalysisReport:
    """Path components of the limit space seen through the base model.

    ``Trivial`` or ``CosetCount(k)`` for certified coverings, where k counts
    the orbits of the model on the stable fibre; ``Uncountable`` when the
    limit fibre is certified uncountable (a countable group has countably
    many orbits); otherwise ``Unknown``.
    """
    last, facts, steps, groups, _, stable = _analyse(t, horizon)
    verdict, certainty, _ = classify(t, steps, facts, last)
    details: Dict[str, Any] = {"classification": verdict}
    result, result_certainty = "Unknown", Certainty.horizon_limited(last)
    if verdict.startswith("Covering") and certainty.is_certified:
        n = int(verdict[len("Covering("):-1])
        if stable[n].certified:
            count = _orbits(t, n, m, stable[n].value)
            details["stable_stage"] = n
            if count is None:
                result = "CountablyInfinite"
            else:
                result = "Trivial" if count == 1 else f"CosetCount({count})"
            result_certainty = Certainty.certified(stable[n].rule)
    elif verdict == "StrictLifting" and certainty.is_certified:
        if facts.finite_index and facts.bonding_surjective:
            result, result_certainty = "Uncountable", certainty
    details["coset_mode"] = coset_mode(t, last)
    return AnalysisReport(
        command="pi0",
        verdict=result,
        certainty=result_certainty,
        details=details,
        provenance="path components of the limit are the orbits of pi1 of the base on the limit fibre",
        disclaimer=MODEL_DISCLAIMER,
    )
