"""Operations on threads over a fixed inverse system."""

import logging
from typing import Optional, Sequence

from ..errors import BudgetExceeded, CoherenceViolation, UnsupportedBackend
from ..report import MODEL_DISCLAIMER, AnalysisReport, Certainty
from ..tower import BaseModel, Thread, ThreadComponent, Tower
from ..words import GroupHom, Word, format_word
from .chains import STAGE_TEST, STATIONARY_SYMBOLIC
from .coherence import check_coherence

logger = logging.getLogger(__name__)


def thread_meet(t: Tower, a: Thread, b: Thread) -> Tower:
    """Thread of stagewise intersections ``A_i ∩ B_i``.

    Tail components are concatenated, so the meet of two stationary threads
    stays finitely described.

    Raises:
        UnsupportedBackend: For stages without subgroup intersection (fp)
    """
    entries = tuple(
        t.group(i).intersect(x, y) for i, (x, y) in enumerate(zip(a.entries, b.entries))
    )
    return t.with_thread(Thread(entries, a.tail + b.tail), name=f"{t.name} meet" if t.name else "")


def thread_from_subgroup(t: Tower, m: BaseModel, generators: Sequence[Word]) -> Tower:
    """Thread ``G_i = phi_i(<generators>)`` for a subgroup of the base model.

    Raises:
        CoherenceViolation: If the base model does not commute with the
            bondings, so the images do not form a thread
    """
    P = m.group
    subgroup = P.subgroup(list(generators))
    entries = tuple(P.image(m.map(i), subgroup, t.group(i)) for i in range(t.system.prefix_length))
    tail = ()
    if t.system.tail is not None:
        T = t.system.tail.group
        seed = P.image(m.tail_map, subgroup, T)
        step = m.tail_lift if m.tail_lift is not None else GroupHom.identity(T.alphabet)
        tail = (ThreadComponent(seed, step),)
    result = t.with_thread(Thread(entries, tail))
    report = check_coherence(result)
    if report.witnesses:
        first = report.witnesses[0]
        raise CoherenceViolation(first["stage"], first["element"], "images of the subgroup do not form a thread")
    return result


def special_case_note(t: Tower, m: BaseModel, generators: Sequence[Word]) -> Optional[str]:
    """Path component description available when G is normal and every map is onto."""
    P = m.group
    try:
        normal = P.normality_witness(P.subgroup(list(generators))) is None
    except (UnsupportedBackend, BudgetExceeded) as e:
        logger.debug("normality of the base subgroup undecided: %s", e)
        return None
    last = t.last_stage()
    onto = all(P.is_surjective(m.map(i), t.group(i)) for i in range(last + 1))
    if normal and onto:
        return "pi0 of the limit is identified with the cosets of G times the intersection of the kernels of the stage maps"
    return None


def thread_report(command: str, t: Tower, note: Optional[str] = None, horizon: Optional[int] = None) -> AnalysisReport:
    """Describe the thread of a constructed tower stage by stage."""
    coherence = check_coherence(t, horizon)
    last = t.last_stage(horizon)
    stages = [{"stage": i, "thread": t.describe(i)} for i in range(last + 1)]
    details = {"coherence": coherence.verdict}
    if note:
        details["note"] = note
    return AnalysisReport(
        command=command,
        verdict="Thread",
        certainty=coherence.certainty,
        stages=stages,
        details=details,
        provenance="threads are compared and combined stage by stage",
        disclaimer=MODEL_DISCLAIMER if command == "thread-from" else None,
    )


def compare_threads(t: Tower, a: Thread, b: Thread, horizon: Optional[int] = None) -> AnalysisReport:
    """Decide ``A_i ⊆ B_i`` at every stage.

    The tail is certified when both threads have a single tail component
    with the same step and the seeds are included.
    """
    ta, tb = t.with_thread(a), t.with_thread(b)
    last = t.last_stage(horizon)
    for i in range(last + 1):
        group = t.group(i)
        small, big = ta.subgroup(i), tb.subgroup(i)
        if not group.includes(big, small):
            witness = next(g for g in group.generators(small) if not group.contains(big, g))
            return AnalysisReport(
                command="compare",
                verdict=f"NotIncluded({i})",
                certainty=Certainty.certified(STAGE_TEST),
                witnesses=[{"stage": i, "element": format_word(witness)}],
                provenance="a lifting projection between the limits exists when one thread lies in the other",
            )
    certainty = Certainty.certified(STAGE_TEST) if t.system.tail is None else Certainty.horizon_limited(last)
    if t.system.tail is not None and len(a.tail) == 1 and len(b.tail) == 1 and a.tail[0].step == b.tail[0].step:
        certainty = Certainty.certified(STATIONARY_SYMBOLIC)
    elif t.system.tail is not None and len(b.tail) == 1 and b.tail[0] in a.tail:
        certainty = Certainty.certified(STATIONARY_SYMBOLIC)
    return AnalysisReport(
        command="compare",
        verdict="Included",
        certainty=certainty,
        provenance="a lifting projection between the limits exists when one thread lies in the other",
    )
