"""Lifting criterion for maps between limits of coverings."""

import logging
from typing import Any, Dict, List, Optional, Tuple

from ..groups import AbelianGroup
from ..lattice import Lattice, hermite_smith, image, preimage
from ..report import AnalysisReport, Certainty
from ..tower import LevelMap, Tower
from .chains import CYCLE_LIMIT, STAGE_TEST, STATIONARY_CYCLE, STATIONARY_PROPAGATION, matrix_of

logger = logging.getLogger(__name__)


def _lands(src: Tower, dst: Tower, f: LevelMap, i: int, j: int) -> bool:
    """``(f_i o u_{i+shift, j})(G_j) ⊆ H_i``."""
    h = src.composite(i + f.shift, j).then(f.at(i))
    target = dst.group(i)
    handle = dst.subgroup(i)
    return all(target.contains(handle, h(g)) for g in src.group(j).generators(src.subgroup(j)))


def _tail_search(src: Tower, dst: Tower, f: LevelMap, i: int) -> Tuple[Optional[bool], Optional[int]]:
    """Settle target stage i over the whole abelian source tail.

    With ``F = f_i o u`` from the first usable tail stage and ``K`` the
    preimage of ``H_i``, a source stage ``j0 + t`` works exactly when
    ``(b s)^t (G_{j0}) ⊆ K``. Modulo ``mT ⊆ K`` the sets
    ``E_t = (b s)^t (G_{j0}) + mT`` follow ``E_{t+1} = (b s)(E_t) + mT``
    and are eventually periodic, so one period decides every t.

    Returns ``(True, None)`` when no source stage works, ``(False, j)`` with
    the smallest working stage j, and ``(None, None)`` when the rule does not
    apply.
    """
    tail = src.system.tail
    if tail is None or len(src.thread.tail) != 1 or not isinstance(tail.group, AbelianGroup):
        return None, None
    if not isinstance(dst.group(i), AbelianGroup):
        return None, None
    T = tail.group
    b, s = matrix_of(tail.bonding), matrix_of(src.thread.tail[0].step)
    if b.then(s) != s.then(b):
        return None, None
    k = src.system.prefix_length
    j0 = max(i + f.shift, k)
    F = matrix_of(src.composite(i + f.shift, j0).then(f.at(i)))
    K = preimage(F, dst.subgroup(i))
    if K.rank != T.rank:
        return None, None
    m = hermite_smith(K.matrix()).diagonal[-1]
    modulus = Lattice.scaled(T.rank, m)
    sigma = s.then(b)
    current = src.subgroup(j0) + modulus
    seen = set()
    for step in range(CYCLE_LIMIT):
        if K.includes(current):
            return False, j0 + step
        if current in seen:
            return True, None
        seen.add(current)
        current = image(sigma, current) + modulus
    return None, None


def _propagates(src: Tower, dst: Tower, f: LevelMap, first_tail: int) -> bool:
    """A witness offset at the first target tail stage repeats forever.

    Needs single tail components on both sides, ``f o s = s' o f`` and a
    source bonding commuting with its step.
    """
    if src.system.tail is None or dst.system.tail is None or f.tail_map is None:
        return False
    if len(src.thread.tail) != 1 or len(dst.thread.tail) != 1:
        return False
    if first_tail + f.shift < src.system.prefix_length:
        return False
    T, T2 = src.system.tail.group, dst.system.tail.group
    s, s2, b = src.thread.tail[0].step, dst.thread.tail[0].step, src.system.tail.bonding
    return (
        T.homs_equal(s.then(f.tail_map), f.tail_map.then(s2), T2) is True
        and T.homs_equal(s.then(b), b.then(s), T) is True
    )


def lift_exists(src: Tower, dst: Tower, f: LevelMap, horizon: Optional[int] = None) -> AnalysisReport:
    """Search for a lift of a level map between the two limits.

    For every target stage i the smallest source stage j with
    ``(f_i o u_{ij})(G_j) ⊆ H_i`` is recorded.

    Returns:
        Report with verdict ``Liftable``, ``Obstructed(i)`` or ``Unknown``;
        ``details["witnesses"]`` maps target stages to their smallest j
    """
    last = dst.last_stage(horizon)
    src_last = max(src.last_stage(horizon), last + f.shift)
    if src.system.is_finite:
        src_last = src.system.prefix_length - 1
    witnesses: Dict[int, int] = {}
    for i in range(last + 1):
        found = None
        for j in range(i + f.shift, src_last + 1):
            if _lands(src, dst, f, i, j):
                found = j
                break
        if found is None:
            obstructed, beyond = _tail_search(src, dst, f, i)
            if obstructed:
                return _report(f"Obstructed({i})", Certainty.certified(STATIONARY_CYCLE), witnesses, i)
            if beyond is None:
                return _report("Unknown", Certainty.horizon_limited(last), witnesses, i)
            found = beyond
        witnesses[i] = found
        logger.debug("target stage %d lifts from source stage %d", i, found)

    certainty = Certainty.horizon_limited(last)
    if dst.system.is_finite:
        certainty = Certainty.certified(STAGE_TEST)
    elif _propagates(src, dst, f, dst.system.prefix_length):
        certainty = Certainty.certified(STATIONARY_PROPAGATION)
    return _report("Liftable", certainty, witnesses, None)


def _report(verdict: str, certainty: Certainty, witnesses: Dict[int, int], stage: Optional[int]) -> AnalysisReport:
    rows: List[Dict[str, Any]] = [{"target_stage": i, "source_stage": j} for i, j in sorted(witnesses.items())]
    details: Dict[str, Any] = {"witnesses": {str(i): j for i, j in sorted(witnesses.items())}}
    if stage is not None:
        details["failing_stage"] = stage
    return AnalysisReport(
        command="lift",
        verdict=verdict,
        certainty=certainty,
        witnesses=rows,
        details=details,
        provenance="a lift exists when every thread image lands in the target thread at some deeper stage",
    )
