"""Restriction of towers and base models to cofinal index sequences."""

import logging
from typing import Optional, Tuple

from ..errors import NonCofinal
from ..tower import BaseModel, IndexSequence, InverseSystem, StationaryTail, Thread, ThreadComponent, Tower

logger = logging.getLogger(__name__)


def _split(t: Tower, seq: IndexSequence) -> Tuple[int, Optional[int]]:
    """Number of restricted prefix stages and the first restricted tail stage."""
    k = t.system.prefix_length
    if t.system.tail is None:
        if seq.is_infinite:
            raise NonCofinal(f"endless sequence {seq} against a tower of {k} stages")
        if seq.indices[-1] != k - 1:
            raise NonCofinal(f"sequence {seq} does not reach the last stage {k - 1}")
        return len(seq.indices), None
    if not seq.is_infinite:
        raise NonCofinal(f"finite sequence {seq} cannot be cofinal in a tower with a stationary tail")
    listed = seq.indices
    arithmetic = len(listed) - 1
    while arithmetic > 0 and listed[arithmetic] - listed[arithmetic - 1] == seq.stride:
        arithmetic -= 1
    reaching = 0
    while seq[reaching] < k:
        reaching += 1
    n0 = max(arithmetic, reaching)
    return n0, seq[n0]


def restrict_cofinal(t: Tower, seq: IndexSequence) -> Tower:
    """The tower over the stages ``seq[0], seq[1], ...`` with composed bondings.

    On a stationary tail the restriction is stationary again: the bonding
    and every thread step are raised to the stride.

    Raises:
        NonCofinal: If the sequence cannot reach arbitrarily deep stages
    """
    n0, start = _split(t, seq)
    picked = [seq[n] for n in range(n0)]
    for index in picked:
        if t.system.tail is None and index >= t.system.prefix_length:
            raise NonCofinal(f"stage {index} does not exist")
    groups = tuple(t.group(i) for i in picked)
    bondings = tuple(t.composite(a, b) for a, b in zip(picked, picked[1:]))
    entries = tuple(t.subgroup(i) for i in picked)
    tail = None
    components = ()
    if start is not None:
        source = t.system.tail
        k = t.system.prefix_length
        connector = t.composite(picked[-1], start) if picked else None
        tail = StationaryTail(source.group, source.bonding.power(seq.stride), connector)
        components = tuple(
            ThreadComponent(t.component_subgroup(c, start - k), component.step.power(seq.stride))
            for c, component in enumerate(t.thread.tail)
        )
    logger.debug("restricted to %s: %d prefix stages, tail from stage %s", seq, len(picked), start)
    return Tower(InverseSystem(groups, bondings, tail), Thread(entries, components), t.horizon, t.name)


def restrict_model(m: BaseModel, t: Tower, seq: IndexSequence) -> BaseModel:
    """Base model maps matching :func:`restrict_cofinal` on the same sequence."""
    n0, start = _split(t, seq)
    maps = tuple(m.map(seq[n]) for n in range(n0))
    if start is None:
        return BaseModel(m.group, maps)
    lift = m.tail_lift.power(seq.stride) if m.tail_lift is not None else None
    return BaseModel(m.group, maps, m.map(start), lift)
