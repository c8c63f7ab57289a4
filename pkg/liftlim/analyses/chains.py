"""Coset maps, stable images and stationary-tail facts shared by the analyses.

Two exact modes are used:

* lattice mode, when every stage is free abelian: coset images are lattices
  ``S`` with ``G_i ⊆ S ⊆ Z^n``
* finite mode, when every coset space in range is finite: coset images are
  sets of coset labels

Anything else only gets the rules that need no coset arithmetic.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, Optional, Tuple, Union

from ..errors import BudgetExceeded, UnsupportedBackend
from ..groups import AbelianGroup, StageGroup
from ..lattice import AbelianHom, Lattice, divisible_core, image, preimage
from ..tower import Tower
from ..words import GroupHom

logger = logging.getLogger(__name__)

LATTICE = "lattice"
FINITE = "finite"
OPAQUE = "opaque"

# Certification rule identifiers
STAGE_TEST = "stage-test"
FINITE_CHAIN = "finite-chain"
SURJECTIVE_BONDINGS = "surjective-bondings"
STATIONARY_CONSTANT = "stationary-constant"
STATIONARY_PROPAGATION = "stationary-propagation"
STATIONARY_INDEX_GROWTH = "stationary-index-growth"
STATIONARY_ABELIAN = "stationary-abelian"
STATIONARY_CYCLE = "stationary-cycle"
STATIONARY_SYMBOLIC = "stationary-symbolic"

CosetImage = Union[Lattice, frozenset]

CYCLE_LIMIT = 4096


def matrix_of(h: GroupHom) -> AbelianHom:
    return AbelianGroup(h.source).matrix(h)


def is_abelian_tower(t: Tower) -> bool:
    groups = list(t.system.groups)
    if t.system.tail is not None:
        groups.append(t.system.tail.group)
    return all(isinstance(g, AbelianGroup) for g in groups)


@dataclass
class TailFacts:
    """What one symbolic step of the stationary tail tells about all steps."""

    start: int
    group: StageGroup
    bonding: GroupHom
    constant: bool
    commuting: Optional[bool]
    invariant: bool
    bonding_surjective: Optional[bool]
    single: bool
    step_injective: Optional[bool] = None
    step_automorphism: Optional[bool] = None
    finite_index: bool = False
    index_growth: bool = False


def tail_facts(t: Tower) -> Optional[TailFacts]:
    tail = t.system.tail
    if tail is None:
        return None
    T, b = tail.group, tail.bonding
    components = t.thread.tail
    try:
        constant = all(T.same(T.image(c.step, c.seed, T), c.seed) for c in components)
        invariant = all(T.includes(c.seed, T.image(b, c.seed, T)) for c in components)
    except (UnsupportedBackend, BudgetExceeded):
        constant = invariant = False
    commuting: Optional[bool] = True
    for c in components:
        same = T.homs_equal(c.step.then(b), b.then(c.step), T)
        if same is not True:
            commuting = same
            break
    facts = TailFacts(
        start=t.system.prefix_length,
        group=T,
        bonding=b,
        constant=constant,
        commuting=commuting,
        invariant=invariant,
        bonding_surjective=T.is_surjective(b, T),
        single=len(components) == 1,
    )
    if facts.single:
        s = components[0].step
        facts.step_injective = T.is_injective(s)
        if facts.step_injective:
            facts.step_automorphism = T.is_surjective(s, T)
    if isinstance(T, AbelianGroup):
        dets = [matrix_of(c.step).matrix.det() for c in components]
        full_seeds = all(c.seed.rank == T.rank for c in components)
        facts.finite_index = full_seeds and all(d != 0 for d in dets)
        facts.index_growth = facts.finite_index and any(abs(d) >= 2 for d in dets)
    elif constant:
        try:
            facts.finite_index = all(T.index(c.seed) is not None for c in components)
        except (UnsupportedBackend, BudgetExceeded):
            facts.finite_index = False
    logger.debug("tail facts: %s", facts)
    return facts


# ============================================================================
# Coset maps between consecutive stages
# ============================================================================

@dataclass
class Step:
    """Coset map from stage ``index + 1`` to stage ``index``."""

    index: int
    injective: Optional[bool]
    surjective: Optional[bool]
    table: Optional[Dict[Hashable, Hashable]] = None


def coset_step(t: Tower, i: int) -> Step:
    src, dst = t.group(i + 1), t.group(i)
    u = t.bonding(i)
    upper, lower = t.subgroup(i + 1), t.subgroup(i)
    if isinstance(src, AbelianGroup) and isinstance(dst, AbelianGroup):
        m = src.matrix(u)
        injective = preimage(m, lower) == upper
        surjective = (image(m, src.full()) + lower).is_full()
        return Step(i, injective, surjective)
    try:
        reps = src.coset_representatives(upper)
        table = {src.coset_key(upper, r): dst.coset_key(lower, u(r)) for r in reps}
        values = set(table.values())
        return Step(i, len(values) == len(table), len(values) == dst.index(lower), table)
    except (UnsupportedBackend, BudgetExceeded) as e:
        logger.debug("coset map %d <- %d unavailable: %s", i, i + 1, e)
        return Step(i, None, None)


def coset_steps(t: Tower, last: int) -> List[Step]:
    return [coset_step(t, i) for i in range(last)]


def coset_mode(t: Tower, last: int) -> str:
    if is_abelian_tower(t):
        return LATTICE
    try:
        for i in range(last + 1):
            if t.group(i).index(t.subgroup(i)) is None:
                return OPAQUE
    except (UnsupportedBackend, BudgetExceeded):
        return OPAQUE
    return FINITE


def stage_count(t: Tower, i: int) -> Optional[int]:
    """Size of the stage-i fibre, None when infinite or not computable."""
    try:
        return t.group(i).index(t.subgroup(i))
    except (UnsupportedBackend, BudgetExceeded):
        return None


# ============================================================================
# Stable images
# ============================================================================

@dataclass
class StableImage:
    """Stable image at one stage with the chain that led to it."""

    stage: int
    value: Optional[CosetImage]
    rule: Optional[str]
    chain: List[Optional[int]] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return self.rule is not None


def _size(t: Tower, i: int, value: CosetImage) -> Optional[int]:
    if isinstance(value, Lattice):
        return t.subgroup(i).index_in(value)
    return len(value)


def _push_down(t: Tower, i: int, value: CosetImage, step: Step) -> CosetImage:
    """Image at stage ``i`` of a coset image at stage ``i + 1``."""
    if isinstance(value, Lattice):
        m = matrix_of(t.bonding(i))
        return image(m, value) + t.subgroup(i)
    return frozenset(step.table[key] for key in value)


def _everything(t: Tower, i: int, mode: str) -> CosetImage:
    if mode == LATTICE:
        return t.group(i).full()
    group, handle = t.group(i), t.subgroup(i)
    return frozenset(group.coset_key(handle, r) for r in group.coset_representatives(handle))


def bondings_surjective(t: Tower, facts: Optional[TailFacts]) -> bool:
    """True when every declared bonding is onto, tail included."""
    for i in range(max(t.system.prefix_length - 1, 0)):
        if t.group(i + 1).is_surjective(t.bonding(i), t.group(i)) is not True:
            return False
    if facts is not None:
        if facts.start and t.group(facts.start).is_surjective(t.bonding(facts.start - 1), t.group(facts.start - 1)) is not True:
            return False
        if facts.bonding_surjective is not True:
            return False
    return True


def coset_steps_surjective(t: Tower, steps: List[Step], facts: Optional[TailFacts]) -> bool:
    """True when every coset map is onto: declared steps checked, tail by its bonding."""
    limit = facts.start if facts is not None else len(steps)
    if any(s.surjective is not True for s in steps[:limit]):
        return False
    return facts is None or facts.bonding_surjective is True


def _tail_cycle(t: Tower, i: int, mode: str, step: Optional[Step]) -> Optional[CosetImage]:
    """Stable coset image at tail stage i when ``b(G_i) ⊆ G_i``.

    The images satisfy ``M_{j+1} = b(M_j) + G_i`` and decrease, so the first
    repetition is the stable image.
    """
    T = t.system.tail.group
    b = t.system.tail.bonding
    handle = t.subgroup(i)
    if mode == LATTICE:
        m = matrix_of(b)
        current = T.full()
        for _ in range(CYCLE_LIMIT):
            following = image(m, current) + handle
            if following == current:
                return current
            current = following
        return None
    reps = T.coset_representatives(handle)
    table = {T.coset_key(handle, r): T.coset_key(handle, b(r)) for r in reps}
    current = frozenset(table)
    while True:
        following = frozenset(table[key] for key in current)
        if following == current:
            return current
        current = following


def coset_stable_images(t: Tower, last: int, steps: List[Step], facts: Optional[TailFacts],
                        group_images: Optional[List["GroupImage"]] = None) -> List[StableImage]:
    """Chains of coset images and certified stable images for stages ``0..last``."""
    mode = coset_mode(t, last)
    if mode == OPAQUE:
        return [StableImage(i, None, None) for i in range(last + 1)]

    # chain[i][j]: image at stage i of everything at stage i + j
    chains: List[List[CosetImage]] = [[] for _ in range(last + 1)]
    for top in range(last + 1):
        value = _everything(t, top, mode)
        chains[top].append(value)
        for i in range(top - 1, -1, -1):
            value = _push_down(t, i, value, steps[i])
            chains[i].append(value)

    results = [
        StableImage(i, chains[i][-1], None, [_size(t, i, v) for v in chains[i]])
        for i in range(last + 1)
    ]
    if coset_steps_surjective(t, steps, facts):
        for r in results:
            r.value, r.rule = _everything(t, r.stage, mode), SURJECTIVE_BONDINGS
        return results
    if facts is None:
        return results

    stationary_invariant = facts.invariant and (facts.constant or facts.commuting is True)
    if mode == FINITE and not facts.constant:
        stationary_invariant = False
    certified_tail: Dict[int, CosetImage] = {}
    rule = STATIONARY_CYCLE if mode == LATTICE else FINITE_CHAIN
    for i in range(facts.start, last + 1):
        value = _tail_cycle(t, i, mode, None) if stationary_invariant else None
        if value is not None:
            certified_tail[i] = value
            results[i].value, results[i].rule = value, rule
        elif group_images is not None and mode == LATTICE:
            g = group_images[i]
            if g.rule is not None and g.value.includes(t.subgroup(i)):
                results[i].value, results[i].rule = g.value, g.rule
                certified_tail[i] = g.value
    if facts.start in certified_tail:
        value = certified_tail[facts.start]
        for i in range(facts.start - 1, -1, -1):
            value = _push_down(t, i, value, steps[i])
            results[i].value, results[i].rule = value, results[facts.start].rule
    return results


# ============================================================================
# Group stable images (lattice mode, or surjective bondings)
# ============================================================================

@dataclass
class GroupImage:
    stage: int
    value: Optional[Lattice]
    rule: Optional[str]
    full: bool = False


def tail_images(b: AbelianHom, rank: int) -> Tuple[Lattice, bool]:
    """``b^n(Z^n)`` and whether the image chain of ``b`` stops there."""
    current = Lattice.full(rank)
    for _ in range(rank):
        current = image(b, current)
    return current, image(b, current) == current


def group_stable_images(t: Tower, last: int, facts: Optional[TailFacts]) -> Tuple[List[GroupImage], Optional[bool], Optional[str]]:
    """Group stable images per stage plus the Mittag-Leffler verdict for groups.

    Returns ``(images, ml_holds, rule)``; ``rule`` is None when the verdict
    only reflects the horizon.
    """
    if bondings_surjective(t, facts):
        images = [GroupImage(i, t.group(i).full() if isinstance(t.group(i), AbelianGroup) else None,
                             SURJECTIVE_BONDINGS, True) for i in range(last + 1)]
        return images, True, SURJECTIVE_BONDINGS
    if not is_abelian_tower(t):
        return [GroupImage(i, None, None) for i in range(last + 1)], None, None

    chains: List[List[Lattice]] = [[] for _ in range(last + 1)]
    for top in range(last + 1):
        value = t.group(top).full()
        chains[top].append(value)
        for i in range(top - 1, -1, -1):
            value = image(matrix_of(t.bonding(i)), value)
            chains[i].append(value)
    images = [GroupImage(i, chains[i][-1], None) for i in range(last + 1)]
    within = all(len(c) < 2 or c[-1] == c[-2] for c in chains[:max(last, 1)])

    if facts is None:
        return images, within, None
    b = matrix_of(facts.bonding)
    rank = facts.group.rank
    core = divisible_core(b, Lattice.full(rank))
    eventual, stops = tail_images(b, rank)
    for i in range(facts.start, last + 1):
        images[i] = GroupImage(i, core, STATIONARY_ABELIAN, core.is_full())
    if not stops:
        return images, False, STATIONARY_ABELIAN
    value = core
    for i in range(facts.start - 1, -1, -1):
        value = image(matrix_of(t.bonding(i)), value)
        images[i] = GroupImage(i, value, STATIONARY_ABELIAN, value.is_full())
    return images, True, STATIONARY_ABELIAN
