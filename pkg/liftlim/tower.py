"""Towers: inverse systems of stage groups with a coherent thread.

An :class:`InverseSystem` is a finite prefix of stages, optionally followed by
a stationary tail that repeats one group and one bonding endomorphism
forever. A :class:`Thread` picks a subgroup per stage; on the tail it is
described by components ``(seed, step)`` and stage ``k + j`` carries the
intersection of the ``step^j(seed)``.
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Tuple

from .errors import AlphabetMismatch, NonCofinal, UnsupportedBackend
from .groups import Handle, StageGroup
from .words import GroupHom, Word

logger = logging.getLogger(__name__)

DEFAULT_HORIZON = 16


@dataclass(frozen=True)
class StationaryTail:
    """Stage repeated forever after the prefix.

    ``connector`` maps the first tail stage onto the last prefix stage and
    is required exactly when the prefix is not empty.
    """

    group: StageGroup
    bonding: GroupHom
    connector: Optional[GroupHom] = None


@dataclass(frozen=True)
class InverseSystem:
    """Stage groups with bondings ``bondings[i]: stage i+1 -> stage i``."""

    groups: Tuple[StageGroup, ...]
    bondings: Tuple[GroupHom, ...] = ()
    tail: Optional[StationaryTail] = None

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))
        object.__setattr__(self, "bondings", tuple(self.bondings))
        if not self.groups and self.tail is None:
            raise ValueError("a tower needs at least one stage")
        if len(self.bondings) != max(len(self.groups) - 1, 0):
            raise ValueError(f"{len(self.groups)} prefix stages need {max(len(self.groups) - 1, 0)} bondings, got {len(self.bondings)}")
        for i, u in enumerate(self.bondings):
            self._expect(u, self.groups[i + 1], self.groups[i], f"bonding {i}")
        if self.tail is not None:
            t = self.tail
            self._expect(t.bonding, t.group, t.group, "tail bonding")
            if self.groups:
                if t.connector is None:
                    raise ValueError("a tail after a prefix needs a connector bonding")
                self._expect(t.connector, t.group, self.groups[-1], "tail connector")
            elif t.connector is not None:
                raise ValueError("a tail without prefix takes no connector")

    @staticmethod
    def _expect(h: GroupHom, source: StageGroup, target: StageGroup, what: str) -> None:
        if h.source != source.alphabet or h.target != target.alphabet:
            raise AlphabetMismatch(
                f"{what} goes {h.source} -> {h.target}, stages are {source.alphabet} -> {target.alphabet}"
            )

    @property
    def prefix_length(self) -> int:
        return len(self.groups)

    @property
    def is_finite(self) -> bool:
        return self.tail is None

    def last_stage(self, horizon: int) -> int:
        """Largest stage index examined under ``horizon``."""
        if self.is_finite:
            return min(horizon, self.prefix_length - 1)
        return max(horizon, self.prefix_length + 1)

    def group(self, i: int) -> StageGroup:
        if i < self.prefix_length:
            return self.groups[i]
        if self.tail is None:
            raise IndexError(f"stage {i} beyond a {self.prefix_length}-stage tower")
        return self.tail.group

    def bonding(self, i: int) -> GroupHom:
        """Bonding from stage ``i + 1`` to stage ``i``."""
        k = self.prefix_length
        if i < k - 1:
            return self.bondings[i]
        if self.tail is None:
            raise IndexError(f"no bonding out of stage {i + 1}")
        if i == k - 1:
            return self.tail.connector
        return self.tail.bonding

    def composite(self, i: int, j: int) -> GroupHom:
        """Composite bonding from stage ``j`` down to stage ``i`` (``j >= i``)."""
        if j < i:
            raise ValueError(f"no bonding from stage {j} up to stage {i}")
        h = GroupHom.identity(self.group(j).alphabet)
        for step in range(j - 1, i - 1, -1):
            h = h.then(self.bonding(step))
        return h


@dataclass(frozen=True)
class ThreadComponent:
    seed: Handle
    step: GroupHom


@dataclass(frozen=True)
class Thread:
    """Subgroups of the prefix stages plus the tail components."""

    entries: Tuple[Handle, ...]
    tail: Tuple[ThreadComponent, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        object.__setattr__(self, "tail", tuple(self.tail))

    @property
    def is_constant(self) -> bool:
        return all(c.step.is_identity() for c in self.tail)


@dataclass(frozen=True)
class Tower:
    """An inverse system with a thread and a default horizon."""

    system: InverseSystem
    thread: Thread
    horizon: int = DEFAULT_HORIZON
    name: str = field(default="", compare=False)
    _cache: Dict[Tuple[int, int], Handle] = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if len(self.thread.entries) != self.system.prefix_length:
            raise ValueError(
                f"thread has {len(self.thread.entries)} entries for {self.system.prefix_length} prefix stages"
            )
        if (self.system.tail is None) != (not self.thread.tail):
            raise ValueError("a thread has tail components exactly when the tower has a tail")
        for c in self.thread.tail:
            alphabet = self.system.tail.group.alphabet
            if c.step.source != alphabet or c.step.target != alphabet:
                raise AlphabetMismatch(f"thread step {c.step} is not an endomorphism of the tail stage")

    @property
    def tail_start(self) -> Optional[int]:
        return None if self.system.tail is None else self.system.prefix_length

    def group(self, i: int) -> StageGroup:
        return self.system.group(i)

    def bonding(self, i: int) -> GroupHom:
        return self.system.bonding(i)

    def composite(self, i: int, j: int) -> GroupHom:
        return self.system.composite(i, j)

    def last_stage(self, horizon: Optional[int] = None) -> int:
        return self.system.last_stage(self.horizon if horizon is None else horizon)

    def component_subgroup(self, c: int, j: int) -> Handle:
        """``step^j(seed)`` of tail component ``c``."""
        key = (c, j)
        if key not in self._cache:
            component = self.thread.tail[c]
            group = self.system.tail.group
            if j == 0:
                handle = component.seed
            else:
                handle = group.image(component.step, self.component_subgroup(c, j - 1), group)
            self._cache[key] = handle
        return self._cache[key]

    def subgroup(self, i: int) -> Handle:
        """Thread entry ``G_i``."""
        k = self.system.prefix_length
        if i < k:
            return self.thread.entries[i]
        if self.system.tail is None:
            raise IndexError(f"stage {i} beyond a {k}-stage tower")
        key = (-1, i - k)
        if key not in self._cache:
            group = self.system.tail.group
            handle = self.component_subgroup(0, i - k)
            for c in range(1, len(self.thread.tail)):
                handle = group.intersect(handle, self.component_subgroup(c, i - k))
            self._cache[key] = handle
        return self._cache[key]

    def with_thread(self, thread: Thread, name: str = "") -> "Tower":
        return Tower(self.system, thread, self.horizon, name or self.name)

    def describe(self, i: int) -> str:
        return self.group(i).describe(self.subgroup(i))


@dataclass(frozen=True)
class BaseModel:
    """Model group P of the base with maps ``phi_i: P -> stage i``.

    Tail stages use ``tail_map`` at the first tail stage and then
    ``phi_{k+j+1} = tail_lift o phi_{k+j}``; without a lift every tail stage
    uses ``tail_map``.
    """

    group: StageGroup
    maps: Tuple[GroupHom, ...] = ()
    tail_map: Optional[GroupHom] = None
    tail_lift: Optional[GroupHom] = None

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        for h in self.maps + tuple(m for m in (self.tail_map,) if m is not None):
            if h.source != self.group.alphabet:
                raise AlphabetMismatch(f"base map {h} does not start at the model {self.group.alphabet}")

    def map(self, i: int) -> GroupHom:
        k = len(self.maps)
        if i < k:
            return self.maps[i]
        if self.tail_map is None:
            raise IndexError(f"base model has no map to stage {i}")
        h = self.tail_map
        if self.tail_lift is not None:
            for _ in range(i - k):
                h = h.then(self.tail_lift)
        return h

    def fits(self, system: InverseSystem) -> bool:
        return len(self.maps) == system.prefix_length and (self.tail_map is not None) == (system.tail is not None)


class ModelCheck(NamedTuple):
    """Failures of ``u_i o phi_{i+1} = phi_i`` and comparisons no backend could decide."""

    issues: List[str]
    unverified: List[str]


def model_check(system: InverseSystem, model: BaseModel) -> ModelCheck:
    """Compare ``u_i o phi_{i+1}`` with ``phi_i`` generator by generator.

    Prefix pairs and the connector are compared directly; the tail is
    compared symbolically for one step.
    """
    issues: List[str] = []
    unverified: List[str] = []
    if not model.fits(system):
        return ModelCheck(["base model maps do not match the stages of the tower"], [])

    def compare(group: StageGroup, a: Word, b: Word, issue: str) -> None:
        try:
            if not group.equal(a, b):
                issues.append(issue)
        except UnsupportedBackend:
            unverified.append(issue)

    k = system.prefix_length
    pairs = [(i, system.bonding(i)) for i in range(k - 1)]
    if system.tail is not None and k:
        pairs.append((k - 1, system.tail.connector))
    for i, u in pairs:
        upper = model.map(i + 1).then(u)
        for name, a, b in zip(model.group.alphabet.names, upper.images, model.map(i).images):
            compare(system.group(i), a, b,
                    f"stage {i}: bonding o phi_{i + 1} gives {name} -> {a}, phi_{i} gives {name} -> {b}")
    if system.tail is not None:
        t = system.tail
        if model.tail_lift is None:
            lhs, rhs = model.tail_map.then(t.bonding), model.tail_map
            label = "tail bonding o phi_k"
        else:
            lhs = model.tail_lift.then(t.bonding)
            rhs = GroupHom.identity(t.group.alphabet)
            label = "tail bonding o lift"
        for a, b in zip(lhs.images, rhs.images):
            compare(t.group, a, b, f"tail: {label} gives {a}, expected {b}")
    return ModelCheck(issues, unverified)


def compatibility_issues(system: InverseSystem, model: BaseModel) -> List[str]:
    """Generator-level failures of ``u_i o phi_{i+1} = phi_i``."""
    return model_check(system, model).issues


@dataclass(frozen=True)
class LevelMap:
    """Stage maps ``f_i: source stage i + shift -> target stage i``.

    ``maps`` cover the target prefix; ``tail_map`` covers every target tail
    stage and must go between the two tail groups.
    """

    maps: Tuple[GroupHom, ...] = ()
    tail_map: Optional[GroupHom] = None
    shift: int = 0

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if self.shift < 0:
            raise ValueError("level maps cannot shift to earlier source stages")

    def at(self, i: int) -> GroupHom:
        if i < len(self.maps):
            return self.maps[i]
        if self.tail_map is None:
            raise IndexError(f"level map has no component at target stage {i}")
        return self.tail_map


_SEQUENCE = re.compile(r"^\s*\d+(\s*,\s*\d+)*(\s*,\s*\.\.\.)?\s*$")


@dataclass(frozen=True)
class IndexSequence:
    """Strictly increasing stage indices, optionally continued with a stride.

    ``IndexSequence((0, 2, 4), stride=2)`` is 0, 2, 4, 6, ...
    """

    indices: Tuple[int, ...]
    stride: Optional[int] = None

    def __post_init__(self):
        indices = tuple(self.indices)
        object.__setattr__(self, "indices", indices)
        if not indices:
            raise NonCofinal("empty index sequence")
        if indices[0] < 0 or any(b <= a for a, b in zip(indices, indices[1:])):
            raise NonCofinal(f"indices {indices} are not strictly increasing naturals")
        if self.stride is not None and self.stride <= 0:
            raise NonCofinal(f"stride {self.stride} is not positive")

    @classmethod
    def parse(cls, text: str) -> "IndexSequence":
        """Parse ``"0,2,4"`` or ``"0,2,4,..."``; the stride is the last gap."""
        if not _SEQUENCE.match(text):
            raise ValueError(f"Invalid index sequence: '{text}'. Expected e.g. '0,2,4' or '0,2,4,...'")
        parts = [p.strip() for p in text.split(",")]
        endless = parts[-1] == "..."
        numbers = tuple(int(p) for p in parts if p != "...")
        if not endless:
            return cls(numbers)
        if len(numbers) < 2:
            raise ValueError("an endless sequence needs two indices to fix its stride")
        return cls(numbers, numbers[-1] - numbers[-2])

    @property
    def is_infinite(self) -> bool:
        return self.stride is not None

    def __getitem__(self, n: int) -> int:
        if n < len(self.indices):
            return self.indices[n]
        if self.stride is None:
            raise IndexError(n)
        return self.indices[-1] + (n - len(self.indices) + 1) * self.stride

    def __str__(self) -> str:
        text = ",".join(str(i) for i in self.indices)
        return text + ",..." if self.stride is not None else text
