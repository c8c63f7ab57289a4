"""Named example towers with the verdicts they are known to produce."""

from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Tuple

from .errors import ParamOutOfRange, UnknownEntry
from .groups import AbelianGroup, FreeGroup
from .tower import BaseModel, InverseSystem, StationaryTail, Thread, ThreadComponent, Tower
from .words import Alphabet, GroupHom, Word


@dataclass(frozen=True)
class GalleryEntry:
    name: str
    params: Dict[str, int]
    tower: Tower
    model: Optional[BaseModel]
    expected: Dict[str, str] = field(default_factory=dict)


# name -> (low, high, default) per parameter
PARAMETERS: Dict[str, Dict[str, Tuple[int, int, int]]] = {
    "p-solenoid": {"p": (2, 97, 2)},
    "dyadic-solenoid": {},
    "warsawonoid": {},
    "covering-circle": {"n": (1, 64, 2)},
    "hawaiian": {"n": (1, 6, 4)},
    "product-tower": {"n": (1, 6, 3)},
}


def _circle() -> AbelianGroup:
    return AbelianGroup(Alphabet.of("a"), name="Z")


def _scale(alphabet: Alphabet, k: int) -> GroupHom:
    return GroupHom(alphabet, alphabet, (Word.generator(alphabet, 0, k),))


def _stationary_circle(name: str, seed_index: int, step: int) -> Tuple[Tower, BaseModel]:
    Z = _circle()
    identity = GroupHom.identity(Z.alphabet)
    system = InverseSystem((), (), StationaryTail(Z, identity))
    seed = Z.subgroup([Z.word(f"a^{seed_index}")])
    tower = Tower(system, Thread((), (ThreadComponent(seed, _scale(Z.alphabet, step)),)), name=name)
    return tower, BaseModel(Z, (), identity)


def _solenoid(name: str, params: Dict[str, int]) -> GalleryEntry:
    p = params.get("p", 2)
    tower, model = _stationary_circle(name, 1, p)
    expected = {
        "check": "Coherent",
        "classify": "StrictLifting",
        "fiber": "Uncountable",
        "pi0": "Uncountable",
        "deck": "DeckTower",
        "density": "Dense(stagewise)",
    }
    return GalleryEntry(name, params, tower, model, expected)


def _covering_circle(name: str, params: Dict[str, int]) -> GalleryEntry:
    n = params["n"]
    tower, model = _stationary_circle(name, n, 1)
    expected = {
        "check": "Coherent",
        "classify": "Covering(0)",
        "fiber": f"Finite({n})",
        "pi0": "Trivial",
        "deck": "DeckTower",
        "density": "Dense(stagewise)",
    }
    return GalleryEntry(name, params, tower, model, expected)


def _retraction(source: Alphabet, target: Alphabet) -> GroupHom:
    """Keep the generators the target shares with the source, kill the rest."""
    mapping = {g: Word.generator(target, target.index(g)) for g in source if g in target.names}
    return GroupHom.from_mapping(source, target, mapping)


def _hawaiian(name: str, params: Dict[str, int]) -> GalleryEntry:
    n = params["n"]
    alphabets = [Alphabet(tuple(f"a{j}" for j in range(1, i + 1))) for i in range(n + 1)]
    groups = tuple(FreeGroup(a, name=f"F{i}") for i, a in enumerate(alphabets))
    bondings = tuple(_retraction(alphabets[i + 1], alphabets[i]) for i in range(n))
    thread = Thread(tuple(g.trivial() for g in groups))
    tower = Tower(InverseSystem(groups, bondings), thread, name=name)
    P = FreeGroup(alphabets[-1], name="P")
    model = BaseModel(P, tuple(_retraction(alphabets[-1], a) for a in alphabets))
    expected = {
        "check": "Coherent",
        "classify": "Unknown",
        "density": "Dense(cor-1)",
        "deck": "DeckTower",
    }
    return GalleryEntry(name, params, tower, model, expected)


def _product_tower(name: str, params: Dict[str, int]) -> GalleryEntry:
    n = params["n"]
    alphabets = [Alphabet(tuple(f"x{j}" for j in range(1, i + 1))) for i in range(n + 1)]
    groups = tuple(AbelianGroup(a, name=f"Z^{i}") for i, a in enumerate(alphabets))
    bondings = tuple(_retraction(alphabets[i + 1], alphabets[i]) for i in range(n))
    thread = Thread(tuple(g.trivial() for g in groups))
    tower = Tower(InverseSystem(groups, bondings), thread, name=name)
    P = AbelianGroup(alphabets[-1], name="P")
    model = BaseModel(P, tuple(_retraction(alphabets[-1], a) for a in alphabets))
    expected = {
        "check": "Coherent",
        "classify": "Unknown",
        "density": "Dense(cor-1)",
        "deck": "DeckTower",
    }
    return GalleryEntry(name, params, tower, model, expected)


_BUILDERS: Dict[str, Callable[[str, Dict[str, int]], GalleryEntry]] = {
    "p-solenoid": _solenoid,
    "dyadic-solenoid": _solenoid,
    # only the group data of the Warsaw circle tower is modelled; it is the dyadic one
    "warsawonoid": _solenoid,
    "covering-circle": _covering_circle,
    "hawaiian": _hawaiian,
    "product-tower": _product_tower,
}


def gallery_names() -> Tuple[str, ...]:
    return tuple(_BUILDERS)


def make_gallery(name: str, params: Optional[Mapping[str, int]] = None) -> GalleryEntry:
    """Build a gallery entry.

    Args:
        name: Entry name, see :func:`gallery_names`
        params: Integer parameters; missing ones take their defaults

    Raises:
        UnknownEntry: If no entry has this name
        ParamOutOfRange: If a parameter is unknown to the entry or out of range
    """
    if name not in _BUILDERS:
        raise UnknownEntry(name, gallery_names())
    ranges = PARAMETERS[name]
    values: Dict[str, int] = {}
    for key, value in (params or {}).items():
        if key not in ranges:
            raise ParamOutOfRange(key, value, 0, 0)
    for key, (low, high, default) in ranges.items():
        value = (params or {}).get(key, default)
        if not isinstance(value, int) or not low <= value <= high:
            raise ParamOutOfRange(key, value, low, high)
        values[key] = value
    return _BUILDERS[name](name, values)
