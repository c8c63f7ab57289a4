"""Shared towers for the analysis tests."""

from pathlib import Path

import pytest

from liftlim.groups import AbelianGroup
from liftlim.lattice import Lattice
from liftlim.specfile import parse_spec
from liftlim.tower import BaseModel, InverseSystem, StationaryTail, Thread, ThreadComponent, Tower
from liftlim.words import Alphabet, GroupHom, Word

ROOT = Path(__file__).resolve().parent.parent
SPECS = ROOT / "specs"
FIXTURES = Path(__file__).resolve().parent / "fixtures"

A = Alphabet.of("a")
Z = AbelianGroup(A, name="Z")
ID = GroupHom.identity(A)


def scale(k: int) -> GroupHom:
    return GroupHom(A, A, (Word.generator(A, 0, k),))


def circle_tower(seed: int, step: int, bonding: int = 1) -> Tower:
    """Stationary circle tower with thread ``step^j(seed Z)``."""
    system = InverseSystem((), (), StationaryTail(Z, scale(bonding)))
    return Tower(system, Thread((), (ThreadComponent(Lattice.scaled(1, seed), scale(step)),)))


def prefix_tower(*indices: int) -> Tower:
    """Finite circle tower with identity bondings and thread ``n Z`` per stage."""
    groups = (Z,) * len(indices)
    return Tower(
        InverseSystem(groups, (ID,) * (len(indices) - 1)),
        Thread(tuple(Lattice.scaled(1, n) for n in indices)),
    )


@pytest.fixture
def dyadic():
    return circle_tower(1, 2)


@pytest.fixture
def circle_model():
    return BaseModel(Z, (), ID)


@pytest.fixture
def dyadic_doc():
    return parse_spec(SPECS / "dyadic-solenoid.spec")
