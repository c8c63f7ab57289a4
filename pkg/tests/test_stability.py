"""Tests for coherence, the covering classification and fibres."""

import pytest

from conftest import ID, Z, circle_tower, prefix_tower, scale
from liftlim.analyses import check_coherence, deck_tower, fiber_model, require_coherent, stability_analysis
from liftlim.analyses.coherence import check_base_model, require_compatible
from liftlim.errors import CoherenceViolation, IncompatibleModel
from liftlim.groups import AbelianGroup
from liftlim.lattice import Lattice
from liftlim.tower import BaseModel, InverseSystem, StationaryTail, Thread, ThreadComponent, Tower
from liftlim.words import Alphabet, GroupHom


def test_coherent_stationary_tail(dyadic):
    """Test that a commuting tail is settled symbolically."""
    report = check_coherence(dyadic)
    assert report.verdict == "Coherent"
    assert report.certified
    assert report.certainty.rule == "stationary-symbolic"


def test_incoherent_prefix():
    """Test the witness of a thread entry escaping the stage below."""
    report = check_coherence(prefix_tower(2, 1))
    assert report.verdict == "Incoherent"
    assert report.witnesses == [{"stage": 0, "upper": 1, "element": "a"}]
    with pytest.raises(CoherenceViolation) as info:
        require_coherent(prefix_tower(2, 1))
    assert info.value.stage == 0


def test_incoherent_tail_found_within_horizon():
    """Test a tail checked stage by stage when no symbolic step applies."""
    system = InverseSystem((), (), StationaryTail(Z, ID))
    shrinking = Tower(system, Thread((), (ThreadComponent(Lattice.scaled(1, 4), scale(2)),)))
    assert check_coherence(shrinking).verdict == "Coherent"

    AB = Alphabet.of("a", "b")
    plane = AbelianGroup(AB)
    swap = GroupHom.from_mapping(AB, AB, {"a": plane.word("b"), "b": plane.word("a")})
    seed = plane.subgroup([plane.word("a^2"), plane.word("b")])
    swapping = Tower(
        InverseSystem((), (), StationaryTail(plane, GroupHom.identity(AB))),
        Thread((), (ThreadComponent(seed, swap),)),
    )
    report = check_coherence(swapping, horizon=3)
    assert report.verdict == "Incoherent"
    assert report.witnesses[0]["stage"] == 0


def test_base_model_compatibility(dyadic, circle_model):
    """Test the compatibility report."""
    assert check_base_model(dyadic, circle_model).verdict == "Compatible"
    bad = BaseModel(Z, (), ID)
    doubling = circle_tower(1, 2, bonding=2)
    assert check_base_model(doubling, bad).verdict == "Incompatible"


def test_require_compatible(dyadic, circle_model):
    """Test that a base model disagreeing with the bonding is refused."""
    assert require_compatible(dyadic, circle_model) == []
    with pytest.raises(IncompatibleModel) as info:
        require_compatible(circle_tower(1, 2, bonding=2), BaseModel(Z, (), ID))
    assert "tail bonding" in info.value.issue


def test_dyadic_is_strict_lifting(dyadic):
    """Test the dyadic solenoid."""
    report = stability_analysis(dyadic)
    assert report.verdict == "StrictLifting"
    assert report.certainty.rule == "stationary-propagation"
    assert len(report.stages) == 17
    ml = report.details["mittag_leffler"]
    assert ml["groups"] is True
    assert ml["cosets"] is True
    assert report.details["coset_mode"] == "lattice"


def test_horizon_limits_the_stage_rows(dyadic):
    """Test that the horizon bounds the report, not the verdict."""
    report = stability_analysis(dyadic, horizon=4)
    assert len(report.stages) == 5
    assert report.stages[3]["thread"] == "8Z"
    assert report.verdict == "StrictLifting"


@pytest.mark.parametrize("n", [1, 2, 3, 7])
def test_covering_circle(n):
    """Test the n-fold covering repeated with identity bondings."""
    t = circle_tower(n, 1)
    report = stability_analysis(t)
    assert report.verdict == "Covering(0)"
    assert report.certainty.rule == "stationary-constant"

    fiber = fiber_model(t)
    assert fiber.verdict == f"Finite({n})"
    assert fiber.certified
    assert fiber.details["counts"][:3] == [n, n, n]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_solenoid_fiber_is_uncountable(p):
    """Test p-solenoid fibres."""
    t = circle_tower(1, p)
    fiber = fiber_model(t, horizon=5)
    assert fiber.verdict == "Uncountable"
    assert fiber.details["counts"] == [p ** i for i in range(6)]
    assert all(row["surjective"] for row in fiber.details["stage_maps"])
    assert not any(row["injective"] for row in fiber.details["stage_maps"])


def test_prefix_then_constant_tail():
    """Test a covering that becomes stable after one stage."""
    system = InverseSystem((Z,), (), StationaryTail(Z, ID, ID))
    t = Tower(system, Thread((Z.full(),), (ThreadComponent(Lattice.scaled(1, 2), ID),)))
    report = stability_analysis(t)
    assert report.verdict == "Covering(1)"
    assert report.details["non_injective_steps"] == [0]
    assert fiber_model(t).verdict == "Finite(2)"


def test_finite_prefix_is_horizon_limited():
    """Test that a tower without a tail is never certified."""
    report = stability_analysis(prefix_tower(1, 2, 4))
    assert report.verdict == "Unknown"
    assert not report.certified
    assert str(report.certainty) == "HorizonLimited(2)"
    assert report.details["non_injective_steps"] == [0, 1]

    stable = stability_analysis(prefix_tower(2, 2, 2))
    assert stable.details["injective_from"] == 0


def test_mittag_leffler_fails_for_doubling_bondings():
    """Test group images under a non-surjective tail bonding."""
    t = circle_tower(1, 1, bonding=2)
    report = stability_analysis(t)
    ml = report.details["mittag_leffler"]
    assert ml["groups"] is False
    assert ml["groups_certainty"] == "Certified (stationary-abelian)"
    assert ml["cosets"] is True
    assert report.verdict == "Covering(0)"


@pytest.mark.parametrize("seed, step", [(1, 2), (3, 1), (1, 3)])
def test_deck_orders_match_fibre_counts(seed, step):
    """Test that deck group orders equal the stage fibre sizes."""
    t = circle_tower(seed, step)
    counts = fiber_model(t, horizon=4).details["counts"]
    assert [row["order"] for row in deck_tower(t, horizon=4).stages] == counts


def test_covering_fibre_is_the_stable_count():
    t = circle_tower(6, 1)
    assert stability_analysis(t).verdict == "Covering(0)"
    fiber = fiber_model(t)
    assert fiber.verdict == f"Finite({fiber.details['counts'][0]})"
