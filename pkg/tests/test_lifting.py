"""Tests for lifting level maps between limits."""

from conftest import ID, SPECS, prefix_tower
from liftlim.analyses import lift_exists
from liftlim.specfile import parse_spec
from liftlim.tower import LevelMap


def test_dyadic_to_triadic_is_obstructed(dyadic_doc):
    """Test that no stage of the dyadic thread lands in 3Z."""
    target = parse_spec(SPECS / "triadic-solenoid.spec", context=dyadic_doc)
    report = lift_exists(dyadic_doc.tower, target.tower, target.level_map)
    assert report.verdict == "Obstructed(1)"
    assert report.certainty.rule == "stationary-cycle"
    assert report.details["witnesses"] == {"0": 0}
    assert report.details["failing_stage"] == 1


def test_degree_three_map_lifts(dyadic_doc):
    target = parse_spec(SPECS / "dyadic-times-three.spec", context=dyadic_doc)
    report = lift_exists(dyadic_doc.tower, target.tower, target.level_map, horizon=6)
    assert report.verdict == "Liftable"
    assert report.certainty.rule == "stationary-propagation"
    assert report.details["witnesses"] == {str(i): i for i in range(7)}


def test_finite_identity_lift():
    t = prefix_tower(1, 2, 4)
    report = lift_exists(t, t, LevelMap((ID, ID, ID)))
    assert report.verdict == "Liftable"
    assert report.certainty.rule == "stage-test"
    assert [row["source_stage"] for row in report.witnesses] == [0, 1, 2]


def test_finite_shifted_lift():
    t = prefix_tower(1, 2, 4)
    target = prefix_tower(1, 2)
    report = lift_exists(t, target, LevelMap((ID, ID), shift=1))
    assert report.verdict == "Liftable"
    assert report.details["witnesses"] == {"0": 1, "1": 2}
