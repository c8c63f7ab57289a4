"""Tests for meets, comparisons and threads induced by base subgroups."""

import pytest

from conftest import A, ID, Z, scale
from liftlim.analyses import (
    compare_threads,
    pi1_membership,
    special_case_note,
    stability_analysis,
    thread_from_subgroup,
    thread_meet,
    thread_report,
)
from liftlim.errors import CoherenceViolation
from liftlim.gallery import make_gallery
from liftlim.lattice import Lattice
from liftlim.tower import BaseModel, InverseSystem, Thread, Tower
from liftlim.words import Word, parse_words


def test_meet_of_dyadic_and_triadic(dyadic_doc):
    """Test stagewise intersection of two stationary threads."""
    t = dyadic_doc.tower
    meet = thread_meet(t, t.thread, dyadic_doc.threads["triadic"])
    assert [meet.subgroup(i) for i in range(3)] == [Lattice.scaled(1, n) for n in (1, 6, 36)]
    assert len(meet.thread.tail) == 2
    report = stability_analysis(meet)
    assert report.verdict == "StrictLifting"
    assert report.certainty.rule == "stationary-index-growth"


def test_compare_finds_the_first_stage(dyadic_doc):
    t = dyadic_doc.tower
    report = compare_threads(t, t.thread, dyadic_doc.threads["triadic"])
    assert report.verdict == "NotIncluded(1)"
    assert report.witnesses == [{"stage": 1, "element": "a^2"}]
    assert report.certified


def test_compare_meet_with_its_factor(dyadic_doc):
    """Test inclusion certified through a shared tail component."""
    t = dyadic_doc.tower
    meet = thread_meet(t, t.thread, dyadic_doc.threads["triadic"])
    report = compare_threads(t, meet.thread, t.thread)
    assert report.verdict == "Included"
    assert report.certainty.rule == "stationary-symbolic"


def test_compare_same_step(dyadic_doc):
    t = dyadic_doc.tower
    report = compare_threads(t, t.thread, t.thread)
    assert report.verdict == "Included"
    assert report.certified


def test_thread_from_normal_subgroup(dyadic, circle_model):
    """Test the constant thread induced by 2Z."""
    generators = parse_words("a^2", A)
    t = thread_from_subgroup(dyadic, circle_model, generators)
    assert all(t.describe(i) == "2Z" for i in range(5))
    note = special_case_note(t, circle_model, generators)
    assert note is not None

    report = thread_report("thread-from", t, note, horizon=3)
    assert report.verdict == "Thread"
    assert report.details["coherence"] == "Coherent"
    assert report.details["note"] == note
    assert len(report.stages) == 4
    assert report.disclaimer


def test_thread_from_non_normal_subgroup():
    """Test that <a1> in the free base carries no special case note."""
    entry = make_gallery("hawaiian")
    generators = parse_words("a1", entry.model.group.alphabet)
    t = thread_from_subgroup(entry.tower, entry.model, generators)
    assert t.describe(0) == "1"
    assert special_case_note(t, entry.model, generators) is None


def test_thread_from_incompatible_model():
    """Test images that do not form a thread."""
    tower = Tower(InverseSystem((Z, Z), (ID,)), Thread((Z.full(), Z.full())))
    model = BaseModel(Z, (scale(2), ID))
    with pytest.raises(CoherenceViolation) as info:
        thread_from_subgroup(tower, model, parse_words("a", A))
    assert info.value.stage == 0


def test_meet_rejects_where_either_factor_does(dyadic_doc, circle_model):
    """Test that the meet descriptor rejects at the earlier of the two stages."""
    t = dyadic_doc.tower
    triadic = t.with_thread(dyadic_doc.threads["triadic"])
    meet = thread_meet(t, t.thread, dyadic_doc.threads["triadic"])

    def stage(tower, k):
        verdict = pi1_membership(tower, circle_model, Word.generator(A, 0, k), horizon=8).verdict
        return int(verdict[len("RejectedAtStage("):-1])

    for k in range(1, 40):
        assert stage(meet, k) == min(stage(t, k), stage(triadic, k))
