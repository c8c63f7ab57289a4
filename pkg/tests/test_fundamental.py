"""Tests for pi1 membership, the shape kernel and path components."""

import random

import pytest

from conftest import A, ID, Z, circle_tower, prefix_tower, scale
from liftlim.analyses import pi0_report, pi1_membership, shape_kernel_membership, trivial_thread
from liftlim.gallery import make_gallery
from liftlim.stallings import in_kernel
from liftlim.tower import BaseModel
from liftlim.words import Alphabet, Word, format_word, parse_word


@pytest.mark.parametrize("k", [0, 1, 2, 5, 10])
def test_dyadic_rejects_powers_of_two(dyadic, circle_model, k):
    """Test that a^(2^k) escapes the thread at stage k + 1."""
    w = Word.generator(A, 0, 2 ** k)
    report = pi1_membership(dyadic, circle_model, w)
    assert report.verdict == f"RejectedAtStage({k + 1})"
    assert report.certified
    assert report.witnesses == [{"stage": k + 1, "image": format_word(w)}]
    assert report.details["accepted"] is False


def test_rejection_beyond_the_horizon(dyadic, circle_model):
    """Test that the divisible core sends the search past the horizon."""
    report = pi1_membership(dyadic, circle_model, parse_word("a^8", A), horizon=2)
    assert report.verdict == "RejectedAtStage(4)"


def test_identity_is_always_accepted(dyadic, circle_model):
    report = pi1_membership(dyadic, circle_model, Word.identity(A))
    assert report.verdict == "InDescriptor"
    assert report.certainty.rule == "identity"


def test_constant_tail_accepts(circle_model):
    """Test acceptance on a repeated covering."""
    t = circle_tower(2, 1)
    report = pi1_membership(t, circle_model, parse_word("a^2", A))
    assert report.verdict == "InDescriptor"
    assert report.certainty.rule == "stationary-constant"
    assert pi1_membership(t, circle_model, parse_word("a", A)).verdict == "RejectedAtStage(0)"


def test_word_over_another_alphabet(dyadic, circle_model):
    with pytest.raises(ValueError):
        pi1_membership(dyadic, circle_model, Word.generator(Alphabet.of("x"), 0))


@pytest.mark.parametrize(
    "text, stage",
    [("a1*a2*a1^-1*a2^-1", 2), ("a1", 1), ("a4", 4), ("a3^5*a1", 1)],
)
def test_hawaiian_rejections(text, stage):
    """Test words in the base of the finite Hawaiian tower."""
    entry = make_gallery("hawaiian")
    w = parse_word(text, entry.model.group.alphabet)
    report = pi1_membership(entry.tower, entry.model, w)
    assert report.verdict == f"RejectedAtStage({stage})"


def test_trivial_thread(dyadic):
    t = trivial_thread(dyadic)
    assert t.describe(0) == "0"
    assert t.describe(5) == "0"


def test_shape_kernel(dyadic, circle_model):
    """Test that only the identity lies in the shape kernel of the solenoid."""
    report = shape_kernel_membership(dyadic, circle_model, parse_word("a^4", A))
    assert report.verdict == "RejectedAtStage(0)"
    assert "kernels" in report.provenance
    assert shape_kernel_membership(dyadic, circle_model, Word.identity(A)).verdict == "InDescriptor"


def test_pi0_of_solenoid(dyadic, circle_model):
    report = pi0_report(dyadic, circle_model)
    assert report.verdict == "Uncountable"
    assert report.certified
    assert report.details["classification"] == "StrictLifting"


@pytest.mark.parametrize("n", [1, 2, 5])
def test_pi0_of_covering_is_trivial(n, circle_model):
    report = pi0_report(circle_tower(n, 1), circle_model)
    assert report.verdict == "Trivial"
    assert report.certified
    assert report.details["stable_stage"] == 0


def test_pi0_counts_orbits():
    """Test a doubling base model on the 2-fold covering."""
    model = BaseModel(Z, (), scale(2))
    report = pi0_report(circle_tower(2, 1), model)
    assert report.verdict == "CosetCount(2)"


def test_pi0_unknown_without_tail():
    t = prefix_tower(1, 2, 4)
    report = pi0_report(t, BaseModel(Z, (ID, ID, ID)))
    assert report.verdict == "Unknown"
    assert not report.certified


def two_adic_valuation(k: int) -> int:
    return (k & -k).bit_length() - 1


@pytest.mark.parametrize("k", range(1, 65))
def test_dyadic_rejection_stage_is_valuation(dyadic, circle_model, k):
    """Test that a^k leaves the thread at stage v2(k) + 1."""
    report = pi1_membership(dyadic, circle_model, Word.generator(A, 0, k), horizon=20)
    assert report.verdict == f"RejectedAtStage({two_adic_valuation(k) + 1})"


def test_hawaiian_agrees_with_kernels():
    """Test the first rejecting stage against kernel membership of each retraction."""
    entry = make_gallery("hawaiian")
    P = entry.model.group.alphabet
    rng = random.Random(9)
    for n in range(100):
        u = Word.from_letters(P, [(rng.randrange(len(P)), rng.choice((1, -1))) for _ in range(rng.randrange(1, 9))])
        w = u * u.inverse() if n % 10 == 0 else u
        report = pi1_membership(entry.tower, entry.model, w)
        stages = range(entry.tower.system.prefix_length)
        escaping = [i for i in stages if not in_kernel(entry.model.map(i), w)]
        if escaping:
            assert report.verdict == f"RejectedAtStage({escaping[0]})", format_word(w)
        else:
            assert not report.verdict.startswith("Rejected"), format_word(w)
