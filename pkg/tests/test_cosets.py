"""Tests for coset enumeration and induced coset maps."""

import random
from itertools import product

import pytest

from liftlim.cosets import (
    EnumerationBudget,
    Presentation,
    group_order,
    induced_coset_map,
    normality_check,
    normality_witness,
    quotient_summary,
    todd_coxeter,
)
from liftlim.errors import BudgetExceeded, CoherenceViolation, InvalidHomomorphism
from liftlim.words import Alphabet, GroupHom, Word, format_word, parse_word, parse_words

AB = Alphabet.of("a", "b")
A = Alphabet.of("a")


def presentation(relators: str, alphabet: Alphabet = AB) -> Presentation:
    return Presentation(alphabet, tuple(parse_words(relators, alphabet)))


# ============================================================================
# Permutation oracle
# ============================================================================

def compose(p, q):
    """Apply p first, then q."""
    return tuple(q[p[i]] for i in range(len(p)))


def inverse(p):
    result = [0] * len(p)
    for i, j in enumerate(p):
        result[j] = i
    return tuple(result)


def perm_of(word: Word, images):
    result = tuple(range(len(images[0])))
    for gen, sign in word.letters():
        step = images[gen] if sign > 0 else inverse(images[gen])
        result = compose(result, step)
    return result


def closure(generators):
    identity = tuple(range(len(generators[0])))
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for p in frontier:
            for g in generators:
                q = compose(p, g)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return seen


# name, relators, faithful permutation images of a and b
GROUPS = [
    ("S3", "a^2, b^2, (a*b)^3", [(1, 0, 2), (0, 2, 1)]),
    ("D4", "a^4, b^2, (a*b)^2", [(1, 2, 3, 0), (0, 3, 2, 1)]),
    ("A4", "a^2, b^3, (a*b)^3", [(1, 0, 3, 2), (0, 2, 3, 1)]),
    ("S4", "a^2, b^3, (a*b)^4", [(1, 0, 2, 3), (0, 2, 3, 1)]),
    ("Z2xZ3", "a^2, b^3, a*b*a^-1*b^-1", [(1, 0, 2, 3, 4), (0, 1, 3, 4, 2)]),
]


@pytest.mark.parametrize("name,relators,images", GROUPS)
def test_oracle_images_satisfy_relators(name, relators, images):
    """Sanity check of the permutation models themselves."""
    identity = tuple(range(len(images[0])))
    for r in presentation(relators).relators:
        assert perm_of(r, images) == identity


@pytest.mark.parametrize("name,relators,images", GROUPS)
def test_group_order_matches_permutation_group(name, relators, images):
    """Test that enumeration of the trivial subgroup counts the group."""
    assert group_order(presentation(relators)) == len(closure(images))


@pytest.mark.parametrize("name,relators,images", GROUPS)
def test_regular_table_is_faithful(name, relators, images):
    """Test that transversal words are pairwise distinct group elements."""
    table = todd_coxeter(presentation(relators))
    perms = [perm_of(w, images) for w in table.transversal()]
    assert len(set(perms)) == table.index
    for coset, w in enumerate(table.transversal()):
        assert table.act(0, w) == coset


@pytest.mark.parametrize("name,relators,images", GROUPS)
@pytest.mark.parametrize("generators", ["a", "b", "a*b", "b*a*b^-1, a"])
def test_subgroup_index_matches_permutation_group(name, relators, images, generators):
    """Test indices against |G| / |H| and membership against the model."""
    pres = presentation(relators)
    subgroup = parse_words(generators, AB)
    table = todd_coxeter(pres, subgroup)
    group = closure(images)
    sub = closure([perm_of(w, images) for w in subgroup])
    assert table.index == len(group) // len(sub)

    for letters in product(range(4), repeat=3):
        w = Word.from_letters(AB, [(x // 2, 1 if x % 2 == 0 else -1) for x in letters])
        assert table.contains(w) == (perm_of(w, images) in sub)


@pytest.mark.parametrize("name,relators,images", GROUPS)
def test_table_invariants(name, relators, images):
    """Test inverse columns, relator loops and the subgroup at coset 0."""
    pres = presentation(relators)
    subgroup = [parse_word("a", AB)]
    table = todd_coxeter(pres, subgroup)
    for c in range(table.index):
        for g in range(2):
            assert table.rows[table.rows[c][2 * g]][2 * g + 1] == c
            assert table.rows[table.rows[c][2 * g + 1]][2 * g] == c
        for r in pres.relators:
            assert table.act(c, r) == c
    for s in subgroup:
        assert table.act(0, s) == 0


def test_cyclic_group():
    """Test Z5 and its permutation."""
    table = todd_coxeter(presentation("a^5", A))
    assert table.index == 5
    assert sorted(table.permutation(0)) == list(range(5))
    assert table.is_regular()


def test_quaternion_order():
    """Test the quaternion group."""
    assert group_order(presentation("a^4, a^2*b^-2, b*a*b^-1*a")) == 8


def test_free_group_exceeds_budget():
    """Test that an infinite enumeration stops at the budget."""
    with pytest.raises(BudgetExceeded) as info:
        todd_coxeter(Presentation.free(AB), (), EnumerationBudget(max_cosets=50))
    assert info.value.partial_cosets >= 50


def test_budget_must_be_positive():
    """Test budget validation."""
    with pytest.raises(ValueError):
        EnumerationBudget(max_cosets=0)


def test_normality():
    """Test the witness for a non-normal subgroup of S3."""
    pres = presentation("a^2, b^2, (a*b)^3")
    table = todd_coxeter(pres, [parse_word("a", AB)])
    assert table.index == 3
    witness = normality_witness(table)
    assert format_word(witness) == "b*a*b^-1"
    assert not normality_check(table)

    rotations = todd_coxeter(pres, [parse_word("a*b", AB)])
    assert rotations.index == 2
    assert normality_check(rotations)
    assert quotient_summary(rotations) == {"order": 2, "abelian": True}


def test_quotient_summary_of_regular_table():
    """Test that the regular action reports the group itself."""
    table = todd_coxeter(presentation("a^4, b^2, (a*b)^2"))
    assert quotient_summary(table) == {"order": 8, "abelian": False}


def test_induced_map_reduction():
    """Test Z6 onto Z3."""
    z6 = todd_coxeter(presentation("a^6", A))
    z3 = todd_coxeter(presentation("a^3", A))
    induced = induced_coset_map(GroupHom.identity(A), z6, z3)
    assert induced.relators_verified
    assert induced.image() == (0, 1, 2)
    assert not induced.is_injective()
    for c, w in enumerate(z6.transversal()):
        assert induced[c] == z3.act(0, w)


def test_induced_map_rejects_relators():
    """Test that Z3 does not map to Z6 by a -> a."""
    z6 = todd_coxeter(presentation("a^6", A))
    z3 = todd_coxeter(presentation("a^3", A))
    with pytest.raises(InvalidHomomorphism):
        induced_coset_map(GroupHom.identity(A), z3, z6)


def test_induced_map_must_be_well_defined():
    """Test that cosets of a larger subgroup cannot map to smaller cosets."""
    pres = presentation("a^6", A)
    evens = todd_coxeter(pres, [parse_word("a^2", A)])
    regular = todd_coxeter(pres)
    with pytest.raises(CoherenceViolation):
        induced_coset_map(GroupHom.identity(A), evens, regular)


def test_deduction_budget():
    """Test that the step limit stops a long enumeration."""
    with pytest.raises(BudgetExceeded) as info:
        todd_coxeter(presentation("a^2, b^3, (a*b)^5"), (), EnumerationBudget(max_deductions=10))
    assert info.value.reason == "deduction limit reached"
    assert "deduction limit reached" in str(info.value)


def random_word(rng, alphabet: Alphabet, length: int) -> Word:
    return Word.from_letters(alphabet, [(rng.randrange(len(alphabet)), rng.choice((1, -1))) for _ in range(length)])


@pytest.mark.parametrize("name,relators,images", GROUPS)
def test_scan_of_product_continues_scan(name, relators, images):
    """Test that scanning u*v is scanning v from the coset of u."""
    rng = random.Random(7)
    table = todd_coxeter(presentation(relators), [parse_word("b", AB)])
    for _ in range(50):
        u = random_word(rng, AB, rng.randrange(8))
        v = random_word(rng, AB, rng.randrange(8))
        assert table.act(0, u * v) == table.act(table.act(0, u), v)


def test_induced_map_commutes_with_scanning():
    """Test map(scan(src, w)) = scan(dst, h(w)) along S4 onto S3."""
    rng = random.Random(11)
    s4 = todd_coxeter(presentation("a^2, b^3, (a*b)^4"))
    s3 = todd_coxeter(presentation("a^2, b^3, (a*b)^2"))
    induced = induced_coset_map(GroupHom.identity(AB), s4, s3)
    assert sorted(set(induced.mapping)) == list(range(6))
    for _ in range(100):
        w = random_word(rng, AB, rng.randrange(12))
        assert induced[s4.act(0, w)] == s3.act(0, w)
