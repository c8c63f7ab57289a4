"""Tests for Stallings graphs of subgroups of free groups."""

import random
from itertools import product

import pytest
from sympy.combinatorics import Permutation, PermutationGroup

from liftlim.cosets import Presentation, todd_coxeter
from liftlim.errors import AlphabetMismatch, UnsupportedBackend
from liftlim.stallings import (
    fold_graph,
    full_graph,
    graph_generators,
    graph_includes,
    graph_index,
    graph_intersect,
    graph_member,
    graph_to_table,
    in_kernel,
)
from liftlim.words import Alphabet, GroupHom, Word, parse_word, parse_words

AB = Alphabet.of("a", "b")


def w(text: str) -> Word:
    return parse_word(text, AB)


def graph(generators: str):
    return fold_graph(parse_words(generators, AB), AB)


SUBGROUPS = [
    "a^2, b",
    "a*b*a^-1, a*b^2*a^-1",
    "a^2, b, a*b*a^-1",
    "a*b, b*a",
    "a^3*b^-1, b*a^-2",
]


@pytest.mark.parametrize("generators", SUBGROUPS)
def test_products_of_generators_are_members(generators):
    """Test closure of membership under short products."""
    gens = parse_words(generators, AB)
    letters = gens + [~g for g in gens]
    g = graph(generators)
    for k in range(1, 4):
        for factors in product(letters, repeat=k):
            word = Word.identity(AB)
            for f in factors:
                word = word * f
            assert graph_member(g, word)


@pytest.mark.parametrize("generators", SUBGROUPS)
def test_basis_refolds_to_the_same_graph(generators):
    """Test that the read-off basis generates the same subgroup."""
    g = graph(generators)
    basis = graph_generators(g)
    assert len(basis) == g.rank
    assert fold_graph(basis, AB) == g
    assert graph_includes(g, graph(generators))


def test_folding_shapes():
    """Test vertex counts and ranks of small examples."""
    g = graph("a^2, b")
    assert (g.vertex_count, g.rank) == (2, 2)

    conjugated = graph("a*b*a^-1, a*b^2*a^-1")
    assert (conjugated.vertex_count, conjugated.rank) == (2, 1)

    assert graph("a, a^2").rank == 1
    assert graph("").is_trivial()
    assert graph("a*a^-1").is_trivial()


def test_membership():
    """Test membership in <a^2, b>."""
    g = graph("a^2, b")
    assert graph_member(g, w("b*a^2*b^-1"))
    assert not graph_member(g, w("b*a*b^-1"))
    assert not graph_member(g, w("a"))
    assert graph_member(g, w("1"))
    with pytest.raises(AlphabetMismatch):
        graph_member(g, parse_word("x", Alphabet.of("x")))


def test_index():
    """Test finite and infinite indices."""
    assert graph_index(graph("a^2, b, a*b*a^-1")) == 2
    assert graph_index(graph("a^2, b")) is None
    assert graph_index(full_graph(AB)) == 1
    assert graph_index(graph("a^3, b, a*b*a^-1, a^2*b*a^-2")) == 3


def test_intersections():
    """Test intersections through the product graph."""
    Z = Alphabet.of("a")
    two = fold_graph([parse_word("a^2", Z)], Z)
    three = fold_graph([parse_word("a^3", Z)], Z)
    assert graph_intersect(two, three) == fold_graph([parse_word("a^6", Z)], Z)

    assert graph_intersect(graph("a"), graph("b")).is_trivial()
    assert graph_intersect(full_graph(AB), graph("a*b")) == graph("a*b")


def test_equal_subgroups_give_equal_graphs():
    """Test canonical labelling."""
    assert graph("a, b") == full_graph(AB)
    assert graph("a*b, b") == graph("a, b")
    assert graph("a^2, a^3") == graph("a")


def test_inclusion():
    """Test subgroup inclusion."""
    assert graph_includes(full_graph(AB), graph("a^2*b"))
    assert graph_includes(graph("a"), graph("a^4"))
    assert not graph_includes(graph("a^4"), graph("a^2"))


def test_graph_to_table():
    """Test conversion of a finite-index graph to a coset table."""
    table = graph_to_table(graph("a^2, b, a*b*a^-1"))
    assert table.index == 2
    assert table.contains(w("a^2"))
    assert not table.contains(w("a"))
    with pytest.raises(ValueError):
        graph_to_table(graph("a^2, b"))


def test_in_kernel():
    """Test kernel membership for the supported targets."""
    kill_b = GroupHom.from_mapping(AB, AB, {"a": w("a")})
    assert in_kernel(kill_b, w("b"))
    assert in_kernel(kill_b, w("a*b*a^-1"))
    assert not in_kernel(kill_b, w("a"))

    identity = GroupHom.identity(AB)
    assert in_kernel(identity, w("a*b*a^-1*b^-1"), target="abelian")
    assert not in_kernel(identity, w("a*b*a^-1*b^-1"))

    Z = Alphabet.of("a")
    z3 = todd_coxeter(Presentation(Z, (parse_word("a^3", Z),)))
    to_z3 = GroupHom.identity(Z)
    assert in_kernel(to_z3, parse_word("a^3", Z), target=z3)
    assert not in_kernel(to_z3, parse_word("a^4", Z), target=z3)

    cosets = todd_coxeter(Presentation(Z, (parse_word("a^3", Z),)), [parse_word("a", Z)])
    with pytest.raises(UnsupportedBackend):
        in_kernel(to_z3, parse_word("a", Z), target=cosets)
    with pytest.raises(UnsupportedBackend):
        in_kernel(identity, w("a"), target="ring")


# permutation images of a and b in S4 and S5
QUOTIENTS = [
    (Permutation([1, 0, 2, 3]), Permutation([1, 2, 3, 0])),
    (Permutation([1, 2, 0, 3, 4]), Permutation([1, 2, 3, 4, 0])),
]


def random_word(rng: random.Random, length: int) -> Word:
    return Word.from_letters(AB, [(rng.randrange(2), rng.choice((1, -1))) for _ in range(length)])


def permutation_of(word: Word, images) -> Permutation:
    result = Permutation(list(range(images[0].size)))
    for gen, sign in word.letters():
        result = result * (images[gen] if sign > 0 else ~images[gen])
    return result


def test_membership_random_corpus():
    """Test membership against short products and against finite quotients."""
    rng = random.Random(6)
    for _ in range(100):
        gens = []
        while not gens:
            gens = [u for u in (random_word(rng, rng.randint(1, 4)) for _ in range(rng.randint(1, 3))) if u]
        g = fold_graph(gens, AB)
        letters = gens + [~u for u in gens]
        for k in range(1, 4):
            for factors in product(letters, repeat=k):
                word = Word.identity(AB)
                for f in factors:
                    word = word * f
                assert graph_member(g, word), (gens, word)

        quotients = [
            (images, PermutationGroup([permutation_of(u, images) for u in gens])) for images in QUOTIENTS
        ]
        for _ in range(20):
            candidate = random_word(rng, rng.randint(0, 8))
            member = graph_member(g, candidate)
            for images, image_group in quotients:
                if not image_group.contains(permutation_of(candidate, images)):
                    assert not member, (gens, candidate)
