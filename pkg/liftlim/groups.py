"""Stage groups and their subgroup handles.

Every stage of a tower is one of three backends, each with an exact
subgroup representation:

* ``AbelianGroup``: Z^n, subgroups are :class:`~liftlim.lattice.Lattice`
* ``FreeGroup``: F(alphabet), subgroups are Stallings graphs
* ``FpGroup``: a finite presentation, subgroups of finite index are
  coset tables

Backends talk to each other through words, so a homomorphism may go from
any backend to any other.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Hashable, List, Optional, Sequence, Tuple

from .cosets import (
    CosetTable,
    EnumerationBudget,
    Presentation,
    normality_witness,
    quotient_summary,
    todd_coxeter,
)
from .errors import AlphabetMismatch, BudgetExceeded, UnsupportedBackend
from .lattice import AbelianHom, IntMatrix, Lattice, intersect, quotient_info
from .stallings import (
    SubgroupGraph,
    fold_graph,
    full_graph,
    graph_generators,
    graph_includes,
    graph_index,
    graph_intersect,
    graph_member,
    graph_to_table,
)
from .words import Alphabet, GroupHom, Word, abelianize, apply_hom, format_word, parse_word

logger = logging.getLogger(__name__)

Handle = Any


class StageGroup:
    """Operations every backend provides on its subgroup handles."""

    kind = "abstract"
    alphabet: Alphabet
    name: str

    # Subgroups

    def full(self) -> Handle:
        raise NotImplementedError

    def trivial(self) -> Handle:
        raise NotImplementedError

    def subgroup(self, words: Sequence[Word]) -> Handle:
        raise NotImplementedError

    def generators(self, handle: Handle) -> List[Word]:
        raise NotImplementedError

    def contains(self, handle: Handle, w: Word) -> bool:
        raise NotImplementedError

    def includes(self, big: Handle, small: Handle) -> bool:
        return all(self.contains(big, g) for g in self.generators(small))

    def same(self, a: Handle, b: Handle) -> bool:
        return self.includes(a, b) and self.includes(b, a)

    def intersect(self, a: Handle, b: Handle) -> Handle:
        raise UnsupportedBackend("subgroup intersection", self.kind)

    def index(self, handle: Handle) -> Optional[int]:
        """Index of the subgroup, None when infinite."""
        raise NotImplementedError

    def is_finite_subgroup(self, handle: Handle) -> bool:
        raise NotImplementedError

    def normality_witness(self, handle: Handle) -> Optional[Word]:
        raise NotImplementedError

    def describe(self, handle: Handle) -> str:
        raise NotImplementedError

    def quotient(self, handle: Handle) -> dict:
        """Description of ``G/H`` for a normal subgroup H."""
        raise NotImplementedError

    # Elements

    def is_trivial(self, w: Word) -> bool:
        raise NotImplementedError

    def equal(self, u: Word, v: Word) -> bool:
        return self.is_trivial(~u * v)

    # Finite coset spaces, keys are hashable canonical coset labels

    def coset_key(self, handle: Handle, w: Word) -> Hashable:
        raise UnsupportedBackend("coset labels", self.kind)

    def coset_act(self, handle: Handle, key: Hashable, w: Word) -> Hashable:
        raise UnsupportedBackend("coset action", self.kind)

    def coset_representatives(self, handle: Handle) -> List[Word]:
        raise UnsupportedBackend("coset enumeration", self.kind)

    # Shared helpers

    def word(self, text: str) -> Word:
        return parse_word(text, self.alphabet)

    def _check(self, w: Word) -> None:
        if w.alphabet != self.alphabet:
            raise AlphabetMismatch(f"word {w} over {w.alphabet} in group {self.label}")

    @property
    def label(self) -> str:
        return self.name or f"{self.kind}{self.alphabet}"

    def image(self, h: GroupHom, handle: Handle, target: "StageGroup") -> Handle:
        """Image of a subgroup of this group under ``h`` into ``target``."""
        if h.source != self.alphabet or h.target != target.alphabet:
            raise AlphabetMismatch(f"hom {h.source} -> {h.target} used from {self.label} to {target.label}")
        return target.subgroup([apply_hom(h, g) for g in self.generators(handle)])

    def hom_image(self, h: GroupHom, target: "StageGroup") -> Handle:
        return self.image(h, self.full(), target)

    def is_surjective(self, h: GroupHom, target: "StageGroup") -> Optional[bool]:
        """Whether ``h`` maps onto ``target``; None when undecided."""
        try:
            return target.includes(self.hom_image(h, target), target.full())
        except (BudgetExceeded, UnsupportedBackend):
            return None

    def is_injective(self, h: GroupHom) -> Optional[bool]:
        return None

    def homs_equal(self, f: GroupHom, g: GroupHom, target: "StageGroup") -> Optional[bool]:
        """Whether two homs into ``target`` agree on generators."""
        try:
            return all(target.equal(a, b) for a, b in zip(f.images, g.images))
        except UnsupportedBackend:
            return None


@dataclass(frozen=True, eq=True)
class AbelianGroup(StageGroup):
    """Free abelian group Z^n on the alphabet's generators."""

    alphabet: Alphabet
    name: str = field(default="", compare=False)
    kind = "abelian"

    @property
    def rank(self) -> int:
        return len(self.alphabet)

    def vector(self, w: Word) -> Tuple[int, ...]:
        self._check(w)
        return abelianize(w)

    def matrix(self, h: GroupHom) -> AbelianHom:
        return AbelianHom(IntMatrix.from_rows(h.matrix(), len(h.source)))

    def full(self) -> Lattice:
        return Lattice.full(self.rank)

    def trivial(self) -> Lattice:
        return Lattice.zero(self.rank)

    def subgroup(self, words: Sequence[Word]) -> Lattice:
        return Lattice.span(self.rank, [self.vector(w) for w in words])

    def generators(self, handle: Lattice) -> List[Word]:
        return [Word.from_vector(self.alphabet, b) for b in handle.basis]

    def contains(self, handle: Lattice, w: Word) -> bool:
        return self.vector(w) in handle

    def includes(self, big: Lattice, small: Lattice) -> bool:
        return big.includes(small)

    def same(self, a: Lattice, b: Lattice) -> bool:
        return a == b

    def intersect(self, a: Lattice, b: Lattice) -> Lattice:
        return intersect(a, b)

    def index(self, handle: Lattice) -> Optional[int]:
        return quotient_info(handle).order

    def is_finite_subgroup(self, handle: Lattice) -> bool:
        return handle.rank == 0

    def normality_witness(self, handle: Lattice) -> Optional[Word]:
        return None

    def describe(self, handle: Lattice) -> str:
        if handle.is_full() and self.rank > 1:
            return f"Z^{self.rank}"
        return str(handle)

    def quotient(self, handle: Lattice) -> dict:
        info = quotient_info(handle)
        return {"order": info.order, "factors": list(info.factors), "structure": str(info), "abelian": True}

    def is_trivial(self, w: Word) -> bool:
        return not any(self.vector(w))

    def coset_key(self, handle: Lattice, w: Word) -> Tuple[int, ...]:
        return handle.residue(self.vector(w))

    def coset_act(self, handle: Lattice, key: Tuple[int, ...], w: Word) -> Tuple[int, ...]:
        return handle.residue(tuple(a + b for a, b in zip(key, self.vector(w))))

    def coset_representatives(self, handle: Lattice) -> List[Word]:
        if handle.rank != self.rank:
            raise UnsupportedBackend("enumeration of an infinite coset space", self.kind)
        ranges = [range(col[r]) for col, r in zip(handle.basis, handle.pivots)]
        return [Word.from_vector(self.alphabet, v) for v in itertools.product(*ranges)]

    def is_injective(self, h: GroupHom) -> Optional[bool]:
        return self.matrix(h).is_injective()


@dataclass(frozen=True, eq=True)
class FreeGroup(StageGroup):
    """Free group on the alphabet."""

    alphabet: Alphabet
    name: str = field(default="", compare=False)
    kind = "free"

    def full(self) -> SubgroupGraph:
        return full_graph(self.alphabet)

    def trivial(self) -> SubgroupGraph:
        return fold_graph([], self.alphabet)

    def subgroup(self, words: Sequence[Word]) -> SubgroupGraph:
        return fold_graph(list(words), self.alphabet)

    def generators(self, handle: SubgroupGraph) -> List[Word]:
        return graph_generators(handle)

    def contains(self, handle: SubgroupGraph, w: Word) -> bool:
        return graph_member(handle, w)

    def includes(self, big: SubgroupGraph, small: SubgroupGraph) -> bool:
        return graph_includes(big, small)

    def same(self, a: SubgroupGraph, b: SubgroupGraph) -> bool:
        return a == b

    def intersect(self, a: SubgroupGraph, b: SubgroupGraph) -> SubgroupGraph:
        return graph_intersect(a, b)

    def index(self, handle: SubgroupGraph) -> Optional[int]:
        return graph_index(handle)

    def is_finite_subgroup(self, handle: SubgroupGraph) -> bool:
        return handle.is_trivial()

    def normality_witness(self, handle: SubgroupGraph) -> Optional[Word]:
        if graph_index(handle) is not None:
            return normality_witness(graph_to_table(handle))
        for gen in range(len(self.alphabet)):
            for g in (Word.generator(self.alphabet, gen), Word.generator(self.alphabet, gen, -1)):
                for s in graph_generators(handle):
                    conjugate = s.conjugate(g)
                    if not graph_member(handle, conjugate):
                        return conjugate
        return None

    def describe(self, handle: SubgroupGraph) -> str:
        if handle.is_trivial():
            return "1"
        if handle == self.full():
            return "F(%s)" % ", ".join(self.alphabet.names)
        return "<" + ", ".join(format_word(g) for g in graph_generators(handle)) + ">"

    def quotient(self, handle: SubgroupGraph) -> dict:
        index = graph_index(handle)
        if index is not None:
            return quotient_summary(graph_to_table(handle))
        if handle.is_trivial():
            return {"order": None, "structure": f"free of rank {len(self.alphabet)}", "abelian": len(self.alphabet) <= 1}
        raise UnsupportedBackend("quotient by an infinite-index subgroup", self.kind)

    def is_trivial(self, w: Word) -> bool:
        self._check(w)
        return w.is_identity()

    def equal(self, u: Word, v: Word) -> bool:
        return u == v

    def _table(self, handle: SubgroupGraph) -> CosetTable:
        if graph_index(handle) is None:
            raise UnsupportedBackend("cosets of an infinite-index subgroup", self.kind)
        return graph_to_table(handle)

    def coset_key(self, handle: SubgroupGraph, w: Word) -> int:
        if graph_index(handle) is None:
            raise UnsupportedBackend("cosets of an infinite-index subgroup", self.kind)
        return handle.follow(w)

    def coset_act(self, handle: SubgroupGraph, key: int, w: Word) -> int:
        return handle.follow(w, start=key)

    def coset_representatives(self, handle: SubgroupGraph) -> List[Word]:
        return self._table(handle).transversal()

    def is_injective(self, h: GroupHom) -> Optional[bool]:
        if h.source != self.alphabet:
            return None
        image = fold_graph(list(h.images), h.target)
        return image.rank == len(self.alphabet)


@dataclass(frozen=True, eq=True)
class FpGroup(StageGroup):
    """Finitely presented group; subgroups must have finite index."""

    presentation: Presentation
    name: str = field(default="", compare=False)
    budget: EnumerationBudget = field(default_factory=EnumerationBudget, compare=False)
    kind = "fp"

    @property
    def alphabet(self) -> Alphabet:
        return self.presentation.alphabet

    def full(self) -> CosetTable:
        gens = [Word.generator(self.alphabet, i) for i in range(len(self.alphabet))]
        return todd_coxeter(self.presentation, gens, self.budget)

    def trivial(self) -> CosetTable:
        return todd_coxeter(self.presentation, (), self.budget)

    def subgroup(self, words: Sequence[Word]) -> CosetTable:
        for w in words:
            self._check(w)
        return todd_coxeter(self.presentation, list(words), self.budget)

    def generators(self, handle: CosetTable) -> List[Word]:
        return list(handle.subgroup)

    def contains(self, handle: CosetTable, w: Word) -> bool:
        self._check(w)
        return handle.contains(w)

    def same(self, a: CosetTable, b: CosetTable) -> bool:
        return a.index == b.index and self.includes(a, b)

    def index(self, handle: CosetTable) -> int:
        return handle.index

    def is_finite_subgroup(self, handle: CosetTable) -> bool:
        if all(not s for s in handle.subgroup):
            return True
        try:
            self.trivial()
        except BudgetExceeded:
            return False
        return True

    def normality_witness(self, handle: CosetTable) -> Optional[Word]:
        return normality_witness(handle)

    def describe(self, handle: CosetTable) -> str:
        if not handle.subgroup:
            return "1"
        return "<" + ", ".join(format_word(s) for s in handle.subgroup) + f"> (index {handle.index})"

    def quotient(self, handle: CosetTable) -> dict:
        return quotient_summary(handle)

    def is_trivial(self, w: Word) -> bool:
        self._check(w)
        if w.is_identity():
            return True
        try:
            regular = self.trivial()
        except BudgetExceeded:
            raise UnsupportedBackend("word problem in an infinite presented group", self.kind) from None
        return regular.contains(w)

    def equal(self, u: Word, v: Word) -> bool:
        return u == v or self.is_trivial(~u * v)

    def coset_key(self, handle: CosetTable, w: Word) -> int:
        return handle.act(0, w)

    def coset_act(self, handle: CosetTable, key: int, w: Word) -> int:
        return handle.act(key, w)

    def coset_representatives(self, handle: CosetTable) -> List[Word]:
        return handle.transversal()


def make_group(kind: str, alphabet: Alphabet, relators: Sequence[Word] = (), name: str = "",
               budget: Optional[EnumerationBudget] = None) -> StageGroup:
    """Build a stage group from a backend tag."""
    if kind == "abelian":
        if relators:
            raise ValueError("abelian stages are free abelian; express quotients through the thread")
        return AbelianGroup(alphabet, name)
    if kind == "free":
        if relators:
            raise ValueError("free stages take no relators")
        return FreeGroup(alphabet, name)
    if kind == "fp":
        return FpGroup(Presentation(alphabet, tuple(relators)), name, budget or EnumerationBudget())
    raise ValueError(f"Invalid backend: '{kind}'. Valid backends: abelian, free, fp")
