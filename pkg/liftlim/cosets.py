"""Finite presentations and Todd-Coxeter coset enumeration.

Enumeration runs the HLT strategy on sympy's coset tables: scan every relator
from every live coset in order, filling gaps with new definitions, with a
lookahead pass once the coset limit is reached.

Columns are ordered ``g0, g0^-1, g1, g1^-1, ...``; column ``c`` and
``c ^ 1`` are mutually inverse.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from sympy.combinatorics.coset_table import CosetTable as SympyCosetTable
from sympy.combinatorics.fp_groups import FpGroup as SympyFpGroup
from sympy.combinatorics.free_groups import FreeGroup as SympyFreeGroup, FreeGroupElement, free_group

from .errors import AlphabetMismatch, BudgetExceeded, CoherenceViolation, InvalidHomomorphism
from .words import Alphabet, GroupHom, Word, apply_hom, format_word

logger = logging.getLogger(__name__)


def _column(gen: int, sign: int) -> int:
    return 2 * gen + (0 if sign > 0 else 1)


def _columns(word: Word) -> List[int]:
    return [_column(gen, sign) for gen, sign in word.letters()]


def _letter(alphabet: Alphabet, column: int) -> Word:
    return Word.generator(alphabet, column // 2, -1 if column & 1 else 1)


@dataclass(frozen=True)
class Presentation:
    """Group presentation ``<alphabet | relators>``."""

    alphabet: Alphabet
    relators: Tuple[Word, ...] = ()

    def __post_init__(self):
        relators = tuple(r for r in self.relators)
        for r in relators:
            if r.alphabet != self.alphabet:
                raise AlphabetMismatch(f"relator {r} is not over {self.alphabet}")
        # The identity relator carries no information.
        object.__setattr__(self, "relators", tuple(r for r in relators if r))

    @classmethod
    def free(cls, alphabet: Alphabet) -> "Presentation":
        return cls(alphabet, ())

    def __str__(self) -> str:
        return f"<{', '.join(self.alphabet.names)} | {', '.join(format_word(r) for r in self.relators)}>"


@dataclass(frozen=True)
class EnumerationBudget:
    """Limits on cosets defined and on relator scans plus definitions."""

    max_cosets: int = 20000
    max_deductions: int = 2000000

    def __post_init__(self):
        if self.max_cosets <= 0 or self.max_deductions <= 0:
            raise ValueError("enumeration budget must be positive")


@lru_cache(maxsize=64)
def _sympy_group(presentation: Presentation) -> Tuple[SympyFpGroup, Tuple[FreeGroupElement, ...]]:
    free, *generators = free_group(list(presentation.alphabet.names))
    generators = tuple(generators)
    relators = [_to_sympy(r, free, generators) for r in presentation.relators]
    return SympyFpGroup(free, relators), generators


def _to_sympy(w: Word, free: SympyFreeGroup, generators: Sequence[FreeGroupElement]) -> FreeGroupElement:
    element = free.identity
    for gen, exp in w.syllables:
        element = element * generators[gen] ** exp
    return element


def _is_limit_error(exc: ValueError) -> bool:
    return "coset enumeration has defined more than" in str(exc)


class _Enumeration:
    """HLT run over a sympy coset table.

    When the table reaches ``max_cosets`` a lookahead scans every relator from
    every live coset without defining anything; the run continues only if
    that leaves the table complete.
    """

    def __init__(self, group: SympyFpGroup, subgroup: Sequence[FreeGroupElement], budget: EnumerationBudget):
        self.table = SympyCosetTable(group, list(subgroup), max_cosets=budget.max_cosets)
        self.relators = list(group.relators)
        self.subgroup = list(subgroup)
        self.budget = budget
        self.work = 0

    def _spend(self) -> None:
        self.work += 1
        if self.work > self.budget.max_deductions:
            raise BudgetExceeded(len(self.table.omega), "deduction limit reached")

    def _close(self, alpha: int) -> None:
        table = self.table
        if table.p[alpha] != alpha:
            return
        for w in self.relators:
            self._spend()
            table.scan_and_fill(alpha, w)
            if table.p[alpha] < alpha:
                return
        for x, column in table.A_dict.items():
            if table.table[alpha][column] is None:
                self._spend()
                table.define(alpha, x)

    def _guarded(self, step: Callable[..., None], *args) -> None:
        try:
            step(*args)
        except ValueError as exc:
            if not _is_limit_error(exc):
                raise
            logger.debug("coset limit %d reached, running lookahead", self.budget.max_cosets)
            self.table.look_ahead()
            if not self.table.is_complete():
                raise BudgetExceeded(len(self.table.omega)) from exc
            step(*args)

    def run(self) -> Tuple[Tuple[int, ...], ...]:
        table = self.table
        for w in self.subgroup:
            self._spend()
            self._guarded(table.scan_and_fill, 0, w)
        alpha = 0
        while alpha < table.n:
            if table.p[alpha] == alpha:
                self._guarded(self._close, alpha)
            alpha += 1
        table.compress()
        table.standardize()
        return tuple(tuple(row) for row in table.table)


@dataclass(frozen=True)
class CosetTable:
    """Complete coset table of a finite-index subgroup; coset 0 is the subgroup."""

    presentation: Presentation
    subgroup: Tuple[Word, ...]
    rows: Tuple[Tuple[int, ...], ...]
    _transversal: List[Word] = field(default_factory=list, compare=False, repr=False, hash=False)

    @property
    def alphabet(self) -> Alphabet:
        return self.presentation.alphabet

    @property
    def index(self) -> int:
        return len(self.rows)

    def act(self, coset: int, w: Word) -> int:
        """Coset reached by scanning ``w`` from ``coset``."""
        if w.alphabet != self.alphabet:
            raise AlphabetMismatch(f"word over {w.alphabet} scanned in table over {self.alphabet}")
        for x in _columns(w):
            coset = self.rows[coset][x]
        return coset

    def contains(self, w: Word) -> bool:
        return self.act(0, w) == 0

    def permutation(self, generator: int) -> Tuple[int, ...]:
        return tuple(row[2 * generator] for row in self.rows)

    def transversal(self) -> List[Word]:
        """Schreier transversal: ``transversal()[c]`` reaches coset ``c``."""
        if not self._transversal:
            reps: List[Optional[Word]] = [None] * self.index
            reps[0] = Word.identity(self.alphabet)
            queue = [0]
            for coset in queue:
                for x in range(2 * len(self.alphabet)):
                    target = self.rows[coset][x]
                    if reps[target] is None:
                        reps[target] = reps[coset] * _letter(self.alphabet, x)
                        queue.append(target)
            self._transversal.extend(reps)
        return list(self._transversal)

    def is_regular(self) -> bool:
        """True for the table of the trivial subgroup (the Cayley action)."""
        return all(not s for s in self.subgroup)

    @classmethod
    def from_action(cls, presentation: Presentation, subgroup: Sequence[Word],
                    rows: Sequence[Sequence[int]]) -> "CosetTable":
        """Standardize an externally built complete action table."""
        width = 2 * len(presentation.alphabet)
        order = {0: 0}
        queue = [0]
        for coset in queue:
            for x in range(width):
                target = rows[coset][x]
                if target not in order:
                    order[target] = len(order)
                    queue.append(target)
        new_rows = [None] * len(order)
        for old, new in order.items():
            new_rows[new] = tuple(order[t] for t in rows[old])
        return cls(presentation, tuple(subgroup), tuple(new_rows))

    def __str__(self) -> str:
        return f"coset table of index {self.index} over {self.presentation}"


def todd_coxeter(presentation: Presentation, subgroup: Sequence[Word] = (),
                 budget: Optional[EnumerationBudget] = None) -> CosetTable:
    """Enumerate the cosets of ``<subgroup>`` in the presented group.

    Args:
        presentation: Group presentation
        subgroup: Generators of the subgroup (empty for the trivial subgroup)
        budget: Enumeration limits, defaults to ``EnumerationBudget()``

    Returns:
        Complete, standardized coset table

    Raises:
        AlphabetMismatch: If a subgroup generator is over another alphabet
        BudgetExceeded: If the limits were hit (infinite index, or the budget
            is too small)
    """
    budget = budget or EnumerationBudget()
    subgroup = tuple(subgroup)
    for w in subgroup:
        if w.alphabet != presentation.alphabet:
            raise AlphabetMismatch(f"subgroup generator {w} is not over {presentation.alphabet}")
    if not len(presentation.alphabet):
        return CosetTable(presentation, subgroup, ((),))
    group, generators = _sympy_group(presentation)
    enumeration = _Enumeration(
        group, [_to_sympy(w, group.free_group, generators) for w in subgroup if w], budget
    )
    rows = enumeration.run()
    logger.debug("enumeration of %s finished: index %d after %d steps", presentation, len(rows), enumeration.work)
    return CosetTable(presentation, subgroup, rows)


# ============================================================================
# Maps between coset spaces
# ============================================================================

@dataclass(frozen=True)
class InducedMap:
    """Map of coset indices induced by a homomorphism.

    ``relators_verified`` is True when the target table is the regular action,
    where acting trivially on cosets means being the identity.
    """

    mapping: Tuple[int, ...]
    relators_verified: bool

    def __getitem__(self, coset: int) -> int:
        return self.mapping[coset]

    def image(self) -> Tuple[int, ...]:
        return tuple(sorted(set(self.mapping)))

    def is_injective(self) -> bool:
        return len(set(self.mapping)) == len(self.mapping)


def induced_coset_map(h: GroupHom, src: CosetTable, dst: CosetTable) -> InducedMap:
    """Map ``src`` cosets to ``dst`` cosets along ``h``.

    The transversal of ``src`` is mapped and every Schreier edge is checked,
    so a map that is not well defined fails with a witness pair of words
    lying in one source coset but landing in different target cosets.

    Raises:
        AlphabetMismatch: If ``h`` does not go between the two alphabets
        InvalidHomomorphism: If a source relator acts nontrivially on ``dst``
        CoherenceViolation: If the map is not well defined
    """
    if h.source != src.alphabet or h.target != dst.alphabet:
        raise AlphabetMismatch(f"hom {h.source} -> {h.target} between tables over {src.alphabet} and {dst.alphabet}")
    for relator in src.presentation.relators:
        image = apply_hom(h, relator)
        if any(dst.act(c, image) != c for c in range(dst.index)):
            raise InvalidHomomorphism(format_word(relator))
    reps = src.transversal()
    mapping = [dst.act(0, apply_hom(h, rep)) for rep in reps]
    for coset, rep in enumerate(reps):
        for x in range(2 * len(src.alphabet)):
            letter = _letter(src.alphabet, x)
            target = src.rows[coset][x]
            if dst.act(mapping[coset], apply_hom(h, letter)) != mapping[target]:
                raise CoherenceViolation(0, (rep * letter, reps[target]), "words in one coset map to different cosets")
    return InducedMap(tuple(mapping), dst.is_regular())


def normality_witness(table: CosetTable) -> Optional[Word]:
    """First conjugate ``g * s * g^-1`` that leaves the subgroup, or None."""
    for gen in range(len(table.alphabet)):
        g = Word.generator(table.alphabet, gen)
        for s in table.subgroup:
            conjugate = s.conjugate(g)
            if not table.contains(conjugate):
                return conjugate
    return None


def normality_check(table: CosetTable) -> bool:
    return normality_witness(table) is None


def group_order(presentation: Presentation, budget: Optional[EnumerationBudget] = None) -> int:
    """Order of a finite presented group (index of the trivial subgroup)."""
    return todd_coxeter(presentation, (), budget).index


def quotient_summary(table: CosetTable) -> Dict[str, object]:
    """Order of ``G/H`` for a normal H and whether that quotient is abelian."""
    perms = [table.permutation(g) for g in range(len(table.alphabet))]
    abelian = all(
        all(p[q[c]] == q[p[c]] for c in range(table.index))
        for i, p in enumerate(perms) for q in perms[i + 1:]
    )
    return {"order": table.index, "abelian": abelian}
