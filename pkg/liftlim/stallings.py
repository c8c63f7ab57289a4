"""Stallings graphs of finitely generated subgroups of free groups."""

import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .cosets import CosetTable, Presentation
from .errors import AlphabetMismatch, UnsupportedBackend
from .words import Alphabet, GroupHom, Word, abelianize, apply_hom

logger = logging.getLogger(__name__)

Edge = Tuple[int, int, int]


@dataclass(frozen=True)
class SubgroupGraph:
    """Folded core graph with base vertex 0.

    Edges are ``(source, generator, target)`` triples; reading a generator
    backwards follows an edge from target to source. Graphs are relabelled
    breadth-first from the base, so equal subgroups give equal graphs.
    """

    alphabet: Alphabet
    vertex_count: int
    edges: Tuple[Edge, ...]

    @cached_property
    def outgoing(self) -> List[Dict[int, int]]:
        out: List[Dict[int, int]] = [{} for _ in range(self.vertex_count)]
        for u, g, v in self.edges:
            out[u][g] = v
        return out

    @cached_property
    def incoming(self) -> List[Dict[int, int]]:
        inn: List[Dict[int, int]] = [{} for _ in range(self.vertex_count)]
        for u, g, v in self.edges:
            inn[v][g] = u
        return inn

    @property
    def rank(self) -> int:
        """Rank of the subgroup as a free group."""
        return len(self.edges) - self.vertex_count + 1

    def is_trivial(self) -> bool:
        return not self.edges

    def follow(self, w: Word, start: int = 0) -> Optional[int]:
        """Vertex reached by reading ``w`` from ``start``, or None."""
        v: Optional[int] = start
        for gen, sign in w.letters():
            v = (self.outgoing if sign > 0 else self.incoming)[v].get(gen)
            if v is None:
                return None
        return v

    def __str__(self) -> str:
        names = self.alphabet.names
        edges = ", ".join(f"{u}-{names[g]}->{v}" for u, g, v in self.edges)
        return f"graph({self.vertex_count} vertices: {edges or 'no edges'})"


def _fold(count: int, edges: Sequence[Edge]) -> Tuple[int, List[Edge]]:
    parent = list(range(count))
    out: List[Dict[int, int]] = [{} for _ in range(count)]
    inn: List[Dict[int, int]] = [{} for _ in range(count)]
    pending: deque = deque()

    def find(v: int) -> int:
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    def attach(u: int, g: int, v: int) -> None:
        u, v = find(u), find(v)
        w = out[u].get(g)
        if w is not None:
            if w != v:
                pending.append((w, v))
            return
        x = inn[v].get(g)
        if x is not None:
            if x != u:
                pending.append((x, u))
            return
        out[u][g] = v
        inn[v][g] = u

    def settle() -> None:
        while pending:
            a, b = pending.popleft()
            a, b = find(a), find(b)
            if a == b:
                continue
            keep, drop = min(a, b), max(a, b)
            moved = [(drop, g, v) for g, v in out[drop].items()]
            moved += [(u, g, drop) for g, u in inn[drop].items()]
            for u, g, v in moved:
                if out[u].get(g) == v:
                    del out[u][g]
                if inn[v].get(g) == u:
                    del inn[v][g]
            parent[drop] = keep
            for u, g, v in moved:
                attach(u, g, v)

    for u, g, v in edges:
        attach(u, g, v)
        settle()
    folded = [(u, g, v) for u in range(count) if find(u) == u for g, v in out[u].items()]
    return count, folded


def _core(edges: List[Edge], base: int = 0) -> List[Edge]:
    """Strip hanging trees away from the base."""
    degree: Dict[int, int] = {}
    touching: Dict[int, List[Edge]] = {}
    for edge in edges:
        u, _, v = edge
        degree[u] = degree.get(u, 0) + 1
        degree[v] = degree.get(v, 0) + 1
        touching.setdefault(u, []).append(edge)
        if v != u:
            touching.setdefault(v, []).append(edge)
    alive = set(edges)
    queue = deque(v for v, d in degree.items() if d <= 1 and v != base)
    while queue:
        v = queue.popleft()
        for edge in touching.get(v, []):
            if edge not in alive:
                continue
            alive.remove(edge)
            u, _, w = edge
            for end in (u, w):
                degree[end] -= 1
                if end != base and end != v and degree[end] == 1:
                    queue.append(end)
    return [e for e in edges if e in alive]


def _canonical(alphabet: Alphabet, edges: List[Edge], base: int = 0) -> SubgroupGraph:
    out: Dict[int, Dict[int, int]] = {}
    inn: Dict[int, Dict[int, int]] = {}
    for u, g, v in edges:
        out.setdefault(u, {})[g] = v
        inn.setdefault(v, {})[g] = u
    order = {base: 0}
    queue = [base]
    for v in queue:
        for g in range(len(alphabet)):
            for neighbour in (out.get(v, {}).get(g), inn.get(v, {}).get(g)):
                if neighbour is not None and neighbour not in order:
                    order[neighbour] = len(order)
                    queue.append(neighbour)
    relabelled = sorted((order[u], g, order[v]) for u, g, v in edges if u in order)
    return SubgroupGraph(alphabet, len(order), tuple(relabelled))


def fold_graph(generators: Sequence[Word], alphabet: Alphabet) -> SubgroupGraph:
    """Folded core graph of the subgroup generated by ``generators``.

    Example:
        >>> g = fold_graph([parse_word("a^2", ab), parse_word("b", ab)], ab)
        >>> g.vertex_count, g.rank
        (2, 2)
    """
    count = 1
    edges: List[Edge] = []
    for w in generators:
        if w.alphabet != alphabet:
            raise AlphabetMismatch(f"generator {w} is not over {alphabet}")
        letters = list(w.letters())
        if not letters:
            continue
        path = [0] + list(range(count, count + len(letters) - 1)) + [0]
        count += len(letters) - 1
        for (gen, sign), u, v in zip(letters, path, path[1:]):
            edges.append((u, gen, v) if sign > 0 else (v, gen, u))
    count, folded = _fold(count, edges)
    logger.debug("folded %d petal edges into %d edges", len(edges), len(folded))
    return _canonical(alphabet, _core(folded))


def graph_member(graph: SubgroupGraph, w: Word) -> bool:
    """True iff ``w`` reads a closed path at the base."""
    if w.alphabet != graph.alphabet:
        raise AlphabetMismatch(f"word over {w.alphabet} tested in graph over {graph.alphabet}")
    return graph.follow(w) == 0


def graph_intersect(first: SubgroupGraph, second: SubgroupGraph) -> SubgroupGraph:
    """Core of the product graph, which represents the intersection."""
    if first.alphabet != second.alphabet:
        raise AlphabetMismatch(f"graphs over {first.alphabet} and {second.alphabet}")
    index = {(0, 0): 0}
    queue = [(0, 0)]
    edges: List[Edge] = []
    for pair in queue:
        u1, u2 = pair
        for g in range(len(first.alphabet)):
            forward = (first.outgoing[u1].get(g), second.outgoing[u2].get(g))
            backward = (first.incoming[u1].get(g), second.incoming[u2].get(g))
            for target, outgoing in ((forward, True), (backward, False)):
                if None in target:
                    continue
                if target not in index:
                    index[target] = len(index)
                    queue.append(target)
                if outgoing:
                    edges.append((index[pair], g, index[target]))
    return _canonical(first.alphabet, _core(edges))


def graph_index(graph: SubgroupGraph) -> Optional[int]:
    """Index of the subgroup, or None when it is infinite."""
    complete = all(
        len(graph.outgoing[v]) == len(graph.alphabet) and len(graph.incoming[v]) == len(graph.alphabet)
        for v in range(graph.vertex_count)
    )
    return graph.vertex_count if complete else None


def graph_generators(graph: SubgroupGraph) -> List[Word]:
    """Free basis read off a breadth-first spanning tree."""
    alphabet = graph.alphabet
    label: Dict[int, Word] = {0: Word.identity(alphabet)}
    tree = set()
    queue = [0]
    for v in queue:
        for g in range(len(alphabet)):
            w = graph.outgoing[v].get(g)
            if w is not None and w not in label:
                label[w] = label[v] * Word.generator(alphabet, g)
                tree.add((v, g, w))
                queue.append(w)
            u = graph.incoming[v].get(g)
            if u is not None and u not in label:
                label[u] = label[v] * Word.generator(alphabet, g, -1)
                tree.add((u, g, v))
                queue.append(u)
    return [
        label[u] * Word.generator(alphabet, g) * ~label[v]
        for u, g, v in graph.edges if (u, g, v) not in tree
    ]


def graph_includes(big: SubgroupGraph, small: SubgroupGraph) -> bool:
    return all(graph_member(big, w) for w in graph_generators(small))


def full_graph(alphabet: Alphabet) -> SubgroupGraph:
    return SubgroupGraph(alphabet, 1, tuple((0, g, 0) for g in range(len(alphabet))))


def graph_to_table(graph: SubgroupGraph) -> CosetTable:
    """Coset table of a finite-index subgroup (the graph is the action)."""
    if graph_index(graph) is None:
        raise ValueError("only complete graphs describe finite coset spaces")
    rows = []
    for v in range(graph.vertex_count):
        row = []
        for g in range(len(graph.alphabet)):
            row.extend((graph.outgoing[v][g], graph.incoming[v][g]))
        rows.append(row)
    return CosetTable.from_action(Presentation.free(graph.alphabet), graph_generators(graph), rows)


def in_kernel(h: GroupHom, w: Word, target: Union[str, CosetTable] = "free") -> bool:
    """Whether ``h(w)`` is trivial in the target group.

    Args:
        h: Homomorphism out of a free group
        w: Word over ``h.source``
        target: ``"free"`` (trivial means the empty reduced word),
            ``"abelian"`` (zero exponent vector) or the coset table of the
            trivial subgroup of a finite presented group

    Raises:
        UnsupportedBackend: If triviality cannot be decided in the target
    """
    image = apply_hom(h, w)
    if isinstance(target, CosetTable):
        if not target.is_regular():
            raise UnsupportedBackend("kernel membership", "coset table of a nontrivial subgroup")
        return target.contains(image)
    if target == "free":
        return image.is_identity()
    if target == "abelian":
        return not any(abelianize(image))
    raise UnsupportedBackend("kernel membership", str(target))
