"""Exhaustive tree enumeration and brute-force avoidance/occurrence counting.

This is the ground truth for every symbolic construction in the package:
series solvers, grammars and classification keys are all checked against
counts produced here by direct enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterator

from .trees import (
    Alphabet,
    PatternSet,
    Tree,
    avoids,
    count_occurrences,
    free_end_count,
    vertex_count,
    word_key,
)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def trees_with_internal(alphabet: Alphabet, n_internal: int) -> tuple[Tree, ...]:
    """All well-formed trees with exactly n_internal internal nodes, sorted by Polish word."""
    if n_internal == 0:
        return (Tree(alphabet.free_end),)
    out = []
    for label, k in alphabet.internal_labels:
        for comp in _compositions(n_internal - 1, k):
            for kids in product(*(trees_with_internal(alphabet, c) for c in comp)):
                out.append(Tree(label, kids))
    return tuple(sorted(out, key=lambda t: word_key(t, alphabet)))


def enumerate_trees(alphabet: Alphabet, max_internal: int) -> Iterator[Tree]:
    """Stream every tree with at most max_internal internal nodes, each exactly once,
    by internal-node count and then lexicographically on Polish words."""
    if max_internal < 0:
        raise ValueError("max_internal must be >= 0")
    for i in range(max_internal + 1):
        yield from trees_with_internal(alphabet, i)


@lru_cache(maxsize=None)
def internal_count_totals(alphabet: Alphabet, max_internal: int) -> tuple[int, ...]:
    """Number of trees per internal-node count, by the recurrence alone (no enumeration)."""
    counts = [1]
    for i in range(1, max_internal + 1):
        total = 0
        for _, k in alphabet.internal_labels:
            for comp in _compositions(i - 1, k):
                prod = 1
                for c in comp:
                    prod *= counts[c]
                total += prod
        counts.append(total)
    return tuple(counts)


@lru_cache(maxsize=None)
def trees_up_to_word_length(alphabet: Alphabet, max_len: int) -> tuple[Tree, ...]:
    """All trees whose Polish word has at most max_len symbols (vertex count bound)."""
    by_vertices: dict[int, list[Tree]] = {1: [Tree(alphabet.free_end)]}
    for v in range(2, max_len + 1):
        layer: list[Tree] = []
        for label, k in alphabet.internal_labels:
            for comp in _compositions(v - 1 - k, k):
                sizes = tuple(c + 1 for c in comp)
                pools = [by_vertices.get(s, []) for s in sizes]
                for kids in product(*pools):
                    layer.append(Tree(label, kids))
        by_vertices[v] = layer
    out: list[Tree] = []
    for v in range(1, max_len + 1):
        out.extend(sorted(by_vertices.get(v, []), key=lambda t: word_key(t, alphabet)))
    return tuple(out)


@dataclass
class OccurrenceHistogram:
    """Exact counts of trees by (vertex count, pattern occurrence count)."""

    entries: dict[tuple[int, int], int]

    def count(self, n_vertices: int, k_occurrences: int) -> int:
        return self.entries.get((n_vertices, k_occurrences), 0)

    def marginal_avoiders(self) -> dict[int, int]:
        """Slice at zero occurrences: vertex count -> number of avoiding trees."""
        return {n: c for (n, k), c in self.entries.items() if k == 0}

    def totals_by_vertices(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for (n, _), c in self.entries.items():
            out[n] = out.get(n, 0) + c
        return out


def brute_histogram(alphabet: Alphabet, pattern: Tree, max_internal: int) -> OccurrenceHistogram:
    """Count occurrences of pattern in every tree with at most max_internal internal nodes."""
    entries: dict[tuple[int, int], int] = {}
    for tree in enumerate_trees(alphabet, max_internal):
        key = (vertex_count(tree), count_occurrences(tree, pattern))
        entries[key] = entries.get(key, 0) + 1
    return OccurrenceHistogram(entries)


def count_avoiders(alphabet: Alphabet, patterns: PatternSet, max_internal: int) -> dict[int, int]:
    """Vertex count -> number of trees avoiding every pattern, up to the internal-node bound."""
    out: dict[int, int] = {}
    plist = patterns.patterns
    for tree in enumerate_trees(alphabet, max_internal):
        if avoids(tree, plist):
            n = vertex_count(tree)
            out[n] = out.get(n, 0) + 1
    return out


def count_avoiders_by_leaves(alphabet: Alphabet, patterns: PatternSet, max_internal: int) -> dict[int, int]:
    """Leaf count -> number of avoiding trees, up to the internal-node bound."""
    out: dict[int, int] = {}
    plist = patterns.patterns
    for tree in enumerate_trees(alphabet, max_internal):
        if avoids(tree, plist):
            n = free_end_count(tree)
            out[n] = out.get(n, 0) + 1
    return out
