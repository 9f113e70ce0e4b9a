"""Simple undirected graphs and the subset counting primitives used everywhere else.

Vertices are always ``0..n-1`` internally.  A vertex subset is represented as a
sorted, duplicate-free tuple of ints (see :func:`vertex_set`), so two subsets are
equal exactly when their tuples are equal and they can be used as dict keys.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

VertexSet = Tuple[int, ...]


class GraphFormatError(ValueError):
    """Raised for malformed edge-list input; carries the offending line number."""

    def __init__(self, message: str, lineno: int):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def vertex_set(members: Iterable[int], n: Optional[int] = None) -> VertexSet:
    """Canonical form of a vertex subset (sorted, deduplicated, range-checked)."""
    s = tuple(sorted(set(int(v) for v in members)))
    if n is not None and s and (s[0] < 0 or s[-1] >= n):
        raise ValueError(f"vertex id out of range 0..{n - 1}: {s}")
    return s


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph in CSR adjacency form.

    Build instances with :meth:`from_edges` or :func:`parse_edge_list`; the raw
    constructor trusts its arrays.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    labels: Optional[Tuple[str, ...]] = field(default=None)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]],
                   labels: Optional[Sequence[str]] = None) -> "Graph":
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        pairs = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            pairs.add((u, v) if u < v else (v, u))
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != n or len(set(labels)) != n:
                raise ValueError("labels must be n distinct strings")
        if pairs:
            arr = np.array(sorted(pairs), dtype=np.int64)
            both = np.concatenate([arr, arr[:, ::-1]])
        else:
            both = np.empty((0, 2), dtype=np.int64)
        order = np.lexsort((both[:, 1], both[:, 0]))
        both = both[order]
        counts = np.bincount(both[:, 0], minlength=n) if n else np.zeros(0, np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        indices = both[:, 1].copy()
        indptr.setflags(write=False)
        indices.setflags(write=False)
        return cls(n, indptr, indices, labels)

    @classmethod
    def from_edge_array(cls, n: int, edges, labels: Optional[Sequence[str]] = None) -> "Graph":
        """Vectorized :meth:`from_edges` for a ``(m, 2)`` integer array."""
        arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if arr.size:
            if np.any(arr[:, 0] == arr[:, 1]):
                raise ValueError(f"self-loop at vertex {int(arr[arr[:, 0] == arr[:, 1]][0, 0])}")
            if arr.min() < 0 or arr.max() >= n:
                raise ValueError(f"edge out of range for n={n}")
        arr = np.unique(np.sort(arr, axis=1), axis=0)
        return cls.from_edges(n, (), labels) if not len(arr) else cls._from_sorted(n, arr, labels)

    @classmethod
    def _from_sorted(cls, n: int, arr: np.ndarray, labels) -> "Graph":
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != n or len(set(labels)) != n:
                raise ValueError("labels must be n distinct strings")
        both = np.concatenate([arr, arr[:, ::-1]])
        both = both[np.lexsort((both[:, 1], both[:, 0]))]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(both[:, 0], minlength=n), out=indptr[1:])
        indices = both[:, 1].copy()
        indptr.setflags(write=False)
        indices.setflags(write=False)
        return cls(n, indptr, indices, labels)

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    @cached_property
    def degrees(self) -> np.ndarray:
        d = np.diff(self.indptr)
        d.setflags(write=False)
        return d

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @cached_property
    def adjacency(self) -> Tuple[Tuple[int, ...], ...]:
        """Per-vertex sorted neighbour tuples."""
        return tuple(tuple(int(u) for u in self.neighbors(v)) for v in range(self.n))

    @cached_property
    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of edges with ``u < v``, lexicographically sorted."""
        src = np.repeat(np.arange(self.n), self.degrees)
        mask = src < self.indices
        out = np.stack([src[mask], self.indices[mask]], axis=1)
        out.setflags(write=False)
        return out

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix (int8)."""
        a = np.zeros((self.n, self.n), dtype=np.int8)
        e = self.edges
        a[e[:, 0], e[:, 1]] = 1
        a[e[:, 1], e[:, 0]] = 1
        a.setflags(write=False)
        return a

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    def edge_list_text(self) -> str:
        """Serialize in the edge-list format accepted by :func:`parse_edge_list`."""
        lines = [f"# n={self.n} m={self.m}"]
        lines += [self.label(v) for v in range(self.n) if self.degree(v) == 0]
        lines += [f"{self.label(u)} {self.label(v)}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    __hash__ = None

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def parse_edge_list(text: str, one_indexed: bool = False) -> Graph:
    """Parse whitespace-separated vertex pairs, one edge per line.

    Text after ``#`` is a comment; blank lines are skipped.  A line holding a
    single token declares a vertex without adding an edge, which is the only
    way to write isolated vertices.  By default tokens are arbitrary strings,
    compacted to ``0..n-1`` in first-seen order.  With ``one_indexed`` tokens
    must be positive integers and token ``t`` becomes vertex ``t - 1``, with
    ``n`` the largest token.  Original tokens are kept as labels.  Duplicate
    edges collapse; a self-loop is an error.
    """
    ids: dict = {}
    edges = []
    top = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) > 2:
            raise GraphFormatError(f"expected two vertex tokens, got {raw!r}", lineno)
        if one_indexed:
            for tok in parts:
                if not tok.isdigit() or int(tok) < 1:
                    raise GraphFormatError(f"not a 1-indexed vertex id: {tok!r}", lineno)
            parts = [str(int(tok)) for tok in parts]
            top = max([top] + [int(tok) for tok in parts])
        else:
            for tok in parts:
                if tok not in ids:
                    ids[tok] = len(ids)
        if len(parts) == 1:
            continue
        a, b = parts
        if a == b:
            raise GraphFormatError(f"self-loop on vertex {a}", lineno)
        edges.append((int(a) - 1, int(b) - 1) if one_indexed else (ids[a], ids[b]))
    if one_indexed:
        return Graph.from_edges(top, edges, labels=[str(i + 1) for i in range(top)])
    return Graph.from_edges(len(ids), edges, labels=list(ids))


def read_edge_list(path, one_indexed: bool = False) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read(), one_indexed=one_indexed)


def _check_members(G: Graph, S: Sequence[int]) -> np.ndarray:
    idx = np.asarray(S, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= G.n):
        raise ValueError(f"vertex id out of range 0..{G.n - 1}")
    return idx


def induced_edge_count(G: Graph, S: Sequence[int]) -> int:
    """Number of edges with both endpoints in ``S``."""
    idx = _check_members(G, S)
    if idx.size < 2:
        return 0
    mask = np.zeros(G.n, dtype=bool)
    mask[idx] = True
    e = G.edges
    return int(np.count_nonzero(mask[e[:, 0]] & mask[e[:, 1]]))


def degree_sum(G: Graph, S: Sequence[int]) -> int:
    idx = _check_members(G, S)
    return int(G.degrees[idx].sum())


def cut_size(G: Graph, S: Sequence[int]) -> int:
    """Number of edges leaving ``S``."""
    return degree_sum(G, S) - 2 * induced_edge_count(G, S)


def complement(G: Graph) -> Graph:
    n = G.n
    keep = np.triu(1 - G.matrix, k=1)
    return Graph.from_edge_array(n, np.argwhere(keep), labels=G.labels)


def regular_degree(G: Graph) -> Optional[int]:
    """Common degree if ``G`` is regular, else ``None``."""
    if G.n == 0:
        return None
    d = G.degrees
    return int(d[0]) if np.all(d == d[0]) else None


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def circulant_graph(n: int, jumps: Iterable[int]) -> Graph:
    jumps = list(jumps)
    return Graph.from_edges(n, ((i, (i + j) % n) for i in range(n) for j in jumps))


def empty_graph(n: int) -> Graph:
    return Graph.from_edges(n, ())
