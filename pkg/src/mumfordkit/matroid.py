"""Regular matroids through unimodular integer representations."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .errors import ValidationError
from .lattice import as_matrix, det, outer, rank

R10_ROWS = (
    (1, 0, 0, 0, 0, -1, 1, 0, 0, 1),
    (0, 1, 0, 0, 0, 1, -1, 1, 0, 0),
    (0, 0, 1, 0, 0, 0, 1, -1, 1, 0),
    (0, 0, 0, 1, 0, 0, 0, 1, -1, 1),
    (0, 0, 0, 0, 1, 1, 0, 0, 1, -1),
)


@dataclass(frozen=True)
class MatroidRep:
    """A g x k integer matrix; column i is the vector of ground element i."""

    columns: tuple[tuple[int, ...], ...]  # stored as rows of the g x k matrix
    ground: int | None = None

    def __post_init__(self):
        rows = as_matrix(self.columns)
        object.__setattr__(self, "columns", tuple(tuple(int(a) for a in r) for r in rows))
        if rows and len({len(r) for r in rows}) != 1:
            raise ValidationError("ragged matrix")
        if self.ground is None:
            object.__setattr__(self, "ground", len(rows[0]) if rows else 0)

    @property
    def rank_ambient(self) -> int:
        return len(self.columns)

    @property
    def ground_size(self) -> int:
        return self.ground

    def column(self, i: int) -> tuple[int, ...]:
        return tuple(row[i] for row in self.columns)

    def column_vectors(self) -> list[tuple[int, ...]]:
        return [self.column(i) for i in range(self.ground_size)]


@dataclass(frozen=True)
class Graph:
    """Oriented multigraph; loops and parallel edges allowed."""

    vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        for u, v in self.edges:
            if not (0 <= u < self.vertices and 0 <= v < self.vertices):
                raise ValidationError(f"edge ({u}, {v}) has an endpoint out of range")

    @classmethod
    def from_json(cls, obj) -> "Graph":
        try:
            return cls(int(obj["vertices"]), tuple(tuple(e) for e in obj["edges"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad graph: {exc}") from exc

    def components(self) -> int:
        parent = list(range(self.vertices))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for u, v in self.edges:
            parent[find(u)] = find(v)
        return len({find(a) for a in range(self.vertices)})

    def genus(self) -> int:
        return len(self.edges) - self.vertices + self.components()


def is_unimodular(A: Sequence[Sequence[int]]) -> bool:
    """Every maximal minor lies in {-1, 0, 1}."""
    A = as_matrix(A)
    if not A:
        return True
    g, k = len(A), len(A[0])
    if k < g:
        return all(det([[A[i][c] for c in cols] for i in rows]) in (-1, 0, 1)
                   for rows in combinations(range(g), k) for cols in [tuple(range(k))])
    return all(det([[row[c] for c in cols] for row in A]) in (-1, 0, 1)
               for cols in combinations(range(k), g))


def maximal_minor_count(A: Sequence[Sequence[int]]) -> int:
    A = as_matrix(A)
    from math import comb
    return comb(len(A[0]), len(A)) if A else 0


def independence(rep: MatroidRep, subset: Iterable[int]) -> bool:
    """Columns indexed by ``subset`` (0-based) are linearly independent."""
    idx = sorted(set(subset))
    if any(i < 0 or i >= rep.ground_size for i in idx):
        raise ValidationError("subset is not inside the ground set")
    if not idx:
        return True
    vecs = [rep.column(i) for i in idx]
    return rank(vecs) == len(vecs)


def cographic_rep(G: Graph, spanning_forest: Iterable[int]) -> MatroidRep:
    """Rows are the fundamental cycles of the non-forest edges.

    Entry (c, e) is +1 or -1 when edge e lies on cycle c, traversed along or
    against its orientation, where the cycle runs along its own edge.
    """
    forest = sorted(set(int(e) for e in spanning_forest))
    m = len(G.edges)
    if any(e < 0 or e >= m for e in forest):
        raise ValidationError("forest edge index out of range")
    adj: dict[int, list[tuple[int, int, int]]] = {v: [] for v in range(G.vertices)}
    parent = list(range(G.vertices))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in forest:
        u, v = G.edges[e]
        if find(u) == find(v):
            raise ValidationError(f"forest edges contain a cycle (edge {e})")
        parent[find(u)] = find(v)
        adj[u].append((v, e, +1))
        adj[v].append((u, e, -1))
    if len({find(a) for a in range(G.vertices)}) != G.components():
        raise ValidationError("forest does not span every component")

    def tree_path(a: int, b: int) -> dict[int, int]:
        """Signed forest edges on the path from a to b."""
        prev = {a: None}
        stack = [a]
        while stack:
            x = stack.pop()
            for y, e, s in adj[x]:
                if y not in prev:
                    prev[y] = (x, e, s)
                    stack.append(y)
        out = {}
        x = b
        while prev[x] is not None:
            px, e, s = prev[x]
            out[e] = s
            x = px
        return out

    rows = []
    for e in range(m):
        if e in forest:
            continue
        u, v = G.edges[e]
        row = [0] * m
        row[e] = 1
        # close the cycle: e goes u -> v, then return v -> u through the forest
        for f, s in tree_path(v, u).items():
            row[f] = s
        rows.append(tuple(row))
    return MatroidRep(tuple(rows), m)


def matroidal_cone(rep: MatroidRep) -> list[tuple[tuple[int, ...], ...]]:
    """Rank-one Gram matrices x_i x_i^T in column order."""
    return [outer(x, x) for x in rep.column_vectors()]


def r10() -> MatroidRep:
    return MatroidRep(R10_ROWS)


def check_matroid_axioms(rep: MatroidRep) -> bool:
    """Exhaustively verify the independence axioms (small ground sets only)."""
    k = rep.ground_size
    indep = set()
    for size in range(k + 1):
        for S in combinations(range(k), size):
            if independence(rep, S):
                indep.add(frozenset(S))
    if frozenset() not in indep:
        return False
    for S in indep:
        for x in S:
            if S - {x} not in indep:
                return False
    for A in indep:
        for B in indep:
            if len(A) > len(B) and not any(B | {x} in indep for x in A - B):
                return False
    return True
