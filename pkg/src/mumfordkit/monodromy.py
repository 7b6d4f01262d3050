"""Monodromy operators of a degenerating abelian variety, at the lattice level.

Monodromies are unipotent T_i = I + N_i on a symplectic lattice (Z^2g, L)
with N_i^2 = 0 and commuting.  The weight filtration of N = sum r_i N_i is
W_-2 = (im N)^sat inside W_-1 = ker N, and the forms L(N_i x, y) descend to
V / W_-1.  Vectors are columns; L(x, y) = x^T L y.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .errors import ValidationError
from .lattice import (
    SublatticeBasis, as_matrix, complement_basis, det, integer_kernel, inverse,
    mat_add, mat_mul, mat_scale, mat_vec, outer, saturate, span_basis, transpose, zeros,
)
from .matroid import Graph
from .plsection import is_positive_semidefinite


@dataclass(frozen=True)
class SymplecticLattice:
    pairing: tuple  # antisymmetric unimodular 2g x 2g matrix
    standard: bool = False

    def __post_init__(self):
        L = as_matrix(self.pairing)
        n = len(L)
        object.__setattr__(self, "pairing", L)
        if n % 2 or any(len(r) != n for r in L):
            raise ValidationError("pairing must be a square matrix of even size")
        if any(L[i][j] != -L[j][i] for i in range(n) for j in range(n)):
            raise ValidationError("pairing must be antisymmetric")
        if det(L) != 1:
            raise ValidationError("pairing must be unimodular")

    @classmethod
    def standard_lattice(cls, g: int) -> "SymplecticLattice":
        """Basis e_1..e_g, f_1..f_g with L(e_i, f_j) = delta_ij."""
        L = [[0] * (2 * g) for _ in range(2 * g)]
        for i in range(g):
            L[i][g + i] = 1
            L[g + i][i] = -1
        return cls(as_matrix(L), True)

    @property
    def rank(self) -> int:
        return len(self.pairing)

    @property
    def g(self) -> int:
        return self.rank // 2

    def pair(self, x: Sequence[int], y: Sequence[int]) -> int:
        return sum(a * b for a, b in zip(x, mat_vec(self.pairing, y)))


@dataclass(frozen=True)
class WeightFiltration:
    """W_-2 inside W_-1 inside V = Z^n."""

    W2: SublatticeBasis
    W1: SublatticeBasis

    @property
    def ambient_rank(self) -> int:
        return self.W2.ambient_rank

    def ranks(self) -> tuple[int, int, int]:
        """Ranks of gr_-2, gr_-1, gr_0."""
        n = self.ambient_rank
        return self.W2.rank, self.W1.rank - self.W2.rank, n - self.W1.rank

    def to_json(self) -> dict:
        return {"W-2": [list(v) for v in self.W2.basis], "W-1": [list(v) for v in self.W1.basis],
                "graded_ranks": {"-2": self.ranks()[0], "-1": self.ranks()[1], "0": self.ranks()[2]}}


def _check_operators(Ns: Sequence[Sequence[Sequence[int]]]) -> tuple[list, int]:
    Ns = [as_matrix(N) for N in Ns]
    if not Ns:
        raise ValidationError("need at least one monodromy operator")
    n = len(Ns[0])
    for i, N in enumerate(Ns):
        if len(N) != n or any(len(r) != n for r in N):
            raise ValidationError(f"operator {i + 1} is not {n} x {n}")
        if any(a for r in mat_mul(N, N) for a in r):
            raise ValidationError(f"operator {i + 1} does not square to zero")
    for i in range(len(Ns)):
        for j in range(i + 1, len(Ns)):
            if mat_mul(Ns[i], Ns[j]) != mat_mul(Ns[j], Ns[i]):
                raise ValidationError(f"operators {i + 1} and {j + 1} do not commute")
    return Ns, n


def _filtration_of(Ns: list, weights: Sequence[int], n: int) -> WeightFiltration:
    N = zeros(n, n)
    for r, Ni in zip(weights, Ns):
        N = mat_add(N, mat_scale(r, Ni))
    if any(a for row in N for a in row):
        W2 = saturate(span_basis(transpose(N), n)).canonical()
    else:
        W2 = SublatticeBasis(n, ())
    W1 = span_basis(integer_kernel(N, n), n)
    return WeightFiltration(W2, W1)


def weight_filtration(Ns: Sequence[Sequence[Sequence[int]]], seed: int = 0) -> WeightFiltration:
    """Weight filtration of sum N_i, confirmed to agree for two other positive weightings."""
    Ns, n = _check_operators(Ns)
    base = _filtration_of(Ns, [1] * len(Ns), n)
    rng = random.Random(seed)
    for _ in range(2):
        r = [rng.randint(1, 9) for _ in Ns]
        other = _filtration_of(Ns, r, n)
        if other != base:
            raise ValidationError(f"weight filtration changes for positive weights {r}; "
                                  "operators do not span a monodromy cone")
    return base


def is_maximal(Ns: Sequence[Sequence[Sequence[int]]]) -> bool:
    """W_-2 = W_-1, i.e. the abelian part is trivial."""
    W = weight_filtration(Ns)
    return W.W2.rank == W.W1.rank


@dataclass(frozen=True)
class MonodromyForms:
    forms: tuple  # symmetric matrices on gr_0
    basis: tuple  # lift of a basis of gr_0 = V / W_-1
    filtration: WeightFiltration
    semidefinite: tuple[bool, ...]

    @property
    def in_closure(self) -> bool:
        """Every form is positive semi-definite (rational kernels are automatic)."""
        return all(self.semidefinite)

    @property
    def rank_gr0(self) -> int:
        return len(self.basis)

    def to_json(self) -> dict:
        return {"forms": [[list(r) for r in B] for B in self.forms],
                "gr0_basis": [list(v) for v in self.basis],
                "semidefinite": list(self.semidefinite),
                "filtration": self.filtration.to_json()}


def monodromy_forms(Ns: Sequence[Sequence[Sequence[int]]], lat: SymplecticLattice) -> MonodromyForms:
    """Forms B_i(x, y) = L(N_i x, y) on gr_0, in the basis complementing W_-1."""
    Ns, n = _check_operators(Ns)
    if n != lat.rank:
        raise ValidationError(f"operators act on rank {n}, lattice has rank {lat.rank}")
    W = weight_filtration(Ns)
    if W.W2.rank != W.W1.rank:
        raise ValidationError("degeneration is not maximal (W_-2 differs from W_-1)")
    basis = tuple(complement_basis(W.W1))
    forms = []
    for i, N in enumerate(Ns):
        B = tuple(tuple(lat.pair(mat_vec(N, x), y) for y in basis) for x in basis)
        if B != tuple(zip(*B)):
            raise ValidationError(f"form {i + 1} is not symmetric; operators are not compatible with the pairing")
        forms.append(B)
    return MonodromyForms(tuple(forms), basis, W, tuple(is_positive_semidefinite(B) for B in forms))


def unipotent_from_forms(Bs: Sequence[Sequence[Sequence[int]]]) -> list:
    """N_i = [[0, B_i], [0, 0]], i.e. T_i = [[I, B_i], [0, I]]."""
    out = []
    for B in Bs:
        B = as_matrix(B)
        g = len(B)
        if any(a != int(a) for r in B for a in r):
            raise ValidationError("forms must be integral")
        N = [[0] * (2 * g) for _ in range(2 * g)]
        for i in range(g):
            for j in range(g):
                N[i][g + j] = int(B[i][j])
        out.append(as_matrix(N))
    return out


def picard_lefschetz(lat: SymplecticLattice, gamma: Sequence[int]) -> tuple:
    """Logarithm N of the Dehn twist x -> x + L(gamma, x) gamma."""
    row = mat_vec(transpose(lat.pairing), gamma)  # x -> L(gamma, x)
    return outer(gamma, row)


# ---------------------------------------------------------------------------
# graphs

def default_forest(G: Graph) -> list[int]:
    """Spanning forest grown greedily from the last edge backwards.

    The fundamental cycles are then indexed by the lowest-numbered edges.
    """
    parent = list(range(G.vertices))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    forest = []
    for e in reversed(range(len(G.edges))):
        u, v = G.edges[e]
        if find(u) != find(v):
            parent[find(u)] = find(v)
            forest.append(e)
    return sorted(forest)


def incidence_matrix(G: Graph) -> tuple:
    """Vertices x edges; edge (u, v) contributes -1 at u and +1 at v."""
    M = [[0] * len(G.edges) for _ in range(G.vertices)]
    for e, (u, v) in enumerate(G.edges):
        M[u][e] -= 1
        M[v][e] += 1
    return as_matrix(M)


def cycle_basis(G: Graph, forest: Sequence[int] | None = None) -> list:
    """Fundamental cycles of the non-forest edges, computed as a kernel.

    Any basis of H_1 is carried to the fundamental one by reading it on the
    non-forest edges, where fundamental cycles are unit vectors.
    """
    forest = sorted(default_forest(G) if forest is None else forest)
    m = len(G.edges)
    chords = [e for e in range(m) if e not in forest]
    K = integer_kernel(incidence_matrix(G), m) if m else []
    if len(K) != len(chords):
        raise ValidationError("forest does not leave one chord per independent cycle")
    if not K:
        return []
    P = [[z[c] for c in chords] for z in K]
    if abs(det(P)) != 1:
        raise ValidationError("given edges do not form a spanning forest")
    Pinv = inverse(P)
    return [tuple(int(sum(Pinv[i][j] * K[j][e] for j in range(len(K)))) for e in range(m))
            for i in range(len(K))]


def graph_vanishing_forms(G: Graph, forest: Sequence[int] | None = None) -> list:
    """For each edge i, the form (x . gamma_i)^2 on H_1(G) in the fundamental-cycle basis."""
    cycles = cycle_basis(G, forest)
    out = []
    for e in range(len(G.edges)):
        col = [c[e] for c in cycles]
        out.append(outer(col, col))
    return out


def graph_monodromy(G: Graph, forest: Sequence[int] | None = None) -> tuple[SymplecticLattice, list]:
    """Dehn-twist logarithms for the vanishing cycles gamma_i = (column i, 0)."""
    cycles = cycle_basis(G, forest)
    h = len(cycles)
    lat = SymplecticLattice.standard_lattice(h)
    Ns = []
    for e in range(len(G.edges)):
        gamma = tuple(c[e] for c in cycles) + (0,) * h
        Ns.append(picard_lefschetz(lat, gamma))
    return lat, Ns


def monodromy_of_data(data) -> tuple[SymplecticLattice, list]:
    """Standard unipotent monodromies built from the quadratic parts of a Mumford datum."""
    return SymplecticLattice.standard_lattice(data.g), unipotent_from_forms(data.quadratic_parts())

