"""Finite pure simplicial complexes weighted by chamber counts.

The weight of a simplex is the number of maximal simplices containing it.
Cochains live on ascending-order representatives of unordered simplices;
the inner product in degree k is sum_sigma m(sigma) phi(sigma) psi(sigma).
"""
from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from functools import cached_property

import numpy as np
from scipy import sparse

from .spectra import LaplacianPair


class ComplexError(ValueError):
    pass


class WeightedComplex:
    """A pure simplicial complex given by its maximal simplices (chambers)."""

    def __init__(self, chambers, vertex_types=None):
        chambers = [tuple(sorted(c)) for c in chambers]
        if not chambers:
            raise ComplexError("a complex needs at least one maximal simplex")
        arity = len(chambers[0])
        if arity == 0 or any(len(c) != arity for c in chambers):
            raise ComplexError("maximal simplices must all have the same number of vertices")
        if any(len(set(c)) != arity for c in chambers):
            raise ComplexError("a simplex has repeated vertices")
        if len(set(chambers)) != len(chambers):
            raise ComplexError("a maximal simplex is listed twice (contained in another)")
        self.chambers = chambers
        self.n = arity - 1
        self.vertex_types = dict(vertex_types) if vertex_types else None
        self._weights: dict[int, Counter] = {}

    def __repr__(self):
        return f"WeightedComplex(dim={self.n}, vertices={len(self.vertices)}, chambers={len(self.chambers)})"

    @cached_property
    def vertices(self) -> list:
        return sorted({v for c in self.chambers for v in c})

    @cached_property
    def vertex_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    def weights(self, k: int) -> Counter:
        """Chamber counts m(sigma) for every k-simplex sigma."""
        if k not in self._weights:
            if not 0 <= k <= self.n:
                raise ComplexError(f"degree {k} out of range 0..{self.n}")
            cnt = Counter()
            for c in self.chambers:
                cnt.update(itertools.combinations(c, k + 1))
            self._weights[k] = cnt
        return self._weights[k]

    def weight(self, simplex) -> int:
        simplex = tuple(sorted(simplex))
        if not simplex:
            return len(self.chambers)
        return self.weights(len(simplex) - 1).get(simplex, 0)

    def faces(self, k: int) -> list[tuple]:
        return sorted(self.weights(k))

    def face_index(self, k: int) -> dict:
        cache = self.__dict__.setdefault("_face_index", {})
        if k not in cache:
            cache[k] = {s: i for i, s in enumerate(self.faces(k))}
        return cache[k]

    def is_simplex(self, simplex) -> bool:
        simplex = tuple(sorted(simplex))
        return not simplex or (len(simplex) - 1 <= self.n and self.weight(simplex) > 0)

    def f_vector(self) -> list[int]:
        return [len(self.weights(k)) for k in range(self.n + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * f for k, f in enumerate(self.f_vector()))

    @cached_property
    def _star(self) -> dict:
        star = defaultdict(list)
        for i, c in enumerate(self.chambers):
            for v in c:
                star[v].append(i)
        return star

    def chambers_containing(self, simplex) -> list[tuple]:
        simplex = tuple(sorted(simplex))
        if not simplex:
            return list(self.chambers)
        idx = set(self._star.get(simplex[0], ()))
        for v in simplex[1:]:
            idx &= set(self._star.get(v, ()))
        return [self.chambers[i] for i in sorted(idx)]

    def link(self, tau) -> "WeightedComplex":
        """Link of tau; its own chamber counts equal m_X(tau u sigma)."""
        tau = tuple(sorted(tau))
        if not self.is_simplex(tau):
            raise ComplexError(f"{tau} is not a simplex")
        if len(tau) - 1 > self.n - 1:
            raise ComplexError("the link of a maximal simplex is empty")
        ts = set(tau)
        chambers = [tuple(v for v in c if v not in ts) for c in self.chambers_containing(tau)]
        types = None
        if self.vertex_types:
            types = {v: self.vertex_types[v] for c in chambers for v in c}
        return WeightedComplex(chambers, types)

    def link_weights_agree(self, tau) -> bool:
        lk = self.link(tau)
        return all(lk.weight(s) == self.weight(tuple(tau) + s)
                   for k in range(lk.n + 1) for s in lk.faces(k))

    def is_connected(self) -> bool:
        return self.laplacian_pair().components()[0] == 1 if self.n >= 1 else len(self.vertices) == 1

    def n_components(self) -> int:
        if self.n == 0:
            return len(self.vertices)
        return self.laplacian_pair().components()[0]

    def laplacian_pair(self) -> LaplacianPair:
        """Weighted Laplacian on C^0: edge weights m(vw), vertex weights m(v)."""
        idx = self.vertex_index
        vw = np.array([self.weights(0)[(v,)] for v in self.vertices], dtype=float)
        if self.n == 0:
            return LaplacianPair(np.zeros((0, 2)), np.zeros(0), vw, list(self.vertices))
        w1 = self.weights(1)
        edges = np.array([(idx[a], idx[b]) for a, b in w1], dtype=np.int64).reshape(-1, 2)
        ew = np.array(list(w1.values()), dtype=float)
        return LaplacianPair(edges, ew, vw, list(self.vertices))

    # -- cochains -----------------------------------------------------------
    def coboundary(self, k: int) -> sparse.csr_matrix:
        """Matrix of d: C^k -> C^{k+1}, (d phi)(v_0..v_{k+1}) = sum_i (-1)^i phi(face_i)."""
        if not 0 <= k <= self.n - 1:
            raise ComplexError(f"coboundary degree {k} out of range 0..{self.n - 1}")
        rows, cols, vals = [], [], []
        low = self.face_index(k)
        for r, s in enumerate(self.faces(k + 1)):
            for i in range(k + 2):
                rows.append(r)
                cols.append(low[s[:i] + s[i + 1:]])
                vals.append(-1 if i % 2 else 1)
        return sparse.csr_matrix((vals, (rows, cols)), shape=(len(self.faces(k + 1)), len(low)),
                                 dtype=np.int64)

    def weight_vector(self, k: int) -> np.ndarray:
        w = self.weights(k)
        return np.array([w[s] for s in self.faces(k)], dtype=float)

    def inner(self, k: int, phi, psi) -> float:
        return float(np.sum(self.weight_vector(k) * phi * psi))

    def adjoint(self, k: int) -> sparse.csr_matrix:
        """delta: C^{k+1} -> C^k, adjoint of d_k for the weighted inner products."""
        d = self.coboundary(k).astype(float)
        return (sparse.diags(1.0 / self.weight_vector(k)) @ d.T @ sparse.diags(self.weight_vector(k + 1))).tocsr()

    def laplacian(self, k: int) -> sparse.csr_matrix:
        """Delta^k = delta d + d delta on C^k."""
        size = len(self.faces(k))
        out = sparse.csr_matrix((size, size))
        if k <= self.n - 1:
            out = out + self.adjoint(k) @ self.coboundary(k).astype(float)
        if k >= 1:
            out = out + self.coboundary(k - 1).astype(float) @ self.adjoint(k - 1)
        return out.tocsr()

    def betti(self, k: int, mode: str = "exact_rational") -> int:
        if not 0 <= k <= self.n:
            raise ComplexError(f"degree {k} out of range")
        rank_fn = exact_rank if mode == "exact_rational" else float_rank
        if mode not in ("exact_rational", "float_svd"):
            raise ValueError(f"unknown mode {mode!r}")
        dim = len(self.faces(k))
        r_out = rank_fn(self.coboundary(k)) if k <= self.n - 1 else 0
        r_in = rank_fn(self.coboundary(k - 1)) if k >= 1 else 0
        return dim - r_out - r_in

    def betti_numbers(self, mode: str = "exact_rational") -> list[int]:
        ranks = [exact_rank(self.coboundary(k)) if mode == "exact_rational" else float_rank(self.coboundary(k))
                 for k in range(self.n)]
        out = []
        for k in range(self.n + 1):
            dim = len(self.faces(k))
            out.append(dim - (ranks[k] if k < self.n else 0) - (ranks[k - 1] if k else 0))
        return out

    def thickness(self) -> set[int]:
        """Set of chamber counts over codimension-1 faces."""
        if self.n == 0:
            return {len(self.chambers)}
        return set(self.weights(self.n - 1).values())


def build(maximal_simplices, vertex_types=None) -> WeightedComplex:
    return WeightedComplex(maximal_simplices, vertex_types)


def join(*parts: WeightedComplex) -> WeightedComplex:
    """Simplicial join; vertices of the i-th part are relabeled (i, v)."""
    chambers = []
    for combo in itertools.product(*(p.chambers for p in parts)):
        chambers.append(tuple((i, v) for i, c in enumerate(combo) for v in c))
    relabel = {}
    flat = sorted({v for c in chambers for v in c})
    for j, v in enumerate(flat):
        relabel[v] = j
    types = {}
    for i, p in enumerate(parts):
        for v in p.vertices:
            types[relabel[(i, v)]] = (i, p.vertex_types[v] if p.vertex_types else None)
    return WeightedComplex([tuple(relabel[v] for v in c) for c in chambers], types)


def discrete(npoints: int) -> WeightedComplex:
    """0-dimensional complex with ``npoints`` vertices."""
    return WeightedComplex([(i,) for i in range(npoints)])


# -- ranks -----------------------------------------------------------------------

def exact_rank(matrix) -> int:
    """Exact rank over Q by sparse fraction-free elimination on integer rows.

    Each row operation is r <- b*r - a*p followed by division by the row
    content, so entries stay integral and small.
    """
    m = sparse.csr_matrix(matrix)
    rows = []
    for i in range(m.shape[0]):
        lo, hi = m.indptr[i], m.indptr[i + 1]
        row = {int(c): int(v) for c, v in zip(m.indices[lo:hi], m.data[lo:hi]) if v}
        if row:
            rows.append(row)
    rows.sort(key=len)
    pivots: dict[int, dict] = {}
    for row in rows:
        while row:
            c = min(row)
            p = pivots.get(c)
            if p is None:
                pivots[c] = row
                break
            a, b = row[c], p[c]
            g = math.gcd(a, b)
            a, b = a // g, b // g
            new = {}
            for col, v in row.items():
                new[col] = b * v
            for col, v in p.items():
                x = new.get(col, 0) - a * v
                if x:
                    new[col] = x
                else:
                    new.pop(col, None)
            if new:
                cont = 0
                for v in new.values():
                    cont = math.gcd(cont, v)
                    if cont == 1:
                        break
                if cont > 1:
                    new = {col: v // cont for col, v in new.items()}
            row = new
    return len(pivots)


def float_rank(matrix) -> int:
    A = np.asarray(sparse.csr_matrix(matrix).todense(), dtype=float)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > 1e-8 * s[0])) if len(s) and s[0] > 0 else 0


# -- small named complexes ----------------------------------------------------------

def octahedron() -> WeightedComplex:
    """Boundary of the octahedron; antipodal pairs (0,1), (2,3), (4,5)."""
    return WeightedComplex(itertools.product((0, 1), (2, 3), (4, 5)))


def torus() -> WeightedComplex:
    """Seven-vertex (Moebius / Csaszar) torus."""
    tri = [(i, (i + 1) % 7, (i + 3) % 7) for i in range(7)]
    tri += [(i, (i + 2) % 7, (i + 3) % 7) for i in range(7)]
    return WeightedComplex(tri)


def simplex_boundary(n: int) -> WeightedComplex:
    return WeightedComplex(itertools.combinations(range(n + 2), n + 1))


def read_complex(text: str) -> WeightedComplex:
    """One maximal simplex per line as whitespace-separated vertex indices;
    ``#`` starts a comment."""
    chambers = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            chambers.append(tuple(int(x) for x in line.split()))
    return WeightedComplex(chambers)


def write_complex(X: WeightedComplex) -> str:
    return "".join(" ".join(map(str, c)) + "\n" for c in X.chambers)
