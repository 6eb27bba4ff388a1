"""Finite geometries occurring as links at thickness q+1.

Rank 2: generalized m-gons for m in {2, 3, 4, 6} (digon, Desarguesian plane,
symplectic quadrangle W(3,q), split Cayley hexagon). Rank 3/4: flag
complexes of the buildings of type A3, C3 and A4 over GF(q).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import shortest_path

from .complexes import WeightedComplex, discrete, join
from .finfield import (GF, FieldError, enumerate_subspaces, field_of_order, gaussian_binomial,
                       prime_power, symplectic_form)
from .spectra import LaplacianPair, dense_eigensolve

GON_CAPS = {2: 10 ** 6, 3: 32, 4: 16, 6: 4}
FLAG_VERTEX_CAP = 2 * 10 ** 4
FLAG_CHAMBER_CAP = 10 ** 6
AXIOM_POINT_CAP = 10 ** 4

# (m, q) pairs whose closed-form spectrum is checked against a construction
VALIDATION_SET = frozenset(
    [(2, q) for q in (2, 3, 4)] + [(3, q) for q in (2, 3, 4, 5)]
    + [(4, q) for q in (2, 3, 4)] + [(6, q) for q in (2, 3)]
)


class GeometryError(ValueError):
    pass


@dataclass
class IncidenceGeometry:
    """Point/line geometry; ``incidence`` holds (point index, line index)."""

    m: int
    q: int
    points: list
    lines: list
    incidence: list[tuple[int, int]]
    name: str = ""

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def n_lines(self) -> int:
        return len(self.lines)

    @property
    def n_vertices(self) -> int:
        return self.n_points + self.n_lines

    def graph_edges(self) -> np.ndarray:
        inc = np.asarray(self.incidence, dtype=np.int64).reshape(-1, 2)
        return np.column_stack([inc[:, 0], inc[:, 1] + self.n_points])

    def adjacency(self) -> np.ndarray:
        n = self.n_vertices
        A = np.zeros((n, n))
        e = self.graph_edges()
        A[e[:, 0], e[:, 1]] = 1
        A[e[:, 1], e[:, 0]] = 1
        return A

    def sparse_adjacency(self):
        n = self.n_vertices
        e = self.graph_edges()
        data = np.ones(2 * len(e))
        return sparse.csr_matrix((data, (np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])), shape=(n, n))

    def degrees(self) -> tuple[set, set]:
        pd = np.bincount([p for p, _ in self.incidence], minlength=self.n_points)
        ld = np.bincount([l for _, l in self.incidence], minlength=self.n_lines)
        return set(pd.tolist()), set(ld.tolist())

    def as_complex(self) -> WeightedComplex:
        """1-dimensional complex: points 0..np-1, lines np..np+nl-1."""
        types = {i: 0 for i in range(self.n_points)}
        types.update({self.n_points + j: 1 for j in range(self.n_lines)})
        return WeightedComplex([(p, self.n_points + l) for p, l in self.incidence], types)

    def laplacian_pair(self) -> LaplacianPair:
        e = self.graph_edges()
        deg = np.bincount(e.ravel(), minlength=self.n_vertices).astype(float)
        return LaplacianPair(e, np.ones(len(e)), deg)

    def girth_diameter(self) -> tuple[int, int]:
        return girth_and_diameter(self.sparse_adjacency())

    def check_axioms(self) -> dict:
        """Thickness, connectivity, girth 2m and diameter m."""
        pdeg, ldeg = self.degrees()
        out = {"biregular": pdeg == {self.q + 1} and ldeg == {self.q + 1}}
        if self.n_points <= AXIOM_POINT_CAP:
            g, diam = self.girth_diameter()
            out.update(girth=g, diameter=diam, connected=diam < np.inf,
                       gon=(g == 2 * self.m and diam == self.m))
        return out

    def to_edge_list(self) -> str:
        lines = [f"gon m={self.m} q={self.q} points={self.n_points} lines={self.n_lines}"]
        lines += [f"p{p} l{l}" for p, l in self.incidence]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edge_list(cls, text: str) -> "IncidenceGeometry":
        rows = [r for r in text.splitlines() if r.strip()]
        head = dict(tok.split("=") for tok in rows[0].split()[1:])
        inc = []
        for r in rows[1:]:
            a, b = r.split()
            inc.append((int(a[1:]), int(b[1:])))
        npts, nl = int(head["points"]), int(head["lines"])
        return cls(int(head["m"]), int(head["q"]), list(range(npts)), list(range(nl)), inc)


def girth_and_diameter(A) -> tuple[int, float]:
    """Exact girth and diameter from the all-pairs distance matrix.

    From each root r, a vertex at level l with two neighbours at level l-1
    closes an even cycle of length <= 2l, a neighbour on the same level an
    odd cycle of length <= 2l+1; the minimum over roots is the girth.
    """
    A = sparse.csr_matrix(A)
    D = shortest_path(A, method="D", unweighted=True)
    finite = D[np.isfinite(D)]
    diam = float(finite.max()) if np.all(np.isfinite(D)) else math.inf
    girth = math.inf
    maxlev = int(finite.max())
    Df = np.where(np.isfinite(D), D, -10)
    for lev in range(1, maxlev + 1):
        at = (Df == lev)
        below = (Df == lev - 1).astype(float)
        same = at.astype(float)
        parents = A @ below        # [w, r]: neighbours of w at level lev-1 from r
        if np.any(parents[at] >= 2):
            girth = min(girth, 2 * lev)
        if np.any((A @ same)[at] >= 1):
            girth = min(girth, 2 * lev + 1)
        if girth < math.inf:
            break
    return girth, (int(diam) if diam < math.inf else diam)


# -- constructions --------------------------------------------------------------

def _field(q: int) -> GF:
    try:
        return field_of_order(q)
    except FieldError as exc:
        raise GeometryError(str(exc)) from None


def gen_digon(q: int) -> IncidenceGeometry:
    if q < 1:
        raise GeometryError("q must be positive")
    pts = list(range(q + 1))
    return IncidenceGeometry(2, q, pts, list(pts), [(i, j) for i in pts for j in pts], f"digon({q})")


def _incidence_from_spans(F: GF, points, lines):
    index = {p[0]: i for i, p in enumerate(points)}
    inc = []
    for j, L in enumerate(lines):
        for v in F.span_points(L):
            inc.append((index[v], j))
    return inc


def proj_plane(q: int) -> IncidenceGeometry:
    """PG(2,q): points and lines are 1- and 2-dim subspaces of GF(q)^3."""
    if q > GON_CAPS[3]:
        raise GeometryError(f"projective plane construction capped at q <= {GON_CAPS[3]}")
    F = _field(q)
    points = enumerate_subspaces(F, 3, 1)
    lines = enumerate_subspaces(F, 3, 2)
    return IncidenceGeometry(3, q, points, lines, _incidence_from_spans(F, points, lines), f"PG(2,{q})")


def symplectic_quadrangle(q: int) -> IncidenceGeometry:
    """W(3,q): all points of PG(3,q), lines totally isotropic for the
    standard alternating form."""
    if q > GON_CAPS[4]:
        raise GeometryError(f"quadrangle construction capped at q <= {GON_CAPS[4]}")
    F = _field(q)
    form = symplectic_form(F, 4)
    points = enumerate_subspaces(F, 4, 1)
    lines = [L for L in enumerate_subspaces(F, 4, 2) if form(L[0], L[1]) == 0]
    return IncidenceGeometry(4, q, points, lines, _incidence_from_spans(F, points, lines), f"W(3,{q})")


def _quadric_value(F, x):
    # Q(x) = x0 x4 + x1 x5 + x2 x6 - x3^2
    acc = F.sub(0, F.mul(x[3], x[3]))
    for a, b in ((0, 4), (1, 5), (2, 6)):
        acc = F.add(acc, F.mul(x[a], x[b]))
    return acc


# Grassmann coordinate relations cutting the hexagon lines out of Q(6,q):
# p12 = p34, p54 = p32, p20 = p35, p65 = p30, p01 = p36, p46 = p31
_HEXAGON_RELATIONS = [((1, 2), (3, 4)), ((5, 4), (3, 2)), ((2, 0), (3, 5)),
                      ((6, 5), (3, 0)), ((0, 1), (3, 6)), ((4, 6), (3, 1))]


def split_cayley_hexagon(q: int) -> IncidenceGeometry:
    """Split Cayley hexagon H(q) on the parabolic quadric Q(6,q)."""
    if q > GON_CAPS[6]:
        raise GeometryError(f"hexagon construction capped at q <= {GON_CAPS[6]}")
    F = _field(q)
    add, mul, neg, _ = F.tables
    pts = [p[0] for p in enumerate_subspaces(F, 7, 1) if _quadric_value(F, p[0]) == 0]
    P = np.array(pts, dtype=np.int64)
    index = {p: i for i, p in enumerate(pts)}

    def sub(a, b):
        return add[a, neg[b]]

    def grass(i, j, X, Y):
        return sub(mul[X[:, i], Y[:, j]], mul[X[:, j], Y[:, i]])

    lines = {}
    for a in range(len(pts)):
        X = np.broadcast_to(P[a], P.shape)
        ok = np.ones(len(pts), dtype=bool)
        ok[a] = False
        for (i, j), (k, l) in _HEXAGON_RELATIONS:
            ok &= grass(i, j, X, P) == grass(k, l, X, P)
        # both points on the quadric; the joining line lies on it iff they are orthogonal
        bil = np.zeros(len(pts), dtype=np.int64)
        for i, j in ((0, 4), (4, 0), (1, 5), (5, 1), (2, 6), (6, 2)):
            bil = add[bil, mul[P[a, i], P[:, j]]]
        bil = sub(bil, add[mul[P[a, 3], P[:, 3]], mul[P[a, 3], P[:, 3]]])
        ok &= bil == 0
        for b in np.flatnonzero(ok):
            if b > a:
                key = F.rref([pts[a], pts[b]])
                lines.setdefault(key, None)
    line_list = sorted(lines)
    inc = []
    for j, L in enumerate(line_list):
        for v in F.span_points(L):
            inc.append((index[v], j))
    return IncidenceGeometry(6, q, [(p,) for p in pts], line_list, inc, f"H({q})")


def can_construct_gon(m: int, q: int) -> bool:
    return m in GON_CAPS and q <= GON_CAPS[m] and prime_power(q) is not None


@lru_cache(maxsize=None)
def construct_gon(m: int, q: int) -> IncidenceGeometry:
    builders = {2: gen_digon, 3: proj_plane, 4: symplectic_quadrangle, 6: split_cayley_hexagon}
    if m not in builders:
        raise GeometryError(f"no generalized {m}-gon construction")
    if m != 2 and prime_power(q) is None:
        raise GeometryError(f"{q} is not a prime power")
    return builders[m](q)


# -- closed-form spectra ----------------------------------------------------------

def _tree_closed_walks(d: int, length: int) -> int:
    """Closed walks of the given even length at a vertex of the d-regular tree."""
    # count by depth profile: state = depth
    ways = {0: 1}
    for _ in range(length):
        nxt = {}
        for depth, w in ways.items():
            up = d if depth == 0 else d - 1
            nxt[depth + 1] = nxt.get(depth + 1, 0) + w * up
            if depth > 0:
                nxt[depth - 1] = nxt.get(depth - 1, 0) + w
        ways = nxt
    return ways.get(0, 0)


def _solve_fraction(A, b):
    n = len(A)
    M = [list(map(Fraction, row)) + [Fraction(v)] for row, v in zip(A, b)]
    for c in range(n):
        piv = next(i for i in range(c, n) if M[i][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c] / M[c][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return [M[i][n] / M[i][i] for i in range(n)]


def gon_spectrum_closed_form(m: int, q: int) -> list[tuple[float, int]]:
    """Eigenvalues of the incidence graph of a generalized m-gon of order
    (q, q) with multiplicities, as ``[(eigenvalue, multiplicity), ...]``
    sorted descending.

    Nontrivial eigenvalues are +-sqrt(2q + 2q cos(2 pi j / m)); the
    multiplicities follow from the vertex count and the closed-walk counts,
    which agree with the (q+1)-regular tree below the girth 2m.
    """
    if m not in (2, 3, 4, 6):
        raise GeometryError(f"m must be 2, 3, 4 or 6, got {m}")
    if q < 2:
        raise GeometryError("q must be >= 2")
    d = q + 1
    nverts = 2 * (q ** m - 1) // (q - 1)
    squares = sorted({round(2 * q + 2 * q * math.cos(2 * math.pi * j / m), 9)
                      for j in range(1, m // 2 + 1)}, reverse=True)
    pos = [round(s) for s in squares if s > 0.5]
    has_zero = len(pos) < len(squares)
    # unknowns: multiplicity of each +-sqrt(s) pair, then of 0 if present
    nunk = len(pos) + has_zero
    A = [[2] * len(pos) + [1] * has_zero]
    b = [nverts - 2]
    for t in range(1, nunk):
        A.append([2 * s ** t for s in pos] + [0] * has_zero)
        b.append(nverts * _tree_closed_walks(d, 2 * t) - 2 * d ** (2 * t))
    mult = _solve_fraction(A, b)
    out = [(float(d), 1)]
    for s, k in zip(pos, mult):
        out.append((math.sqrt(s), int(k)))
    if has_zero:
        out.append((0.0, int(mult[-1])))
    for s, k in reversed(list(zip(pos, mult))):
        out.append((-math.sqrt(s), int(k)))
    out.append((-float(d), 1))
    if any(k != int(k) or k < 0 for k in mult) or sum(k for _, k in out) != nverts:
        raise GeometryError(f"inconsistent closed-form multiplicities for m={m}, q={q}")
    return out


def expand_spectrum(table) -> np.ndarray:
    return np.sort(np.concatenate([np.full(k, v) for v, k in table]))


def gon_second_eigenvalue(m: int, q: int) -> float:
    return gon_spectrum_closed_form(m, q)[1][0]


def gon_kappa_closed_form(m: int, q: int) -> float:
    """1 - lambda_2 / (q+1): spectral gap of the normalized Laplacian."""
    return 1.0 - gon_second_eigenvalue(m, q) / (q + 1)


def closed_form_status(m: int, q: int) -> str:
    return "validated" if (m, q) in VALIDATION_SET else "extrapolated"


@lru_cache(maxsize=None)
def validate_closed_form(m: int, q: int, tol: float = 1e-8) -> bool:
    """Dense spectrum of the constructed gon equals the closed form."""
    g = construct_gon(m, q)
    w, _ = dense_eigensolve(g.adjacency())
    return bool(np.max(np.abs(w - expand_spectrum(gon_spectrum_closed_form(m, q)))) <= tol)


# -- flag complexes ----------------------------------------------------------------

@dataclass
class FlagComplexSpec:
    type: str
    q: int
    level_sizes: list[int]
    complex: WeightedComplex
    vertex_types: dict = field(repr=False, default_factory=dict)


def _predicted_vertices(btype: str, q: int) -> int:
    if btype in ("A3", "A4"):
        r = int(btype[1])
        return sum(gaussian_binomial(r + 1, k, q) for k in range(1, r + 1))
    if btype == "C3":
        pts = (q ** 6 - 1) // (q - 1)
        lines = (q ** 6 - 1) * (q ** 4 - 1) // ((q ** 2 - 1) * (q - 1))
        planes = (q + 1) * (q ** 2 + 1) * (q ** 3 + 1)
        return pts + lines + planes
    raise GeometryError(f"unsupported building type {btype}")


def _chains(levels_points):
    """Maximal chains U_1 < U_2 < ... given each level's point sets."""
    point_to = []
    for level in levels_points:
        pt = {}
        for idx, s in enumerate(level):
            for p in s:
                pt.setdefault(p, []).append(idx)
        point_to.append(pt)
    parents = []
    for r in range(len(levels_points) - 1):
        par = []
        for s in levels_points[r]:
            anyp = next(iter(s))
            par.append([w for w in point_to[r + 1][anyp] if s <= levels_points[r + 1][w]])
        parents.append(par)
    chains = [(i,) for i in range(len(levels_points[0]))]
    for r in range(len(levels_points) - 1):
        chains = [c + (w,) for c in chains for w in parents[r][c[-1]]]
        if len(chains) > FLAG_CHAMBER_CAP:
            raise GeometryError(f"more than {FLAG_CHAMBER_CAP} chambers")
    return chains


@lru_cache(maxsize=None)
def flag_complex(btype: str, q: int) -> FlagComplexSpec:
    """Flag complex of the building of type A3, C3 (totally isotropic flags
    in GF(q)^6) or A4 over GF(q)."""
    F = _field(q)
    nv = _predicted_vertices(btype, q)
    if nv > FLAG_VERTEX_CAP:
        raise GeometryError(f"{btype}({q}) has {nv} vertices, above the cap {FLAG_VERTEX_CAP}")
    if btype in ("A3", "A4"):
        dim = int(btype[1]) + 1
        levels = [enumerate_subspaces(F, dim, r) for r in range(1, dim)]
    else:
        form = symplectic_form(F, 6)
        levels = [[s for s in enumerate_subspaces(F, 6, r) if form.is_totally_isotropic(s)]
                  for r in (1, 2, 3)]
    pindex = {p[0]: i for i, p in enumerate(levels[0])}
    levels_points = [[frozenset([i]) for i in range(len(levels[0]))]]
    for lev in levels[1:]:
        levels_points.append([frozenset(pindex[v] for v in F.span_points(s)) for s in lev])
    offsets = np.cumsum([0] + [len(l) for l in levels])
    chains = _chains(levels_points)
    chambers = [tuple(int(offsets[r] + c[r]) for r in range(len(c))) for c in chains]
    types = {int(offsets[r] + i): r for r in range(len(levels)) for i in range(len(levels[r]))}
    X = WeightedComplex(chambers, types)
    return FlagComplexSpec(btype, q, [len(l) for l in levels], X, types)


def digon_points(q: int) -> WeightedComplex:
    """Rank-1 building: q+1 points."""
    return discrete(q + 1)


def building_complex(tag: str, q: int) -> WeightedComplex:
    """Flag complex realizing a spherical type tag such as ``I2(4)``, ``B3``
    or ``A1xI2(3)`` at thickness q+1 (B3 is realized by the C3 building)."""
    parts = tag.split("x")
    if len(parts) > 1:
        return join(*(building_complex(p, q) for p in parts))
    if tag == "A1":
        return digon_points(q)
    if tag.startswith("I2("):
        return construct_gon(int(tag[3:-1]), q).as_complex()
    if tag == "A2":
        return construct_gon(3, q).as_complex()
    if tag in ("A3", "A4", "C3"):
        return flag_complex(tag, q).complex
    if tag == "B3":
        return flag_complex("C3", q).complex
    raise GeometryError(f"no construction for type {tag}")


def incidence_automorphism_generators(plane: IncidenceGeometry) -> list[tuple[int, ...]]:
    """Generators for the automorphism group of the incidence graph of
    PG(2,p), p prime: elementary transvections and the standard polarity.
    Vertices are numbered as in ``as_complex``."""
    p = plane.q
    if plane.m != 3 or prime_power(p) is None or prime_power(p)[1] != 1:
        raise GeometryError("implemented for prime-order projective planes")
    F = _field(p)
    npts = plane.n_points
    pidx = {pt[0]: i for i, pt in enumerate(plane.points)}
    lidx = {L: j for j, L in enumerate(plane.lines)}

    def apply(M, v):
        return F.normalize(tuple(sum(M[i][k] * v[k] for k in range(3)) % p for i in range(3)))

    gens = []
    for i, j in itertools.permutations(range(3), 2):
        M = [[int(a == b) for b in range(3)] for a in range(3)]
        M[i][j] = 1
        perm = [0] * plane.n_vertices
        for v, a in pidx.items():
            perm[a] = pidx[apply(M, v)]
        for L, b in lidx.items():
            img = F.rref([apply(M, L[0]), apply(M, L[1])])
            perm[npts + b] = npts + lidx[img]
        gens.append(tuple(perm))

    def perp_point(L):
        # normalized vector orthogonal (dot product) to both basis rows
        for v, _ in pidx.items():
            if F.dot(v, L[0]) == 0 and F.dot(v, L[1]) == 0:
                return v

    def perp_line(v):
        basis = [w for w in pidx if F.dot(w, v) == 0]
        return F.rref(basis)

    perm = [0] * plane.n_vertices
    for v, a in pidx.items():
        perm[a] = npts + lidx[perp_line(v)]
    for L, b in lidx.items():
        perm[npts + b] = pidx[perp_point(L)]
    gens.append(tuple(perm))
    return gens
