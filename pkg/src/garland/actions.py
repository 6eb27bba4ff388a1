"""Finite permutation groups acting on weighted complexes: orbits of ordered
simplices, stabilizer orders, the orbit-weighted double count over pairs
tau < sigma, and the transitivity/connectivity hypotheses for unimodularity.
"""
from __future__ import annotations

import itertools
import re
from collections import deque
from fractions import Fraction

import numpy as np

from .complexes import WeightedComplex

GROUP_CAP = 10 ** 6


class ActionError(ValueError):
    pass


class PermAction:
    """Group generated by vertex permutations (tuples of images of 0..N-1)."""

    def __init__(self, generators, degree: int | None = None, cap: int = GROUP_CAP):
        gens = [tuple(int(x) for x in g) for g in generators]
        if degree is None:
            if not gens:
                raise ActionError("degree required for the trivial group")
            degree = len(gens[0])
        for g in gens:
            if len(g) != degree or sorted(g) != list(range(degree)):
                raise ActionError("generator is not a permutation of 0..degree-1")
        self.degree = degree
        self.generators = gens
        self.elements = self._closure(cap)
        self.order = len(self.elements)
        self._G = np.array(self.elements, dtype=np.int64).reshape(self.order, degree)

    def _closure(self, cap):
        ident = tuple(range(self.degree))
        seen = {ident}
        queue = deque([ident])
        while queue:
            h = queue.popleft()
            for g in self.generators:
                gh = tuple(g[i] for i in h)
                if gh not in seen:
                    seen.add(gh)
                    if len(seen) > cap:
                        raise ActionError(f"group exceeds the enumeration cap {cap}")
                    queue.append(gh)
        return sorted(seen)

    def __repr__(self):
        return f"PermAction(degree={self.degree}, order={self.order})"

    def images(self, simplex) -> np.ndarray:
        """Row g holds g applied to the ordered simplex."""
        return self._G[:, list(simplex)]

    def stabilizer_order(self, simplex) -> int:
        s = np.asarray(simplex)
        return int(np.sum(np.all(self.images(simplex) == s, axis=1)))

    def setwise_stabilizer(self, simplex) -> np.ndarray:
        imgs = np.sort(self.images(simplex), axis=1)
        return self._G[np.all(imgs == np.sort(simplex), axis=1)]

    def preserves(self, X: WeightedComplex) -> bool:
        chambers = set(X.chambers)
        return all(tuple(sorted(g[v] for v in c)) in chambers
                   for g in self.generators for c in X.chambers)

    def orbits(self, ordered_simplices):
        """Orbit decomposition: list of (representative, |G_sigma|, orbit set).

        Asserts |orbit| * |G_sigma| = |G| for every representative.
        """
        pending = set(ordered_simplices)
        out = []
        for s in sorted(pending):
            if s not in pending:
                continue
            imgs = self.images(s)
            orbit = set(map(tuple, imgs.tolist()))
            stab = self.stabilizer_order(s)
            if len(orbit) * stab != self.order:
                raise AssertionError(f"orbit-stabilizer fails at {s}")
            if not orbit <= pending:
                raise ActionError("the action does not preserve the simplex set")
            pending -= orbit
            out.append((s, stab, orbit))
        return out


def trivial_action(degree: int) -> PermAction:
    return PermAction([], degree)


def ordered_simplices(X: WeightedComplex, k: int) -> list[tuple]:
    return [p for s in X.faces(k) for p in itertools.permutations(s)]


def _pairs(X, l, k):
    """All (tau, sigma) with tau an ordered l-simplex inside the ordered k-simplex sigma."""
    for sigma in ordered_simplices(X, k):
        for tau in itertools.permutations(sigma, l + 1):
            yield tau, sigma


def _check_degrees(X, l, k):
    if not 0 <= l < k <= X.n:
        raise ActionError(f"need 0 <= l < k <= {X.n}, got l={l}, k={k}")


def check_invariant(X, action: PermAction, l: int, k: int, f) -> list:
    """Pairs where f(g tau, g sigma) != f(tau, sigma) for some generator g."""
    bad = []
    for tau, sigma in _pairs(X, l, k):
        v = f(tau, sigma)
        for g in action.generators:
            if f(tuple(g[x] for x in tau), tuple(g[x] for x in sigma)) != v:
                bad.append((tau, sigma, g))
                break
    return bad


def mass_formula_check(X: WeightedComplex, action: PermAction, l: int, k: int, f):
    """Both sides of

        sum_{sigma in Sigma(k,G)} sum_{tau in Sigma(l), tau < sigma} f(tau,sigma)/|G_sigma|
      = sum_{tau in Sigma(l,G)} sum_{sigma in Sigma(k), tau < sigma} f(tau,sigma)/|G_tau|

    over ordered simplices, in exact rationals. Returns (lhs, rhs).
    """
    _check_degrees(X, l, k)
    if not action.preserves(X):
        raise ActionError("the group does not act simplicially on the complex")
    bad = check_invariant(X, action, l, k, f)
    if bad:
        raise ActionError(f"f is not G-invariant, e.g. at {bad[0][:2]}")
    lhs = Fraction(0)
    for sigma, stab, _ in action.orbits(ordered_simplices(X, k)):
        for tau in itertools.permutations(sigma, l + 1):
            lhs += Fraction(f(tau, sigma)) / stab
    rhs = Fraction(0)
    for tau, stab, _ in action.orbits(ordered_simplices(X, l)):
        for face in X.faces(k):
            if set(tau) <= set(face):
                for sigma in itertools.permutations(face):
                    rhs += Fraction(f(tau, sigma)) / stab
    return lhs, rhs


def pair_orbit_ids(X, action: PermAction, l: int, k: int) -> dict:
    """Map each pair (tau, sigma) to the index of its G-orbit."""
    ids = {}
    nxt = 0
    for tau, sigma in _pairs(X, l, k):
        if (tau, sigma) in ids:
            continue
        imgs = action.images(tau + sigma)
        for row in imgs.tolist():
            ids[(tuple(row[: l + 1]), tuple(row[l + 1:]))] = nxt
        nxt += 1
    return ids


def random_invariant_function(X, action, l, k, rng, ids=None):
    """A G-invariant rational function on pairs, constant on pair orbits."""
    ids = pair_orbit_ids(X, action, l, k) if ids is None else ids
    norb = max(ids.values()) + 1
    vals = [Fraction(int(rng.integers(-40, 41)), int(rng.integers(1, 13))) for _ in range(norb)]

    def f(tau, sigma):
        return vals[ids[(tuple(tau), tuple(sigma))]]
    return f


def link_transitivity_check(X: WeightedComplex, action: PermAction) -> dict:
    """Connectivity of links of simplices of codimension >= 2 (the empty
    simplex included, so X itself must be connected) and transitivity of
    each codimension-1 stabilizer on its link."""
    disconnected = []
    for k in range(-1, X.n - 1):
        for tau in ([()] if k == -1 else X.faces(k)):
            lk = X if not tau else X.link(tau)
            if lk.n_components() != 1:
                disconnected.append(tau)
    intransitive = []
    if X.n >= 1:
        for tau in X.faces(X.n - 1):
            link_vertices = {v for c in X.chambers_containing(tau) for v in c if v not in tau}
            stab = action.setwise_stabilizer(tau)
            start = min(link_vertices)
            orbit = set(stab[:, start].tolist())
            if orbit != link_vertices:
                intransitive.append(tau)
    return {
        "codim2_links_connected": not disconnected,
        "codim1_stabilizers_transitive": not intransitive,
        "disconnected_witnesses": disconnected,
        "intransitive_witnesses": intransitive,
    }


_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_permutation(line: str, degree: int) -> tuple[int, ...]:
    """Cycle notation such as ``(0 1 2)(3 4)``; ``()`` is the identity."""
    perm = list(range(degree))
    body = line.strip()
    if _CYCLE.sub("", body).strip():
        raise ActionError(f"malformed cycle notation: {line!r}")
    for cyc in _CYCLE.findall(body):
        pts = [int(x) for x in cyc.replace(",", " ").split()]
        if len(set(pts)) != len(pts) or any(not 0 <= x < degree for x in pts):
            raise ActionError(f"bad cycle ({cyc})")
        for a, b in zip(pts, pts[1:] + pts[:1]):
            perm[a] = b
    return tuple(perm)


def read_group(text: str, degree: int) -> PermAction:
    gens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            gens.append(parse_permutation(line, degree))
    return PermAction(gens, degree)


def format_permutation(perm) -> str:
    seen, out = set(), []
    for i in range(len(perm)):
        if i in seen or perm[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = perm[j]
        out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out) or "()"


def octahedron_group() -> PermAction:
    """Full symmetry group (order 48) of ``complexes.octahedron``."""
    return PermAction([(1, 0, 2, 3, 4, 5), (2, 3, 4, 5, 0, 1), (2, 3, 0, 1, 4, 5)])
