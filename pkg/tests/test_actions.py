import itertools
from fractions import Fraction

import numpy as np
import pytest

from garland.actions import (ActionError, PermAction, format_permutation, link_transitivity_check,
                             mass_formula_check, octahedron_group, ordered_simplices,
                             pair_orbit_ids, parse_permutation, random_invariant_function,
                             read_group, trivial_action)
from garland.complexes import build, octahedron
from garland.geometry import construct_gon, incidence_automorphism_generators


def fano_with_group():
    g = construct_gon(3, 2)
    X = g.as_complex()
    return X, PermAction(incidence_automorphism_generators(g), g.n_vertices)


def oracle_total(X, G, l, k, f):
    """Both sides equal (1/|G|) times the plain sum over all ordered pairs."""
    total = Fraction(0)
    for face in X.faces(k):
        for sigma in itertools.permutations(face):
            for tau in itertools.permutations(sigma, l + 1):
                total += Fraction(f(tau, sigma))
    return total / G.order


def one(tau, sigma):
    return 1


# -- hand-counted instances -----------------------------------------------------------

def test_single_triangle_trivial_group():
    X = build([(0, 1, 2)])
    lhs, rhs = mass_formula_check(X, trivial_action(3), 0, 1, one)
    assert lhs == rhs == 12


def test_single_triangle_rotations():
    X = build([(0, 1, 2)])
    G = PermAction([(1, 2, 0)])
    assert G.order == 3
    lhs, rhs = mass_formula_check(X, G, 0, 1, one)
    assert lhs == rhs == 4


# -- groups -----------------------------------------------------------------------------

def test_fano_incidence_group_order():
    X, G = fano_with_group()
    assert G.order == 336
    assert G.preserves(X)


def test_octahedron_group():
    G = octahedron_group()
    assert G.order == 48 and G.preserves(octahedron())


def test_orbit_stabilizer_everywhere():
    X, G = fano_with_group()
    for k in range(2):
        orbits = G.orbits(ordered_simplices(X, k))
        assert sum(len(o) for _, _, o in orbits) == len(ordered_simplices(X, k))
        for rep, stab, orbit in orbits:
            assert len(orbit) * stab == G.order


def test_group_enumeration_cap():
    with pytest.raises(ActionError):
        PermAction([(1, 2, 3, 4, 5, 6, 0), (1, 0, 2, 3, 4, 5, 6)], cap=1000)


def test_cycle_notation_round_trip():
    p = parse_permutation("(0 3 2)(4 5)", 7)
    assert p == (3, 1, 0, 2, 5, 4, 6)
    assert parse_permutation(format_permutation(p), 7) == p
    assert parse_permutation("()", 3) == (0, 1, 2)
    for bad in ("(0 1", "(0 0)", "(0 9)", "0 1"):
        with pytest.raises(ActionError):
            parse_permutation(bad, 4)


def test_read_group_skips_comments():
    G = read_group("# rotations\n(0 1 2)\n\n", 3)
    assert G.order == 3


# -- mass formula -----------------------------------------------------------------------

def test_fano_random_invariant_functions(rng):
    X, G = fano_with_group()
    ids = pair_orbit_ids(X, G, 0, 1)
    for _ in range(100):
        f = random_invariant_function(X, G, 0, 1, rng, ids)
        lhs, rhs = mass_formula_check(X, G, 0, 1, f)
        assert isinstance(lhs, Fraction)
        assert lhs == rhs == oracle_total(X, G, 0, 1, f)


def test_non_invariant_function_rejected():
    X = build([(0, 1, 2)])
    G = PermAction([(1, 2, 0)])
    with pytest.raises(ActionError):
        mass_formula_check(X, G, 0, 1, lambda tau, sigma: tau[0])


def test_non_simplicial_action_rejected():
    X = build([(0, 1, 2), (1, 2, 3)])
    with pytest.raises(ActionError):
        mass_formula_check(X, PermAction([(1, 0, 2, 3)]), 0, 1, one)


def test_degree_range_checked():
    X = build([(0, 1, 2)])
    with pytest.raises(ActionError):
        mass_formula_check(X, trivial_action(3), 1, 1, one)


def _random_instance(rng):
    """A pure complex closed under a small random permutation group."""
    nv = int(rng.integers(4, 8))
    ngens = int(rng.integers(0, 3))
    gens = []
    for _ in range(ngens):
        p = np.arange(nv)
        a, b = rng.choice(nv, 2, replace=False)
        p[[a, b]] = p[[b, a]]
        if rng.random() < 0.5:
            p = np.roll(p, 1) if rng.random() < 0.5 else p
        gens.append(tuple(int(x) for x in p))
    G = PermAction(gens, nv) if gens else trivial_action(nv)
    if G.order > 720:
        G = trivial_action(nv)
    n = int(rng.integers(1, min(4, nv)))
    seeds = {tuple(sorted(rng.choice(nv, n + 1, replace=False).tolist()))
             for _ in range(int(rng.integers(1, 3)))}
    chambers = {tuple(sorted(int(g[v]) for v in s)) for s in seeds for g in G.elements}
    X = build(sorted(chambers))
    l = int(rng.integers(0, n))
    k = int(rng.integers(l + 1, n + 1))
    return X, G, l, k


def test_randomized_instances(rng):
    for _ in range(100):
        X, G, l, k = _random_instance(rng)
        assert G.preserves(X)
        f = random_invariant_function(X, G, l, k, rng)
        lhs, rhs = mass_formula_check(X, G, l, k, f)
        assert lhs == rhs == oracle_total(X, G, l, k, f)


# -- connectivity and transitivity ---------------------------------------------------------

def test_link_transitivity_fano():
    X, G = fano_with_group()
    out = link_transitivity_check(X, G)
    assert out["codim2_links_connected"] and out["codim1_stabilizers_transitive"]


def test_link_transitivity_octahedron():
    out = link_transitivity_check(octahedron(), octahedron_group())
    assert out["codim2_links_connected"] and out["codim1_stabilizers_transitive"]


def test_link_transitivity_two_triangles_not_transitive():
    X = build([(0, 1, 2), (1, 2, 3)])
    out = link_transitivity_check(X, trivial_action(4))
    assert not out["codim1_stabilizers_transitive"]
    assert (1, 2) in out["intransitive_witnesses"]


def test_link_transitivity_trivial_group_on_fano_is_not_transitive():
    X, _ = fano_with_group()
    out = link_transitivity_check(X, trivial_action(14))
    assert out["codim2_links_connected"] and not out["codim1_stabilizers_transitive"]
