import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from garland import coxeter
from garland.coxeter import (AFFINE, COMPACT_HYPERBOLIC, OTHER, SPHERICAL, CoxeterDiagram,
                             DiagramError, classify, enumerate_hyperbolic, exact_cross_check,
                             gram_matrix, identify_spherical_type, isomorphic, link_subdiagram)

LABELS = (2, 3, 4, 6)


# -- independent oracles (own Gram construction, numpy eigvalsh) ------------------

def _oracle_gram(lab):
    r = len(lab)
    return np.array([[1.0 if i == j else -math.cos(math.pi / lab[i][j]) for j in range(r)]
                     for i in range(r)])


def _oracle_posdef(lab, nodes):
    sub = [[lab[i][j] for j in nodes] for i in nodes]
    return np.linalg.eigvalsh(_oracle_gram(sub)).min() > 1e-9


def _oracle_compact_hyperbolic(lab):
    r = len(lab)
    ev = np.linalg.eigvalsh(_oracle_gram(lab))
    if not (np.sum(ev < -1e-9) == 1 and np.sum(np.abs(ev) <= 1e-9) == 0):
        return False
    return all(_oracle_posdef(lab, s) for k in range(1, r) for s in itertools.combinations(range(r), k))


def _labels_from_edges(r, values):
    lab = [[1] * r for _ in range(r)]
    for (i, j), m in zip(itertools.combinations(range(r), 2), values):
        lab[i][j] = lab[j][i] = m
    return lab


def _brute_force_triangles():
    found = []
    for multiset in itertools.combinations_with_replacement(LABELS, 3):
        if sum(Fraction(1, m) for m in multiset) < 1:
            found.append(tuple(sorted(multiset)))
    return sorted(found)


def _brute_force_rank(r):
    """Compact hyperbolic diagrams of rank r (up to isomorphism) by extending
    spherical rank r-1 labelings one node at a time."""
    edges_prev = list(itertools.combinations(range(r - 1), 2))
    spherical_prev = set()
    for vals in itertools.product(LABELS, repeat=len(edges_prev)):
        lab = _labels_from_edges(r - 1, vals)
        if _oracle_posdef(lab, range(r - 1)):
            spherical_prev.add(tuple(vals))
    found = {}
    for base in spherical_prev:
        for tail in itertools.product(LABELS, repeat=r - 1):
            lab = [[1] * r for _ in range(r)]
            for (i, j), m in zip(edges_prev, base):
                lab[i][j] = lab[j][i] = m
            for i, m in enumerate(tail):
                lab[i][r - 1] = lab[r - 1][i] = m
            ok = True
            for drop in range(r - 1):
                keep = [i for i in range(r) if i != drop]
                key = tuple(lab[a][b] for a, b in itertools.combinations(keep, 2))
                if key not in spherical_prev:
                    ok = False
                    break
            if ok and _oracle_compact_hyperbolic(lab):
                d = CoxeterDiagram(tuple(map(tuple, lab)))
                found[d.canonical_key()] = d
    return found


# -- Gram matrix -----------------------------------------------------------------

def test_gram_of_disconnected_nodes_is_identity():
    assert np.array_equal(gram_matrix(CoxeterDiagram.from_edges(3, {})), np.eye(3))


def test_gram_entries_known_values():
    B = gram_matrix(CoxeterDiagram.triangle(3, 3, 3))
    assert np.allclose(B[~np.eye(3, dtype=bool)], -0.5, atol=0, rtol=0)
    B = gram_matrix(CoxeterDiagram.triangle(4, 4, 4))
    assert np.allclose(B[~np.eye(3, dtype=bool)], -0.7071067811865476, atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5).flatmap(
    lambda r: st.tuples(st.just(r), st.lists(st.sampled_from(LABELS + (5, 8)),
                                             min_size=r * (r - 1) // 2, max_size=r * (r - 1) // 2))))
def test_gram_invariants_and_oracle(data):
    r, vals = data
    lab = _labels_from_edges(r, vals)
    B = gram_matrix(CoxeterDiagram(tuple(map(tuple, lab))))
    assert np.array_equal(B, B.T)
    assert np.all(np.diag(B) == 1)
    off = B[~np.eye(r, dtype=bool)]
    assert np.all((off >= -1) & (off <= 0))
    assert np.allclose(B, _oracle_gram(lab), atol=1e-15)


# -- classification ------------------------------------------------------------

@pytest.mark.parametrize("diagram,kind", [
    (CoxeterDiagram.triangle(3, 3, 3), AFFINE),
    (CoxeterDiagram.path(3), SPHERICAL),
    (CoxeterDiagram.triangle(4, 4, 4), COMPACT_HYPERBOLIC),
    (CoxeterDiagram.path(3, 3), SPHERICAL),
    (CoxeterDiagram.path(4, 4), AFFINE),
    (CoxeterDiagram.path(3, 6), AFFINE),
    (CoxeterDiagram.path(3, 4, 3), SPHERICAL),
    (CoxeterDiagram.path(6, 6), COMPACT_HYPERBOLIC),  # the (2,6,6) triangle
    (CoxeterDiagram.path(6, 6, 6), OTHER),
])
def test_classify_examples(diagram, kind):
    assert classify(diagram).kind == kind


def test_spherical_signature_is_positive_definite_and_hyperbolic_has_one_negative():
    for d in enumerate_hyperbolic(2) + enumerate_hyperbolic(3) + enumerate_hyperbolic(4):
        assert classify(d).signature == (d.rank - 1, 0, 1)
    assert classify(CoxeterDiagram.path(3, 3, 3)).signature == (4, 0, 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 5).flatmap(
    lambda r: st.tuples(st.lists(st.sampled_from(LABELS), min_size=r * (r - 1) // 2,
                                 max_size=r * (r - 1) // 2), st.permutations(list(range(r))))))
def test_classify_invariant_under_node_permutation(data):
    vals, perm = data
    r = len(perm)
    d = CoxeterDiagram(tuple(map(tuple, _labels_from_edges(r, vals))))
    assert classify(d) == classify(d.permuted(perm))
    assert isomorphic(d, d.permuted(perm))


# -- enumeration -----------------------------------------------------------------

def test_triangle_enumeration_matches_brute_force():
    computed = sorted(tuple(sorted((d.labels[0][1], d.labels[1][2], d.labels[0][2])))
                      for d in enumerate_hyperbolic(2))
    assert computed == _brute_force_triangles()
    assert len(computed) == 11


def test_triangle_report_carries_reference_count_and_flag():
    rep = coxeter.enumeration_report(2)
    assert rep["count"] == 11
    assert rep["reference_count"] == 10
    assert rep["discrepancy"] is True


def test_dimension_three_and_four_counts():
    assert [d.to_text() for d in enumerate_hyperbolic(3)] == ["cycle:3,3,3,4", "cycle:3,4,3,4"]
    assert [d.to_text() for d in enumerate_hyperbolic(4)] == ["cycle:3,3,3,3,4"]
    assert isomorphic(enumerate_hyperbolic(3)[0], CoxeterDiagram.cycle(4, 3, 3, 3))


@pytest.mark.parametrize("dim", [3, 4])
def test_exhaustive_search_agrees_with_enumeration(dim):
    oracle = _brute_force_rank(dim + 1)
    ours = {d.canonical_key() for d in enumerate_hyperbolic(dim)}
    assert set(oracle) == ours


def test_invalid_dimension():
    with pytest.raises(DiagramError):
        enumerate_hyperbolic(5)


# -- exact cross-check -----------------------------------------------------------

def test_exact_determinant_of_affine_triangle_is_zero():
    chk = exact_cross_check(CoxeterDiagram.triangle(3, 3, 3))
    assert chk["det"].is_zero() and chk["det_sign"] == 0 and chk["agrees"]


def test_exact_and_float_agree_on_all_enumerated_and_random_diagrams(rng):
    ds = enumerate_hyperbolic(2) + enumerate_hyperbolic(3) + enumerate_hyperbolic(4)
    for _ in range(60):
        r = int(rng.integers(2, 6))
        vals = rng.choice(LABELS, size=r * (r - 1) // 2)
        ds.append(CoxeterDiagram(tuple(map(tuple, _labels_from_edges(r, vals)))))
    for d in ds:
        chk = exact_cross_check(d)
        assert chk["agrees"], d
        assert abs(float(chk["det"]) - np.linalg.det(gram_matrix(d))) < 1e-9


# -- links and types ----------------------------------------------------------------

def test_pentagon_link_opposite_the_four_is_f4():
    d = CoxeterDiagram.cycle(4, 3, 3, 3, 3)  # edge (0,1) carries the 4; node 3 is opposite
    sub = link_subdiagram(d, [3])
    assert sub.to_text() == "path:3,4,3"
    assert identify_spherical_type(sub) == "F4"


def test_triangle_link_is_opposite_edge():
    d = CoxeterDiagram.triangle(3, 3, 4)
    for v in range(3):
        sub = link_subdiagram(d, [v])
        a, b = [i for i in range(3) if i != v]
        assert sub.labels[0][1] == d.labels[a][b]


def test_square_links_are_b3():
    d = CoxeterDiagram.cycle(4, 3, 4, 3)
    for v in range(4):
        sub = link_subdiagram(d, [v])
        assert sub.to_text() == "path:3,4"
        assert identify_spherical_type(sub) == "B3"


@pytest.mark.parametrize("diagram,tag", [
    (CoxeterDiagram.path(6), "I2(6)"),
    (CoxeterDiagram.path(3, 3), "A3"),
    (CoxeterDiagram.path(3, 4, 3), "F4"),
    (CoxeterDiagram.path(3, 3, 4), "B4"),
    (CoxeterDiagram.path(3, 3, 3), "A4"),
    (CoxeterDiagram.from_edges(3, {(0, 1): 3}), "A1xI2(3)"),
    (CoxeterDiagram.from_edges(2, {}), "I2(2)"),  # rank 2 is always a generalized gon
    (CoxeterDiagram.from_edges(3, {}), "A1xA1xA1"),
])
def test_spherical_types(diagram, tag):
    assert identify_spherical_type(diagram) == tag


def test_type_of_non_spherical_raises():
    with pytest.raises(DiagramError):
        identify_spherical_type(CoxeterDiagram.triangle(3, 3, 3))


def test_bad_cotypes_raise():
    d = CoxeterDiagram.triangle(4, 4, 4)
    for bad in ([], [0, 1, 2], [7]):
        with pytest.raises(DiagramError):
            link_subdiagram(d, bad)


@pytest.mark.parametrize("text", ["triangle:3,3,4", "cycle:3,3,3,4", "path:3,4,3",
                                  "cycle:3,4,3,4", "triangle:2,4,6"])
def test_text_round_trip(text):
    assert CoxeterDiagram.parse(text).to_text() == text


def test_cycle_text_is_rotation_invariant():
    assert CoxeterDiagram.parse("cycle:4,3,3,3").to_text() == "cycle:3,3,3,4"
    assert CoxeterDiagram.parse("cycle:3,4,3,3,3") == CoxeterDiagram.parse("cycle:3,4,3,3,3")


@pytest.mark.parametrize("text", ["triangle:3,3", "blob:1,2", "cycle:3,x,3", "path:1",
                                  "matrix:3,3"])
def test_malformed_diagram_text(text):
    with pytest.raises(DiagramError):
        CoxeterDiagram.parse(text)
