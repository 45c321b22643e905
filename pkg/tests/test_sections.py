import itertools
import random
from fractions import Fraction

import pytest

from oracles import clusterable_by_partition_scan
from plstab.ratmath import dist_sq, vec
from plstab.sections import (ComponentPartition, PlanarSection, cluster_check,
                             component_clusters, compute_components,
                             diameter_sq, eps_disjoint, polytopes_intersect,
                             preimage_polytopes, section_of_image)
from plstab.simplicial import PLMap, certify_map, parse_complex
from plstab.transversal import ConcretePlane, PlaneFamily, plane_through

F = Fraction


def _triangle():
    k = parse_complex("v a\nv b\nv c\ns a b c\n")
    g = certify_map(k, PLMap(2, {"a": vec([2, 3]), "b": vec([6, 5]),
                                 "c": vec([4, 9])}))
    assert g.certified
    return k, g


def _vertical_line(x):
    fam = PlaneFamily(2, (2,), (2,), 1)
    return ConcretePlane(fam, vec([x, 0]), ())


def test_section_empty_when_plane_misses():
    k, g = _triangle()
    got = section_of_image(k, g, _vertical_line(F(50)))
    assert got.pieces == ()


def test_section_triangle_slice_is_segment():
    k, g = _triangle()
    got = section_of_image(k, g, _vertical_line(F(3)))
    by_source = dict(zip(got.sources, got.pieces))
    tri = by_source[("a", "b", "c")]
    assert set(tri) == {vec([3, F(7, 2)]), vec([3, 6])}
    # the crossed edges contribute their single crossing points
    assert set(by_source[("a", "b")]) == {vec([3, F(7, 2)])}
    assert set(by_source[("a", "c")]) == {vec([3, 6])}
    assert ("b", "c") not in by_source


def test_section_contains_full_edge_on_plane():
    k, g = _triangle()
    fam = PlaneFamily(2, (), (1, 2), 1)
    plane = ConcretePlane(fam, g.images["a"], (vec([4, 2]),))  # through a and b
    got = section_of_image(k, g, plane)
    by_source = dict(zip(got.sources, got.pieces))
    assert set(by_source[("a", "b")]) == {g.images["a"], g.images["b"]}


def test_section_piece_soundness():
    k, g = _triangle()
    plane = _vertical_line(F(7, 2))
    got = section_of_image(k, g, plane)
    assert got.pieces
    for piece, source in zip(got.pieces, got.sources):
        for v in piece:
            assert plane.contains(v)
            # inside the source simplex image: solvable convex combination
            from plstab.ratmath import Mat, lp_feasible
            pts = [g.images[u] for u in source]
            rows = [[p[c] for p in pts] for c in range(2)]
            rows.append([1] * len(pts))
            got_lp = lp_feasible(Mat.from_rows(rows), list(v) + [1],
                                 set(range(len(pts))))
            assert got_lp is not None


# --- components and eps-disjointness ----------------------------------------

def _point_section(*points):
    pieces = tuple((vec(p),) for p in points)
    sources = tuple((f"s{i}",) for i in range(len(points)))
    return PlanarSection(pieces, sources)


def test_eps_disjoint_empty_section():
    assert eps_disjoint(PlanarSection((), ()), F(1)) is True


def test_eps_disjoint_isolated_points():
    section = _point_section([0, 0], [2, 0])
    assert eps_disjoint(section, F(1)) is True


def test_eps_disjoint_long_segment():
    section = PlanarSection(((vec([0, 0]), vec([2, 0])),), (("e",),))
    assert eps_disjoint(section, F(1)) is False
    assert eps_disjoint(section, F(3)) is True


def test_eps_disjoint_strictness():
    section = PlanarSection(((vec([0, 0]), vec([1, 0])),), (("e",),))
    assert eps_disjoint(section, F(1)) is False  # strict comparison
    assert eps_disjoint(section, F(101, 100)) is True


def test_components_chain_through_touching_pieces():
    a = (vec([0, 0]), vec([1, 0]))
    b = (vec([1, 0]), vec([2, 0]))  # touches a
    c = (vec([5, 5]),)
    part = compute_components([a, b, c])
    assert part.components == ((0, 1), (2,))
    assert part.diameters_sq == (F(4), F(0))


def test_polytopes_intersect():
    a = (vec([0, 0]), vec([2, 2]))
    b = (vec([0, 2]), vec([2, 0]))
    c = (vec([3, 3]), vec([4, 4]))
    assert polytopes_intersect(a, b) is True
    assert polytopes_intersect(a, c) is False
    assert polytopes_intersect((), a) is False


# --- preimages ----------------------------------------------------------------

def test_preimage_whole_simplex_on_plane():
    k, g = _triangle()
    fam = PlaneFamily(2, (), (1, 2), 1)
    plane = ConcretePlane(fam, g.images["a"], (vec([4, 2]),))
    polys = preimage_polytopes(k, g, plane)
    # the edge ab maps onto the plane, so its whole reference edge appears
    ref_a = vec([1, 0, 0])
    ref_b = vec([0, 1, 0])
    assert any(set(p) == {ref_a, ref_b} for p in polys)


def test_preimage_point_on_edge():
    k, g = _triangle()
    polys = preimage_polytopes(k, g, _vertical_line(F(3)))
    # edge ab is crossed at weight 3/4 a + 1/4 b
    assert any(set(p) == {vec([F(3, 4), F(1, 4), 0])} for p in polys)


def test_preimage_empty():
    k, g = _triangle()
    assert preimage_polytopes(k, g, _vertical_line(F(50))) == ()


# --- clustering ----------------------------------------------------------------

def _singleton_polytopes(*points):
    return tuple((vec(p),) for p in points)


def test_cluster_empty_preimage():
    assert cluster_check((), 1, F(1)) is True


def test_cluster_three_far_singletons():
    polys = _singleton_polytopes([0, 0], [10, 0], [5, 10])
    assert cluster_check(polys, 2, F(1)) is False
    assert cluster_check(polys, 3, F(1)) is True


def test_cluster_two_near_singletons():
    polys = _singleton_polytopes([0, 0], [F(1, 2), 0])
    assert cluster_check(polys, 1, F(1)) is True


def test_cluster_non_strict_boundary():
    polys = _singleton_polytopes([0, 0], [1, 0])
    assert cluster_check(polys, 1, F(1)) is True  # diameter <= eps passes


def test_cluster_component_limit():
    polys = _singleton_polytopes(*([i * 100, 0] for i in range(13)))
    with pytest.raises(ValueError):
        cluster_check(polys, 13, F(1))


def test_component_clusters_witness():
    polys = _singleton_polytopes([0, 0], [10, 0], [F(1, 3), 0])
    clusters = component_clusters(polys, 2, F(1))
    assert clusters is not None
    assert sorted(len(c) for c in clusters) == [1, 2]
    assert component_clusters(polys, 1, F(1)) is None


def test_point_preimage_components_within_bound():
    # d = 0 planes: preimage component counts stay within the exact ceiling
    import random

    from plstab.batch import random_complex, random_map
    from plstab.generic import GenericPool
    from plstab.simplicial import image_point, roberts_perturb
    from plstab.transversal import stab_bound

    rng = random.Random(44)
    n, m = 2, 4
    ceiling = stab_bound(n, m, 0, 0, m).floor
    fam = PlaneFamily(m, (), tuple(range(1, m + 1)), 0)
    for trial in range(3):
        k = random_complex(rng, rng.randint(6, 8), n, F(1, 4))
        g = roberts_perturb(k, random_map(rng, k, m), F(1, 2),
                            GenericPool(900 + trial))
        simplexes = k.sorted_simplexes()
        for _ in range(10):
            s = simplexes[rng.randrange(len(simplexes))]
            w = [F(rng.randint(1, 3)) for _ in s]
            point = image_point(g, s, [x / sum(w) for x in w])
            plane = ConcretePlane(fam, point, ())
            polys = preimage_polytopes(k, g, plane)
            part = compute_components(polys)
            assert 1 <= len(part.components) <= ceiling


def test_cluster_matches_partition_scan():
    rng = random.Random(19)
    for _ in range(40):
        npts = rng.randint(1, 6)
        dim = rng.choice([2, 3])
        polys = _singleton_polytopes(
            *[[F(rng.randint(0, 12), 2) for _ in range(dim)]
              for _ in range(npts)])
        part = compute_components(polys)
        q = rng.randint(1, 3)
        eps = F(rng.randint(1, 8), 2)
        points = [[v for i in comp for v in polys[i]]
                  for comp in part.components]

        def pair_diam_sq(i, j):
            if i == j:
                return part.diameters_sq[i]
            return max(dist_sq(a, b) for a in points[i] for b in points[j])

        want = clusterable_by_partition_scan(
            list(range(len(part.components))), q, eps * eps, pair_diam_sq)
        assert cluster_check(polys, q, eps) == want
