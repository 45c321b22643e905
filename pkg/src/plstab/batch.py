"""Batch verification sweeps and deterministic fixture generation.

The parametric suites enumerate counting-regime tuples, draw certified
configurations from per-trial pools, run the exact deciders, and collect
violations; every violation carries the seeds needed to reproduce it.  The
samplers here also build the random complexes, maps, and planes used by the
command-line front end and the test corpus.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .generic import GenericityError, GenericPool, _derived_seed, certify
from .ratmath import Vec, vec
from .simplicial import PLMap, SimplicialComplex
from .transversal import (ConcretePlane, NonStabCase, PlaneFamily,
                          family_from_json_dict, nonstab_case, plane_through,
                          stab_decide_univariate, stab_exists_linear,
                          stab_search_general, verify_stab_witness)

_ZERO = Fraction(0)
_ONE = Fraction(1)

REGEN_ATTEMPTS = 3


@dataclass(frozen=True)
class SweepCell:
    suite: str
    m: int
    d: int
    t: int
    T: int
    n_list: tuple[int, ...]

    def key(self) -> str:
        ns = ",".join(str(n) for n in self.n_list)
        return f"{self.suite}:m{self.m}:d{self.d}:t{self.t}:T{self.T}:n[{ns}]"


def _compositions(q: int, max_each: int, total_max: Optional[int] = None,
                  total_exact: Optional[int] = None):
    for n_list in itertools.product(range(max_each + 1), repeat=q):
        s = sum(n_list)
        if total_max is not None and s > total_max:
            continue
        if total_exact is not None and s != total_exact:
            continue
        yield n_list


def linear_cells(m_max: int, n_max: int) -> list[SweepCell]:
    """All tuples where the few-sets counting inequality labels the cell."""
    out = []
    for m in range(1, m_max + 1):
        for T in range(0, m + 1):
            for t in range(0, T + 1):
                for d in range(t, T + 1):
                    for q in range(1, d - t + 2):
                        for n_list in _compositions(q, n_max):
                            cell = SweepCell("linear", m, d, t, T, n_list)
                            if nonstab_case(n_list, m, d, t, T) is NonStabCase.CASE_II:
                                out.append(cell)
    return out


def univariate_cells(m_max: int, n_max: int) -> list[SweepCell]:
    """Tuples with q = d-t+2 whose constraint flat is generically a line.

    The variable count predicts a one-dimensional flat only when the
    constraint rows are generically independent (singleton-heavy tuples can
    make them inconsistent instead), so each candidate is probed with one
    certified draw and kept only if the decision actually applies there.
    """
    out = []
    for m in range(1, m_max + 1):
        for T in range(0, m + 1):
            for t in range(0, T + 1):
                for d in range(t, T + 1):
                    q = d - t + 2
                    total = 1 + (q - 1) * (m - T)
                    if total > q * n_max:
                        continue
                    for n_list in _compositions(q, n_max, total_exact=total):
                        if nonstab_case(n_list, m, d, t, T) is NonStabCase.INCONCLUSIVE:
                            continue
                        cell = SweepCell("univariate", m, d, t, T, n_list)
                        if _univariate_probe(cell):
                            out.append(cell)
    return out


def _univariate_probe(cell: SweepCell) -> bool:
    from .ratmath import solve_affine
    from .transversal import _stab_system
    pool = GenericPool(_derived_seed("probe", cell.key()))
    sets, cert = draw_point_sets(pool, cell.n_list, cell.m)
    if not cert.ok:
        return False
    a, rhs, _ = _stab_system(sets, _cell_family(cell))
    sol = solve_affine(a, rhs)
    return sol is not None and len(sol[1]) == 1


def _cell_family(cell: SweepCell) -> PlaneFamily:
    """Deterministic coordinate-index sets of the required sizes."""
    rng = random.Random(_derived_seed("family", cell.key()))
    s_T = tuple(sorted(rng.sample(range(1, cell.m + 1), cell.T)))
    s_t = tuple(sorted(rng.sample(s_T, cell.t)))
    return PlaneFamily(cell.m, s_t, s_T, cell.d)


def draw_point_sets(pool: GenericPool, n_list: Sequence[int], m: int
                    ) -> tuple[list[list[Vec]], "GenericityCertificate"]:
    """One point set of n_i + 1 points per entry, every coordinate on its own stream.

    The returned certificate records pairwise distinctness of all drawn
    coordinates.
    """
    stream = itertools.count()
    sets: list[list[Vec]] = []
    labelled: list[tuple[str, Fraction]] = []
    for i, n in enumerate(n_list):
        pts = []
        for j in range(n + 1):
            coords = []
            for s in range(m):
                target = Fraction((3 * i + 5 * j + s) % 7)
                value = pool.draw_near(target, Fraction(1, 2), next(stream))
                coords.append(value)
                labelled.append((f"set{i}.pt{j}[{s + 1}]", value))
            pts.append(tuple(coords))
        sets.append(pts)
    transcript = [(f"coord {a} != {b}", va - vb)
                  for (a, va), (b, vb) in itertools.combinations(labelled, 2)]
    return sets, certify(transcript)


def _certified_sets(cell: SweepCell, base_pool: GenericPool, trial: int):
    for attempt in range(REGEN_ATTEMPTS):
        pool = base_pool.derive(trial) if attempt == 0 else \
            GenericPool(base_pool.derive(trial).seed + attempt)
        sets, cert = draw_point_sets(pool, cell.n_list, cell.m)
        if cert.ok:
            return sets, pool.seed
    raise GenericityError(f"could not certify draws for {cell.key()} trial {trial}")


def run_linear_cell(cell: SweepCell, trials: int,
                    base_pool: GenericPool) -> list[dict]:
    """Exact nonstab check: any witness in this regime is a violation."""
    family = _cell_family(cell)
    violations = []
    for trial in range(trials):
        sets, seed = _certified_sets(cell, base_pool, trial)
        witness = stab_exists_linear(sets, family)
        if witness is not None:
            violations.append({
                "cell": cell.key(), "trial": trial, "seed": seed,
                "kind": "unexpected witness in the exact linear regime",
            })
    return violations


def run_univariate_cell(cell: SweepCell, trials: int,
                        base_pool: GenericPool) -> list[dict]:
    """Exact univariate nonstab check; inapplicable draws are regenerated."""
    family = _cell_family(cell)
    violations = []
    for trial in range(trials):
        decision = None
        seed = None
        for attempt in range(REGEN_ATTEMPTS):
            pool = base_pool.derive(trial) if attempt == 0 else \
                GenericPool(base_pool.derive(trial).seed + attempt)
            sets, cert = draw_point_sets(pool, cell.n_list, cell.m)
            if not cert.ok:
                continue
            got = stab_decide_univariate(sets, family)
            if got.status != "not_applicable":
                decision = got
                seed = pool.seed
                break
        if decision is None:
            raise GenericityError(
                f"no applicable certified draw for {cell.key()} trial {trial}")
        if decision.status != "no_stab":
            violations.append({
                "cell": cell.key(), "trial": trial, "seed": seed,
                "kind": "unexpected stab in the exact univariate regime",
            })
    return violations


# ---------------------------------------------------------------------------
# Random fixtures: complexes, maps, planes.

def random_complex(rng: random.Random, vertices: int, dim: int,
                   density: Fraction) -> SimplicialComplex:
    """Random complex on the given vertex count, maximal simplexes of size dim+1.

    Every vertex is declared, so isolated ones stay as 0-simplexes; the
    density is an exact rational inclusion probability.
    """
    names = [f"v{i}" for i in range(1, vertices + 1)]
    maximal: list[tuple[str, ...]] = []
    for size in range(2, dim + 2):
        for combo in itertools.combinations(names, size):
            if Fraction(rng.randrange(10 ** 6), 10 ** 6) < density:
                maximal.append(combo)
    return SimplicialComplex.from_simplexes(names, maximal)


def random_map(rng: random.Random, k: SimplicialComplex, m: int,
               box: int = 8) -> PLMap:
    return PLMap(m, {v: vec([rng.randint(0, box) for _ in range(m)])
                     for v in k.vertices})


def _random_extras(rng: random.Random, family: PlaneFamily) -> list[Vec]:
    block = family.block
    out = []
    for _ in range(family.d - family.t):
        v = [_ZERO] * family.m
        for j in block:
            v[j - 1] = Fraction(rng.randint(-12, 12), rng.randint(1, 4))
        out.append(tuple(v))
    return out


def sample_plane_random(rng: random.Random, family: PlaneFamily,
                        g: PLMap) -> ConcretePlane:
    """Family member with a basepoint near the image and random directions."""
    lo = [min(p[c] for p in g.images.values()) for c in range(g.m)]
    hi = [max(p[c] for p in g.images.values()) for c in range(g.m)]
    for _ in range(32):
        base = []
        for c in range(g.m):
            span = hi[c] - lo[c] + 2
            base.append(lo[c] - 1 + Fraction(rng.randrange(10 ** 6), 10 ** 6) * span)
        try:
            return plane_through(family, vec(base), _random_extras(rng, family))
        except ValueError:
            continue
    raise RuntimeError("could not sample an admissible plane")


def sample_plane_adversarial(rng: random.Random, family: PlaneFamily,
                             k: SimplicialComplex, g: PLMap) -> ConcretePlane:
    """Family member anchored on an image point, directions from image differences."""
    simplexes = k.sorted_simplexes()
    in_T = set(family.s_T)
    for _ in range(32):
        s = simplexes[rng.randrange(len(simplexes))]
        weights = [Fraction(rng.randint(0, 3)) for _ in s]
        if sum(weights) == 0:
            weights[0] = _ONE
        total = sum(weights)
        weights = [w / total for w in weights]
        base = tuple(sum((w * g.images[v][c] for w, v in zip(weights, s)), _ZERO)
                     for c in range(g.m))
        span_vectors = []
        verts = list(g.images)
        for _ in range(family.d - family.t):
            a, b = rng.sample(verts, 2)
            diff = [g.images[a][c] - g.images[b][c] for c in range(g.m)]
            for c in range(g.m):
                if (c + 1) not in in_T:
                    diff[c] = _ZERO
            span_vectors.append(tuple(diff))
        try:
            return plane_through(family, base, span_vectors)
        except ValueError:
            continue
    raise RuntimeError("could not sample an adversarial plane")


# ---------------------------------------------------------------------------
# Fixtures for stab expectations (used by the verify grid file).

def run_stab_fixture(fixture: dict, base_pool: GenericPool) -> dict:
    """Run one stab fixture and compare with its expectation.

    Keys: family (JSON dict), sets (list of point lists of rational text),
    mode (linear | search | univariate), expect (witness | infeasible |
    no_stab | not_found), optional budget.
    """
    family = family_from_json_dict(fixture["family"])
    sets = [[vec(p) for p in ps] for ps in fixture["sets"]]
    mode = fixture.get("mode", "linear")
    if mode == "linear":
        witness = stab_exists_linear(sets, family)
        status = "infeasible" if witness is None else "witness"
    elif mode == "search":
        got = stab_search_general(sets, family,
                                  int(fixture.get("budget", 500)), base_pool)
        status = "witness" if got.found else "not_found"
        witness = got.witness
    elif mode == "univariate":
        got = stab_decide_univariate(sets, family)
        status = {"stab": "witness", "no_stab": "no_stab",
                  "not_applicable": "not_applicable"}[got.status]
        witness = got.witness
    else:
        raise ValueError(f"unknown fixture mode {mode!r}")
    if witness is not None:
        ok, _ = verify_stab_witness(witness, sets, family)
        if not ok:
            status = "invalid_witness"
    expect = fixture.get("expect")
    return {
        "name": fixture.get("name", "fixture"),
        "mode": mode,
        "status": status,
        "expect": expect,
        "ok": expect is None or status == expect,
    }


def run_grid(grid: dict, trials: int, base_pool: GenericPool) -> dict:
    """Run every suite cell and fixture of a verification grid.

    Returns a report dict with per-cell summaries and the flat violation
    list; the caller maps a nonempty violation list to exit code 1.
    """
    violations: list[dict] = []
    cells_run = []
    for suite in grid.get("suites", []):
        kind = suite["kind"]
        m_max = int(suite.get("m_max", 4))
        n_max = int(suite.get("n_max", 2))
        if kind == "linear":
            cells = linear_cells(m_max, n_max)
            runner = run_linear_cell
        elif kind == "univariate":
            cells = univariate_cells(m_max, n_max)
            runner = run_univariate_cell
        else:
            raise ValueError(f"unknown suite kind {kind!r}")
        for cell in cells:
            if trials > 0:
                found = runner(cell, trials, base_pool)
                violations.extend(found)
            cells_run.append(cell.key())
    fixture_results = []
    for fixture in grid.get("fixtures", []):
        result = run_stab_fixture(fixture, base_pool)
        fixture_results.append(result)
        if not result["ok"]:
            violations.append({
                "cell": result["name"], "trial": None, "seed": base_pool.seed,
                "kind": f"fixture expected {result['expect']} "
                        f"but got {result['status']}",
            })
    return {
        "cells": cells_run,
        "trials_per_cell": trials,
        "fixtures": fixture_results,
        "violations": violations,
    }
