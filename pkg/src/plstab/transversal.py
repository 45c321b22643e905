"""Stabbing decisions for families of d-planes parallel to nested coordinate planes.

A plane family fixes the ambient dimension m, coordinate-index sets
s_t subset of s_T, and the plane dimension d; a member plane's direction
space must contain the s_t coordinate axes and stay inside the span of the
s_T axes.  This module provides:

* the exact rational ceiling on how many disjoint sets one family member
  can stab, in both counting regimes, with its integer part;
* the case predicate telling which counting inequality forbids a common
  transversal for given set sizes;
* exact membership tests of a concrete plane against affine hulls (free
  coefficients) and simplex images (convex coefficients, by exact LP);
* the exact stabbing decision in the linear regime (q <= d-t+1), where
  absence is a certificate of nonexistence;
* the exact univariate decision on one-parameter constraint flats, via a
  single determinant polynomial and Sturm's theorem;
* a float-free heuristic search for transversals outside those regimes
  (verified witnesses only; NotFound is never evidence);
* the exact maximum number of pairwise vertex-disjoint stabbed simplexes of
  a PL image, by branch and bound.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .generic import GenericPool, _derived_seed
from .ratmath import (Mat, Poly, Vec, as_fraction, lp_feasible, mat_rank,
                      nullspace_basis, poly, poly_add, poly_eval, poly_mul,
                      poly_scale, poly_sub, simplest_between, solve_affine,
                      square_free_part, sturm_count, sturm_root_exists,
                      unit_vec, vec, vec_dot, vec_sub, cauchy_root_bound,
                      _rref)
from .simplicial import PLMap, Simplex, SimplicialComplex

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class PlaneFamily:
    """Pattern of d-planes parallel to coordinate planes s_t inside s_T (1-based)."""

    m: int
    s_t: tuple[int, ...]
    s_T: tuple[int, ...]
    d: int

    def __post_init__(self):
        if self.s_t != tuple(sorted(set(self.s_t))):
            raise ValueError("s_t must be sorted and duplicate-free")
        if self.s_T != tuple(sorted(set(self.s_T))):
            raise ValueError("s_T must be sorted and duplicate-free")
        if not set(self.s_t) <= set(self.s_T):
            raise ValueError("s_t must be a subset of s_T")
        if any(not 1 <= j <= self.m for j in self.s_T):
            raise ValueError("coordinate indices must lie in 1..m")
        if not self.t <= self.d <= self.T <= self.m:
            raise ValueError("need |s_t| <= d <= |s_T| <= m")

    @property
    def t(self) -> int:
        return len(self.s_t)

    @property
    def T(self) -> int:
        return len(self.s_T)

    @property
    def block(self) -> tuple[int, ...]:
        """Coordinates of s_T not pinned by s_t."""
        return tuple(j for j in self.s_T if j not in set(self.s_t))


@dataclass(frozen=True)
class ConcretePlane:
    """A member of a family: basepoint plus d-t extra directions inside span(s_T)."""

    family: PlaneFamily
    basepoint: Vec
    extra_directions: tuple[Vec, ...]

    def __post_init__(self):
        fam = self.family
        if len(self.basepoint) != fam.m:
            raise ValueError("basepoint has wrong length")
        if len(self.extra_directions) != fam.d - fam.t:
            raise ValueError("need exactly d - t extra directions")
        in_T = set(fam.s_T)
        for v in self.extra_directions:
            if len(v) != fam.m:
                raise ValueError("direction has wrong length")
            if any(v[j - 1] != 0 for j in range(1, fam.m + 1) if j not in in_T):
                raise ValueError("extra direction leaves span(s_T)")
        block = fam.block
        restricted = [[v[j - 1] for j in block] for v in self.extra_directions]
        if restricted and len(_rref(restricted)[1]) != len(restricted):
            raise ValueError("direction space has dimension below d")
        object.__setattr__(self, "_covectors", self._build_covectors())

    def direction_basis(self) -> list[Vec]:
        fam = self.family
        return [unit_vec(fam.m, j) for j in fam.s_t] + list(self.extra_directions)

    def _build_covectors(self) -> tuple[tuple[Vec, Fraction], ...]:
        fam = self.family
        out: list[tuple[Vec, Fraction]] = []
        in_T = set(fam.s_T)
        for j in range(1, fam.m + 1):
            if j not in in_T:
                c = unit_vec(fam.m, j)
                out.append((c, self.basepoint[j - 1]))
        block = fam.block
        restricted = [[v[j - 1] for j in block] for v in self.extra_directions]
        for nb in nullspace_basis(restricted, len(block)):
            c = [_ZERO] * fam.m
            for value, j in zip(nb, block):
                c[j - 1] = value
            cv = tuple(c)
            out.append((cv, vec_dot(cv, self.basepoint)))
        return tuple(out)

    def covectors(self) -> tuple[tuple[Vec, Fraction], ...]:
        """Implicit form: x on the plane iff c.x = rhs for every (c, rhs).

        Pure coordinate equalities (indices outside s_T) come first, then
        the block equalities annihilating the extra directions.  Computed
        once at construction.
        """
        return self._covectors

    def contains(self, point: Sequence) -> bool:
        p = vec(point)
        return all(vec_dot(c, p) == rhs for c, rhs in self.covectors())


def plane_through(family: PlaneFamily, basepoint: Sequence,
                  span_vectors: Sequence[Vec] = ()) -> ConcretePlane:
    """Family member through basepoint whose directions cover the given vectors.

    Every span vector must already lie in span(s_T); its s_t components are
    projected away, an independent subset is kept, and the direction space is
    padded with block coordinate axes up to dimension exactly d.
    """
    block = family.block
    in_T = set(family.s_T)
    kept: list[list[Fraction]] = []  # restricted to block coordinates
    for v in span_vectors:
        if any(v[j - 1] != 0 for j in range(1, family.m + 1) if j not in in_T):
            raise ValueError("span vector leaves span(s_T)")
        restricted = [v[j - 1] for j in block]
        trial = kept + [restricted]
        if len(_rref(trial)[1]) == len(trial):
            kept.append(restricted)
    for j in range(len(block)):
        if len(kept) == family.d - family.t:
            break
        axis = [_ONE if i == j else _ZERO for i in range(len(block))]
        trial = kept + [axis]
        if len(_rref(trial)[1]) == len(trial):
            kept.append(axis)
    if len(kept) != family.d - family.t:
        raise ValueError("cannot reach dimension d inside span(s_T)")
    extras = []
    for restricted in kept:
        full = [_ZERO] * family.m
        for value, j in zip(restricted, block):
            full[j - 1] = value
        extras.append(tuple(full))
    return ConcretePlane(family, vec(basepoint), tuple(extras))


# ---------------------------------------------------------------------------
# Counting bounds and the case predicate.

class NonStabCase(Enum):
    CASE_I = "case_i"
    CASE_II = "case_ii"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class BoundResult:
    value: Fraction
    floor: int
    regime: str  # "N1" | "N2"


def stab_bound(n: int, m: int, d: int, t: int, T: int) -> BoundResult:
    """Exact ceiling on disjoint stabbed sets of dimension <= n, with its floor.

    Regime N1 applies when n >= (m-n-T)(d-t) and needs m-n-d >= 1; regime N2
    applies otherwise and needs m-n-T >= 1.  The tie goes to N1 (the two
    formulas agree there).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not 0 <= t <= d <= T <= m:
        raise ValueError("need 0 <= t <= d <= T <= m")
    if n >= (m - n - T) * (d - t):
        if m - n - d < 1:
            raise ValueError("invalid parameters: m - n - d must be at least 1")
        value = Fraction(d + 1 - t) + Fraction(n + (n + T - m) * (d - t), m - n - d)
        regime = "N1"
    else:
        if m - n - T < 1:
            raise ValueError("invalid parameters: m - n - T must be at least 1")
        value = 1 + Fraction(n, m - n - T)
        regime = "N2"
    return BoundResult(value, value.__floor__(), regime)


def nonstab_case(n_list: Sequence[int], m: int, d: int, t: int, T: int) -> NonStabCase:
    """Which counting inequality forbids a common transversal, if any.

    Case I needs q >= d-t+1, case II needs q <= d-t+1; at q = d-t+1 the two
    right-hand sides coincide and case I is reported.
    """
    if not 0 <= t <= d <= T <= m:
        raise ValueError("need 0 <= t <= d <= T <= m")
    q = len(n_list)
    if q < 1:
        raise ValueError("need at least one set")
    total = sum(n_list)
    if q >= d - t + 1 and total + 1 <= (m - d) * (q - 1) - (T - d) * (d - t):
        return NonStabCase.CASE_I
    if q <= d - t + 1 and total + 1 <= (m - T) * (q - 1):
        return NonStabCase.CASE_II
    return NonStabCase.INCONCLUSIVE


def mesh_budget(n: int, m: int, eps: Fraction, delta: Fraction) -> tuple[int, Fraction]:
    """Disjoint-stab ceiling r = n(m+1-n) and the mesh cap it imposes.

    A mesh below min(delta/10, eps/(9(r+1))) keeps every plane section of an
    n-dimensional image coverable at scale eps while staying delta-close.
    """
    eps = as_fraction(eps)
    delta = as_fraction(delta)
    if n < 0 or m < n + 1 or eps <= 0 or delta <= 0:
        raise ValueError("need n >= 0, m >= n+1, eps > 0, delta > 0")
    r = n * (m + 1 - n)
    return r, min(delta / 10, eps / (9 * (r + 1)))


# ---------------------------------------------------------------------------
# Membership of a plane against hulls and simplex images.

def _membership_rows(plane: ConcretePlane, points: Sequence[Vec]):
    """Implicit-form system: sum-to-one row plus one row per plane covector."""
    k = len(points)
    rows: list[list[Fraction]] = [[_ONE] * k]
    rhs: list[Fraction] = [_ONE]
    for c, r in plane.covectors():
        rows.append([vec_dot(c, p) for p in points])
        rhs.append(r)
    return rows, rhs


def plane_meets_affine_hull(plane: ConcretePlane,
                            points: Sequence[Vec]) -> Optional[Vec]:
    """Coefficients lambda (summing to 1) placing a hull point on the plane, or None."""
    if not points:
        raise ValueError("empty point set")
    rows, rhs = _membership_rows(plane, points)
    sol = solve_affine(Mat.from_rows(rows), rhs)
    if sol is None:
        return None
    return sol[0]


def plane_meets_simplex_image(plane: ConcretePlane,
                              points: Sequence[Vec]) -> Optional[Vec]:
    """Like the affine-hull test with lambda >= 0 added; decided by exact LP."""
    if not points:
        raise ValueError("empty point set")
    rows, rhs = _membership_rows(plane, points)
    return lp_feasible(Mat.from_rows(rows), rhs, set(range(len(points))))


# ---------------------------------------------------------------------------
# Witnesses and the linear-regime exact decision.

@dataclass(frozen=True)
class StabWitness:
    """A common transversal: per-set coefficients, the plane, the met points."""

    lambdas: tuple[Vec, ...]
    plane: ConcretePlane
    points: tuple[Vec, ...]


def verify_stab_witness(witness: StabWitness, point_sets: Sequence[Sequence[Vec]],
                        family: PlaneFamily) -> tuple[bool, int]:
    """Re-verify a witness exactly; returns (ok, number of conditions checked)."""
    checks = 0
    if witness.plane.family != family:
        return False, checks
    if len(witness.lambdas) != len(point_sets):
        return False, checks
    for lam, pts, y in zip(witness.lambdas, point_sets, witness.points):
        checks += 1
        if len(lam) != len(pts) or sum(lam) != 1:
            return False, checks
        combo = tuple(sum((l * p[c] for l, p in zip(lam, pts)), _ZERO)
                      for c in range(family.m))
        checks += 1
        if combo != y:
            return False, checks
        checks += 1
        if not witness.plane.contains(y):
            return False, checks
    return True, checks


def _grouped(values: Vec, sizes: list[int]) -> tuple[Vec, ...]:
    out = []
    at = 0
    for s in sizes:
        out.append(values[at:at + s])
        at += s
    return tuple(out)


def _stab_system(point_sets: Sequence[Sequence[Vec]],
                 family: PlaneFamily) -> tuple[Mat, list[Fraction], list[int]]:
    """Linear constraints on the stacked lambda: sums 1, differences inside span(s_T)."""
    m = family.m
    sizes = [len(ps) for ps in point_sets]
    total = sum(sizes)
    offsets = [sum(sizes[:i]) for i in range(len(sizes))]
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for i, size in enumerate(sizes):
        row = [_ZERO] * total
        for j in range(size):
            row[offsets[i] + j] = _ONE
        rows.append(row)
        rhs.append(_ONE)
    outside = [c for c in range(1, m + 1) if c not in set(family.s_T)]
    for i in range(1, len(point_sets)):
        for c in outside:
            row = [_ZERO] * total
            for j, p in enumerate(point_sets[i]):
                row[offsets[i] + j] = p[c - 1]
            for j, p in enumerate(point_sets[0]):
                row[offsets[0] + j] -= p[c - 1]
            rows.append(row)
            rhs.append(_ZERO)
    return Mat.from_rows(rows), rhs, sizes


def _witness_from_lambda(point_sets, family, flat_lambda) -> StabWitness:
    sizes = [len(ps) for ps in point_sets]
    lambdas = _grouped(vec(flat_lambda), sizes)
    points = []
    for lam, pts in zip(lambdas, point_sets):
        points.append(tuple(sum((l * p[c] for l, p in zip(lam, pts)), _ZERO)
                            for c in range(family.m)))
    diffs = [vec_sub(y, points[0]) for y in points[1:]]
    plane = plane_through(family, points[0], diffs)
    witness = StabWitness(lambdas, plane, tuple(points))
    ok, _ = verify_stab_witness(witness, point_sets, family)
    if not ok:
        raise RuntimeError("constructed witness failed exact re-verification")
    return witness


def stab_exists_linear(point_sets: Sequence[Sequence[Vec]],
                       family: PlaneFamily) -> Optional[StabWitness]:
    """Exact decision for q <= d-t+1 sets: witness, or None meaning no transversal.

    In this regime a family member meets every affine hull iff the linear
    system (coefficients summing to 1, differences of the met points
    vanishing outside s_T) is solvable, so absence certifies nonexistence.
    """
    q = len(point_sets)
    if q < 1 or any(not ps for ps in point_sets):
        raise ValueError("need nonempty point sets")
    if q > family.d - family.t + 1:
        raise ValueError("too many sets for the linear regime; "
                         "use stab_search_general")
    a, rhs, _ = _stab_system(point_sets, family)
    sol = solve_affine(a, rhs)
    if sol is None:
        return None
    return _witness_from_lambda(point_sets, family, sol[0])


# ---------------------------------------------------------------------------
# Univariate exact decision on a one-dimensional constraint flat.

@dataclass(frozen=True)
class UnivariateDecision:
    status: str  # "stab" | "no_stab" | "not_applicable"
    witness: Optional[StabWitness] = None
    interval: Optional[tuple[Fraction, Fraction]] = None
    reduced: Optional[Poly] = None


def _poly_matrix_det(rows: list[list[Poly]]) -> Poly:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total: Poly = ()
    for j in range(n):
        head = rows[0][j]
        if not head:
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = poly_mul(head, _poly_matrix_det(minor))
        if j % 2:
            term = poly_scale(-1, term)
        total = poly_add(total, term)
    return total


def _projected_difference_polys(point_sets, family, base_lambda, direction):
    """Rows (Y_i - Y_1)(s) restricted to the block coordinates, as polynomials."""
    sizes = [len(ps) for ps in point_sets]
    offsets = [sum(sizes[:i]) for i in range(len(sizes))]
    block = family.block
    y_polys = []
    for i, pts in enumerate(point_sets):
        coords = []
        for c in block:
            const = sum((base_lambda[offsets[i] + j] * pts[j][c - 1]
                         for j in range(sizes[i])), _ZERO)
            slope = sum((direction[offsets[i] + j] * pts[j][c - 1]
                         for j in range(sizes[i])), _ZERO)
            coords.append(poly([const, slope]))
        y_polys.append(coords)
    rows = []
    for i in range(1, len(point_sets)):
        rows.append([poly_sub(y_polys[i][c], y_polys[0][c])
                     for c in range(len(block))])
    return rows


def _rational_root_or_interval(p: Poly):
    """(root, None) for a rational root of p, else (None, isolating interval).

    The interval carries a sign change of the square-free part of p.
    """
    ps = square_free_part(p)
    bound = cauchy_root_bound(ps)
    lo, hi = -bound, bound
    if poly_eval(ps, lo) == 0:
        return lo, None
    if poly_eval(ps, hi) == 0:
        return hi, None
    # narrow to exactly one root, then refine
    for _ in range(200):
        if sturm_count(ps, lo, hi) == 1:
            break
        mid = (lo + hi) / 2
        if poly_eval(ps, mid) == 0:
            return mid, None
        if sturm_count(ps, lo, mid) > 0:
            hi = mid
        else:
            lo = mid
    for _ in range(80):
        cand = simplest_between(lo, hi)
        if poly_eval(p, cand) == 0:
            return cand, None
        mid = (lo + hi) / 2
        if poly_eval(ps, mid) == 0:
            return mid, None
        if sturm_count(ps, lo, mid) > 0:
            hi = mid
        else:
            lo = mid
    return None, (lo, hi)


def stab_decide_univariate(point_sets: Sequence[Sequence[Vec]],
                           family: PlaneFamily) -> UnivariateDecision:
    """Exact decision when q = d-t+2 and the constraint flat is one-dimensional.

    On the flat the stabbing condition collapses to one determinant
    polynomial in the flat parameter: the plain determinant of the projected
    difference matrix when it is square, else the determinant of its Gram
    matrix (the sum of squared maximal minors).  Sturm's theorem then decides
    real-root existence exactly.
    """
    q = len(point_sets)
    if q < 1 or any(not ps for ps in point_sets):
        raise ValueError("need nonempty point sets")
    fam = family
    if q != fam.d - fam.t + 2:
        return UnivariateDecision("not_applicable")
    a, rhs, _ = _stab_system(point_sets, fam)
    sol = solve_affine(a, rhs)
    if sol is None or len(sol[1]) != 1:
        return UnivariateDecision("not_applicable")
    base_lambda, (direction,) = sol
    rows = _projected_difference_polys(point_sets, fam, base_lambda, direction)
    nrows = len(rows)      # d - t + 1
    ncols = len(fam.block)  # T - t
    if ncols < nrows:
        # rank can never exceed the column count, so every flat point stabs
        reduced: Poly = ()
    elif ncols == nrows:
        reduced = _poly_matrix_det(rows)
    else:
        gram: list[list[Poly]] = []
        for i in range(nrows):
            grow: list[Poly] = []
            for j in range(nrows):
                acc: Poly = ()
                for c in range(ncols):
                    acc = poly_add(acc, poly_mul(rows[i][c], rows[j][c]))
                grow.append(acc)
            gram.append(grow)
        reduced = _poly_matrix_det(gram)
    if not reduced:
        s0 = _ZERO
        flat = vec(b + s0 * w for b, w in zip(base_lambda, direction))
        return UnivariateDecision("stab", witness=_witness_from_lambda(
            point_sets, fam, flat), reduced=reduced)
    if not sturm_root_exists(reduced):
        return UnivariateDecision("no_stab", reduced=reduced)
    root, interval = _rational_root_or_interval(reduced)
    if root is not None:
        flat = vec(b + root * w for b, w in zip(base_lambda, direction))
        return UnivariateDecision("stab", witness=_witness_from_lambda(
            point_sets, fam, flat), reduced=reduced)
    return UnivariateDecision("stab", interval=interval, reduced=reduced)


# ---------------------------------------------------------------------------
# Heuristic search outside the exact regimes.

@dataclass(frozen=True)
class SearchResult:
    found: bool
    witness: Optional[StabWitness] = None
    evaluations: int = 0


_GOLDEN = Fraction(377, 610)  # rational golden-section ratio
_SNAP_DENOMINATORS = (8, 64, 1024, 32768)


def stab_search_general(point_sets: Sequence[Sequence[Vec]], family: PlaneFamily,
                        budget: int, pool: GenericPool) -> SearchResult:
    """Heuristic transversal search for q > d-t+1 sets.

    Descends on the Gram determinant of the projected differences over the
    constraint flat, using rational golden-section steps and random restarts;
    candidates are snapped to small rationals by continued fractions and only
    exactly verified witnesses are returned.  A NotFound result is
    inconclusive, never a nonexistence certificate.
    """
    q = len(point_sets)
    if q < 1 or any(not ps for ps in point_sets):
        raise ValueError("need nonempty point sets")
    fam = family
    if q <= fam.d - fam.t + 1:
        raise ValueError("q <= d-t+1 is decided exactly; use stab_exists_linear")
    sol_data = solve_affine(*_stab_system(point_sets, fam)[:2])
    if sol_data is None:
        return SearchResult(False, evaluations=0)
    base_lambda, basis = sol_data
    sizes = [len(ps) for ps in point_sets]
    offsets = [sum(sizes[:i]) for i in range(len(sizes))]
    block = fam.block
    needed_rank = fam.d - fam.t

    def lambda_at(u: Sequence[Fraction]) -> Vec:
        lam = list(base_lambda)
        for coeff, w in zip(u, basis):
            if coeff:
                lam = [x + coeff * y for x, y in zip(lam, w)]
        return tuple(lam)

    def diff_rows(lam: Vec) -> list[list[Fraction]]:
        ys = []
        for i, pts in enumerate(point_sets):
            ys.append([sum((lam[offsets[i] + j] * pts[j][c - 1]
                            for j in range(sizes[i])), _ZERO) for c in block])
        return [[ys[i][c] - ys[0][c] for c in range(len(block))]
                for i in range(1, len(point_sets))]

    evaluations = 0

    def objective(u) -> Fraction:
        nonlocal evaluations
        evaluations += 1
        rows = diff_rows(lambda_at(u))
        n = len(rows)
        gram = [[sum((rows[i][c] * rows[j][c] for c in range(len(block))), _ZERO)
                 for j in range(n)] for i in range(n)]
        def det(mrows):
            if len(mrows) == 1:
                return mrows[0][0]
            acc = _ZERO
            for j, head in enumerate(mrows[0]):
                if head == 0:
                    continue
                minor = [r[:j] + r[j + 1:] for r in mrows[1:]]
                acc += (-1) ** j * head * det(minor)
            return acc
        return det(gram)

    def try_exact(u) -> Optional[StabWitness]:
        lam = lambda_at(u)
        if mat_rank(Mat.from_rows(diff_rows(lam))) <= needed_rank:
            return _witness_from_lambda(point_sets, fam, lam)
        return None

    k = len(basis)
    if k == 0:
        if budget <= 0:
            return SearchResult(False, evaluations=0)
        witness = try_exact(())
        return SearchResult(witness is not None, witness, 1)

    rng = random.Random(_derived_seed(pool.seed, "stab-search"))

    def snapped_candidates(u):
        for den in _SNAP_DENOMINATORS:
            yield tuple(x.limit_denominator(den) for x in u)

    def check_candidates(u) -> Optional[StabWitness]:
        for cand in snapped_candidates(u):
            if objective(cand) == 0:
                witness = try_exact(cand)
                if witness is not None:
                    return witness
        return None

    restarts: list[tuple[Fraction, ...]] = [tuple(_ZERO for _ in range(k))]
    while evaluations < budget:
        if restarts:
            u = restarts.pop()
        else:
            u = tuple(Fraction(rng.randint(-96, 96), 48) for _ in range(k))
        witness = check_candidates(u)
        if witness is not None:
            return SearchResult(True, witness, evaluations)
        best = objective(u)
        step = _ONE
        for _ in range(6):  # descent rounds per restart
            if evaluations >= budget:
                break
            for axis in range(k):
                lo = u[axis] - step
                hi = u[axis] + step
                for _ in range(8):
                    if evaluations >= budget:
                        break
                    width = hi - lo
                    a = lo + (1 - _GOLDEN) * width
                    b = lo + _GOLDEN * width
                    ua = u[:axis] + (a,) + u[axis + 1:]
                    ub = u[:axis] + (b,) + u[axis + 1:]
                    fa, fb = objective(ua), objective(ub)
                    if fa <= fb:
                        hi = b
                        if fa < best:
                            best, u = fa, ua
                    else:
                        lo = a
                        if fb < best:
                            best, u = fb, ub
            witness = check_candidates(u)
            if witness is not None:
                return SearchResult(True, witness, evaluations)
            step = step * Fraction(1, 2)
            if best == 0:
                witness = try_exact(u)
                if witness is not None:
                    return SearchResult(True, witness, evaluations)
    return SearchResult(False, evaluations=evaluations)


# ---------------------------------------------------------------------------
# Counting disjoint stabbed simplexes of a PL image.

def _max_independent_set(n: int, adj: list[set[int]]) -> list[int]:
    order = sorted(range(n), key=lambda v: (-len(adj[v]), v))
    best: list[int] = []

    def descend(cands: list[int], chosen: list[int]):
        nonlocal best
        if len(chosen) > len(best):
            best = chosen[:]
        if not cands or len(chosen) + len(cands) <= len(best):
            return
        v = cands[0]
        descend([u for u in cands[1:] if u not in adj[v]], chosen + [v])
        descend(cands[1:], chosen)

    descend(order, [])
    return sorted(best)


def stabbed_simplexes(k: SimplicialComplex, g: PLMap, plane: ConcretePlane,
                      nmax: int) -> list[Simplex]:
    """Simplexes of dimension <= nmax whose convex images meet the plane."""
    if not g.certified:
        raise ValueError("map must carry an ok genericity certificate")
    covs = plane.covectors()
    value_cache: list[dict[str, Fraction]] = []
    for c, _ in covs:
        nz = [(i, x) for i, x in enumerate(c) if x != 0]
        if len(nz) == 1 and nz[0][1] == 1:
            idx = nz[0][0]
            value_cache.append({v: p[idx] for v, p in g.images.items()})
        else:
            value_cache.append({v: vec_dot(c, p) for v, p in g.images.items()})
    hits = []
    for s in k.sorted_simplexes():
        if len(s) - 1 > nmax:
            continue
        rejected = False
        value_rows = []
        for (c, rhs), cache in zip(covs, value_cache):
            values = [cache[v] for v in s]
            if min(values) > rhs or max(values) < rhs:
                rejected = True
                break
            value_rows.append(values)
        if rejected:
            continue
        rows = [[_ONE] * len(s)] + value_rows
        rhs_col = [_ONE] + [rhs for _, rhs in covs]
        if lp_feasible(Mat.from_rows(rows), rhs_col, set(range(len(s)))) is not None:
            hits.append(s)
    return hits


def max_disjoint_stabbed(k: SimplicialComplex, g: PLMap, plane: ConcretePlane,
                         nmax: int) -> tuple[int, tuple[Simplex, ...]]:
    """Exact maximum family of pairwise vertex-disjoint stabbed simplexes.

    Branch and bound over the intersection graph of the stabbed simplexes,
    max-degree-first with cardinality pruning.
    """
    hits = stabbed_simplexes(k, g, plane, nmax)
    n = len(hits)
    vsets = [set(s) for s in hits]
    adj = [set() for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if vsets[i] & vsets[j]:
                adj[i].add(j)
                adj[j].add(i)
    chosen = _max_independent_set(n, adj)
    return len(chosen), tuple(hits[i] for i in chosen)


# ---------------------------------------------------------------------------
# JSON forms of families and planes.

def family_to_json_dict(f: PlaneFamily) -> dict:
    return {"m": f.m, "St": list(f.s_t), "ST": list(f.s_T), "d": f.d}


def family_from_json_dict(data: dict) -> PlaneFamily:
    return PlaneFamily(int(data["m"]), tuple(int(j) for j in data["St"]),
                       tuple(int(j) for j in data["ST"]), int(data["d"]))


def plane_to_json_dict(p: ConcretePlane) -> dict:
    from .ratmath import format_rational
    out = family_to_json_dict(p.family)
    out["basepoint"] = [format_rational(x) for x in p.basepoint]
    out["extra_dirs"] = [[format_rational(x) for x in v]
                         for v in p.extra_directions]
    return out


def plane_from_json_dict(data: dict) -> ConcretePlane:
    from .ratmath import parse_rational
    family = family_from_json_dict(data)
    basepoint = vec(parse_rational(x) for x in data["basepoint"])
    extras = tuple(vec(parse_rational(x) for x in row)
                   for row in data.get("extra_dirs", []))
    return ConcretePlane(family, basepoint, extras)
