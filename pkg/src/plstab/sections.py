"""Exact plane sections of PL images and their metric predicates.

A section is the list of convex polytopes cut out of each simplex image by a
plane, each given by its exact vertex list.  Components of the union (pieces
chained by nonempty intersection, decided by exact LP) make the metric
predicates decidable: a compact PL set is coverable by disjoint open sets of
diameter below eps iff every component has diameter below eps, and the
preimage of a plane is coverable by at most q open sets of diameter at most
eps iff its components admit such a clustering.

Preimages live in the standard geometric realization of the complex: vertex
number i sits at the i-th unit point, so a barycentric solution maps to the
vector of its weights.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .ratmath import (Mat, Vec, as_fraction, dist_sq, lp_feasible, solve_affine,
                      vec, vec_dot)
from .simplicial import PLMap, Simplex, SimplicialComplex
from .transversal import ConcretePlane

_ZERO = Fraction(0)
_ONE = Fraction(1)

Polytope = tuple[Vec, ...]  # vertex list, exact

MAX_CLUSTER_COMPONENTS = 12


@dataclass(frozen=True)
class PlanarSection:
    """Per-simplex intersection polytopes of a plane with a PL image."""

    pieces: tuple[Polytope, ...]
    sources: tuple[Simplex, ...]


@dataclass(frozen=True)
class ComponentPartition:
    components: tuple[tuple[int, ...], ...]
    diameters_sq: tuple[Fraction, ...]


def diameter_sq(points: Sequence[Vec]) -> Fraction:
    best = _ZERO
    for a, b in itertools.combinations(points, 2):
        d = dist_sq(a, b)
        if d > best:
            best = d
    return best


def polytope_vertices(eq_rows: Sequence[Sequence[Fraction]],
                      rhs: Sequence[Fraction], nvars: int) -> list[Vec]:
    """Vertices of {x >= 0 : eq_rows . x = rhs}, by basic-solution enumeration.

    The polytopes here always carry a coefficients-sum-to-one row, so they
    are bounded and every point is a convex combination of these vertices.
    """
    mat = Mat.from_rows(eq_rows)
    from .ratmath import mat_rank
    rank = mat_rank(mat)
    if rank == 0:
        return [tuple(_ZERO for _ in range(nvars))] if all(r == 0 for r in rhs) else []
    out: list[Vec] = []
    for support in itertools.combinations(range(nvars), rank):
        sub = Mat.from_rows([[row[j] for j in support] for row in eq_rows])
        sol = solve_affine(sub, rhs)
        if sol is None or sol[1]:
            continue  # inconsistent, or not a basic solution
        values = sol[0]
        if any(v < 0 for v in values):
            continue
        full = [_ZERO] * nvars
        for j, v in zip(support, values):
            full[j] = v
        candidate = tuple(full)
        if candidate not in out:
            out.append(candidate)
    return out


def polytopes_intersect(p: Polytope, q: Polytope) -> bool:
    """Exact nonempty-intersection test between two vertex-listed polytopes."""
    if not p or not q:
        return False
    m = len(p[0])
    # cheap exact bounding-box rejection first
    for c in range(m):
        pc = [v[c] for v in p]
        qc = [v[c] for v in q]
        if min(pc) > max(qc) or max(pc) < min(qc):
            return False
    rows = []
    for c in range(m):
        rows.append([v[c] for v in p] + [-w[c] for w in q])
    rows.append([_ONE] * len(p) + [_ZERO] * len(q))
    rows.append([_ZERO] * len(p) + [_ONE] * len(q))
    rhs = [_ZERO] * m + [_ONE, _ONE]
    return lp_feasible(Mat.from_rows(rows), rhs,
                       set(range(len(p) + len(q)))) is not None


def _barycentric_pieces(k: SimplicialComplex, g: PLMap,
                        plane: ConcretePlane) -> list[tuple[Simplex, list[Vec]]]:
    """Per simplex, the vertices of {lambda in the standard simplex : image on plane}."""
    covs = plane.covectors()
    value_cache = [{v: vec_dot(c, p) for v, p in g.images.items()}
                   for c, _ in covs]
    out = []
    for s in k.sorted_simplexes():
        skip = False
        for (c, rhs), cache in zip(covs, value_cache):
            values = [cache[v] for v in s]
            if min(values) > rhs or max(values) < rhs:
                skip = True
                break
        if skip:
            continue
        nvars = len(s)
        eq_rows = [[_ONE] * nvars]
        rhs_col = [_ONE]
        for (c, rhs), cache in zip(covs, value_cache):
            eq_rows.append([cache[v] for v in s])
            rhs_col.append(rhs)
        verts = polytope_vertices(eq_rows, rhs_col, nvars)
        if verts:
            out.append((s, verts))
    return out


def section_of_image(k: SimplicialComplex, g: PLMap,
                     plane: ConcretePlane) -> PlanarSection:
    """Exact intersection of the plane with every simplex image.

    Each piece is the polytope of image points of one simplex lying on the
    plane, listed by its exact vertices; empty intersections are omitted.
    """
    if not g.certified:
        raise ValueError("map must carry an ok genericity certificate")
    pieces = []
    sources = []
    for s, bary_verts in _barycentric_pieces(k, g, plane):
        ambient = []
        for lam in bary_verts:
            point = tuple(sum((w * g.images[v][c] for w, v in zip(lam, s)), _ZERO)
                          for c in range(g.m))
            if point not in ambient:
                ambient.append(point)
        pieces.append(tuple(ambient))
        sources.append(s)
    return PlanarSection(tuple(pieces), tuple(sources))


def compute_components(pieces: Sequence[Polytope]) -> ComponentPartition:
    """Connectivity classes of pieces chained by exact nonempty intersection."""
    n = len(pieces)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            if find(i) != find(j) and polytopes_intersect(pieces[i], pieces[j]):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    components = tuple(tuple(sorted(g)) for g in
                       sorted(groups.values(), key=lambda g: g[0]))
    diameters = tuple(
        diameter_sq([v for i in comp for v in pieces[i]])
        for comp in components)
    return ComponentPartition(components, diameters)


def eps_disjoint(section: PlanarSection, eps: Fraction) -> bool:
    """True iff every component of the section has diameter strictly below eps.

    For a compact PL set with finitely many pieces this is equivalent to
    being coverable by disjoint open sets of diameter below eps: the
    components are compact, finitely many and positively separated, so they
    can be fattened into such a cover, and conversely any member of a
    disjoint open cover contains whole components.
    """
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    part = compute_components(section.pieces)
    return all(d < eps * eps for d in part.diameters_sq)


def preimage_polytopes(k: SimplicialComplex, g: PLMap, plane: ConcretePlane,
                       vertex_order: Optional[Sequence[str]] = None
                       ) -> tuple[Polytope, ...]:
    """Per-simplex solution polytopes of "image on plane" in realization coordinates.

    The realization places vertex number i at the i-th unit point of
    R^{|V|}; a barycentric solution therefore maps to its weight vector
    spread over the positions of its simplex's vertices.
    """
    if not g.certified:
        raise ValueError("map must carry an ok genericity certificate")
    order = tuple(vertex_order) if vertex_order is not None else k.vertices
    index = {v: i for i, v in enumerate(order)}
    nv = len(order)
    out = []
    for s, bary_verts in _barycentric_pieces(k, g, plane):
        mapped = []
        for lam in bary_verts:
            point = [_ZERO] * nv
            for w, v in zip(lam, s):
                point[index[v]] = w
            pt = tuple(point)
            if pt not in mapped:
                mapped.append(pt)
        out.append(tuple(mapped))
    return tuple(out)


def cluster_check(preimage: Sequence[Polytope], q: int, eps: Fraction) -> bool:
    """Can the preimage components be split into <= q clusters of diameter <= eps?

    Exact and exhaustive over component assignments (restricted-growth order,
    pruned by the monotonicity of cluster diameters).  Raises on more than
    MAX_CLUSTER_COMPONENTS components.
    """
    eps = as_fraction(eps)
    if q < 1 or eps <= 0:
        raise ValueError("need q >= 1 and eps > 0")
    part = compute_components(preimage)
    ncomp = len(part.components)
    if ncomp > MAX_CLUSTER_COMPONENTS:
        raise ValueError(f"{ncomp} components exceed the exact clusterer limit "
                         f"of {MAX_CLUSTER_COMPONENTS}")
    if ncomp == 0:
        return True
    eps_sq = eps * eps
    points = [[v for i in comp for v in preimage[i]] for comp in part.components]

    pair_cache: dict[tuple[int, int], Fraction] = {}

    def pair_diam_sq(i: int, j: int) -> Fraction:
        key = (min(i, j), max(i, j))
        got = pair_cache.get(key)
        if got is None:
            if i == j:
                got = part.diameters_sq[i]
            else:
                got = max(dist_sq(a, b) for a in points[i] for b in points[j])
            pair_cache[key] = got
        return got

    if any(pair_diam_sq(i, i) > eps_sq for i in range(ncomp)):
        return False

    clusters: list[list[int]] = []

    def assign(idx: int) -> bool:
        if idx == ncomp:
            return True
        for cl in clusters:
            if all(pair_diam_sq(idx, other) <= eps_sq for other in cl):
                cl.append(idx)
                if assign(idx + 1):
                    return True
                cl.pop()
        if len(clusters) < q:
            clusters.append([idx])
            if assign(idx + 1):
                return True
            clusters.pop()
        return False

    return assign(0)


def component_clusters(preimage: Sequence[Polytope], q: int,
                       eps: Fraction) -> Optional[list[list[int]]]:
    """One admissible clustering (component index lists), or None."""
    eps = as_fraction(eps)
    part = compute_components(preimage)
    ncomp = len(part.components)
    if ncomp == 0:
        return []
    if not cluster_check(preimage, q, eps):
        return None
    eps_sq = eps * eps
    points = [[v for i in comp for v in preimage[i]] for comp in part.components]

    def pair_diam_sq(i, j):
        if i == j:
            return part.diameters_sq[i]
        return max(dist_sq(a, b) for a in points[i] for b in points[j])

    clusters: list[list[int]] = []

    def assign(idx: int) -> bool:
        if idx == ncomp:
            return True
        for cl in clusters:
            if all(pair_diam_sq(idx, other) <= eps_sq for other in cl):
                cl.append(idx)
                if assign(idx + 1):
                    return True
                cl.pop()
        if len(clusters) < q:
            clusters.append([idx])
            if assign(idx + 1):
                return True
            clusters.pop()
        return False

    assign(0)
    return [list(c) for c in clusters]
