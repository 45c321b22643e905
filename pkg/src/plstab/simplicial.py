"""Finite abstract simplicial complexes and their piecewise-linear maps.

A complex is a face-closed set of sorted vertex-id tuples; a PL map assigns
each vertex an exact rational point in R^m and is extended affinely on every
simplex.  The perturbation routine moves every vertex image into general
position using per-coordinate streams from a :class:`~plstab.generic.GenericPool`
and certifies the result (pairwise-distinct coordinates, affinely independent
simplex images), regenerating from successor seeds on failure.

File formats (both UTF-8, line oriented, '#' starts a comment):

* complex file: ``v <id>`` declares a vertex, ``s <id> <id> ...`` declares a
  simplex; the complex is the face closure of the declared simplexes.
* map file: header ``m <count>``, then ``p <vertex-id> <rat> ... <rat>`` with
  exactly m rational coordinates per line.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .generic import (GenericityCertificate, GenericityError, GenericPool,
                      certify)
from .ratmath import (Vec, as_fraction, dist_sq, format_rational,
                      parse_rational, vec, vec_sub)

Simplex = tuple[str, ...]

PERTURB_ATTEMPTS = 3


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _closure(simplexes) -> frozenset[Simplex]:
    closed = set()
    for s in simplexes:
        verts = tuple(sorted(s))
        for k in range(1, len(verts) + 1):
            closed.update(itertools.combinations(verts, k))
    return frozenset(closed)


@dataclass(frozen=True)
class SimplicialComplex:
    """Face-closed finite complex; vertex order is first-appearance order."""

    vertices: tuple[str, ...]
    simplexes: frozenset[Simplex]

    @classmethod
    def from_simplexes(cls, vertices: Sequence[str],
                       simplexes: Sequence[Sequence[str]]) -> "SimplicialComplex":
        vertices = tuple(vertices)
        known = set(vertices)
        if len(known) != len(vertices):
            raise ValueError("duplicate vertex id")
        for s in simplexes:
            for v in s:
                if v not in known:
                    raise ValueError(f"unknown vertex id {v!r}")
            if len(set(s)) != len(s):
                raise ValueError("duplicate vertex in a simplex")
        closed = _closure(list(simplexes) + [(v,) for v in vertices])
        return cls(vertices, closed)

    @property
    def dim(self) -> int:
        return max(len(s) for s in self.simplexes) - 1

    def vertex_index(self, v: str) -> int:
        return self.vertices.index(v)

    def sorted_simplexes(self) -> list[Simplex]:
        return sorted(self.simplexes, key=lambda s: (len(s), s))

    def maximal_simplexes(self) -> list[Simplex]:
        out = []
        for s in self.sorted_simplexes():
            sset = set(s)
            if not any(sset < set(t) for t in self.simplexes):
                out.append(s)
        return out


def parse_complex(text: str) -> SimplicialComplex:
    vertices: list[str] = []
    seen: set[str] = set()
    simplexes: list[tuple[str, ...]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind, args = parts[0], parts[1:]
        if kind == "v":
            if len(args) != 1:
                raise ParseError(lineno, "vertex line needs exactly one id")
            if args[0] in seen:
                raise ParseError(lineno, f"duplicate vertex {args[0]!r}")
            seen.add(args[0])
            vertices.append(args[0])
        elif kind == "s":
            if not args:
                raise ParseError(lineno, "empty simplex")
            if len(set(args)) != len(args):
                raise ParseError(lineno, "duplicate vertex in simplex")
            for v in args:
                if v not in seen:
                    raise ParseError(lineno, f"unknown vertex {v!r}")
            simplexes.append(tuple(args))
        else:
            raise ParseError(lineno, f"malformed line {raw!r}")
    return SimplicialComplex.from_simplexes(vertices, simplexes)


def format_complex(k: SimplicialComplex) -> str:
    lines = [f"v {v}" for v in k.vertices]
    lines += [f"s {' '.join(s)}" for s in sorted(k.maximal_simplexes())]
    return "\n".join(lines) + "\n"


@dataclass
class PLMap:
    """Vertex-image assignment into R^m, extended affinely on simplexes."""

    m: int
    images: dict[str, Vec]
    certificate: Optional[GenericityCertificate] = None

    @property
    def certified(self) -> bool:
        return self.certificate is not None and self.certificate.ok


def parse_map(text: str) -> PLMap:
    m: Optional[int] = None
    images: dict[str, Vec] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind, args = parts[0], parts[1:]
        if kind == "m":
            if m is not None:
                raise ParseError(lineno, "duplicate header")
            if len(args) != 1 or not args[0].isdigit():
                raise ParseError(lineno, "header needs one count")
            m = int(args[0])
        elif kind == "p":
            if m is None:
                raise ParseError(lineno, "point before header")
            if len(args) != m + 1:
                raise ParseError(lineno, f"expected id plus {m} coordinates")
            if args[0] in images:
                raise ParseError(lineno, f"duplicate point for {args[0]!r}")
            try:
                images[args[0]] = vec(parse_rational(x) for x in args[1:])
            except ValueError as exc:
                raise ParseError(lineno, str(exc)) from exc
        else:
            raise ParseError(lineno, f"malformed line {raw!r}")
    if m is None:
        raise ParseError(1, "missing header")
    return PLMap(m, images)


def format_map(g: PLMap) -> str:
    lines = [f"m {g.m}"]
    for v, point in g.images.items():
        coords = " ".join(format_rational(x) for x in point)
        lines.append(f"p {v} {coords}")
    return "\n".join(lines) + "\n"


def _gram_det(rows: list[Vec]) -> Fraction:
    """det(D D^T); nonzero iff the rows are linearly independent."""
    from .ratmath import vec_dot
    n = len(rows)
    gram = [[vec_dot(rows[i], rows[j]) for j in range(n)] for i in range(n)]
    # cofactor expansion; n stays tiny (simplex size - 1)
    def det(m):
        if len(m) == 1:
            return m[0][0]
        total = Fraction(0)
        for j, head in enumerate(m[0]):
            if head == 0:
                continue
            minor = [r[:j] + r[j + 1:] for r in m[1:]]
            total += (-1) ** j * head * det(minor)
        return total
    return det(gram)


def generic_position_transcript(k: SimplicialComplex,
                                images: dict[str, Vec]) -> list[tuple[str, Fraction]]:
    """Nonvanishing conditions behind the PL map invariants.

    Pairwise differences of all |V|*m coordinates, and the Gram determinant
    of every simplex's difference matrix (affine independence).
    """
    transcript: list[tuple[str, Fraction]] = []
    flat: list[tuple[str, Fraction]] = []
    for v in k.vertices:
        for s, x in enumerate(images[v], start=1):
            flat.append((f"{v}[{s}]", x))
    for (la, a), (lb, b) in itertools.combinations(flat, 2):
        transcript.append((f"coord {la} != {lb}", a - b))
    for simplex in k.sorted_simplexes():
        if len(simplex) < 2:
            continue
        base = images[simplex[0]]
        diffs = [vec_sub(images[v], base) for v in simplex[1:]]
        transcript.append((f"simplex {' '.join(simplex)} affinely independent",
                           _gram_det(diffs)))
    return transcript


def certify_map(k: SimplicialComplex, g: PLMap) -> PLMap:
    """Recompute the genericity certificate of g against complex k."""
    for v in k.vertices:
        if v not in g.images:
            raise ValueError(f"map lacks vertex {v!r}")
    cert = certify(generic_position_transcript(k, g.images))
    return PLMap(g.m, dict(g.images), cert)


def roberts_perturb(k: SimplicialComplex, theta: PLMap, eps: Fraction,
                    pool: GenericPool) -> PLMap:
    """Move every vertex image into certified general position, within eps.

    Coordinate s of vertex number i (1-based, first-appearance order) is
    drawn from stream (i-1)*m + s.  The Euclidean distance from each old
    image to its replacement is verified below eps by exact squared
    comparison.  On certificate failure the draw is regenerated from seed+1,
    then seed+2; after that a :class:`GenericityError` is raised.
    """
    eps = as_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    m = theta.m
    for v in k.vertices:
        if v not in theta.images:
            raise ValueError(f"map lacks vertex {v!r}")
    per_coord = eps / m  # sum of m squares each < (eps/m)^2 stays < eps^2
    for attempt in range(PERTURB_ATTEMPTS):
        attempt_pool = pool if attempt == 0 else GenericPool(pool.seed + attempt)
        images: dict[str, Vec] = {}
        for i, v in enumerate(k.vertices, start=1):
            target = theta.images[v]
            point = tuple(
                attempt_pool.draw_near(target[s - 1], per_coord, (i - 1) * m + s)
                for s in range(1, m + 1)
            )
            if dist_sq(point, target) >= eps * eps:
                raise RuntimeError("perturbation left the eps ball")
            images[v] = point
        cert = certify(generic_position_transcript(k, images))
        if cert.ok:
            return PLMap(m, images, cert)
    raise GenericityError(
        f"certification failed {PERTURB_ATTEMPTS} times from seed {pool.seed}")


def image_point(g: PLMap, simplex: Simplex, barycentric: Sequence) -> Vec:
    """Affine extension: sum of barycentric weights times vertex images."""
    weights = vec(barycentric)
    if len(weights) != len(simplex):
        raise ValueError("barycentric length does not match simplex size")
    if sum(weights) != 1:
        raise ValueError("barycentric coordinates must sum to 1")
    point = tuple(Fraction(0) for _ in range(g.m))
    for w, v in zip(weights, simplex):
        point = tuple(p + w * c for p, c in zip(point, g.images[v]))
    return point


def simplexes_disjoint(k: SimplicialComplex, s1: Simplex, s2: Simplex) -> bool:
    """Vertex-set disjointness of two simplexes of k.

    For closed geometric simplexes of one complex this coincides with
    disjointness of the images under any certified PL map.
    """
    t1, t2 = tuple(sorted(s1)), tuple(sorted(s2))
    if t1 not in k.simplexes or t2 not in k.simplexes:
        raise ValueError("simplex does not belong to the complex")
    return not set(t1) & set(t2)
