"""Exact rational linear algebra.

Everything in this package runs on `fractions.Fraction`; no floats enter any
decision.  This module supplies the substrate: dense matrices with
fraction-free rank computation, affine solves with nullspace bases, affine
hulls and intersections, exact linear-programming feasibility (phase-1
simplex with Bland's rule), and real-root existence for univariate
polynomials via Sturm sequences.

All values are immutable after construction and every operation is a pure
function, so everything here is safe to use from concurrent tasks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Vec = tuple[Fraction, ...]

_ZERO = Fraction(0)
_ONE = Fraction(1)

_RATIONAL_RE = re.compile(r"[+-]?\d+(?:/\d+)?")


def parse_rational(text: str) -> Fraction:
    """Parse the canonical rational text form: "-7/3", "5".

    The denominator part is optional and must be a positive decimal integer;
    "1/0" is rejected.  No whitespace, no decimals, no exponents.
    """
    if not _RATIONAL_RE.fullmatch(text):
        raise ValueError(f"not a rational literal: {text!r}")
    if "/" in text:
        num, den = text.split("/")
        if int(den) == 0:
            raise ValueError(f"zero denominator: {text!r}")
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def format_rational(x: Fraction) -> str:
    """Inverse of :func:`parse_rational`; omits the denominator when it is 1."""
    return str(x)


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Fraction")


def vec(items: Iterable) -> Vec:
    return tuple(as_fraction(x) for x in items)


def vec_add(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b, strict=True))


def vec_sub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b, strict=True))


def vec_scale(c: Fraction, a: Vec) -> Vec:
    return tuple(c * x for x in a)


def vec_dot(a: Vec, b: Vec) -> Fraction:
    return sum((x * y for x, y in zip(a, b, strict=True)), _ZERO)


def dist_sq(a: Vec, b: Vec) -> Fraction:
    return sum(((x - y) ** 2 for x, y in zip(a, b, strict=True)), _ZERO)


def unit_vec(m: int, j: int) -> Vec:
    """Standard basis vector e_j of length m, 1-based index."""
    if not 1 <= j <= m:
        raise ValueError(f"unit vector index {j} out of range 1..{m}")
    return tuple(_ONE if i == j else _ZERO for i in range(1, m + 1))


@dataclass(frozen=True)
class Mat:
    """Dense rational matrix, row-major."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "Mat":
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        flat = []
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
            flat.extend(as_fraction(x) for x in r)
        return cls(nrows, ncols, tuple(flat))

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls(n, n, tuple(_ONE if i == j else _ZERO
                               for i in range(n) for j in range(n)))

    def at(self, i: int, j: int) -> Fraction:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vec:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def row_lists(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]


def mat_rank(a: Mat) -> int:
    """Exact rank over the rationals.

    Fraction-free Bareiss elimination with first-nonzero pivoting; the pivot
    choice is deterministic so repeated runs take identical paths.
    """
    m = a.row_lists()
    nrows, ncols = a.rows, a.cols
    prev = _ONE
    rank = 0
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if pivot_row is None:
            continue
        if pivot_row != r:
            m[r], m[pivot_row] = m[pivot_row], m[r]
        for i in range(r + 1, nrows):
            for j in range(c + 1, ncols):
                m[i][j] = (m[r][c] * m[i][j] - m[i][c] * m[r][j]) / prev
            m[i][c] = _ZERO
        prev = m[r][c]
        rank += 1
        r += 1
        if r == nrows:
            break
    return rank


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form in place semantics on a copy; returns (rows, pivot columns)."""
    rows = [list(r) for r in rows]
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def solve_affine(a: Mat, b: Sequence) -> Optional[tuple[Vec, tuple[Vec, ...]]]:
    """Solve a x = b exactly.

    Returns (particular solution, basis of the homogeneous solution space),
    or None when the system is inconsistent.  Free variables are set to zero
    in the particular solution; the nullspace basis is the standard one per
    free column, so the output is deterministic.
    """
    b = vec(b)
    if len(b) != a.rows:
        raise ValueError("rhs length does not match row count")
    aug = [list(a.row(i)) + [b[i]] for i in range(a.rows)]
    rows, pivots = _rref(aug)
    if a.cols in pivots:
        return None  # pivot in the augmented column: 0 = nonzero
    particular = [_ZERO] * a.cols
    for r, c in enumerate(pivots):
        particular[c] = rows[r][-1]
    free_cols = [c for c in range(a.cols) if c not in pivots]
    basis = []
    for f in free_cols:
        v = [_ZERO] * a.cols
        v[f] = _ONE
        for r, c in enumerate(pivots):
            v[c] = -rows[r][f]
        basis.append(tuple(v))
    return tuple(particular), tuple(basis)


def nullspace_basis(rows: Sequence[Sequence[Fraction]], ncols: int) -> tuple[Vec, ...]:
    """Basis of {x : rows . x = 0}."""
    if not rows:
        return tuple(unit_vec(ncols, j + 1) for j in range(ncols))
    red, pivots = _rref([list(r) for r in rows])
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        v = [_ZERO] * ncols
        v[f] = _ONE
        for r, c in enumerate(pivots):
            v[c] = -red[r][f]
        basis.append(tuple(v))
    return tuple(basis)


def independent_subset(vectors: Sequence[Vec]) -> list[int]:
    """Indices of a maximal independent subset, scanning left to right."""
    kept: list[int] = []
    staged: list[list[Fraction]] = []
    for idx, v in enumerate(vectors):
        trial = staged + [list(v)]
        if len(_rref(trial)[1]) == len(trial):
            staged = trial
            kept.append(idx)
    return kept


@dataclass(frozen=True)
class AffineSubspace:
    """Affine flat: basepoint + span(directions), directions independent."""

    ambient_dim: int
    basepoint: Vec
    directions: tuple[Vec, ...]

    def __post_init__(self):
        if len(self.basepoint) != self.ambient_dim:
            raise ValueError("basepoint has wrong length")
        for d in self.directions:
            if len(d) != self.ambient_dim:
                raise ValueError("direction has wrong length")
        if self.directions:
            got = len(_rref([list(d) for d in self.directions])[1])
            if got != len(self.directions):
                raise ValueError("directions are linearly dependent")

    @property
    def dim(self) -> int:
        return len(self.directions)

    def contains(self, point: Sequence) -> bool:
        point = vec(point)
        diff = vec_sub(point, self.basepoint)
        if not self.directions:
            return all(x == 0 for x in diff)
        cols = Mat.from_rows([[d[i] for d in self.directions]
                              for i in range(self.ambient_dim)])
        return solve_affine(cols, diff) is not None


def same_flat(p: AffineSubspace, q: AffineSubspace) -> bool:
    if p.ambient_dim != q.ambient_dim or p.dim != q.dim:
        return False
    return (q.contains(p.basepoint)
            and all(q.contains(vec_add(p.basepoint, d)) for d in p.directions))


def affine_hull(points: Sequence[Sequence], m: int) -> AffineSubspace:
    """Smallest affine flat containing the points."""
    if not points:
        raise ValueError("affine hull of an empty point set is undefined")
    pts = [vec(p) for p in points]
    for p in pts:
        if len(p) != m:
            raise ValueError("point has wrong length")
    base = pts[0]
    diffs = [vec_sub(p, base) for p in pts[1:]]
    red, pivots = _rref([list(d) for d in diffs]) if diffs else ([], [])
    dirs = tuple(tuple(red[r]) for r in range(len(pivots)))
    return AffineSubspace(m, base, dirs)


def affine_intersect(p: AffineSubspace, q: AffineSubspace) -> Optional[AffineSubspace]:
    """Exact intersection flat of two affine subspaces, or None when empty."""
    if p.ambient_dim != q.ambient_dim:
        raise ValueError("ambient dimensions differ")
    m = p.ambient_dim
    kp, kq = p.dim, q.dim
    # basepoint_p + D_p u = basepoint_q + D_q v
    a = Mat.from_rows([
        [p.directions[j][i] for j in range(kp)] +
        [-q.directions[j][i] for j in range(kq)]
        for i in range(m)
    ])
    rhs = vec_sub(q.basepoint, p.basepoint)
    sol = solve_affine(a, rhs)
    if sol is None:
        return None
    particular, basis = sol
    point = p.basepoint
    for j in range(kp):
        point = vec_add(point, vec_scale(particular[j], p.directions[j]))
    dirs = []
    for v in basis:
        d = tuple(sum((v[j] * p.directions[j][i] for j in range(kp)), _ZERO)
                  for i in range(m))
        dirs.append(d)
    if dirs:
        red, pivots = _rref([list(d) for d in dirs])
        dirs = [tuple(red[r]) for r in range(len(pivots))]
    return AffineSubspace(m, point, tuple(dirs))


def lp_feasible(eq: Mat, eq_rhs: Sequence,
                nonneg_vars: Iterable[int]) -> Optional[Vec]:
    """Exact feasibility of {x : eq x = rhs, x_i >= 0 for i in nonneg_vars}.

    Phase-1 simplex with Bland's rule; returns a witness satisfying every
    constraint exactly, or None.  Variables not listed in nonneg_vars are
    free (internally split into positive and negative parts).
    """
    rhs = vec(eq_rhs)
    if len(rhs) != eq.rows:
        raise ValueError("rhs length does not match row count")
    nonneg = set(nonneg_vars)
    for i in nonneg:
        if not 0 <= i < eq.cols:
            raise ValueError(f"nonneg index {i} out of range")

    columns: list[tuple[int, int]] = []  # (original var, sign)
    for i in range(eq.cols):
        columns.append((i, 1))
        if i not in nonneg:
            columns.append((i, -1))
    nstruct = len(columns)
    nrows = eq.rows

    tab: list[list[Fraction]] = []
    for r in range(nrows):
        row = [eq.at(r, i) * s for (i, s) in columns]
        brow = rhs[r]
        if brow < 0:
            row = [-x for x in row]
            brow = -brow
        art = [_ONE if k == r else _ZERO for k in range(nrows)]
        tab.append(row + art + [brow])
    ncols = nstruct + nrows  # structural + artificial
    basis = [nstruct + r for r in range(nrows)]

    # Phase-1 objective row: sum of artificials expressed through nonbasics.
    obj = [sum((tab[r][j] for r in range(nrows)), _ZERO) for j in range(ncols + 1)]
    for r in range(nrows):
        obj[nstruct + r] = _ZERO

    while True:
        enter = next((j for j in range(nstruct) if obj[j] > 0), None)
        if enter is None:
            break
        pivot_row = None
        best_ratio = None
        for r in range(nrows):
            coeff = tab[r][enter]
            if coeff > 0:
                ratio = tab[r][-1] / coeff
                if (best_ratio is None or ratio < best_ratio
                        or (ratio == best_ratio and basis[r] < basis[pivot_row])):
                    best_ratio = ratio
                    pivot_row = r
        if pivot_row is None:
            # Phase-1 objective is bounded below by 0, so this cannot happen.
            raise RuntimeError("unbounded phase-1 simplex")
        pv = tab[pivot_row][enter]
        tab[pivot_row] = [x / pv for x in tab[pivot_row]]
        for r in range(nrows):
            if r != pivot_row and tab[r][enter] != 0:
                f = tab[r][enter]
                tab[r] = [x - f * y for x, y in zip(tab[r], tab[pivot_row])]
        if obj[enter] != 0:
            f = obj[enter]
            obj = [x - f * y for x, y in zip(obj, tab[pivot_row])]
        basis[pivot_row] = enter

    if obj[-1] != 0:
        return None

    values = [_ZERO] * nstruct
    for r in range(nrows):
        if basis[r] < nstruct:
            values[basis[r]] = tab[r][-1]
    witness = [_ZERO] * eq.cols
    for k, (i, s) in enumerate(columns):
        witness[i] += s * values[k]
    witness = tuple(witness)

    for r in range(eq.rows):  # exactness is cheap; fail loudly on any bug
        if vec_dot(eq.row(r), witness) != rhs[r]:
            raise RuntimeError("simplex produced an inexact witness")
    for i in nonneg:
        if witness[i] < 0:
            raise RuntimeError("simplex violated a sign constraint")
    return witness


# ---------------------------------------------------------------------------
# Univariate polynomials (coefficient tuples, ascending degree) and Sturm.

Poly = tuple[Fraction, ...]


def poly(coeffs: Iterable) -> Poly:
    """Normalize to the invariant: no trailing zero coefficients."""
    c = [as_fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def poly_degree(p: Poly) -> int:
    return len(p) - 1  # zero polynomial -> -1


def poly_eval(p: Poly, x: Fraction) -> Fraction:
    acc = _ZERO
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return poly((p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0)
                for i in range(n))


def poly_scale(c, p: Poly) -> Poly:
    return poly(as_fraction(c) * x for x in p)


def poly_mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [_ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return poly(out)


def poly_sub(p: Poly, q: Poly) -> Poly:
    return poly_add(p, poly_scale(-1, q))


def poly_deriv(p: Poly) -> Poly:
    return poly(i * p[i] for i in range(1, len(p)))


def poly_divmod(f: Poly, g: Poly) -> tuple[Poly, Poly]:
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [_ZERO] * max(len(f) - len(g) + 1, 0)
    rem = list(f)
    dg = len(g) - 1
    lead = g[-1]
    while len(rem) - 1 >= dg and any(x != 0 for x in rem):
        while rem and rem[-1] == 0:
            rem.pop()
        if len(rem) - 1 < dg:
            break
        shift = len(rem) - 1 - dg
        factor = rem[-1] / lead
        quot[shift] = factor
        for i in range(len(g)):
            rem[shift + i] -= factor * g[i]
        rem.pop()
    return poly(quot), poly(rem)


def poly_gcd(f: Poly, g: Poly) -> Poly:
    a, b = f, g
    while b:
        a, b = b, poly_divmod(a, b)[1]
    if a:
        a = poly_scale(1 / a[-1], a)  # monic
    return a


def square_free_part(p: Poly) -> Poly:
    if poly_degree(p) < 1:
        return p
    g = poly_gcd(p, poly_deriv(p))
    if poly_degree(g) < 1:
        return p
    return poly_divmod(p, g)[0]


def _sturm_chain(p: Poly) -> list[Poly]:
    chain = [p]
    d = poly_deriv(p)
    if d:
        chain.append(d)
        while poly_degree(chain[-1]) > 0:
            rem = poly_divmod(chain[-2], chain[-1])[1]
            if not rem:
                break
            chain.append(poly_scale(-1, rem))
    return chain


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _sign_at(p: Poly, x: Optional[Fraction], end: int) -> int:
    """Sign of p at x, or at -inf/+inf when x is None (end = -1 or +1)."""
    if not p:
        return 0
    if x is not None:
        return _sign(poly_eval(p, x))
    lead = _sign(p[-1])
    if end > 0:
        return lead
    return lead if poly_degree(p) % 2 == 0 else -lead


def _variations(chain: list[Poly], x: Optional[Fraction], end: int) -> int:
    signs = [s for s in (_sign_at(p, x, end) for p in chain) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a * b < 0)


def sturm_root_exists(p: Poly, lo: Optional[Fraction] = None,
                      hi: Optional[Fraction] = None) -> bool:
    """True iff p has a real root in [lo, hi] (side unbounded when None).

    Decided by Sturm's theorem with exact sign counts; multiple roots are
    handled (the chain terminates at the gcd, counting distinct roots).
    """
    p = poly(p)
    if not p:
        if lo is None and hi is None:
            raise ValueError("zero polynomial with both bounds absent")
        if lo is not None and hi is not None and lo > hi:
            raise ValueError("empty interval")
        return True
    if lo is not None and hi is not None and lo > hi:
        raise ValueError("empty interval")
    if lo is not None and poly_eval(p, lo) == 0:
        return True
    if hi is not None and poly_eval(p, hi) == 0:
        return True
    if poly_degree(p) == 0:
        return False
    chain = _sturm_chain(p)
    va = _variations(chain, lo, -1)
    vb = _variations(chain, hi, +1)
    return va - vb > 0


def sturm_count(p: Poly, lo: Optional[Fraction] = None,
                hi: Optional[Fraction] = None) -> int:
    """Number of distinct real roots in (lo, hi]; endpoints None = unbounded."""
    p = poly(p)
    if poly_degree(p) < 1:
        return 0
    chain = _sturm_chain(p)
    return _variations(chain, lo, -1) - _variations(chain, hi, +1)


def cauchy_root_bound(p: Poly) -> Fraction:
    """B with every real root of p in [-B, B]."""
    p = poly(p)
    if poly_degree(p) < 1:
        return _ONE
    lead = abs(p[-1])
    return _ONE + max(abs(c) for c in p[:-1]) / lead


def simplest_between(a: Fraction, b: Fraction) -> Fraction:
    """The rational with smallest denominator in [a, b] (Stern-Brocot walk)."""
    if a > b:
        raise ValueError("empty interval")
    if a <= 0 <= b:
        return _ZERO
    if b < 0:
        return -simplest_between(-b, -a)
    fa = a.numerator // a.denominator
    if Fraction(fa) == a:
        return Fraction(fa)
    if b >= fa + 1:
        return Fraction(fa + 1)
    return fa + 1 / simplest_between(1 / (b - fa), 1 / (a - fa))
