"""Exact integer lattice arithmetic for pointed rational cones.

Everything here works with plain Python integers (and ``Fraction`` where a
rational is unavoidable), so nothing overflows when coordinates get scaled
by large prime powers.  Matrices are tuples of row tuples.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, floor, ceil
from typing import Optional, Sequence

from .errors import InfiniteIndex, NotFullDimensional, NotPointed, RankDeficient

Vector = tuple
Matrix = tuple


def primitive(v):
    """Scale a rational vector to the primitive integer vector on its ray."""
    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def dot(a, x):
    return sum(ai * xi for ai, xi in zip(a, x))


def matvec(A, x):
    return tuple(dot(row, x) for row in A)


def transpose(A):
    return tuple(zip(*A))


def rank(rows) -> int:
    """Rank over Q by fraction Gaussian elimination."""
    M = [[Fraction(x) for x in row] for row in rows]
    if not M:
        return 0
    r = 0
    ncols = len(M[0])
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(r + 1, len(M)):
            if M[i][c] != 0:
                f = M[i][c] / M[r][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
        if r == len(M):
            break
    return r


def det(rows) -> int:
    """Determinant of a square integer matrix (Bareiss, fraction-free)."""
    M = [list(row) for row in rows]
    n = len(M)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def solve(rows, rhs):
    """Solve a square nonsingular system exactly; None if singular."""
    n = len(rows)
    M = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(rows, rhs)]
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            return None
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return tuple(M[i][n] for i in range(n))


def inverse(rows):
    n = len(rows)
    cols = [solve(rows, [1 if i == j else 0 for i in range(n)]) for j in range(n)]
    if any(c is None for c in cols):
        raise ValueError("singular matrix")
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


def _normal(vectors, d):
    # generalized cross product: zero iff the d-1 vectors are dependent
    out = []
    for j in range(d):
        minor = [v[:j] + v[j + 1:] for v in vectors]
        out.append((-1) ** j * det(minor))
    return tuple(out)


def _supporting_normals(vectors, d):
    """Primitive normals n with <n, v> >= 0 on all vectors, vanishing on d-1
    independent ones."""
    vectors = [tuple(v) for v in vectors]
    if d == 1:
        signs = {(v[0] > 0) - (v[0] < 0) for v in vectors} - {0}
        return tuple((s,) for s in sorted(signs)) if len(signs) == 1 else ()
    found = set()
    for subset in itertools.combinations(vectors, d - 1):
        n = _normal(list(subset), d)
        if not any(n):
            continue
        n = primitive(n)
        pairings = [dot(n, v) for v in vectors]
        if all(x >= 0 for x in pairings):
            found.add(n)
        elif all(x <= 0 for x in pairings):
            found.add(tuple(-x for x in n))
    return tuple(sorted(found))


def facet_normals(rays) -> Matrix:
    """Primitive inner facet normals of cone(rays), sorted lexicographically."""
    rays = [tuple(int(x) for x in r) for r in rays]
    if not rays:
        raise NotFullDimensional("no rays")
    d = len(rays[0])
    if rank(rays) < d:
        raise NotFullDimensional(f"rays span a proper subspace of Q^{d}")
    A = _supporting_normals(rays, d)
    if not A or rank(A) < d:
        raise NotPointed("cone contains a line")
    return A


def rays_from_facets(A) -> Matrix:
    """Extreme rays of {x : Ax >= 0}, primitive and sorted."""
    A = [tuple(row) for row in A]
    d = len(A[0])
    if rank(A) < d:
        raise NotPointed("facet normals do not span")
    return _supporting_normals(A, d)


@dataclass(frozen=True)
class ConeData:
    """Full-dimensional pointed cone in Q^d with its facet description."""

    dim: int
    rays: Matrix
    facets: Matrix
    label: str = ""

    @classmethod
    def from_rays(cls, rays, label=""):
        A = facet_normals(rays)
        extreme = rays_from_facets(A)
        return cls(len(A[0]), extreme, A, label)

    @classmethod
    def from_inequalities(cls, A, label=""):
        A = [primitive(row) for row in A]
        d = len(A[0])
        if rank(A) < d:
            raise NotPointed("inequalities do not cut out a pointed cone")
        rays = rays_from_facets(A)
        if not rays or rank(rays) < d:
            raise NotFullDimensional("inequalities cut out a lower-dimensional cone")
        return cls.from_rays(rays, label)

    @property
    def m(self):
        return len(self.facets)

    def contains(self, x):
        return all(dot(a, x) >= 0 for a in self.facets)

    def is_smooth(self):
        """Simplicial with a unimodular ray basis."""
        return len(self.rays) == self.dim and abs(det(self.rays)) == 1


def orthant(d, label=None):
    rays = tuple(tuple(int(i == j) for j in range(d)) for i in range(d))
    return ConeData(d, rays, tuple(sorted(rays)), label or f"A{d}")


# -- Hermite normal form ---------------------------------------------------

def _xgcd(a, b):
    """(g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    sa, sb = (-1 if a < 0 else 1), (-1 if b < 0 else 1)
    a, b = abs(a), abs(b)
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, sa * x0, sb * y0


def column_hnf(A):
    """Lower column-echelon Hermite form.

    Returns ``(W, U, pivots)`` with ``A U = W``, ``U`` unimodular, and
    ``pivots`` the list of ``(row, col)`` pivot positions.  Column ``j`` of
    ``W`` vanishes above its pivot row, pivots are positive and entries left
    of a pivot are reduced into ``[0, pivot)``.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    W = [list(row) for row in A]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(c1, c2, a, b, c, d):
        # (col c1, col c2) <- (a*c1 + b*c2, c*c1 + d*c2)
        for M in (W, U):
            for row in M:
                x, y = row[c1], row[c2]
                row[c1], row[c2] = a * x + b * y, c * x + d * y

    pivots = []
    c = 0
    for i in range(m):
        if c == n:
            break
        for j in range(c + 1, n):
            if W[i][j] == 0:
                continue
            a, b = W[i][c], W[i][j]
            g, s, t = _xgcd(a, b)
            colop(c, j, s, t, -b // g, a // g)
        if W[i][c] == 0:
            continue
        if W[i][c] < 0:
            for M in (W, U):
                for row in M:
                    row[c] = -row[c]
        piv = W[i][c]
        for j in range(c):
            f = W[i][j] // piv
            if f:
                colop(j, c, 1, -f, 0, 1)
        pivots.append((i, c))
        c += 1
    return (tuple(tuple(r) for r in W), tuple(tuple(r) for r in U), tuple(pivots))


@lru_cache(maxsize=None)
def _hnf_cached(A):
    return column_hnf(A)


def hnf_coset_reduce(b, A):
    """Canonical representative of the coset ``b + A Z^d`` in ``Z^m``.

    After reduction every pivot row entry of the result lies in
    ``[0, pivot)``; this pins down the coset uniquely.
    """
    A = tuple(tuple(int(x) for x in row) for row in A)
    d = len(A[0])
    W, _, pivots = _hnf_cached(A)
    if len(pivots) < d:
        raise RankDeficient(f"facet matrix has rank {len(pivots)} < {d}")
    b = [int(x) for x in b]
    for r, j in pivots:
        f = b[r] // W[r][j]
        if f:
            for i in range(len(b)):
                b[i] -= f * W[i][j]
    return tuple(b)


# -- point enumeration -----------------------------------------------------

@lru_cache(maxsize=None)
def _enumeration_frame(A):
    d = len(A[0])
    for S in itertools.combinations(range(len(A)), d):
        rows = tuple(A[i] for i in S)
        if det(rows) != 0:
            W, U, _ = column_hnf(rows)
            return S, W, U
    raise RankDeficient("facet matrix has rank < d")


def enumerate_points(A, b, N):
    """All integer x with ``b_i <= <a_i, x> <= b_i + N``, sorted.

    A square subsystem ``A_S`` is put in lower Hermite form ``A_S U = W``;
    lattice points of ``W Z^d`` inside the box are walked triangularly and
    pulled back through ``U``.
    """
    A = tuple(tuple(int(x) for x in row) for row in A)
    b = tuple(int(x) for x in b)
    if N < 0:
        return []
    S, W, U = _enumeration_frame(A)
    d = len(A[0])
    lo = [b[i] for i in S]
    hi = [b[i] + N for i in S]
    out = []

    def walk(k, w, partial):
        if k == d:
            x = tuple(sum(U[r][c] * w[c] for c in range(d)) for r in range(d))
            if all(b[i] <= dot(A[i], x) <= b[i] + N for i in range(len(A))):
                out.append(x)
            return
        piv = W[k][k]
        base = partial[k]
        wmin = ceil(Fraction(lo[k] - base, piv))
        wmax = floor(Fraction(hi[k] - base, piv))
        for wk in range(wmin, wmax + 1):
            nxt = [partial[r] + W[r][k] * wk for r in range(d)]
            walk(k + 1, w + [wk], nxt)

    walk(0, [], [0] * d)
    out.sort()
    return out


def polyhedron_vertices(A, b):
    """Vertices of the pointed polyhedron {Ax >= b} (rational)."""
    d = len(A[0])
    verts = set()
    for S in itertools.combinations(range(len(A)), d):
        x = solve([A[i] for i in S], [b[i] for i in S])
        if x is None:
            continue
        if all(dot(A[i], x) >= b[i] for i in range(len(A))):
            verts.add(x)
    return sorted(verts)


# -- sublattices -----------------------------------------------------------

@dataclass(frozen=True)
class LatticePresentation:
    """A finite-index sublattice of Z^d, by basis columns or one congruence.

    With ``modulus`` n and ``weights`` a the lattice is
    ``{v : sum a_i v_i = 0 mod n}``.  With neither form it is Z^d.
    """

    dim: int
    basis: Optional[Matrix] = None
    modulus: Optional[int] = None
    weights: Optional[tuple] = None

    def __post_init__(self):
        if self.basis is not None and self.modulus is not None:
            raise ValueError("give either a basis or a congruence, not both")
        if self.modulus is not None:
            if self.modulus < 1:
                raise ValueError("modulus must be positive")
            if self.weights is None or len(self.weights) != self.dim:
                raise ValueError("weights must have one entry per coordinate")

    def index(self):
        return abs(det(sublattice_basis(self)))


def sublattice_basis(pres: LatticePresentation) -> Matrix:
    """Canonical (Hermite) basis of the sublattice, basis vectors as columns."""
    d = pres.dim
    if pres.modulus is not None:
        # kernel of (a | -n) on Z^{d+1}, projected to the first d coordinates
        row = (tuple(int(a) for a in pres.weights) + (-int(pres.modulus),),)
        _, U, _ = column_hnf(row)
        gens = tuple(tuple(U[i][j] for j in range(1, d + 1)) for i in range(d))
    elif pres.basis is not None:
        gens = tuple(tuple(int(x) for x in r) for r in pres.basis)
    else:
        gens = tuple(tuple(int(i == j) for j in range(d)) for i in range(d))
    if len(gens) != d or rank(gens) < d:
        raise InfiniteIndex("sublattice has infinite index")
    W, _, _ = column_hnf(gens)
    return W


def normalize_lattice(pres: LatticePresentation, rays, label=""):
    """Rewrite cone(rays) in coordinates where the sublattice becomes Z^d.

    Returns ``(U, cone)`` where ``U = B^{-1}`` for the canonical basis
    ``B`` of the sublattice, so ``U L = Z^d``; the new rays are the
    primitive images ``U r`` and the facets are recomputed from them.
    """
    B = sublattice_basis(pres)
    U = inverse(B)
    new_rays = [primitive(matvec(U, r)) for r in rays]
    cone = ConeData.from_rays(new_rays, label)
    # facet normals pull back as rows of A·B; cross-check
    old = facet_normals(rays)
    pulled = tuple(sorted(primitive(matvec(transpose(B), a)) for a in old))
    assert pulled == cone.facets, (pulled, cone.facets)
    return U, cone
