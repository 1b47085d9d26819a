"""Monomial (conic) modules over an affine semigroup ring k[σ ∩ Z^d].

A module is the set of lattice points ``{x : Ax >= b}`` for the facet matrix
``A`` of σ.  Such modules are reflexive of rank one; isomorphism as
multigraded modules is translation of point sets, which is decided by
reducing the tight bound vector modulo ``A Z^d``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import ceil, floor
from typing import Optional

from .errors import BoxExhausted, ConeMismatch
from .lattice import (
    ConeData,
    dot,
    enumerate_points,
    hnf_coset_reduce,
    matvec,
    polyhedron_vertices,
    solve,
    _enumeration_frame,
)

DEFAULT_GENERATOR_CAP = 32


@dataclass(frozen=True, order=True)
class ClassId:
    """Isomorphism class of a rank-one monomial module."""

    residue: tuple
    cone: str = ""

    @property
    def is_free(self):
        return not any(self.residue)

    def __str__(self):
        tag = "free" if self.is_free else "[" + ",".join(map(str, self.residue)) + "]"
        return tag


@dataclass(frozen=True)
class MonomialModule:
    cone: ConeData
    bound: tuple
    shift: Optional[tuple] = None

    def contains(self, x):
        return all(dot(a, x) >= bi for a, bi in zip(self.cone.facets, self.bound))

    def points(self, N):
        return enumerate_points(self.cone.facets, self.bound, N)

    @property
    def generators(self):
        return minimal_generators(self)

    @property
    def tight(self):
        return tight_bound(self)

    @property
    def klass(self):
        return canonical_class(self)

    def translate(self, z):
        shift = None
        if self.shift is not None:
            shift = tuple(s + zi for s, zi in zip(self.shift, z))
        b = tuple(bi + v for bi, v in zip(self.bound, matvec(self.cone.facets, z)))
        return MonomialModule(self.cone, b, shift)


def from_shift(t, cone: ConeData) -> MonomialModule:
    """Con(t): lattice points of the translate t + σ."""
    t = tuple(Fraction(x) for x in t)
    b = tuple(ceil(v) for v in matvec(cone.facets, t))
    return MonomialModule(cone, b, t)


def free_module(cone: ConeData) -> MonomialModule:
    return from_shift((0,) * cone.dim, cone)


def generator_window_bound(cone: ConeData, b) -> int:
    """A priori slack bound for minimal generators of {Ax >= b}.

    Any lattice point is q + Σ λ_r r with q in the convex hull of the
    vertices and at most d rays; if some λ_r >= 1 the point is reducible by
    r.  So generator slacks on facet i are at most the vertex slack plus the
    d largest pairings of a_i with rays.
    """
    A, d = cone.facets, cone.dim
    verts = polyhedron_vertices(A, b)
    worst = 0
    for a, bi in zip(A, b):
        vslack = max(dot(a, v) for v in verts) - bi
        pair = sorted((dot(a, r) for r in cone.rays), reverse=True)[:d]
        worst = max(worst, floor(vslack + sum(pair)))
    return int(worst)


@lru_cache(maxsize=None)
def _generators(cone: ConeData, b: tuple, start: int, cap: int):
    A = cone.facets
    # the shell (max slack == N) must lie strictly beyond every generator
    need = generator_window_bound(cone, b) + 1
    if need > cap:
        raise BoxExhausted(
            f"generators of bound {list(b)} need window {need} > cap {cap}",
            bound=list(b), needed=need, cap=cap,
        )
    N = max(start, 1)
    while N < need:
        N = min(2 * N, cap)
    pts = enumerate_points(A, b, N)
    if not pts:
        raise BoxExhausted(f"no lattice points found for bound {list(b)}", bound=list(b))
    slack = {x: tuple(dot(a, x) - bi for a, bi in zip(A, b)) for x in pts}
    gens = []
    for x in sorted(pts, key=lambda y: (sum(slack[y]), y)):
        sx = slack[x]
        if not any(all(sg <= sv for sg, sv in zip(slack[g], sx)) for g in gens):
            gens.append(x)
    # shell sanity: every outer-shell point sits above an interior generator
    for x in pts:
        if max(slack[x]) == N:
            assert any(
                g != x and max(slack[g]) < N and all(sg <= sv for sg, sv in zip(slack[g], slack[x]))
                for g in gens
            ), (b, x)
    return tuple(sorted(gens)), N


def minimal_generators(M: MonomialModule, box: int = 4, cap: int = DEFAULT_GENERATOR_CAP):
    """Minimal generators of M over R, with certified completeness.

    The window doubles from ``box`` until it covers the a priori generator
    bound; past ``cap`` the search stops with BoxExhausted instead of
    returning a possibly truncated set.
    """
    return _generators(M.cone, M.bound, box, cap)[0]


def certified_window(M: MonomialModule, box: int = 4, cap: int = DEFAULT_GENERATOR_CAP) -> int:
    return _generators(M.cone, M.bound, box, cap)[1]


def tight_bound(M: MonomialModule) -> tuple:
    A = M.cone.facets
    gens = minimal_generators(M)
    return tuple(min(dot(a, g) for g in gens) for a in A)


@lru_cache(maxsize=None)
def _class_of(cone: ConeData, b: tuple) -> ClassId:
    tight = tight_bound(MonomialModule(cone, b))
    return ClassId(hnf_coset_reduce(tight, cone.facets), cone.label)


def canonical_class(M: MonomialModule) -> ClassId:
    return _class_of(M.cone, M.bound)


def translation_between(src: MonomialModule, tgt: MonomialModule):
    """Integral z with points(tgt) = points(src) + z, or None."""
    if src.cone != tgt.cone:
        raise ConeMismatch("modules live on different cones")
    A = src.cone.facets
    diff = tuple(b - a for a, b in zip(src.tight, tgt.tight))
    S, _, _ = _enumeration_frame(A)
    z = solve([A[i] for i in S], [diff[i] for i in S])
    if any(v.denominator != 1 for v in z):
        return None
    z = tuple(int(v) for v in z)
    if matvec(A, z) != diff:
        return None
    return z


@dataclass(frozen=True)
class Decomposition:
    """Multiset of isomorphism classes, e.g. of a Frobenius pushforward."""

    counts: tuple  # sorted ((ClassId, multiplicity), ...)
    cone: ConeData
    p: Optional[int] = None
    e: Optional[int] = None
    source: Optional[tuple] = None
    representatives: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        assert all(m > 0 for _, m in self.counts)

    @classmethod
    def from_counter(cls, counter, cone, representatives=None, **provenance):
        counts = tuple(sorted(counter.items()))
        return cls(counts, cone, representatives=dict(representatives or {}), **provenance)

    @property
    def total_rank(self):
        return sum(m for _, m in self.counts)

    @property
    def classes(self):
        return frozenset(c for c, _ in self.counts)

    def multiplicity(self, c):
        return dict(self.counts).get(c, 0)

    def counter(self):
        return Counter(dict(self.counts))

    def to_dict(self):
        return {
            "p": self.p,
            "e": self.e,
            "cone": self.cone.label,
            "total_rank": self.total_rank,
            "classes": [
                {"class": list(c.residue), "free": c.is_free, "multiplicity": m}
                for c, m in self.counts
            ],
        }


def is_equivalent(D1: Decomposition, D2: Decomposition) -> bool:
    """Same indecomposable classes, multiplicities ignored."""
    if D1.cone != D2.cone:
        raise ConeMismatch(f"{D1.cone.label!r} vs {D2.cone.label!r}")
    return D1.classes == D2.classes


def normalized_generators(M: MonomialModule):
    """Generator set translated so its lexicographically smallest element is 0."""
    gens = sorted(M.generators)
    g0 = gens[0]
    return tuple(tuple(a - b for a, b in zip(g, g0)) for g in gens)
