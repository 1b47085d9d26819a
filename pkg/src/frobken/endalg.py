"""Hom modules, endomorphism algebras as lattice quivers, and degreewise
checks of the two Hom/tensor isomorphisms for equivalent modules.

Every graded piece of Hom(P, Q) between rank-one monomial modules is at most
one-dimensional, spanned by the monomial shift z with z + P ⊆ Q.  A tensor
product over End(M) is then spanned in degree z by pairs (summand k, shift)
modulo identifications, so its dimension is the number of connected
components of the identification graph; the checks compare that count with
the target dimension degree by degree inside a truncation window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import ConeMismatch, DuplicateClass, NotEquivalent
from .lattice import dot, enumerate_points
from .modules import MonomialModule, canonical_class, free_module

CERTIFIED = "CERTIFIED"
INCONCLUSIVE = "INCONCLUSIVE"
FAIL = "FAIL"


@dataclass(frozen=True)
class HomModule:
    source: MonomialModule
    target: MonomialModule
    module: MonomialModule

    @property
    def bound(self):
        return self.module.bound

    @property
    def source_class(self):
        return canonical_class(self.source)

    @property
    def target_class(self):
        return canonical_class(self.target)

    def contains(self, z):
        return self.module.contains(z)

    def contains_by_definition(self, z):
        """z + (generators of source) ⊆ target, checked pointwise."""
        return all(self.target.contains(tuple(a + b for a, b in zip(g, z))) for g in self.source.generators)

    def window(self, N):
        return self.module.points(N)

    def degree_dimension(self, z):
        return int(self.contains(z))


def hom_module(src: MonomialModule, tgt: MonomialModule) -> HomModule:
    if src.cone != tgt.cone:
        raise ConeMismatch("Hom between modules on different cones")
    b = tuple(t - s for s, t in zip(src.tight, tgt.tight))
    return HomModule(src, tgt, MonomialModule(src.cone, b))


def max_slack(M: MonomialModule, x):
    return max(dot(a, x) - bi for a, bi in zip(M.cone.facets, M.bound))


@dataclass
class EndAlgebra:
    """End(C_1 ⊕ ... ⊕ C_n) on multiplicity-free representatives.

    ``homs[i][j]`` is Hom(C_i, C_j); composition is vector addition.
    """

    representatives: list
    multiplicities: list
    homs: list = field(repr=False)
    generators: list = field(repr=False)
    closure_checked: bool = False

    @property
    def n(self):
        return len(self.representatives)

    @property
    def classes(self):
        return [canonical_class(C) for C in self.representatives]

    def closure_failures(self):
        bad = []
        n = self.n
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    for z in self.generators[i][j]:
                        for w in self.generators[j][k]:
                            s = tuple(a + b for a, b in zip(z, w))
                            if not self.homs[i][k].contains(s):
                                bad.append((i, j, k, z, w))
        return bad

    def to_dict(self):
        return {
            "n": self.n,
            "classes": [list(c.residue) for c in self.classes],
            "multiplicities": list(self.multiplicities),
            "cells": [
                {
                    "source": i,
                    "target": j,
                    "bound": list(self.homs[i][j].bound),
                    "generators": [list(g) for g in self.generators[i][j]],
                }
                for i in range(self.n)
                for j in range(self.n)
            ],
            "closure_checked": self.closure_checked,
        }


def build_end_algebra(classes, multiplicities=None) -> EndAlgebra:
    classes = list(classes)
    ids = [canonical_class(C) for C in classes]
    if len(set(ids)) != len(ids):
        raise DuplicateClass("representatives must be pairwise non-isomorphic")
    if multiplicities is None:
        multiplicities = [1] * len(classes)
    homs = [[hom_module(a, b) for b in classes] for a in classes]
    gens = [[h.module.generators for h in row] for row in homs]
    for i, C in enumerate(classes):
        assert homs[i][i].contains((0,) * C.cone.dim)
    E = EndAlgebra(classes, list(multiplicities), homs, gens)
    bad = E.closure_failures()
    if bad:
        raise AssertionError(f"composition closure fails on generators: {bad[:3]}")
    E.closure_checked = True
    return E


def degree_zero_dimension(C: MonomialModule, N: int = 4) -> int:
    """Dimension of End(C) in degree 0, and no invertible shift besides 0."""
    H = hom_module(C, C)
    units = [z for z in H.window(N) if H.contains(tuple(-x for x in z))]
    assert units == [(0,) * C.cone.dim], units
    return H.degree_dimension((0,) * C.cone.dim)


# -- Lemma checks ----------------------------------------------------------

@dataclass
class LemmaReport:
    kind: str
    box: int
    verdict: str
    checked: int = 0
    failures: list = field(default_factory=list)
    inconclusive: list = field(default_factory=list)
    dimension_rows: list = field(default_factory=list, repr=False)

    @property
    def counts_match(self):
        return all(src == tgt for *_, src, tgt in self.dimension_rows)

    def to_dict(self):
        return {
            "kind": self.kind,
            "box": self.box,
            "verdict": self.verdict,
            "checked_degrees": self.checked,
            "failures": self.failures,
            "inconclusive": self.inconclusive,
            "dimension_counts_match": self.counts_match,
        }


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def components(self):
        return len({self.find(a) for a in range(len(self.parent))})


def _tensor_check(kind, L, M, N, box):
    """Degreewise bijectivity of Hom(M,N) ⊗_{End M} Hom(L,M) -> Hom(L,N).

    Nodes in degree z are pairs (k, x) with x in Hom(M_k, N_l) and
    z - x in Hom(L_a, M_k); (k1, x1) ~ (k2, x2) when x1 - x2 lies in
    Hom(M_k1, M_k2).  For z in the box of Hom(L_a, N_l) every node has x in
    the box of Hom(M_k, N_l), so the node scan is exhaustive.
    """
    hMM = [[hom_module(a, b) for b in M] for a in M]
    rep = LemmaReport(kind, box, CERTIFIED)
    for a, La in enumerate(L):
        for l, Nl in enumerate(N):
            target = hom_module(La, Nl)
            gens = target.module.generators
            outside = [g for g in gens if max_slack(target.module, g) > box]
            for g in outside:
                rep.inconclusive.append({"source": a, "target": l, "degree": list(g)})
            hMN = [hom_module(Mk, Nl) for Mk in M]
            hLM = [hom_module(La, Mk) for Mk in M]
            windows = [h.window(box) for h in hMN]
            tdegrees = target.window(box)
            for z in tdegrees:
                rep.checked += 1
                tdim = int(target.contains_by_definition(z))
                nodes = []
                for k, h in enumerate(hMN):
                    for x in windows[k]:
                        w = tuple(zi - xi for zi, xi in zip(z, x))
                        if hLM[k].contains(w):
                            nodes.append((k, x))
                uf = _UnionFind(len(nodes))
                for i, (k1, x1) in enumerate(nodes):
                    for j in range(i + 1, len(nodes)):
                        k2, x2 = nodes[j]
                        d12 = tuple(u - v for u, v in zip(x1, x2))
                        if hMM[k1][k2].contains(d12) or hMM[k2][k1].contains(tuple(-v for v in d12)):
                            uf.union(i, j)
                sdim = uf.components() if nodes else 0
                rep.dimension_rows.append((a, l, z, sdim, tdim))
                if sdim != tdim:
                    rep.failures.append(
                        {"source": a, "target": l, "degree": list(z), "source_dim": sdim, "target_dim": tdim}
                    )
            # source-side scan: every composite lands in the target
            for k in range(len(M)):
                for x in windows[k]:
                    for w in hLM[k].window(box):
                        z = tuple(u + v for u, v in zip(x, w))
                        if max_slack(target.module, z) > box:
                            continue
                        if not target.contains_by_definition(z):
                            rep.failures.append(
                                {"source": a, "target": l, "degree": list(z), "source_dim": 1, "target_dim": 0}
                            )
    rep.failures.sort(key=lambda f: (f["source"], f["target"], f["degree"]))
    if rep.failures:
        rep.verdict = FAIL
    elif rep.inconclusive:
        rep.verdict = INCONCLUSIVE
    return rep


def _class_set(mods):
    return frozenset(canonical_class(m) for m in mods)


def verify_hom_tensor_surjectivity(L, M, N, box: int) -> LemmaReport:
    """Hom(M,N) ⊗_{End M} Hom(L,M) ≅ Hom(L,N), degreewise in the box."""
    if not (_class_set(L) == _class_set(M) == _class_set(N)):
        raise NotEquivalent("L, M, N must have the same summand classes")
    return _tensor_check("hom_tensor", list(L), list(M), list(N), box)


def verify_module_action_iso(M, N, box: int) -> LemmaReport:
    """Hom(M,N) ⊗_{End M} M ≅ N, degreewise in the box."""
    if _class_set(M) != _class_set(N):
        raise NotEquivalent("M and N must have the same summand classes")
    M = list(M)
    return _tensor_check("module_action", [free_module(M[0].cone)], M, list(N), box)
