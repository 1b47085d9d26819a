"""Noncommutative blowups (End(M), M), their Frobenius bimodules, and
degreewise certificates of Kunz regularity and diagram compatibilities.

Representatives are multiplicity-free (Morita reduction); multiplicities are
carried as bookkeeping only.  All certificates are truncated to a window and
say so: CERTIFIED means every degree in the window checked out and every
relevant generator lies inside it.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional

from .endalg import (
    CERTIFIED,
    FAIL,
    INCONCLUSIVE,
    EndAlgebra,
    LemmaReport,
    build_end_algebra,
    hom_module,
    max_slack,
    verify_hom_tensor_surjectivity,
    verify_module_action_iso,
)
from .errors import CapExceeded, NotACover, NotFSteady, WildGroupOrder
from .frobenius import (
    DEFAULT_CAP,
    frobenius_pushforward,
    pushforward_composition_check,
    pushforward_of,
    residue_table,
    summand,
)
from .lattice import (
    ConeData,
    LatticePresentation,
    dot,
    matvec,
    normalize_lattice,
    orthant,
    sublattice_basis,
)
from .modules import (
    DEFAULT_GENERATOR_CAP,
    ClassId,
    Decomposition,
    MonomialModule,
    canonical_class,
    free_module,
    from_shift,
)
from .serialize import from_rational, rational


@dataclass
class CoverData:
    """Y = A^d over X = A^d / μ_n acting with the given weights."""

    n: int
    weights: tuple
    basis: tuple  # sublattice basis B (columns), original coordinates
    inverse: tuple  # U = B^{-1}: original -> cone coordinates
    characters: list  # (character, coset rep v in Z^d, offset s = U v)


@dataclass
class NCBlowup:
    cone: ConeData
    representatives: list
    multiplicities: list
    end_algebra: EndAlgebra = field(repr=False)
    origin: dict
    decomposition: Optional[Decomposition] = field(default=None, repr=False)
    cover: Optional[CoverData] = field(default=None, repr=False)

    @property
    def classes(self):
        return [canonical_class(C) for C in self.representatives]

    def as_decomposition(self):
        counts = Counter(dict(zip(self.classes, self.multiplicities)))
        return Decomposition.from_counter(counts, self.cone, dict(zip(self.classes, self.representatives)))

    def to_dict(self):
        return {
            "cone": self.cone.label,
            "origin": self.origin,
            "classes": [
                {
                    "class": list(c.residue),
                    "free": c.is_free,
                    "multiplicity": m,
                    "bound": list(C.bound),
                    "generators": [list(g) for g in C.generators],
                }
                for c, m, C in zip(self.classes, self.multiplicities, self.representatives)
            ],
            "end_algebra": self.end_algebra.to_dict(),
        }


def _check_cap(d, q, cap):
    if cap is not None and q ** d > cap:
        raise CapExceeded(f"q^d = {q}^{d} exceeds enumeration cap {cap}", q=q, d=d, cap=cap)


def build_dblowup(cone: ConeData, p: int, e0: int, *, cap=DEFAULT_CAP, workers=1) -> NCBlowup:
    """DB_{e0}(X) = NCB(F^{e0}_* R / R) on class representatives."""
    _check_cap(cone.dim, p ** e0, cap)
    D = frobenius_pushforward(free_module(cone), p, e0, cap=cap, workers=workers)
    reps = [D.representatives[c] for c, _ in D.counts]
    mults = [m for _, m in D.counts]
    E = build_end_algebra(reps, mults)
    return NCBlowup(cone, reps, mults, E, {"kind": "dblowup", "p": p, "e0": e0}, decomposition=D)


def _coset_reps(W):
    """Representatives 0 <= v_i < W_ii of Z^d / (W Z^d), W lower triangular."""
    d = len(W)
    return list(itertools.product(*[range(W[i][i]) for i in range(d)]))


def _integral(v):
    assert all(Fraction(x).denominator == 1 for x in v), v
    return tuple(int(x) for x in v)


def _reduce_mod(v, W):
    v = list(v)
    for i in range(len(W)):
        k = v[i] // W[i][i]
        if k:
            for r in range(len(W)):
                v[r] -= k * W[r][i]
    return tuple(v)


def build_cover_ncb(n: int, weights, p: int) -> NCBlowup:
    """NCB(Y/X) for Y = A^d -> X = A^d / μ_n(weights), with p tame."""
    weights = tuple(int(a) for a in weights)
    if gcd(n, p) != 1:
        raise WildGroupOrder(f"p = {p} divides the group order {n}")
    d = len(weights)
    pres = LatticePresentation(d, modulus=n, weights=weights)
    label = f"cyclic-{n}-" + "-".join(map(str, weights))
    B = sublattice_basis(pres)
    U, cone = normalize_lattice(pres, orthant(d).rays, label)
    chars = []
    for v in _coset_reps(B):
        c = sum(a * x for a, x in zip(weights, v)) % n
        chars.append((c, v, matvec(U, v)))
    chars.sort()
    counts = Counter()
    reps = {}
    for c, v, s in chars:
        M = from_shift(tuple(-x for x in s), cone)
        k = canonical_class(M)
        counts[k] += 1
        reps.setdefault(k, M)
    classes = sorted(counts)
    E = build_end_algebra([reps[k] for k in classes], [counts[k] for k in classes])
    cover = CoverData(n, weights, B, U, chars)
    return NCBlowup(
        cone,
        [reps[k] for k in classes],
        [counts[k] for k in classes],
        E,
        {"kind": "cover", "n": n, "weights": list(weights), "p": p, "characters": len(chars)},
        cover=cover,
    )


def require_f_steady(ncb: NCBlowup, p: int, e: int, cap=DEFAULT_CAP):
    D = ncb.as_decomposition()
    for k in range(1, e + 1):
        De = pushforward_of(D, p, k, cap=cap)
        if De.classes != D.classes:
            raise NotFSteady(
                f"M and F^{k}_* M have different summand classes",
                e=k, missing=[list(c.residue) for c in sorted(De.classes - D.classes)],
                extra=[list(c.residue) for c in sorted(D.classes - De.classes)],
            )


def _p_of(ncb):
    return ncb.origin["p"]


# -- Frobenius certificate -------------------------------------------------

@dataclass
class FrobeniusCertificate:
    cone: ConeData
    p: int
    e: int
    box: int
    representatives: list
    table: list  # (rep index, residue u, class index j, translation z)
    verdict: str
    log: dict

    @property
    def projective_columns(self):
        return Counter(j for _, _, j, _ in self.table)

    def grid(self):
        """Bounds of Hom(C_k, summand_{i,u}) for every column and component."""
        q = self.p ** self.e
        rows = []
        for i, u, j, z in sorted(self.table):
            S = summand(self.representatives[i], q, u)
            rows.append({"rep": i, "residue": list(u),
                         "bounds": [list(hom_module(C, S).bound) for C in self.representatives]})
        return rows

    def to_dict(self):
        return {
            "kind": "frobenius-certificate",
            "version": 1,
            "cone": {"label": self.cone.label, "dim": self.cone.dim,
                     "rays": [list(r) for r in self.cone.rays],
                     "facets": [list(a) for a in self.cone.facets]},
            "p": self.p,
            "e": self.e,
            "box": self.box,
            "representatives": [
                {"bound": list(C.bound), "shift": [rational(x) for x in C.shift]}
                for C in self.representatives
            ],
            "table": [
                {"rep": i, "residue": list(u), "class": j, "translation": list(z)}
                for i, u, j, z in self.table
            ],
            "projective_columns": {str(j): c for j, c in sorted(self.projective_columns.items())},
            "grid": self.grid(),
            "log": self.log,
            "verdict": self.verdict,
        }


def certificate_table(ncb: NCBlowup, p: int, e: int, cap=DEFAULT_CAP):
    index = {c: j for j, c in enumerate(ncb.classes)}
    reps = dict(zip(ncb.classes, ncb.representatives))
    rows = []
    for i, C in enumerate(ncb.representatives):
        for u, k, z in residue_table(C, p, e, reps, cap=cap):
            rows.append((i, u, index[k], z))
    return rows


def verify_certificate_table(cone, representatives, p, e, box, table):
    """Replayable check of a residue-to-class translation table.

    For each column (i, u) the summand S = Con((t_i - u)/q) is recomputed
    from scratch; each Hom(C_k, S) must coincide with Hom(C_k, C_j) + z
    degree by degree in the window, and precomposition with End generators
    must respect the identification.
    """
    q = p ** e
    d = cone.dim
    n = len(representatives)
    log = {"columns": 0, "degrees": 0, "mismatches": [], "inconclusive": [], "missing": []}
    seen = {}
    for i, u, j, z in table:
        seen[(i, tuple(u))] = (j, tuple(z))
    for i in range(n):
        for u in itertools.product(range(q), repeat=d):
            if (i, u) not in seen:
                log["missing"].append({"rep": i, "residue": list(u)})
    homs = [[hom_module(a, b) for b in representatives] for a in representatives]
    for (i, u), (j, z) in sorted(seen.items()):
        log["columns"] += 1
        S = summand(representatives[i], q, u)
        Cj = representatives[j]
        for k, Ck in enumerate(representatives):
            lhs = hom_module(Ck, S)
            rhs = hom_module(Ck, Cj)
            for g in lhs.module.generators:
                if max_slack(lhs.module, g) > box:
                    log["inconclusive"].append({"rep": i, "residue": list(u), "component": k, "degree": list(g)})
            shifted = MonomialModule(cone, tuple(b + v for b, v in zip(rhs.bound, matvec(cone.facets, z))))
            degrees = set(lhs.window(box)) | set(shifted.points(box))
            for x in sorted(degrees):
                log["degrees"] += 1
                a = lhs.contains_by_definition(x)
                y = tuple(xi - zi for xi, zi in zip(x, z))
                b = rhs.contains_by_definition(y)
                if a != b:
                    log["mismatches"].append(
                        {"rep": i, "residue": list(u), "component": k, "degree": list(x), "column": a, "projective": b}
                    )
                    continue
                if not a:
                    continue
                for k2 in range(n):
                    for phi in homs[k2][k].module.generators:
                        a2 = hom_module(representatives[k2], S).contains_by_definition(
                            tuple(xi + fi for xi, fi in zip(x, phi)))
                        b2 = hom_module(representatives[k2], Cj).contains_by_definition(
                            tuple(yi + fi for yi, fi in zip(y, phi)))
                        if a2 != b2:
                            log["mismatches"].append(
                                {"rep": i, "residue": list(u), "component": k2, "degree": list(x),
                                 "end_generator": list(phi), "column": a2, "projective": b2}
                            )
    if log["mismatches"] or log["missing"]:
        verdict = FAIL
    elif log["inconclusive"]:
        verdict = INCONCLUSIVE
    else:
        verdict = CERTIFIED
    return verdict, log


def frobenius_certificate(ncb: NCBlowup, e: int, box: int, *, cap=DEFAULT_CAP, table=None) -> FrobeniusCertificate:
    """Certify Hom(M, M_e) ≅ ⊕ P_j^{b_j} as right End(M)-modules in a window."""
    p = _p_of(ncb)
    _check_cap(ncb.cone.dim, p ** e, cap)
    require_f_steady(ncb, p, e, cap=cap)
    if table is None:
        table = certificate_table(ncb, p, e, cap=cap)
    verdict, log = verify_certificate_table(ncb.cone, ncb.representatives, p, e, box, table)
    if verdict != FAIL:
        per_rep = Counter(i for i, *_ in table)
        assert all(per_rep[i] == p ** (e * ncb.cone.dim) for i in range(len(ncb.representatives)))
    return FrobeniusCertificate(ncb.cone, p, e, box, list(ncb.representatives), list(table), verdict, log)


def replay_certificate(doc: dict):
    """Re-run verification from a serialized certificate; returns (verdict, log)."""
    c = doc["cone"]
    cone = ConeData(c["dim"], tuple(map(tuple, c["rays"])), tuple(map(tuple, c["facets"])), c["label"])
    reps = [
        MonomialModule(cone, tuple(r["bound"]), tuple(from_rational(x) for x in r["shift"]))
        for r in doc["representatives"]
    ]
    table = [(row["rep"], tuple(row["residue"]), row["class"], tuple(row["translation"])) for row in doc["table"]]
    return verify_certificate_table(cone, reps, doc["p"], doc["e"], doc["box"], table)


# -- compatibility diagrams ------------------------------------------------

def pushforward_summands(ncb: NCBlowup, p: int, e: int):
    """Distinct summand modules (as point sets) of M_e = F^e_* M."""
    q = p ** e
    seen = {}
    for C in ncb.representatives:
        for u in itertools.product(range(q), repeat=ncb.cone.dim):
            S = summand(C, q, u)
            seen.setdefault(S.bound, S)
    return [seen[b] for b in sorted(seen)]


def verify_projection_compat(ncb: NCBlowup, e: int, box: int, *, cap=DEFAULT_CAP) -> LemmaReport:
    """Evaluation Hom(M, M_e) ⊗_E M -> M_e, degreewise in the window."""
    p = _p_of(ncb)
    _check_cap(ncb.cone.dim, p ** e, cap)
    require_f_steady(ncb, p, e, cap=cap)
    rep = verify_module_action_iso(ncb.representatives, pushforward_summands(ncb, p, e), box)
    rep.kind = "projection"
    return rep


@dataclass
class IterationReport:
    e: int
    e2: int
    decomposition_level: bool
    table_level: bool
    checked_residues: int
    mismatches: list

    @property
    def verdict(self):
        return CERTIFIED if self.decomposition_level and self.table_level else FAIL

    def to_dict(self):
        return {
            "e": self.e,
            "e_prime": self.e2,
            "decomposition_level": self.decomposition_level,
            "table_level": self.table_level,
            "checked_residues": self.checked_residues,
            "mismatches": self.mismatches,
            "verdict": self.verdict,
        }


def verify_frobenius_iteration(ncb: NCBlowup, e: int, e2: int, *, cap=DEFAULT_CAP) -> IterationReport:
    """F^{e+e'} = F^e ∘ F^{e'} on decompositions and on residue tables.

    Level-(e+e') residue U = u + q u' composes the level-e entry
    (j, z) at u with the level-e' entry of C_j at r = (u' - z) mod q',
    whose translation is corrected by -(u' - z - r)/q'.
    """
    p = _p_of(ncb)
    d = ncb.cone.dim
    q, q2 = p ** e, p ** e2
    _check_cap(d, q * q2, cap)
    dec_ok = all(pushforward_composition_check(C, p, e, e2, cap=cap) for C in ncb.representatives)
    known = dict(zip(ncb.classes, ncb.representatives))
    level2 = {}

    def second(k):
        # level-e' table of the representative of k, which need not lie in M
        if k not in level2:
            R = known[k]
            level2[k] = {u: (k2, z) for u, k2, z in residue_table(R, p, e2, _closure_reps(R, p, e2, known), cap=cap)}
        return level2[k]

    mismatches = []
    checked = 0
    for i, C in enumerate(ncb.representatives):
        first = {u: (k, z) for u, k, z in residue_table(C, p, e, _closure_reps(C, p, e, known), cap=cap)}
        direct = {u: (k, z) for u, k, z in residue_table(C, p, e + e2, _closure_reps(C, p, e + e2, known), cap=cap)}
        for U, (k_dir, z_dir) in sorted(direct.items()):
            checked += 1
            u = tuple(x % q for x in U)
            u2 = tuple(x // q for x in U)
            k1, z1 = first[u]
            r = tuple((a - b) % q2 for a, b in zip(u2, z1))
            shift = tuple((a - b - c) // q2 for a, b, c in zip(u2, z1, r))
            k2, z2 = second(k1)[r]
            predicted = (k2, tuple(a - b for a, b in zip(z2, shift)))
            if predicted != (k_dir, z_dir):
                mismatches.append({
                    "rep": i, "residue": list(U),
                    "predicted": {"class": list(predicted[0].residue), "translation": list(predicted[1])},
                    "direct": {"class": list(k_dir.residue), "translation": list(z_dir)},
                })
    return IterationReport(e, e2, dec_ok, not mismatches, checked, mismatches)


def _closure_reps(C, p, e, known):
    # representatives for every class met in F^e_* C; prefer those of M
    D = frobenius_pushforward(C, p, e)
    for k, R in D.representatives.items():
        known.setdefault(k, R)
    return known


@dataclass
class CoverReport:
    e: int
    box: int
    verdict: str
    checked: int
    failures: list
    inconclusive: list

    def to_dict(self):
        return {
            "kind": "cover_coforgetful",
            "e": self.e,
            "box": self.box,
            "verdict": self.verdict,
            "checked_degrees": self.checked,
            "failures": self.failures,
            "inconclusive": self.inconclusive,
        }


def verify_cover_coforgetful(ncb: NCBlowup, e: int, box: int, *, cap=DEFAULT_CAP) -> CoverReport:
    """O_{Y_e} ⊗_{O_Y} E_{Y/X} -> Hom_X(O_Y, O_{Y_e}), degreewise.

    Everything is placed in cone coordinates: character module c sits at
    offset s_c as s_c + Con(-s_c); summands of O_{Y_e} are the cosets of
    Z^d in (U Z^d)/q.  A degree w of the target determines the residue u of
    the free O_Y-basis element x^{u/q} uniquely, so the source is at most
    one-dimensional in each degree and the comparison is pointwise.
    """
    if ncb.cover is None:
        raise NotACover("NC blowup was not built from a finite cover")
    cov = ncb.cover
    p = _p_of(ncb)
    cone = ncb.cone
    A = cone.facets
    d = cone.dim
    q = p ** e
    _check_cap(d, q, cap)
    U, B = cov.inverse, cov.basis
    qB = tuple(tuple(q * x for x in row) for row in B)

    def in_cone(y):
        return all(dot(a, y) >= 0 for a in A)

    chars = []
    for c, v, s in cov.characters:
        P = from_shift(tuple(-x for x in s), cone)
        chars.append((c, s, P, P.generators))
    targets = []
    for v in _coset_reps(qB):
        s = tuple(Fraction(x, q) for x in matvec(U, v))
        targets.append((v, s, from_shift(tuple(-x for x in s), cone)))
    tindex = {v: t for t, (v, _, _) in enumerate(targets)}

    def maps_into_cone(w, s_src, gens):
        return all(in_cone(tuple(wi + si + gi for wi, si, gi in zip(w, s_src, g))) for g in gens)

    # character modules are located by their coset of Z^d / L in original coordinates
    coset_of = {}
    for ci, (c, s, _, _) in enumerate(chars):
        coset_of.setdefault(_reduce_mod(_integral(matvec(B, s)), B), ci)

    def source_dim(w, s_src, gens):
        w_orig = matvec(B, w)
        u = tuple(x % q for x in _integral([x * q for x in w_orig]))
        omega = tuple(wi - Fraction(x, q) for wi, x in zip(w, matvec(U, u)))
        # φ : M_c -> M_c' in degree ω, with c' the listed character at s_c + ω
        landing = _reduce_mod(_integral(matvec(B, tuple(a + b for a, b in zip(s_src, omega)))), B)
        if landing not in coset_of:
            return 0
        _, s_tgt, P_tgt, _ = chars[coset_of[landing]]
        return int(all(P_tgt.contains(_integral(tuple(o + si + gi - ti for o, si, gi, ti in zip(omega, s_src, g, s_tgt))))
                       for g in gens))

    checked = 0
    failures, inconclusive = [], []
    for ci, (c, s_c, P_c, gens) in enumerate(chars):
        for ti, (v, s_t, P_t) in enumerate(targets):
            H = hom_module(P_c, P_t)
            for g in H.module.generators:
                if max_slack(H.module, g) > box:
                    inconclusive.append({"character": c, "target": list(v), "degree": list(g)})
            offset = tuple(a - b for a, b in zip(s_t, s_c))
            for z in H.window(box):
                checked += 1
                w = tuple(o + zi for o, zi in zip(offset, z))
                tdim = int(maps_into_cone(w, s_c, gens))
                sdim = source_dim(w, s_c, gens)
                if tdim != sdim or not tdim:
                    failures.append({"character": c, "target": list(v), "degree": [rational(x) for x in w],
                                     "source_dim": sdim, "target_dim": tdim})
        # source-side scan: x^{u/q} ⊗ φ must land in a summand of O_{Y_e}
        for c2, s_c2, P_c2, _ in chars:
            H = hom_module(P_c, P_c2)
            base = tuple(a - b for a, b in zip(s_c2, s_c))
            for z in H.window(box):
                omega = tuple(o + zi for o, zi in zip(base, z))
                for u in itertools.product(range(q), repeat=d):
                    w = tuple(oi + Fraction(x, q) for oi, x in zip(omega, matvec(U, u)))
                    pos = matvec(B, tuple(wi + si for wi, si in zip(w, s_c)))
                    vt = _reduce_mod(tuple(int(x * q) for x in pos), qB)
                    if vt not in tindex or not maps_into_cone(w, s_c, gens):
                        failures.append({"character": c, "target": list(vt), "degree": [rational(x) for x in w],
                                         "source_dim": 1, "target_dim": 0})
    verdict = FAIL if failures else (INCONCLUSIVE if inconclusive else CERTIFIED)
    return CoverReport(e, box, verdict, checked, failures, inconclusive)


def verify_lemma_suite(ncb: NCBlowup, box: int, e: int = 1, *, cap=DEFAULT_CAP):
    """Both Hom/tensor isomorphisms on M and the summands of M_e."""
    p = _p_of(ncb)
    M = list(ncb.representatives)
    N = pushforward_summands(ncb, p, e)
    Nreps = {}
    for S in N:
        Nreps.setdefault(canonical_class(S), S)
    Nlist = [Nreps[k] for k in sorted(Nreps)]
    return [
        verify_hom_tensor_surjectivity(M, Nlist, M, box),
        verify_hom_tensor_surjectivity(Nlist, M, Nlist, box),
        verify_module_action_iso(M, Nlist, box),
    ]
