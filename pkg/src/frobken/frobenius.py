"""Frobenius pushforwards of conic modules and the F-singularity battery.

For q = p^e the pushforward F^e_* Con(t) splits by exponent residues
u in {0..q-1}^d into the rank-one summands Con((t - u)/q).  The residue
loop is vectorized with numpy while magnitudes fit in int64 and falls back
to Python integers otherwise; chunks are merged associatively, so results
do not depend on the worker count.
"""

from __future__ import annotations

import itertools
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Optional

import numpy as np

from .errors import CapExceeded, MissingShift
from .lattice import ConeData, matvec
from .modules import (
    ClassId,
    Decomposition,
    MonomialModule,
    canonical_class,
    free_module,
    is_equivalent,
    translation_between,
)

DEFAULT_CAP = 2 ** 20
_INT64_SAFE = 2 ** 62


def _check_cap(d, q, cap):
    if cap is not None and q ** d > cap:
        raise CapExceeded(f"q^d = {q}^{d} exceeds enumeration cap {cap}", q=q, d=d, cap=cap)


def _scaled_shift(M: MonomialModule):
    if M.shift is None:
        raise MissingShift("module is not presented as Con(t)")
    t = [Fraction(x) for x in M.shift]
    D = lcm(*(x.denominator for x in t)) if t else 1
    return tuple(int(x * D) for x in t), D


def _residue(index, q, d):
    u = []
    for _ in range(d):
        index, r = divmod(index, q)
        u.append(r)
    return tuple(reversed(u))


def _chunk_bounds_numpy(A, At, D, q, d, lo, hi):
    idx = np.arange(lo, hi, dtype=np.int64)
    U = np.stack(np.unravel_index(idx, (q,) * d), axis=-1).astype(np.int64)
    num = np.asarray(At, dtype=np.int64)[None, :] - D * (U @ np.asarray(A, dtype=np.int64).T)
    B = -((-num) // (D * q))
    rows, first, counts = np.unique(B, axis=0, return_index=True, return_counts=True)
    return {
        tuple(int(v) for v in row): (int(c), int(lo + f))
        for row, f, c in zip(rows, first, counts)
    }


def _chunk_bounds_python(A, At, D, q, d, lo, hi):
    out = {}
    den = D * q
    for index in range(lo, hi):
        u = _residue(index, q, d)
        Au = matvec(A, u)
        b = tuple(-((D * au - ati) // den) for ati, au in zip(At, Au))
        if b in out:
            c, f = out[b]
            out[b] = (c + 1, f)
        else:
            out[b] = (1, index)
    return out


def _bound_histogram(M: MonomialModule, q, workers=1):
    """Map summand bound vector -> (count, first residue index)."""
    A = M.cone.facets
    d = M.cone.dim
    tnum, D = _scaled_shift(M)
    At = matvec(A, tnum)
    total = q ** d
    amax = max(abs(x) for row in A for x in row)
    magnitude = max([abs(x) for x in At] + [0]) + D * amax * d * q
    fn = _chunk_bounds_numpy if magnitude < _INT64_SAFE and D * q < _INT64_SAFE else _chunk_bounds_python
    workers = max(1, int(workers))
    step = -(-total // workers)
    spans = [(lo, min(lo + step, total)) for lo in range(0, total, step)]
    if workers == 1 or len(spans) == 1:
        parts = [fn(A, At, D, q, d, lo, hi) for lo, hi in spans]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda s: fn(A, At, D, q, d, *s), spans))
    merged = {}
    for part in parts:
        for b, (c, f) in part.items():
            if b in merged:
                c0, f0 = merged[b]
                merged[b] = (c0 + c, min(f0, f))
            else:
                merged[b] = (c, f)
    return merged


def summand(M: MonomialModule, q: int, u) -> MonomialModule:
    """The residue-u summand Con((t - u)/q) of F^e_* M."""
    if M.shift is None:
        raise MissingShift("module is not presented as Con(t)")
    t = tuple(Fraction(x) for x in M.shift)
    s = tuple((ti - ui) / q for ti, ui in zip(t, u))
    b = tuple(-((-v.numerator) // v.denominator) for v in matvec(M.cone.facets, s))
    return MonomialModule(M.cone, b, s)


def frobenius_pushforward(M: MonomialModule, p: int, e: int, *, workers=1, cap=DEFAULT_CAP) -> Decomposition:
    """Decompose F^e_* M into isomorphism classes with multiplicities."""
    if M.shift is None:
        raise MissingShift("module is not presented as Con(t)")
    d = M.cone.dim
    q = p ** e
    _check_cap(d, q, cap)
    hist = _bound_histogram(M, q, workers)
    counts = Counter()
    first = {}
    for b, (c, f) in hist.items():
        k = canonical_class(MonomialModule(M.cone, b))
        counts[k] += c
        if k not in first or f < first[k]:
            first[k] = f
    reps = {k: summand(M, q, _residue(f, q, d)) for k, f in first.items()}
    return Decomposition.from_counter(
        counts, M.cone, reps, p=p, e=e, source=(M.bound, M.shift)
    )


def residue_table(M: MonomialModule, p: int, e: int, representatives: dict, cap=DEFAULT_CAP):
    """Per residue u: (u, class, translation) with summand_u = rep + translation."""
    d = M.cone.dim
    q = p ** e
    _check_cap(d, q, cap)
    rows = []
    for u in itertools.product(range(q), repeat=d):
        S = summand(M, q, u)
        k = canonical_class(S)
        z = translation_between(representatives[k], S)
        rows.append((u, k, z))
    return rows


def pushforward_of(D: Decomposition, p: int, e: int, *, workers=1, cap=DEFAULT_CAP) -> Decomposition:
    """F^e_* of a direct sum of class representatives, multiplicities carried."""
    total = Counter()
    reps = {}
    for k, m in D.counts:
        sub = frobenius_pushforward(D.representatives[k], p, e, workers=workers, cap=cap)
        for c, n in sub.counts:
            total[c] += m * n
        for c, r in sub.representatives.items():
            reps.setdefault(c, r)
    return Decomposition.from_counter(total, D.cone, reps, p=p, e=e)


def class_set_of(M):
    if isinstance(M, Decomposition):
        return M.classes
    return frozenset({canonical_class(M)})


def _as_decomposition(M):
    if isinstance(M, Decomposition):
        return M
    return Decomposition.from_counter(Counter({canonical_class(M): 1}), M.cone, {canonical_class(M): M})


# -- F-singularity battery -------------------------------------------------

def f_pure_witness(cone: ConeData, p: int):
    """Residue u whose summand of F_*R is free, or None."""
    R = free_module(cone)
    for u in itertools.product(range(p), repeat=cone.dim):
        if canonical_class(summand(R, p, u)).is_free:
            return u
    return None


def f_pure_check(cone: ConeData, p: int) -> bool:
    D = frobenius_pushforward(free_module(cone), p, 1)
    return any(c.is_free for c in D.classes)


@dataclass
class FFRTScan:
    p: int
    e_max: int
    class_sets: dict  # e -> frozenset of ClassId
    decompositions: dict = field(repr=False, default_factory=dict)
    e0: Optional[int] = None

    @property
    def witnessed(self):
        return self.e0 is not None

    @property
    def state(self):
        return "STABILIZED" if self.witnessed else "NoStabilizationWitnessed"

    @property
    def stabilized_classes(self):
        return self.class_sets[self.e0] if self.witnessed else None

    def to_dict(self):
        return {
            "p": self.p,
            "e_max": self.e_max,
            "state": self.state,
            "e0": self.e0,
            "class_sets": {
                str(e): [list(c.residue) for c in sorted(s)] for e, s in sorted(self.class_sets.items())
            },
            "stabilized_size": len(self.stabilized_classes) if self.witnessed else None,
        }


def stabilization_index(class_sets: dict, e_max: int):
    """Least e0 < e_max with identical class sets on [e0, e_max]."""
    e0 = None
    for e in range(e_max - 1, 0, -1):
        if class_sets[e] == class_sets[e_max]:
            e0 = e
        else:
            break
    return e0


def ffrt_scan(cone: ConeData, p: int, e_max: int = 3, *, workers=1, cap=DEFAULT_CAP) -> FFRTScan:
    if e_max < 2:
        raise ValueError("e_max must be at least 2 to witness stabilization")
    R = free_module(cone)
    decs = {e: frobenius_pushforward(R, p, e, workers=workers, cap=cap) for e in range(1, e_max + 1)}
    sets = {e: D.classes for e, D in decs.items()}
    return FFRTScan(p, e_max, sets, decs, stabilization_index(sets, e_max))


@dataclass
class SteadyResult:
    steady: bool
    e_max: int
    first_failure: Optional[int]
    rows: list  # (e, class set of M_e, equivalent?)

    def to_dict(self):
        return {
            "f_steady": self.steady,
            "e_max": self.e_max,
            "first_failure": self.first_failure,
            "rows": [
                {"e": e, "equivalent": ok, "classes": [list(c.residue) for c in sorted(s)]}
                for e, s, ok in self.rows
            ],
        }


def f_steady_check(M, p: int, e_max: int = 3, *, workers=1, cap=DEFAULT_CAP) -> SteadyResult:
    """Is M equivalent to every F^e_* M, 1 <= e <= e_max?"""
    D = _as_decomposition(M)
    rows = []
    first = None
    for e in range(1, e_max + 1):
        De = pushforward_of(D, p, e, workers=workers, cap=cap)
        ok = is_equivalent(D, De)
        rows.append((e, De.classes, ok))
        if not ok and first is None:
            first = e
    return SteadyResult(first is None, e_max, first, rows)


def f_signature_estimate(cone: ConeData, p: int, e: int, *, workers=1, cap=DEFAULT_CAP) -> Fraction:
    D = frobenius_pushforward(free_module(cone), p, e, workers=workers, cap=cap)
    free = sum(m for c, m in D.counts if c.is_free)
    return Fraction(free, D.total_rank)


def kunz_commutative_test(cone: ConeData, p: int) -> bool:
    """Regularity via freeness (= flatness) of F_*R."""
    D = frobenius_pushforward(free_module(cone), p, 1)
    return all(c.is_free for c in D.classes)


def composed_pushforward(M: MonomialModule, p: int, e: int, e2: int, *, workers=1, cap=DEFAULT_CAP):
    first = frobenius_pushforward(M, p, e, workers=workers, cap=cap)
    return pushforward_of(first, p, e2, workers=workers, cap=cap)


def pushforward_composition_check(M: MonomialModule, p: int, e: int, e2: int, *, workers=1, cap=DEFAULT_CAP) -> bool:
    """F^{e2}_* F^e_* M and F^{e+e2}_* M agree as multisets of classes."""
    composed = composed_pushforward(M, p, e, e2, workers=workers, cap=cap)
    direct = frobenius_pushforward(M, p, e + e2, workers=workers, cap=cap)
    return composed.counts == direct.counts


@dataclass
class FrobeniusReport:
    cone: ConeData
    p: int
    e_max: int
    decompositions: dict
    e0: Optional[int]
    f_pure: bool
    ffrt_witnessed: bool
    f_steady: Optional[bool]
    kunz_regular: bool
    f_signature: dict

    @classmethod
    def build(cls, cone, p, e_max=3, *, workers=1, cap=DEFAULT_CAP):
        scan = ffrt_scan(cone, p, e_max, workers=workers, cap=cap)
        decs = scan.decompositions
        steady = None
        if scan.witnessed:
            steady = f_steady_check(decs[scan.e0], p, e_max - scan.e0, workers=workers, cap=cap).steady
        return cls(
            cone, p, e_max, decs, scan.e0,
            f_pure=any(c.is_free for c in decs[1].classes),
            ffrt_witnessed=scan.witnessed,
            f_steady=steady,
            kunz_regular=all(c.is_free for c in decs[1].classes),
            f_signature={e: Fraction(D.multiplicity(ClassId((0,) * cone.m, cone.label)), D.total_rank)
                         for e, D in decs.items()},
        )

    def rederive(self):
        """Verdicts recomputed from the stored decompositions alone."""
        sets = {e: D.classes for e, D in self.decompositions.items()}
        e0 = stabilization_index(sets, self.e_max)
        return {
            "e0": e0,
            "f_pure": any(c.is_free for c in sets[1]),
            "ffrt_witnessed": e0 is not None,
            "kunz_regular": all(c.is_free for c in sets[1]),
        }

    def to_dict(self):
        from .serialize import rational

        return {
            "cone": self.cone.label,
            "p": self.p,
            "e_max": self.e_max,
            "e0": self.e0,
            "verdicts": {
                "f_pure": self.f_pure,
                "ffrt_witnessed": self.ffrt_witnessed,
                "f_steady": self.f_steady,
                "kunz_regular": self.kunz_regular,
            },
            "decompositions": {str(e): D.to_dict() for e, D in sorted(self.decompositions.items())},
            "f_signature": {str(e): rational(v) for e, v in sorted(self.f_signature.items())},
        }
