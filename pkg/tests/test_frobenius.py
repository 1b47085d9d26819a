from fractions import Fraction

import pytest

from frobken.errors import CapExceeded, MissingShift
from frobken.frobenius import (
    FrobeniusReport,
    f_pure_check,
    f_pure_witness,
    f_signature_estimate,
    f_steady_check,
    ffrt_scan,
    frobenius_pushforward,
    kunz_commutative_test,
    pushforward_composition_check,
    residue_table,
    summand,
)
from frobken.lattice import orthant
from frobken.modules import MonomialModule, canonical_class, free_module, from_shift, translation_between
from frobken.ringspec import builtin

from conftest import SMALL
from oracles import brute_generators, normalized, pushforward_oracle


def _oracle_matches(D, cone, t, q):
    """Implementation multiplicities agree with the brute-force classes."""
    oracle = pushforward_oracle(cone.facets, t, q)
    ours = {normalized(brute_generators(cone.facets, D.representatives[c].bound, 8)): m for c, m in D.counts}
    assert ours == oracle


class TestPushforward:
    def test_line(self):
        D = frobenius_pushforward(free_module(orthant(1)), 2, 1)
        assert [(c.is_free, m) for c, m in D.counts] == [(True, 2)]

    @pytest.mark.parametrize("p", [2, 3])
    def test_plane(self, p):
        D = frobenius_pushforward(free_module(orthant(2)), p, 1)
        assert len(D.counts) == 1 and D.total_rank == p * p and D.counts[0][0].is_free

    def test_a1_p3(self, a1):
        D = frobenius_pushforward(free_module(a1), 3, 1)
        assert len(D.classes) == 2 and D.total_rank == 9
        _oracle_matches(D, a1, (0, 0), 3)

    @pytest.mark.parametrize("name,p,e", [("cyclic-3-1-2", 2, 1), ("cyclic-3-1-2", 2, 2),
                                          ("cyclic-5-1-2", 2, 1), ("cyclic-2-1-1", 3, 2),
                                          ("square-cone", 2, 1)])
    def test_against_oracle(self, name, p, e):
        cone = builtin(name).cone
        D = frobenius_pushforward(free_module(cone), p, e)
        _oracle_matches(D, cone, (0,) * cone.dim, p ** e)

    def test_shifted_source(self, a2s):
        t = (Fraction(1, 3), Fraction(-2, 3))
        D = frobenius_pushforward(from_shift(t, a2s), 2, 2)
        _oracle_matches(D, a2s, t, 4)

    def test_known_values(self, a1, a2s, conifold):
        assert {str(c): m for c, m in frobenius_pushforward(free_module(a1), 3, 1).counts} == \
            {"free": 5, "[0,1]": 4}
        assert sorted(m for _, m in frobenius_pushforward(free_module(a2s), 2, 1).counts) == [1, 1, 2]
        D = frobenius_pushforward(free_module(conifold), 2, 3)
        assert D.total_rank == 512 and D.multiplicity(canonical_class(free_module(conifold))) == 344

    def test_missing_shift(self, a1):
        with pytest.raises(MissingShift):
            frobenius_pushforward(MonomialModule(a1, (0, 0)), 3, 1)

    def test_cap(self):
        with pytest.raises(CapExceeded):
            frobenius_pushforward(free_module(orthant(4)), 5, 3)

    def test_workers_do_not_change_result(self, conifold):
        R = free_module(conifold)
        assert frobenius_pushforward(R, 3, 2, workers=1) == frobenius_pushforward(R, 3, 2, workers=4)

    def test_residue_table_translations(self, a1):
        D = frobenius_pushforward(free_module(a1), 3, 2)
        for u, k, z in residue_table(free_module(a1), 3, 2, D.representatives):
            S = summand(free_module(a1), 9, u)
            assert canonical_class(S) == k
            assert D.representatives[k].translate(z).bound == S.bound

    def test_representative_is_first_residue(self, a1):
        D = frobenius_pushforward(free_module(a1), 3, 1)
        rep = D.representatives[canonical_class(free_module(a1))]
        assert translation_between(rep, free_module(a1)) is not None


class TestBattery:
    def test_fpure(self, builtin_cone):
        for p in (2, 3, 5):
            if builtin_cone.dim == 4 and p == 5:
                continue
            assert f_pure_check(builtin_cone, p)

    def test_fpure_witness_a2(self, a2s):
        u = f_pure_witness(a2s, 2)
        assert u == (0, 0)
        assert canonical_class(summand(free_module(a2s), 2, u)).is_free

    def test_ffrt(self, a1, conifold):
        scan = ffrt_scan(orthant(2), 2, 3)
        assert scan.e0 == 1 and len(scan.stabilized_classes) == 1
        scan = ffrt_scan(a1, 3, 3)
        assert scan.e0 == 1 and len(scan.stabilized_classes) == 2
        scan = ffrt_scan(conifold, 2, 3)
        assert scan.witnessed and len(scan.stabilized_classes) > 1
        with pytest.raises(ValueError):
            ffrt_scan(a1, 3, 1)

    def test_no_witness_state(self):
        from frobken.frobenius import stabilization_index

        assert stabilization_index({1: {1}, 2: {1, 2}, 3: {1, 2, 3}}, 3) is None
        assert stabilization_index({1: {1}, 2: {1, 2}, 3: {1, 2}}, 3) == 2

    def test_steady(self, a1):
        assert f_steady_check(free_module(orthant(2)), 3, 3).steady
        assert f_steady_check(frobenius_pushforward(free_module(a1), 3, 1), 3, 3).steady
        res = f_steady_check(free_module(a1), 3, 2)
        assert not res.steady and res.first_failure == 1

    def test_fsignature(self, a1, builtin_cone):
        assert f_signature_estimate(orthant(3), 2, 2) == 1
        assert [f_signature_estimate(a1, 3, e) for e in (1, 2, 3)] == \
            [Fraction(5, 9), Fraction(41, 81), Fraction(365, 729)]
        s = f_signature_estimate(builtin_cone, 2, 1)
        assert 0 < s <= 1

    def test_kunz(self, builtin_cone):
        verdicts = {kunz_commutative_test(builtin_cone, p) for p in (2, 3)}
        assert verdicts == {builtin_cone.is_smooth()}

    @pytest.mark.parametrize("name", SMALL)
    def test_composition(self, name):
        cone = builtin(name).cone
        R = free_module(cone)
        for e, e2 in [(1, 0), (0, 1), (1, 1), (1, 2), (2, 1)]:
            assert pushforward_composition_check(R, 2, e, e2)

    def test_fpure_monotone(self, builtin_cone):
        for e in (1, 2):
            D = frobenius_pushforward(free_module(builtin_cone), 2, e)
            assert any(c.is_free for c in D.classes)


class TestReport:
    @pytest.mark.parametrize("name,p", [("sing-A1", 3), ("A2", 2), ("square-cone", 2)])
    def test_rederive(self, name, p):
        rep = FrobeniusReport.build(builtin(name).cone, p, 3)
        again = rep.rederive()
        assert again["e0"] == rep.e0
        assert again["f_pure"] == rep.f_pure
        assert again["kunz_regular"] == rep.kunz_regular
        for e, D in rep.decompositions.items():
            assert D.total_rank == p ** (e * D.cone.dim)

    def test_deterministic(self, a2s):
        from frobken.serialize import dumps

        a = dumps(FrobeniusReport.build(a2s, 2, 3).to_dict())
        b = dumps(FrobeniusReport.build(a2s, 2, 3, workers=3).to_dict())
        assert a == b
