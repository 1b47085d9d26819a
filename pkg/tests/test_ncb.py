import json

import jsonschema
import pytest

from frobken.endalg import CERTIFIED, FAIL, INCONCLUSIVE
from frobken.errors import CapExceeded, NotACover, NotFSteady, WildGroupOrder
from frobken.frobenius import ffrt_scan
from frobken.lattice import orthant
from frobken.ncb import (
    CoverData,
    build_cover_ncb,
    build_dblowup,
    frobenius_certificate,
    replay_certificate,
    verify_cover_coforgetful,
    verify_frobenius_iteration,
    verify_projection_compat,
)
from frobken.ringspec import builtin, load_schema
from frobken.serialize import dumps


@pytest.fixture(scope="module")
def db_a1():
    return build_dblowup(builtin("sing-A1").cone, 3, 1)


@pytest.fixture(scope="module")
def cover_a1():
    return build_cover_ncb(2, (1, 1), 3)


class TestBuild:
    def test_regular_is_morita_trivial(self):
        ncb = build_dblowup(orthant(2), 3, 2)
        assert len(ncb.representatives) == 1 and ncb.multiplicities == [81]
        assert ncb.end_algebra.n == 1

    def test_a1(self, db_a1):
        assert len(ncb_classes := db_a1.classes) == 2
        assert db_a1.multiplicities == [5, 4]
        assert ncb_classes == sorted(ncb_classes)

    def test_a2_matches_ffrt(self, a2s):
        ncb = build_dblowup(a2s, 2, 2)
        assert len(ncb.classes) == len(ffrt_scan(a2s, 2, 3).stabilized_classes)

    def test_cap(self):
        with pytest.raises(CapExceeded):
            build_dblowup(orthant(4), 5, 3)

    def test_cover_trivial_group(self):
        ncb = build_cover_ncb(1, (1, 1), 2)
        assert len(ncb.classes) == 1 and ncb.classes[0].is_free

    def test_cover_a1_matches_dblowup(self, cover_a1, db_a1):
        assert len(cover_a1.cover.characters) == 2
        assert set(cover_a1.classes) == set(db_a1.classes)

    def test_cover_a2(self):
        ncb = build_cover_ncb(3, (1, 2), 2)
        assert len(ncb.cover.characters) == 3
        assert sorted(c for c, _, _ in ncb.cover.characters) == [0, 1, 2]
        assert set(ncb.classes) == set(build_dblowup(builtin("sing-A2").cone, 2, 1).classes)

    def test_wild(self):
        with pytest.raises(WildGroupOrder):
            build_cover_ncb(3, (1, 2), 3)

    def test_to_dict_is_canonical(self, db_a1):
        assert json.loads(dumps(db_a1.to_dict()))["end_algebra"]["closure_checked"] is True


class TestCertificate:
    def test_regular(self):
        cert = frobenius_certificate(build_dblowup(orthant(2), 2, 1), 1, 3)
        assert cert.verdict == CERTIFIED

    def test_a1_box6(self, db_a1):
        cert = frobenius_certificate(db_a1, 1, 6)
        assert cert.verdict == CERTIFIED and not cert.log["inconclusive"]
        assert sum(cert.projective_columns.values()) == 9 * len(db_a1.representatives)
        assert cert.log["columns"] == 18

    def test_schema_and_replay(self, db_a1):
        doc = json.loads(dumps(frobenius_certificate(db_a1, 1, 6).to_dict()))
        jsonschema.validate(doc, load_schema("certificate"))
        verdict, log = replay_certificate(doc)
        assert verdict == CERTIFIED
        assert dumps(log) == dumps(doc["log"])

    def test_corrupted_table(self, db_a1):
        doc = json.loads(dumps(frobenius_certificate(db_a1, 1, 6).to_dict()))
        row = next(r for r in doc["table"] if r["class"] == 0)
        row["class"] = 1
        verdict, log = replay_certificate(doc)
        assert verdict == FAIL
        assert all(m["residue"] == row["residue"] and m["rep"] == row["rep"] for m in log["mismatches"])

    def test_corrupted_translation(self, db_a1):
        doc = json.loads(dumps(frobenius_certificate(db_a1, 1, 4).to_dict()))
        doc["table"][3]["translation"][0] += 1
        assert replay_certificate(doc)[0] == FAIL

    def test_missing_residue(self, db_a1):
        doc = json.loads(dumps(frobenius_certificate(db_a1, 1, 2).to_dict()))
        del doc["table"][0]
        verdict, log = replay_certificate(doc)
        assert verdict == FAIL and len(log["missing"]) == 1

    def test_small_box(self, db_a1):
        assert frobenius_certificate(db_a1, 1, 0).verdict == INCONCLUSIVE

    def test_requires_f_steady(self, a1):
        with pytest.raises(NotFSteady):
            frobenius_certificate(build_dblowup(a1, 3, 0), 1, 6)

    def test_a2(self, a2s):
        cert = frobenius_certificate(build_dblowup(a2s, 2, 1), 1, 6)
        assert cert.verdict == CERTIFIED
        assert sum(cert.projective_columns.values()) == 4 * 3


class TestDiagrams:
    def test_projection(self, db_a1):
        rep = verify_projection_compat(db_a1, 1, 6)
        assert rep.verdict == CERTIFIED and rep.counts_match

    def test_projection_trivial_and_small_box(self, db_a1):
        assert verify_projection_compat(build_dblowup(orthant(2), 2, 1), 1, 3).verdict == CERTIFIED
        assert verify_projection_compat(db_a1, 1, 0).verdict == INCONCLUSIVE

    def test_iteration(self, db_a1):
        rep = verify_frobenius_iteration(db_a1, 1, 1)
        assert rep.verdict == CERTIFIED and rep.checked_residues == 2 * 81
        assert verify_frobenius_iteration(db_a1, 1, 0).verdict == CERTIFIED
        assert verify_frobenius_iteration(build_dblowup(orthant(2), 2, 1), 1, 1).verdict == CERTIFIED

    @pytest.mark.parametrize("name,p", [("sing-A2", 2), ("cyclic-5-1-2", 2), ("square-cone", 2), ("A3", 3)])
    def test_iteration_builtins(self, name, p):
        ncb = build_dblowup(builtin(name).cone, p, 1)
        rep = verify_frobenius_iteration(ncb, 1, 1)
        assert rep.decomposition_level and rep.table_level

    def test_cover(self, cover_a1):
        rep = verify_cover_coforgetful(cover_a1, 1, 6)
        assert rep.verdict == CERTIFIED and rep.checked > 0
        assert verify_cover_coforgetful(build_cover_ncb(1, (1, 1), 3), 1, 3).verdict == CERTIFIED
        assert verify_cover_coforgetful(build_cover_ncb(3, (1, 2), 2), 1, 6).verdict == CERTIFIED

    def test_cover_negative_control(self, cover_a1):
        # dropping a character coset leaves O_Y incompletely decomposed
        cov = cover_a1.cover
        bad = CoverData(cov.n, cov.weights, cov.basis, cov.inverse, [cov.characters[0]] * 2)
        broken = type(cover_a1)(cover_a1.cone, cover_a1.representatives, cover_a1.multiplicities,
                                cover_a1.end_algebra, cover_a1.origin, cover=bad)
        assert verify_cover_coforgetful(broken, 1, 3).verdict == FAIL
        # an integral shift of an offset translates a character module: still isomorphic
        c, v, s = cov.characters[1]
        moved = CoverData(cov.n, cov.weights, cov.basis, cov.inverse,
                          [cov.characters[0], (c, v, tuple(x + 1 for x in s))])
        ok = type(cover_a1)(cover_a1.cone, cover_a1.representatives, cover_a1.multiplicities,
                            cover_a1.end_algebra, cover_a1.origin, cover=moved)
        assert verify_cover_coforgetful(ok, 1, 3).verdict == CERTIFIED

    def test_not_a_cover(self, db_a1):
        with pytest.raises(NotACover):
            verify_cover_coforgetful(db_a1, 1, 6)
