import itertools

import pytest
import sympy
from sympy.matrices.normalforms import hermite_normal_form
from hypothesis import given, strategies as st

from frobken.errors import InfiniteIndex, NotFullDimensional, NotPointed, RankDeficient
from frobken.lattice import (
    ConeData,
    LatticePresentation,
    column_hnf,
    enumerate_points,
    facet_normals,
    hnf_coset_reduce,
    matvec,
    normalize_lattice,
    orthant,
    rays_from_facets,
    sublattice_basis,
)
from frobken.ringspec import builtin

from conftest import BUILTINS
from oracles import brute_facets, cube_points

SQUARE = [(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)]


def _in_column_lattice(v, basis):
    try:
        sol, params = basis.gauss_jordan_solve(v)
    except ValueError:
        return False
    return params.shape[0] == 0 and all(c.is_integer for c in sol)


class TestFacetNormals:
    def test_orthant(self):
        assert facet_normals([(1, 0), (0, 1)]) == ((0, 1), (1, 0))
        assert sorted(orthant(2).facets) == [(0, 1), (1, 0)]

    def test_planar_example(self):
        assert facet_normals([(1, 0), (1, 2)]) == ((0, 1), (2, -1))

    def test_square_cone_has_four_facets(self):
        A = facet_normals(SQUARE)
        assert len(A) == 4
        assert list(A) == brute_facets(SQUARE)

    @pytest.mark.parametrize("rays", [
        [(1, 0), (1, 2)], [(0, 1), (2, -1)], [(0, 1), (3, -1)], SQUARE,
        [(1, 0, 0), (0, 1, 0), (0, 0, 1)], [(1, 0, 0), (0, 1, 0), (1, 1, 3)],
    ])
    def test_matches_candidate_search(self, rays):
        assert list(facet_normals(rays)) == brute_facets(rays)

    def test_rays_roundtrip(self):
        for name in BUILTINS:
            cone = builtin(name).cone
            again = facet_normals(rays_from_facets(cone.facets))
            assert again == cone.facets

    def test_dimension_one(self):
        assert facet_normals([(1,)]) == ((1,),)

    def test_errors(self):
        with pytest.raises(NotFullDimensional):
            facet_normals([(1, 0, 0), (0, 1, 0)])
        with pytest.raises(NotPointed):
            facet_normals([(1, 0), (-1, 0), (0, 1)])

    def test_supporting_and_cone_equality_by_sampling(self):
        for name in BUILTINS:
            cone = builtin(name).cone
            for a in cone.facets:
                assert all(sum(x * y for x, y in zip(a, r)) >= 0 for r in cone.rays)
            # small nonnegative ray combinations lie in {Ax >= 0}; points outside fail a row
            for lam in itertools.product(range(3), repeat=len(cone.rays)):
                x = tuple(sum(l * r[i] for l, r in zip(lam, cone.rays)) for i in range(cone.dim))
                assert cone.contains(x)


class TestHNF:
    @pytest.mark.parametrize("A", [
        ((1, 0), (1, 2)), ((0, 1), (2, -1)), ((1, 0), (1, 3)),
        ((1, 0, 0), (0, 1, 0), (0, 0, 1)), tuple(facet_normals(SQUARE)),
        ((2, 3), (4, -1), (5, 5)),
    ])
    def test_column_hnf_transform(self, A):
        W, U, pivots = column_hnf(A)
        m, d = len(A), len(A[0])
        AU = tuple(tuple(sum(A[i][k] * U[k][j] for k in range(d)) for j in range(d)) for i in range(m))
        assert AU == W
        assert abs(sympy.Matrix(U).det()) == 1
        # same column lattice as sympy's normal form
        ours = sympy.Matrix(W)[:, : len(pivots)]
        theirs = hermite_normal_form(sympy.Matrix(A))
        for X, Y in ((ours, theirs), (theirs, ours)):
            for j in range(X.shape[1]):
                assert _in_column_lattice(X[:, j], Y)

    def test_examples(self):
        assert hnf_coset_reduce((0, 0), ((1, 0), (0, 1))) == (0, 0)
        assert hnf_coset_reduce((3, -1), ((1, 0), (0, 1))) == (0, 0)

    def test_rank_deficient(self):
        with pytest.raises(RankDeficient):
            hnf_coset_reduce((1, 2), ((1, 1), (2, 2)))

    def test_same_residue_iff_same_coset(self):
        # oracle: b - b' in A Z^d decided by exact rational solving in sympy
        A = tuple(facet_normals(SQUARE))
        M = sympy.Matrix(A)
        bs = list(itertools.product(range(-1, 2), repeat=4))
        red = {b: hnf_coset_reduce(b, A) for b in bs}
        for b1, b2 in itertools.combinations(bs[::5], 2):
            diff = sympy.Matrix([x - y for x, y in zip(b1, b2)])
            same = _in_column_lattice(diff, M)
            assert (red[b1] == red[b2]) == same, (b1, b2)

    @given(st.lists(st.integers(-20, 20), min_size=3, max_size=3),
           st.lists(st.integers(-5, 5), min_size=2, max_size=2))
    def test_coset_invariance_planar(self, b, z):
        A = ((1, 0), (1, 2), (0, 1))
        r = hnf_coset_reduce(tuple(b), A)
        shifted = tuple(bi + v for bi, v in zip(b, matvec(A, z)))
        assert hnf_coset_reduce(shifted, A) == r
        assert hnf_coset_reduce(r, A) == r


class TestEnumeration:
    def test_unit_box(self):
        A = ((1, 0), (0, 1))
        assert enumerate_points(A, (0, 0), 1) == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert enumerate_points(A, (1, 1), 0) == [(1, 1)]
        assert enumerate_points(A, (0, 0), -1) == []

    def test_a1_against_cube(self):
        cone = builtin("sing-A1").cone
        assert enumerate_points(cone.facets, (0, 0), 2) == cube_points(cone.facets, (0, 0), 2)

    @pytest.mark.parametrize("name", BUILTINS)
    def test_builtins_against_cube(self, name):
        A = builtin(name).cone.facets
        m = len(A)
        for N in range(5):
            for b in [(0,) * m, tuple(range(m)), tuple(-(i % 2) for i in range(m))]:
                if len(A[0]) == 4 and N > 2:
                    continue
                assert enumerate_points(A, b, N) == cube_points(A, b, N)


class TestNormalizeLattice:
    def test_trivial(self):
        U, cone = normalize_lattice(LatticePresentation(2), orthant(2).rays, "A2")
        assert U == ((1, 0), (0, 1))
        assert cone.facets == orthant(2).facets

    @pytest.mark.parametrize("n,w,facets,index", [
        (2, (1, 1), ((1, 0), (1, 2)), 2),
        (3, (1, 2), ((1, 0), (1, 3)), 3),
        (5, (1, 2), None, 5),
        (3, (1, 1, 1), None, 3),
    ])
    def test_cyclic(self, n, w, facets, index):
        d = len(w)
        pres = LatticePresentation(d, modulus=n, weights=w)
        assert pres.index() == index
        B = sublattice_basis(pres)
        assert abs(sympy.Matrix(B).det()) == index
        for v in itertools.product(range(-3, 4), repeat=d):
            in_L = sum(a * x for a, x in zip(w, v)) % n == 0
            y = sympy.Matrix(B).solve(sympy.Matrix(v))
            assert in_L == all(c.is_integer for c in y)
        U, cone = normalize_lattice(pres, orthant(d).rays)
        if facets is not None:
            assert cone.facets == facets
        # the transformed cone is the same set: U maps L ∩ orthant onto cone ∩ Z^d
        for v in itertools.product(range(0, 4), repeat=d):
            if sum(a * x for a, x in zip(w, v)) % n == 0:
                y = matvec(U, v)
                assert all(c.denominator == 1 for c in map(sympy.Rational, y))
                assert cone.contains(tuple(int(c) for c in y))

    def test_infinite_index(self):
        with pytest.raises(InfiniteIndex):
            sublattice_basis(LatticePresentation(2, basis=((1, 2), (2, 4))))

    def test_smoothness_flags(self):
        assert orthant(3).is_smooth()
        assert not builtin("sing-A1").cone.is_smooth()
        assert not ConeData.from_rays(SQUARE).is_smooth()
