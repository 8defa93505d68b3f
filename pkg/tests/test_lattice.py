import itertools

import pytest
import sympy
from hypothesis import given, strategies as st
from sympy.matrices.normalforms import smith_normal_form

from webhol.errors import ArityError, CapExceeded
from webhol.lattice import (
    IntegerLattice,
    ReductiveProfile,
    codimension,
    contains_mod,
    hermite_normal_form,
    lattice_contains,
    mod_image_order,
    mod_m_image,
    rank_r,
    smith_diagonal,
    span_z,
)
from webhol.typevec import TypeSet

from conftest import BAEZ_SAWIN, SIX, ts

int_matrices = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=1, max_size=5)
)
type_sets = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=1, max_size=6).map(
        lambda rows: TypeSet.unique(rows, arity=n)
    )
)


def sympy_invariants(rows, n):
    M = sympy.Matrix(rows)
    if M.rank() == 0:
        return []
    D = smith_normal_form(M, domain=sympy.ZZ)
    return sorted(abs(int(D[i, i])) for i in range(min(D.shape)) if D[i, i] != 0)


@given(int_matrices)
def test_smith_matches_sympy(rows):
    n = len(rows[0])
    assert sorted(smith_diagonal(rows, n)) == sympy_invariants(rows, n)


@given(int_matrices)
def test_smith_divisibility_chain(rows):
    d = smith_diagonal(rows, len(rows[0]))
    assert all(b % a == 0 for a, b in zip(d, d[1:]))


@given(int_matrices)
def test_hnf_shape_and_rank(rows):
    n = len(rows[0])
    H = hermite_normal_form(rows, n)
    assert len(H) == sympy.Matrix(rows).rank()
    pivots = [next(k for k, a in enumerate(r) if a) for r in H]
    assert pivots == sorted(set(pivots))
    for i, r in enumerate(H):
        p = r[pivots[i]]
        assert p > 0
        for j in range(i):
            assert 0 <= H[j][pivots[i]] < p


@given(int_matrices, st.lists(st.integers(-3, 3), min_size=5, max_size=5))
def test_hnf_spans_same_lattice(rows, coeffs):
    n = len(rows[0])
    L = IntegerLattice.from_generators(rows, n)
    for r in rows:
        assert r in L
    combo = [sum(c * r[k] for c, r in zip(coeffs, rows)) for k in range(n)]
    assert combo in L
    for b in L.basis:
        # every basis row is an integer combination of the inputs
        assert lattice_contains(IntegerLattice.from_generators(rows, n), b)


def test_membership_examples():
    L = IntegerLattice.from_generators([[2, 0], [0, 3]], 2)
    assert [4, 9] in L
    assert [1, 0] not in L
    assert contains_mod(L, [1, 0], 1)
    assert not contains_mod(L, [1, 0], 4)
    assert contains_mod(L, [1, 0], 2) is False
    with pytest.raises(ArityError):
        lattice_contains(L, [1])


def test_baez_sawin_rank_and_codimension():
    V = ts(BAEZ_SAWIN)
    assert rank_r(V) == 3
    assert codimension(V, ReductiveProfile(0, 1)) == 1
    assert codimension(V, ReductiveProfile(3, 0)) == 0
    assert codimension(ts("1100", "0011"), ReductiveProfile(3, 1)) == 2 * 3 + 2


def test_six_mod_images():
    V = ts(SIX)
    two, three = mod_m_image(V, 2), mod_m_image(V, 3)
    assert (two.order, two.index) == (8, 2)
    assert (three.order, three.index) == (81, 1)
    # the all-ones parity: every generator has even weight
    assert (1, 0, 0, 0) not in two
    assert (1, 1, 0, 0) in two


@given(type_sets, st.integers(2, 5))
def test_mod_image_enumeration_matches_invariants(V, m):
    # mod_m_image raises if enumeration and the invariant-factor formula differ
    img = mod_m_image(V, m)
    assert img.order == mod_image_order(span_z(V), m)
    for z in itertools.islice(itertools.product(range(m), repeat=V.arity), 50):
        assert (z in img) == contains_mod(span_z(V), z, m)


def test_mod_image_cap():
    V = TypeSet([[1] * 8])
    with pytest.raises(CapExceeded):
        mod_m_image(V, 10, cap=1000)
    with pytest.raises(ValueError):
        mod_m_image(V, 1)


def test_profile_validation():
    with pytest.raises(ValueError):
        ReductiveProfile(-1, 0)


def test_report():
    r = span_z(ts(BAEZ_SAWIN)).report()
    assert r["rank"] == 3 and r["invariant_factors"] == [1, 1, 1]
