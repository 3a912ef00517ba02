import random

import pytest
from hypothesis import given, strategies as st

from sheafmorse.errors import ValidationError
from sheafmorse.oracles import dense_cohomology, random_complex
from sheafmorse.zchain import (ChainMap, CohomologyReport, IntegerComplex, IntegerMatrix, cocycle_class_is_zero,
                               cohomology, cohomology_basis, cone, is_acyclic, is_quasi_iso, reduce_complex,
                               smith_normal_form, solve_integer)

small_matrices = st.integers(1, 6).flatmap(
    lambda m: st.integers(1, 6).flatmap(
        lambda n: st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=m, max_size=m)))

seeds = st.integers(0, 10 ** 9)


def _complex(seed):
    degrees, dense = random_complex(random.Random(seed))
    return IntegerComplex(degrees, IntegerMatrix.from_dense(dense, len(degrees))), degrees, dense


@given(small_matrices)
def test_snf_divisibility_and_transforms(A):
    inv, U, V = smith_normal_form(A, transforms=True)
    assert all(d > 0 for d in inv)
    assert all(b % a == 0 for a, b in zip(inv, inv[1:]))
    assert inv == smith_normal_form(A)
    m, n = len(A), len(A[0])
    D = [[sum(U[i][k] * A[k][l] * V[l][j] for k in range(m) for l in range(n)) for j in range(n)] for i in range(m)]
    for i in range(m):
        for j in range(n):
            assert D[i][j] == (inv[i] if i == j and i < len(inv) else 0)


def test_snf_known():
    assert smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]) == [2, 6, 12]
    assert smith_normal_form([[0, 0], [0, 0]]) == []


@given(small_matrices, st.lists(st.integers(-3, 3), min_size=6, max_size=6))
def test_solve_integer(A, x0):
    M = IntegerMatrix.from_dense(A)
    x = {j: x0[j] for j in range(M.cols) if x0[j]}
    b = M.apply(x)
    sol = solve_integer(M, b)
    assert sol is not None and M.apply(sol) == b


def test_solve_integer_no_solution():
    assert solve_integer(IntegerMatrix.from_dense([[2]]), {0: 1}) is None


@given(seeds)
def test_cohomology_matches_dense_oracle(seed):
    C, degrees, dense = _complex(seed)
    assert cohomology(C) == CohomologyReport(dense_cohomology(degrees, dense))
    assert cohomology(C, reduce=False) == cohomology(C)


@given(seeds)
def test_euler_characteristic(seed):
    C, _, _ = _complex(seed)
    assert cohomology(C).euler_characteristic() == C.euler_characteristic()


@given(seeds)
def test_reduction_maps_are_chain_maps(seed):
    C, _, _ = _complex(seed)
    red = reduce_complex(C, track=True)
    D, Dc = C.differential, red.core.differential
    for k in range(len(red.core)):
        e = {k: 1}
        assert red.lift(Dc.apply(e)) == D.apply(red.lift(e))
    for g in range(len(C)):
        e = {g: 1}
        assert red.project(D.apply(e)) == Dc.apply(red.project(e))
    assert cohomology(red.core) == cohomology(C)


@given(seeds)
def test_cohomology_basis_classes_are_nonzero(seed):
    C, _, _ = _complex(seed)
    H = cohomology(C)
    for n in H.degrees():
        basis = cohomology_basis(C, n)
        assert len(basis) == H.rank(n)
        for z in basis:
            assert not C.differential.apply(z)
            assert not cocycle_class_is_zero(C, z)


def test_coboundaries_are_zero_classes():
    C = IntegerComplex([0, 1, 1], IntegerMatrix(3, 3, [(1, 0, 1), (2, 0, 3)]))
    assert cocycle_class_is_zero(C, {1: 1, 2: 3})
    assert not cocycle_class_is_zero(C, {1: 1})


def test_torsion():
    C = IntegerComplex([0, 1], IntegerMatrix(2, 2, [(1, 0, 6)]))
    assert cohomology(C) == CohomologyReport({1: (0, (6,))})
    assert not is_acyclic(C)


def test_nonzero_square_is_rejected():
    with pytest.raises(ValidationError):
        IntegerComplex([0, 1, 2], IntegerMatrix(3, 3, [(1, 0, 1), (2, 1, 1)]))


def test_degree_mismatch_is_rejected():
    with pytest.raises(ValidationError):
        IntegerComplex([0, 0], IntegerMatrix(2, 2, [(1, 0, 1)]))


def test_report_rejects_bad_torsion_chain():
    with pytest.raises(ValidationError):
        CohomologyReport({0: (0, (2, 3))})


@given(seeds)
def test_identity_is_quasi_iso_and_cone_acyclic(seed):
    C, _, _ = _complex(seed)
    f = ChainMap.identity(C)
    assert is_quasi_iso(f)
    assert is_acyclic(cone(f))


def test_report_json_round_trip():
    r = CohomologyReport({-1: (2, (2, 4)), 3: (1, ())}, level=2)
    assert CohomologyReport.from_json(r.to_json()) == r
    assert r.to_json()["level"] == 2
