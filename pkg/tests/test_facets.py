import pytest
from hypothesis import given, strategies as st

from sheafmorse.errors import ValidationError
from sheafmorse.facets import (ConormalPoint1D, ConstructibleOpen, RefinementMap, SimplicialComplex,
                               all_constructible_opens, open_arc, orientation_1d, pullback_open, standard_complex,
                               subdivide_1d, subdivide_1d_times)

FIXTURES = [("path", 1), ("path", 4), ("circle", 3), ("circle", 6), ("simplex", 2), ("sphere_boundary", 2)]


def test_fixture_sizes():
    assert len(standard_complex("path", 3).poset) == 5
    assert len(standard_complex("circle", 3).poset) == 6
    assert len(standard_complex("simplex", 2).poset) == 7
    assert len(standard_complex("sphere_boundary", 2).poset) == 14


@pytest.mark.parametrize("name,n", FIXTURES)
def test_face_order_is_a_partial_order(name, n):
    P = standard_complex(name, n).poset
    for i in range(len(P)):
        assert i in P.down[i] and i in P.up[i]
        for j in P.down[i]:
            assert i in P.up[j]
            assert P.down[j] <= P.down[i]
            if j != i:
                assert i not in P.down[j]


@pytest.mark.parametrize("name,n", FIXTURES)
def test_stars_are_open_and_opens_are_unions_of_stars(name, n):
    P = standard_complex(name, n).poset
    for s in range(len(P)):
        ConstructibleOpen.star(P, s)
    for U in all_constructible_opens(P):
        union = frozenset().union(*(P.star(s) for s in U.members))
        assert union == U.members


def test_non_up_closed_set_names_the_stratum():
    P = standard_complex("path", 3).poset
    with pytest.raises(ValidationError, match="'2'.*'1|2'"):
        ConstructibleOpen.of(P, [("2",)])


def test_missing_face_rejected():
    with pytest.raises(ValidationError):
        SimplicialComplex(["a", "b", "c"], [("a", "b", "c")])


@pytest.mark.parametrize("name,n", [("path", 2), ("path", 4), ("circle", 3), ("circle", 5)])
@pytest.mark.parametrize("times", [1, 2])
def test_subdivision_refinement_is_valid(name, n, times):
    K = standard_complex(name, n)
    K2, r = subdivide_1d_times(K, times)
    assert r.is_valid()
    assert r.target == K.poset
    assert len(K2.edges()) == len(K.edges()) * 2 ** times


@given(st.integers(0, 2 ** 12))
def test_pullback_of_opens_is_open_and_monotone(bits):
    K = standard_complex("circle", 4)
    _, r = subdivide_1d(K)
    opens = all_constructible_opens(K.poset)
    U = opens[bits % len(opens)]
    V = opens[(bits // 7) % len(opens)]
    assert pullback_open(r, U | V).members == (pullback_open(r, U) | pullback_open(r, V)).members
    assert pullback_open(r, U & V).members == (pullback_open(r, U) & pullback_open(r, V)).members


def test_non_monotone_map_rejected():
    K = standard_complex("path", 2)
    P = K.poset
    with pytest.raises(ValidationError, match="not monotone"):
        RefinementMap(P, P, {("1",): ("1",), ("2",): ("2",), ("1", "2"): ("1",)})


def test_orientation_and_endpoint_rule():
    ori = orientation_1d(standard_complex("path", 3))
    assert ori.walk == ("1", "2", "3")
    assert ori.conormal_points("1") == [ConormalPoint1D("1", "-")]
    assert ori.conormal_points("3") == [ConormalPoint1D("3", "+")]
    assert len(ori.conormal_points("2")) == 2
    lonely = orientation_1d(standard_complex("path", 1))
    assert lonely.conormal_points("1") == []
    cyc = orientation_1d(standard_complex("circle", 3))
    assert cyc.right["c"] == "a" and cyc.left["a"] == "c"


def test_open_arcs():
    K = standard_complex("circle", 4)
    assert open_arc(K, "a", "b").strata() == [("a", "b")]
    assert len(open_arc(K, "a", "a")) == 7
    with pytest.raises(ValidationError):
        open_arc(standard_complex("path", 3), "3", "1")


def test_bad_conormal_sign():
    with pytest.raises(ValidationError):
        ConormalPoint1D("a", "x")


def test_complex_json_round_trip():
    for name, n in FIXTURES:
        K = standard_complex(name, n)
        assert SimplicialComplex.from_json(K.to_json()) == K
