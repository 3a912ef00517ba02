import pytest
from hypothesis import given, strategies as st

from sheafmorse.errors import ValidationError
from sheafmorse.facets import ConstructibleOpen, all_constructible_opens, standard_complex, subdivide_1d
from sheafmorse.microsheaf import canonical_inclusion, indicator_resolution, skyscraper
from sheafmorse.twisted import (HomComplex, Morphism, TwistedComplex, compose, direct_sum, evaluations,
                                is_exceptional, is_zero_object, mapping_cone, minimize, pullback, representable,
                                shift, verify_quasi_iso)
from sheafmorse.zchain import CohomologyReport, IntegerMatrix, cohomology

K = standard_complex("circle", 4)
P = K.poset
OPENS = [U for U in all_constructible_opens(P) if len(U)]


def _obj(code):
    kind, a, b = code
    U = OPENS[a % len(OPENS)]
    if kind == 0:
        return indicator_resolution(U)
    if kind == 1:
        return shift(indicator_resolution(U), b % 3 - 1)
    if kind == 2:
        return skyscraper(P, a % len(P))
    V = OPENS[b % len(OPENS)] | U
    return mapping_cone(canonical_inclusion(U, V))


objects = st.tuples(st.integers(0, 3), st.integers(0, 500), st.integers(0, 500)).map(_obj)


def H(a, b):
    return cohomology(HomComplex(a, b).complex)


def _sum_reports(r1, r2):
    groups = {}
    for r in (r1, r2):
        for n, (rank, tors) in r.groups.items():
            k, t = groups.get(n, (0, ()))
            groups[n] = (k + rank, t + tors)
    return groups


def _invariants(r):
    # compare up to isomorphism: rank plus multiset of prime-power torsion pieces
    from sympy import factorint

    out = {}
    for n, (rank, tors) in r.groups.items() if isinstance(r, CohomologyReport) else r.items():
        pieces = sorted(p ** e for t in tors for p, e in factorint(t).items())
        out[n] = (rank, pieces)
    return out


@given(objects, objects, objects)
def test_hom_is_additive(a, b, c):
    assert _invariants(H(direct_sum(a, b), c)) == _invariants(_sum_reports(H(a, c), H(b, c)))
    assert _invariants(H(c, direct_sum(a, b))) == _invariants(_sum_reports(H(c, a), H(c, b)))


@given(objects, objects, st.integers(-2, 2))
def test_shift_moves_degrees(a, b, k):
    base = H(a, b)
    moved = H(a, shift(b, k))
    assert moved == CohomologyReport({n - k: g for n, g in base.groups.items()})


@given(objects)
def test_cone_of_identity_is_zero(a):
    assert is_zero_object(mapping_cone(Morphism.identity(a)))
    assert verify_quasi_iso(Morphism.identity(a))


@given(objects)
def test_minimize_is_a_homotopy_equivalence(a):
    m = minimize(a)
    assert len(m) <= len(a)
    m.validate()
    assert evaluations(m) == evaluations(a)
    for s in range(len(P)):
        assert H(representable(P, s), m) == H(representable(P, s), a)


@given(objects)
def test_hom_differential_squares_to_zero(a):
    C = HomComplex(a, a).complex
    assert (C.differential @ C.differential).is_zero()


@given(objects, objects, objects, st.data())
def test_leibniz_rule(a, b, c, data):
    Hab, Hbc = HomComplex(a, b), HomComplex(b, c)
    if not len(Hab) or not len(Hbc):
        return
    k1 = data.draw(st.integers(0, len(Hab) - 1))
    k2 = data.draw(st.integers(0, len(Hbc) - 1))
    f, g = Hab.morphism({k1: 1}), Hbc.morphism({k2: 1})
    lhs = compose(f, g).differential()
    sign = (-1) ** (g.degree % 2)
    rhs = compose(f, g.differential()).matrix + compose(f.differential(), g).matrix.scale(sign)
    assert lhs.matrix == rhs


def test_representables_are_exceptional():
    reps = [representable(P, s) for s in range(len(P))]
    ok, why = is_exceptional(reps)
    assert ok, why


def test_constant_on_circle_is_not_exceptional():
    ok, _ = is_exceptional([indicator_resolution(ConstructibleOpen.everything(P))])
    assert not ok


@given(objects)
def test_json_round_trip(a):
    b = TwistedComplex.from_json(P, a.to_json())
    assert b.strata == a.strata and b.degrees == a.degrees and b.differential == a.differential


def test_square_nonzero_rejected():
    Q = standard_complex("path", 2).poset
    gens = [(("1", "2"), 0), (("1",), 1), (("1",), 2)]
    with pytest.raises(ValidationError, match="square"):
        TwistedComplex(Q, gens, IntegerMatrix(3, 3, [(1, 0, 1), (2, 1, 1)]))


def test_wrong_direction_rejected():
    Q = standard_complex("path", 2).poset
    with pytest.raises(ValidationError, match="no morphism"):
        TwistedComplex(Q, [(("1",), 0), (("1", "2"), 1)], IntegerMatrix(2, 2, [(1, 0, 1)]))


@given(objects, objects)
def test_pullback_along_subdivision_is_fully_faithful(a, b):
    _, r = subdivide_1d(K)
    assert H(pullback(r, a), pullback(r, b)) == H(a, b)
