import json
import random
import subprocess
import sys
from pathlib import Path

import pytest

from oracles.bar_bruteforce import bar_ranks, from_twisted
from sheafmorse.acceptance import recorded_circle_ranks, wrapped_circle_contexts
from sheafmorse.errors import ResourceLimitError, ValidationError
from sheafmorse.facets import ConormalPoint1D, ConstructibleOpen, standard_complex
from sheafmorse.limits import ceilings
from sheafmorse.microsheaf import arc_indicator, constant_sheaf, interval_casting_1d, skyscraper
from sheafmorse.theatre import (QuotientContext, StopSpec1D, auto_cast_1d, casting_independence,
                                casting_problems_1d, level_comparison, peel, quotient_hom, representable_collection,
                                right_orthogonal, stop_removal, tower_replacement)
from sheafmorse.twisted import HomComplex, pullback, representable
from sheafmorse.zchain import CohomologyReport, cohomology

HERE = Path(__file__).parent
Z0 = CohomologyReport({0: (1, ())})


@pytest.fixture(scope="module")
def path2():
    return auto_cast_1d(standard_complex("path", 2))


@pytest.fixture(scope="module")
def circle_ctx():
    return wrapped_circle_contexts()


def _bar_dict(report):
    return {d: r for d, (r, t) in report.groups.items()}


def test_level_zero_is_hom(path2):
    ctx = path2.context()
    P = path2.complex.poset
    for s in range(0, len(P), 2):
        for t in range(len(P)):
            a, b = representable(P, s), representable(P, t)
            assert quotient_hom(ctx, a, b, 0) == CohomologyReport(cohomology(HomComplex(a, b).complex).groups, 0)


def test_no_characters_means_no_quotient():
    K = standard_complex("path", 2)
    ac = auto_cast_1d(K)
    F = pullback(ac.refinement, arc_indicator(K, "1", "2"))
    G = pullback(ac.refinement, constant_sheaf(K.poset))
    want = cohomology(HomComplex(F, G).complex)
    empty = QuotientContext(ac.complex.poset, [])
    for level in (0, 3):
        assert quotient_hom(empty, F, G, level).groups == want.groups
    assert quotient_hom(ac.context(), F, G, 0).groups == want.groups


@pytest.mark.parametrize("level", [1, 2, 3])
def test_level_maps_inject_on_h0(path2, level):
    P = path2.complex.poset
    e = representable(P, path2.complex.edges()[0])
    assert level_comparison(path2.context(), e, e, level)


def _engine_vs_oracle(ctx, a, b, level):
    ranks, _ = bar_ranks([from_twisted(X) for X in ctx.objects], from_twisted(a), from_twisted(b), level)
    got = quotient_hom(ctx, a, b, level)
    assert all(not t for _, t in got.groups.values())
    assert _bar_dict(got) == ranks


@pytest.mark.parametrize("level", [0, 1, 2])
def test_bar_complex_agrees_with_brute_force_on_path(path2, level):
    P = path2.complex.poset
    rng = random.Random(level)
    for _ in range(4):
        a = representable(P, rng.randrange(len(P)))
        b = representable(P, rng.randrange(len(P)))
        _engine_vs_oracle(path2.context(), a, b, level)


@pytest.mark.parametrize("level", [1, 2, 3, 4])
def test_bar_complex_agrees_with_brute_force_on_circle(circle_ctx, level):
    ctx, e, _ = circle_ctx["coarse"]
    _engine_vs_oracle(ctx, e, e, level)


def test_bar_complex_agrees_with_brute_force_with_a_stop():
    p = ConormalPoint1D("2", "+")
    ac = auto_cast_1d(standard_complex("path", 3), [p])
    P = ac.complex.poset
    ctx = ac.context()
    F = pullback(ac.refinement, arc_indicator(standard_complex("path", 3), "1", "3"))
    for level in (0, 1):
        _engine_vs_oracle(ctx, representable(P, 0), F, level)


def test_recorded_circle_file_is_reproducible():
    out = subprocess.run([sys.executable, str(HERE / "oracles" / "freeze_circle_wrapped.py")],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout) == recorded_circle_ranks()


def test_character_order_does_not_matter(circle_ctx):
    ctx, e, _ = circle_ctx["coarse"]
    rev = QuotientContext(ctx.poset, list(reversed(ctx.characters)), ctx.stop)
    for level in (1, 2, 3):
        assert quotient_hom(rev, e, e, level) == quotient_hom(ctx, e, e, level)


def test_tower_agrees_with_bar_on_path(path2):
    P = path2.complex.poset
    e = representable(P, path2.complex.edges()[-1])
    T = tower_replacement(path2.context(), e, 10)
    assert T.stabilized
    assert cohomology(HomComplex(e, T.obj).complex) == Z0
    assert quotient_hom(path2.context(), e, e, 3).groups == Z0.groups
    assert right_orthogonal(path2.context(), T.obj)


def test_characters_are_killed(path2):
    ctx = path2.context()
    for X in path2.characters[:3]:
        assert not right_orthogonal(ctx, X.obj)
        for level in (1, 2, 3):
            # the truncation leaves at most one class, in degree -level
            got = quotient_hom(ctx, X.obj, X.obj, level)
            assert set(got.groups) <= {-level}
            assert got.rank(-level) == (1 if level % 2 == 0 else 0)


def test_bar_ceiling(circle_ctx):
    ctx, e, _ = circle_ctx["coarse"]
    with ceilings(bar=100):
        with pytest.raises(ResourceLimitError):
            quotient_hom(ctx, e, e, 4)


def test_casting_across_a_stop_is_invalid():
    K = standard_complex("path", 7)
    c = interval_casting_1d(K, ConormalPoint1D("4", "+"), 2)

    def problems(v, sign):
        return casting_problems_1d(c, StopSpec1D(K, frozenset({ConormalPoint1D(v, sign)})))

    assert casting_problems_1d(c, StopSpec1D(K, frozenset())) == []
    # only stop points pointing in the sweep direction block it
    for v in ("2", "3", "5", "6"):
        assert problems(v, "+")
        assert not problems(v, "-")
    assert not problems("1", "-") and not problems("4", "-")


def test_stop_removal_matches_a_fresh_context():
    K = standard_complex("path", 2)
    big = auto_cast_1d(K, [ConormalPoint1D("1", "-"), ConormalPoint1D("2", "+")])
    small = auto_cast_1d(K, [ConormalPoint1D("2", "+")])
    moved = stop_removal(big.context(), small.stop)
    assert len(moved) == len(small.context())
    F = pullback(small.refinement, constant_sheaf(K.poset))
    for level in (0, 1, 2):
        assert quotient_hom(moved, F, F, level) == quotient_hom(small.context(), F, F, level)
    with pytest.raises(ValidationError):
        stop_removal(small.context(), big.stop)


def test_peel_does_not_depend_on_tie_breaking():
    K = standard_complex("circle", 4)
    P = K.poset
    A, names = representable_collection(P)
    F = arc_indicator(K, "a", "d")
    base = peel(A, F, names)
    rng = random.Random(3)
    for _ in range(4):
        shuffled = names[:]
        rng.shuffle(shuffled)
        rep = peel(A, F, shuffled)
        assert rep.generated == base.generated
        assert {s.index: s.multiplicity for s in rep.steps} == {s.index: s.multiplicity for s in base.steps}


def test_peel_missing_representable_is_not_generated():
    K = standard_complex("path", 2)
    P = K.poset
    A = [representable(P, ("1",)), representable(P, ("1", "2"))]
    rep = peel(A, skyscraper(P, ("2",)), ["1", "1|2"])
    assert not rep.generated and rep.residual_size > 0


def test_peel_rejects_non_exceptional_input():
    P = standard_complex("circle", 3).poset
    with pytest.raises(ValidationError):
        peel([constant_sheaf(P)], constant_sheaf(P))


def test_independence_of_unrelated_objects_is_indeterminate():
    p = ConormalPoint1D("2", "+")
    ac = auto_cast_1d(standard_complex("path", 3), [p])
    K2 = ac.complex
    from sheafmorse.theatre import morse_character

    X = morse_character(interval_casting_1d(K2, p, 1))
    assert casting_independence(ac.context(), X, representable(K2.poset, 0), 1).verdict == "indeterminate"
    assert casting_independence(ac.context(), X, X, 0).verdict == "isomorphic_at_level_N"


def test_open_tower_on_circle_reports_no_stabilization(circle_ctx):
    ctx, e, _ = circle_ctx["coarse"]
    T = tower_replacement(ctx, e, 3)
    assert not T.stabilized and T.iterations == 3


# -- named cases -----------------------------------------------------------------


def test_character_counts():
    K = standard_complex("circle", 3)
    ac = auto_cast_1d(K, [ConormalPoint1D("a", "+")])
    assert len(ac.characters) == 2 * len(ac.complex.vertices) - 1
    full = StopSpec1D(K, frozenset()).all_points()
    ac = auto_cast_1d(K, full)
    fresh = len(ac.complex.vertices) - len(K.vertices)
    assert len(ac.characters) == 2 * fresh
    # path ends carry only their outward point
    assert len(auto_cast_1d(standard_complex("path", 2)).characters) == 8


def test_minimal_castings_around_original_vertices_are_valid():
    from sheafmorse.facets import subdivide_1d_times

    K = standard_complex("circle", 3)
    K2, _ = subdivide_1d_times(K, 2)
    stop = StopSpec1D(K, frozenset(StopSpec1D(K, frozenset()).all_points())).carried(K2)
    for v in K.vertices:
        for sign in "+-":
            c = interval_casting_1d(K2, ConormalPoint1D(v, sign), 1)
            assert casting_problems_1d(c, stop) == []


def test_equal_opens_give_the_zero_character():
    from sheafmorse.microsheaf import Casting
    from sheafmorse.theatre import morse_character
    from sheafmorse.twisted import is_zero_object

    P = standard_complex("path", 3).poset
    U = ConstructibleOpen.star(P, ("2",))
    assert is_zero_object(morse_character(Casting(U, U)).obj)


def test_tower_of_an_orthogonal_object_is_immediate(path2):
    P = path2.complex.poset
    T = tower_replacement(path2.context(), representable(P, path2.complex.edges()[0]), 10)
    again = tower_replacement(path2.context(), T.obj, 10)
    assert again.stabilized and again.iterations == 0 and again.obj is T.obj


def test_peel_of_a_representable_takes_one_step():
    P = standard_complex("circle", 3).poset
    A, names = representable_collection(P)
    s = P.idx(("a", "b"))
    rep = peel(A, representable(P, s), names)
    nonzero = [(st.index, st.multiplicity) for st in rep.steps if not st.multiplicity.is_zero()]
    assert nonzero == [(s, Z0)] and rep.generated and rep.residual_size == 0


def test_removing_the_whole_stop_on_the_interval():
    K = standard_complex("path", 2)
    full = auto_cast_1d(K, StopSpec1D(K, frozenset()).all_points())
    P = full.complex.poset
    e = representable(P, full.complex.edges()[0])
    before = quotient_hom(full.context(), e, e, 3)
    assert before.groups == Z0.groups
    all_at_once = stop_removal(full.context(), [])
    pts = sorted(full.stop.points, key=str)
    one_by_one = full.context()
    for k in range(len(pts)):
        one_by_one = stop_removal(one_by_one, pts[k + 1:])
    for level in (1, 2, 3):
        a = quotient_hom(all_at_once, e, e, level)
        assert a == quotient_hom(one_by_one, e, e, level)
    assert quotient_hom(all_at_once, e, e, 3).groups == Z0.groups
    assert stop_removal(full.context(), full.stop).characters == full.context().characters
