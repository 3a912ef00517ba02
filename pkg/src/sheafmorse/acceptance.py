"""The acceptance suite, shared by ``sheafmorse selftest`` and the test suite.

Each check returns a ``CheckResult``; nothing here raises on a failed check.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from importlib import resources
from typing import Callable

from .facets import (ConormalPoint1D, ConstructibleOpen, SimplicialComplex, all_constructible_opens, open_arc,
                     orientation_1d, standard_complex, subdivide_1d, subdivide_1d_times)
from .microsheaf import (arc_indicator, augmentation, canonical_inclusion, comparison_map, constant_sheaf,
                         indicator_resolution, interval_casting_1d, local_system, microsupport_1d, sections,
                         skyscraper)
from .theatre import (QuotientContext, StopSpec1D, auto_cast_1d, cast_point_1d, casting_independence,
                      casting_problems_1d, morse_character, peel, quotient_hom, representable_collection,
                      right_orthogonal, tower_replacement)
from .twisted import (HomComplex, direct_sum, mapping_cone, representable, shift, verify_quasi_iso)
from .zchain import CohomologyReport, IntegerComplex, IntegerMatrix, cohomology, smith_normal_form


@dataclass
class CheckResult:
    number: int
    title: str
    ok: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.number:2d} {self.title}: {self.detail}"


Z0 = CohomologyReport({0: (1, ())})


def _pt(v: str, s: str) -> ConormalPoint1D:
    return ConormalPoint1D(v, s)


# 1 ---------------------------------------------------------------------------


def check_star_hom_table() -> CheckResult:
    bad = []
    count = 0
    for name, n in (("path", 3), ("circle", 3), ("simplex", 2)):
        P = standard_complex(name, n).poset
        reps = [representable(P, s) for s in range(len(P))]
        for s in range(len(P)):
            for t in range(len(P)):
                got = cohomology(HomComplex(reps[s], reps[t]).complex)
                want = Z0 if t in P.down[s] else CohomologyReport({})
                count += 1
                if got != want:
                    bad.append(f"{name}{n}: hom(P_{P.key(s)}, P_{P.key(t)}) = {got}")
    return CheckResult(1, "star Hom table", not bad, f"{count} ordered pairs" if not bad else "; ".join(bad[:3]))


# 2 ---------------------------------------------------------------------------

FIXTURES = (("path", 3), ("path", 5), ("circle", 3), ("circle", 5), ("simplex", 2), ("simplex", 3),
            ("sphere_boundary", 1), ("sphere_boundary", 2))


def check_indicator_representable() -> CheckResult:
    bad = []
    count = 0
    for name, n in FIXTURES:
        P = standard_complex(name, n).poset
        for s in range(len(P)):
            count += 1
            if not verify_quasi_iso(augmentation(P, s)):
                bad.append(f"{name}{n}:{P.key(s)}")
    return CheckResult(2, "indicator resolution of a star vs representable", not bad,
                       f"{count} strata" if not bad else "failed at " + ", ".join(bad[:5]))


# 3 ---------------------------------------------------------------------------


def check_circle_cohomology() -> CheckResult:
    from .oracles import circle_cochain_cohomology

    bad = []
    for n in (3, 5, 8):
        P = standard_complex("circle", n).poset
        got = sections(ConstructibleOpen.everything(P), constant_sheaf(P))
        oracle = CohomologyReport(circle_cochain_cohomology(n))
        want = CohomologyReport({0: (1, ()), 1: (1, ())})
        if got != oracle or got != want:
            bad.append(f"circle{n}: {got} (oracle {oracle})")
    return CheckResult(3, "circle cohomology of the constant sheaf", not bad, "n = 3, 5, 8" if not bad else "; ".join(bad))


# 4 ---------------------------------------------------------------------------


def check_locally_constant_microsupport() -> CheckResult:
    bad = []
    for n in (3, 4, 5):
        K = standard_complex("circle", n)
        for label, F in (("constant", constant_sheaf(K.poset)), ("monodromy 1", local_system(K, 1)),
                         ("monodromy -1", local_system(K, -1))):
            ms = microsupport_1d(F)
            if ms:
                bad.append(f"circle{n} {label}: {[str(p) for p in ms]}")
    return CheckResult(4, "locally constant sheaves have empty microsupport", not bad,
                       "circles 3, 4, 5" if not bad else "; ".join(bad))


# 5 ---------------------------------------------------------------------------


def _arcs(K: SimplicialComplex) -> list[tuple[str, str]]:
    ori = orientation_1d(K)
    out = []
    for a in ori.walk:
        cur = ori.right[a]
        while cur is not None:
            out.append((a, cur))
            if cur == a:
                break
            cur = ori.right[cur]
    return out


def check_outward_conormal_law() -> CheckResult:
    bad = []
    count = 0
    for name, n in (("path", 3), ("circle", 3)):
        K, _ = subdivide_1d(standard_complex(name, n))
        for a, b in _arcs(K):
            count += 1
            got = set(microsupport_1d(arc_indicator(K, a, b)))
            want = {_pt(a, "-"), _pt(b, "+")}
            if got != want:
                bad.append(f"{name}{n}' arc ({a},{b}): {sorted(map(str, got))}")
    return CheckResult(5, "outward conormal law for open arcs", not bad,
                       f"{count} arcs" if not bad else "; ".join(bad[:3]))


# 6 ---------------------------------------------------------------------------


def check_refinement_compatibility() -> CheckResult:
    bad = []
    count = 0
    for name, n in (("path", 3), ("circle", 3)):
        K = standard_complex(name, n)
        _, r = subdivide_1d(K)
        for U in all_constructible_opens(K.poset):
            count += 1
            if not verify_quasi_iso(comparison_map(r, U)):
                bad.append(f"{name}{n}: {[K.poset.key(s) for s in sorted(U.members)]}")
    return CheckResult(6, "refinement comparison maps are quasi-isomorphisms", not bad,
                       f"{count} opens (P5 -> P3, C6 -> C3)" if not bad else "; ".join(bad[:3]))


# 7 ---------------------------------------------------------------------------


def check_interval_wrapped() -> CheckResult:
    bad = []
    notes = []
    for n in (2, 3):
        ac = auto_cast_1d(standard_complex("path", n))
        ctx = ac.context()
        P = ac.complex.poset
        e = representable(P, ac.complex.edges()[0])
        vals = [quotient_hom(ctx, e, e, N) for N in range(4)]
        first = next((N for N, v in enumerate(vals) if v == Z0), None)
        if vals[3] != Z0 or first is None or any(v != Z0 for v in vals[first:]):
            bad.append(f"path{n}: levels 0..3 give {[str(v) for v in vals]}")
        T = tower_replacement(ctx, e, 10)
        tower_hom = cohomology(HomComplex(e, T.obj).complex)
        if not T.stabilized or tower_hom != Z0:
            bad.append(f"path{n}: tower stabilized={T.stabilized}, hom = {tower_hom}")
        notes.append(f"path{n}: stable from N={first}, tower {T.iterations} steps")
    return CheckResult(7, "interval wrapped endomorphisms", not bad, "; ".join(notes) if not bad else "; ".join(bad))


# 8 ---------------------------------------------------------------------------


def wrapped_circle_contexts() -> dict[str, tuple[QuotientContext, object, str]]:
    """The two circle contexts with empty stop whose bar ranks are recorded.

    ``auto_cast`` is the standard recipe on the double subdivision of the
    3-gon; ``coarse`` casts one character per conormal point of the 3-gon
    itself (on its subdivision, pushed forward), which presents the same
    quotient with fewer characters so that winding words are short.
    """
    out = {}
    K = standard_complex("circle", 3)
    ac = auto_cast_1d(K)
    P = ac.complex.poset
    e = ac.complex.edges()[0]
    out["auto_cast"] = (ac.context(), representable(P, e), P.key(P.idx(e)))
    stop = StopSpec1D(K, frozenset())
    chars = [cast_point_1d(K, p, stop) for p in stop.all_points()]
    e0 = K.edges()[0]
    out["coarse"] = (QuotientContext(K.poset, chars, stop), representable(K.poset, e0),
                     K.poset.key(K.poset.idx(e0)))
    return out


def recorded_circle_ranks() -> dict:
    text = resources.files("sheafmorse").joinpath("data/circle_wrapped.json").read_text(encoding="utf-8")
    return json.loads(text)


def check_circle_wrapped() -> CheckResult:
    rec = recorded_circle_ranks()
    bad = []
    notes = []
    for name, (ctx, e, key) in wrapped_circle_contexts().items():
        want = rec["contexts"][name]
        if want["edge"] != key:
            bad.append(f"{name}: recorded edge {want['edge']} but computed {key}")
            continue
        ranks = []
        for N in rec["levels"]:
            got = quotient_hom(ctx, e, e, N)
            expect = {int(d): r for d, r in want["ranks"][str(N)].items()}
            free = all(not t for _, t in got.groups.values())
            have = {d: r for d, (r, _) in got.groups.items()}
            if have != expect or not free or set(have) - {0}:
                bad.append(f"{name} N={N}: {got}, recorded {expect}")
            ranks.append(got.rank(0))
        notes.append(f"{name} H^0 ranks {ranks}")
    return CheckResult(8, "circle wrapped growth against recorded bar ranks", not bad,
                       "; ".join(notes) if not bad else "; ".join(bad))


# 9 ---------------------------------------------------------------------------


def kernel_corpus() -> list[tuple[str, SimplicialComplex, frozenset, object]]:
    """Twenty objects built from indicators, with the stop each is tested against."""
    out = []
    C4 = standard_complex("circle", 4)
    lam_c = frozenset({_pt("a", "-"), _pt("c", "+")})
    P = C4.poset
    iac = indicator_resolution(open_arc(C4, "a", "c"))
    iab = indicator_resolution(open_arc(C4, "a", "b"))
    incl = canonical_inclusion(open_arc(C4, "a", "b"), open_arc(C4, "a", "c"), iab, iac)
    objs_c = [
        ("arc(a,c)", iac),
        ("arc(a,b)", iab),
        ("arc(c,a)", arc_indicator(C4, "c", "a")),
        ("arc(b,d)", arc_indicator(C4, "b", "d")),
        ("constant", constant_sheaf(P)),
        ("skyscraper a", skyscraper(P, ("a",))),
        ("monodromy -1", local_system(C4, -1)),
        ("arc(a,c)[1]", shift(iac, 1)),
        ("arc(a,c) + constant", direct_sum(iac, constant_sheaf(P))),
        ("cone arc(a,b) -> arc(a,c)", mapping_cone(incl)),
    ]
    out += [(n, C4, lam_c, F) for n, F in objs_c]
    P4 = standard_complex("path", 4)
    lam_p = frozenset({_pt("2", "+"), _pt("4", "+")})
    Q = P4.poset
    i24 = indicator_resolution(open_arc(P4, "2", "4"))
    i23 = indicator_resolution(open_arc(P4, "2", "3"))
    incl_p = canonical_inclusion(open_arc(P4, "2", "3"), open_arc(P4, "2", "4"), i23, i24)
    objs_p = [
        ("arc(2,4)", i24),
        ("arc(1,2)", arc_indicator(P4, "1", "2")),
        ("arc(1,4)", arc_indicator(P4, "1", "4")),
        ("constant", constant_sheaf(Q)),
        ("star 2", indicator_resolution(ConstructibleOpen.star(Q, ("2",)))),
        ("skyscraper 4", skyscraper(Q, ("4",))),
        ("arc(2,3)", i23),
        ("arc(2,4) + arc(1,2)", direct_sum(i24, arc_indicator(P4, "1", "2"))),
        ("cone arc(2,3) -> arc(2,4)", mapping_cone(incl_p)),
        ("constant[2]", shift(constant_sheaf(Q), 2)),
    ]
    out += [(n, P4, lam_p, F) for n, F in objs_p]
    return out


def check_stop_removal_kernel() -> CheckResult:
    bad = []
    agree_true = agree_false = 0
    contexts = {}
    for name, K, lam, F in kernel_corpus():
        key = (id(K), lam)
        if key not in contexts:
            contexts[key] = auto_cast_1d(K, lam)
        ac = contexts[key]
        from .twisted import pullback

        quotiented = [p for p in microsupport_1d(F) if p not in lam]
        orth = right_orthogonal(ac.context(), pullback(ac.refinement, F))
        if orth != (not quotiented):
            bad.append(f"{name}: right-orthogonal={orth}, quotiented microsupport={[str(p) for p in quotiented]}")
        elif orth:
            agree_true += 1
        else:
            agree_false += 1
    return CheckResult(9, "stop removal kernel equals vanishing microstalks", not bad,
                       f"20 objects ({agree_true} orthogonal, {agree_false} not)" if not bad else "; ".join(bad[:3]))


# 10 --------------------------------------------------------------------------


def independence_castings():
    """Context ``C({(2,+)})`` on the double subdivision of P3 and three castings at ``(2,+)``."""
    p = _pt("2", "+")
    ac = auto_cast_1d(standard_complex("path", 3), [p])
    K2 = ac.complex
    c1 = interval_casting_1d(K2, p, 1)
    c2 = interval_casting_1d(K2, p, 2)
    X1 = morse_character(c1)
    X2 = morse_character(c2)
    X3 = cast_point_1d(K2, p, ac.stop)
    return ac, [("radius 1", X1, casting_problems_1d(c1, ac.stop)),
                ("radius 2", X2, casting_problems_1d(c2, ac.stop)),
                ("refined", X3, [])]


def check_casting_independence() -> CheckResult:
    ac, chars = independence_castings()
    ctx = ac.context()
    bad = [f"{n}: {pr}" for n, _, pr in chars if pr]
    levels = []
    if not bad:
        for (n1, X1, _), (n2, X2, _) in ((chars[0], chars[1]), (chars[0], chars[2]), (chars[1], chars[2])):
            for N in range(5):
                res = casting_independence(ctx, X1, X2, N)
                if res.verdict == "isomorphic_at_level_N":
                    levels.append(f"{n1}~{n2} at N={N}")
                    break
            else:
                bad.append(f"{n1} vs {n2}: indeterminate up to N=4")
    return CheckResult(10, "casting independence", not bad, "; ".join(levels) if not bad else "; ".join(bad))


# 11 --------------------------------------------------------------------------


def peel_corpus():
    out = []
    for name, n in (("path", 3), ("circle", 3), ("circle", 4)):
        K = standard_complex(name, n)
        P = K.poset
        out.append((f"{name}{n} constant", P, constant_sheaf(P)))
        out.append((f"{name}{n} star", P, indicator_resolution(ConstructibleOpen.star(P, P.strata[0]))))
        out.append((f"{name}{n} skyscraper", P, skyscraper(P, P.strata[0])))
        if name == "circle":
            out.append((f"{name}{n} monodromy -1", P, local_system(K, -1)))
            out.append((f"{name}{n} arc", P, arc_indicator(K, K.vertices[0], K.vertices[-1])))
    ac = auto_cast_1d(standard_complex("path", 2))
    for X in ac.characters[:4]:
        out.append((f"character {X.point}", ac.complex.poset, X.obj))
    return out


def check_peeling() -> CheckResult:
    bad = []
    count = 0
    for name, P, F in peel_corpus():
        A, names = representable_collection(P)
        rep = peel(A, F, names)
        count += 1
        if not rep.generated or rep.residual_size != 0 or len(rep.steps) > len(P):
            bad.append(f"{name}: generated={rep.generated}, residual={rep.residual_size}, steps={len(rep.steps)}")
    return CheckResult(11, "peeling against the representables", not bad,
                       f"{count} objects" if not bad else "; ".join(bad[:3]))


# 12 --------------------------------------------------------------------------


def check_kernel_correctness(samples: int = 500, seed: int = 20240) -> CheckResult:
    from .oracles import dense_cohomology, random_complex

    rng = random.Random(seed)
    bad = []
    for k in range(samples):
        degrees, dense = random_complex(rng)
        C = IntegerComplex(degrees, IntegerMatrix.from_dense(dense, len(degrees)))
        got = cohomology(C)
        want = CohomologyReport(dense_cohomology(degrees, dense))
        if got != want:
            bad.append(f"sample {k}: {got} vs oracle {want}")
        if dense:
            inv = smith_normal_form(IntegerMatrix.from_dense(dense, len(degrees)))
            if any(b % a for a, b in zip(inv, inv[1:])):
                bad.append(f"sample {k}: invariants {inv} break divisibility")
    return CheckResult(12, "integer kernel vs dense oracle", not bad,
                       f"{samples} random complexes" if not bad else "; ".join(bad[:3]))


CHECKS: list[Callable[[], CheckResult]] = [
    check_star_hom_table,
    check_indicator_representable,
    check_circle_cohomology,
    check_locally_constant_microsupport,
    check_outward_conormal_law,
    check_refinement_compatibility,
    check_interval_wrapped,
    check_circle_wrapped,
    check_stop_removal_kernel,
    check_casting_independence,
    check_peeling,
    check_kernel_correctness,
]


def run_all() -> list[CheckResult]:
    out = []
    for check in CHECKS:
        try:
            out.append(check())
        except Exception as exc:  # a crash is a failed criterion, reported like the others
            n = CHECKS.index(check) + 1
            out.append(CheckResult(n, check.__name__.removeprefix("check_").replace("_", " "), False,
                                   f"raised {type(exc).__name__}: {exc}"))
    return out
