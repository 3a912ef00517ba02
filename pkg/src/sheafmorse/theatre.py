"""Morse characters and the quotient categories they cut out of Perf S.

The quotient of Perf S by a finite list of characters ``X_1, ..., X_m`` is
modelled by bar words: a morphism from ``a`` to ``b`` is a sum of words
``f_k e f_{k-1} e ... e f_0`` with ``f_0 in hom(a, X_i1)``, ``f_t in
hom(X_it, X_it+1)`` and ``f_k in hom(X_ik, b)``, where ``e`` has degree -1
and ``d e = id``.  Words of length at most ``N`` form the level-``N``
truncation; lower levels are subcomplexes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import limits
from .errors import ResourceLimitError, ValidationError
from .facets import (ConormalPoint1D, ConstructibleOpen, FacePoset, RefinementMap, SimplicialComplex,
                     orientation_1d, subdivide_1d, subdivide_1d_times)
from .microsheaf import (Casting, PosetModule, character_object, minimal_casting_1d, resolve_module)
from .twisted import (HomComplex, Morphism, TwistedComplex, direct_sum, evaluation_morphism, is_exceptional,
                      is_zero_object, mapping_cone, minimize, refinement_pushforward, representable,
                      tensor_by_complex)
from .zchain import (CohomologyReport, IntegerComplex, IntegerMatrix, cocycle_class_is_zero, cohomology,
                     cohomology_basis, is_acyclic, reduce_complex)


# -- stops and characters ------------------------------------------------------


@dataclass(frozen=True)
class StopSpec1D:
    """The kept conormal points ``Lambda`` on a triangulated 1-manifold."""

    complex: SimplicialComplex
    points: frozenset[ConormalPoint1D] = frozenset()

    def __post_init__(self):
        ori = orientation_1d(self.complex)
        for p in self.points:
            if p.vertex not in ori.left:
                raise ValidationError(f"stop point {p} names an unknown vertex")
            if p not in ori.conormal_points(p.vertex):
                raise ValidationError(f"{p} is not a conormal point of the complex")

    def __contains__(self, p: ConormalPoint1D) -> bool:
        return p in self.points

    def all_points(self) -> list[ConormalPoint1D]:
        ori = orientation_1d(self.complex)
        return [p for v in ori.walk for p in ori.conormal_points(v)]

    def carried(self, K: SimplicialComplex) -> "StopSpec1D":
        """The same points viewed on a subdivision ``K`` (which keeps the old vertex labels)."""
        return StopSpec1D(K, self.points)

    def to_json(self) -> dict:
        return {"lambda": [p.to_json() for p in sorted(self.points, key=lambda q: (q.vertex, q.sign))]}


@dataclass(frozen=True)
class MorseCharacter:
    """``cone(1_U -> 1_V)`` for a casting, stored in minimized form on the context poset."""

    casting: Casting
    obj: TwistedComplex
    point: ConormalPoint1D | None = None
    refinement: RefinementMap | None = field(default=None, compare=False)

    @property
    def poset(self) -> FacePoset:
        return self.obj.poset


def morse_character(c: Casting, refinement: RefinementMap | None = None, reduce: bool = True) -> MorseCharacter:
    """Character of a casting, optionally pushed forward along a refinement map."""
    X = character_object(c)
    if refinement is not None:
        X = refinement_pushforward(refinement, X)
    if reduce:
        X = minimize(X)
    return MorseCharacter(c, X, c.target, refinement)


def _component_sequence(K: SimplicialComplex, v: str) -> tuple[list[int], bool]:
    """Strata of the component of ``v`` in walk order: vertex, edge, vertex, ..."""
    ori = orientation_1d(K)
    P = K.poset
    start = v
    if not ori.cyclic[v]:
        while ori.left[start] is not None:
            start = ori.left[start]
    seq = [P.idx((start,))]
    cur = start
    while True:
        nxt = ori.right[cur]
        if nxt is None or nxt == start:
            if nxt == start:
                seq.append(P.idx(tuple(sorted((cur, nxt)))))
            break
        seq.append(P.idx(tuple(sorted((cur, nxt)))))
        seq.append(P.idx((nxt,)))
        cur = nxt
    return seq, ori.cyclic[v]


def validate_casting_1d(c: Casting, stop: StopSpec1D) -> bool:
    return not casting_problems_1d(c, stop)


def casting_problems_1d(c: Casting, stop: StopSpec1D) -> list[str]:
    """Reasons a casting fails to be a valid 1d casting at its target against ``stop``; empty if valid.

    The swept set ``V - U`` must be one interval containing the target vertex
    and its edges, closed on the side the sweep starts from and open on the
    other (unless it ends at a boundary vertex), and no other vertex of its
    closure may carry a stop point in the sweep direction.
    """
    K = c.poset.complex
    if stop.complex != K:
        raise ValidationError("casting and stop live on different complexes")
    ori = orientation_1d(K)
    P = K.poset
    if c.target is None:
        return ["casting has no target conormal point"]
    v, sign = c.target.vertex, c.target.sign
    if v not in ori.left:
        return [f"unknown vertex {v!r}"]
    if c.target not in ori.conormal_points(v):
        return [f"{c.target} is not a conormal point"]
    D = c.swept()
    vi = P.idx((v,))
    if vi not in D:
        return ["target vertex is not swept"]
    seq, cyclic = _component_sequence(K, v)
    if not D <= set(seq):
        return ["swept set is not inside one component"]
    if cyclic and len(D) == len(seq):
        return ["swept set is the whole circle"]
    # rotate a cycle so that it starts outside D
    if cyclic:
        k = next(i for i, s in enumerate(seq) if s not in D)
        seq = seq[k:] + seq[:k]
    where = [i for i, s in enumerate(seq) if s in D]
    lo, hi = where[0], where[-1]
    if hi - lo + 1 != len(where):
        return ["swept set is not an interval"]
    problems = []
    for e in P.up[vi]:
        if e != vi and e not in D:
            problems.append(f"edge {P.key(e)!r} of the target vertex is not swept")
    first, last = seq[lo], seq[hi]
    first_is_vertex = P.dim(first) == 0
    last_is_vertex = P.dim(last) == 0
    left_end = not cyclic and lo == 0
    right_end = not cyclic and hi == len(seq) - 1
    if sign == "+":
        if not first_is_vertex:
            problems.append("sweep in the + direction must start at a closed end")
        if last_is_vertex and not right_end:
            problems.append("sweep in the + direction must end at an open end")
    else:
        if not last_is_vertex:
            problems.append("sweep in the - direction must start at a closed end")
        if first_is_vertex and not left_end:
            problems.append("sweep in the - direction must end at an open end")
    closure = set()
    for s in D:
        closure |= P.down[s]
    for w in sorted(closure):
        if P.dim(w) == 0 and w != vi:
            q = ConormalPoint1D(P.strata[w][0], sign)
            if q in stop:
                problems.append(f"swept set crosses stop point {q}")
    return problems


def cast_point_1d(K2: SimplicialComplex, p: ConormalPoint1D, stop: StopSpec1D) -> MorseCharacter:
    """Character at a point of ``K2``: minimal casting on one more subdivision, pushed forward."""
    K3, r3 = subdivide_1d(K2)
    c = minimal_casting_1d(K3, p)
    problems = casting_problems_1d(c, stop.carried(K3))
    if problems:
        raise ValidationError(f"casting at {p} is invalid: {'; '.join(problems)}")
    return morse_character(c, r3)


@dataclass
class AutoCast:
    complex: SimplicialComplex
    refinement: RefinementMap
    stop: StopSpec1D
    characters: list[MorseCharacter]

    def context(self) -> "QuotientContext":
        return QuotientContext(self.complex.poset, self.characters, stop=self.stop)


def auto_cast_1d(K: SimplicialComplex, stop: StopSpec1D | Iterable[ConormalPoint1D] = ()) -> AutoCast:
    """Characters at every conormal point of the double subdivision of ``K`` outside the stop."""
    if not isinstance(stop, StopSpec1D):
        stop = StopSpec1D(K, frozenset(stop))
    K2, r = subdivide_1d_times(K, 2)
    stop2 = stop.carried(K2)
    chars = [cast_point_1d(K2, p, stop2) for p in stop2.all_points() if p not in stop2]
    return AutoCast(K2, r, stop2, chars)


# -- quotient context ----------------------------------------------------------


class _Hom:
    """A hom complex with the lookups the bar complex needs."""

    __slots__ = ("H", "deg", "dcols", "n")

    def __init__(self, H: HomComplex):
        self.H = H
        self.deg = H.complex.degrees
        self.n = len(H.pairs)
        cols: dict[int, list[tuple[int, int]]] = {}
        for (i, j), v in H.complex.differential._data.items():
            cols.setdefault(j, []).append((i, v))
        self.dcols = cols


class QuotientContext:
    """A finite list of Morse characters defining ``C = Perf S / <X_1, ..., X_m>``."""

    def __init__(self, poset: FacePoset, characters: Sequence[MorseCharacter | TwistedComplex],
                 stop: StopSpec1D | None = None):
        self.poset = poset
        self.characters = [c if isinstance(c, MorseCharacter) else None for c in characters]
        self.objects = [c.obj if isinstance(c, MorseCharacter) else c for c in characters]
        for X in self.objects:
            if X.poset != poset:
                raise ValidationError("character lives over a different poset")
        self.stop = stop
        self._homs: dict[tuple, _Hom] = {}
        self._keep: dict[int, TwistedComplex] = {}

    def __len__(self):
        return len(self.objects)

    def _key(self, x) -> tuple:
        if isinstance(x, int):
            return ("X", x)
        self._keep[id(x)] = x
        return ("obj", id(x))

    def _obj(self, x) -> TwistedComplex:
        return self.objects[x] if isinstance(x, int) else x

    def hom(self, x, y) -> _Hom:
        """Cached hom complex; ``x``/``y`` are character indices or objects."""
        key = (self._key(x), self._key(y))
        h = self._homs.get(key)
        if h is None:
            h = _Hom(HomComplex(self._obj(x), self._obj(y)))
            self._homs[key] = h
        return h

    def extended(self, characters: Sequence[MorseCharacter | TwistedComplex],
                 stop: StopSpec1D | None = None) -> "QuotientContext":
        new = QuotientContext(self.poset, [c if c is not None else o for c, o in zip(self.characters, self.objects)]
                              + list(characters), stop)
        for (kx, ky), h in self._homs.items():
            if kx[0] == "X" and ky[0] == "X":
                new._homs[(kx, ky)] = h
        return new

    def bar(self, a: TwistedComplex, b: TwistedComplex, level: int) -> "BarComplex":
        return BarComplex(self, a, b, level)


class BarComplex:
    """Level-``N`` truncated bar complex computing quotient morphisms ``a -> b``.

    A word is ``(chars, basis)`` with ``chars`` the character indices
    ``i_1 ... i_k`` and ``basis[t]`` a basis element of the ``t``-th hom
    factor, counted from the source.
    """

    def __init__(self, ctx: QuotientContext, a: TwistedComplex, b: TwistedComplex, level: int):
        if level < 0:
            raise ValidationError("truncation level must be non-negative")
        if a.poset != ctx.poset or b.poset != ctx.poset:
            raise ValidationError("objects live over a different poset than the context")
        self.ctx, self.a, self.b, self.level = ctx, a, b, level
        m = len(ctx)
        self.size = self._count(level)
        limits.check_bar(self.size)
        words: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
        H_ab = ctx.hom(a, b)
        for x in range(H_ab.n):
            words.append(((), (x,)))
        into = [ctx.hom(a, i) for i in range(m)]
        out = [ctx.hom(i, b) for i in range(m)]
        step = [[ctx.hom(i, j) for j in range(m)] for i in range(m)]
        succ = [[j for j in range(m) if step[i][j].n] for i in range(m)]
        # character sequences with every hom factor nonzero, grown one letter at a time
        seqs = [(i,) for i in range(m) if into[i].n]
        for k in range(1, level + 1):
            for c in seqs:
                last = out[c[-1]]
                if not last.n:
                    continue
                factors = [into[c[0]]] + [step[c[t]][c[t + 1]] for t in range(k - 1)] + [last]
                for basis in itertools.product(*[range(h.n) for h in factors]):
                    words.append((c, basis))
            if k < level:
                seqs = [c + (j,) for c in seqs for j in succ[c[-1]]]
        self.words = words
        self.index = {w: n for n, w in enumerate(words)}
        self.complex = self._assemble()
        self._reduced = None

    def _count(self, level: int) -> int:
        ctx, m = self.ctx, len(self.ctx)
        total = ctx.hom(self.a, self.b).n
        cnt = [ctx.hom(self.a, i).n for i in range(m)]
        for k in range(1, level + 1):
            total += sum(cnt[i] * ctx.hom(i, self.b).n for i in range(m))
            if k < level:
                cnt = [sum(cnt[i] * ctx.hom(i, j).n for i in range(m)) for j in range(m)]
            if total > limits.max_bar_generators():
                raise ResourceLimitError(
                    f"bar complex at level {level} exceeds {limits.max_bar_generators()} generators")
        return total

    def factor(self, chars: tuple[int, ...], t: int) -> _Hom:
        nodes = self._nodes(chars)
        return self.ctx.hom(nodes[t], nodes[t + 1])

    def _nodes(self, chars):
        return (self.a,) + chars + (self.b,)

    def degree_of(self, w) -> int:
        chars, basis = w
        return sum(self.factor(chars, t).deg[x] for t, x in enumerate(basis)) - len(chars)

    def _assemble(self) -> IntegerComplex:
        ctx = self.ctx
        index = self.index
        degrees = []
        data: dict[tuple[int, int], int] = {}
        for col, (chars, basis) in enumerate(self.words):
            k = len(chars)
            nodes = self._nodes(chars)
            homs = [ctx.hom(nodes[t], nodes[t + 1]) for t in range(k + 1)]
            degs = [homs[t].deg[basis[t]] for t in range(k + 1)]
            degrees.append(sum(degs) - k)
            above = 0  # total degree of the factors left of position t
            for t in range(k, -1, -1):
                sign = -1 if (above + k - t) % 2 else 1
                for x, v in homs[t].dcols.get(basis[t], ()):
                    key = (index[(chars, basis[:t] + (x,) + basis[t + 1:])], col)
                    data[key] = data.get(key, 0) + sign * v
                if t < k:
                    # e between f_{t+1} and f_t, so above still counts f_{t+1}
                    sign_e = -1 if (above + k - t - 1) % 2 else 1
                    g = _compose_pair(homs[t], homs[t + 1], ctx.hom(nodes[t], nodes[t + 2]),
                                      basis[t], basis[t + 1])
                    if g is not None:
                        w = (chars[:t] + chars[t + 1:], basis[:t] + (g,) + basis[t + 2:])
                        key = (index[w], col)
                        data[key] = data.get(key, 0) + sign_e
                above += degs[t]
        n = len(self.words)
        D = IntegerMatrix._wrap(n, n, {k: v for k, v in data.items() if v})
        return IntegerComplex(degrees, D, check=False)

    def reduced(self):
        if self._reduced is None:
            self._reduced = reduce_complex(self.complex, track=True)
        return self._reduced

    def cohomology(self) -> CohomologyReport:
        rep = cohomology(self.reduced().core, reduce=False)
        return CohomologyReport(rep.groups, level=self.level)

    def vector_of_morphism(self, f: Morphism) -> dict[int, int]:
        """A level-0 word for an honest morphism ``a -> b``."""
        H = self.ctx.hom(self.a, self.b).H
        return {self.index[((), (x,))]: v for x, v in H.vector(f).items()}

    def level_filtration(self, level: int) -> list[int]:
        return [n for n, (c, _) in enumerate(self.words) if len(c) <= level]


def _compose_pair(Hf: _Hom, Hg: _Hom, Hout: _Hom, f: int, g: int) -> int | None:
    """Basis index of ``g o f`` (matrix units compose to a matrix unit or zero)."""
    i, j = Hf.H.pairs[f]
    j2, k = Hg.H.pairs[g]
    if j != j2:
        return None
    return Hout.H.index[(i, k)]


def compose_words(first: BarComplex, second: BarComplex, out: BarComplex, u: dict[int, int],
                  v: dict[int, int]) -> dict[int, int]:
    """``v o u`` for ``u`` in ``first`` (a -> b) and ``v`` in ``second`` (b -> c), as a vector of ``out``."""
    ctx = out.ctx
    res: dict[int, int] = {}
    for p, x in u.items():
        c1, b1 = first.words[p]
        for q, y in v.items():
            c2, b2 = second.words[q]
            nodes1 = first._nodes(c1)
            nodes2 = second._nodes(c2)
            g = _compose_pair(ctx.hom(nodes1[-2], first.b), ctx.hom(second.a, nodes2[1]),
                              ctx.hom(nodes1[-2], nodes2[1]), b1[-1], b2[0])
            if g is None:
                continue
            w = (c1 + c2, b1[:-1] + (g,) + b2[1:])
            n = out.index.get(w)
            if n is None:
                raise ValidationError("composite word exceeds the target truncation level")
            res[n] = res.get(n, 0) + x * y
    return {k: c for k, c in res.items() if c}


def quotient_hom(ctx: QuotientContext, a: TwistedComplex, b: TwistedComplex, level: int) -> CohomologyReport:
    return ctx.bar(a, b, level).cohomology()


def level_comparison(ctx: QuotientContext, a: TwistedComplex, b: TwistedComplex, level: int,
                     degree: int = 0) -> bool:
    """Whether ``H^degree`` of level ``level - 1`` injects into level ``level``."""
    if level < 1:
        return True
    small = ctx.bar(a, b, level - 1)
    big = ctx.bar(a, b, level)
    basis = cohomology_basis(small.complex, degree, small.reduced())
    if not basis:
        return True
    # an injective map on free parts: images of a basis stay independent
    red = big.reduced()
    imgs = [{big.index[small.words[k]]: v for k, v in vec.items()} for vec in basis]
    projected = [red.project(z) for z in imgs]
    core = red.core
    by_deg = [i for i, d in enumerate(core.degrees) if d == degree]
    down = [i for i, d in enumerate(core.degrees) if d == degree - 1]
    pos = {g: k for k, g in enumerate(by_deg)}
    cols = [[(pos[g], c, v) for g, v in z.items()] for c, z in enumerate(projected)]
    entries = [e for col in cols for e in col]
    off = len(projected)
    for c, j in enumerate(down):
        for (i, jj), v in core.differential._data.items():
            if jj == j:
                entries.append((pos[i], off + c, v))
    from .zchain import smith_normal_form

    M = IntegerMatrix(len(by_deg), off + len(down), entries)
    B = IntegerMatrix(len(by_deg), len(down), [(r, c - off, v) for r, c, v in entries if c >= off])
    return len(smith_normal_form(M)) - len(smith_normal_form(B)) == len(basis)


# -- tower replacement ---------------------------------------------------------


@dataclass
class TowerResult:
    obj: TwistedComplex
    stabilized: bool
    iterations: int
    sizes: list[int]


def _reduced_evaluation(X: TwistedComplex, b: TwistedComplex) -> tuple[TwistedComplex, IntegerMatrix] | None:
    """``C (x) X -> b`` where ``C`` is a reduced model of ``hom(X, b)``; None when that hom is acyclic."""
    H = HomComplex(X, b)
    red = reduce_complex(H.complex, track=True)
    C = red.core
    if not len(C) or cohomology(C, reduce=False).is_zero():
        return None
    T = tensor_by_complex(X, C)
    m = len(X)
    data = {}
    for k in range(len(C)):
        for idx, v in red.lift({k: 1}).items():
            i, j = H.pairs[idx]
            key = (j, k * m + i)
            data[key] = data.get(key, 0) + v
    return T, IntegerMatrix._wrap(len(b), len(T), {k: v for k, v in data.items() if v})


def tower_replacement(ctx: QuotientContext, b: TwistedComplex, max_iter: int = 8) -> TowerResult:
    """Push ``b`` towards the right-orthogonal of the characters by repeated cones of evaluation maps."""
    if max_iter < 1:
        raise ValidationError("max_iter must be at least 1")
    cur = b
    sizes = [len(b)]
    for it in range(max_iter + 1):
        parts = []
        for X in ctx.objects:
            got = _reduced_evaluation(X, cur)
            if got is not None:
                parts.append(got)
        if not parts:
            return TowerResult(cur, True, it, sizes)
        if it == max_iter:
            break
        T = direct_sum(*[p[0] for p in parts])
        cols = {}
        off = 0
        for Tp, M in parts:
            for (j, c), v in M._data.items():
                cols[(j, off + c)] = v
            off += len(Tp)
        ev = Morphism(T, cur, 0, IntegerMatrix._wrap(len(cur), len(T), cols), check=False)
        cur = minimize(mapping_cone(ev))
        sizes.append(len(cur))
    return TowerResult(cur, False, max_iter, sizes)


def right_orthogonal(ctx: QuotientContext, b: TwistedComplex) -> bool:
    """All ``hom(X_i, b)`` acyclic (the 0-iteration right-orthogonal)."""
    return all(is_acyclic(HomComplex(X, b).complex) for X in ctx.objects)


# -- peeling -------------------------------------------------------------------


@dataclass
class PeelStep:
    index: int
    multiplicity: CohomologyReport


@dataclass
class PeelReport:
    steps: list[PeelStep]
    residual: TwistedComplex
    generated: bool
    residual_size: int


def exceptional_order(objs: Sequence[TwistedComplex]) -> list[list[bool]]:
    n = len(objs)
    return [[x != y and not cohomology(HomComplex(objs[x], objs[y]).complex).is_zero() for y in range(n)]
            for x in range(n)]


def peel(A: Sequence[TwistedComplex], M: TwistedComplex | PosetModule, names: Sequence[str] | None = None,
         check: bool = True) -> PeelReport:
    """Split off ``hom(X, M) (x) X`` for a maximal remaining ``X`` until the collection is used up.

    Maximal means no other remaining object receives a nonzero morphism
    from ``X``; ties go to the lowest name.  ``generated`` reports whether
    the residual is the zero object.
    """
    if isinstance(M, PosetModule):
        M = resolve_module(M)
    if check:
        ok, why = is_exceptional(A)
        if not ok:
            raise ValidationError(f"not an exceptional collection: {why}")
    names = list(names) if names is not None else [str(k) for k in range(len(A))]
    order = exceptional_order(A)
    remaining = list(range(len(A)))
    steps = []
    cur = M
    while remaining:
        maximal = [x for x in remaining if not any(order[x][y] for y in remaining)]
        x = min(maximal, key=lambda k: names[k])
        X = A[x]
        got = _reduced_evaluation(X, cur)
        if got is None:
            steps.append(PeelStep(x, CohomologyReport({})))
        else:
            T, ev_matrix = got
            steps.append(PeelStep(x, cohomology(HomComplex(X, cur).complex)))
            ev = Morphism(T, cur, 0, ev_matrix, check=False)
            cur = minimize(mapping_cone(ev))
        remaining.remove(x)
    return PeelReport(steps, cur, is_zero_object(cur), len(cur))


def representable_collection(P: FacePoset) -> tuple[list[TwistedComplex], list[str]]:
    return [representable(P, s) for s in range(len(P))], [P.key(s) for s in range(len(P))]


# -- casting independence ------------------------------------------------------


@dataclass
class IndependenceResult:
    verdict: str
    level: int
    forward: dict | None = None
    backward: dict | None = None


def casting_independence(ctx: QuotientContext, X1: MorseCharacter | TwistedComplex,
                         X2: MorseCharacter | TwistedComplex, level: int, bound: int = 2) -> IndependenceResult:
    """Look for mutually inverse degree-0 classes between two characters in the quotient.

    Candidates are integer combinations, with coefficients in
    ``[-bound, bound]``, of a basis of ``H^0`` at level ``level``;
    composites are checked at level ``2 * level``.
    """
    A = X1.obj if isinstance(X1, MorseCharacter) else X1
    B = X2.obj if isinstance(X2, MorseCharacter) else X2
    fwd = ctx.bar(A, B, level)
    bwd = ctx.bar(B, A, level)
    loopA = ctx.bar(A, A, 2 * level)
    loopB = ctx.bar(B, B, 2 * level)
    F = cohomology_basis(fwd.complex, 0, fwd.reduced())
    G = cohomology_basis(bwd.complex, 0, bwd.reduced())
    if not F or not G:
        return IndependenceResult("indeterminate", level)
    idA = loopA.vector_of_morphism(Morphism.identity(A))
    idB = loopB.vector_of_morphism(Morphism.identity(B))
    # products of basis classes in both orders
    gf = [[compose_words(fwd, bwd, loopA, f, g) for g in G] for f in F]
    fg = [[compose_words(bwd, fwd, loopB, g, f) for g in G] for f in F]
    coeffs = range(-bound, bound + 1)
    for a in itertools.product(coeffs, repeat=len(F)):
        if not any(a):
            continue
        for c in itertools.product(coeffs, repeat=len(G)):
            if not any(c):
                continue
            if _is_identity(loopA, idA, gf, a, c) and _is_identity(loopB, idB, fg, a, c):
                return IndependenceResult("isomorphic_at_level_N", level,
                                          _combine(F, a), _combine(G, c))
    return IndependenceResult("indeterminate", level)


def _combine(basis, coeffs) -> dict[int, int]:
    out: dict[int, int] = {}
    for vec, k in zip(basis, coeffs):
        for i, v in vec.items():
            out[i] = out.get(i, 0) + k * v
    return {i: v for i, v in out.items() if v}


def _is_identity(loop: BarComplex, ident: dict[int, int], table, a, c) -> bool:
    vec = {i: -v for i, v in ident.items()}
    for x, ka in enumerate(a):
        if not ka:
            continue
        for y, kc in enumerate(c):
            if not kc:
                continue
            for i, v in table[x][y].items():
                vec[i] = vec.get(i, 0) + ka * kc * v
    vec = {i: v for i, v in vec.items() if v}
    return cocycle_class_is_zero(loop.complex, vec, loop.reduced())


# -- stop removal --------------------------------------------------------------


def stop_removal(ctx: QuotientContext, smaller: StopSpec1D | Iterable[ConormalPoint1D]) -> QuotientContext:
    """Pass from ``C(Lambda')`` to ``C(Lambda)`` by adding characters at ``Lambda' - Lambda``."""
    if ctx.stop is None:
        raise ValidationError("stop removal needs a context built from a 1d stop")
    K2 = ctx.stop.complex
    pts = smaller.points if isinstance(smaller, StopSpec1D) else frozenset(smaller)
    if not pts <= ctx.stop.points:
        raise ValidationError("the new stop must be a subset of the old one")
    new_stop = StopSpec1D(K2, frozenset(pts))
    removed = [p for p in ctx.stop.all_points() if p in ctx.stop and p not in new_stop]
    return ctx.extended([cast_point_1d(K2, p, new_stop) for p in removed], new_stop)
