"""Constructible sheaves on a face poset: indicators, sections, stalks, microstalks.

A sheaf is stored either as a strict poset module (``PosetModule``, with maps
``M(s) -> M(t)`` for ``s <= t``, i.e. restriction from ``star(s)`` to the
smaller ``star(t)``) or as a twisted complex of representables.  Modules are
turned into twisted complexes by the bar resolution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import limits
from .errors import ValidationError
from .facets import (ConormalPoint1D, ConstructibleOpen, FacePoset, RefinementMap, SimplicialComplex,
                     open_arc, orientation_1d, pullback_open, stratum, subdivide_1d_times)
from .twisted import (Morphism, TwistedComplex, hom_complex, mapping_cone, pullback, refinement_pushforward)
from .zchain import (CohomologyReport, IntegerComplex, IntegerMatrix, cohomology, integer_complex, is_acyclic)


# -- order-complex resolutions -------------------------------------------------


def chain_differential(c: tuple[int, ...]) -> list[tuple[tuple[int, ...], int]]:
    """Faces of a chain with their signs; a length-one chain has none."""
    if len(c) == 1:
        return []
    return [(c[:i] + c[i + 1:], -1 if i % 2 else 1) for i in range(len(c))]


def indicator_resolution(U: ConstructibleOpen) -> TwistedComplex:
    """Resolution of ``1_U`` with one generator per chain of strata in ``U``."""
    P = U.poset
    chains = P.chains(U.members)
    limits.check_twisted(len(chains), "indicator resolution")
    pos = {c: k for k, c in enumerate(chains)}
    data = {}
    for k, c in enumerate(chains):
        for face, sgn in chain_differential(c):
            data[(pos[face], k)] = sgn
    n = len(chains)
    gens = [(c[-1], 1 - len(c)) for c in chains]
    labels = [tuple(P.key(x) for x in c) for c in chains]
    return TwistedComplex(P, gens, IntegerMatrix._wrap(n, n, data), labels, check=False)


def chain_index(a: TwistedComplex) -> dict[tuple[str, ...], int]:
    return {lab: k for k, lab in enumerate(a.labels)}


def canonical_inclusion(U: ConstructibleOpen, V: ConstructibleOpen, source: TwistedComplex | None = None,
                        target: TwistedComplex | None = None) -> Morphism:
    """Chain-wise inclusion ``indicator_resolution(U) -> indicator_resolution(V)``."""
    if U.poset != V.poset:
        raise ValidationError("opens live over different posets")
    if not U <= V:
        raise ValidationError("canonical inclusion needs U contained in V")
    a = source if source is not None else indicator_resolution(U)
    b = target if target is not None else indicator_resolution(V)
    where = chain_index(b)
    data = {(where[lab], k): 1 for k, lab in enumerate(a.labels)}
    return Morphism(a, b, 0, IntegerMatrix._wrap(len(b), len(a), data), check=False)


def augmentation(P: FacePoset, s) -> Morphism:
    """The quasi-isomorphism ``indicator_resolution(star s) -> P_s``.

    Every length-one chain goes to the generator of ``P_s``.
    """
    from .twisted import representable

    s = P.idx(s)
    a = indicator_resolution(ConstructibleOpen.star(P, s))
    b = representable(P, s)
    data = {(0, k): 1 for k, lab in enumerate(a.labels) if len(lab) == 1}
    return Morphism(a, b, 0, IntegerMatrix._wrap(1, len(a), data), check=False)


def star_inclusion(P: FacePoset, s) -> Morphism:
    """The inclusion ``P_s -> indicator_resolution(star s)`` of the chain ``(s)``."""
    from .twisted import representable

    s = P.idx(s)
    b = indicator_resolution(ConstructibleOpen.star(P, s))
    a = representable(P, s)
    k = chain_index(b)[(P.key(s),)]
    return Morphism(a, b, 0, IntegerMatrix._wrap(len(b), 1, {(k, 0): 1}), check=False)


# -- poset modules --------------------------------------------------------------


class PosetModule:
    """Strict functor ``s -> M(s)`` with chain maps ``M(s) -> M(t)`` for ``s <= t``.

    ``maps`` holds one matrix per covering pair ``(s, t)``; missing covers
    are zero maps.  General relations are composed along a chain of covers.
    """

    def __init__(self, poset: FacePoset, values: Mapping, maps: Mapping | None = None, check: bool = True):
        self.poset = poset
        self.values: dict[int, IntegerComplex] = {}
        for s, C in values.items():
            self.values[poset.idx(s)] = C
        self.maps: dict[tuple[int, int], IntegerMatrix] = {}
        covers = set(poset.covers())
        for (s, t), m in (maps or {}).items():
            key = (poset.idx(s), poset.idx(t))
            if key not in covers:
                raise ValidationError(f"module map {poset.key(key[0])!r} -> {poset.key(key[1])!r} is not a cover")
            self.maps[key] = m
        self._cache: dict[tuple[int, int], IntegerMatrix] = {}
        if check:
            self.validate()

    def value(self, s) -> IntegerComplex:
        s = self.poset.idx(s)
        C = self.values.get(s)
        return C if C is not None else IntegerComplex([])

    def cover_map(self, s: int, t: int) -> IntegerMatrix:
        m = self.maps.get((s, t))
        if m is None:
            return IntegerMatrix.zeros(len(self.value(t)), len(self.value(s)))
        return m

    def map(self, s, t) -> IntegerMatrix:
        """``M(s) -> M(t)`` for ``s <= t``."""
        P = self.poset
        s, t = P.idx(s), P.idx(t)
        if s not in P.down[t]:
            raise ValidationError(f"{P.key(s)!r} is not a face of {P.key(t)!r}")
        if s == t:
            return IntegerMatrix.identity(len(self.value(s)))
        got = self._cache.get((s, t))
        if got is not None:
            return got
        # step up through a cover of s lying below t (smallest index for determinism)
        u = min(j for j in P.up[s] & P.down[t] if P.dim(j) == P.dim(s) + 1)
        out = self.map(u, t) @ self.cover_map(s, u)
        self._cache[(s, t)] = out
        return out

    def validate(self):
        P = self.poset
        for (s, t), m in self.maps.items():
            A, B = self.value(s), self.value(t)
            if m.shape != (len(B), len(A)):
                raise ValidationError(f"module map {P.key(s)!r} -> {P.key(t)!r} has shape {m.shape}")
            for (j, i), _ in m._data.items():
                if B.degrees[j] != A.degrees[i]:
                    raise ValidationError(f"module map {P.key(s)!r} -> {P.key(t)!r} does not preserve degree")
            if B.differential @ m != m @ A.differential:
                raise ValidationError(f"module map {P.key(s)!r} -> {P.key(t)!r} is not a chain map")
        # strictness: every path of covers from s up to t gives the same composite
        for s in range(len(P)):
            for t in P.up[s]:
                if P.dim(t) < P.dim(s) + 2:
                    continue
                ref = None
                for u in sorted(P.up[s] & P.down[t]):
                    if P.dim(u) != P.dim(s) + 1:
                        continue
                    m = self.map(u, t) @ self.cover_map(s, u)
                    if ref is None:
                        ref = m
                    elif m != ref:
                        raise ValidationError(
                            f"module is not strict between {P.key(s)!r} and {P.key(t)!r}")

    @classmethod
    def indicator(cls, U: ConstructibleOpen) -> "PosetModule":
        P = U.poset
        Z = IntegerComplex([0])
        values = {s: Z for s in U.members}
        maps = {(s, t): IntegerMatrix.identity(1) for s, t in P.covers() if s in U.members and t in U.members}
        return cls(P, values, maps, check=False)

    @classmethod
    def skyscraper(cls, P: FacePoset, s) -> "PosetModule":
        """``Z`` at ``s`` and zero elsewhere (the pushforward of ``Z`` from a closed stratum)."""
        return cls(P, {P.idx(s): IntegerComplex([0])}, {}, check=False)


def resolve_module(M: PosetModule) -> TwistedComplex:
    """Bar resolution ``sum over chains b_0 < ... < b_k of P_{b_k} (x) M(b_0)[k]``."""
    P = M.poset
    chains = [c for c in P.chains() if len(M.value(c[0]))]
    gens = []
    labels = []
    pos = {}
    for c in chains:
        C = M.value(c[0])
        for g in range(len(C)):
            pos[(c, g)] = len(gens)
            gens.append((c[-1], C.degrees[g] - (len(c) - 1)))
            labels.append((tuple(P.key(x) for x in c), C.labels[g]))
    limits.check_twisted(len(gens), "module resolution")
    data: dict[tuple[int, int], int] = {}

    def add(key, v):
        w = data.get(key, 0) + v
        if w:
            data[key] = w
        else:
            data.pop(key, None)

    for c in chains:
        C = M.value(c[0])
        k = len(c) - 1
        internal = -1 if k % 2 else 1
        cols = {}
        for (i, j), v in C.differential._data.items():
            cols.setdefault(j, []).append((i, v))
        if k >= 1:
            step = M.map(c[0], c[1])
            step_cols = {}
            for (i, j), v in step._data.items():
                step_cols.setdefault(j, []).append((i, v))
        for g in range(len(C)):
            col = pos[(c, g)]
            for i, v in cols.get(g, ()):
                add((pos[(c, i)], col), internal * v)
            if k == 0:
                continue
            # omit b_0: push the module element along M(b_0) -> M(b_1)
            for i, v in step_cols.get(g, ()):
                add((pos[(c[1:], i)], col), v)
            for t in range(1, k + 1):
                sgn = -1 if t % 2 else 1
                add((pos[(c[:t] + c[t + 1:], g)], col), sgn)
    n = len(gens)
    return TwistedComplex(P, gens, IntegerMatrix._wrap(n, n, data), labels, check=False)


# -- sections, stalks, microstalks ----------------------------------------------


@dataclass(frozen=True)
class Casting:
    """Nested constructible opens ``U <= V`` standing in for a Morse function and its window.

    ``refinement`` optionally maps the casting's poset onto a coarser one;
    objects on the coarser poset are then pulled back before pairing.
    """

    U: ConstructibleOpen
    V: ConstructibleOpen
    target: ConormalPoint1D | None = None
    assertion: str | None = None
    refinement: RefinementMap | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.U.poset != self.V.poset:
            raise ValidationError("casting opens live over different posets")
        if not self.U <= self.V:
            extra = min(self.U.members - self.V.members)
            raise ValidationError(f"casting has U not contained in V: {self.U.poset.key(extra)!r}")
        if self.refinement is not None and self.refinement.source != self.U.poset:
            raise ValidationError("casting refinement does not start at the casting's poset")

    @property
    def poset(self) -> FacePoset:
        return self.U.poset

    def swept(self) -> frozenset[int]:
        return self.V.members - self.U.members

    def to_json(self) -> dict:
        out = {"U": self.U.to_json()["strata"], "V": self.V.to_json()["strata"]}
        if self.target is not None:
            out["target"] = self.target.to_json()
        if self.assertion is not None:
            out["assertion"] = self.assertion
        return out


def character_object(c: Casting) -> TwistedComplex:
    return mapping_cone(canonical_inclusion(c.U, c.V))


def sections(U: ConstructibleOpen, F: TwistedComplex) -> CohomologyReport:
    return cohomology(hom_complex(indicator_resolution(U), F).complex)


def stalk(t, F: TwistedComplex) -> CohomologyReport:
    from .twisted import evaluate

    return cohomology(evaluate(F, t))


def _on_casting_poset(c: Casting, F: TwistedComplex) -> TwistedComplex:
    if F.poset == c.poset:
        return F
    if c.refinement is not None and c.refinement.target == F.poset:
        return pullback(c.refinement, F)
    raise ValidationError("object and casting live over different posets")


def microstalk(c: Casting, F: TwistedComplex, character: TwistedComplex | None = None) -> CohomologyReport:
    """``H^* hom(cone(1_U -> 1_V), F)`` in the raw cone grading."""
    X = character if character is not None else character_object(c)
    return cohomology(hom_complex(X, _on_casting_poset(c, F)).complex)


# -- refinements ----------------------------------------------------------------


def comparison_map(r: RefinementMap, U: ConstructibleOpen) -> Morphism:
    """``r_! indicator_resolution(r^-1 U) -> indicator_resolution(U)``: chains go to their images.

    Degenerate images go to zero.
    """
    if U.poset != r.target:
        raise ValidationError("open does not live on the refinement's target")
    U1 = pullback_open(r, U)
    a = refinement_pushforward(r, indicator_resolution(U1))
    b = indicator_resolution(U)
    where = chain_index(b)
    S1, S = r.source, r.target
    data = {}
    for k, lab in enumerate(a.labels):
        img = tuple(r.table[S1.idx(x)] for x in lab)
        if all(img[i] != img[i + 1] for i in range(len(img) - 1)):
            data[(where[tuple(S.key(x) for x in img)], k)] = 1
    return Morphism(a, b, 0, IntegerMatrix._wrap(len(b), len(a), data), check=False)


# -- one-dimensional microsupport -----------------------------------------------


def interval_casting_1d(K: SimplicialComplex, point: ConormalPoint1D, radius: int = 1) -> Casting:
    """Casting at ``point`` sweeping ``radius`` vertices to each side of its vertex.

    For ``(v, +)`` the swept set runs from the ``radius``-th left neighbour
    (closed) to the ``radius``-th right neighbour (open); ``(v, -)`` is the
    mirror image.  At a path end the swept set stops at ``v``.  ``U`` is the
    single open edge just beyond the closed end.
    """
    if radius < 1:
        raise ValidationError("casting radius must be at least 1")
    ori = orientation_1d(K)
    P = K.poset
    v, sign = point.vertex, point.sign
    if v not in ori.left or point not in ori.conormal_points(v):
        raise ValidationError(f"{point} is not a conormal point of the complex")
    back = ori.left if sign == "+" else ori.right
    ahead = ori.right if sign == "+" else ori.left
    chain = [v]
    for _ in range(radius):
        nxt = back[chain[-1]]
        if nxt is None or nxt in chain:
            raise ValidationError(f"no room for a casting of radius {radius} at {point}")
        chain.append(nxt)
    beyond = back[chain[-1]]
    if beyond is None or beyond in chain:
        raise ValidationError(f"no room for a casting of radius {radius} at {point}")
    swept_vertices = list(chain)
    if ahead[v] is not None:
        cur = v
        for _ in range(radius - 1):
            cur = ahead[cur]
            if cur is None or cur in swept_vertices:
                raise ValidationError(f"no room for a casting of radius {radius} at {point}")
            swept_vertices.append(cur)
        if ahead[cur] is None or ahead[cur] in swept_vertices:
            raise ValidationError(f"no room for a casting of radius {radius} at {point}")
    U = ConstructibleOpen(P, frozenset({P.idx(stratum((chain[-1], beyond)))}))
    members = set(U.members)
    for w in swept_vertices:
        members |= P.star((w,))
    return Casting(U, ConstructibleOpen(P, frozenset(members)), point)


def minimal_casting_1d(K: SimplicialComplex, point: ConormalPoint1D) -> Casting:
    """Radius-one casting: the swept set is ``[l, r)`` for ``(v, +)`` and ``(l, r]`` for ``(v, -)``."""
    return interval_casting_1d(K, point, 1)


def microsupport_1d(F: TwistedComplex) -> list[ConormalPoint1D]:
    """Conormal points of the ambient 1-manifold where ``F`` has a nonzero microstalk."""
    K = F.poset.complex
    ori = orientation_1d(K)
    K2, r = subdivide_1d_times(K, 2)
    G = pullback(r, F)
    out = []
    for v in ori.walk:
        for p in ori.conormal_points(v):
            c = minimal_casting_1d(K2, p)
            if not microstalk(c, G).is_zero():
                out.append(p)
    return out


def is_locally_constant(F: TwistedComplex) -> bool:
    """Every restriction ``F(star s) -> F(star t)`` is a quasi-isomorphism.

    The restriction is the inclusion of generators below ``s`` into those
    below ``t``, so it suffices that the quotient is acyclic on every cover.
    """
    P = F.poset
    for s, t in P.covers():
        keep = [i for i, u in enumerate(F.strata) if u in P.down[t] and u not in P.down[s]]
        Q = IntegerComplex([F.degrees[i] for i in keep], F.differential.submatrix(keep, keep), check=False)
        if not is_acyclic(Q):
            return False
    return True


# -- fixtures -------------------------------------------------------------------


def constant_sheaf(P: FacePoset) -> TwistedComplex:
    return indicator_resolution(ConstructibleOpen.everything(P))


def open_indicator(U: ConstructibleOpen) -> TwistedComplex:
    return indicator_resolution(U)


def skyscraper(P: FacePoset, s) -> TwistedComplex:
    return resolve_module(PosetModule.skyscraper(P, s))


def local_system_module(K: SimplicialComplex, monodromy: int) -> PosetModule:
    """Rank-one local system on a circle: identities except ``x monodromy`` on one cover."""
    ori = orientation_1d(K)
    if not ori.walk or not all(ori.cyclic.values()) or len(ori.walk) != len(K.vertices):
        raise ValidationError("local systems are built on connected circles only")
    P = K.poset
    Z = IntegerComplex([0])
    values = {s: Z for s in range(len(P))}
    v0 = ori.walk[0]
    twist = (P.idx((v0,)), P.idx(stratum((ori.left[v0], v0))))
    maps = {}
    for s, t in P.covers():
        maps[(s, t)] = IntegerMatrix.identity(1).scale(monodromy if (s, t) == twist else 1)
    return PosetModule(P, values, maps)


def local_system(K: SimplicialComplex, monodromy: int) -> TwistedComplex:
    return resolve_module(local_system_module(K, monodromy))


def arc_indicator(K: SimplicialComplex, a: str, b: str) -> TwistedComplex:
    return indicator_resolution(open_arc(K, a, b))
