"""Finite simplicial complexes, face posets, constructible opens and refinements.

A stratum is a simplex, stored as a tuple of vertex labels sorted as
strings.  ``s <= t`` in the face poset means ``s`` is a face of ``t``; the
star of ``s`` is ``{t : s <= t}`` and constructible open sets are exactly the
up-closed sets of strata.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from string import ascii_lowercase
from typing import Iterable, Mapping, Sequence

from .errors import ValidationError

Stratum = tuple


def stratum(vertices: Iterable[str]) -> Stratum:
    return tuple(sorted(str(v) for v in vertices))


def stratum_key(s: Stratum) -> str:
    return "|".join(s)


def parse_stratum_key(key: str) -> Stratum:
    return stratum(key.split("|"))


class SimplicialComplex:
    """Abstract simplicial complex with an ordered vertex list.

    The vertex order is part of the data: for paths and circles it is the
    canonical orientation used to name conormal directions.
    """

    def __init__(self, vertices: Sequence[str], simplices: Iterable[Iterable[str]]):
        self.vertices = tuple(str(v) for v in vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ValidationError("duplicate vertex labels")
        simp = {stratum(s) for s in simplices}
        simp |= {(v,) for v in self.vertices}
        vset = set(self.vertices)
        for s in simp:
            if not s:
                raise ValidationError("empty simplex")
            if len(set(s)) != len(s):
                raise ValidationError(f"simplex {list(s)} repeats a vertex")
            missing = set(s) - vset
            if missing:
                raise ValidationError(f"simplex {list(s)} uses unknown vertices {sorted(missing)}")
        for s in simp:
            for k in range(1, len(s)):
                for face in combinations(s, k):
                    if face not in simp:
                        raise ValidationError(f"face {list(face)} of {list(s)} is missing")
        self.simplices = frozenset(simp)

    @classmethod
    def from_facets(cls, vertices: Sequence[str], facets: Iterable[Iterable[str]]) -> "SimplicialComplex":
        simp = set()
        for f in facets:
            f = stratum(f)
            for k in range(1, len(f) + 1):
                simp.update(combinations(f, k))
        return cls(vertices, simp)

    def __eq__(self, other):
        return isinstance(other, SimplicialComplex) and (self.vertices, self.simplices) == (other.vertices, other.simplices)

    def __hash__(self):
        return hash((self.vertices, self.simplices))

    def __repr__(self):
        return f"SimplicialComplex({len(self.vertices)} vertices, {len(self.simplices)} simplices)"

    @property
    def dimension(self) -> int:
        return max((len(s) for s in self.simplices), default=0) - 1

    def edges(self) -> list[Stratum]:
        return sorted(s for s in self.simplices if len(s) == 2)

    @cached_property
    def poset(self) -> "FacePoset":
        return FacePoset(self)

    def to_json(self) -> dict:
        order = {v: k for k, v in enumerate(self.vertices)}
        simp = sorted((s for s in self.simplices if len(s) > 1), key=lambda s: (len(s), s))
        return {"vertices": list(self.vertices),
                "simplices": [sorted(s, key=order.__getitem__) for s in simp]}

    @classmethod
    def from_json(cls, data: Mapping) -> "SimplicialComplex":
        return cls(data["vertices"], data.get("simplices", []))


class FacePoset:
    """The strata of a simplicial complex ordered by the face relation."""

    def __init__(self, K: SimplicialComplex):
        self.complex = K
        self.strata: tuple[Stratum, ...] = tuple(sorted(K.simplices, key=lambda s: (len(s), s)))
        self.index = {s: i for i, s in enumerate(self.strata)}
        sets = [frozenset(s) for s in self.strata]
        n = len(self.strata)
        # down[i]: faces of stratum i (including i); up[i]: its star
        self.down = [frozenset(j for j in range(n) if sets[j] <= sets[i]) for i in range(n)]
        self.up = [frozenset(j for j in range(n) if sets[i] <= sets[j]) for i in range(n)]

    def __len__(self):
        return len(self.strata)

    def __eq__(self, other):
        return isinstance(other, FacePoset) and self.complex == other.complex

    def __hash__(self):
        return hash(self.complex)

    def idx(self, s) -> int:
        if isinstance(s, int):
            return s
        if isinstance(s, str):
            s = parse_stratum_key(s)
        s = stratum(s)
        try:
            return self.index[s]
        except KeyError:
            raise ValidationError(f"unknown stratum {stratum_key(s)!r}") from None

    def leq(self, s, t) -> bool:
        """``s`` is a face of ``t``."""
        return self.idx(s) in self.down[self.idx(t)]

    def star(self, s) -> frozenset[int]:
        return self.up[self.idx(s)]

    def closure(self, s) -> frozenset[int]:
        return self.down[self.idx(s)]

    def star_strata(self, s) -> list[Stratum]:
        return [self.strata[i] for i in sorted(self.star(s))]

    def dim(self, i: int) -> int:
        return len(self.strata[i]) - 1

    def key(self, i: int) -> str:
        return stratum_key(self.strata[i])

    def covers(self) -> list[tuple[int, int]]:
        """Pairs ``(s, t)`` with ``s`` a codimension-one face of ``t``."""
        return [(i, j) for j in range(len(self)) for i in self.down[j] if self.dim(i) == self.dim(j) - 1]

    def chains(self, subset: Iterable[int] | None = None) -> list[tuple[int, ...]]:
        """Strictly increasing chains inside ``subset``, ordered by (length, lexicographic)."""
        allowed = set(range(len(self))) if subset is None else set(subset)
        elems = sorted(allowed)
        out = []
        frontier = [(i,) for i in elems]
        while frontier:
            out.extend(frontier)
            nxt = []
            for c in frontier:
                top = c[-1]
                for j in sorted(self.up[top] - {top}):
                    if j in allowed:
                        nxt.append(c + (j,))
            frontier = nxt
        return out


def _as_index_set(P: FacePoset, U) -> frozenset[int]:
    if isinstance(U, ConstructibleOpen):
        return U.members
    return frozenset(P.idx(s) for s in U)


def is_constructible_open(P: FacePoset, U) -> bool:
    members = _as_index_set(P, U)
    return all(P.up[i] <= members for i in members)


def first_violation(P: FacePoset, members: frozenset[int]):
    for i in sorted(members):
        missing = P.up[i] - members
        if missing:
            return i, min(missing)
    return None


@dataclass(frozen=True)
class ConstructibleOpen:
    """An up-closed set of strata of ``poset``."""

    poset: FacePoset
    members: frozenset[int]

    def __post_init__(self):
        bad = first_violation(self.poset, self.members)
        if bad is not None:
            s, t = bad
            raise ValidationError(
                f"set is not up-closed: contains {self.poset.key(s)!r} but not its coface {self.poset.key(t)!r}")

    @classmethod
    def of(cls, P: FacePoset, strata: Iterable) -> "ConstructibleOpen":
        return cls(P, _as_index_set(P, strata))

    @classmethod
    def star(cls, P: FacePoset, s) -> "ConstructibleOpen":
        return cls(P, P.star(s))

    @classmethod
    def everything(cls, P: FacePoset) -> "ConstructibleOpen":
        return cls(P, frozenset(range(len(P))))

    @classmethod
    def empty(cls, P: FacePoset) -> "ConstructibleOpen":
        return cls(P, frozenset())

    def __contains__(self, s) -> bool:
        return self.poset.idx(s) in self.members

    def __le__(self, other: "ConstructibleOpen") -> bool:
        return self.members <= other.members

    def __and__(self, other):
        return ConstructibleOpen(self.poset, self.members & other.members)

    def __or__(self, other):
        return ConstructibleOpen(self.poset, self.members | other.members)

    def __len__(self):
        return len(self.members)

    def strata(self) -> list[Stratum]:
        return [self.poset.strata[i] for i in sorted(self.members)]

    def to_json(self) -> dict:
        return {"strata": [list(s) for s in self.strata()]}


def face_poset(K: SimplicialComplex) -> FacePoset:
    return K.poset


def all_constructible_opens(P: FacePoset, limit: int = 4096) -> list[ConstructibleOpen]:
    """Every up-closed subset (each is the union of the stars it contains)."""
    n = len(P)
    seen = {frozenset()}
    frontier = [frozenset()]
    while frontier:
        nxt = []
        for U in frontier:
            for i in range(n):
                if i not in U:
                    V = U | P.up[i]
                    if V not in seen:
                        seen.add(V)
                        nxt.append(V)
                        if len(seen) > limit:
                            raise ValidationError(f"more than {limit} constructible opens")
        frontier = nxt
    return [ConstructibleOpen(P, U) for U in sorted(seen, key=lambda s: (len(s), sorted(s)))]


# ---------------------------------------------------------------------------
# Refinement maps


class RefinementMap:
    """Monotone surjection ``r`` from the strata of a refinement onto the strata of ``target``."""

    def __init__(self, source: FacePoset, target: FacePoset, mapping: Mapping, check: bool = True):
        self.source = source
        self.target = target
        table = [None] * len(source)
        for s, t in mapping.items():
            table[source.idx(s)] = target.idx(t)
        if any(x is None for x in table):
            raise ValidationError("refinement map is not defined on every stratum")
        self.table = tuple(table)
        if check:
            self.validate()

    def __call__(self, s) -> int:
        return self.table[self.source.idx(s)]

    def is_valid(self) -> bool:
        try:
            self.validate()
        except ValidationError:
            return False
        return True

    def validate(self):
        S1, S = self.source, self.target
        for j in range(len(S1)):
            for i in S1.down[j]:
                if self.table[i] not in S.down[self.table[j]]:
                    raise ValidationError(
                        f"refinement map is not monotone: {S1.key(i)!r} <= {S1.key(j)!r} but "
                        f"{S.key(self.table[i])!r} is not a face of {S.key(self.table[j])!r}")
        if set(self.table) != set(range(len(S))):
            missed = min(set(range(len(S))) - set(self.table))
            raise ValidationError(f"refinement map misses stratum {S.key(missed)!r}")

    def then(self, other: "RefinementMap") -> "RefinementMap":
        """Composite ``other o self``."""
        if other.source != self.target:
            raise ValidationError("refinement maps are not composable")
        return RefinementMap(self.source, other.target,
                             {self.source.strata[i]: other.target.strata[other.table[t]]
                              for i, t in enumerate(self.table)}, check=False)

    @classmethod
    def identity(cls, P: FacePoset) -> "RefinementMap":
        return cls(P, P, {s: s for s in P.strata}, check=False)

    def to_json(self) -> dict:
        return {"map": {self.source.key(i): self.target.key(t) for i, t in enumerate(self.table)}}


def validate_refinement(r: RefinementMap) -> bool:
    return r.is_valid()


def pullback_open(r: RefinementMap, U: ConstructibleOpen) -> ConstructibleOpen:
    if U.poset != r.target:
        raise ValidationError("open set does not live on the refinement's target")
    return ConstructibleOpen(r.source, frozenset(i for i, t in enumerate(r.table) if t in U.members))


# ---------------------------------------------------------------------------
# Fixtures


def _letters(n: int) -> list[str]:
    if n <= len(ascii_lowercase):
        return list(ascii_lowercase[:n])
    return [f"v{i}" for i in range(n)]


def standard_complex(name: str, n: int) -> SimplicialComplex:
    """Canonical labelled fixtures: ``path``, ``circle``, ``simplex``, ``sphere_boundary``."""
    if name == "path":
        if n < 1:
            raise ValidationError("path needs n >= 1")
        vs = [str(i) for i in range(1, n + 1)]
        return SimplicialComplex(vs, [(vs[i], vs[i + 1]) for i in range(n - 1)])
    if name == "circle":
        if n < 3:
            raise ValidationError("circle needs n >= 3")
        vs = _letters(n)
        return SimplicialComplex(vs, [(vs[i], vs[(i + 1) % n]) for i in range(n)])
    if name == "simplex":
        if n < 0:
            raise ValidationError("simplex needs n >= 0")
        vs = [str(i) for i in range(n + 1)]
        return SimplicialComplex.from_facets(vs, [vs])
    if name == "sphere_boundary":
        if n < 0:
            raise ValidationError("sphere_boundary needs n >= 0")
        vs = [str(i) for i in range(n + 2)]
        return SimplicialComplex.from_facets(vs, [c for c in combinations(vs, n + 1)])
    raise ValidationError(f"unknown fixture {name!r}")


# ---------------------------------------------------------------------------
# 1-manifolds


@dataclass(frozen=True)
class ConormalPoint1D:
    """A vertex together with one of its two covector directions.

    ``sign == "+"`` is the direction crossed by a function increasing along
    the canonical orientation.
    """

    vertex: str
    sign: str

    def __post_init__(self):
        if self.sign not in ("+", "-"):
            raise ValidationError(f"conormal sign must be '+' or '-', got {self.sign!r}")

    def __str__(self):
        return f"({self.vertex},{self.sign})"

    def to_json(self):
        return [self.vertex, self.sign]


@dataclass(frozen=True)
class Orientation1D:
    """Neighbours of each vertex along the canonical orientation (``None`` at path ends)."""

    left: Mapping[str, str | None]
    right: Mapping[str, str | None]
    walk: tuple[str, ...]
    cyclic: Mapping[str, bool]

    def is_boundary(self, v: str) -> bool:
        return self.left[v] is None or self.right[v] is None

    def outward_sign(self, v: str) -> str | None:
        """Sign pointing out of the manifold at a path end, ``None`` at interior vertices."""
        if self.left[v] is None and self.right[v] is None:
            return None
        if self.left[v] is None:
            return "-"
        if self.right[v] is None:
            return "+"
        return None

    def conormal_points(self, v: str) -> list[ConormalPoint1D]:
        """Conormal points carried by vertex ``v``.

        At a path end only the outward direction is a conormal point of the
        ambient manifold; isolated vertices carry none.
        """
        if self.left[v] is None and self.right[v] is None:
            return []
        out = self.outward_sign(v)
        if out is not None:
            return [ConormalPoint1D(v, out)]
        return [ConormalPoint1D(v, "+"), ConormalPoint1D(v, "-")]


def orientation_1d(K: SimplicialComplex) -> Orientation1D:
    if K.dimension > 1:
        raise ValidationError("not a 1-manifold: has simplices of dimension > 1")
    nbrs: dict[str, list[str]] = {v: [] for v in K.vertices}
    for a, b in K.edges():
        nbrs[a].append(b)
        nbrs[b].append(a)
    for v, ns in nbrs.items():
        if len(ns) > 2:
            raise ValidationError(f"not a 1-manifold: vertex {v!r} lies in {len(ns)} edges")
    order = {v: k for k, v in enumerate(K.vertices)}
    left: dict[str, str | None] = {}
    right: dict[str, str | None] = {}
    cyclic: dict[str, bool] = {}
    walk: list[str] = []
    seen: set[str] = set()
    for v0 in K.vertices:
        if v0 in seen:
            continue
        comp = [v0]
        stack = [v0]
        mark = {v0}
        while stack:
            x = stack.pop()
            for y in nbrs[x]:
                if y not in mark:
                    mark.add(y)
                    comp.append(y)
                    stack.append(y)
        ends = sorted((v for v in comp if len(nbrs[v]) < 2), key=order.__getitem__)
        is_cycle = not ends
        start = ends[0] if ends else min(comp, key=order.__getitem__)
        seq = [start]
        prev = None
        cur = start
        while True:
            cand = [y for y in nbrs[cur] if y != prev]
            if prev is None and len(cand) == 2:
                cand = sorted(cand, key=order.__getitem__)[:1]
            if not cand or cand[0] == start:
                break
            prev, cur = cur, cand[0]
            seq.append(cur)
        for k, v in enumerate(seq):
            if is_cycle:
                left[v] = seq[k - 1]
                right[v] = seq[(k + 1) % len(seq)]
            else:
                left[v] = seq[k - 1] if k > 0 else None
                right[v] = seq[k + 1] if k + 1 < len(seq) else None
            cyclic[v] = is_cycle
        walk.extend(seq)
        seen.update(seq)
    return Orientation1D(left, right, tuple(walk), cyclic)


def is_1manifold(K: SimplicialComplex) -> bool:
    try:
        orientation_1d(K)
    except ValidationError:
        return False
    return True


def midpoint_label(a: str, b: str) -> str:
    return f"{a}~{b}"


def subdivide_1d(K: SimplicialComplex) -> tuple[SimplicialComplex, RefinementMap]:
    """Insert one vertex in every edge; returns the refinement and its map to ``K``."""
    ori = orientation_1d(K)
    vertices: list[str] = []
    edges: list[tuple[str, str]] = []
    mapping: dict[Stratum, Stratum] = {}
    for v in ori.walk:
        vertices.append(v)
        mapping[(v,)] = (v,)
        w = ori.right[v]
        if w is not None:
            m = midpoint_label(v, w)
            vertices.append(m)
            edges.append((v, m))
            edges.append((m, w))
            e = stratum((v, w))
            mapping[(m,)] = e
            mapping[stratum((v, m))] = e
            mapping[stratum((m, w))] = e
    K2 = SimplicialComplex(vertices, edges)
    return K2, RefinementMap(K2.poset, K.poset, mapping)


def subdivide_1d_times(K: SimplicialComplex, times: int) -> tuple[SimplicialComplex, RefinementMap]:
    r = RefinementMap.identity(K.poset)
    cur = K
    for _ in range(times):
        nxt, step = subdivide_1d(cur)
        r = step.then(r)
        cur = nxt
    return cur, r


def open_arc(K: SimplicialComplex, a: str, b: str) -> ConstructibleOpen:
    """Strata strictly between vertices ``a`` and ``b`` walking along the orientation."""
    ori = orientation_1d(K)
    P = K.poset
    members = set()
    cur = a
    while True:
        nxt = ori.right[cur]
        if nxt is None:
            raise ValidationError(f"no oriented arc from {a!r} to {b!r}")
        members.add(P.idx(stratum((cur, nxt))))
        if nxt == b:
            break
        members.add(P.idx((nxt,)))
        cur = nxt
        if cur == a:
            raise ValidationError(f"no oriented arc from {a!r} to {b!r}")
    return ConstructibleOpen(P, frozenset(members))
