"""Perf S as one-sided twisted complexes of representables.

A generator ``(s, n)`` stands for the representable ``P_s = 1_star(s)``
placed in degree ``n``.  ``Hom(P_s, P_t)`` is ``Z`` (spanned by the canonical
morphism) when ``t`` is a face of ``s`` and zero otherwise, and canonical
morphisms compose to canonical morphisms.  Hence a differential is an
integer matrix ``D`` with ``D[i, j] != 0`` only when ``stratum(i) <= stratum(j)``
and ``degree(i) == degree(j) + 1``, and ``D @ D == 0`` is the twisted
complex condition.

The idempotent completion is never materialized: morphism complexes are
insensitive to it.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from . import kernel, limits
from .errors import ValidationError
from .facets import FacePoset, RefinementMap, pullback_open, ConstructibleOpen
from .zchain import IntegerComplex, IntegerMatrix, block_matrix, cohomology, is_acyclic, CohomologyReport


class TwistedComplex:
    __slots__ = ("poset", "strata", "degrees", "differential", "labels", "_rows", "_cols")

    def __init__(self, poset: FacePoset, gens: Sequence[tuple[object, int]], differential: IntegerMatrix | None = None,
                 labels: Sequence | None = None, check: bool = True):
        self.poset = poset
        self.strata = tuple(poset.idx(s) for s, _ in gens)
        self.degrees = tuple(int(n) for _, n in gens)
        n = len(self.strata)
        limits.check_twisted(n)
        self.differential = differential if differential is not None else IntegerMatrix.zeros(n, n)
        self.labels = tuple(labels) if labels is not None else tuple(range(n))
        self._rows = None
        self._cols = None
        if check:
            self.validate()

    # -- structure -----------------------------------------------------------

    def validate(self):
        n = len(self.strata)
        if self.differential.shape != (n, n):
            raise ValidationError(f"differential shape {self.differential.shape} for {n} generators")
        if len(self.labels) != n:
            raise ValidationError("labels and generators differ in length")
        down = self.poset.down
        for (i, j), _ in self.differential._data.items():
            if self.degrees[i] != self.degrees[j] + 1:
                raise ValidationError(f"differential entry {j} -> {i} does not raise degree by one")
            if self.strata[i] not in down[self.strata[j]]:
                raise ValidationError(
                    f"no morphism P_{self.poset.key(self.strata[j])} -> P_{self.poset.key(self.strata[i])}")
        if not (self.differential @ self.differential).is_zero():
            raise ValidationError("twisted differential does not square to zero")

    def __len__(self):
        return len(self.strata)

    def __repr__(self):
        gens = ", ".join(f"({self.poset.key(s)},{n})" for s, n in zip(self.strata, self.degrees))
        return f"TwistedComplex([{gens}], D={self.differential.entries})"

    def __eq__(self, other):
        if not isinstance(other, TwistedComplex):
            return NotImplemented
        return (self.poset == other.poset and self.strata == other.strata and self.degrees == other.degrees
                and self.differential == other.differential)

    def __hash__(self):
        return hash((self.strata, self.degrees, self.differential))

    @property
    def generators(self) -> list[tuple[tuple, int]]:
        return [(self.poset.strata[s], n) for s, n in zip(self.strata, self.degrees)]

    def rows(self) -> list[dict[int, int]]:
        if self._rows is None:
            rows = [dict() for _ in self.strata]
            cols = [dict() for _ in self.strata]
            for (i, j), v in self.differential._data.items():
                rows[i][j] = v
                cols[j][i] = v
            self._rows, self._cols = rows, cols
        return self._rows

    def cols(self) -> list[dict[int, int]]:
        self.rows()
        return self._cols

    def is_nilpotent(self) -> bool:
        """``D^(span + 1) == 0`` where span is the spread of degrees."""
        if not self.degrees:
            return True
        span = max(self.degrees) - min(self.degrees)
        M = IntegerMatrix.identity(len(self))
        for _ in range(span + 1):
            M = M @ self.differential
        return M.is_zero()

    def to_json(self) -> dict:
        return {"generators": [{"stratum": list(self.poset.strata[s]), "degree": n}
                               for s, n in zip(self.strata, self.degrees)],
                "differential": [[i, j, v] for i, j, v in self.differential.entries]}

    @classmethod
    def from_json(cls, poset: FacePoset, data: Mapping) -> "TwistedComplex":
        gens = [(g["stratum"], g["degree"]) for g in data["generators"]]
        n = len(gens)
        return cls(poset, gens, IntegerMatrix(n, n, [tuple(e) for e in data.get("differential", [])]))


class HomComplex:
    """``hom(a, b)`` with basis the matrix units ``E[j, i]`` (source gen ``i`` to target gen ``j``).

    The differential is ``phi -> D_b phi - (-1)^|phi| phi D_a``.
    """

    __slots__ = ("source", "target", "pairs", "index", "complex", "_by_target", "_by_source")

    def __init__(self, a: TwistedComplex, b: TwistedComplex):
        if a.poset != b.poset:
            raise ValidationError("objects live over different posets")
        self.source, self.target = a, b
        down = a.poset.down
        pairs = []
        for i, s in enumerate(a.strata):
            dn = down[s]
            for j, t in enumerate(b.strata):
                if t in dn:
                    pairs.append((i, j))
        self.pairs = pairs
        self.index = {p: k for k, p in enumerate(pairs)}
        degrees = [b.degrees[j] - a.degrees[i] for i, j in pairs]
        rowsA = a.rows()
        colsB = b.cols()
        data = {}
        index = self.index
        for k, (i, j) in enumerate(pairs):
            sign = -1 if degrees[k] % 2 == 0 else 1
            for j2, v in colsB[j].items():
                key = (index[(i, j2)], k)
                data[key] = data.get(key, 0) + v
            for i2, v in rowsA[i].items():
                key = (index[(i2, j)], k)
                data[key] = data.get(key, 0) + sign * v
        data = {key: v for key, v in data.items() if v}
        n = len(pairs)
        self.complex = IntegerComplex(degrees, IntegerMatrix._wrap(n, n, data), pairs, check=False)
        self._by_target = None
        self._by_source = None

    def __len__(self):
        return len(self.pairs)

    def by_source(self) -> dict[int, list[tuple[int, int]]]:
        """source generator i -> [(basis index, target generator j)]"""
        if self._by_source is None:
            d: dict[int, list] = {}
            for k, (i, j) in enumerate(self.pairs):
                d.setdefault(i, []).append((k, j))
            self._by_source = d
        return self._by_source

    def by_target(self) -> dict[int, list[tuple[int, int]]]:
        """target generator j -> [(basis index, source generator i)]"""
        if self._by_target is None:
            d: dict[int, list] = {}
            for k, (i, j) in enumerate(self.pairs):
                d.setdefault(j, []).append((k, i))
            self._by_target = d
        return self._by_target

    def cohomology(self) -> CohomologyReport:
        return cohomology(self.complex)

    def vector(self, f: "Morphism") -> dict[int, int]:
        out = {}
        for (j, i), v in f.matrix._data.items():
            out[self.index[(i, j)]] = v
        return out

    def morphism(self, vec: Mapping[int, int]) -> "Morphism":
        degs = {self.complex.degrees[k] for k, v in vec.items() if v}
        if len(degs) > 1:
            raise ValidationError("cochain is not homogeneous")
        deg = degs.pop() if degs else 0
        data = {}
        for k, v in vec.items():
            if v:
                i, j = self.pairs[k]
                data[(j, i)] = v
        return Morphism(self.source, self.target, deg,
                        IntegerMatrix._wrap(len(self.target), len(self.source), data), check=False)


def hom_complex(a: TwistedComplex, b: TwistedComplex) -> HomComplex:
    return HomComplex(a, b)


class Morphism:
    """Homogeneous element of ``hom(source, target)``; ``matrix[j, i]`` maps source ``i`` to target ``j``."""

    __slots__ = ("source", "target", "degree", "matrix")

    def __init__(self, source: TwistedComplex, target: TwistedComplex, degree: int, matrix: IntegerMatrix,
                 check: bool = True):
        self.source, self.target, self.degree, self.matrix = source, target, degree, matrix
        if check:
            if matrix.shape != (len(target), len(source)):
                raise ValidationError(f"morphism matrix has shape {matrix.shape}")
            down = source.poset.down
            for (j, i), _ in matrix._data.items():
                if target.strata[j] not in down[source.strata[i]]:
                    raise ValidationError("morphism entry between unrelated strata")
                if target.degrees[j] - source.degrees[i] != degree:
                    raise ValidationError("morphism entry of the wrong degree")

    def differential(self) -> "Morphism":
        sign = (-1) ** (self.degree % 2)
        m = self.target.differential @ self.matrix - (self.matrix @ self.source.differential).scale(sign)
        return Morphism(self.source, self.target, self.degree + 1, m, check=False)

    def is_closed(self) -> bool:
        return self.differential().matrix.is_zero()

    def __add__(self, other: "Morphism") -> "Morphism":
        return Morphism(self.source, self.target, self.degree, self.matrix + other.matrix, check=False)

    def scale(self, k: int) -> "Morphism":
        return Morphism(self.source, self.target, self.degree, self.matrix.scale(k), check=False)

    def __eq__(self, other):
        return (isinstance(other, Morphism) and self.degree == other.degree and self.matrix == other.matrix
                and self.source == other.source and self.target == other.target)

    @classmethod
    def identity(cls, a: TwistedComplex) -> "Morphism":
        return cls(a, a, 0, IntegerMatrix.identity(len(a)), check=False)

    @classmethod
    def zero(cls, a: TwistedComplex, b: TwistedComplex, degree: int = 0) -> "Morphism":
        return cls(a, b, degree, IntegerMatrix.zeros(len(b), len(a)), check=False)


def compose(f: Morphism, g: Morphism) -> Morphism:
    """``g o f`` for ``f: a -> b`` and ``g: b -> c``."""
    if f.target != g.source:
        raise ValidationError("morphisms are not composable")
    return Morphism(f.source, g.target, f.degree + g.degree, g.matrix @ f.matrix, check=False)


# -- constructions -----------------------------------------------------------


def representable(poset: FacePoset, s) -> TwistedComplex:
    return TwistedComplex(poset, [(poset.idx(s), 0)], labels=[("P", poset.key(poset.idx(s)))], check=False)


def zero_object(poset: FacePoset) -> TwistedComplex:
    return TwistedComplex(poset, [], check=False)


def mapping_cone(f: Morphism) -> TwistedComplex:
    """``b + a[1]`` with differential ``[[D_b, f], [0, -D_a]]`` for a closed degree-0 ``f: a -> b``."""
    if f.degree != 0:
        raise ValidationError("mapping cone needs a degree-0 morphism")
    if not f.is_closed():
        raise ValidationError("mapping cone needs a closed morphism")
    a, b = f.source, f.target
    n, m = len(b), len(a)
    D = block_matrix([[b.differential, f.matrix], [None, -a.differential]], [n, m], [n, m])
    gens = [(s, d) for s, d in zip(b.strata, b.degrees)] + [(s, d - 1) for s, d in zip(a.strata, a.degrees)]
    labels = [("target", x) for x in b.labels] + [("source", x) for x in a.labels]
    return TwistedComplex(a.poset, gens, D, labels, check=False)


def shift(a: TwistedComplex, k: int) -> TwistedComplex:
    """``a[k]``: degrees lowered by ``k``; the differential changes sign for odd ``k``."""
    if k == 0:
        return a
    gens = [(s, d - k) for s, d in zip(a.strata, a.degrees)]
    return TwistedComplex(a.poset, gens, a.differential.scale((-1) ** (k % 2)), a.labels, check=False)


def direct_sum(*objs: TwistedComplex) -> TwistedComplex:
    if not objs:
        raise ValidationError("direct_sum of nothing")
    P = objs[0].poset
    if any(o.poset != P for o in objs):
        raise ValidationError("objects live over different posets")
    sizes = [len(o) for o in objs]
    blocks = [[o.differential if r == c else None for c, _ in enumerate(objs)] for r, o in enumerate(objs)]
    D = block_matrix(blocks, sizes, sizes)
    gens = [(s, d) for o in objs for s, d in zip(o.strata, o.degrees)]
    labels = [(k, x) for k, o in enumerate(objs) for x in o.labels]
    return TwistedComplex(P, gens, D, labels, check=False)


def tensor_by_complex(a: TwistedComplex, C: IntegerComplex) -> TwistedComplex:
    """``C (x) a`` with generators ``(c, x)`` and ``d(c x) = dc x + (-1)^|c| c dx``."""
    limits.check_twisted(len(C) * len(a), "tensor product")
    m = len(a)
    gens = []
    labels = []
    for c, cd in enumerate(C.degrees):
        for x in range(m):
            gens.append((a.strata[x], cd + a.degrees[x]))
            labels.append((C.labels[c], a.labels[x]))
    data = {}
    for (c2, c), v in C.differential._data.items():
        for x in range(m):
            data[(c2 * m + x, c * m + x)] = v
    for c, cd in enumerate(C.degrees):
        sign = -1 if cd % 2 else 1
        for (x2, x), v in a.differential._data.items():
            key = (c * m + x2, c * m + x)
            data[key] = data.get(key, 0) + sign * v
    n = len(gens)
    D = IntegerMatrix._wrap(n, n, {k: v for k, v in data.items() if v})
    return TwistedComplex(a.poset, gens, D, labels, check=False)


def evaluation_morphism(X: TwistedComplex, b: TwistedComplex, H: HomComplex | None = None):
    """The evaluation ``hom(X, b) (x) X -> b`` as ``(source object, closed degree-0 morphism)``."""
    H = H if H is not None else HomComplex(X, b)
    T = tensor_by_complex(X, H.complex)
    m = len(X)
    data = {}
    for k, (i, j) in enumerate(H.pairs):
        data[(j, k * m + i)] = 1
    ev = Morphism(T, b, 0, IntegerMatrix._wrap(len(b), len(T), data), check=False)
    return T, ev


def evaluate(a: TwistedComplex, t) -> IntegerComplex:
    """The module value ``a(t) = hom(P_t, a)``: generators carried by faces of ``t``."""
    t = a.poset.idx(t)
    keep = [i for i, s in enumerate(a.strata) if s in a.poset.down[t]]
    d = a.differential.submatrix(keep, keep)
    return IntegerComplex([a.degrees[i] for i in keep], d, [a.labels[i] for i in keep], check=False)


def evaluations(a: TwistedComplex) -> dict[int, CohomologyReport]:
    return {t: cohomology(evaluate(a, t)) for t in range(len(a.poset))}


def is_zero_object(a: TwistedComplex) -> bool:
    """Acyclic at every stratum, i.e. zero in Perf S."""
    return all(is_acyclic(evaluate(a, t)) for t in range(len(a.poset)))


def verify_quasi_iso(f: Morphism) -> bool:
    return is_zero_object(mapping_cone(f))


def minimize(a: TwistedComplex) -> TwistedComplex:
    """Homotopy-equivalent twisted complex with no unit entries between equal strata.

    Gaussian elimination along an invertible component ``P_s -> P_s``.
    """
    alive, reduced = kernel.eliminate_units(len(a), a.differential._data, None, a.strata)
    pos = {g: k for k, g in enumerate(alive)}
    data = {(pos[i], pos[j]): v for (i, j), v in reduced.items()}
    gens = [(a.strata[g], a.degrees[g]) for g in alive]
    return TwistedComplex(a.poset, gens, IntegerMatrix._wrap(len(alive), len(alive), data),
                          [a.labels[g] for g in alive], check=False)


def is_exceptional(objs: Sequence[TwistedComplex]) -> tuple[bool, str]:
    """End = Z.id in degree 0 and nonzero Homs directed along an acyclic relation."""
    n = len(objs)
    nonzero = [[False] * n for _ in range(n)]
    for x in range(n):
        for y in range(n):
            H = cohomology(HomComplex(objs[x], objs[y]).complex)
            if x == y:
                if dict(H.groups) != {0: (1, ())}:
                    return False, f"object {x} has endomorphisms {H}"
                if not _identity_generates(objs[x]):
                    return False, f"identity of object {x} does not generate its endomorphisms"
            else:
                nonzero[x][y] = not H.is_zero()
    # acyclicity of the directed relation
    state = [0] * n

    def visit(u):
        state[u] = 1
        for v in range(n):
            if nonzero[u][v]:
                if state[v] == 1 or (state[v] == 0 and not visit(v)):
                    return False
        state[u] = 2
        return True

    for u in range(n):
        if state[u] == 0 and not visit(u):
            return False, "homs are not one-directional"
    return True, "ok"


def _identity_generates(a: TwistedComplex) -> bool:
    from .zchain import cohomology_basis, reduce_complex, cocycle_class_is_zero

    H = HomComplex(a, a)
    red = reduce_complex(H.complex, track=True)
    basis = cohomology_basis(H.complex, 0, red)
    if len(basis) != 1:
        return False
    ident = H.vector(Morphism.identity(a))
    b = basis[0]
    # id = +-b modulo coboundaries
    for sgn in (1, -1):
        diff = dict(ident)
        for k, v in b.items():
            diff[k] = diff.get(k, 0) - sgn * v
        if cocycle_class_is_zero(H.complex, {k: v for k, v in diff.items() if v}, red):
            return True
    return False


# -- change of stratification ------------------------------------------------


def refinement_pushforward(r: RefinementMap, a: TwistedComplex) -> TwistedComplex:
    """Extension of scalars along ``r``: relabel ``P'_s`` as ``P_r(s)``."""
    if a.poset != r.source:
        raise ValidationError("object does not live on the refinement's source")
    gens = [(r.table[s], d) for s, d in zip(a.strata, a.degrees)]
    return TwistedComplex(r.target, gens, a.differential, a.labels, check=False)


def pushforward_morphism(r: RefinementMap, f: Morphism, source=None, target=None) -> Morphism:
    src = source if source is not None else refinement_pushforward(r, f.source)
    tgt = target if target is not None else refinement_pushforward(r, f.target)
    return Morphism(src, tgt, f.degree, f.matrix, check=False)


def pullback(r: RefinementMap, a: TwistedComplex) -> TwistedComplex:
    """Restriction of scalars ``r^*``.

    ``r^* P_s`` is the indicator of ``r^{-1}(star s)``; each one is replaced
    by its order-complex resolution and the canonical morphisms of ``a`` by
    canonical inclusions.  Generators are ``(i, chain)`` with degree
    ``deg(i) - len(chain) + 1`` and differential ``D (x) incl + (-1)^deg(i) (1 (x) d_res)``.
    """
    from .microsheaf import chain_differential

    if a.poset != r.target:
        raise ValidationError("object does not live on the refinement's target")
    S1 = r.source
    blocks = []
    for s in a.strata:
        U = pullback_open(r, ConstructibleOpen(r.target, r.target.up[s]))
        blocks.append(S1.chains(U.members))
    offsets = []
    pos = {}
    gens = []
    labels = []
    for i, chains in enumerate(blocks):
        offsets.append(len(gens))
        for c in chains:
            pos[(i, c)] = len(gens)
            gens.append((c[-1], a.degrees[i] - (len(c) - 1)))
            labels.append((a.labels[i], tuple(S1.key(x) for x in c)))
    limits.check_twisted(len(gens), "pullback")
    data = {}
    for i, chains in enumerate(blocks):
        sign = -1 if a.degrees[i] % 2 else 1
        for c in chains:
            col = pos[(i, c)]
            for face, v in chain_differential(c):
                key = (pos[(i, face)], col)
                data[key] = data.get(key, 0) + sign * v
    for (i2, i), v in a.differential._data.items():
        for c in blocks[i]:
            # every chain of r^{-1} star(s_i) lies in r^{-1} star(s_i2)
            key = (pos[(i2, c)], pos[(i, c)])
            data[key] = data.get(key, 0) + v
    n = len(gens)
    D = IntegerMatrix._wrap(n, n, {k: v for k, v in data.items() if v})
    return TwistedComplex(S1, gens, D, labels, check=False)
