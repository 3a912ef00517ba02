"""Exact linear algebra and homological primitives over Z.

Conventions used throughout the package:

* cohomological grading, the differential raises degree by one;
* ``d[i, j]`` is the coefficient of generator ``i`` in ``d(e_j)``;
* the mapping cone of ``f: A -> B`` has generators ``B`` followed by ``A``
  shifted down one degree and differential ``[[d_B, f], [0, -d_A]]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import kernel
from .errors import ValidationError


class IntegerMatrix:
    """Sparse integer matrix with deterministic (row, col) ordering.

    Zero entries are never stored.  Instances are treated as immutable.
    """

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, entries=()):
        self.rows = rows
        self.cols = cols
        data = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for item in items:
            if len(item) == 3:
                r, c, v = item
            else:
                (r, c), v = item
            if not (0 <= r < rows and 0 <= c < cols):
                raise ValidationError(f"entry ({r}, {c}) outside a {rows}x{cols} matrix")
            if (r, c) in data:
                raise ValidationError(f"duplicate entry at ({r}, {c})")
            if v:
                data[(r, c)] = int(v)
        self._data = data

    @classmethod
    def _wrap(cls, rows, cols, data):
        m = cls.__new__(cls)
        m.rows, m.cols, m._data = rows, cols, data
        return m

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[int]], cols: int | None = None) -> "IntegerMatrix":
        rows = len(dense)
        if cols is None:
            cols = len(dense[0]) if rows else 0
        data = {(r, c): int(v) for r, row in enumerate(dense) for c, v in enumerate(row) if v}
        return cls._wrap(rows, cols, data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntegerMatrix":
        return cls._wrap(rows, cols, {})

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls._wrap(n, n, {(i, i): 1 for i in range(n)})

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def entries(self) -> list[tuple[int, int, int]]:
        return [(r, c, v) for (r, c), v in sorted(self._data.items())]

    def as_dict(self) -> dict:
        return dict(self._data)

    def __getitem__(self, key):
        return self._data.get(key, 0)

    def __len__(self):
        return len(self._data)

    def __eq__(self, other):
        if not isinstance(other, IntegerMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(sorted(self._data.items()))))

    def __repr__(self):
        return f"IntegerMatrix({self.rows}, {self.cols}, {self.entries!r})"

    def is_zero(self) -> bool:
        return not self._data

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self._data.items():
            out[r][c] = v
        return out

    def transpose(self) -> "IntegerMatrix":
        return IntegerMatrix._wrap(self.cols, self.rows, {(c, r): v for (r, c), v in self._data.items()})

    def scale(self, k: int) -> "IntegerMatrix":
        if k == 0:
            return IntegerMatrix.zeros(self.rows, self.cols)
        return IntegerMatrix._wrap(self.rows, self.cols, {key: k * v for key, v in self._data.items()})

    def __neg__(self):
        return self.scale(-1)

    def __add__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.shape != other.shape:
            raise ValidationError(f"shape mismatch {self.shape} vs {other.shape}")
        data = dict(self._data)
        for key, v in other._data.items():
            w = data.get(key, 0) + v
            if w:
                data[key] = w
            else:
                data.pop(key, None)
        return IntegerMatrix._wrap(self.rows, self.cols, data)

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.cols != other.rows:
            raise ValidationError(f"cannot multiply {self.shape} by {other.shape}")
        by_row = {}
        for (r, c), v in other._data.items():
            by_row.setdefault(r, []).append((c, v))
        data = {}
        for (r, k), a in self._data.items():
            for c, b in by_row.get(k, ()):
                key = (r, c)
                w = data.get(key, 0) + a * b
                if w:
                    data[key] = w
                else:
                    del data[key]
        return IntegerMatrix._wrap(self.rows, other.cols, data)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "IntegerMatrix":
        rpos = {r: k for k, r in enumerate(row_idx)}
        cpos = {c: k for k, c in enumerate(col_idx)}
        data = {}
        for (r, c), v in self._data.items():
            if r in rpos and c in cpos:
                data[(rpos[r], cpos[c])] = v
        return IntegerMatrix._wrap(len(row_idx), len(col_idx), data)

    def apply(self, vec: Mapping[int, int]) -> dict[int, int]:
        """Matrix times a sparse column vector."""
        out: dict[int, int] = {}
        for (r, c), v in self._data.items():
            x = vec.get(c)
            if x:
                out[r] = out.get(r, 0) + v * x
        return {k: v for k, v in out.items() if v}


def block_matrix(blocks: Sequence[Sequence[IntegerMatrix | None]], row_sizes, col_sizes) -> IntegerMatrix:
    """Assemble a matrix from a grid of blocks (``None`` means zero)."""
    data = {}
    r0 = 0
    for bi, rs in enumerate(row_sizes):
        c0 = 0
        for bj, cs in enumerate(col_sizes):
            b = blocks[bi][bj]
            if b is not None:
                if b.shape != (rs, cs):
                    raise ValidationError(f"block ({bi},{bj}) has shape {b.shape}, expected {(rs, cs)}")
                for (r, c), v in b._data.items():
                    data[(r0 + r, c0 + c)] = v
            c0 += cs
        r0 += rs
    return IntegerMatrix._wrap(sum(row_sizes), sum(col_sizes), data)


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(A: IntegerMatrix | Sequence[Sequence[int]], transforms: bool = False):
    """Invariant factors of ``A``.

    Returns the list ``[d1, d2, ...]`` of positive invariant factors with
    ``d1 | d2 | ...`` (its length is the rank).  With ``transforms=True``
    returns ``(invariants, U, V)`` with ``U`` and ``V`` unimodular dense
    matrices such that ``U @ A @ V`` is diagonal with the invariants on the
    diagonal.
    """
    if not isinstance(A, IntegerMatrix):
        A = IntegerMatrix.from_dense(A)
    if not transforms:
        if A.is_zero():
            return []
        return kernel.snf_invariants(A.to_dense(), A.rows, A.cols)
    return _snf_with_transforms(A.to_dense(), A.rows, A.cols)


def _snf_with_transforms(M, m, n):
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_add(dst, src, q):  # row dst -= q * row src  (on M and U)
        Md, Ms = M[dst], M[src]
        for c in range(n):
            if Ms[c]:
                Md[c] -= q * Ms[c]
        Ud, Us = U[dst], U[src]
        for c in range(m):
            if Us[c]:
                Ud[c] -= q * Us[c]

    def col_add(dst, src, q):  # col dst -= q * col src  (on M and V)
        for r in range(m):
            if M[r][src]:
                M[r][dst] -= q * M[r][src]
        for r in range(n):
            if V[r][src]:
                V[r][dst] -= q * V[r][src]

    def row_swap(a, b):
        M[a], M[b] = M[b], M[a]
        U[a], U[b] = U[b], U[a]

    def col_swap(a, b):
        for row in M:
            row[a], row[b] = row[b], row[a]
        for row in V:
            row[a], row[b] = row[b], row[a]

    t = 0
    while t < min(m, n):
        best = None
        for r in range(t, m):
            for c in range(t, n):
                v = M[r][c]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), r, c)
        if best is None:
            break
        _, r, c = best
        row_swap(t, r)
        col_swap(t, c)
        while True:
            p = M[t][t]
            changed = False
            for r in range(t + 1, m):
                if M[r][t]:
                    row_add(r, t, M[r][t] // p)
                    if M[r][t]:
                        changed = True
            for c in range(t + 1, n):
                if M[t][c]:
                    col_add(c, t, M[t][c] // p)
                    if M[t][c]:
                        changed = True
            if changed:
                best = None
                for r in range(t, m):
                    v = M[r][t]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), r, t)
                for c in range(t, n):
                    v = M[t][c]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), t, c)
                _, r, c = best
                row_swap(t, r)
                col_swap(t, c)
                continue
            # divisibility of the remaining block
            bad = None
            for r in range(t + 1, m):
                for c in range(t + 1, n):
                    if M[r][c] % p:
                        bad = r
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(t, bad, -1)
        if M[t][t] < 0:
            M[t] = [-x for x in M[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    invariants = [M[i][i] for i in range(min(m, n)) if M[i][i]]
    return invariants, U, V


def solve_integer(A: IntegerMatrix, b: Mapping[int, int]):
    """An integer solution ``x`` of ``A x = b`` as a dict, or ``None``."""
    inv, U, V = smith_normal_form(A, transforms=True)
    y = [sum(U[r][k] * b.get(k, 0) for k in range(A.rows)) for r in range(A.rows)]
    z = [0] * A.cols
    for i, d in enumerate(inv):
        if y[i] % d:
            return None
        z[i] = y[i] // d
    if any(y[i] for i in range(len(inv), A.rows)):
        return None
    x = {}
    for r in range(A.cols):
        s = sum(V[r][k] * z[k] for k in range(A.cols))
        if s:
            x[r] = s
    return x


# ---------------------------------------------------------------------------
# Complexes


@dataclass(frozen=True)
class CohomologyReport:
    """Cohomology groups ``H^n = Z^rank + torsion`` keyed by degree.

    Only nonzero degrees are stored; every other degree is zero.
    """

    groups: Mapping[int, tuple[int, tuple[int, ...]]] = field(default_factory=dict)
    level: int | None = None

    def __post_init__(self):
        clean = {}
        for n, (rank, tors) in sorted(self.groups.items()):
            tors = tuple(sorted(int(t) for t in tors if t not in (0, 1)))
            for a, b in zip(tors, tors[1:]):
                if b % a:
                    raise ValidationError(f"torsion {tors} in degree {n} is not a divisibility chain")
            if rank or tors:
                clean[int(n)] = (int(rank), tors)
        object.__setattr__(self, "groups", clean)

    def rank(self, n: int) -> int:
        return self.groups.get(n, (0, ()))[0]

    def torsion(self, n: int) -> tuple[int, ...]:
        return self.groups.get(n, (0, ()))[1]

    def degrees(self) -> list[int]:
        return sorted(self.groups)

    def is_zero(self) -> bool:
        return not self.groups

    def __eq__(self, other):
        if not isinstance(other, CohomologyReport):
            return NotImplemented
        return dict(self.groups) == dict(other.groups)

    def __hash__(self):
        return hash(tuple(sorted(self.groups.items())))

    def euler_characteristic(self) -> int:
        return sum((-1) ** (n % 2) * r for n, (r, _) in self.groups.items())

    def to_json(self) -> dict:
        out = {"degrees": [{"n": n, "rank": r, "torsion": list(t)} for n, (r, t) in sorted(self.groups.items())]}
        if self.level is not None:
            out["level"] = self.level
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "CohomologyReport":
        groups = {int(d["n"]): (int(d["rank"]), tuple(d.get("torsion", ()))) for d in data["degrees"]}
        return cls(groups, data.get("level"))

    def __str__(self):
        if not self.groups:
            return "0"
        parts = []
        for n, (r, t) in sorted(self.groups.items()):
            pieces = ([f"Z^{r}" if r != 1 else "Z"] if r else []) + [f"Z/{d}" for d in t]
            parts.append(f"H^{n} = " + " + ".join(pieces))
        return "; ".join(parts)


class IntegerComplex:
    """Finitely generated free cochain complex over Z.

    ``degrees[i]`` is the degree of generator ``i``; ``differential[i, j]``
    is the coefficient of ``e_i`` in ``d(e_j)``.
    """

    __slots__ = ("labels", "degrees", "differential")

    def __init__(self, degrees: Sequence[int], differential: IntegerMatrix | None = None,
                 labels: Sequence | None = None, check: bool = True):
        self.degrees = tuple(int(x) for x in degrees)
        n = len(self.degrees)
        self.labels = tuple(labels) if labels is not None else tuple(range(n))
        if len(self.labels) != n:
            raise ValidationError("labels and degrees differ in length")
        self.differential = differential if differential is not None else IntegerMatrix.zeros(n, n)
        if self.differential.shape != (n, n):
            raise ValidationError(f"differential shape {self.differential.shape} for {n} generators")
        if check:
            self.validate()

    def validate(self):
        deg = self.degrees
        for (i, j), v in self.differential._data.items():
            if deg[i] != deg[j] + 1:
                raise ValidationError(
                    f"differential entry {self.labels[j]!r} -> {self.labels[i]!r} "
                    f"joins degrees {deg[j]} and {deg[i]}")
        if not (self.differential @ self.differential).is_zero():
            raise ValidationError("differential does not square to zero")

    def __len__(self):
        return len(self.degrees)

    def __repr__(self):
        return f"IntegerComplex(degrees={self.degrees}, d={self.differential.entries})"

    def __eq__(self, other):
        if not isinstance(other, IntegerComplex):
            return NotImplemented
        return (self.degrees, self.labels, self.differential) == (other.degrees, other.labels, other.differential)

    def __hash__(self):
        return hash((self.degrees, self.labels, self.differential))

    def euler_characteristic(self) -> int:
        return sum((-1) ** (d % 2) for d in self.degrees)

    def shift(self, k: int) -> "IntegerComplex":
        """``C[k]``: degrees lowered by ``k``, differential negated for odd ``k``."""
        return IntegerComplex([d - k for d in self.degrees], self.differential.scale((-1) ** (k % 2)),
                              self.labels, check=False)

    def direct_sum(self, other: "IntegerComplex") -> "IntegerComplex":
        n, m = len(self), len(other)
        d = block_matrix([[self.differential, None], [None, other.differential]], [n, m], [n, m])
        labels = [(0, x) for x in self.labels] + [(1, x) for x in other.labels]
        return IntegerComplex(self.degrees + other.degrees, d, labels, check=False)

    def generators_in(self, n: int) -> list[int]:
        return [i for i, d in enumerate(self.degrees) if d == n]


def integer_complex(gens: Iterable[tuple[object, int]], entries=()) -> IntegerComplex:
    """Convenience constructor from ``[(label, degree), ...]`` and ``[(i, j, v), ...]``."""
    gens = list(gens)
    labels = [g[0] for g in gens]
    degrees = [g[1] for g in gens]
    return IntegerComplex(degrees, IntegerMatrix(len(gens), len(gens), entries), labels)


@dataclass
class ReducedComplex:
    """Result of unit cancellation: the surviving core plus the elimination log."""

    source: IntegerComplex
    alive: list[int]
    core: IntegerComplex
    log: list | None

    def project(self, vec: Mapping[int, int]) -> dict[int, int]:
        """Image of a cochain of the source under the homotopy equivalence to the core.

        Returned in core indices.
        """
        z = {k: v for k, v in vec.items() if v}
        if self.log is None:
            raise ValueError("reduction was computed without a log")
        for i, j, u, colj, _rowi in self.log:
            zi = z.get(i)
            if zi:
                c = zi * u
                for k, a in colj.items():
                    w = z.get(k, 0) - c * a
                    if w:
                        z[k] = w
                    else:
                        z.pop(k, None)
            z.pop(j, None)
        pos = {g: k for k, g in enumerate(self.alive)}
        return {pos[g]: v for g, v in z.items() if v}

    def lift(self, vec: Mapping[int, int]) -> dict[int, int]:
        """Image of a core cochain in the source under the inclusion equivalence."""
        if self.log is None:
            raise ValueError("reduction was computed without a log")
        x = {self.alive[k]: v for k, v in vec.items() if v}
        for i, j, u, _colj, rowi in reversed(self.log):
            s = 0
            for l, b in rowi.items():
                if l != j:
                    xl = x.get(l)
                    if xl:
                        s += b * xl
            if s:
                x[j] = x.get(j, 0) - u * s
        return {k: v for k, v in x.items() if v}


def reduce_complex(C: IntegerComplex, track: bool = False) -> ReducedComplex:
    log = [] if track else None
    alive, reduced = kernel.eliminate_units(len(C), C.differential._data, log)
    pos = {g: k for k, g in enumerate(alive)}
    data = {(pos[i], pos[j]): v for (i, j), v in reduced.items()}
    core = IntegerComplex([C.degrees[g] for g in alive],
                          IntegerMatrix._wrap(len(alive), len(alive), data),
                          [C.labels[g] for g in alive], check=False)
    return ReducedComplex(C, alive, core, log)


def _degree_blocks(C: IntegerComplex):
    by_deg: dict[int, list[int]] = {}
    for i, d in enumerate(C.degrees):
        by_deg.setdefault(d, []).append(i)
    return by_deg


def cohomology(C: IntegerComplex, reduce: bool = True) -> CohomologyReport:
    """Ranks and torsion of ``H^*(C)``."""
    core = reduce_complex(C).core if reduce else C
    by_deg = _degree_blocks(core)
    ranks: dict[int, int] = {}
    tors: dict[int, list[int]] = {}
    d = core.differential
    for n, idx in by_deg.items():
        nxt = by_deg.get(n + 1)
        if not nxt:
            ranks[n] = 0
            continue
        block = d.submatrix(nxt, idx)
        inv = smith_normal_form(block) if not block.is_zero() else []
        ranks[n] = len(inv)
        tors[n + 1] = [x for x in inv if x > 1]
    groups = {}
    for n, idx in by_deg.items():
        rank = len(idx) - ranks.get(n, 0) - ranks.get(n - 1, 0)
        groups[n] = (rank, tuple(tors.get(n, ())))
    return CohomologyReport(groups)


def is_acyclic(C: IntegerComplex) -> bool:
    return cohomology(C).is_zero()


def cocycle_class_is_zero(C: IntegerComplex, vec: Mapping[int, int], reduced: ReducedComplex | None = None) -> bool:
    """Whether a cocycle ``vec`` (all in one degree) is a coboundary over Z."""
    if not vec:
        return True
    degs = {C.degrees[i] for i in vec}
    if len(degs) != 1:
        raise ValidationError("cochain is not homogeneous")
    n = degs.pop()
    if C.differential.apply(vec):
        raise ValidationError("cochain is not closed")
    red = reduced if reduced is not None else reduce_complex(C, track=True)
    z = red.project(vec)
    if not z:
        return True
    core = red.core
    by_deg = _degree_blocks(core)
    tgt = by_deg.get(n, [])
    src = by_deg.get(n - 1, [])
    if not src:
        return False
    pos = {g: k for k, g in enumerate(tgt)}
    b = {pos[g]: v for g, v in z.items()}
    return solve_integer(core.differential.submatrix(tgt, src), b) is not None


def cohomology_basis(C: IntegerComplex, n: int, reduced: ReducedComplex | None = None) -> list[dict[int, int]]:
    """Cocycles of ``C`` in degree ``n`` whose classes span the free part of ``H^n``.

    The classes are independent modulo torsion and generate ``H^n`` modulo
    torsion.
    """
    red = reduced if reduced is not None else reduce_complex(C, track=True)
    core = red.core
    by_deg = _degree_blocks(core)
    here = by_deg.get(n, [])
    if not here:
        return []
    up = by_deg.get(n + 1, [])
    down = by_deg.get(n - 1, [])
    # kernel of d_n on the core
    dn = core.differential.submatrix(up, here) if up else IntegerMatrix.zeros(0, len(here))
    kernel_vecs = _integer_kernel(dn, len(here))
    if down:
        dm = core.differential.submatrix(here, down)
        image_cols = [{r: v for (r, c), v in dm._data.items() if c == k} for k in range(len(down))]
    else:
        image_cols = []
    # complement of the image (saturated) inside the kernel lattice
    chosen = _complement_mod_image(kernel_vecs, image_cols, len(here))
    return [red.lift({here[k]: v for k, v in vec.items() if v}) for vec in chosen]


def _integer_kernel(A: IntegerMatrix, n: int) -> list[dict[int, int]]:
    if A.rows == 0 or A.is_zero():
        return [{k: 1} for k in range(n)]
    inv, _U, V = smith_normal_form(A, transforms=True)
    r = len(inv)
    out = []
    for k in range(r, n):
        vec = {row: V[row][k] for row in range(n) if V[row][k]}
        out.append(vec)
    return out


def _complement_mod_image(kernel_vecs, image_cols, n):
    """Basis of kernel / image modulo torsion, as kernel vectors."""
    if not kernel_vecs:
        return []
    k = len(kernel_vecs)
    # express image in kernel coordinates: K c = b; K has full column rank
    K = IntegerMatrix(n, k, [(r, c, v) for c, vec in enumerate(kernel_vecs) for r, v in vec.items()])
    coords = []
    for col in image_cols:
        if not col:
            continue
        x = solve_integer(K, col)
        if x is None:
            raise ValidationError("image not contained in kernel; d^2 != 0?")
        coords.append(x)
    if not coords:
        return kernel_vecs
    B = IntegerMatrix(k, len(coords), [(r, c, v) for c, x in enumerate(coords) for r, v in x.items()])
    inv, U, _V = smith_normal_form(B, transforms=True)
    # rows of U beyond rank give functionals vanishing on the image; use U^{-1} columns
    Uinv = _inverse_unimodular(U)
    r = len(inv)
    out = []
    for c in range(r, k):
        kc = [Uinv[row][c] for row in range(k)]
        vec = {}
        for j, coef in enumerate(kc):
            if coef:
                for row, v in kernel_vecs[j].items():
                    vec[row] = vec.get(row, 0) + coef * v
        out.append({a: b for a, b in vec.items() if b})
    return out


def _inverse_unimodular(U):
    n = len(U)
    ident = [{i: 1} for i in range(n)]
    A = IntegerMatrix.from_dense(U, n)
    cols = []
    for e in ident:
        x = solve_integer(A, e)
        cols.append(x)
    return [[cols[c].get(r, 0) for c in range(n)] for r in range(n)]


# ---------------------------------------------------------------------------
# Chain maps


class ChainMap:
    """Degree-preserving map ``source -> target``; ``matrix[i, j]`` sends source ``j`` to target ``i``."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: IntegerComplex, target: IntegerComplex, matrix: IntegerMatrix, check: bool = True):
        self.source, self.target, self.matrix = source, target, matrix
        if matrix.shape != (len(target), len(source)):
            raise ValidationError(f"chain map matrix has shape {matrix.shape}")
        if check:
            for (i, j), _ in matrix._data.items():
                if target.degrees[i] != source.degrees[j]:
                    raise ValidationError("chain map does not preserve degree")
            if target.differential @ matrix != matrix @ source.differential:
                raise ValidationError("map does not commute with the differentials")

    @classmethod
    def identity(cls, C: IntegerComplex) -> "ChainMap":
        return cls(C, C, IntegerMatrix.identity(len(C)), check=False)


def cone(f: ChainMap) -> IntegerComplex:
    """Mapping cone ``B + A[1]`` with differential ``[[d_B, f], [0, -d_A]]``."""
    A, B = f.source, f.target
    n, m = len(B), len(A)
    d = block_matrix([[B.differential, f.matrix], [None, -A.differential]], [n, m], [n, m])
    labels = [("target", x) for x in B.labels] + [("source", x) for x in A.labels]
    return IntegerComplex(B.degrees + tuple(x - 1 for x in A.degrees), d, labels, check=False)


def is_quasi_iso(f: ChainMap) -> bool:
    return is_acyclic(cone(f))
