"""Brute-force bar enumeration with dense matrices and modular ranks.

Objects enter only as raw data (carrier vertex sets, degrees, dense
differential); hom spaces, compositions and word differentials are rebuilt
here from scratch with numpy.
"""

from __future__ import annotations

import itertools

import numpy as np

PRIMES = (2_147_483_629, 2_147_483_587)


class DenseObject:
    def __init__(self, carriers, degrees, D):
        self.carriers = [frozenset(c) for c in carriers]
        self.degrees = list(degrees)
        self.D = np.array(D, dtype=np.int64).reshape(len(degrees), len(degrees))


def from_twisted(a) -> DenseObject:
    P = a.poset
    return DenseObject([P.strata[s] for s in a.strata], a.degrees, a.differential.to_dense())


class DenseHom:
    """Matrix units E[j, i] (source i to target j) allowed when carrier_j is a face of carrier_i."""

    def __init__(self, A: DenseObject, B: DenseObject):
        self.A, self.B = A, B
        self.units = [(j, i) for i in range(len(A.degrees)) for j in range(len(B.degrees))
                      if B.carriers[j] <= A.carriers[i]]
        self.pos = {u: k for k, u in enumerate(self.units)}
        self.deg = [B.degrees[j] - A.degrees[i] for j, i in self.units]

    def matrix(self, k):
        j, i = self.units[k]
        M = np.zeros((len(self.B.degrees), len(self.A.degrees)), dtype=np.int64)
        M[j, i] = 1
        return M

    def expand(self, M) -> dict[int, int]:
        out = {}
        for (j, i) in zip(*np.nonzero(M)):
            k = self.pos.get((int(j), int(i)))
            if k is None:
                raise AssertionError("matrix leaves the hom space")
            out[k] = int(M[j, i])
        return out

    def d(self, k) -> dict[int, int]:
        M = self.matrix(k)
        sign = -1 if self.deg[k] % 2 else 1
        return self.expand(self.B.D @ M - sign * (M @ self.A.D))


def bar_ranks(chars, a, b, level):
    """Free ranks of the cohomology of the level-truncated bar complex, per degree."""
    objs = {"a": a, "b": b}
    objs.update({k: X for k, X in enumerate(chars)})
    homs = {}

    def hom(x, y):
        if (x, y) not in homs:
            homs[(x, y)] = DenseHom(objs[x], objs[y])
        return homs[(x, y)]

    m = len(chars)
    words = []
    for k in range(level + 1):
        for seq in itertools.product(range(m), repeat=k):
            nodes = ("a",) + seq + ("b",)
            hs = [hom(nodes[t], nodes[t + 1]) for t in range(k + 1)]
            if any(not h.units for h in hs):
                continue
            for basis in itertools.product(*[range(len(h.units)) for h in hs]):
                words.append((seq, basis))
    index = {w: n for n, w in enumerate(words)}

    def symbols(seq, basis):
        # left to right: f_k, e, f_{k-1}, ..., e, f_0 as (kind, position)
        k = len(seq)
        out = []
        for t in range(k, -1, -1):
            out.append(("f", t))
            if t > 0:
                out.append(("e", t - 1))
        return out

    entries = {}
    degrees = []
    for col, (seq, basis) in enumerate(words):
        nodes = ("a",) + seq + ("b",)
        hs = [hom(nodes[t], nodes[t + 1]) for t in range(len(seq) + 1)]
        sym = symbols(seq, basis)
        deg_of = {("f", t): hs[t].deg[basis[t]] for t in range(len(seq) + 1)}
        left = 0
        for s in sym:
            sign = -1 if left % 2 else 1
            if s[0] == "f":
                t = s[1]
                for x, v in hs[t].d(basis[t]).items():
                    w = (seq, basis[:t] + (x,) + basis[t + 1:])
                    entries[(index[w], col)] = entries.get((index[w], col), 0) + sign * v
                left += deg_of[s]
            else:
                t = s[1]  # e between f_{t+1} and f_t
                M = hs[t + 1].matrix(basis[t + 1]) @ hs[t].matrix(basis[t])
                if M.any():
                    H = hom(nodes[t], nodes[t + 2])
                    for x, v in H.expand(M).items():
                        w = (seq[:t] + seq[t + 1:], basis[:t] + (x,) + basis[t + 2:])
                        entries[(index[w], col)] = entries.get((index[w], col), 0) + sign * v
                left -= 1
        degrees.append(sum(deg_of.values()) - len(seq))
    return _ranks(degrees, entries), len(words)


def _rank_mod(M, p):
    A = M.copy() % p
    r = 0
    rows, cols = A.shape
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if A[i, c]:
                piv = i
                break
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        inv = pow(int(A[r, c]), p - 2, p)
        A[r] = (A[r] * inv) % p
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        r += 1
        if r == rows:
            break
    return r


def _ranks(degrees, entries):
    by = {}
    for i, d in enumerate(degrees):
        by.setdefault(d, []).append(i)
    n = len(degrees)
    full = np.zeros((n, n), dtype=np.int64)
    for (i, j), v in entries.items():
        full[i, j] = v
    for p in PRIMES:
        if ((full @ full) % p).any():
            raise AssertionError("bar differential does not square to zero")
    drank = {}
    for d, cols in by.items():
        rows = by.get(d + 1, [])
        if not rows:
            drank[d] = 0
            continue
        block = full[np.ix_(rows, cols)]
        drank[d] = max(_rank_mod(block, p) for p in PRIMES)
    out = {}
    for d, idx in by.items():
        r = len(idx) - drank[d] - drank.get(d - 1, 0)
        if r:
            out[d] = r
    return out
