"""Independent reference computations used by the acceptance checks.

Nothing here calls the engine's elimination or Smith form code.
"""

from __future__ import annotations

from typing import Sequence


def dense_cohomology(degrees: Sequence[int], dense: Sequence[Sequence[int]]) -> dict[int, tuple[int, tuple[int, ...]]]:
    """Cohomology of a cochain complex from its dense differential, via sympy's invariant factors."""
    from sympy import Matrix
    from sympy.matrices.normalforms import invariant_factors
    from sympy.polys.domains import ZZ

    by_deg: dict[int, list[int]] = {}
    for i, d in enumerate(degrees):
        by_deg.setdefault(d, []).append(i)
    rank_out: dict[int, int] = {}
    tors_in: dict[int, tuple[int, ...]] = {}
    for n, cols in by_deg.items():
        rows = by_deg.get(n + 1, [])
        if not rows:
            rank_out[n] = 0
            continue
        M = Matrix([[dense[r][c] for c in cols] for r in rows])
        inv = [abs(int(x)) for x in invariant_factors(M, domain=ZZ) if x != 0]
        rank_out[n] = len(inv)
        tors_in[n + 1] = tuple(x for x in inv if x > 1)
    out = {}
    for n, idx in by_deg.items():
        r = len(idx) - rank_out.get(n, 0) - rank_out.get(n - 1, 0)
        t = tors_in.get(n, ())
        if r or t:
            out[n] = (r, t)
    return out


def circle_cochain_cohomology(n: int) -> dict[int, tuple[int, tuple[int, ...]]]:
    """Simplicial cochains of an n-gon: vertices in degree 0, edges in degree 1."""
    degrees = [0] * n + [1] * n
    dense = [[0] * (2 * n) for _ in range(2 * n)]
    for e in range(n):
        a, b = e, (e + 1) % n
        # (delta v)(e) = [v = head] - [v = tail]
        dense[n + e][b] += 1
        dense[n + e][a] -= 1
    return dense_cohomology(degrees, dense)


def random_complex(rng, max_gens: int = 12, coeff: int = 3):
    """A random cochain complex with entries in ``[-coeff, coeff]``.

    Starts from a sum of elementary pieces (``Z`` and ``Z --m--> Z``), then
    applies random same-degree basis changes ``e_i -> e_i + q e_j`` that keep
    every entry in range, then shuffles the generators.
    """
    n = rng.randint(1, max_gens)
    degrees: list[int] = []
    pairs = []
    while len(degrees) < n:
        d = rng.randint(-1, 2)
        if len(degrees) + 2 <= n and rng.random() < 0.6:
            pairs.append((len(degrees), len(degrees) + 1, rng.choice([1, 1, 2, 3, -1, -2])))
            degrees += [d, d + 1]
        else:
            degrees.append(d)
    D = [[0] * n for _ in range(n)]
    for j, i, m in pairs:
        D[i][j] = m
    for _ in range(rng.randint(0, 4 * n)):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j or degrees[i] != degrees[j]:
            continue
        q = rng.choice([-1, 1])
        # new basis e_i' = e_i + q e_j: D' = S D S^-1 with S = I + q E_ji in coordinates
        T = [row[:] for row in D]
        for c in range(n):
            T[j][c] -= q * T[i][c]
        for r in range(n):
            T[r][i] += q * T[r][j]
        if all(abs(x) <= coeff for row in T for x in row):
            D = T
    perm = list(range(n))
    rng.shuffle(perm)
    return [degrees[p] for p in perm], [[D[perm[r]][perm[c]] for c in range(n)] for r in range(n)]
