"""Pure-Python integer kernels.

These are the reference implementations; ``sheafmorse._kernel`` (Cython)
provides the same functions with a fixed-width fast path.  Both operate on
plain Python containers so callers never see which backend ran.
"""

from math import gcd

BACKEND = "python"


def normalize_diagonal(diag):
    """Turn a list of nonzero diagonal entries into invariant factors d1 | d2 | ..."""
    d = [abs(x) for x in diag if x]
    r = len(d)
    for i in range(r):
        for j in range(i + 1, r):
            a, b = d[i], d[j]
            if b % a == 0:
                continue
            g = gcd(a, b)
            d[i], d[j] = g, a // g * b
    return d


def snf_invariants(rows, nrows, ncols):
    """Invariant factors of a dense integer matrix given as a list of row lists.

    The input is consumed (modified in place).
    """
    A = rows
    diag = []
    top = 0
    live_cols = list(range(ncols))
    while top < nrows and live_cols:
        # pivot: smallest nonzero absolute value in the remaining block
        best = None
        for r in range(top, nrows):
            row = A[r]
            for c in live_cols:
                v = row[c]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), r, c)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pr, pc = best
        A[top], A[pr] = A[pr], A[top]
        while True:
            prow = A[top]
            p = prow[pc]
            dirty = False
            # clear the pivot column below
            for r in range(top + 1, nrows):
                row = A[r]
                v = row[pc]
                if v:
                    q = v // p
                    if q:
                        for c in live_cols:
                            w = prow[c]
                            if w:
                                row[c] -= q * w
                    if row[pc]:
                        dirty = True
            # clear the pivot row to the right
            for c in live_cols:
                if c == pc:
                    continue
                v = prow[c]
                if v:
                    q = v // p
                    if q:
                        for r in range(top, nrows):
                            w = A[r][pc]
                            if w:
                                A[r][c] -= q * w
                    if prow[c]:
                        dirty = True
            if not dirty:
                break
            # a remainder survived: move the new smallest entry of the pivot
            # cross into pivot position and repeat
            best = (abs(p), top, pc)
            for r in range(top + 1, nrows):
                v = A[r][pc]
                if v and abs(v) < best[0]:
                    best = (abs(v), r, pc)
            for c in live_cols:
                v = prow[c]
                if v and abs(v) < best[0]:
                    best = (abs(v), top, c)
            _, br, bc = best
            A[top], A[br] = A[br], A[top]
            pc = bc
        diag.append(A[top][pc])
        live_cols.remove(pc)
        top += 1
    return normalize_diagonal(diag)


def eliminate_units(n, entries, log=None, groups=None):
    """Cancel pairs of generators joined by a differential entry of +-1.

    ``entries`` maps ``(i, j)`` to the coefficient of generator ``i`` in
    ``d(e_j)``.  Each cancellation is a chain homotopy equivalence over Z, so
    the surviving complex has the same cohomology (torsion included).

    Returns ``(alive, reduced)`` where ``alive`` lists the surviving original
    indices in increasing order and ``reduced`` is the new entry dictionary
    (still in original indices).  When ``log`` is a list, one record
    ``(i, j, u, column_j, row_i)`` is appended per cancellation.  When
    ``groups`` is given, only entries with ``groups[i] == groups[j]`` are
    used as pivots.
    """
    cols = [dict() for _ in range(n)]
    rows = [dict() for _ in range(n)]
    for (i, j), v in entries.items():
        if v:
            cols[j][i] = v
            rows[i][j] = v
    alive = [True] * n
    progress = True
    while progress:
        progress = False
        order = sorted(range(n), key=lambda j: len(cols[j]))
        for j in order:
            if not alive[j]:
                continue
            colj = cols[j]
            if not colj:
                continue
            pick = None
            for i, v in colj.items():
                if (v == 1 or v == -1) and (groups is None or groups[i] == groups[j]):
                    if pick is None or len(rows[i]) < len(rows[pick]):
                        pick = i
            if pick is None:
                continue
            i = pick
            u = colj[i]
            rowi = rows[i]
            if log is not None:
                log.append((i, j, u, dict(colj), dict(rowi)))
            targets = [(k, a) for k, a in colj.items() if k != i]
            sources = [(l, b) for l, b in rowi.items() if l != j]
            for k, a in targets:
                rk = rows[k]
                au = a * u
                for l, b in sources:
                    cl = cols[l]
                    w = cl.get(k, 0) - au * b
                    if w:
                        cl[k] = w
                        rk[l] = w
                    else:
                        cl.pop(k, None)
                        rk.pop(l, None)
            for g in (i, j):
                for k in cols[g]:
                    rows[k].pop(g, None)
                for l in rows[g]:
                    cols[l].pop(g, None)
                cols[g] = {}
                rows[g] = {}
                alive[g] = False
            progress = True
    survivors = [g for g in range(n) if alive[g]]
    reduced = {}
    for j in survivors:
        for i, v in cols[j].items():
            reduced[(i, j)] = v
    return survivors, reduced
