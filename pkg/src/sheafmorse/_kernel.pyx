# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integer kernels.

Same contract as ``_kernel_py``.  Smith form runs on int64 with checked
arithmetic and restarts in Python integers on overflow.
"""

from libc.stdlib cimport malloc, free

from . import _kernel_py

BACKEND = "cython"

normalize_diagonal = _kernel_py.normalize_diagonal


cdef extern from *:
    """
    static int sm_mul_overflow(long long a, long long b, long long *r) { return __builtin_mul_overflow(a, b, r); }
    static int sm_sub_overflow(long long a, long long b, long long *r) { return __builtin_sub_overflow(a, b, r); }
    """
    int sm_mul_overflow(long long a, long long b, long long *r) nogil
    int sm_sub_overflow(long long a, long long b, long long *r) nogil


cdef inline long long _abs(long long x) nogil:
    return -x if x < 0 else x


cdef int _axpy(long long *dst, long long q, long long w) nogil:
    # dst -= q * w, reporting overflow
    cdef long long t
    if sm_mul_overflow(q, w, &t):
        return 1
    if sm_sub_overflow(dst[0], t, dst):
        return 1
    return 0


cdef int _snf64(long long *A, int nrows, int ncols, list diag) except -1:
    """Returns 1 on overflow (diag then unusable), 0 otherwise."""
    cdef int top = 0, r, c, pr = 0, pc = 0, br, bc, k
    cdef long long best, v, p, q, w
    cdef bint dirty
    cdef int *live = <int *> malloc(max(ncols, 1) * sizeof(int))
    cdef int nlive = ncols
    if live == NULL:
        raise MemoryError()
    try:
        for c in range(ncols):
            live[c] = c
        while top < nrows and nlive > 0:
            best = 0
            for r in range(top, nrows):
                for k in range(nlive):
                    c = live[k]
                    v = A[r * ncols + c]
                    if v != 0 and (best == 0 or _abs(v) < best):
                        best = _abs(v)
                        pr = r
                        pc = c
                        if best == 1:
                            break
                if best == 1:
                    break
            if best == 0:
                break
            if pr != top:
                for c in range(ncols):
                    v = A[top * ncols + c]
                    A[top * ncols + c] = A[pr * ncols + c]
                    A[pr * ncols + c] = v
            while True:
                p = A[top * ncols + pc]
                dirty = False
                for r in range(top + 1, nrows):
                    v = A[r * ncols + pc]
                    if v != 0:
                        q = _floordiv(v, p)
                        if q != 0:
                            for k in range(nlive):
                                c = live[k]
                                w = A[top * ncols + c]
                                if w != 0:
                                    if _axpy(&A[r * ncols + c], q, w):
                                        return 1
                        if A[r * ncols + pc] != 0:
                            dirty = True
                for k in range(nlive):
                    c = live[k]
                    if c == pc:
                        continue
                    v = A[top * ncols + c]
                    if v != 0:
                        q = _floordiv(v, p)
                        if q != 0:
                            for r in range(top, nrows):
                                w = A[r * ncols + pc]
                                if w != 0:
                                    if _axpy(&A[r * ncols + c], q, w):
                                        return 1
                        if A[top * ncols + c] != 0:
                            dirty = True
                if not dirty:
                    break
                best = _abs(p)
                br = top
                bc = pc
                for r in range(top + 1, nrows):
                    v = A[r * ncols + pc]
                    if v != 0 and _abs(v) < best:
                        best = _abs(v)
                        br = r
                        bc = pc
                for k in range(nlive):
                    c = live[k]
                    v = A[top * ncols + c]
                    if v != 0 and _abs(v) < best:
                        best = _abs(v)
                        br = top
                        bc = c
                if br != top:
                    for c in range(ncols):
                        v = A[top * ncols + c]
                        A[top * ncols + c] = A[br * ncols + c]
                        A[br * ncols + c] = v
                pc = bc
            diag.append(A[top * ncols + pc])
            for k in range(nlive):
                if live[k] == pc:
                    live[k] = live[nlive - 1]
                    break
            nlive -= 1
            # keep the remaining columns in increasing order, matching the Python kernel
            _sort_ints(live, nlive)
            top += 1
        return 0
    finally:
        free(live)


cdef inline long long _floordiv(long long a, long long b) nogil:
    cdef long long q = a // b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef void _sort_ints(int *a, int n) nogil:
    cdef int i, j, x
    for i in range(1, n):
        x = a[i]
        j = i - 1
        while j >= 0 and a[j] > x:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = x


LIMIT = 2 ** 62


def snf_invariants(rows, int nrows, int ncols):
    """Invariant factors of a dense integer matrix (list of row lists)."""
    cdef long long *A
    cdef int r, c
    cdef list diag
    if nrows == 0 or ncols == 0:
        return []
    for row in rows:
        for x in row:
            if x >= LIMIT or x <= -LIMIT:
                return _kernel_py.snf_invariants(rows, nrows, ncols)
    A = <long long *> malloc(nrows * ncols * sizeof(long long))
    if A == NULL:
        raise MemoryError()
    try:
        for r in range(nrows):
            row = rows[r]
            for c in range(ncols):
                A[r * ncols + c] = row[c]
        diag = []
        if _snf64(A, nrows, ncols, diag):
            return _kernel_py.snf_invariants(rows, nrows, ncols)
    finally:
        free(A)
    return normalize_diagonal(diag)


def eliminate_units(Py_ssize_t n, entries, log=None, groups=None):
    """Cancel pairs of generators joined by a differential entry of +-1 (see ``_kernel_py``)."""
    cdef list cols = [dict() for _ in range(n)]
    cdef list rows = [dict() for _ in range(n)]
    cdef Py_ssize_t i, j, k, l, pick
    cdef object v, a, b, u, au, w
    cdef dict colj, rowi, rk, cl
    cdef bytearray alive = bytearray(b"\x01") * n
    cdef bint progress = True
    cdef bint use_groups = groups is not None
    cdef bint keep_log = log is not None
    for key, v in entries.items():
        if v:
            i = key[0]
            j = key[1]
            (<dict> cols[j])[i] = v
            (<dict> rows[i])[j] = v
    while progress:
        progress = False
        order = sorted(range(n), key=lambda x: len(cols[x]))
        for j in order:
            if not alive[j]:
                continue
            colj = <dict> cols[j]
            if not colj:
                continue
            pick = -1
            for i, v in colj.items():
                if (v == 1 or v == -1) and (not use_groups or groups[i] == groups[j]):
                    if pick < 0 or len(<dict> rows[i]) < len(<dict> rows[pick]):
                        pick = i
            if pick < 0:
                continue
            i = pick
            u = colj[i]
            rowi = <dict> rows[i]
            if keep_log:
                log.append((i, j, u, dict(colj), dict(rowi)))
            targets = [(k2, a2) for k2, a2 in colj.items() if k2 != i]
            sources = [(l2, b2) for l2, b2 in rowi.items() if l2 != j]
            for k2, a in targets:
                k = k2
                rk = <dict> rows[k]
                au = a * u
                for l2, b in sources:
                    l = l2
                    cl = <dict> cols[l]
                    w = cl.get(k, 0) - au * b
                    if w:
                        cl[k] = w
                        rk[l] = w
                    else:
                        cl.pop(k, None)
                        rk.pop(l, None)
            for g in (i, j):
                for k2 in (<dict> cols[g]):
                    (<dict> rows[k2]).pop(g, None)
                for l2 in (<dict> rows[g]):
                    (<dict> cols[l2]).pop(g, None)
                cols[g] = {}
                rows[g] = {}
                alive[g] = 0
            progress = True
    survivors = [g for g in range(n) if alive[g]]
    reduced = {}
    for j in survivors:
        for i2, v in (<dict> cols[j]).items():
            reduced[(i2, j)] = v
    return survivors, reduced
