# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled int64 twin of pwss._kernel_py.rref_int.

Raises OverflowError whenever an intermediate value could leave the int64
fast range; the caller then retries with the arbitrary-precision kernel.
"""

from libc.stdlib cimport free, malloc

cdef long long LIMIT = (<long long>1) << 61


cdef long long c_gcd(long long a, long long b) nogil:
    cdef long long t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef void reduce_content(long long* row, Py_ssize_t n) nogil:
    cdef long long g = 0
    cdef Py_ssize_t k
    for k in range(n):
        if row[k]:
            g = c_gcd(g, row[k])
            if g == 1:
                return
    if g > 1:
        for k in range(n):
            row[k] = row[k] / g


cdef long long row_max(long long* row, Py_ssize_t n) nogil:
    cdef long long m = 0, v
    cdef Py_ssize_t k
    for k in range(n):
        v = row[k]
        if v < 0:
            v = -v
        if v > m:
            m = v
    return m


def rref_int(rows, Py_ssize_t ncols):
    """Same contract as pwss._kernel_py.rref_int, int64 fast path only."""
    cdef Py_ssize_t m = len(rows)
    cdef Py_ssize_t i, k, c, r, piv
    cdef long long* work
    cdef long long* prow
    cdef long long* row
    cdef long long pv, f, mr, mp, pvabs, fabs
    cdef object val

    work = <long long*> malloc(m * ncols * sizeof(long long))
    if work == NULL and m * ncols > 0:
        raise MemoryError()
    try:
        for i in range(m):
            src = rows[i]
            for k in range(ncols):
                val = src[k]
                if val > 4611686018427387904 or val < -4611686018427387904:
                    raise OverflowError("input exceeds int64 fast range")
                work[i * ncols + k] = val
            reduce_content(work + i * ncols, ncols)

        pivots = []
        r = 0
        for c in range(ncols):
            piv = -1
            for i in range(r, m):
                if work[i * ncols + c]:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for k in range(ncols):
                    pv = work[r * ncols + k]
                    work[r * ncols + k] = work[piv * ncols + k]
                    work[piv * ncols + k] = pv
            prow = work + r * ncols
            pv = prow[c]
            pvabs = pv if pv > 0 else -pv
            mp = row_max(prow, ncols)
            for i in range(m):
                if i == r:
                    continue
                row = work + i * ncols
                f = row[c]
                if not f:
                    continue
                fabs = f if f > 0 else -f
                mr = row_max(row, ncols)
                if mr > LIMIT / pvabs or mp > LIMIT / fabs:
                    raise OverflowError("intermediate exceeds int64 fast range")
                for k in range(ncols):
                    row[k] = pv * row[k] - f * prow[k]
                reduce_content(row, ncols)
            pivots.append(c)
            r += 1
            if r == m:
                break

        nums = []
        dens = []
        for i in range(r):
            row = work + i * ncols
            pv = row[pivots[i]]
            if pv < 0:
                for k in range(ncols):
                    row[k] = -row[k]
                pv = -pv
            nums.append([row[k] for k in range(ncols)])
            dens.append(pv)
        return pivots, nums, dens
    finally:
        free(work)
