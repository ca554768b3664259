"""Pure-Python exact row reduction kernel.

Reference implementation of the contract in :mod:`pwss.kernel`. The compiled
twin in ``pwss._speedups`` runs the same algorithm on C int64 with an
overflow bailout; both produce bit-identical output because every
intermediate row rescaling cancels in the final pivot division.

The algorithm is integer Gauss-Jordan: rows are kept integral, each
elimination step replaces row_i by (pivot*row_i - coeff*row_pivot) and then
divides the row by its content (gcd). Input rows must already be integral;
callers clear denominators per row, which changes neither row space nor
null space.
"""

from math import gcd


def rref_int(rows, ncols):
    """Reduced row echelon form of an integer matrix.

    Args:
        rows: list of equal-length lists of Python ints.
        ncols: number of columns (also required for the 0-row case).

    Returns:
        ``(pivots, nums, dens)``: row ``i`` of the RREF is
        ``nums[i] / dens[i]`` with leading column ``pivots[i]``; only the
        ``rank`` nonzero rows are returned, ``dens[i] > 0``.
    """
    work = [list(r) for r in rows]
    m = len(work)
    for row in work:
        _reduce_content(row)
    pivots = []
    r = 0
    for c in range(ncols):
        piv = -1
        for i in range(r, m):
            if work[i][c]:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            work[r], work[piv] = work[piv], work[r]
        prow = work[r]
        pv = prow[c]
        for i in range(m):
            if i == r:
                continue
            row = work[i]
            f = row[c]
            if not f:
                continue
            for k in range(ncols):
                row[k] = pv * row[k] - f * prow[k]
            _reduce_content(row)
        pivots.append(c)
        r += 1
        if r == m:
            break
    nums = []
    dens = []
    for i in range(r):
        row = work[i]
        d = row[pivots[i]]
        if d < 0:
            row = [-v for v in row]
            d = -d
        nums.append(row)
        dens.append(d)
    return pivots, nums, dens


def _reduce_content(row):
    g = 0
    for v in row:
        if v:
            g = gcd(g, v)
            if g == 1:
                return
    if g > 1:
        for k, v in enumerate(row):
            row[k] = v // g
