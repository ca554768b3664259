"""Exact rational linear algebra: matrices, subspaces, quotients.

Everything downstream (cohomology, spectral sequence pages, formality
witnesses) reduces to the operations here. All arithmetic is exact over Q
(``fractions.Fraction``); row reduction is delegated to the kernel selected
in :mod:`pwss.kernel`.

Conventions:
    * A ``Matrix`` acts on column vectors: ``m: Q^cols -> Q^rows``.
    * A ``Subspace`` stores its basis in reduced column echelon form with
      pivot rows strictly increasing, so two equal subspaces are equal as
      data structures.
    * ``complement(W, V)`` is deterministic: scan V's canonical basis in
      order and keep each vector that grows the span of W.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .errors import DegeneratePairing, NotContained, QuotientNotContained
from .kernel import rref_int

Q0 = Fraction(0)
Q1 = Fraction(1)


def _fr(v):
    return v if type(v) is Fraction else Fraction(v)


def _as_fraction_rows(rows):
    return tuple(tuple(_fr(v) for v in row) for row in rows)


class Matrix:
    """Dense exact rational matrix."""

    __slots__ = ("rows", "nrows", "ncols", "_scols")

    def __init__(self, rows, ncols=None):
        self.rows = _as_fraction_rows(rows)
        self.nrows = len(self.rows)
        if self.nrows:
            self.ncols = len(self.rows[0])
            if any(len(r) != self.ncols for r in self.rows):
                raise ValueError("ragged rows")
            if ncols is not None and ncols != self.ncols:
                raise ValueError("ncols mismatch")
        else:
            if ncols is None:
                raise ValueError("empty matrix needs explicit ncols")
            self.ncols = ncols

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(nrows, ncols):
        return Matrix([[Q0] * ncols for _ in range(nrows)], ncols)

    @staticmethod
    def identity(n):
        return Matrix([[Q1 if i == j else Q0 for j in range(n)] for i in range(n)], n)

    @staticmethod
    def from_columns(cols, nrows):
        return Matrix([[col[i] for col in cols] for i in range(nrows)], len(cols))

    @staticmethod
    def column(vec):
        return Matrix([[v] for v in vec], 1)

    # -- basic structure ----------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.nrows == other.nrows
            and self.ncols == other.ncols
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.nrows, self.ncols, self.rows))

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols})"

    def is_zero(self):
        return all(not v for row in self.rows for v in row)

    def col(self, j):
        return tuple(row[j] for row in self.rows)

    def sparse_col(self, j):
        """Column j as [(row, value), ...], cached per matrix."""
        try:
            scols = self._scols
        except AttributeError:
            scols = self._scols = {}
        if j not in scols:
            scols[j] = [(i, row[j]) for i, row in enumerate(self.rows) if row[j]]
        return scols[j]

    def columns(self):
        return [self.col(j) for j in range(self.ncols)]

    def transpose(self):
        return Matrix(
            [[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
            self.nrows,
        )

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        assert self.nrows == other.nrows and self.ncols == other.ncols
        return Matrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ],
            self.ncols,
        )

    def __sub__(self, other):
        assert self.nrows == other.nrows and self.ncols == other.ncols
        return Matrix(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ],
            self.ncols,
        )

    def __neg__(self):
        return Matrix([[-v for v in row] for row in self.rows], self.ncols)

    def scale(self, c):
        c = Fraction(c)
        return Matrix([[c * v for v in row] for row in self.rows], self.ncols)

    def __matmul__(self, other):
        return self.compose(other)

    def compose(self, other):
        """self @ other, sparse-aware (skips zero entries of other)."""
        assert self.ncols == other.nrows, (self.ncols, other.nrows)
        out = [[Q0] * other.ncols for _ in range(self.nrows)]
        for k, row in enumerate(other.rows):
            colk = [self.rows[i][k] for i in range(self.nrows)]
            if not any(colk):
                continue
            for j, v in enumerate(row):
                if v:
                    for i in range(self.nrows):
                        a = colk[i]
                        if a:
                            out[i][j] += a * v
        return Matrix(out, other.ncols)

    def apply(self, vec):
        """Matrix times column vector (tuple of Fractions)."""
        assert len(vec) == self.ncols
        out = [Q0] * self.nrows
        for j, v in enumerate(vec):
            if v:
                for i in range(self.nrows):
                    a = self.rows[i][j]
                    if a:
                        out[i] += a * v
        return tuple(out)

    # -- reduction ------------------------------------------------------

    def _int_rows(self):
        out = []
        for row in self.rows:
            den = lcm(*(v.denominator for v in row)) if row else 1
            out.append([int(v * den) for v in row])
        return out

    def rref(self):
        """Reduced row echelon form.

        Returns:
            (rref_matrix, pivots, rank); the RREF has the same shape,
            zero rows trailing.
        """
        pivots, nums, dens = rref_int(self._int_rows(), self.ncols)
        rows = [
            [Fraction(v, d) for v in num] for num, d in zip(nums, dens)
        ]
        rank = len(pivots)
        rows += [[Q0] * self.ncols for _ in range(self.nrows - rank)]
        return Matrix(rows, self.ncols), tuple(pivots), rank

    def rank(self):
        pivots, _, _ = rref_int(self._int_rows(), self.ncols)
        return len(pivots)


def rref(m):
    """Module-level convenience: rref(m) -> (Matrix, pivots, rank)."""
    return m.rref()


class Subspace:
    """A subspace of Q^ambient in canonical (reduced column echelon) form."""

    __slots__ = ("ambient_dim", "basis", "pivots")

    def __init__(self, ambient_dim, basis, pivots):
        self.ambient_dim = ambient_dim
        self.basis = basis  # Matrix ambient_dim x dim, canonical
        self.pivots = pivots  # pivot row of each basis column, increasing

    @staticmethod
    def from_spanning(vectors, ambient_dim):
        """Canonicalize a spanning set (vectors = iterable of tuples)."""
        vecs = [tuple(Fraction(v) for v in vec) for vec in vectors]
        gen = Matrix(vecs, ambient_dim) if vecs else Matrix([], ambient_dim)
        red, pivots, rank = gen.rref()
        cols = [red.rows[i] for i in range(rank)]
        return Subspace(ambient_dim, Matrix.from_columns(cols, ambient_dim), pivots)

    @staticmethod
    def zero(ambient_dim):
        return Subspace(ambient_dim, Matrix([], ambient_dim).transpose(), ())

    @staticmethod
    def full(ambient_dim):
        return Subspace(
            ambient_dim, Matrix.identity(ambient_dim), tuple(range(ambient_dim))
        )

    @property
    def dim(self):
        return self.basis.ncols

    def vectors(self):
        return self.basis.columns()

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        return f"Subspace(dim {self.dim} of Q^{self.ambient_dim})"

    def coords_of(self, vec):
        """Coordinates of vec in this basis, or None if not contained."""
        return solve(self.basis, tuple(vec))

    def contains_vector(self, vec):
        return self.coords_of(vec) is not None

    def contains(self, other):
        """other ⊆ self, by a single rank computation."""
        assert self.ambient_dim == other.ambient_dim
        if other.dim == 0:
            return True
        if self.dim == 0:
            return False
        return hstack(self.basis, other.basis).rank() == self.dim

    def add(self, other):
        assert self.ambient_dim == other.ambient_dim
        return Subspace.from_spanning(
            list(self.vectors()) + list(other.vectors()), self.ambient_dim
        )

    def intersect(self, other):
        """Intersection via the kernel of [B1 | -B2]."""
        assert self.ambient_dim == other.ambient_dim
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim)
        stacked = hstack(self.basis, -other.basis)
        ker = kernel(stacked)
        vecs = []
        for v in ker.vectors():
            vecs.append(self.basis.apply(v[: self.dim]))
        return Subspace.from_spanning(vecs, self.ambient_dim)


def hstack(a, b):
    assert a.nrows == b.nrows
    return Matrix(
        [ra + rb for ra, rb in zip(a.rows, b.rows)], a.ncols + b.ncols
    )


def vstack(a, b):
    assert a.ncols == b.ncols
    return Matrix(list(a.rows) + list(b.rows), a.ncols)


def kernel(m):
    """Null space of m as a canonical Subspace of Q^cols."""
    red, pivots, rank = m.rref()
    free = [j for j in range(m.ncols) if j not in set(pivots)]
    vecs = []
    for j in free:
        v = [Q0] * m.ncols
        v[j] = Q1
        for i, p in enumerate(pivots):
            v[p] = -red.rows[i][j]
        vecs.append(tuple(v))
    return Subspace.from_spanning(vecs, m.ncols)


def image(m):
    """Column space of m as a canonical Subspace of Q^rows."""
    return Subspace.from_spanning(m.columns(), m.nrows)


def solve(a, b):
    """One exact solution x of a·x = b, or None if inconsistent."""
    aug = hstack(a, Matrix.column(b))
    red, pivots, rank = aug.rref()
    if pivots and pivots[-1] == a.ncols:
        return None
    x = [Q0] * a.ncols
    for i, p in enumerate(pivots):
        x[p] = red.rows[i][a.ncols]
    return tuple(x)


def solve_matrix(a, b):
    """Exact X with a·X = b (column-wise solve), or None."""
    aug = hstack(a, b)
    red, pivots, rank = aug.rref()
    if any(p >= a.ncols for p in pivots):
        return None
    out = [[Q0] * b.ncols for _ in range(a.ncols)]
    for i, p in enumerate(pivots):
        for j in range(b.ncols):
            out[p][j] = red.rows[i][a.ncols + j]
    return Matrix(out, b.ncols) if out else Matrix([], b.ncols)


class Quotient:
    """V/W with canonical representatives and an exact projection.

    Attributes:
        reps: list of ambient vectors representing a basis of V/W.
        dim: dimension of the quotient.

    The projection precomputes a left inverse of [W-basis | reps] from one
    row reduction, so each project() is a matrix-vector product plus a
    membership check.
    """

    def __init__(self, V, W):
        self.V = V
        self.W = W
        try:
            comp = complement(W, V)
        except NotContained as exc:
            raise QuotientNotContained(str(exc)) from exc
        self.reps = list(comp.vectors())
        self.dim = comp.dim
        n = V.ambient_dim
        r = W.dim + comp.dim
        if r and n:
            m = hstack(W.basis, comp.basis)
            aug = hstack(m, Matrix.identity(n))
            red, pivots, rank = aug.rref()
            assert rank == n and all(p < r for p in pivots[:r])
            self._left = Matrix([row[r:] for row in red.rows[:r]], n)
            self._check = Matrix([row[r:] for row in red.rows[r:n]], n)
        else:
            self._left = None
            self._check = None

    def project(self, vec, check=True):
        """Coordinates of [vec] in the representative basis (vec must be in V)."""
        vec = tuple(vec)
        if self._left is None:
            if check and any(vec):
                raise QuotientNotContained("vector outside V")
            return ()
        if check and self._check.nrows and any(self._check.apply(vec)):
            raise QuotientNotContained("vector outside V")
        x = self._left.apply(vec)
        return tuple(x[self.W.dim :])

    def lift(self, coords):
        assert len(coords) == self.dim, "coordinate length mismatch"
        out = [Q0] * self.V.ambient_dim
        for c, rep in zip(coords, self.reps):
            if c:
                for i, v in enumerate(rep):
                    out[i] += c * v
        return tuple(out)


def quotient(V, W):
    """Quotient V/W (W must be contained in V)."""
    return Quotient(V, W)


def cokernel_basis(m):
    """Coker(m) = Q^rows / Im(m) with representatives."""
    return Quotient(Subspace.full(m.nrows), image(m))


def complement(W, V):
    """Deterministic complement C with V = W ⊕ C.

    Scans V's canonical basis in order, keeping vectors independent of the
    running span; the same inputs always give the same C. Implemented as
    one row reduction: the pivot columns of [W-basis | V-basis] beyond the
    W block are exactly the greedily chosen vectors.
    """
    if W.dim == 0:
        return V
    both = hstack(W.basis, V.basis)
    red, pivots, rank = both.rref()
    if rank != V.dim:
        raise NotContained(f"W (dim {W.dim}) not inside V (dim {V.dim})")
    chosen = [V.basis.col(p - W.dim) for p in pivots if p >= W.dim]
    return Subspace.from_spanning(chosen, V.ambient_dim)


def dual_map(m):
    """Transpose, the dual of m under standard bases."""
    return m.transpose()


def check_nondegenerate(pairing):
    if pairing.nrows != pairing.ncols:
        raise DegeneratePairing("pairing not square")
    if pairing.rank() != pairing.nrows:
        raise DegeneratePairing("pairing singular")


def annihilator(W, pairing):
    """{x : <x, w> = 0 for all w in W} for pairing <x,y> = x^T P y."""
    check_nondegenerate(pairing)
    if W.dim == 0:
        return Subspace.full(pairing.nrows)
    constraints = (pairing @ W.basis).transpose()
    return kernel(constraints)


def dualize_subspace(W, pairing):
    """Realize W^∨ inside the ambient space via a nondegenerate pairing.

    Returns the deterministic complement of the annihilator of W; it pairs
    perfectly with W, so its dimension equals dim W.
    """
    ann = annihilator(W, pairing)
    return complement(ann, Subspace.full(pairing.nrows))


def pairing_adjoint(m, pairing_src, pairing_tgt):
    """Adjoint g of m with <m(a), x>_tgt = <a, g(x)>_src.

    pairing_src lives on the domain of m, pairing_tgt on its codomain;
    both must be nondegenerate.
    """
    check_nondegenerate(pairing_src)
    check_nondegenerate(pairing_tgt)
    # g = P_src^{-1} m^T P_tgt
    rhs = m.transpose() @ pairing_tgt
    g = solve_matrix(pairing_src, rhs)
    if g is None:  # unreachable: pairing nondegenerate
        raise DegeneratePairing("adjoint solve failed")
    return g


def signature(sym):
    """Signature (n_plus, n_minus) of an exact symmetric matrix.

    Symmetric congruence diagonalization over Q; zero diagonal blocks are
    handled with the standard u+v / u-v substitution.
    """
    n = sym.nrows
    a = [list(row) for row in sym.rows]
    plus = minus = 0
    idx = list(range(n))
    used = [False] * n
    for _ in range(n):
        # pick a nonzero diagonal entry among unused indices
        p = next((i for i in idx if not used[i] and a[i][i]), None)
        if p is None:
            pair = None
            for i in idx:
                if used[i]:
                    continue
                for j in idx:
                    if not used[j] and j != i and a[i][j]:
                        pair = (i, j)
                        break
                if pair:
                    break
            if pair is None:
                break  # remaining block is zero
            i, j = pair
            # replace e_i by e_i + e_j: diagonal becomes 2 a_ij != 0
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            p = i
        d = a[p][p]
        if d > 0:
            plus += 1
        else:
            minus += 1
        used[p] = True
        for i in range(n):
            if i == p or used[i]:
                continue
            f = a[i][p] / d
            if f:
                for k in range(n):
                    a[i][k] -= f * a[p][k]
                for k in range(n):
                    a[k][i] -= f * a[k][p]
    return plus, minus
