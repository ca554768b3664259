"""Finite-type commutative differential graded algebras over Q.

A :class:`CDGA` holds per-degree bases, differential matrices and a product
given by structure constants (possibly lazily computed). Basis vectors may
carry a weight, in which case the cdga doubles as a bigraded page with
``r = degree - weight``; all constructions preserve weight homogeneity.

The interval algebra Λ(t,dt) is infinite dimensional; here it appears only
through the bounded model of :class:`PolynomialExtension`, which kills the
monomials t^i (i > N) and t^i dt (i > N-1). The killed span is a monomial
ideal whose projector is a chain map, so the bounded object is an honest
cdga, quasi-isomorphic to the base. The one loss is that products whose
true value overflows the bound are stored truncated; such basis pairs are
flagged inexact and consumers that need exact products check the flag.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import BadBound, InvalidCDGA
from .linalg import Matrix, Q0, Q1, Subspace, complement, image, kernel, quotient, solve

# ---------------------------------------------------------------------------
# graded vector spaces


class GradedVectorSpace:
    """Nonnegatively graded finite-dimensional vector space with labels."""

    def __init__(self, dims, labels=None, weights=None):
        self.dims = {k: n for k, n in dims.items() if n}
        self.labels = {}
        for k, n in self.dims.items():
            if labels and k in labels:
                assert len(labels[k]) == n
                self.labels[k] = list(labels[k])
            else:
                self.labels[k] = [f"e{k}_{i}" for i in range(n)]
        self.weights = None
        if weights is not None:
            self.weights = {k: list(weights[k]) for k in self.dims}
            for k in self.dims:
                assert len(self.weights[k]) == self.dims[k]

    def dim(self, k):
        return self.dims.get(k, 0)

    @property
    def top(self):
        return max(self.dims, default=-1)

    def degrees(self):
        return sorted(self.dims)

    def total_dim(self):
        return sum(self.dims.values())


# ---------------------------------------------------------------------------
# products

INEXACT = "inexact"


class Product:
    """Structure constants, dense table or lazy closure with memo.

    ``mul(i, j, a, b)`` returns ``(sparse, exact)`` where sparse is a list
    of ``(index, coefficient)`` in degree i+j and exact is False when the
    stored value was truncated by an interval bound.
    """

    def __init__(self, fn=None, table=None):
        self._fn = fn
        self._table = table if table is not None else {}
        self._memo = {}

    @staticmethod
    def from_table(table):
        """table: dict[(i, j, a, b)] -> sparse list (always exact)."""
        return Product(table=table)

    def mul(self, i, j, a, b):
        key = (i, j, a, b)
        if key in self._table:
            val = self._table[key]
            if val and val[-1] == INEXACT:
                return list(val[:-1]), False
            return list(val), True
        if self._fn is None:
            return [], True
        if key in self._memo:
            val, exact = self._memo[key]
            return list(val), exact
        val, exact = self._fn(i, j, a, b)
        self._memo[key] = (val, exact)
        return list(val), exact


def _sparse_add(acc, sparse, coeff):
    for idx, c in sparse:
        acc[idx] = acc.get(idx, Q0) + coeff * c


# ---------------------------------------------------------------------------
# the cdga


class CDGA:
    """Commutative differential graded algebra with chosen bases."""

    def __init__(self, space, differentials, product, unit, name="A"):
        self.space = space
        self.d = {}
        for k, m in differentials.items():
            if m is not None and not m.is_zero():
                assert m.ncols == space.dim(k) and m.nrows == space.dim(k + 1)
                self.d[k] = m
        self.product = product
        self.unit = tuple(Fraction(v) for v in unit)
        assert len(self.unit) == space.dim(0)
        self.name = name

    # -- structure access ------------------------------------------------

    def dim(self, k):
        return self.space.dim(k)

    def degrees(self):
        return self.space.degrees()

    @property
    def top(self):
        return self.space.top

    def diff(self, k):
        if k in self.d:
            return self.d[k]
        return Matrix.zero(self.dim(k + 1), self.dim(k))

    def d_apply(self, k, vec):
        return self.diff(k).apply(vec)

    def weight(self, k, idx):
        if self.space.weights is None:
            return None
        return self.space.weights[k][idx]

    def label(self, k, idx):
        return self.space.labels[k][idx]

    def zero_vec(self, k):
        return (Q0,) * self.dim(k)

    # -- products ----------------------------------------------------------

    def mul_basis(self, i, j, a, b):
        return self.product.mul(i, j, a, b)

    def mul_vec(self, i, va, j, vb):
        """Product of two vectors; returns (vector in degree i+j, exact).

        When the algebra carries a vector-level product (bounded interval
        models), it is used instead of bilinear expansion over basis pairs:
        truncation exactness is then decided on actual coefficients, so
        cancelling combinations are not flagged spuriously.
        """
        hook = getattr(self, "vec_mul", None)
        if hook is not None:
            return hook(i, va, j, vb)
        acc = {}
        exact = True
        for a, ca in enumerate(va):
            if not ca:
                continue
            for b, cb in enumerate(vb):
                if not cb:
                    continue
                sparse, ok = self.mul_basis(i, j, a, b)
                exact = exact and ok
                _sparse_add(acc, sparse, ca * cb)
        out = [Q0] * self.dim(i + j)
        for idx, c in acc.items():
            out[idx] = c
        return tuple(out), exact

    # -- validation ---------------------------------------------------------

    def validate(self, check_triples=True):
        """Check all cdga axioms on basis tuples; returns a Report."""
        report = Report(self.name)
        top = self.top
        for k in self.degrees():
            if self.dim(k + 1) and self.dim(k + 2):
                if not (self.diff(k + 1) @ self.diff(k)).is_zero():
                    report.fail("d_squared", f"degree {k}")
        # unit acts as identity
        for k in self.degrees():
            for b in range(self.dim(k)):
                eb = tuple(Q1 if t == b else Q0 for t in range(self.dim(k)))
                val, exact = self.mul_vec(0, self.unit, k, eb)
                if exact and val != eb:
                    report.fail("unit", f"degree {k}, basis {self.label(k, b)}")
        # graded commutativity and Leibniz on basis pairs
        for i in self.degrees():
            for j in self.degrees():
                if i + j > top:
                    continue
                sign = Fraction((-1) ** (i * j))
                for a in range(self.dim(i)):
                    for b in range(self.dim(j)):
                        ab, ex1 = self.mul_basis(i, j, a, b)
                        ba, ex2 = self.mul_basis(j, i, b, a)
                        if ex1 and ex2:
                            lhs = {idx: c for idx, c in ab}
                            rhs = {idx: sign * c for idx, c in ba}
                            if lhs != rhs:
                                report.fail(
                                    "commutativity",
                                    f"({self.label(i,a)})·({self.label(j,b)})",
                                )
                        else:
                            report.skip()
                        if not self._leibniz_ok(i, j, a, b):
                            report.fail(
                                "leibniz",
                                f"({self.label(i,a)})·({self.label(j,b)})",
                            )
        if check_triples:
            self._check_associativity(report)
        return report

    def _basis_vec(self, k, a):
        return tuple(Q1 if t == a else Q0 for t in range(self.dim(k)))

    def _leibniz_ok(self, i, j, a, b):
        if not self.d:
            return True
        ab, ex = self.mul_basis(i, j, a, b)
        if not ex:
            return True  # boundary pair, checked at higher bound by caller
        acc = {}
        dm = self.diff(i + j) if (i + j) in self.d else None
        if dm is not None:
            for idx, c in ab:
                for t, v in dm.sparse_col(idx):
                    acc[t] = acc.get(t, Q0) + c * v
        if i in self.d:
            for t, v in self.d[i].sparse_col(a):
                sp, ex1 = self.mul_basis(i + 1, j, t, b)
                if not ex1:
                    return True
                for idx, c in sp:
                    acc[idx] = acc.get(idx, Q0) - v * c
        if j in self.d:
            sign = Fraction((-1) ** i)
            for t, v in self.d[j].sparse_col(b):
                sp, ex2 = self.mul_basis(i, j + 1, a, t)
                if not ex2:
                    return True
                for idx, c in sp:
                    acc[idx] = acc.get(idx, Q0) - sign * v * c
        return not any(acc.values())

    def _mul_sparse(self, i, j, sparse, b):
        """(Σ sparse)·e_b as (sparse dict, exact)."""
        acc = {}
        exact = True
        for a, ca in sparse:
            sp, ok = self.mul_basis(i, j, a, b)
            exact = exact and ok
            for idx, c in sp:
                acc[idx] = acc.get(idx, Q0) + ca * c
        return acc, exact

    def _check_associativity(self, report):
        top = self.top
        for i in self.degrees():
            for j in self.degrees():
                for k in self.degrees():
                    if i + j + k > top:
                        continue
                    for a in range(self.dim(i)):
                        for b in range(self.dim(j)):
                            ab, ex1 = self.mul_basis(i, j, a, b)
                            for c in range(self.dim(k)):
                                bc, ex2 = self.mul_basis(j, k, b, c)
                                l, ex3 = self._mul_sparse(i + j, k, ab, c)
                                acc = {}
                                exact = True
                                for t, v in bc:
                                    sp, ok = self.mul_basis(i, j + k, a, t)
                                    exact = exact and ok
                                    for idx, cc in sp:
                                        acc[idx] = acc.get(idx, Q0) + v * cc
                                if ex1 and ex2 and ex3 and exact:
                                    diff = {
                                        t: l.get(t, Q0) - acc.get(t, Q0)
                                        for t in set(l) | set(acc)
                                    }
                                    if any(diff.values()):
                                        report.fail(
                                            "associativity",
                                            f"({self.label(i,a)},{self.label(j,b)},{self.label(k,c)})",
                                        )
                                else:
                                    report.skip()


class Report:
    """Validation outcome: pass, or the first violated axioms with locations."""

    def __init__(self, name):
        self.name = name
        self.failures = []
        self.skipped = 0

    def fail(self, axiom, where):
        self.failures.append((axiom, where))

    def skip(self):
        self.skipped += 1

    @property
    def ok(self):
        return not self.failures

    def __str__(self):
        if self.ok:
            extra = f" ({self.skipped} boundary pairs skipped)" if self.skipped else ""
            return f"{self.name}: all cdga axioms hold{extra}"
        head = "; ".join(f"{ax} at {w}" for ax, w in self.failures[:4])
        return f"{self.name}: {len(self.failures)} axiom failures: {head}"


def validate_cdga(a, check_triples=True):
    return a.validate(check_triples=check_triples)


# ---------------------------------------------------------------------------
# morphisms


class CDGAMorphism:
    """Degree-preserving linear map between cdgas, given per degree."""

    def __init__(self, source, target, maps, name="f"):
        self.source = source
        self.target = target
        self.maps = {}
        degs = set(source.degrees()) | set(target.degrees())
        for k in degs:
            m = maps.get(k)
            if m is None:
                m = Matrix.zero(target.dim(k), source.dim(k))
            assert m.ncols == source.dim(k) and m.nrows == target.dim(k)
            self.maps[k] = m
        self.name = name

    def map(self, k):
        return self.maps.get(k, Matrix.zero(self.target.dim(k), self.source.dim(k)))

    def apply(self, k, vec):
        return self.map(k).apply(vec)

    def commutes_with_d(self):
        for k in self.source.degrees():
            lhs = self.map(k + 1) @ self.source.diff(k)
            rhs = self.target.diff(k) @ self.map(k)
            if lhs != rhs:
                return False, k
        return True, None

    def is_multiplicative(self):
        src, tgt = self.source, self.target
        for i in src.degrees():
            for j in src.degrees():
                if i + j > max(src.top, tgt.top):
                    continue
                for a in range(src.dim(i)):
                    fa = self.apply(i, src._basis_vec(i, a))
                    for b in range(src.dim(j)):
                        ab, ex = src.mul_basis(i, j, a, b)
                        if not ex:
                            continue
                        vec = [Q0] * src.dim(i + j)
                        for idx, c in ab:
                            vec[idx] = c
                        f_ab = self.apply(i + j, tuple(vec))
                        fb = self.apply(j, src._basis_vec(j, b))
                        fafb, ex2 = tgt.mul_vec(i, fa, j, fb)
                        if ex2 and f_ab != fafb:
                            return False, (i, j, a, b)
        return True, None

    def preserves_unit(self):
        return self.apply(0, self.source.unit) == self.target.unit

    def validate(self):
        report = Report(self.name)
        ok, k = self.commutes_with_d()
        if not ok:
            report.fail("chain_map", f"degree {k}")
        ok, loc = self.is_multiplicative()
        if not ok:
            report.fail("multiplicative", str(loc))
        if not self.preserves_unit():
            report.fail("unit", "degree 0")
        return report

    def compose(self, other):
        """self ∘ other."""
        assert other.target is self.source
        return CDGAMorphism(
            other.source,
            self.target,
            {k: self.map(k) @ other.map(k) for k in set(self.maps) | set(other.maps)},
            name=f"{self.name}∘{other.name}",
        )


# ---------------------------------------------------------------------------
# cohomology


class Cohomology:
    """Cohomology of a cdga with canonical representatives and products.

    Attributes:
        algebra: the cohomology as a zero-differential CDGA.
        cocycles/boundaries: per-degree subspaces of the underlying cdga.
    """

    def __init__(self, a, check_well_defined=False, name=None):
        self.base = a
        self.cocycles = {}
        self.boundaries = {}
        self.quotients = {}
        dims, labels, weights = {}, {}, {}
        has_w = a.space.weights is not None
        for k in range(0, a.top + 1):
            if not a.dim(k):
                continue
            Z = kernel(a.diff(k))
            B = image(a.diff(k - 1)) if a.dim(k - 1) else Subspace.zero(a.dim(k))
            q = quotient(Z, B)
            self.cocycles[k] = Z
            self.boundaries[k] = B
            self.quotients[k] = q
            if q.dim:
                dims[k] = q.dim
                labels[k] = [f"[{self._rep_label(a, k, rep)}]" for rep in q.reps]
                if has_w:
                    weights[k] = [self._rep_weight(a, k, rep) for rep in q.reps]
        space = GradedVectorSpace(dims, labels, weights if has_w else None)
        self._exactness_ok = True

        def h_mul(i, j, x, y):
            ri = self.quotients[i].reps[x]
            rj = self.quotients[j].reps[y]
            prod, exact = a.mul_vec(i, ri, j, rj)
            if not exact:
                return [], False
            if i + j not in self.quotients or self.quotients[i + j].dim == 0:
                return [], True
            coords = self.project(i + j, prod)
            return [(t, c) for t, c in enumerate(coords) if c], True

        unit = ()
        if space.dim(0):
            unit = self.project(0, a.unit)
        self.algebra = CDGA(
            space,
            {},
            Product(fn=h_mul),
            unit,
            name=name or f"H({a.name})",
        )
        if check_well_defined:
            self.check_well_defined()

    @staticmethod
    def _rep_label(a, k, rep):
        terms = [i for i, c in enumerate(rep) if c]
        if len(terms) == 1 and rep[terms[0]] == 1:
            return a.label(k, terms[0])
        return "+".join(a.label(k, i) for i in terms[:2]) + ("+…" if len(terms) > 2 else "")

    @staticmethod
    def _rep_weight(a, k, rep):
        ws = {a.weight(k, i) for i, c in enumerate(rep) if c}
        assert len(ws) == 1, f"representative not weight homogeneous in degree {k}"
        return ws.pop()

    def project(self, k, vec):
        """Class of a cocycle in the representative basis."""
        if k not in self.quotients:
            return ()
        return self.quotients[k].project(vec)

    def rep(self, k, coords):
        return self.quotients[k].lift(coords)

    def dims(self):
        return {k: self.algebra.dim(k) for k in self.algebra.degrees()}

    def check_well_defined(self):
        """Products descend: μ(B, Z) ⊆ B on all basis pairs."""
        a = self.base
        for i, Bi in self.boundaries.items():
            for j, Zj in self.cocycles.items():
                if i + j not in self.quotients:
                    continue
                Bij = self.boundaries[i + j]
                for vb in Bi.vectors():
                    for vz in Zj.vectors():
                        prod, exact = a.mul_vec(i, vb, j, vz)
                        if exact and any(prod) and not Bij.contains_vector(prod):
                            raise InvalidCDGA(
                                f"product not well defined on cohomology at ({i},{j})"
                            )
        return True


def cohomology(a, check_well_defined=False, name=None):
    return Cohomology(a, check_well_defined=check_well_defined, name=name)


# ---------------------------------------------------------------------------
# bounded interval extension A(t,dt)


class PolynomialExtension(CDGA):
    """A ⊗ Λ(t,dt) truncated at t-degree ≤ N.

    Degree-k basis: x⊗t^i (x in A^k, 0 ≤ i ≤ N) ordered by t-degree then
    base index, followed by y⊗t^i dt (y in A^{k-1}, 0 ≤ i ≤ N-1). The
    differential is d(x t^i) = (dx) t^i + (-1)^{|x|} i x t^{i-1} dt and
    d(y t^i dt) = (dy) t^i dt.
    """

    def __init__(self, base, t_bound):
        if t_bound < 1:
            raise BadBound(f"t_bound must be >= 1, got {t_bound}")
        self.base = base
        self.t_bound = t_bound
        N = t_bound
        dims, labels, weights = {}, {}, {}
        has_w = base.space.weights is not None
        self._index = {}   # (k, base_idx, t_exp, is_dt) -> position in degree k
        self._unindex = {} # (k, pos) -> (base_idx, t_exp, is_dt)
        for k in range(0, base.top + 2):
            entries = []
            for i in range(N + 1):
                for x in range(base.dim(k)):
                    entries.append((x, i, 0))
            for i in range(N):
                for y in range(base.dim(k - 1)):
                    entries.append((y, i, 1))
            if not entries:
                continue
            dims[k] = len(entries)
            labs, ws = [], []
            for pos, (idx, i, is_dt) in enumerate(entries):
                self._index[(k, idx, i, is_dt)] = pos
                self._unindex[(k, pos)] = (idx, i, is_dt)
                bdeg = k - is_dt
                lab = base.label(bdeg, idx)
                tpart = "" if i == 0 and not is_dt else f"·t^{i}" if not is_dt else (
                    f"·t^{i}dt" if i else "·dt"
                )
                labs.append(lab + tpart)
                if has_w:
                    ws.append(base.weight(bdeg, idx))
            labels[k] = labs
            if has_w:
                weights[k] = ws
        space = GradedVectorSpace(dims, labels, weights if has_w else None)

        diffs = {}
        for k in dims:
            if (k + 1) not in dims:
                continue
            cols = []
            for pos in range(dims[k]):
                idx, i, is_dt = self._unindex[(k, pos)]
                col = [Q0] * dims[k + 1]
                bdeg = k - is_dt
                dx = base.diff(bdeg).col(idx) if base.dim(bdeg + 1) else ()
                for tgt, c in enumerate(dx):
                    if c:
                        col[self._index[(k + 1, tgt, i, is_dt)]] += c
                if not is_dt and i >= 1:
                    sign = Fraction((-1) ** bdeg) * i
                    col[self._index[(k + 1, idx, i - 1, 1)]] += sign
                cols.append(col)
            diffs[k] = Matrix.from_columns(cols, dims[k + 1]) if cols else None

        def ext_mul(ki, kj, a, b):
            xi, ti, dti = self._unindex[(ki, a)]
            xj, tj, dtj = self._unindex[(kj, b)]
            if dti and dtj:
                return [], True
            bi, bj = ki - dti, kj - dtj
            sparse, exact = base.mul_basis(bi, bj, xi, xj)
            is_dt = dti or dtj
            texp = ti + tj
            sign = Q1
            if dti:  # moving dt past the second factor
                sign = Fraction((-1) ** bj)
            out = []
            bound_ok = texp <= (N - 1 if is_dt else N)
            for idx, c in sparse:
                if bound_ok:
                    out.append((self._index[(ki + kj, idx, texp, 1 if is_dt else 0)], sign * c))
                else:
                    exact = False
            return out, exact

        unit = [Q0] * dims.get(0, 0)
        if base.dim(0):
            for idx, c in enumerate(base.unit):
                if c:
                    unit[self._index[(0, idx, 0, 0)]] = c
        super().__init__(space, diffs, Product(fn=ext_mul), unit,
                         name=f"{base.name}(t,dt)_{N}")

    def monomial(self, k, base_idx, t_exp, is_dt=False):
        return self._index[(k, base_idx, t_exp, is_dt)]

    def vec_mul(self, i, va, j, vb):
        """Vector-level product: collect base-page vectors per (t-exp, dt)
        and multiply them with the base's vector product."""
        base, N = self.base, self.t_bound

        def collect(k, vec):
            groups = {}
            for pos, c in enumerate(vec):
                if not c:
                    continue
                idx, te, isdt = self._unindex[(k, pos)]
                g = groups.setdefault((te, isdt), [Q0] * base.dim(k - isdt))
                g[idx] = c
            return groups

        ga, gb = collect(i, va), collect(j, vb)
        out = [Q0] * self.dim(i + j)
        exact = True
        for (ta, da), veca in ga.items():
            for (tb, db), vecb in gb.items():
                if da and db:
                    continue
                bi, bj = i - da, j - db
                prod, ok = base.mul_vec(bi, tuple(veca), bj, tuple(vecb))
                exact = exact and ok
                if not any(prod):
                    continue
                isdt = da or db
                sign = Fraction((-1) ** bj) if da else Q1
                te = ta + tb
                if te > (N - 1 if isdt else N):
                    exact = False
                    continue
                for idx, c in enumerate(prod):
                    if c:
                        out[self._index[(i + j, idx, te, 1 if isdt else 0)]] += sign * c
        return tuple(out), exact

    def decompose(self, k, pos):
        return self._unindex[(k, pos)]

    def include_base_vec(self, k, vec):
        """A^k -> (A(t,dt))^k, x -> x⊗t^0."""
        out = [Q0] * self.dim(k)
        for idx, c in enumerate(vec):
            if c:
                out[self.monomial(k, idx, 0)] = c
        return tuple(out)


def extend_with_interval(a, t_bound):
    return PolynomialExtension(a, t_bound)


def evaluate(e, lam):
    """Evaluation δ_λ: A(t,dt) -> A, t ↦ λ, dt ↦ 0, as a CDGAMorphism."""
    lam = Fraction(lam)
    maps = {}
    for k in e.degrees():
        cols = []
        for pos in range(e.dim(k)):
            idx, i, is_dt = e.decompose(k, pos)
            col = [Q0] * e.base.dim(k)
            if not is_dt:
                col[idx] = lam**i
            cols.append(col)
        maps[k] = Matrix.from_columns(cols, e.base.dim(k))
    return CDGAMorphism(e, e.base, maps, name=f"δ_{lam}")


# ---------------------------------------------------------------------------
# small constructors


def point_algebra(label="1"):
    """Q concentrated in degree 0."""
    space = GradedVectorSpace({0: 1}, {0: [label]})
    table = {(0, 0, 0, 0): [(0, Q1)]}
    return CDGA(space, {}, Product.from_table(table), (Q1,), name="Q")


def sub_cdga(a, gens_per_degree, name=None, require_product_closure=True):
    """Sub-cdga spanned by given vectors (checked closed under d and ·).

    gens_per_degree: dict degree -> list of vectors in a's coordinates.
    Returns (sub, inclusion).
    """
    bases = {}
    for k, vecs in gens_per_degree.items():
        sub = Subspace.from_spanning(vecs, a.dim(k))
        if sub.dim:
            bases[k] = sub
    dims = {k: s.dim for k, s in bases.items()}
    labels = {}
    weights = {} if a.space.weights is not None else None
    for k, s in bases.items():
        labels[k] = [f"s{k}_{i}" for i in range(s.dim)]
        if weights is not None:
            weights[k] = [Cohomology._rep_weight(a, k, v) for v in s.vectors()]
    space = GradedVectorSpace(dims, labels, weights)
    diffs = {}
    for k, s in bases.items():
        tgt = bases.get(k + 1)
        if a.dim(k + 1) == 0:
            continue
        cols = []
        for v in s.vectors():
            dv = a.d_apply(k, v)
            if tgt is None:
                if any(dv):
                    raise InvalidCDGA(f"span not closed under d in degree {k}")
                continue
            coords = tgt.coords_of(dv)
            if coords is None:
                raise InvalidCDGA(f"span not closed under d in degree {k}")
            cols.append(list(coords))
        if tgt is not None and cols:
            diffs[k] = Matrix.from_columns(cols, tgt.dim)

    def s_mul(i, j, x, y):
        vi = bases[i].vectors()[x]
        vj = bases[j].vectors()[y]
        prod, exact = a.mul_vec(i, vi, j, vj)
        tgt = bases.get(i + j)
        if tgt is None:
            if any(prod) and exact and require_product_closure:
                raise InvalidCDGA(f"span not closed under product at ({i},{j})")
            return [], exact
        coords = tgt.coords_of(prod)
        if coords is None:
            if require_product_closure and exact:
                raise InvalidCDGA(f"span not closed under product at ({i},{j})")
            return [], False
        return [(t, c) for t, c in enumerate(coords) if c], exact

    unit_coords = bases[0].coords_of(a.unit) if 0 in bases else None
    if unit_coords is None:
        raise InvalidCDGA("sub-cdga does not contain the unit")
    sub = CDGA(space, diffs, Product(fn=s_mul), unit_coords,
               name=name or f"sub({a.name})")
    incl = CDGAMorphism(
        sub, a,
        {k: Matrix.from_columns([list(v) for v in bases[k].vectors()], a.dim(k))
         for k in bases},
        name="incl",
    )
    return sub, incl
