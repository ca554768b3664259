"""Triple Massey products in perverse cdgas, with exact indeterminacy.

For classes x, y, z with xy = 0 and yz = 0 (in cohomology, perversities
adding within the poset), the triple product is the coset

    <x,y,z> = [x·ζ + (-1)^{|x|+1} ξ·z] + ([x]·H + H·[z])

for any defining system dξ = xy, dζ = yz. The coset is computed exactly:
representative class plus the indeterminacy subspace; membership of zero
is an exact linear solve. A second defining system is tried whenever a
cocycle of the right degree exists, and the two cosets must agree.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import NotDefined, StabilizationFailure
from .linalg import Matrix, Q0, Q1, Subspace, hstack
from .perverse import PerverseCDGA, Perversity, cached_cohomology

_aff_cache = {}


def _affine_solver(m):
    """General solver x -> m·x = b (particular solution or None), cached."""
    key = id(m)
    hit = _aff_cache.get(key)
    if hit is not None and hit[0] is m:
        return hit[1]
    n, cols = m.nrows, m.ncols
    if n == 0:
        def zero_rows(b):
            return (Q0,) * cols
        _aff_cache[key] = (m, zero_rows)
        return zero_rows
    aug = hstack(m, Matrix.identity(n))
    red, pivots, rank = aug.rref()
    main = [(i, p) for i, p in enumerate(pivots) if p < cols]
    r = len(main)
    top = Matrix([row[cols:] for row in red.rows[:r]], n) if r else None
    low = Matrix([row[cols:] for row in red.rows[r:rank]], n) if rank > r else None

    def solver(b):
        b = tuple(b)
        if low is not None and any(low.apply(b)):
            return None
        x = [Q0] * cols
        if top is not None:
            tb = top.apply(b)
            for (i, p) in main:
                x[p] = tb[i]
        return tuple(x)

    _aff_cache[key] = (m, solver)
    return solver


class MasseyClass:
    """A cohomology class handle: perversity, degree, H-coordinates."""

    def __init__(self, perversity, degree, coords):
        self.p = perversity
        self.k = degree
        self.coords = tuple(coords)

    def __repr__(self):
        return f"<class p={self.p}, deg {self.k}>"


class MasseySystem:
    """Result of a triple Massey product computation."""

    def __init__(self, x, y, z, target_p, degree, rep, indeterminacy, contains_zero):
        self.x, self.y, self.z = x, y, z
        self.target_perversity = target_p
        self.degree = degree
        self.rep = tuple(rep)            # H-coordinates of one representative
        self.indeterminacy = indeterminacy  # Subspace in H-coordinates
        self.contains_zero = contains_zero
        self.defined = True

    def __repr__(self):
        status = "contains 0" if self.contains_zero else "excludes 0"
        return (
            f"<x,y,z> in H^{self.degree}_({self.target_perversity}): "
            f"coset of dim-{self.indeterminacy.dim} indeterminacy, {status}"
        )


def _h(P, cut):
    return cached_cohomology(P.component(cut))


def _mul_and_project(P, cp, cq, i, va, j, vb):
    prod, exact = P.mul_vec(cp, cq, i, va, j, vb)
    if not exact:
        raise StabilizationFailure(
            "product truncated at the interval bound; raise t_bound"
        )
    return prod


def massey_triple(P, x, y, z, second_system=True):
    """<x, y, z> for MasseyClass handles on a PerverseCDGA."""
    cx, cy, cz = P.cut_for(x.p), P.cut_for(y.p), P.cut_for(z.p)
    hx, hy, hz = _h(P, cx), _h(P, cy), _h(P, cz)
    ax = hx.rep(x.k, x.coords)
    ay = hy.rep(y.k, y.coords)
    az = hz.rep(z.k, z.coords)
    i, j, k = x.k, y.k, z.k

    pq = P.cut_for(cx + cy)
    qr = P.cut_for(cy + cz)
    pqr = P.cut_for(cx + cy + cz)
    h_pq, h_qr, h_pqr = _h(P, pq), _h(P, qr), _h(P, pqr)

    xy = _mul_and_project(P, cx, cy, i, ax, j, ay)
    if any(h_pq.project(i + j, xy)):
        raise NotDefined("x·y is nonzero in cohomology")
    yz = _mul_and_project(P, cy, cz, j, ay, k, az)
    if any(h_qr.project(j + k, yz)):
        raise NotDefined("y·z is nonzero in cohomology")

    comp_pq = P.component(pq)
    comp_qr = P.component(qr)
    xi = _affine_solver(comp_pq.diff(i + j - 1))(xy)
    zeta = _affine_solver(comp_qr.diff(j + k - 1))(yz)
    assert xi is not None and zeta is not None

    deg = i + j + k - 1
    sign = Fraction((-1) ** (i + 1))

    def bracket(xi_c, zeta_c):
        t1 = _mul_and_project(P, cx, qr, i, ax, j + k - 1, zeta_c)
        t2 = _mul_and_project(P, pq, cz, i + j - 1, xi_c, k, az)
        w = tuple(a + sign * b for a, b in zip(t1, t2))
        dv = P.component(pqr).d_apply(deg, w)
        assert not any(dv), "Massey representative is not a cocycle"
        return h_pqr.project(deg, w)

    rep = bracket(xi, zeta)

    # indeterminacy [x]·H^{j+k-1} + H^{i+j-1}·[z]
    hdim = h_pqr.algebra.dim(deg)
    vecs = []
    alg_qr = h_qr.algebra
    for t in range(alg_qr.dim(j + k - 1)):
        hrep = h_qr.rep(j + k - 1, tuple(Q1 if s == t else Q0
                                         for s in range(alg_qr.dim(j + k - 1))))
        vecs.append(h_pqr.project(deg, _mul_and_project(
            P, cx, qr, i, ax, j + k - 1, hrep)))
    alg_pq = h_pq.algebra
    for t in range(alg_pq.dim(i + j - 1)):
        hrep = h_pq.rep(i + j - 1, tuple(Q1 if s == t else Q0
                                         for s in range(alg_pq.dim(i + j - 1))))
        vecs.append(h_pqr.project(deg, _mul_and_project(
            P, pq, cz, i + j - 1, hrep, k, az)))
    indet = Subspace.from_spanning([v for v in vecs if any(v)], hdim)
    contains_zero = indet.contains_vector(rep)

    if second_system:
        zdim = comp_pq.dim(i + j - 1)
        coc = None
        from .linalg import kernel

        ker = kernel(comp_pq.diff(i + j - 1)) if zdim else None
        if ker is not None and ker.dim:
            coc = ker.vectors()[0]
        if coc is not None:
            xi2 = tuple(a + c for a, c in zip(xi, coc))
            rep2 = bracket(xi2, zeta)
            diff = tuple(a - b for a, b in zip(rep2, rep))
            if any(diff) and not indet.contains_vector(diff):
                raise AssertionError(
                    "Massey coset depends on the defining system"
                )

    return MasseySystem(x, y, z, pqr, deg, rep,
                        indet, contains_zero)


def h_basis_classes(P, cut, min_degree=1, max_degree=None):
    """All cohomology basis classes of a component in a degree window."""
    h = _h(P, cut)
    out = []
    for k in h.algebra.degrees():
        if k < min_degree or (max_degree is not None and k > max_degree):
            continue
        for t in range(h.algebra.dim(k)):
            out.append(MasseyClass(cut, k, tuple(
                Q1 if s == t else Q0 for s in range(h.algebra.dim(k)))))
    return out


def exhaustive_massey(P, max_degree=None, include_infinite=False):
    """Search all basis-class triples with defined Massey products.

    Returns (defined_count, offenders) where offenders lists the systems
    whose coset misses zero. Degrees are limited by |x|+|y|+|z|-1 <= the
    top degree of the family (or max_degree).
    """
    limit = max_degree if max_degree is not None else 2 * P.n
    finite_cuts = [c for c in P.cuts if not c.is_infinite or include_infinite]
    hfam = {c: _h(P, c) for c in P.cuts}

    def product_class(cp, cq, xc, yc):
        prod, exact = P.mul_vec(
            cp, cq, xc.k, hfam[cp].rep(xc.k, xc.coords),
            yc.k, hfam[cq].rep(yc.k, yc.coords))
        if not exact:
            raise StabilizationFailure("truncated product in Massey search")
        return hfam[P.cut_for(cp + cq)].project(xc.k + yc.k, prod)

    defined = 0
    offenders = []
    classes = {c: h_basis_classes(P, c, 1, limit) for c in finite_cuts}
    for cp in finite_cuts:
        for cq in finite_cuts:
            pq = cp + cq
            if pq.is_infinite and not include_infinite:
                continue
            for cr in finite_cuts:
                pqr = pq + cr
                if pqr.is_infinite and not include_infinite:
                    continue
                for xc in classes[cp]:
                    for yc in classes[cq]:
                        if xc.k + yc.k > limit + 1:
                            continue
                        if any(product_class(cp, cq, xc, yc)):
                            continue
                        for zc in classes[cr]:
                            if xc.k + yc.k + zc.k - 1 > limit:
                                continue
                            if any(product_class(cq, cr, yc, zc)):
                                continue
                            sys = massey_triple(P, xc, yc, zc,
                                                second_system=False)
                            defined += 1
                            if not sys.contains_zero:
                                offenders.append(sys)
    return defined, offenders


def as_perverse(a, n=1, name=None):
    """Wrap a single cdga as a perverse cdga (all components equal)."""
    zero = Perversity.zero(n)
    inf = Perversity.infinite(n)
    comps = {zero: a, inf: a}
    ident = {k: Matrix.identity(a.dim(k)) for k in a.degrees()}
    poset = {(zero, inf): ident}

    def mul(i, j, x, y):
        return a.mul_basis(i, j, x, y)

    products = {(p, q): mul for p in comps for q in comps}
    return PerverseCDGA(n, comps, poset, products, name=name or a.name)
