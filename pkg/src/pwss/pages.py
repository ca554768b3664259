"""First-page weight spectral sequences of the regular part and the link.

A bigraded page is a CDGA whose basis vectors carry weights: a vector of
degree k and weight s sits in the cell (r, s) = (k - s, s). The differential
d_1 raises r by one and fixes s; products add bidegrees.

Ordinary case (smooth exceptional divisor D): two-column pages
    E1(X_reg):  H^{s-2}(D) --γ--> H^s(X̃)
    E1(L):      H^{s-2}(D) --j#--> H^s(D)
with the module products a·x = a·j(x) on the r = -1 column.

Surface case: the link page carries an interval variable l for the double
point gluing. Cells are the end-model spaces
    (0,0)  {(a, z(l)) : z(0) = i1*(a), z(1) = i2*(a)}
    (1,0)  H^0(Z)Λ(l)dl
    (0,1), (-1,3)  H^1(D̃)
    (-1,2) {(a, f(l), g(l)) : f(0) = i1*(a), g(1) = i2*(a)}
    (0,2)  H^2(D̃) ⊕ H^0(Z)Λ(l)dl ⊕ H^0(Z)Λ(l)dl
    (-2,4) H^0(Z)Λ(l)
    (-1,4) H^2(D̃) ⊕ H^0(Z)Λ(l)dl
with differentials
    d(a,z)   = z'dl
    d(a,f,g) = (j#(a) + η1(g(0) - i2*a) + η2(f(1) - i1*a), f'dl, g'dl)
    d(v)     = (η1(v(0)) - η2(v(1)), v'dl).
Read literally, the displayed coordinates of this page (with a free
H^0(Z)Λ(l) summand at (-1,2)) have extra cohomology at (-1,2) that
contradicts both the E2(L) table and H*(link of a curve cycle); the
endpoint-coupled coordinates above reproduce both.
"""

from __future__ import annotations

from fractions import Fraction

from .cdga import CDGA, CDGAMorphism, GradedVectorSpace, Product, validate_cdga
from .errors import InvalidCDGA, NonCommutingSquare
from .linalg import Matrix, Q0, Q1, Subspace, kernel

# ---------------------------------------------------------------------------
# page builder


class PageBuilder:
    """Assembles a bigraded page into a weighted CDGA.

    Cells are registered with labels; differential blocks are matrices
    between cells with Δ(r,s) = (1,0); product blocks are sparse closures
    between cells. Unregistered product orders are filled by Koszul
    flipping registered ones.
    """

    def __init__(self, name):
        self.name = name
        self.cells = {}   # (r,s) -> list of labels
        self.dblocks = {}  # (src_cell, tgt_cell) -> Matrix
        self.mblocks = {}  # (cellA, cellB) -> (tgt_cell, fn(a,b)->sparse)
        self.unit_cell = None
        self.unit_vec = None

    def cell(self, rs, labels):
        if not labels:
            return rs
        assert rs not in self.cells
        self.cells[rs] = list(labels)
        return rs

    def dim(self, cell):
        return len(self.cells.get(cell, ()))

    def set_d(self, src, tgt, matrix):
        assert tgt[0] == src[0] + 1 and tgt[1] == src[1]
        if src not in self.cells or tgt not in self.cells:
            assert matrix.is_zero()
            return
        assert matrix.nrows == self.dim(tgt) and matrix.ncols == self.dim(src)
        self.dblocks[(src, tgt)] = matrix

    def set_mul(self, ca, cb, tgt, fn, both_orders=True, vec_fn=None):
        """fn(a_idx, b_idx) -> (sparse list in tgt-cell coordinates, exact).

        vec_fn, when given, computes the same product on full cell vectors;
        it decides truncation exactness on actual coefficients.
        """
        if ca not in self.cells or cb not in self.cells:
            return
        assert tgt[0] == ca[0] + cb[0] and tgt[1] == ca[1] + cb[1]
        self.mblocks[(ca, cb)] = (tgt, fn, vec_fn)
        if both_orders and ca != cb:
            da = ca[0] + ca[1]
            db = cb[0] + cb[1]
            sign = Fraction((-1) ** (da * db))

            def flipped(b, a, _fn=fn, _s=sign):
                sparse, exact = _fn(a, b)
                return [(t, _s * c) for t, c in sparse], exact

            flipped_vec = None
            if vec_fn is not None:
                def flipped_vec(vb, va, _vf=vec_fn, _s=sign):
                    sparse, exact = _vf(va, vb)
                    return [(t, _s * c) for t, c in sparse], exact

            self.mblocks[(cb, ca)] = (tgt, flipped, flipped_vec)

    def set_unit(self, cell, vec):
        self.unit_cell = cell
        self.unit_vec = tuple(vec)

    def build(self, validate=True):
        degrees = {}
        for (r, s), labels in self.cells.items():
            degrees.setdefault(r + s, []).append((s, r, (r, s)))
        offsets = {}
        dims, labels, weights = {}, {}, {}
        for k, celllist in degrees.items():
            celllist.sort()
            pos = 0
            labs, ws = [], []
            for s, r, cell in celllist:
                offsets[cell] = pos
                for lab in self.cells[cell]:
                    labs.append(lab)
                    ws.append(s)
                pos += len(self.cells[cell])
            dims[k] = pos
            labels[k] = labs
            weights[k] = ws
        space = GradedVectorSpace(dims, labels, weights)

        cell_of_index = {}
        for cell, off in offsets.items():
            k = cell[0] + cell[1]
            for i in range(self.dim(cell)):
                cell_of_index[(k, off + i)] = (cell, i)

        diffs = {}
        for k in dims:
            if (k + 1) not in dims:
                for (src, tgt) in self.dblocks:
                    assert src[0] + src[1] != k or self.dblocks[(src, tgt)].is_zero()
                continue
            m = [[Q0] * dims[k] for _ in range(dims[k + 1])]
            for (src, tgt), block in self.dblocks.items():
                if src[0] + src[1] != k:
                    continue
                so, to = offsets[src], offsets[tgt]
                for i, row in enumerate(block.rows):
                    for j, v in enumerate(row):
                        if v:
                            m[to + i][so + j] = v
            diffs[k] = Matrix(m, dims[k])

        mblocks = self.mblocks
        builder = self

        def page_mul(i, j, a, b):
            ca, ia = cell_of_index[(i, a)]
            cb, ib = cell_of_index[(j, b)]
            entry = mblocks.get((ca, cb))
            if entry is None:
                return [], True
            tgt, fn, _ = entry
            sparse, exact = fn(ia, ib)
            if tgt not in offsets:
                if sparse:
                    raise InvalidCDGA(
                        f"page product of {ca}x{cb} hits missing cell {tgt}"
                    )
                return [], exact
            off = offsets[tgt]
            return [(off + t, c) for t, c in sparse], exact

        cells_by_degree = {}
        for cell in self.cells:
            cells_by_degree.setdefault(cell[0] + cell[1], []).append(cell)

        def page_vec_mul(i, va, j, vb):
            out = [Q0] * dims.get(i + j, 0)
            exact = True
            for ca in cells_by_degree.get(i, ()):
                na = self.dim(ca)
                oa = offsets[ca]
                cva = va[oa : oa + na]
                if not any(cva):
                    continue
                for cb in cells_by_degree.get(j, ()):
                    nb = self.dim(cb)
                    ob = offsets[cb]
                    cvb = vb[ob : ob + nb]
                    if not any(cvb):
                        continue
                    entry = mblocks.get((ca, cb))
                    if entry is None:
                        continue
                    tgt, fn, vec_fn = entry
                    if vec_fn is not None:
                        sparse, ok = vec_fn(cva, cvb)
                    else:
                        acc = {}
                        ok = True
                        for ia, cca in enumerate(cva):
                            if not cca:
                                continue
                            for ib, ccb in enumerate(cvb):
                                if not ccb:
                                    continue
                                sp, o1 = fn(ia, ib)
                                ok = ok and o1
                                for t, c in sp:
                                    acc[t] = acc.get(t, Q0) + cca * ccb * c
                        sparse = list(acc.items())
                    exact = exact and ok
                    if tgt not in offsets:
                        if any(c for _, c in sparse):
                            raise InvalidCDGA(
                                f"page product of {ca}x{cb} hits missing cell {tgt}"
                            )
                        continue
                    off = offsets[tgt]
                    for t, c in sparse:
                        out[off + t] += c
            return tuple(out), exact

        unit = [Q0] * dims.get(0, 0)
        if self.unit_cell is not None:
            off = offsets[self.unit_cell]
            for i, c in enumerate(self.unit_vec):
                unit[off + i] = c
        page = CDGA(space, diffs, Product(fn=page_mul), unit, name=self.name)
        page.cell_offsets = offsets
        page.cell_dims = {c: self.dim(c) for c in self.cells}
        page.vec_mul = page_vec_mul
        if validate:
            rep = validate_cdga(page, check_triples=False)
            if not rep.ok:
                raise InvalidCDGA(str(rep))
        return page


def cell_vector(page, cell, vec):
    """Embed a cell vector into full page coordinates of its degree."""
    k = cell[0] + cell[1]
    out = [Q0] * page.dim(k)
    off = page.cell_offsets[cell]
    for i, c in enumerate(vec):
        out[off + i] = c
    return tuple(out)


def cell_part(page, cell, vec):
    off = page.cell_offsets[cell]
    n = page.cell_dims[cell]
    return tuple(vec[off : off + n])


def page_cells(page):
    return sorted(page.cell_offsets, key=lambda c: (c[1], c[0]))


def cell_dim(page, r, s):
    return page.cell_dims.get((r, s), 0)


# ---------------------------------------------------------------------------
# ordinary pages


def _basis_vec(n, i):
    return tuple(Q1 if t == i else Q0 for t in range(n))


def e1_regular_ordinary(d):
    """E1(X_reg): columns H^{s-2}(D) -> H^s(X̃) with differential γ."""
    n = d.n
    HX, HD = d.HX, d.HD
    b = PageBuilder("E1(X_reg)")
    for s in range(0, 2 * n + 1):
        b.cell((0, s), [f"x:{HX.label(s, i)}" for i in range(HX.dim(s))])
        b.cell((-1, s), [f"θ{HD.label(s - 2, i)}" for i in range(HD.dim(s - 2))])
    for s in range(2, 2 * n + 1):
        if HD.dim(s - 2) and HX.dim(s):
            b.set_d((-1, s), (0, s), d.gamma_map(s))
    # products: X̃ cup on r=0; a·x = a·j(x) into r=-1; (-1)x(-1) = 0
    for s1 in range(0, 2 * n + 1):
        for s2 in range(0, 2 * n + 1):
            if s1 + s2 <= 2 * n and HX.dim(s1) and HX.dim(s2):
                def xmul(a, bb, s1=s1, s2=s2):
                    return d.HX.mul_basis(s1, s2, a, bb)[0], True
                b.set_mul((0, s1), (0, s2), (0, s1 + s2), xmul, both_orders=False)
            if s1 + s2 <= 2 * n and HD.dim(s1 - 2) and HX.dim(s2):
                def amul(a, x, s1=s1, s2=s2):
                    jx = d.j_map(s2).apply(_basis_vec(HX.dim(s2), x))
                    ea = _basis_vec(HD.dim(s1 - 2), a)
                    out, _ = HD.mul_vec(s1 - 2, ea, s2, jx)
                    return [(t, c) for t, c in enumerate(out) if c], True
                b.set_mul((-1, s1), (0, s2), (-1, s1 + s2), amul)
    b.set_unit((0, 0), HX.unit)
    return b.build(validate=not d.rank_only)


def e1_link_ordinary(d):
    """E1(L): columns H^{s-2}(D) -> H^s(D) with differential j_#."""
    n = d.n
    HD = d.HD
    b = PageBuilder("E1(L)")
    for s in range(0, 2 * n + 1):
        b.cell((0, s), [f"d:{HD.label(s, i)}" for i in range(HD.dim(s))])
        b.cell((-1, s), [f"θ{HD.label(s - 2, i)}" for i in range(HD.dim(s - 2))])
    for s in range(2, 2 * n + 1):
        if HD.dim(s - 2) and HD.dim(s):
            b.set_d((-1, s), (0, s), d.j_sharp(s))
    for s1 in range(0, 2 * n + 1):
        for s2 in range(0, 2 * n + 1):
            if s1 + s2 > 2 * n:
                continue
            if HD.dim(s1) and HD.dim(s2):
                def dmul(a, bb, s1=s1, s2=s2):
                    return HD.mul_basis(s1, s2, a, bb)[0], True
                b.set_mul((0, s1), (0, s2), (0, s1 + s2), dmul, both_orders=False)
            if HD.dim(s1 - 2) and HD.dim(s2):
                def amul(a, x, s1=s1, s2=s2):
                    return HD.mul_basis(s1 - 2, s2, a, x)[0], True
                b.set_mul((-1, s1), (0, s2), (-1, s1 + s2), amul)
    b.set_unit((0, 0), HD.unit)
    return b.build(validate=not d.rank_only)


def e1_morphism_ordinary(d, reg=None, link=None):
    """ι*: E1(X_reg) -> E1(L); identity on r = -1, j on r = 0."""
    reg = reg or e1_regular_ordinary(d)
    link = link or e1_link_ordinary(d)
    n = d.n
    maps = {}
    for k in set(reg.degrees()) | set(link.degrees()):
        m = [[Q0] * reg.dim(k) for _ in range(link.dim(k))]
        for s in range(0, 2 * n + 1):
            for (r, block) in ((0, d.j_map(s)), (-1, None)):
                cell = (r, s)
                if r + s != k or cell not in reg.cell_offsets:
                    continue
                if cell not in link.cell_offsets:
                    continue
                src_off = reg.cell_offsets[cell]
                tgt_off = link.cell_offsets[cell]
                if r == -1:
                    for i in range(reg.cell_dims[cell]):
                        m[tgt_off + i][src_off + i] = Q1
                else:
                    for i, row in enumerate(block.rows):
                        for jj, v in enumerate(row):
                            if v:
                                m[tgt_off + i][src_off + jj] = v
        maps[k] = Matrix(m, reg.dim(k))
    f = CDGAMorphism(reg, link, maps, name="E1(iota*)")
    _check_page_morphism(f)
    return f


def _check_page_morphism(f):
    ok, k = f.commutes_with_d()
    if not ok:
        raise NonCommutingSquare(f"{f.name} fails to commute with d at degree {k}")
    ok, loc = f.is_multiplicative()
    if not ok:
        raise NonCommutingSquare(f"{f.name} not multiplicative at {loc}")
    if not f.preserves_unit():
        raise NonCommutingSquare(f"{f.name} does not preserve the unit")


# ---------------------------------------------------------------------------
# surface pages


class LPoly:
    """Index helpers for H^0(Z)Λ(l) spaces truncated at l-degree N."""

    def __init__(self, nz, N, dl=False):
        self.nz = nz
        self.N = N
        self.dl = dl
        self.top = N - 1 if dl else N
        self.dim = nz * (self.top + 1)

    def idx(self, q, m):
        return m * self.nz + q

    def monomials(self):
        return [(q, m) for m in range(self.top + 1) for q in range(self.nz)]

    def labels(self, stem):
        return [
            f"{stem}{q}" + (f"·l^{m}" if m else "") + ("·dl" if self.dl else "")
            for m in range(self.top + 1)
            for q in range(self.nz)
        ]

    def eval_at(self, vec, value):
        """Evaluate z(l) at l = value (0 or 1): vector in H^0(Z)."""
        out = [Q0] * self.nz
        for m in range(self.top + 1):
            f = Fraction(value) ** m
            if f:
                for q in range(self.nz):
                    c = vec[self.idx(q, m)]
                    if c:
                        out[q] += c * f
        return tuple(out)

    def derivative_into(self, other):
        """Matrix of z(l) -> z'(l) (into dl-coordinates of `other`)."""
        m = [[Q0] * self.dim for _ in range(other.dim)]
        for mm in range(1, self.top + 1):
            for q in range(self.nz):
                m[other.idx(q, mm - 1)][self.idx(q, mm)] = Fraction(mm)
        return Matrix(m, self.dim)

    def mul_poly(self, va, other, vb, target):
        """(va)·(vb) -> (coefficients in target, exact); truncation flags."""
        acc = {}
        exact = True
        for ma in range(self.top + 1):
            for qa in range(self.nz):
                ca = va[self.idx(qa, ma)]
                if not ca:
                    continue
                for mb in range(other.top + 1):
                    cb = vb[other.idx(qa, mb)]
                    if not cb:
                        continue
                    if ma + mb <= target.top:
                        t = target.idx(qa, ma + mb)
                        acc[t] = acc.get(t, Q0) + ca * cb
                    else:
                        exact = False
        out = [Q0] * target.dim
        for t, c in acc.items():
            out[t] = c
        return tuple(out), exact


def e1_regular_surface(d):
    """E1(X_reg) for a surface: three columns with H^0(Z) at r = -2."""
    HX, HD1 = d.HX, d.HD1
    nz = d.hz_dim
    b = PageBuilder("E1(X_reg)")
    for s in range(0, 5):
        b.cell((0, s), [f"x:{HX.label(s, i)}" for i in range(HX.dim(s))])
    for s in (2, 3, 4):
        b.cell((-1, s), [f"θ{HD1.label(s - 2, i)}" for i in range(HD1.dim(s - 2))])
    b.cell((-2, 4), [f"z{q}" for q in range(nz)])
    for s in (2, 3, 4):
        if HD1.dim(s - 2) and HX.dim(s):
            b.set_d((-1, s), (0, s), d.gamma_map(s))
    if nz and HD1.dim(2):
        b.set_d((-2, 4), (-1, 4), d.eta_comb())
    # products
    for s1 in range(5):
        for s2 in range(5):
            if s1 + s2 <= 4 and HX.dim(s1) and HX.dim(s2):
                def xmul(a, bb, s1=s1, s2=s2):
                    return HX.mul_basis(s1, s2, a, bb)[0], True
                b.set_mul((0, s1), (0, s2), (0, s1 + s2), xmul, both_orders=False)
            if s1 in (2, 3, 4) and s1 + s2 <= 4 and HD1.dim(s1 - 2) and HX.dim(s2):
                def amul(a, x, s1=s1, s2=s2):
                    jx = d.j_map(s2).apply(_basis_vec(HX.dim(s2), x))
                    ea = _basis_vec(HD1.dim(s1 - 2), a)
                    out, _ = HD1.mul_vec(s1 - 2, ea, s2, jx)
                    return [(t, c) for t, c in enumerate(out) if c], True
                b.set_mul((-1, s1), (0, s2), (-1, s1 + s2), amul)
    # H^0(X̃) acts on the z-cell through i1 ∘ j^0
    if nz:
        def zscale(z, x):
            jx = d.j_map(0).apply(_basis_vec(HX.dim(0), x))
            scale = d.i1.apply(jx)
            return ([(z, scale[z])] if scale[z] else []), True
        b.set_mul((-2, 4), (0, 0), (-2, 4), zscale)
        # (-1,2)x(-1,2) -> (-2,4): μ(a, a') = i2(a)i1(a') - i1(a)i2(a')
        if HD1.dim(0):
            def theta_mul(a, a2):
                ea = _basis_vec(HD1.dim(0), a)
                eb = _basis_vec(HD1.dim(0), a2)
                v1 = d.i2.apply(ea)
                w1 = d.i1.apply(eb)
                v2 = d.i1.apply(ea)
                w2 = d.i2.apply(eb)
                return [
                    (q, v1[q] * w1[q] - v2[q] * w2[q])
                    for q in range(nz)
                    if v1[q] * w1[q] - v2[q] * w2[q]
                ], True
            b.set_mul((-1, 2), (-1, 2), (-2, 4), theta_mul, both_orders=False)
    b.set_unit((0, 0), HX.unit)
    return b.build(validate=not d.rank_only)


def e1_link_surface(d, l_bound=4):
    """E1(L) for a surface in end-model coordinates, Λ(l) bounded."""
    HD1 = d.HD1
    nz = d.hz_dim
    nc = HD1.dim(0)
    N = l_bound
    lam = LPoly(nz, N)
    lam_dl = LPoly(nz, N, dl=True)
    b = PageBuilder("E1(L)")

    # P = {(a, z): z(0) = i1 a, z(1) = i2 a} and the (-1,2) analogue
    P_basis = _pullback_basis(d, lam, ["0"])
    Q_basis = _pullback_basis(d, lam, ["f", "g"])
    b.cell((0, 0), [lab for lab, _ in P_basis])
    b.cell((1, 0), lam_dl.labels("w"))
    b.cell((0, 1), [f"u:{HD1.label(1, i)}" for i in range(HD1.dim(1))])
    b.cell((-1, 2), [lab for lab, _ in Q_basis])
    b.cell(
        (0, 2),
        [f"h:{HD1.label(2, i)}" for i in range(HD1.dim(2))]
        + lam_dl.labels("φ")
        + lam_dl.labels("ψ"),
    )
    b.cell((-1, 3), [f"θu:{HD1.label(1, i)}" for i in range(HD1.dim(1))])
    b.cell((-2, 4), lam.labels("v"))
    b.cell((-1, 4), [f"θh:{HD1.label(2, i)}" for i in range(HD1.dim(2))] + lam_dl.labels("vdl"))

    P_vecs = [v for _, v in P_basis]
    Q_vecs = [v for _, v in Q_basis]
    nh2 = HD1.dim(2)

    def P_split(vec):
        return vec[:nc], vec[nc:]

    def Q_split(vec):
        return vec[:nc], vec[nc : nc + lam.dim], vec[nc + lam.dim :]

    # d(0,0): (a, z) -> z' dl
    cols = []
    for _, v in P_basis:
        a, z = P_split(v)
        cols.append(list(lam.derivative_into(lam_dl).apply(z)))
    if P_basis:
        b.set_d((0, 0), (1, 0), Matrix.from_columns(cols, lam_dl.dim))
    # d(-1,2): (a,f,g) -> (j#a + η1(g(0)-i2a) + η2(f(1)-i1a), f'dl, g'dl)
    cols = []
    for _, v in Q_basis:
        a, f, g = Q_split(v)
        h = list(d.j_sharp().apply(a))
        corr1 = tuple(
            x - y for x, y in zip(lam.eval_at(g, 0), d.i2.apply(a))
        )
        corr2 = tuple(
            x - y for x, y in zip(lam.eval_at(f, 1), d.i1.apply(a))
        )
        e1v = d.eta1.apply(corr1)
        e2v = d.eta2.apply(corr2)
        h = [h[t] + e1v[t] + e2v[t] for t in range(nh2)]
        fd = lam.derivative_into(lam_dl).apply(f)
        gd = lam.derivative_into(lam_dl).apply(g)
        cols.append(h + list(fd) + list(gd))
    if Q_basis:
        b.set_d((-1, 2), (0, 2), Matrix.from_columns(cols, nh2 + 2 * lam_dl.dim))
    # d(-2,4): v -> (η1(v(0)) - η2(v(1)), v'dl)
    cols = []
    for q, m in lam.monomials():
        v = [Q0] * lam.dim
        v[lam.idx(q, m)] = Q1
        h1 = d.eta1.apply(lam.eval_at(v, 0))
        h2 = d.eta2.apply(lam.eval_at(v, 1))
        vd = lam.derivative_into(lam_dl).apply(v)
        cols.append([h1[t] - h2[t] for t in range(nh2)] + list(vd))
    if nz:
        b.set_d((-2, 4), (-1, 4), Matrix.from_columns(cols, nh2 + lam_dl.dim))

    # ---- products -------------------------------------------------------
    # Vector-level cores (exactness decided on actual coefficients); the
    # index-level wrappers feed the structure-constant tables.

    def P_combine(cv):
        out = [Q0] * (nc + lam.dim)
        for i, c in enumerate(cv):
            if c:
                for t, v in enumerate(P_vecs[i]):
                    out[t] += c * v
        return P_split(tuple(out))

    def Q_combine(cv):
        out = [Q0] * (nc + 2 * lam.dim)
        for i, c in enumerate(cv):
            if c:
                for t, v in enumerate(Q_vecs[i]):
                    out[t] += c * v
        return Q_split(tuple(out))

    def _ebase(n, i):
        v = [Q0] * n
        v[i] = Q1
        return tuple(v)

    def solve_P(vec):
        return _solve_in_basis(P_vecs, vec)

    def solve_Q(vec):
        return _solve_in_basis(Q_vecs, vec)

    def vec_P_P(cva, cvb):
        ax, zx = P_combine(cva)
        ay, zy = P_combine(cvb)
        aa, _ = HD1.mul_vec(0, ax, 0, ay)
        zz, exact = lam.mul_poly(zx, lam, zy, lam)
        if not exact:
            return [], False
        return solve_P(tuple(aa) + zz), True

    b.set_mul((0, 0), (0, 0), (0, 0),
              lambda x, y: vec_P_P(_ebase(len(P_vecs), x), _ebase(len(P_vecs), y)),
              both_orders=False, vec_fn=vec_P_P)

    def vec_P_w(cva, wv):
        _, zx = P_combine(cva)
        out, exact = lam.mul_poly(zx, lam_dl, tuple(wv), lam_dl)
        return [(t, c) for t, c in enumerate(out) if c], exact

    b.set_mul((0, 0), (1, 0), (1, 0),
              lambda x, w: vec_P_w(_ebase(len(P_vecs), x), _ebase(lam_dl.dim, w)),
              vec_fn=vec_P_w)

    if HD1.dim(1):
        def vec_P_u(cva, uv):
            ax, _ = P_combine(cva)
            out, _ = HD1.mul_vec(0, ax, 1, tuple(uv))
            return [(t, c) for t, c in enumerate(out) if c], True

        for tgt_cell in ((0, 1), (-1, 3)):
            b.set_mul((0, 0), tgt_cell, tgt_cell,
                      lambda x, u, _n=HD1.dim(1): vec_P_u(
                          _ebase(len(P_vecs), x), _ebase(_n, u)),
                      vec_fn=vec_P_u)

    def vec_P_Q(cva, cvb):
        ax, zx = P_combine(cva)
        ay, f, g = Q_combine(cvb)
        aa, _ = HD1.mul_vec(0, ax, 0, ay)
        zf, ex1 = lam.mul_poly(zx, lam, f, lam)
        zg, ex2 = lam.mul_poly(zx, lam, g, lam)
        if not (ex1 and ex2):
            return [], False
        return solve_Q(tuple(aa) + zf + zg), True

    b.set_mul((0, 0), (-1, 2), (-1, 2),
              lambda x, y: vec_P_Q(_ebase(len(P_vecs), x), _ebase(len(Q_vecs), y)),
              vec_fn=vec_P_Q)

    def vec_P_02(cva, cvb):
        ax, zx = P_combine(cva)
        h = cvb[:nh2]
        out = []
        exact = True
        ah, _ = HD1.mul_vec(0, ax, 2, tuple(h))
        out += [(t, c) for t, c in enumerate(ah) if c]
        for slot in (0, 1):
            wv = cvb[nh2 + slot * lam_dl.dim : nh2 + (slot + 1) * lam_dl.dim]
            if not any(wv):
                continue
            prod, ok = lam.mul_poly(zx, lam_dl, tuple(wv), lam_dl)
            exact = exact and ok
            off = nh2 + slot * lam_dl.dim
            out += [(off + t, c) for t, c in enumerate(prod) if c]
        return out, exact

    b.set_mul((0, 0), (0, 2), (0, 2),
              lambda x, y: vec_P_02(
                  _ebase(len(P_vecs), x), _ebase(nh2 + 2 * lam_dl.dim, y)),
              vec_fn=vec_P_02)

    def vec_P_v(cva, vv):
        _, zx = P_combine(cva)
        out, exact = lam.mul_poly(zx, lam, tuple(vv), lam)
        return [(t, c) for t, c in enumerate(out) if c], exact

    b.set_mul((0, 0), (-2, 4), (-2, 4),
              lambda x, v: vec_P_v(_ebase(len(P_vecs), x), _ebase(lam.dim, v)),
              vec_fn=vec_P_v)

    def vec_P_14(cva, cvb):
        ax, zx = P_combine(cva)
        h = cvb[:nh2]
        out = []
        exact = True
        ah, _ = HD1.mul_vec(0, ax, 2, tuple(h))
        out += [(t, c) for t, c in enumerate(ah) if c]
        wv = cvb[nh2:]
        if any(wv):
            prod, ok = lam.mul_poly(zx, lam_dl, tuple(wv), lam_dl)
            exact = exact and ok
            out += [(nh2 + t, c) for t, c in enumerate(prod) if c]
        return out, exact

    b.set_mul((0, 0), (-1, 4), (-1, 4),
              lambda x, y: vec_P_14(
                  _ebase(len(P_vecs), x), _ebase(nh2 + lam_dl.dim, y)),
              vec_fn=vec_P_14)

    def vec_Q_Q(cva, cvb):
        _, fx, gx = Q_combine(cva)
        _, fy, gy = Q_combine(cvb)
        t1, ex1 = lam.mul_poly(fx, lam, gy, lam)
        t2, ex2 = lam.mul_poly(gx, lam, fy, lam)
        out = [-(t1[t] - t2[t]) for t in range(lam.dim)]
        return [(t, c) for t, c in enumerate(out) if c], ex1 and ex2

    b.set_mul((-1, 2), (-1, 2), (-2, 4),
              lambda x, y: vec_Q_Q(_ebase(len(Q_vecs), x), _ebase(len(Q_vecs), y)),
              both_orders=False, vec_fn=vec_Q_Q)

    def vec_Q_w(cva, wv):
        _, fx, gx = Q_combine(cva)
        fw, ex1 = lam.mul_poly(fx, lam_dl, tuple(wv), lam_dl)
        gw, ex2 = lam.mul_poly(gx, lam_dl, tuple(wv), lam_dl)
        out = []
        for t, c in enumerate(fw):
            if c:
                out.append((nh2 + t, -c))
        for t, c in enumerate(gw):
            if c:
                out.append((nh2 + lam_dl.dim + t, -c))
        return out, ex1 and ex2

    b.set_mul((-1, 2), (1, 0), (0, 2),
              lambda x, w: vec_Q_w(_ebase(len(Q_vecs), x), _ebase(lam_dl.dim, w)),
              vec_fn=vec_Q_w)

    def vec_Q_02(cva, cvb):
        ax, fx, gx = Q_combine(cva)
        h = cvb[:nh2]
        out = []
        exact = True
        ah, _ = HD1.mul_vec(0, ax, 2, tuple(h))
        out += [(t, c) for t, c in enumerate(ah) if c]
        phi = cvb[nh2 : nh2 + lam_dl.dim]
        psi = cvb[nh2 + lam_dl.dim :]
        acc = [Q0] * lam_dl.dim
        if any(psi):
            prod, ok = lam.mul_poly(fx, lam_dl, tuple(psi), lam_dl)
            exact = exact and ok
            for t, c in enumerate(prod):
                acc[t] += c
        if any(phi):
            prod, ok = lam.mul_poly(gx, lam_dl, tuple(phi), lam_dl)
            exact = exact and ok
            for t, c in enumerate(prod):
                acc[t] -= c
        out += [(nh2 + t, c) for t, c in enumerate(acc) if c]
        return out, exact

    b.set_mul((-1, 2), (0, 2), (-1, 4),
              lambda x, y: vec_Q_02(
                  _ebase(len(Q_vecs), x), _ebase(nh2 + 2 * lam_dl.dim, y)),
              vec_fn=vec_Q_02)

    def vec_v_w(vv, wv):
        out, exact = lam.mul_poly(tuple(vv), lam_dl, tuple(wv), lam_dl)
        return [(nh2 + t, c) for t, c in enumerate(out) if c], exact

    b.set_mul((-2, 4), (1, 0), (-1, 4),
              lambda v, w: vec_v_w(_ebase(lam.dim, v), _ebase(lam_dl.dim, w)),
              vec_fn=vec_v_w)

    # the unit of P is (1, z ≡ i1(1) = i2(1) = all-ones constant)
    zunit = _const_lpoly(lam, d.i1.apply(HD1.unit))
    coords = _solve_in_basis(P_vecs, tuple(HD1.unit) + zunit)
    unit = [Q0] * len(P_vecs)
    for t, c in coords:
        unit[t] = c
    b.set_unit((0, 0), unit)
    page = b.build(validate=not d.rank_only)
    page.l_bound = N
    page.lam = lam
    page.lam_dl = lam_dl
    page.P_vecs = P_vecs
    page.Q_vecs = Q_vecs
    return page


def _const_lpoly(lam, values):
    out = [Q0] * lam.dim
    for q, c in enumerate(values):
        out[lam.idx(q, 0)] = c
    return tuple(out)


def _pullback_basis(d, lam, slots):
    """Endpoint-constrained cell bases with l-degree kept minimal.

    slots = ["0"]: pairs (a, z) with z(0) = i1 a, z(1) = i2 a; basis = the
    affine interpolants per curve plus (l^m - l) null profiles per point.
    slots = ["f","g"]: triples (a, f, g) with f(0) = i1 a, g(1) = i2 a;
    basis = constant interpolants plus one-sided null profiles.

    Keeping the interpolants at l-degree <= 1 makes products of the
    geometric generators exact at any bound; only genuinely high-degree
    profile pairs carry the truncation flag.
    """
    nc = d.HD1.dim(0)
    nz = d.hz_dim
    nslots = len(slots)
    N = lam.top
    width = nc + nslots * lam.dim
    out = []

    def build(a_part, profiles):
        vec = [Q0] * width
        for c, v in enumerate(a_part):
            vec[c] = v
        for slot, poly in profiles:
            for (q, m), v in poly.items():
                vec[nc + slot * lam.dim + lam.idx(q, m)] += v
        return tuple(vec)

    if nslots == 1:
        for c in range(nc):
            ec = tuple(Q1 if t == c else Q0 for t in range(nc))
            i1a, i2a = d.i1.apply(ec), d.i2.apply(ec)
            poly = {}
            for q in range(nz):
                if i1a[q]:
                    poly[(q, 0)] = poly.get((q, 0), Q0) + i1a[q]
                diff = i2a[q] - i1a[q]
                if diff:
                    poly[(q, 1)] = poly.get((q, 1), Q0) + diff
            out.append((f"P:{d.HD1.label(0, c)}", build(ec, [(0, poly)])))
        for q in range(nz):
            for m in range(2, N + 1):
                out.append(
                    (f"P:null{q}l{m}", build([Q0] * nc,
                     [(0, {(q, m): Q1, (q, 1): -Q1})]))
                )
    else:
        for c in range(nc):
            ec = tuple(Q1 if t == c else Q0 for t in range(nc))
            i1a, i2a = d.i1.apply(ec), d.i2.apply(ec)
            fpoly = {(q, 0): i1a[q] for q in range(nz) if i1a[q]}
            gpoly = {(q, 0): i2a[q] for q in range(nz) if i2a[q]}
            out.append(
                (f"Q:{d.HD1.label(0, c)}", build(ec, [(0, fpoly), (1, gpoly)]))
            )
        for q in range(nz):
            for m in range(1, N + 1):
                out.append((f"Q:f{q}l{m}", build([Q0] * nc, [(0, {(q, m): Q1})])))
                out.append(
                    (f"Q:g{q}l{m}", build([Q0] * nc,
                     [(1, {(q, m): Q1, (q, 0): -Q1})]))
                )
    return out


def _solve_in_basis(vecs, target):
    """Coordinates of target in the span of vecs (must succeed)."""
    if not vecs:
        assert not any(target)
        return []
    m = Matrix.from_columns([list(v) for v in vecs], len(target))
    from .linalg import solve

    x = solve(m, tuple(target))
    if x is None:
        raise InvalidCDGA("vector not in the constrained cell")
    return [(t, c) for t, c in enumerate(x) if c]


def e1_regular(d):
    return e1_regular_ordinary(d) if d.kind == "ordinary" else e1_regular_surface(d)


def e1_link(d, l_bound=4):
    if d.kind == "ordinary":
        return e1_link_ordinary(d)
    return e1_link_surface(d, l_bound=l_bound)


def e1_morphism(d, l_bound=4, reg=None, link=None):
    if d.kind == "ordinary":
        return e1_morphism_ordinary(d, reg=reg, link=link)
    return e1_morphism_surface(d, l_bound=l_bound, reg=reg, link=link)


def e1_morphism_surface(d, l_bound=4, reg=None, link=None):
    reg = reg or e1_regular_surface(d)
    link = link or e1_link_surface(d, l_bound=l_bound)
    HX, HD1 = d.HX, d.HD1
    nz = d.hz_dim
    lam, lam_dl = link.lam, link.lam_dl
    nh2 = HD1.dim(2)
    maps = {}
    blocks = {}

    # (0,0): x -> (j0 x, i1 j0 x const)
    cols = []
    for x in range(HX.dim(0)):
        jx = d.j_map(0).apply(_basis_vec(HX.dim(0), x))
        vec = tuple(jx) + _const_lpoly(lam, d.i1.apply(jx))
        coords = _solve_in_basis(link.P_vecs, vec)
        col = [Q0] * len(link.P_vecs)
        for t, c in coords:
            col[t] = c
        cols.append(col)
    blocks[((0, 0), (0, 0))] = Matrix.from_columns(cols, len(link.P_vecs))
    # (0,1): j^1
    if HX.dim(1) and HD1.dim(1):
        blocks[((0, 1), (0, 1))] = d.j_map(1)
    # (-1,2): a -> (a, i1 a const, i2 a const)
    if HD1.dim(0):
        cols = []
        for a in range(HD1.dim(0)):
            ea = _basis_vec(HD1.dim(0), a)
            vec = tuple(ea) + _const_lpoly(lam, d.i1.apply(ea)) + _const_lpoly(
                lam, d.i2.apply(ea)
            )
            coords = _solve_in_basis(link.Q_vecs, vec)
            col = [Q0] * len(link.Q_vecs)
            for t, c in coords:
                col[t] = c
            cols.append(col)
        blocks[((-1, 2), (-1, 2))] = Matrix.from_columns(cols, len(link.Q_vecs))
    # (0,2): b -> (j^2 b, 0, 0)
    if HX.dim(2):
        cols = []
        for x in range(HX.dim(2)):
            jb = d.j_map(2).apply(_basis_vec(HX.dim(2), x))
            cols.append(list(jb) + [Q0] * (2 * lam_dl.dim))
        blocks[((0, 2), (0, 2))] = Matrix.from_columns(cols, nh2 + 2 * lam_dl.dim)
    # (-1,3): identity on H^1(D̃)
    if HD1.dim(1):
        blocks[((-1, 3), (-1, 3))] = Matrix.identity(HD1.dim(1))
    # (-2,4): z -> z const; (-1,4): a -> (a, 0)
    if nz:
        cols = []
        for q in range(nz):
            v = [Q0] * lam.dim
            v[lam.idx(q, 0)] = Q1
            cols.append(v)
        blocks[((-2, 4), (-2, 4))] = Matrix.from_columns(cols, lam.dim)
    if nh2:
        cols = []
        for i in range(nh2):
            cols.append(
                list(_basis_vec(nh2, i)) + [Q0] * lam_dl.dim
            )
        blocks[((-1, 4), (-1, 4))] = Matrix.from_columns(cols, nh2 + lam_dl.dim)

    for k in set(reg.degrees()) | set(link.degrees()):
        m = [[Q0] * reg.dim(k) for _ in range(link.dim(k))]
        for (src_cell, tgt_cell), block in blocks.items():
            if src_cell[0] + src_cell[1] != k:
                continue
            if src_cell not in reg.cell_offsets or tgt_cell not in link.cell_offsets:
                continue
            so = reg.cell_offsets[src_cell]
            to = link.cell_offsets[tgt_cell]
            for i, row in enumerate(block.rows):
                for jj, v in enumerate(row):
                    if v:
                        m[to + i][so + jj] = v
        maps[k] = Matrix(m, reg.dim(k))
    f = CDGAMorphism(reg, link, maps, name="E1(iota*)")
    _check_page_morphism(f)
    return f
