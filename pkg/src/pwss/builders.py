"""Synthetic algebra and datum builders used by fixtures and tests.

All constructions here are rank-constrained realizations: explicit bases
and structure constants chosen so that every structural invariant of the
corresponding geometry holds exactly. They are derived data, not copied
tables.
"""

from __future__ import annotations

from itertools import combinations

from fractions import Fraction

from .cdga import CDGA, GradedVectorSpace, Product
from .datum import OrdinaryDatum, SurfaceDatum, validate_datum
from .errors import InvariantViolation
from .linalg import Matrix, Q0, Q1, solve_matrix

# ---------------------------------------------------------------------------
# graded algebras


def surface_algebra(form, labels=None, name="H(S)"):
    """Cohomology algebra of a simply connected closed 4-manifold.

    Args:
        form: symmetric nondegenerate Matrix, the intersection form on H^2.
        labels: optional names for the degree-2 basis.

    Degrees (1, 0, b2, 0, 1); the product H^2 x H^2 -> H^4 is the form.
    """
    b2 = form.nrows
    assert form == form.transpose()
    space = GradedVectorSpace(
        {0: 1, 2: b2, 4: 1},
        {0: ["1"], 2: labels or [f"w{i}" for i in range(b2)], 4: ["vol"]},
    )
    table = {(0, 0, 0, 0): [(0, Q1)]}
    for i in range(b2):
        table[(0, 2, 0, i)] = [(i, Q1)]
        table[(2, 0, i, 0)] = [(i, Q1)]
    table[(0, 4, 0, 0)] = [(0, Q1)]
    table[(4, 0, 0, 0)] = [(0, Q1)]
    for i in range(b2):
        for j in range(b2):
            c = form.rows[i][j]
            table[(2, 2, i, j)] = [(0, c)] if c else []
    return CDGA(space, {}, Product.from_table(table), (Q1,), name=name)


def diagonal_form(diag):
    n = len(diag)
    return Matrix(
        [[Fraction(diag[i]) if i == j else Q0 for j in range(n)] for i in range(n)]
    )


def k3_algebra():
    """Rational model of a K3 surface: b2 = 22, signature (3,19)."""
    return surface_algebra(diagonal_form([1, 1, 1] + [-1] * 19), name="H(K3)")


def blowup_plane_algebra():
    """Plane blown up in 21 points: b2 = 22, signature (1,21), X = 24."""
    return surface_algebra(diagonal_form([1] + [-1] * 21), name="H(Bl21 P2)")


def projective_plane_algebra():
    """H*(P^2): b2 = 1, used for the Q-homology-manifold style cone."""
    return surface_algebra(diagonal_form([1]), name="H(P2)")


def heisenberg_cdga():
    """The degree-1 Heisenberg cdga Λ(a,b,c), dc = ab.

    The classic non-formal example: <[a],[a],[b]> = [ac] with zero
    indeterminacy, so the Massey coset misses 0.
    """
    space = GradedVectorSpace(
        {0: 1, 1: 3, 2: 3, 3: 1},
        {0: ["1"], 1: ["a", "b", "c"], 2: ["ab", "ac", "bc"], 3: ["abc"]},
    )
    A, B, C = 0, 1, 2
    AB, AC, BC = 0, 1, 2
    table = {(0, 0, 0, 0): [(0, Q1)]}
    for k, n in ((1, 3), (2, 3), (3, 1)):
        for i in range(n):
            table[(0, k, 0, i)] = [(i, Q1)]
            table[(k, 0, i, 0)] = [(i, Q1)]
    pairs = {
        (A, B): (AB, Q1), (B, A): (AB, -Q1),
        (A, C): (AC, Q1), (C, A): (AC, -Q1),
        (B, C): (BC, Q1), (C, B): (BC, -Q1),
    }
    for i in range(3):
        for j in range(3):
            table[(1, 1, i, j)] = []
    for (i, j), (t, c) in pairs.items():
        table[(1, 1, i, j)] = [(t, c)]
    # deg1 x deg2 -> deg3 (and the graded flip: even target, same sign order)
    deg12 = {
        (A, BC): Q1, (B, AC): -Q1, (C, AB): Q1,
    }
    for i in range(3):
        for j in range(3):
            table[(1, 2, i, j)] = []
            table[(2, 1, j, i)] = []
    for (i, j), c in deg12.items():
        table[(1, 2, i, j)] = [(0, c)]
        table[(2, 1, j, i)] = [(0, c)]  # x·y = (-1)^{1·2} y·x = y·x
    for i in range(3):
        table[(1, 3, i, 0)] = []
        table[(3, 1, 0, i)] = []
        table[(2, 2, i, 0)] = []
    for i in range(3):
        for j in range(3):
            table[(2, 2, i, j)] = []
    d1 = Matrix.from_columns([[Q0] * 3, [Q0] * 3, [Q1, Q0, Q0]], 3)  # dc = ab
    return CDGA(space, {1: d1}, Product.from_table(table), (Q1,), name="Heis")


def exterior_algebra(ngens, name="Λ"):
    """Exterior algebra on ngens degree-1 generators; H of a torus."""
    basis = {k: list(combinations(range(ngens), k)) for k in range(ngens + 1)}
    index = {k: {mon: i for i, mon in enumerate(basis[k])} for k in basis}
    dims = {k: len(basis[k]) for k in basis}
    labels = {
        k: ["1" if not mon else "α" + "".join(str(i + 1) for i in mon) for mon in basis[k]]
        for k in basis
    }
    space = GradedVectorSpace(dims, labels)

    def wedge_sign(m1, m2):
        if set(m1) & set(m2):
            return None, None
        merged = list(m1) + list(m2)
        perm = sorted(range(len(merged)), key=lambda t: merged[t])
        inv = sum(
            1
            for s in range(len(perm))
            for t in range(s + 1, len(perm))
            if perm[s] > perm[t]
        )
        return tuple(sorted(merged)), Fraction((-1) ** inv)

    def ext_mul(i, j, a, b):
        mon, sign = wedge_sign(basis[i][a], basis[j][b])
        if mon is None:
            return [], True
        return [(index[i + j][mon], sign)], True

    return CDGA(space, {}, Product(fn=ext_mul), (Q1,), name=name)


def torus_like_algebra():
    """H of an abelian surface: Λ(α1..α4); H^1 ≠ 0 (weak-link control)."""
    return exterior_algebra(4, name="H(T4)")


def pairings_from_volume(a, top, vol):
    """Attach Poincaré pairings derived from the product and a volume functional."""
    from .datum import _pairing_matrix_from_product

    a.pairings = [_pairing_matrix_from_product(a, k, top, vol) for k in range(top + 1)]
    a.rank_only = False
    return a


def gamma_from_adjoint(HX, HD, j, n):
    """Construct every Gysin map from j and the pairings: γ^T P_X = P_D j."""
    gamma = {}
    for k in range(2, 2 * n + 1):
        ka, kx = k - 2, 2 * n - k
        if not HD.dim(ka):
            continue
        if not HX.dim(k):
            gamma[k] = Matrix.zero(0, HD.dim(ka))
            continue
        pxk = HX.pairings[k]  # dim H^k(X) x dim H^kx(X), invertible square here
        rhs = HD.pairings[ka] @ j.get(kx, Matrix.zero(HD.dim(kx), HX.dim(kx)))
        gt = solve_matrix(pxk.transpose(), rhs.transpose())
        assert gt is not None, f"pairing not invertible in degree {k}"
        gamma[k] = gt
    return gamma


# ---------------------------------------------------------------------------
# ordinary data


def disjoint_quadrics_algebra(N):
    """H of a disjoint union of N copies of P^1 x P^1."""
    dims = {0: N, 2: 2 * N, 4: N}
    labels = {
        0: [f"1_{c}" for c in range(N)],
        2: [x for c in range(N) for x in (f"a_{c}", f"b_{c}")],
        4: [f"v_{c}" for c in range(N)],
    }
    space = GradedVectorSpace(dims, labels)

    def comp_of(k, idx):
        return idx if k != 2 else idx // 2

    def mul(i, j, x, y):
        if i > j:
            sp, ex = mul(j, i, y, x)
            return sp, ex  # all degrees even: no sign
        if i == 0:
            cx = comp_of(0, x)
            if comp_of(j, y) != cx:
                return [], True
            return [(y, Q1)], True
        if i == 2 and j == 2:
            cx, cy = x // 2, y // 2
            if cx != cy or (x % 2) == (y % 2):
                return [], True
            return [(cx, Q1)], True
        return [], True

    unit = tuple(Q1 for _ in range(N))
    a = CDGA(space, {}, Product(fn=mul), unit, name="H(⊔P1xP1)")
    return pairings_from_volume(a, 4, tuple(Q1 for _ in range(N)))


def dual_pairing_algebra(deg2_labels, mid_products, name="H(X~)"):
    """Threefold-style algebra: H^4 = (H^2)^∨, product via a symmetric
    trilinear form given as dict (i,j,k)->coeff on sorted index triples."""
    m = len(deg2_labels)
    dims = {0: 1, 2: m, 4: m, 6: 1}
    labels = {
        0: ["1"],
        2: list(deg2_labels),
        4: [lab + "^" for lab in deg2_labels],
        6: ["vol"],
    }
    space = GradedVectorSpace(dims, labels)
    T = {}
    for (i, j, k), c in mid_products.items():
        for tri in set(
            [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)]
        ):
            T[tri] = Fraction(c)

    def mul(di, dj, x, y):
        if di > dj:
            return mul(dj, di, y, x)
        if di == 0:
            return [(y, Q1)], True
        if (di, dj) == (2, 2):
            return [(t, T[(x, y, t)]) for t in range(m) if T.get((x, y, t))], True
        if (di, dj) == (2, 4):
            return ([(0, Q1)], True) if x == y else ([], True)
        if (di, dj) == (4, 2):
            return ([(0, Q1)], True) if x == y else ([], True)
        return [], True

    a = CDGA(space, {}, Product(fn=mul), (Q1,), name=name)
    return pairings_from_volume(a, 6, (Q1,))


def segre_datum():
    """Rank-constrained threefold datum with the b_2 = 16 resolution and ten
    quadric exceptional components (ordinary triple points)."""
    N = 5  # pairs (g_t, x_t) with x_t·x_t = -2 g_t^; ten components total
    deg2 = ["k"] + [f"g{i}" for i in range(10)] + [f"x{t}" for t in range(5)]
    mid = {}
    for i in range(10):
        gi = 1 + i
        mid[(gi, gi, gi)] = 2
    for t in range(5):
        xt = 11 + t
        gt = 1 + t
        mid[(xt, xt, gt)] = -2
    HX = dual_pairing_algebra(deg2, mid, name="H(X~ segre)")
    HD = disjoint_quadrics_algebra(10)

    j = {}
    j[0] = Matrix.from_columns([[Q1] * 10], 10)
    cols2 = [[Q0] * 20]  # k -> 0
    for i in range(10):
        col = [Q0] * 20
        col[2 * i] = -Q1
        col[2 * i + 1] = -Q1
        cols2.append(col)
    for t in range(5):
        col = [Q0] * 20
        col[2 * t] = Q1
        col[2 * t + 1] = -Q1
        cols2.append(col)
    j[2] = Matrix.from_columns(cols2, 20)
    cols4 = [[Q0] * 10]  # k^ -> 0
    for i in range(10):
        col = [Q0] * 10
        col[i] = Q1
        cols4.append(col)
    cols4 += [[Q0] * 10 for _ in range(5)]  # x^ -> 0
    j[4] = Matrix.from_columns(cols4, 10)
    j[6] = Matrix.zero(0, 1)
    gamma = gamma_from_adjoint(HX, HD, j, 3)
    d = OrdinaryDatum(3, HX, HD, j, gamma, sigma_count=10, link_connected=True)
    fails = validate_datum(d)
    if fails:
        raise InvariantViolation(fails)
    return d


def weak_link_datum():
    """Cone over an abelian-like surface: valid datum whose link is not
    (n-2)-connected (negative control for the link lemmas)."""
    from .datum import cone_datum

    t4 = torus_like_algebra()
    # w = α12 + α34 (symplectic class; w·w = 2 vol)
    w = [Q0] * 6
    labels = t4.space.labels[2]
    w[labels.index("α12")] = Q1
    w[labels.index("α34")] = Q1
    d = cone_datum(pairings_from_volume(t4, 4, (Q1,)), w)
    d.link_connected = False
    return d


def qhm_cone_datum():
    """Cone over P^2: j_# is an isomorphism in the critical range, weight
    tables pure at every finite perversity (Q-homology-manifold style)."""
    from .datum import cone_datum

    return cone_datum(projective_plane_algebra(), (Q1,))


def k3_cone_datum():
    from .datum import cone_datum

    return cone_datum(k3_algebra(), (2,) + (0,) * 21)


def blowup_cone_datum():
    from .datum import cone_datum

    return cone_datum(blowup_plane_algebra(), (2,) + (0,) * 21)


# ---------------------------------------------------------------------------
# surface data


def curves_algebra(N, genus_total=0):
    """H of a disjoint union of N smooth rational curves (H^1 = 0)."""
    assert genus_total == 0
    dims = {0: N, 2: N}
    labels = {0: [f"1_{i}" for i in range(N)], 2: [f"pt_{i}" for i in range(N)]}
    space = GradedVectorSpace(dims, labels)

    def mul(i, j, x, y):
        if i == 0:
            return ([(y, Q1)], True) if x == y else ([], True)
        if j == 0:
            return ([(x, Q1)], True) if x == y else ([], True)
        return [], True

    unit = tuple(Q1 for _ in range(N))
    a = CDGA(space, {}, Product(fn=mul), unit, name="H(⊔P1)")
    return pairings_from_volume(a, 2, tuple(Q1 for _ in range(N)))


def surface_hx_algebra(curve_pairing_block, extra_diag):
    """H of a rational surface containing the exceptional curve classes.

    H^2 = span(curve classes g_i) ⊕ span(extra classes); the intersection
    form is block diagonal: the curve block is the exceptional intersection
    matrix, the rest is diagonal."""
    ncurves = curve_pairing_block.nrows
    m = ncurves + len(extra_diag)
    labels = [f"g{i}" for i in range(ncurves)] + [f"e{t}" for t in range(len(extra_diag))]
    rows = []
    for i in range(m):
        row = []
        for j in range(m):
            if i < ncurves and j < ncurves:
                row.append(curve_pairing_block.rows[i][j])
            elif i == j:
                row.append(Fraction(extra_diag[i - ncurves]))
            else:
                row.append(Q0)
        rows.append(row)
    a = surface_algebra(Matrix(rows), labels=labels, name="H(X~ surf)")
    return pairings_from_volume(a, 4, (Q1,))


def cycle_surface_datum(self_intersections, incidences, extra_diag, sigma_count=1):
    """Surface datum whose exceptional divisor is a cycle/configuration of
    rational curves.

    incidences: list of (i, j) with i < j, one per double point; the
    exceptional intersection matrix gets self_intersections on the diagonal
    and #incidences in the off-diagonal entries.
    """
    ncurves = len(self_intersections)
    nz = len(incidences)
    M = [[Q0] * ncurves for _ in range(ncurves)]
    for i, si in enumerate(self_intersections):
        M[i][i] = Fraction(si)
    for i, j in incidences:
        M[i][j] += Q1
        M[j][i] += Q1
    Mmat = Matrix(M)
    HX = surface_hx_algebra(Mmat, extra_diag)
    HD1 = curves_algebra(ncurves)

    j = {}
    j[0] = Matrix.from_columns([[Q1] * ncurves], ncurves)
    # j^2(y) = Σ_i <y, g_i> pt_i
    cols = []
    b2 = HX.dim(2)
    for x in range(b2):
        ex = tuple(Q1 if t == x else Q0 for t in range(b2))
        col = []
        p2 = HX.pairings[2]
        for i in range(ncurves):
            gi = tuple(Q1 if t == i else Q0 for t in range(b2))
            col.append(sum(a * b for a, b in zip(p2.apply(gi), ex)))
        cols.append(col)
    j[2] = Matrix.from_columns(cols, ncurves)
    gamma = gamma_from_adjoint(HX, HD1, j, 2)

    # i1, i2 per incidence; eta from the standard adjoint (identity pairings)
    i1rows, i2rows = [], []
    for (i, jj) in incidences:
        r1 = [Q0] * ncurves
        r1[i] = Q1
        i1rows.append(r1)
        r2 = [Q0] * ncurves
        r2[jj] = Q1
        i2rows.append(r2)
    i1 = Matrix(i1rows, ncurves)
    i2 = Matrix(i2rows, ncurves)
    # η_k^T P_{D,2} = i_k with P_{D,2} the identity block: η_k = i_k^T
    eta1 = i1.transpose()
    eta2 = i2.transpose()
    d = SurfaceDatum(
        HX, HD1, nz, i1, i2, eta1, eta2, j, gamma,
        sigma_count=sigma_count, link_connected=True,
    )
    fails = validate_datum(d)
    if fails:
        raise InvariantViolation(fails)
    return d


def cusp_datum():
    """Cycle of three rational curves over a 15-fold blown-up plane."""
    return cycle_surface_datum(
        self_intersections=(-3, -3, -3),
        incidences=[(0, 1), (1, 2), (0, 2)],
        extra_diag=[1] + [-1] * 11,
        sigma_count=1,
    )


def two_cycle_surface_datum():
    """One singular point, two exceptional curves meeting twice (full-scope
    surface witness fixture)."""
    return cycle_surface_datum(
        self_intersections=(-3, -3),
        incidences=[(0, 1), (0, 1)],
        extra_diag=[1],
        sigma_count=1,
    )
