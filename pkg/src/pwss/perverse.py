"""Perversity poset, truncations, perverse cdgas and the pullback construction.

For isolated singularities of complex dimension n the perversity poset is
{0, 1, ..., 2n-2} with a top element ∞ adjoined; sums saturate at ∞.

A :class:`PerverseCDGA` stores one cdga per cut point together with poset
maps and cross-perversity products. Component products for a perversity p
with p+p ≠ p land in the component at p+p, so they live on the family, not
on the individual cdga; only the 0 and ∞ components are cdgas on their own.

The central constructor is :func:`perverse_pullback`: given f: A -> B it
forms I_p(f) = {(a, ω) ∈ A ⊕ ξ_{≤p}B(t,dt) : f(a) = δ_1(ω)} degreewise,
with the bounded interval model of :mod:`pwss.cdga` and a mandatory
stabilization check between t-bounds N and N+1.
"""

from __future__ import annotations

from fractions import Fraction

from .cdga import CDGA, Cohomology, GradedVectorSpace, Product, evaluate, extend_with_interval
from .errors import (
    DimensionMismatch,
    InvalidPerverseCDGA,
    StabilizationFailure,
)
from .linalg import Matrix, Q0, Q1, Subspace, hstack, kernel

INFINITY = "inf"


class Perversity:
    """A perversity for complex dimension n: an integer 0..2n-2 or ∞."""

    __slots__ = ("n", "p")

    def __init__(self, n, p):
        assert n >= 1
        if p != INFINITY:
            p = int(p)
            if not 0 <= p <= 2 * n - 2:
                raise ValueError(f"perversity {p} outside 0..{2*n-2}")
        self.n = n
        self.p = p

    # distinguished elements
    @staticmethod
    def zero(n):
        return Perversity(n, 0)

    @staticmethod
    def middle(n):
        return Perversity(n, n - 1)

    @staticmethod
    def top(n):
        return Perversity(n, 2 * n - 2)

    @staticmethod
    def infinite(n):
        return Perversity(n, INFINITY)

    @staticmethod
    def parse(text, n):
        text = str(text).strip()
        if text in ("inf", "infinity", "oo"):
            return Perversity.infinite(n)
        named = {"zero": 0, "middle": n - 1, "top": 2 * n - 2}
        if text in named:
            return Perversity(n, named[text])
        return Perversity(n, int(text))

    @property
    def is_infinite(self):
        return self.p == INFINITY

    def __add__(self, other):
        if self.n != other.n:
            raise DimensionMismatch(f"n = {self.n} vs {other.n}")
        if self.is_infinite or other.is_infinite:
            return Perversity.infinite(self.n)
        s = self.p + other.p
        if s > 2 * self.n - 2:
            return Perversity.infinite(self.n)
        return Perversity(self.n, s)

    def __le__(self, other):
        if self.n != other.n:
            raise DimensionMismatch(f"n = {self.n} vs {other.n}")
        if other.is_infinite:
            return True
        if self.is_infinite:
            return False
        return self.p <= other.p

    def __lt__(self, other):
        return self <= other and self != other

    def __eq__(self, other):
        return (
            isinstance(other, Perversity) and self.n == other.n and self.p == other.p
        )

    def __hash__(self):
        return hash((self.n, self.p))

    def __repr__(self):
        return "inf" if self.is_infinite else str(self.p)

    def sort_key(self):
        return (1, 0) if self.is_infinite else (0, self.p)


def perversity_sum(p, q):
    """Saturating sum of perversities (same n required)."""
    return p + q


def all_perversities(n):
    """Every cut point: finite 0..2n-2 plus ∞, in poset order."""
    return [Perversity(n, p) for p in range(2 * n - 1)] + [Perversity.infinite(n)]


# ---------------------------------------------------------------------------
# truncation ξ_{≤p}


class Truncation:
    """The subcomplex ξ_{≤p}B(t,dt) of a bounded extension.

    Degree k is: everything for k < p; kernel-of-d constants in t plus
    t-multiples plus all dt-terms for k = p; t-multiples plus dt-terms for
    k > p. Products are perversity-graded (ξ_p·ξ_q ⊆ ξ_{p+q}), so they are
    family-level data, not part of this object.
    """

    def __init__(self, ext, perversity):
        self.ext = ext
        self.perversity = perversity
        self.bases = {}
        for k in ext.degrees():
            self.bases[k] = self._degree_basis(k)

    def _degree_basis(self, k):
        ext = self.ext
        p = self.perversity
        dim = ext.dim(k)
        if p.is_infinite or k < p.p:
            return Subspace.full(dim)
        vecs = []
        t0_positions = []
        for pos in range(dim):
            idx, texp, is_dt = ext.decompose(k, pos)
            if is_dt or texp >= 1:
                v = [Q0] * dim
                v[pos] = Q1
                vecs.append(tuple(v))
            elif k == p.p:
                t0_positions.append((pos, idx))
        if k == p.p and t0_positions:
            base = ext.base
            ker = kernel(base.diff(k))
            for kv in ker.vectors():
                v = [Q0] * dim
                for pos, idx in t0_positions:
                    v[pos] = kv[idx]
                vecs.append(tuple(v))
        return Subspace.from_spanning(vecs, dim)

    def subspace(self, k):
        return self.bases.get(k, Subspace.zero(self.ext.dim(k)))

    def closed_under_d(self):
        for k in self.ext.degrees():
            sub = self.subspace(k)
            tgt = self.subspace(k + 1)
            for v in sub.vectors():
                if not tgt.contains_vector(self.ext.d_apply(k, v)):
                    return False
        return True

    def contains(self, other):
        """ξ_{≤q} ⊆ ξ_{≤p} for q ≤ p (per-degree containment)."""
        return all(
            self.subspace(k).contains(other.subspace(k)) for k in self.ext.degrees()
        )


def truncate(ext, perversity):
    return Truncation(ext, perversity)


def truncation_product_contained(tr_p, tr_q, tr_pq):
    """ξ_p · ξ_q ⊆ ξ_{p+q}, checked on basis pairs of the stored bases."""
    ext = tr_p.ext
    for i in ext.degrees():
        for j in ext.degrees():
            if not ext.dim(i + j):
                continue
            tgt = tr_pq.subspace(i + j)
            for va in tr_p.subspace(i).vectors():
                for vb in tr_q.subspace(j).vectors():
                    prod, exact = ext.mul_vec(i, va, j, vb)
                    if exact and any(prod) and not tgt.contains_vector(prod):
                        return False
    return True


# ---------------------------------------------------------------------------
# perverse cdga


class PerverseCDGA:
    """Perversity-indexed family of complexes with poset maps and products.

    components: dict Perversity -> CDGA, stored at cut points; lookup
    resolves arbitrary perversities to the component at the largest cut
    point below them. products[(pk, qk)](i, j, a, b) returns structure
    constants in the component at pk+qk (saturating).
    """

    def __init__(self, n, components, poset_maps, products, name="I"):
        self.n = n
        self.components = dict(components)
        self.cuts = sorted(self.components, key=Perversity.sort_key)
        self._poset = poset_maps  # dict (q, p) adjacent cuts -> {k: Matrix}
        self.products = products  # dict (p, q) -> closure
        self.name = name
        self._cut_cache = {}

    def cut_for(self, p):
        cached = self._cut_cache.get(p)
        if cached is not None:
            return cached
        best = None
        for c in self.cuts:
            if c <= p:
                best = c
        if best is None:
            raise InvalidPerverseCDGA(f"no component at or below {p}")
        self._cut_cache[p] = best
        return best

    def component(self, p):
        return self.components[self.cut_for(p)]

    def poset_map(self, q, p):
        """Per-degree matrices of the map component(q) -> component(p)."""
        cq, cp = self.cut_for(q), self.cut_for(p)
        if not cq <= cp:
            raise InvalidPerverseCDGA(f"poset map needs {q} <= {p}")
        chain = [c for c in self.cuts if cq <= c <= cp]
        maps = None
        for lo, hi in zip(chain, chain[1:]):
            step = self._poset[(lo, hi)]
            if maps is None:
                maps = dict(step)
            else:
                maps = {
                    k: step.get(k, self._zero_step(lo, hi, k)) @ m
                    for k, m in maps.items()
                }
        if maps is None:
            src = self.components[cq]
            maps = {k: Matrix.identity(src.dim(k)) for k in src.degrees()}
        return maps

    def _zero_step(self, lo, hi, k):
        return Matrix.zero(self.components[hi].dim(k), self.components[lo].dim(k))

    def mul(self, p, q, i, j, a, b):
        """Structure constants of component(p)^i x component(q)^j."""
        cp, cq = self.cut_for(p), self.cut_for(q)
        return self.products[(cp, cq)](i, j, a, b)

    def mul_vec(self, p, q, i, va, j, vb):
        cp, cq = self.cut_for(p), self.cut_for(q)
        target = self.component(cp + cq)
        acc = {}
        exact = True
        supp_b = [(b, cb) for b, cb in enumerate(vb) if cb]
        for a, ca in enumerate(va):
            if not ca:
                continue
            for b, cb in supp_b:
                sparse, ok = self.products[(cp, cq)](i, j, a, b)
                exact = exact and ok
                for idx, c in sparse:
                    acc[idx] = acc.get(idx, Q0) + ca * cb * c
        out = [Q0] * target.dim(i + j)
        for idx, c in acc.items():
            out[idx] = c
        return tuple(out), exact

    # -- validation ------------------------------------------------------

    def validate(self, full=True):
        """Def 2.4 compatibility: poset chain maps, product/poset squares,
        cross-perversity Leibniz and commutativity on basis pairs."""
        failures = []
        for lo, hi in zip(self.cuts, self.cuts[1:]):
            src, tgt = self.components[lo], self.components[hi]
            step = self._poset[(lo, hi)]
            for k in src.degrees():
                m = step.get(k, Matrix.zero(tgt.dim(k), src.dim(k)))
                mk1 = step.get(k + 1, Matrix.zero(tgt.dim(k + 1), src.dim(k + 1)))
                if mk1 @ src.diff(k) != tgt.diff(k) @ m:
                    failures.append(f"poset map not chain at cut {lo}->{hi} deg {k}")
        if full:
            self._validate_products(failures)
        if failures:
            raise InvalidPerverseCDGA("; ".join(failures[:6]))
        return True

    def _validate_products(self, failures):
        # commutativity is checked inside each pair, so ordered pairs suffice
        for cp in self.cuts:
            for cq in self.cuts:
                if cq.sort_key() < cp.sort_key():
                    continue
                self._check_pair(cp, cq, failures)

    def _check_pair(self, cp, cq, failures):
        A, B = self.components[cp], self.components[cq]
        target_cut = self.cut_for(cp + cq)
        C = self.components[target_cut]
        mulf = self.products[(cp, cq)]
        mulr = self.products[(cq, cp)]
        for i in A.degrees():
            for j in B.degrees():
                if not C.dim(i + j):
                    continue
                sign = Fraction((-1) ** (i * j))
                for a in range(A.dim(i)):
                    for b in range(B.dim(j)):
                        ab, ex1 = mulf(i, j, a, b)
                        ba, ex2 = mulr(j, i, b, a)
                        if ex1 and ex2:
                            lhs = dict(ab)
                            rhs = {t: sign * c for t, c in ba}
                            if {t: c for t, c in lhs.items() if c} != {
                                t: c for t, c in rhs.items() if c
                            }:
                                failures.append(
                                    f"cross commutativity ({cp},{cq}) deg ({i},{j})"
                                )
                                return
                        if not self._cross_leibniz(cp, cq, i, j, a, b):
                            failures.append(
                                f"cross Leibniz ({cp},{cq}) deg ({i},{j})"
                            )
                            return
        # product vs poset square: step up in the first argument and compare
        # inside the component at (up + cq), mapping the direct product there.
        up = next((c for c in self.cuts if cp < c), None)
        if up is not None:
            target2 = self.cut_for(up + cq)
            lift = self.poset_map(target_cut, target2)
            C2 = self.components[target2]
            step = self.poset_map(cp, up)
            mul_up = self.products[(up, cq)]
            for i in A.degrees():
                for j in B.degrees():
                    if not C2.dim(i + j):
                        continue
                    m = step.get(i, Matrix.zero(self.components[up].dim(i), A.dim(i)))
                    lm = lift.get(
                        i + j, Matrix.zero(C2.dim(i + j), C.dim(i + j))
                    )
                    for a in range(A.dim(i)):
                        img = m.sparse_col(a)
                        for b in range(B.dim(j)):
                            direct, ex1 = mulf(i, j, a, b)
                            lhs = {}
                            for idx, c in direct:
                                for t, v in lm.sparse_col(idx):
                                    lhs[t] = lhs.get(t, Q0) + c * v
                            acc = {}
                            exact = ex1
                            for t, v in img:
                                sp, ok = mul_up(i, j, t, b)
                                exact = exact and ok
                                for idx, c in sp:
                                    acc[idx] = acc.get(idx, Q0) + v * c
                            if exact:
                                if {t: c for t, c in lhs.items() if c} != {
                                    t: c for t, c in acc.items() if c
                                }:
                                    failures.append(
                                        f"product/poset square ({cp}->{up},{cq}) deg ({i},{j})"
                                    )
                                    return

    def _cross_leibniz(self, cp, cq, i, j, a, b):
        A, B = self.components[cp], self.components[cq]
        C = self.component(cp + cq)
        mulf = self.products[(cp, cq)]
        ab, ex = mulf(i, j, a, b)
        if not ex:
            return True
        acc = {}
        dC = C.diff(i + j)
        for idx, c in ab:
            for t, v in dC.sparse_col(idx):
                acc[t] = acc.get(t, Q0) + c * v
        if i in A.d:
            for t, v in A.d[i].sparse_col(a):
                sp, ok = mulf(i + 1, j, t, b)
                if not ok:
                    return True
                for idx, c in sp:
                    acc[idx] = acc.get(idx, Q0) - v * c
        if j in B.d:
            sign = Fraction((-1) ** i)
            for t, v in B.d[j].sparse_col(b):
                sp, ok = mulf(i, j + 1, a, t)
                if not ok:
                    return True
                for idx, c in sp:
                    acc[idx] = acc.get(idx, Q0) - sign * v * c
        return not any(acc.values())

    # -- cohomology --------------------------------------------------------

    def cohomology(self, name=None):
        """Perverse graded algebra: componentwise cohomology with induced
        poset maps and cross-perversity products."""
        cohs = {c: cached_cohomology(self.components[c]) for c in self.cuts}
        comps = {c: cohs[c].algebra for c in self.cuts}
        poset = {}
        for lo, hi in zip(self.cuts, self.cuts[1:]):
            step = self._poset[(lo, hi)]
            maps = {}
            for k in comps[lo].degrees():
                cols = []
                m = step.get(
                    k,
                    Matrix.zero(
                        self.components[hi].dim(k), self.components[lo].dim(k)
                    ),
                )
                for x in range(comps[lo].dim(k)):
                    rep = cohs[lo].quotients[k].reps[x]
                    img = m.apply(rep)
                    cols.append(list(cohs[hi].project(k, img)))
                maps[k] = Matrix.from_columns(cols, comps[hi].dim(k))
            poset[(lo, hi)] = maps

        products = {}
        for cp in self.cuts:
            for cq in self.cuts:
                products[(cp, cq)] = self._induced_product(cohs, cp, cq)
        return PerverseCDGA(self.n, comps, poset, products, name=name or f"H({self.name})")

    @staticmethod
    def _unit_coords(dim, idx):
        return tuple(Q1 if t == idx else Q0 for t in range(dim))

    def _induced_product(self, cohs, cp, cq):
        target = self.cut_for(cp + cq)

        def mul(i, j, a, b):
            if (i not in cohs[cp].quotients) or (j not in cohs[cq].quotients):
                return [], True
            ra = cohs[cp].quotients[i].reps[a]
            rb = cohs[cq].quotients[j].reps[b]
            prod, exact = self.mul_vec(cp, cq, i, ra, j, rb)
            if not exact:
                return [], False
            if (i + j) not in cohs[target].quotients:
                return [], True
            coords = cohs[target].quotients[i + j].project(prod, check=False)
            return [(t, c) for t, c in enumerate(coords) if c], True

        return Product(fn=mul).mul

    def dims_table(self):
        """dict cut -> dict degree -> dim (of the component complexes)."""
        return {
            c: {k: self.components[c].dim(k) for k in self.components[c].degrees()}
            for c in self.cuts
        }


# ---------------------------------------------------------------------------
# perverse morphisms and quasi-isomorphisms


class PerverseMorphism:
    """Cut-indexed family of chain maps compatible with poset structure."""

    def __init__(self, source, target, maps, name="phi"):
        self.source = source
        self.target = target
        self.maps = maps  # dict cut-of-target -> {k: Matrix}
        self.name = name

    def map(self, p, k):
        cut = self.target.cut_for(p)
        entry = self.maps[cut].get(k)
        if entry is None:
            src = self.source.component(p)
            tgt = self.target.component(p)
            entry = Matrix.zero(tgt.dim(k), src.dim(k))
            self.maps[cut][k] = entry
        return entry

    def commutes_with_d(self):
        for cut in self.maps:
            src = self.source.component(cut)
            tgt = self.target.component(cut)
            for k in src.degrees():
                if self.map(cut, k + 1) @ src.diff(k) != tgt.diff(k) @ self.map(cut, k):
                    return False, (cut, k)
        return True, None


class QuasiIsoReport:
    """Per (perversity, degree) induced-map outcome."""

    def __init__(self, rows):
        self.rows = rows  # list of (cut, k, dim_src, dim_tgt, iso)

    @property
    def ok(self):
        return all(r[4] for r in self.rows)

    def failing_cells(self):
        return [(c, k) for c, k, _, _, iso in self.rows if not iso]

    def __str__(self):
        if self.ok:
            return "quasi-isomorphism in every perversity and degree"
        cells = ", ".join(f"(p={c}, k={k})" for c, k in self.failing_cells()[:6])
        return f"not a quasi-isomorphism at {cells}"


_coh_cache = {}


def cached_cohomology(cdga):
    """Cohomology of a cdga, computed once per object."""
    key = id(cdga)
    hit = _coh_cache.get(key)
    if hit is not None and hit[0] is cdga:
        return hit[1]
    coh = Cohomology(cdga)
    _coh_cache[key] = (cdga, coh)
    return coh


def is_quasi_isomorphism(phi):
    """True iff phi induces isomorphisms on cohomology in every cut/degree."""
    rows = []
    for cut in phi.target.cuts:
        src = phi.source.component(cut)
        tgt = phi.target.component(cut)
        hs, ht = cached_cohomology(src), cached_cohomology(tgt)
        degrees = sorted(set(hs.dims()) | set(ht.dims()))
        for k in degrees:
            ds, dt = hs.dims().get(k, 0), ht.dims().get(k, 0)
            if ds != dt:
                rows.append((cut, k, ds, dt, False))
                continue
            if ds == 0:
                rows.append((cut, k, 0, 0, True))
                continue
            cols = []
            for x in range(ds):
                rep = hs.rep(k, PerverseCDGA._unit_coords(ds, x))
                img = phi.map(cut, k).apply(rep)
                cols.append(list(ht.project(k, img)))
            induced = Matrix.from_columns(cols, dt)
            rows.append((cut, k, ds, dt, induced.rank() == ds))
    return QuasiIsoReport(rows)


# ---------------------------------------------------------------------------
# the pullback construction


def perverse_pullback(f, n, t_bound=4, check_stability=True, name=None):
    """The perverse cdga I_•(f) of a cdga morphism f: A -> B.

    Components are computed at every finite perversity and at ∞ with the
    bounded interval model at ``t_bound``; when ``check_stability`` is on,
    cohomology dims are compared against ``t_bound + 1`` and a mismatch
    raises StabilizationFailure.
    """
    fam = _pullback_family(f, n, t_bound, name=name)
    if check_stability:
        other = _pullback_family(f, n, t_bound + 1, name=name)
        for cut in fam.cuts:
            a = Cohomology(fam.components[cut]).dims()
            b = Cohomology(other.components[cut]).dims()
            if a != b:
                raise StabilizationFailure(
                    f"cohomology dims differ between t-bounds {t_bound} and "
                    f"{t_bound + 1} at perversity {cut}: {a} vs {b}"
                )
    return fam


def _pullback_family(f, n, N, name=None):
    A, B = f.source, f.target
    ext = extend_with_interval(B, N)
    delta1 = evaluate(ext, 1)
    cuts = all_perversities(n)
    truncs = {c: Truncation(ext, c) for c in cuts}

    degrees = sorted(set(A.degrees()) | set(ext.degrees()) | {0})
    comp_data = {}
    for c in cuts:
        comp_data[c] = _pullback_component(f, ext, delta1, truncs[c], degrees)

    components = {c: comp_data[c][0] for c in cuts}
    embeddings = {c: comp_data[c][1] for c in cuts}  # {k: (A-part, ext-part)}

    poset = {}
    for lo, hi in zip(cuts, cuts[1:]):
        maps = {}
        for k in components[lo].degrees():
            lo_emb = embeddings[lo][k]
            hi_emb = embeddings[hi][k]
            cols = []
            for x in range(components[lo].dim(k)):
                vec = lo_emb.col(x)
                coords = _solve_in(hi_emb, vec)
                if coords is None:
                    raise InvalidPerverseCDGA(
                        f"truncation inclusion fails at {lo}<={hi}, degree {k}"
                    )
                cols.append(list(coords))
            maps[k] = Matrix.from_columns(cols, components[hi].dim(k))
        poset[(lo, hi)] = maps

    fam = [None]

    def make_product(cp, cq):
        def mul(i, j, a, b):
            target = fam[0].cut_for(cp + cq)
            emb_p, emb_q = embeddings[cp].get(i), embeddings[cq].get(j)
            if emb_p is None or emb_q is None:
                return [], True
            na = A.dim(i)
            va = emb_p.col(a)
            vb = emb_q.col(b)
            pa, ea = va[:na], va[na:]
            pb, eb = vb[: A.dim(j)], vb[A.dim(j) :]
            a_prod, a_ex = A.mul_vec(i, pa, j, pb)
            e_prod, e_ex = ext.mul_vec(i, ea, j, eb)
            exact = a_ex and e_ex
            full = tuple(a_prod) + tuple(e_prod)
            emb_t = embeddings[target].get(i + j)
            if emb_t is None:
                if exact and any(full):
                    raise InvalidPerverseCDGA(
                        f"pullback product escapes at ({cp},{cq}), degree {i + j}"
                    )
                return [], exact
            coords = _solve_in(emb_t, full)
            if coords is None:
                if exact:
                    raise InvalidPerverseCDGA(
                        f"pullback product not in I_{target} at ({cp},{cq}), "
                        f"degrees ({i},{j})"
                    )
                return [], False
            return [(t, c) for t, c in enumerate(coords) if c], exact

        return Product(fn=mul).mul

    products = {(cp, cq): make_product(cp, cq) for cp in cuts for cq in cuts}
    for c in (cuts[0], cuts[-1]):
        components[c].product = Product(fn=products[(c, c)])
    fam[0] = PerverseCDGA(n, components, poset, products, name=name or "I(f)")
    return fam[0]


def _solve_in(emb, vec):
    """Coordinates of vec in the embedding's column span (cached rref)."""
    return emb_solver(emb)(vec)


_solver_cache = {}


def emb_solver(emb):
    key = id(emb)
    cached = _solver_cache.get(key)
    if cached is not None and cached[0] is emb:
        return cached[1]
    n, r = emb.nrows, emb.ncols
    if r == 0:
        def trivial(vec):
            return () if not any(vec) else None
        _solver_cache[key] = (emb, trivial)
        return trivial
    aug = hstack(emb, Matrix.identity(n))
    red, pivots, rank = aug.rref()
    assert all(p < r for p in pivots[:r]) and len([p for p in pivots if p < r]) == r
    left = Matrix([row[r:] for row in red.rows[:r]], n)
    check = Matrix([row[r:] for row in red.rows[r : rank]], n)

    def solver(vec):
        vec = tuple(vec)
        if check.nrows and any(check.apply(vec)):
            return None
        return left.apply(vec)

    _solver_cache[key] = (emb, solver)
    return solver


def _pullback_component(f, ext, delta1, trunc, degrees):
    """One I_p: kernel of (a, s) -> f(a) - δ1(S s) with S the ξ-basis."""
    A, B = f.source, f.target
    dims, labels, weights = {}, {}, {}
    has_w = A.space.weights is not None and B.space.weights is not None
    embeddings = {}
    basis_vectors = {}
    for k in degrees:
        na, nb = A.dim(k), B.dim(k)
        S = trunc.subspace(k)
        ns = S.dim
        if na + ns == 0:
            continue
        # constraint matrix [f | -δ1·S]
        d1S = (delta1.map(k) @ S.basis) if ns else Matrix.zero(nb, 0)
        fm = f.map(k)
        constraint = hstack(fm, -d1S) if (na or ns) else Matrix.zero(nb, 0)
        ker = kernel(constraint)
        if ker.dim == 0:
            continue
        cols = []
        for v in ker.vectors():
            apart = v[:na]
            scoords = v[na:]
            epart = S.basis.apply(scoords) if ns else ()
            cols.append(list(apart) + list(epart))
        emb = Matrix.from_columns(cols, na + ext.dim(k))
        embeddings[k] = emb
        basis_vectors[k] = cols
        dims[k] = ker.dim
        labels[k] = [f"ip{k}_{i}" for i in range(ker.dim)]
        if has_w:
            ws = []
            for v in cols:
                s_vals = set()
                for idx, c in enumerate(v[:na]):
                    if c:
                        s_vals.add(A.weight(k, idx))
                for idx, c in enumerate(v[na:]):
                    if c:
                        s_vals.add(ext.weight(k, idx))
                assert len(s_vals) == 1, f"pullback basis not weight pure at {k}"
                ws.append(s_vals.pop())
            weights[k] = ws

    space = GradedVectorSpace(dims, labels, weights if has_w else None)
    diffs = {}
    for k in dims:
        if (k + 1) not in dims:
            for x in range(dims[k]):
                vec = embeddings[k].col(x)
                na = A.dim(k)
                da = A.d_apply(k, vec[:na])
                de = ext.d_apply(k, vec[na:])
                if any(da) or any(de):
                    raise InvalidPerverseCDGA(f"pullback not closed under d at {k}")
            continue
        cols = []
        solver = emb_solver(embeddings[k + 1])
        na = A.dim(k)
        for x in range(dims[k]):
            vec = embeddings[k].col(x)
            da = A.d_apply(k, vec[:na])
            de = ext.d_apply(k, vec[na:])
            coords = solver(tuple(da) + tuple(de))
            if coords is None:
                raise InvalidPerverseCDGA(f"pullback not closed under d at degree {k}")
            cols.append(list(coords))
        diffs[k] = Matrix.from_columns(cols, dims[k + 1])

    unit = ()
    if 0 in dims:
        na = A.dim(0)
        uvec = tuple(A.unit) + tuple(ext.include_base_vec(0, B.unit))
        coords = emb_solver(embeddings[0])(uvec)
        if coords is None:
            raise InvalidPerverseCDGA("unit not in the pullback")
        unit = coords
    comp = CDGA(space, diffs, Product(), unit, name=f"I_{trunc.perversity}")
    return comp, embeddings


def perverse_cohomology(P, name=None):
    """Cohomology of a perverse cdga as a perverse graded algebra."""
    return P.cohomology(name=name)
