"""Explicit formality witnesses M_• with IE1 <- M -> IE2 quasi-isomorphisms.

The witness is a perverse sub-cdga of the closed-form perverse weight page,
assembled from the datum's kernels and deterministic complements:

* diagonal generators (x, f(x)·t^α) realize the cohomology of X̃ and D;
* (t-1)- and dt-shifted generators realize the dualized kernel summands;
* products of two (t-1)-shifted middle generators leave the displayed
  cells, so the exact pairs span(V·V)⊗{t²/2-t, (t-1)dt} are adjoined
  (with a j-preimage on the first leg so the pullback condition holds);
  they are invisible in cohomology and ψ sends them to the class of the
  corrected diagonal, which is what multiplicativity of ψ forces.

ψ sends every d-closed generator to its own cohomology class; non-closed
generators go to the class of their deterministic projection (onto the
relevant Gysin kernel along a recorded complement) or to zero. Everything
is verified exhaustively afterwards: chain conditions, quasi-isomorphisms
per perversity and degree, poset compatibility, and multiplicativity of ψ
on all basis pairs within scope (finite perversities for GM; all of them
when the datum has a single singular point).
"""

from __future__ import annotations

import json
from fractions import Fraction

from .cdga import Cohomology
from .datum import check_link_lemmas
from .errors import (
    InvalidPerverseCDGA,
    LemmaPreconditionFailed,
    WitnessVerificationFailed,
)
from .linalg import (
    Matrix,
    Q0,
    Q1,
    Subspace,
    complement,
    image,
    kernel,
    solve,
)
from .pages import cell_vector
from .perverse import (
    PerverseMorphism,
    Perversity,
    emb_solver,
    is_quasi_isomorphism,
)
from .weights import SpanFamily, ie1_closed_family

GM = "GM"
FULL = "full"


def _basis(n, i):
    return tuple(Q1 if t == i else Q0 for t in range(n))


class FormalityWitness:
    """Model M_•, quasi-isomorphisms φ: M -> IE1 and ψ: M -> IE2, the record
    of every complement chosen, and the verification transcript."""

    def __init__(self, datum, model, ie1, ie2_fam, phi, psi, complements, scope):
        self.datum = datum
        self.model = model
        self.ie1 = ie1
        self.ie2 = ie2_fam
        self.phi = phi
        self.psi = psi
        self.complements = complements
        self.scope = scope
        self.transcript = []

    def verify(self):
        import time as _time

        started = _time.monotonic()
        t = self.transcript = []
        ok, where = self.phi.commutes_with_d()
        if not ok:
            raise WitnessVerificationFailed(f"phi not a chain map at {where}")
        ok, where = self.psi.commutes_with_d()
        if not ok:
            raise WitnessVerificationFailed(f"psi not a chain map at {where}")
        t.append("phi, psi commute with differentials")
        self._check_poset_compat(self.phi, "phi")
        self._check_poset_compat(self.psi, "psi")
        t.append("phi, psi commute with poset maps")
        rep = is_quasi_isomorphism(self.phi)
        if not rep.ok:
            raise WitnessVerificationFailed(
                f"phi not a quasi-isomorphism at {rep.failing_cells()[:4]}"
            )
        t.append(f"phi quasi-isomorphism ({len(rep.rows)} cells)")
        rep = is_quasi_isomorphism(self.psi)
        if not rep.ok:
            raise WitnessVerificationFailed(
                f"psi not a quasi-isomorphism at {rep.failing_cells()[:4]}"
            )
        t.append(f"psi quasi-isomorphism ({len(rep.rows)} cells)")
        pairs = self._psi_multiplicative()
        t.append(
            f"psi multiplicative on {pairs} basis pairs "
            f"({'all perversities' if self.scope == FULL else 'finite perversities'})"
        )
        self.verify_seconds = _time.monotonic() - started
        return self

    def _check_poset_compat(self, morph, name):
        M, T = morph.source, morph.target
        for lo, hi in zip(T.cuts, T.cuts[1:]):
            mlo, mhi = M.cut_for(lo), M.cut_for(hi)
            step_m = M.poset_map(mlo, mhi)
            step_t = T.poset_map(lo, hi)
            src = M.component(lo)
            for k in src.degrees():
                a = morph.map(hi, k) @ step_m.get(
                    k, Matrix.zero(M.component(hi).dim(k), src.dim(k))
                )
                b = step_t.get(
                    k, Matrix.zero(T.component(hi).dim(k), T.component(lo).dim(k))
                ) @ morph.map(lo, k)
                if a != b:
                    raise WitnessVerificationFailed(
                        f"{name} poset square fails at {lo}<={hi}, degree {k}"
                    )

    def _psi_multiplicative(self):
        """Check ψ(x·y) = ψ(x)·ψ(y) on ordered basis pairs.

        Both products are graded commutative (the model multiplies inside a
        validated ambient cdga, the target is its cohomology), so a pair
        and its Koszul flip verify together; only cp <= cq and, on the
        diagonal, i <= j with a <= b are checked."""
        M, H = self.model, self.ie2
        checked = 0
        for cp in M.cuts:
            for cq in M.cuts:
                if cq.sort_key() < cp.sort_key():
                    continue
                target = cp + cq
                if self.scope == GM and target.is_infinite:
                    continue
                A, B = M.component(cp), M.component(cq)
                hp, hq = H.cut_for(cp), H.cut_for(cq)
                hmul = H.products[(hp, hq)]
                Ht = H.component(target)
                same_cut = cp == cq
                for i in A.degrees():
                    psi_i = self.psi.map(cp, i)
                    Hi = H.component(cp).dim(i)
                    for j in B.degrees():
                        if same_cut and j < i:
                            continue
                        psi_j = self.psi.map(cq, j)
                        psi_t = self.psi.map(target, i + j)
                        tdim = M.component(target).dim(i + j)
                        hdim = Ht.dim(i + j)
                        Hj = H.component(cq).dim(j)
                        # fetch the cohomology structure constants once
                        K = {}
                        for ha in range(Hi):
                            for hb in range(Hj):
                                sp, ex = hmul(i, j, ha, hb)
                                if not ex:
                                    raise WitnessVerificationFailed(
                                        f"IE2 product truncated at ({cp},{cq})"
                                    )
                                if sp:
                                    K[(ha, hb)] = sp
                        same_degree = same_cut and i == j
                        for a in range(A.dim(i)):
                            fa = psi_i.col(a)
                            supp_a = [(ha, c) for ha, c in enumerate(fa) if c]
                            # N_a[hb] = ψ(a)·e_hb in H-target coordinates
                            Na = {}
                            for ha, ca in supp_a:
                                for hb in range(Hj):
                                    sp = K.get((ha, hb))
                                    if sp:
                                        col = Na.setdefault(hb, [Q0] * hdim)
                                        for t, c in sp:
                                            col[t] += ca * c
                            for bb in range(a if same_degree else 0, B.dim(j)):
                                try:
                                    mab, exact = M.mul(cp, cq, i, j, a, bb)
                                except InvalidPerverseCDGA as exc:
                                    raise WitnessVerificationFailed(
                                        f"model not product closed: {exc}"
                                    ) from exc
                                if not exact:
                                    raise WitnessVerificationFailed(
                                        f"model product truncated at ({cp},{cq}) "
                                        f"degrees ({i},{j}); raise t_bound"
                                    )
                                fb = psi_j.col(bb)
                                rhs = [Q0] * hdim
                                if Na:
                                    for hb, cb in enumerate(fb):
                                        if cb:
                                            col = Na.get(hb)
                                            if col:
                                                for t in range(hdim):
                                                    if col[t]:
                                                        rhs[t] += cb * col[t]
                                if not mab:
                                    if any(rhs):
                                        raise WitnessVerificationFailed(
                                            f"psi not multiplicative at ({cp},{cq}),"
                                            f" degrees ({i},{j}), pair ({a},{bb})"
                                        )
                                    checked += 1
                                    continue
                                tvec = [Q0] * tdim
                                for tdx, c in mab:
                                    tvec[tdx] = c
                                lhs = psi_t.apply(tuple(tvec))
                                if list(lhs) != rhs:
                                    raise WitnessVerificationFailed(
                                        f"psi not multiplicative at ({cp},{cq}), "
                                        f"degrees ({i},{j}), pair ({a},{bb})"
                                    )
                                checked += 1
        return checked

    def to_json(self):
        def ser_maps(morph):
            out = {}
            for cut in morph.target.cuts:
                src = morph.source.component(cut)
                out[repr(cut)] = {
                    str(k): [[_ser(v) for v in row] for row in morph.map(cut, k).rows]
                    for k in src.degrees()
                }
            return out

        return {
            "scope": self.scope,
            "complements": {
                name: [[_ser(v) for v in vec] for vec in vecs]
                for name, vecs in self.complements.items()
            },
            "phi": ser_maps(self.phi),
            "psi": ser_maps(self.psi),
            "transcript": self.transcript,
        }

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)


def _ser(v):
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


# ---------------------------------------------------------------------------
# shared machinery


class _WitnessBuilder:
    def __init__(self, d, t_bound):
        self.d = d
        self.fam = ie1_closed_family(d, t_bound=t_bound)
        self.amb = self.fam.ambient
        self.f = self.fam.morphism
        self.ext = self.fam.extension
        self.reg = self.f.source
        self.link = self.ext.base
        self.complements = {}
        self.gens = {}       # M-cut -> degree -> list[(label, ambient vec)]
        self.psi_spec = {}   # (M-cut, degree, index) -> spec

    # -- ambient vector constructors -------------------------------------

    def diag(self, k, page_vec, texp=0):
        """(x, f(x)·t^texp) in ambient degree-k coordinates."""
        na = self.reg.dim(k)
        out = [Q0] * self.amb.dim(k)
        for i, c in enumerate(page_vec):
            out[i] = c
        fx = self.f.map(k).apply(page_vec)
        for i, c in enumerate(fx):
            if c:
                out[na + self.ext.monomial(k, i, texp)] = c
        return tuple(out)

    def ext_poly(self, k, link_vec, coeffs):
        """(0, Σ c_i · link_vec ⊗ t^i) with coeffs = [(texp, c), ...]."""
        na = self.reg.dim(k)
        out = [Q0] * self.amb.dim(k)
        for texp, c in coeffs:
            if not c:
                continue
            for i, v in enumerate(link_vec):
                if v:
                    out[na + self.ext.monomial(k, i, texp)] += c * v
        return tuple(out)

    def ext_poly_dt(self, k, link_vec, coeffs):
        """(0, Σ c_i · link_vec ⊗ t^i dt), link_vec in link degree k-1."""
        na = self.reg.dim(k)
        out = [Q0] * self.amb.dim(k)
        for texp, c in coeffs:
            if not c:
                continue
            for i, v in enumerate(link_vec):
                if v:
                    out[na + self.ext.monomial(k, i, texp, True)] += c * v
        return tuple(out)

    def dt_mon(self, k, link_vec):
        return self.ext_poly_dt(k, link_vec, [(0, Q1)])

    def add(self, cut, k, label, vec, psi=("project",)):
        lst = self.gens.setdefault(cut, {}).setdefault(k, [])
        self.psi_spec[(cut, k, len(lst))] = psi
        lst.append((label, vec))

    def record(self, name, subspace_or_vectors):
        vecs = (
            list(subspace_or_vectors.vectors())
            if isinstance(subspace_or_vectors, Subspace)
            else [tuple(v) for v in subspace_or_vectors]
        )
        self.complements[name] = vecs
        return vecs

    # -- assembly ----------------------------------------------------------

    def finish(self, scope):
        try:
            span = SpanFamily(self.d.n, self.amb, self.gens, name="M")
        except (InvalidPerverseCDGA, AssertionError) as exc:
            raise WitnessVerificationFailed(f"model span invalid: {exc}") from exc
        M = span.family
        phi_maps = {}
        for cut in self.fam.cuts:
            mcut = M.cut_for(cut)
            comp = M.component(cut)
            maps = {}
            for k in comp.degrees():
                cols = []
                for x in range(comp.dim(k)):
                    vec = span.embeddings[mcut][k].col(x)
                    cols.append(list(self._ie1_coords(cut, k, vec)))
                maps[k] = Matrix.from_columns(cols, self.fam.component(cut).dim(k))
            phi_maps[cut] = maps
        phi = PerverseMorphism(M, self.fam, phi_maps, name="phi")

        from .perverse import cached_cohomology

        self._cohs = {
            c: cached_cohomology(self.fam.components[c]) for c in self.fam.cuts
        }
        ie2 = self.fam.cohomology(name="IE2")
        psi_maps = {}
        for cut in self.fam.cuts:
            mcut = M.cut_for(cut)
            comp = M.component(cut)
            maps = {}
            for k in comp.degrees():
                cols = [
                    list(self._psi_image(cut, mcut, k, x, span))
                    for x in range(comp.dim(k))
                ]
                maps[k] = Matrix.from_columns(cols, ie2.component(cut).dim(k))
            psi_maps[cut] = maps
        psi = PerverseMorphism(M, ie2, psi_maps, name="psi")

        witness = FormalityWitness(
            self.d, M, self.fam, ie2, phi, psi, self.complements, scope
        )
        return witness.verify()

    def _ie1_coords(self, cut, k, amb_vec):
        emb = self.fam.embeddings[cut].get(k)
        if emb is None:
            if any(amb_vec):
                raise WitnessVerificationFailed(
                    f"model not inside IE1 at {cut}, degree {k}"
                )
            return ()
        coords = emb_solver(emb)(amb_vec)
        if coords is None:
            raise WitnessVerificationFailed(
                f"model not inside IE1 at {cut}, degree {k}"
            )
        return coords

    def _psi_image(self, cut, mcut, k, x, span):
        coh = self._cohs[cut]
        hdim = coh.algebra.dim(k)
        spec = self.psi_spec[(mcut, k, x)]
        if spec[0] == "zero":
            return (Q0,) * hdim
        if spec[0] == "project":
            vec = span.embeddings[mcut][k].col(x)
        else:
            vec = spec[1]
        coords = self._ie1_coords(cut, k, vec)
        comp = self.fam.component(cut)
        dv = comp.d_apply(k, coords)
        if any(dv):
            raise WitnessVerificationFailed(
                f"psi image not a cocycle at {cut}, degree {k}, generator {x}"
            )
        if hdim == 0:
            return ()
        return coh.project(k, coords)


def proj_along(W, C, vec):
    """Projection onto W along C of a vector of W ⊕ C."""
    cols = [list(v) for v in W.vectors()] + [list(v) for v in C.vectors()]
    m = Matrix.from_columns(cols, len(vec))
    x = solve(m, tuple(vec))
    assert x is not None, "vector outside W ⊕ C"
    out = [Q0] * len(vec)
    for i, wv in enumerate(W.vectors()):
        if x[i]:
            for t, c in enumerate(wv):
                out[t] += x[i] * c
    return tuple(out)


def annihilator_complement(HA, deg, W):
    """{v in HA^deg : v·w = 0 in HA^{2 deg} for all w in W} (classwise)."""
    m = HA.dim(deg)
    tgt = HA.dim(2 * deg)
    if not tgt or W.dim == 0:
        return Subspace.full(m)
    rows = []
    for w in W.vectors():
        prods = [HA.mul_vec(deg, _basis(m, v), deg, tuple(w))[0] for v in range(m)]
        for t in range(tgt):
            rows.append([prods[v][t] for v in range(m)])
    return kernel(Matrix(rows, m))


# ---------------------------------------------------------------------------
# ordinary witness


def build_witness_ordinary(d, t_bound=2):
    """The GM (or full, for one singular point) witness of an ordinary datum."""
    if d.rank_only:
        raise LemmaPreconditionFailed("witness needs products (rank-only datum)")
    from .datum import LinkConnectivityFlag

    rep = check_link_lemmas(d, LinkConnectivityFlag(True))
    if not rep.ok:
        raise LemmaPreconditionFailed(
            "link lemmas fail: " + "; ".join(s for s, _ in rep.failures()[:3])
        )
    n = d.n
    HX, HD = d.HX, d.HD
    b = _WitnessBuilder(d, t_bound)
    reg, link = b.reg, b.link

    def xvec(s, vec):
        return cell_vector(reg, (0, s), vec)

    def dvec(s, vec):
        return cell_vector(reg, (-1, s), vec)

    def lvec(cell, vec):
        return cell_vector(link, cell, vec)

    ker_j = {s: kernel(d.j_map(s)) for s in range(2 * n + 1)}
    im_j = {s: image(d.j_map(s)) for s in range(2 * n + 1)}
    im_g = {s: image(d.gamma_map(s)) for s in range(2 * n + 1)}
    ker_g = {s: kernel(d.gamma_map(s)) for s in range(2, 2 * n + 1)}

    V = annihilator_complement(HD, n - 1, im_j[n - 1])
    if V.dim != HD.dim(n - 1) - im_j[n - 1].dim or V.intersect(im_j[n - 1]).dim:
        raise WitnessVerificationFailed(
            "annihilator of Im(j^{n-1}) is not a complement"
        )
    b.record("Ker(gamma^{n+1})_dual", V)
    E = complement(ker_j[n - 1].add(im_g[n - 1]), Subspace.full(HX.dim(n - 1)))
    Vp = ker_j[n - 1].add(E)
    b.record("Ker(j^{n+1})_dual", Vp)
    KJS = kernel(d.j_sharp(n + 1))
    # C and C' live in the pairing-orthogonal of V, so that
    # γ^{2n}(V·(C ⊕ C')) = <V, C ⊕ C'>_D = 0 (multiplicativity of ψ needs it)
    from .linalg import annihilator

    Vperp = annihilator(V, d.pairing_d(n - 1))
    C = Vperp.intersect(KJS)
    if C.intersect(ker_g[n + 1]).dim or C.dim + ker_g[n + 1].dim != KJS.dim:
        raise WitnessVerificationFailed(
            "V-orthogonal complement of Ker(gamma^{n+1}) in Ker(j_#) fails"
        )
    b.record("C", C)
    Cp = complement(C, Vperp)
    if Cp.intersect(KJS).dim or KJS.dim + Cp.dim != HD.dim(n - 1):
        raise WitnessVerificationFailed(
            "V-orthogonal complement of Ker(j_#^{n+1}) fails"
        )
    b.record("C_prime", Cp)
    CCp = C.add(Cp)
    Cpp = complement(ker_g[2 * n], Subspace.full(HD.dim(2 * n - 2)))
    b.record("C_doubleprime", Cpp)

    # augmentation: T2 = span(V·V) with j-preimages
    prods = []
    for va in V.vectors():
        for vb in V.vectors():
            prods.append(HD.mul_vec(n - 1, tuple(va), n - 1, tuple(vb))[0])
    T2 = Subspace.from_spanning(prods, HD.dim(2 * n - 2))
    b.record("T2", T2)
    x_u, z_u = [], []
    for u in T2.vectors():
        xu = solve(d.j_map(2 * n - 2), tuple(-c / 2 for c in u))
        if xu is None:
            raise WitnessVerificationFailed("no j-preimage for the augmentation")
        c = solve(d.j_sharp(2 * n - 2), d.j_map(2 * n - 2).apply(xu))
        assert c is not None
        gc = d.gamma_map(2 * n - 2).apply(c)
        x_u.append(xu)
        z_u.append(tuple(a - g for a, g in zip(xu, gc)))

    p0 = Perversity.zero(n)
    pm = Perversity.middle(n)
    pn = Perversity(n, n)
    pt = Perversity(n, min(n + 1, 2 * n - 2))
    pinf = Perversity.infinite(n)
    mid_cuts = [c for c in (pm, pn, pt, pinf) if True]

    def add_diag_rows(cut, exclude=()):
        """Unit and the Ker(j^s)/full diagonals of rows s != n-1."""
        b.add(cut, 0, "unit", b.diag(0, xvec(0, HX.unit)))
        for s in range(1, 2 * n + 1):
            if s == n - 1 or s in exclude:
                continue
            space = Subspace.full(HX.dim(s)) if s == 2 * n else ker_j[s]
            for i, v in enumerate(space.vectors()):
                b.add(cut, s, f"Kj{s}_{i}", b.diag(s, xvec(s, tuple(v))))

    def add_v_dt(cut):
        for i, v in enumerate(V.vectors()):
            b.add(cut, n, f"Vdt_{i}", b.dt_mon(n, lvec((0, n - 1), tuple(v))))

    def add_middle_block(cut):
        for i, v in enumerate(Vp.vectors()):
            b.add(cut, n - 1, f"V'_{i}", b.diag(n - 1, xvec(n - 1, tuple(v))))
        for i, v in enumerate(V.vectors()):
            lk = lvec((0, n - 1), tuple(v))
            b.add(cut, n - 1, f"V(t-1)_{i}",
                  b.ext_poly(n - 1, lk, [(1, Q1), (0, -Q1)]), psi=("zero",))
        add_v_dt(cut)
        for idx, u in enumerate(T2.vectors()):
            lk = lvec((0, 2 * n - 2), tuple(u))
            vec = list(b.ext_poly(2 * n - 2, lk, [(2, Fraction(1, 2)), (1, -Q1)]))
            for i, c in enumerate(xvec(2 * n - 2, x_u[idx])):
                vec[i] += c
            b.add(cut, 2 * n - 2, f"X2_{idx}", tuple(vec),
                  psi=("class", b.diag(2 * n - 2, xvec(2 * n - 2, z_u[idx]))))
            b.add(cut, 2 * n - 1, f"T2(t-1)dt_{idx}",
                  b.ext_poly_dt(2 * n - 1, lk, [(1, Q1), (0, -Q1)]), psi=("zero",))

    def add_top_row(cut, with_const=False):
        for i in range(HD.dim(2 * n - 2)):
            a = _basis(HD.dim(2 * n - 2), i)
            if with_const:
                b.add(cut, 2 * n - 1, f"Dd_{i}", b.diag(2 * n - 1, dvec(2 * n, a)),
                      psi=("class", b.diag(2 * n - 1,
                           dvec(2 * n, proj_along(ker_g[2 * n], Cpp, a)))))
            b.add(cut, 2 * n - 1, f"Dt_{i}",
                  b.diag(2 * n - 1, dvec(2 * n, a), texp=1), psi=("zero",))
            b.add(cut, 2 * n, f"Ddt_{i}", b.dt_mon(2 * n, lvec((-1, 2 * n), a)))

    # M_0
    add_diag_rows(p0)
    for i, v in enumerate(ker_j[n - 1].vectors()):
        b.add(p0, n - 1, f"Kj{n-1}_{i}", b.diag(n - 1, xvec(n - 1, tuple(v))))
    add_v_dt(p0)

    # M_m
    add_diag_rows(pm)
    add_middle_block(pm)

    # M_n: middle block + Ker(j#) at (-1, n+1) + top row
    add_diag_rows(pn)
    add_middle_block(pn)
    for i, a in enumerate(KJS.vectors()):
        b.add(pn, n, f"Kjs_{i}", b.diag(n, dvec(n + 1, tuple(a))),
              psi=("class", b.diag(n, dvec(n + 1,
                   proj_along(ker_g[n + 1], C, tuple(a))))))
    add_top_row(pn)

    # M_t: full H^{n-1}(D) at (-1, n+1) and full H^{n+1}(X̃) at (0, n+1)
    if pt != pn:
        add_diag_rows(pt, exclude=(n + 1,))
        add_middle_block(pt)
        for i in range(HD.dim(n - 1)):
            a = _basis(HD.dim(n - 1), i)
            b.add(pt, n, f"D_{i}", b.diag(n, dvec(n + 1, a)),
                  psi=("class", b.diag(n, dvec(n + 1,
                       proj_along(ker_g[n + 1], CCp, a)))))
        for i in range(HX.dim(n + 1)):
            b.add(pt, n + 1, f"Xfull_{i}",
                  b.diag(n + 1, xvec(n + 1, _basis(HX.dim(n + 1), i))))
        add_top_row(pt)

    # M_inf: adds the constant copy at (-1, 2n)
    add_diag_rows(pinf, exclude=(n + 1,))
    add_middle_block(pinf)
    for i in range(HD.dim(n - 1)):
        a = _basis(HD.dim(n - 1), i)
        b.add(pinf, n, f"D_{i}", b.diag(n, dvec(n + 1, a)),
              psi=("class", b.diag(n, dvec(n + 1,
                   proj_along(ker_g[n + 1], CCp, a)))))
    for i in range(HX.dim(n + 1)):
        b.add(pinf, n + 1, f"Xfull_{i}",
              b.diag(n + 1, xvec(n + 1, _basis(HX.dim(n + 1), i))))
    add_top_row(pinf, with_const=True)

    scope = FULL if d.sigma_count == 1 else GM
    return b.finish(scope)


# ---------------------------------------------------------------------------
# surface witness


def build_witness_surface(d, t_bound=2):
    """The GM (or full, for Ker γ^4 = Im η) witness of a surface datum."""
    if d.rank_only:
        raise LemmaPreconditionFailed("witness needs products (rank-only datum)")
    n = 2
    HX, HD1 = d.HX, d.HD1
    nz = d.hz_dim
    b = _WitnessBuilder(d, t_bound)
    reg, link = b.reg, b.link
    lam, lam_dl = link.lam, link.lam_dl
    N = t_bound
    Nl = link.l_bound

    def xvec(s, vec):
        return cell_vector(reg, (0, s), vec)

    def dvec(s, vec):
        return cell_vector(reg, (-1, s), vec)

    def zvec(vec):
        return cell_vector(reg, (-2, 4), vec)

    def l_14(h_part, dl_part):
        return cell_vector(link, (-1, 4), tuple(h_part) + tuple(dl_part))

    def l_24(lpoly):
        return cell_vector(link, (-2, 4), lpoly)

    def l_10(lpoly_dl):
        return cell_vector(link, (1, 0), lpoly_dl)

    ker_j = {s: kernel(d.j_map(s)) for s in (0, 1, 2)}
    im_j1 = image(d.j_map(1))
    istar = d.i_comb()
    eta = d.eta_comb()
    ker_eta = kernel(eta)
    ker_g = {s: kernel(d.gamma_map(s)) for s in (2, 3, 4)}

    V1 = annihilator_complement(HD1, 1, im_j1)
    if V1.dim != HD1.dim(1) - im_j1.dim or V1.intersect(im_j1).dim:
        raise WitnessVerificationFailed("annihilator of Im(j^1) is not a complement")
    b.record("Ker(gamma^3)_dual", V1)
    W = complement(image(istar), Subspace.full(nz))
    b.record("Ker(eta)_dual", W)
    C0 = complement(ker_eta, Subspace.full(nz))
    b.record("C0", C0)
    from .linalg import annihilator

    if V1.dim:
        V1perp = annihilator(V1, d.pairing_d(1))
        C1 = V1perp.intersect(ker_g[3])
        if C1.add(ker_g[3]).dim != HD1.dim(1) or C1.intersect(ker_g[3]).dim:
            raise WitnessVerificationFailed("V1-orthogonal complement fails")
    else:
        C1 = complement(ker_g[3], Subspace.full(HD1.dim(1)))
    b.record("C1", C1)
    C2 = complement(ker_g[4], Subspace.full(HD1.dim(2)))
    b.record("C2", C2)

    # pointwise products H^0(Z)∘W
    prods = []
    for w in W.vectors():
        for q in range(nz):
            vec = [Q0] * nz
            vec[q] = w[q]
            prods.append(tuple(vec))
    Ustar = Subspace.from_spanning(prods, nz)
    b.record("U_star", Ustar)

    # H^1 augmentation (vacuous for rational-curve divisors)
    v1prods = []
    for va in V1.vectors():
        for vb in V1.vectors():
            v1prods.append(HD1.mul_vec(1, tuple(va), 1, tuple(vb))[0])
    T2 = Subspace.from_spanning(v1prods, HD1.dim(2))
    x_u, z_u = [], []
    for u in T2.vectors():
        xu = solve(d.j_map(2), tuple(-c / 2 for c in u))
        if xu is None:
            raise WitnessVerificationFailed("no j-preimage for the augmentation")
        c = solve(d.j_sharp(), d.j_map(2).apply(xu))
        assert c is not None
        gc = d.gamma_map(2).apply(c)
        x_u.append(xu)
        z_u.append(tuple(a - g for a, g in zip(xu, gc)))

    p0 = Perversity.zero(n)
    p1 = Perversity.middle(n)
    p2 = Perversity.top(n)
    pinf = Perversity.infinite(n)

    def w_dl_vec(w):
        out = [Q0] * lam_dl.dim
        for q, c in enumerate(w):
            out[lam_dl.idx(q, 0)] = c
        return l_10(tuple(out))

    def lpoly_cell(u, m):
        out = [Q0] * lam.dim
        for q, c in enumerate(u):
            out[lam.idx(q, m)] = c
        return l_24(tuple(out))

    def dl_slot_14(u, m):
        out = [Q0] * lam_dl.dim
        for q, c in enumerate(u):
            out[lam_dl.idx(q, m)] = c
        return l_14([Q0] * HD1.dim(2), out)

    def h_slot_14(a):
        return l_14(a, [Q0] * lam_dl.dim)

    def add_diag_rows(cut):
        b.add(cut, 0, "unit", b.diag(0, xvec(0, HX.unit)))
        for s in (1, 2):
            space = ker_j[s]
            if cut != p0 and s == 1:
                space = Subspace.full(HX.dim(1))
            for i, v in enumerate(space.vectors()):
                b.add(cut, s, f"X{s}_{i}", b.diag(s, xvec(s, tuple(v))))
        for s in (3, 4):
            for i in range(HX.dim(s)):
                b.add(cut, s, f"X{s}_{i}", b.diag(s, xvec(s, _basis(HX.dim(s), i))))

    def add_dt_gens(cut):
        for i, v in enumerate(V1.vectors()):
            b.add(cut, 2, f"V1dt_{i}",
                  b.dt_mon(2, cell_vector(link, (0, 1), tuple(v))))
        for i, w in enumerate(W.vectors()):
            b.add(cut, 2, f"Wdt_{i}", b.dt_mon(2, w_dl_vec(tuple(w))))

    def add_middle_block(cut):
        for i, v in enumerate(V1.vectors()):
            lk = cell_vector(link, (0, 1), tuple(v))
            b.add(cut, 1, f"V1(t-1)_{i}",
                  b.ext_poly(1, lk, [(1, Q1), (0, -Q1)]), psi=("zero",))
        for i, w in enumerate(W.vectors()):
            b.add(cut, 1, f"W(t-1)_{i}",
                  b.ext_poly(1, w_dl_vec(tuple(w)), [(1, Q1), (0, -Q1)]),
                  psi=("zero",))
        add_dt_gens(cut)
        for idx, u in enumerate(T2.vectors()):
            lk = cell_vector(link, (0, 2), tuple(u) + (Q0,) * (2 * lam_dl.dim))
            vec = list(b.ext_poly(2, lk, [(2, Fraction(1, 2)), (1, -Q1)]))
            for i, c in enumerate(xvec(2, x_u[idx])):
                vec[i] += c
            b.add(cut, 2, f"X2_{idx}", tuple(vec),
                  psi=("class", b.diag(2, xvec(2, z_u[idx]))))
            b.add(cut, 3, f"T2(t-1)dt_{idx}",
                  b.ext_poly_dt(3, lk, [(1, Q1), (0, -Q1)]), psi=("zero",))

    def add_z_slot_block(cut, at_infinity):
        """Z-slot closure families over U* = H^0(Z)∘W.

        G0 = dl-slot ⊗ dt arises as (Ker η diagonal)·(W dt); its in-model
        exact partner is Ldt = ((-2,4) antiderivative) ⊗ dt, whose d also
        corrects by Ddt. At ∞ the (t-1)-shifted products add the l-profiled
        G1 family with (t-1)/(t²-1)-null partners, and the degree-2 element
        (u·l)⊗(1-t) whose boundary ties Gm1, Ldt and the H²(D̃)-diagonals
        together (killing the would-be extra H³ class).
        """
        for a_i in range(HD1.dim(2)):
            a = _basis(HD1.dim(2), a_i)
            b.add(cut, 4, f"Ddt_{a_i}",
                  b.ext_poly_dt(4, h_slot_14(a), [(0, Q1)]))
        for u_i, u in enumerate(Ustar.vectors()):
            b.add(cut, 4, f"G0_{u_i}",
                  b.ext_poly_dt(4, dl_slot_14(u, 0), [(0, Q1)]))
            if Nl >= 2:
                b.add(cut, 3, f"Ldt_{u_i}",
                      b.ext_poly_dt(3, lpoly_cell(u, 1), [(0, Q1)]),
                      psi=("zero",))
            if not at_infinity:
                continue
            b.add(cut, 3, f"Gm1_{u_i}",
                  b.ext_poly(3, dl_slot_14(u, 0), [(1, Q1), (0, -Q1)]),
                  psi=("zero",))
            if Nl >= 2:
                b.add(cut, 2, f"P_{u_i}",
                      b.ext_poly(2, lpoly_cell(u, 1), [(0, Q1), (1, -Q1)]),
                      psi=("zero",))
                for i in range(N):
                    b.add(cut, 4, f"G1t{i}_{u_i}",
                          b.ext_poly_dt(4, dl_slot_14(u, 1), [(i, Q1)]))
                b.add(cut, 3, f"Gm1l1_{u_i}",
                      b.ext_poly(3, dl_slot_14(u, 1), [(1, Q1), (0, -Q1)]),
                      psi=("zero",))
                b.add(cut, 3, f"Gnull1l1_{u_i}",
                      b.ext_poly(3, dl_slot_14(u, 1),
                                 [(2, Fraction(1, 2)), (0, -Fraction(1, 2))]),
                      psi=("zero",))

    # M_0
    add_diag_rows(p0)
    add_dt_gens(p0)

    # M_1
    add_diag_rows(p1)
    add_middle_block(p1)

    # M_2
    add_diag_rows(p2)
    add_middle_block(p2)
    for i, z in enumerate(ker_eta.vectors()):
        b.add(p2, 2, f"Keta_{i}", b.diag(2, zvec(tuple(z))))
    for i in range(HD1.dim(1)):
        u = _basis(HD1.dim(1), i)
        b.add(p2, 2, f"Th1_{i}", b.diag(2, dvec(3, u)),
              psi=("class", b.diag(2, dvec(3, proj_along(ker_g[3], C1, u)))))
    for i in range(HD1.dim(2)):
        a = _basis(HD1.dim(2), i)
        b.add(p2, 3, f"Dt_{i}", b.diag(3, dvec(4, a), texp=1), psi=("zero",))
    add_z_slot_block(p2, at_infinity=False)

    # M_inf
    add_diag_rows(pinf)
    add_middle_block(pinf)
    for i in range(nz):
        z = _basis(nz, i)
        b.add(pinf, 2, f"Z_{i}", b.diag(2, zvec(z)),
              psi=("class", b.diag(2, zvec(proj_along(ker_eta, C0, z)))))
    for i in range(HD1.dim(1)):
        u = _basis(HD1.dim(1), i)
        b.add(pinf, 2, f"Th1_{i}", b.diag(2, dvec(3, u)),
              psi=("class", b.diag(2, dvec(3, proj_along(ker_g[3], C1, u)))))
    for i in range(HD1.dim(2)):
        a = _basis(HD1.dim(2), i)
        b.add(pinf, 3, f"Dd_{i}", b.diag(3, dvec(4, a)),
              psi=("class", b.diag(3, dvec(4, proj_along(ker_g[4], C2, a)))))
        b.add(pinf, 3, f"Dt_{i}", b.diag(3, dvec(4, a), texp=1), psi=("zero",))
    add_z_slot_block(pinf, at_infinity=True)

    full_ok = ker_g[4].dim == image(eta).dim and ker_g[4].contains(image(eta))
    scope = FULL if (d.sigma_count == 1 and full_ok) else GM
    return b.finish(scope)
