import pytest

from pwss.builders import k3_algebra
from pwss.cdga import CDGAMorphism, cohomology, extend_with_interval, point_algebra
from pwss.errors import DimensionMismatch
from pwss.linalg import Matrix, Q0, Q1
from pwss.perverse import (
    Perversity,
    Truncation,
    all_perversities,
    is_quasi_isomorphism,
    perverse_cohomology,
    perverse_pullback,
    perversity_sum,
    truncation_product_contained,
)
from pwss.errors import StabilizationFailure


def test_perversity_sum_saturates():
    n = 3
    assert perversity_sum(Perversity(n, 1), Perversity(n, 2)) == Perversity(n, 3)
    assert perversity_sum(Perversity(n, 3), Perversity(n, 4)).is_infinite
    for p in all_perversities(n):
        assert perversity_sum(p, Perversity.zero(n)) == p


def test_perversity_distinguished():
    assert Perversity.middle(3).p == 2
    assert Perversity.top(3).p == 4
    assert Perversity.parse("middle", 3) == Perversity(3, 2)
    assert Perversity.parse("inf", 3).is_infinite


def test_perversity_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        Perversity(2, 1) + Perversity(3, 1)


def test_truncation_infinite_is_everything():
    e = extend_with_interval(k3_algebra(), 2)
    tr = Truncation(e, Perversity.infinite(3))
    for k in e.degrees():
        assert tr.subspace(k).dim == e.dim(k)


def test_truncation_zero_on_point():
    # B = Q, p = 0, N = 2: degree 0 is Ker(d0) ⊕ Q·t ⊕ Q·t^2, dim 3
    e = extend_with_interval(point_algebra(), 2)
    tr = Truncation(e, Perversity.zero(1))
    assert tr.subspace(0).dim == 3
    assert tr.closed_under_d()


def test_truncation_poset_and_product_containment():
    e = extend_with_interval(k3_algebra(), 2)
    n = 3
    trs = {p: Truncation(e, p) for p in all_perversities(n)}
    ordered = all_perversities(n)
    for lo, hi in zip(ordered, ordered[1:]):
        assert trs[hi].contains(trs[lo])
        assert trs[lo].closed_under_d()
    # ξ_p · ξ_q ⊆ ξ_{p+q} for a few pairs
    for p, q in [(0, 0), (0, 2), (2, 2), (2, 3)]:
        pp, qq = Perversity(n, p), Perversity(n, q)
        assert truncation_product_contained(trs[pp], trs[qq], trs[pp + qq])


def identity_on_point():
    q = point_algebra()
    return CDGAMorphism(q, q, {0: Matrix.identity(1)}, name="id")


def test_pullback_of_identity_point():
    fam = perverse_pullback(identity_on_point(), n=2, t_bound=2)
    h = perverse_cohomology(fam)
    for cut in fam.cuts:
        dims = {k: h.component(cut).dim(k) for k in h.component(cut).degrees()}
        assert dims == {0: 1}, (cut, dims)


def test_pullback_validates_and_unit():
    fam = perverse_pullback(identity_on_point(), n=2, t_bound=2, check_stability=False)
    assert fam.validate(full=True)


def augmentation_k3():
    a = k3_algebra()
    q = point_algebra()
    maps = {0: Matrix([[Q1]])}
    return CDGAMorphism(a, q, maps, name="aug")


def test_pullback_infinite_recovers_source():
    f = augmentation_k3()
    fam = perverse_pullback(f, n=3, t_bound=2)
    h_inf = cohomology(fam.component(Perversity.infinite(3)))
    assert h_inf.dims() == cohomology(f.source).dims()


def test_pullback_zero_perversity_recovers_pullback_cohomology():
    # I_0(aug) is quasi-isomorphic to the fibre product over the point:
    # H^0 normalizes to Q and higher degrees come from A = H(K3).
    f = augmentation_k3()
    fam = perverse_pullback(f, n=3, t_bound=2, check_stability=False)
    h0 = cohomology(fam.component(Perversity.zero(3)))
    assert h0.dims() == {0: 1, 2: 22, 4: 1}


def test_quasi_isomorphism_identity_and_negative():
    f = identity_on_point()
    fam = perverse_pullback(f, n=2, t_bound=2, check_stability=False)
    from pwss.perverse import PerverseMorphism

    ident = PerverseMorphism(
        fam,
        fam,
        {c: {k: Matrix.identity(fam.component(c).dim(k))
             for k in fam.component(c).degrees()}
         for c in fam.cuts},
    )
    rep = is_quasi_isomorphism(ident)
    assert rep.ok
    zero = PerverseMorphism(
        fam,
        fam,
        {c: {k: Matrix.zero(fam.component(c).dim(k), fam.component(c).dim(k))
             for k in fam.component(c).degrees()}
         for c in fam.cuts},
    )
    rep = is_quasi_isomorphism(zero)
    assert not rep.ok
    assert rep.failing_cells()  # names the (p, k) cells


def test_truncation_closed_for_link_page(segre):
    from pwss.pages import e1_link

    ext = extend_with_interval(e1_link(segre), 2)
    for p in (0, 2, 4):
        tr = Truncation(ext, Perversity(3, p))
        assert tr.closed_under_d()


def test_stabilization_guard(monkeypatch):
    import pwss.perverse as P

    fams = [perverse_pullback(identity_on_point(), n=2, t_bound=2,
                              check_stability=False)]

    calls = {"n": 0}
    real = P._pullback_family

    def fake(f, n, N, name=None):
        calls["n"] += 1
        if calls["n"] == 1:
            return real(f, n, N, name=name)
        # simulate a dimension change between N and N+1
        fam = real(f, n, N, name=name)
        comp = fam.components[fam.cuts[0]]
        from pwss.cdga import CDGA, GradedVectorSpace, Product

        bigger = CDGA(GradedVectorSpace({0: comp.dim(0) + 1}), {}, Product(),
                      (1,) + (0,) * comp.dim(0))
        fam.components[fam.cuts[0]] = bigger
        return fam

    monkeypatch.setattr(P, "_pullback_family", fake)
    with pytest.raises(P.StabilizationFailure):
        P.perverse_pullback(identity_on_point(), n=2, t_bound=2)


def test_pullback_def24_invariants_small_fixtures(qhm_cone, two_cycle):
    # exhaustive compatibility squares on the pullback families of the
    # smaller fixtures; the larger ones exercise the same product closures
    # through the witness and Massey suites
    from pwss.weights import ie1_generic

    for d in (qhm_cone, two_cycle):
        fam = ie1_generic(d, t_bound=2, check_stability=False)
        assert fam.validate(full=True)
