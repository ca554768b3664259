import json

import pytest

from pwss.builders import (
    blowup_cone_datum,
    cusp_datum,
    k3_algebra,
    k3_cone_datum,
    qhm_cone_datum,
    segre_datum,
    two_cycle_surface_datum,
    weak_link_datum,
)
from pwss.datum import (
    LinkConnectivityFlag,
    check_link_lemmas,
    cone_datum,
    load_datum,
    save_datum,
)
from pwss.errors import (
    DegenerateHyperplaneClass,
    InvariantViolation,
    SchemaError,
)
from pwss.linalg import Q0, Q1, kernel, image


def test_segre_ranks():
    d = segre_datum()
    assert [d.HX.dim(k) for k in range(7)] == [1, 0, 16, 0, 16, 0, 1]
    assert [d.HD.dim(k) for k in range(5)] == [10, 0, 20, 0, 10]
    assert kernel(d.j_map(2)).dim == 1       # Ker(j^2) = Q
    assert kernel(d.j_map(4)).dim == 6       # Ker(j^4) = Q^6
    assert d.HD.dim(2) - image(d.j_map(2)).dim == 5  # Van
    # PD shadow: dim Ker(j^4) = dim Coker(gamma^2)
    assert d.HX.dim(2) - image(d.gamma_map(2)).dim == 6


def test_cone_datum_k3():
    d = k3_cone_datum()
    assert [d.HX.dim(k) for k in range(7)] == [1, 0, 23, 0, 23, 0, 1]
    # j_# = cup with -w
    js2 = d.j_sharp(2)
    assert kernel(js2).dim == 0
    assert d.sigma_count == 1


def test_cone_degenerate_class_rejected():
    a = k3_algebra()
    w = [Q0] * 22
    w[0], w[3] = Q1, Q1  # (e1 + e4)^2 = 1 - 1 = 0
    with pytest.raises(DegenerateHyperplaneClass):
        cone_datum(a, w)


def test_roundtrip_ordinary(tmp_path):
    d = segre_datum()
    path = tmp_path / "segre.json"
    save_datum(d, path)
    d2 = load_datum(path)
    assert d2.n == 3
    assert [d2.HX.dim(k) for k in range(7)] == [1, 0, 16, 0, 16, 0, 1]
    assert d2.j_map(2) == d.j_map(2)
    assert d2.gamma_map(4) == d.gamma_map(4)
    assert d2.HX.pairings == d.HX.pairings
    # products round-trip
    got, _ = d2.HX.mul_basis(2, 2, 1, 1)
    want, _ = d.HX.mul_basis(2, 2, 1, 1)
    assert got == want


def test_roundtrip_surface(tmp_path):
    d = cusp_datum()
    path = tmp_path / "cusp.json"
    save_datum(d, path)
    d2 = load_datum(path)
    assert d2.kind == "surface"
    assert d2.hz_dim == 3
    assert d2.i1 == d.i1 and d2.eta2 == d.eta2
    assert d2.j_sharp() == d.j_sharp()


def test_schema_error():
    with pytest.raises(SchemaError):
        load_datum({"kind": "nonsense"})


def test_invariant_violation_reported(tmp_path):
    d = segre_datum()
    obj = d.to_json()
    # corrupt one gamma entry: breaks adjointness / projection formula
    obj["maps"]["gamma"][2]["entries"][1][0] = "7"
    with pytest.raises(InvariantViolation) as exc:
        load_datum(obj)
    assert exc.value.failures


def test_invariant_violation_projection_formula():
    d = cusp_datum()
    obj = d.to_json()
    # corrupt eta1 only: (i1, eta1) adjointness fails by name
    obj["maps"]["eta1"]["entries"][0][0] = "5"
    with pytest.raises(InvariantViolation) as exc:
        load_datum(obj)
    assert any("adjoint" in f or "eta" in f for f in exc.value.failures)


def test_link_lemmas_pass_on_fixtures():
    for d in (segre_datum(), k3_cone_datum(), blowup_cone_datum(), qhm_cone_datum()):
        rep = check_link_lemmas(d, LinkConnectivityFlag(True))
        assert rep.ok, str(rep)


def test_link_lemmas_fail_on_weak_link():
    d = weak_link_datum()
    assert not d.link_connected
    rep = check_link_lemmas(d, LinkConnectivityFlag(True))
    assert not rep.ok
    # the failing statements name the degree where j_# is not an isomorphism
    names = [s for s, _ in rep.failures()]
    assert any("j_#" in s and "isomorphism" in s for s in names)
    # but the semipurity half (valid datum) holds
    rep2 = check_link_lemmas(d, LinkConnectivityFlag(False))
    assert rep2.ok


def test_two_cycle_full_scope_condition():
    d = two_cycle_surface_datum()
    # Ker(gamma^4)/Im(eta) = 0: the single-singular-point condition
    kg = kernel(d.gamma_map(4))
    ie = image(d.eta_comb())
    assert kg.dim == ie.dim and kg.contains(ie)


def test_cusp_combinatorics():
    d = cusp_datum()
    istar = d.i_comb()
    eta = d.eta_comb()
    assert kernel(istar).dim == 1
    assert d.hz_dim - image(istar).dim == 1   # Coker(i*) = Van = Q
    assert kernel(eta).dim == 1
    assert d.HD1.dim(2) - image(eta).dim == 1
