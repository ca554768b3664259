import json

import pytest

from pwss.errors import LemmaPreconditionFailed
from pwss.formality import FULL, GM, build_witness_ordinary
from pwss.perverse import Perversity


def test_scopes(witnesses):
    assert witnesses["segre"].scope == GM       # ten singular points
    assert witnesses["k3_cone"].scope == FULL   # one singular point
    assert witnesses["blowup_cone"].scope == FULL
    assert witnesses["cusp"].scope == FULL
    assert witnesses["two_cycle"].scope == FULL


def test_transcripts_complete(witnesses):
    for name, w in witnesses.items():
        text = "\n".join(w.transcript)
        assert "quasi-isomorphism" in text
        assert "multiplicative" in text, name


def test_model_matches_ih_dims(witnesses, segre):
    # H(M) must be IH itself: check one headline number
    from pwss.perverse import cached_cohomology

    w = witnesses["segre"]
    m0 = w.model.component(Perversity.zero(3))
    h = cached_cohomology(m0)
    assert h.dims()[3] == 5


def test_complement_record(witnesses):
    w = witnesses["segre"]
    names = set(w.complements)
    assert {"C", "C_prime", "Ker(gamma^{n+1})_dual", "T2"} <= names
    # the dualized kernel complement has dimension Coker(j^{n-1}) = 5
    assert len(w.complements["Ker(gamma^{n+1})_dual"]) == 5


def test_witness_serialization(tmp_path, witnesses):
    w = witnesses["cusp"]
    path = tmp_path / "witness.json"
    w.save(path)
    data = json.loads(path.read_text())
    assert data["scope"] == FULL
    assert "phi" in data and "psi" in data and data["transcript"]
    # matrices replay: phi at the zero cut, degree 0 is 1x1 identity-ish
    assert data["phi"]["0"]["0"]


def test_precondition_rank_only(segre):
    obj = segre.to_json()
    obj["hx"]["mu"] = None
    obj["hd"]["mu"] = None
    from pwss.datum import load_datum

    d = load_datum(obj)
    assert d.rank_only
    with pytest.raises(LemmaPreconditionFailed):
        build_witness_ordinary(d)


def test_precondition_weak_link(weak_link):
    with pytest.raises(LemmaPreconditionFailed):
        build_witness_ordinary(weak_link)
