import pytest

from pwss.builders import (
    blowup_cone_datum,
    cusp_datum,
    k3_cone_datum,
    qhm_cone_datum,
    segre_datum,
    two_cycle_surface_datum,
    weak_link_datum,
)


@pytest.fixture(scope="session")
def segre():
    return segre_datum()


@pytest.fixture(scope="session")
def k3_cone():
    return k3_cone_datum()


@pytest.fixture(scope="session")
def blowup_cone():
    return blowup_cone_datum()


@pytest.fixture(scope="session")
def cusp():
    return cusp_datum()


@pytest.fixture(scope="session")
def two_cycle():
    return two_cycle_surface_datum()


@pytest.fixture(scope="session")
def qhm_cone():
    return qhm_cone_datum()


@pytest.fixture(scope="session")
def weak_link():
    return weak_link_datum()


@pytest.fixture(scope="session")
def closed_families(segre, k3_cone, blowup_cone, cusp):
    """Closed-form IE1 families at t-bound 2, shared across test modules."""
    from pwss.weights import ie1_closed_family

    return {
        "segre": ie1_closed_family(segre, t_bound=2),
        "k3_cone": ie1_closed_family(k3_cone, t_bound=2),
        "blowup_cone": ie1_closed_family(blowup_cone, t_bound=2),
        "cusp": ie1_closed_family(cusp, t_bound=2),
    }


@pytest.fixture(scope="session")
def witnesses(segre, k3_cone, blowup_cone, cusp, two_cycle):
    """All formality witnesses, built and verified once."""
    from pwss.formality import build_witness_ordinary, build_witness_surface

    return {
        "segre": build_witness_ordinary(segre, t_bound=2),
        "k3_cone": build_witness_ordinary(k3_cone, t_bound=2),
        "blowup_cone": build_witness_ordinary(blowup_cone, t_bound=2),
        "cusp": build_witness_surface(cusp, t_bound=2),
        "two_cycle": build_witness_surface(two_cycle, t_bound=2),
    }
