import pytest

from pwss.builders import heisenberg_cdga
from pwss.errors import NotDefined
from pwss.massey import (
    MasseyClass,
    as_perverse,
    exhaustive_massey,
    massey_triple,
)
from pwss.perverse import Perversity
from pwss.weights import ie1_closed_family


@pytest.fixture(scope="module")
def heis():
    return as_perverse(heisenberg_cdga())


def test_heisenberg_triple_excludes_zero(heis):
    p0 = Perversity.zero(1)
    a = MasseyClass(p0, 1, (1, 0))
    b = MasseyClass(p0, 1, (0, 1))
    sys = massey_triple(heis, a, a, b)
    assert sys.defined and not sys.contains_zero
    assert sys.indeterminacy.dim == 0
    assert sys.degree == 2


def test_not_defined_when_product_nonzero(heis):
    p0 = Perversity.zero(1)
    a = MasseyClass(p0, 1, (1, 0))
    bc = MasseyClass(p0, 2, (0, 1))
    with pytest.raises(NotDefined):
        massey_triple(heis, a, bc, a)  # [a]·[bc] = [abc] != 0
    # a·b = dc is exact, so (a, b, b) is a legitimate defining situation
    b = MasseyClass(p0, 1, (0, 1))
    sys = massey_triple(heis, a, b, b)
    assert sys.defined


def test_heisenberg_exhaustive_finds_offenders(heis):
    defined, offenders = exhaustive_massey(heis, max_degree=3)
    assert defined > 0
    assert offenders, "the non-formal control must produce a nonzero coset"


def test_two_cycle_family_vanishing(two_cycle):
    fam = ie1_closed_family(two_cycle, t_bound=2)
    defined, offenders = exhaustive_massey(fam)
    assert not offenders


def test_coset_second_system_agrees(heis):
    # recomputation with a shifted defining system keeps the coset
    p0 = Perversity.zero(1)
    a = MasseyClass(p0, 1, (1, 0))
    b = MasseyClass(p0, 1, (0, 1))
    sys = massey_triple(heis, a, a, b, second_system=True)
    assert not sys.contains_zero
