import pytest

from pwss.cdga import Cohomology
from pwss.perverse import Perversity, all_perversities
from pwss.weights import (
    cell_dims,
    ih_classical,
    render_ih_md,
    render_weight_table_md,
    weight_bounds_ok,
    weight_records,
    weight_table,
)


def ih_row(d, p):
    return [ih_classical(d, p, k).dim for k in range(2 * d.n + 1)]


def test_k3_cone_ih_table(k3_cone):
    n = 3
    assert ih_row(k3_cone, Perversity.zero(n)) == [1, 0, 1, 0, 22, 0, 1]
    assert ih_row(k3_cone, Perversity.middle(n)) == [1, 0, 22, 0, 22, 0, 1]
    assert ih_row(k3_cone, Perversity.top(n)) == [1, 0, 22, 0, 1, 0, 1]


def test_segre_ih_tables(segre):
    n = 3
    # the three columns of the example, top degree downward
    assert ih_row(segre, Perversity(n, 0)) == [1, 0, 1, 5, 6, 0, 1]
    assert ih_row(segre, Perversity(n, 1)) == [1, 0, 1, 5, 6, 0, 1]
    assert ih_row(segre, Perversity(n, 2)) == [1, 0, 6, 0, 6, 0, 1]
    assert ih_row(segre, Perversity(n, 3)) == [1, 0, 6, 5, 1, 0, 1]
    assert ih_row(segre, Perversity(n, 4)) == [1, 0, 6, 5, 1, 0, 1]
    # regular part at infinity
    assert ih_row(segre, Perversity.infinite(n)) == [1, 0, 6, 5, 1, 9, 0]


def test_cusp_ih_rows(cusp):
    n = 2
    assert ih_row(cusp, Perversity(n, 0)) == [1, 0, 13, 0, 1]
    assert ih_row(cusp, Perversity(n, 1)) == [1, 0, 12, 0, 1]
    assert ih_row(cusp, Perversity(n, 2)) == [1, 0, 13, 0, 1]


def test_poincare_duality_of_ih_dims(segre, cusp, k3_cone):
    for d in (segre, cusp, k3_cone):
        n = d.n
        for p in range(2 * n - 1):
            pc = 2 * n - 2 - p
            for k in range(2 * n + 1):
                a = ih_classical(d, Perversity(n, p), k).dim
                b = ih_classical(d, Perversity(n, pc), 2 * n - k).dim
                assert a == b, (p, k)


def test_column_sums_match_classical(closed_families, segre, cusp, k3_cone):
    data = {"segre": segre, "cusp": cusp, "k3_cone": k3_cone}
    for name, d in data.items():
        fam = closed_families[name]
        for cut in fam.cuts:
            h = Cohomology(fam.component(cut))
            for k in range(2 * d.n + 1):
                assert h.dims().get(k, 0) == ih_classical(d, cut, k).dim, (
                    name, repr(cut), k)


def test_cusp_weight_split(closed_families, cusp):
    tab = weight_table(cusp, family=closed_families["cusp"])
    p0 = Perversity(2, 0)
    assert tab.gr_weights(p0, 2) == {0: 1, 2: 12}
    assert tab.ih_dim(p0, 2) == 13
    ok, cell = weight_bounds_ok(tab)
    assert ok, cell
    assert tab.purity_ok


def test_segre_weight_split(closed_families, segre):
    tab = weight_table(segre, family=closed_families["segre"])
    p0 = Perversity(3, 0)
    # Gr^W_2 IH^3_0 = Van has dimension 5
    assert tab.dim(p0, 3, 2) == 5
    assert tab.gr_weights(p0, 3) == {2: 5}
    assert tab.purity_ok
    ok, cell = weight_bounds_ok(tab)
    assert ok, cell


def test_middle_perversity_purity(closed_families):
    for name, fam in closed_families.items():
        n = fam.n
        m = Perversity.middle(n)
        h = Cohomology(fam.component(m))
        for k in h.algebra.degrees():
            for i in range(h.algebra.dim(k)):
                assert h.algebra.weight(k, i) == k, (name, k)


def test_qhm_cone_pure_everywhere_finite(qhm_cone):
    tab = weight_table(qhm_cone, t_bound=2)
    for cut, k, s, dim in tab.rows:
        if not cut.is_infinite:
            assert s == k, (repr(cut), k, s)


def test_renderers_deterministic(cusp, closed_families):
    tab = weight_table(cusp, family=closed_families["cusp"])
    md1 = render_weight_table_md(cusp, tab)
    md2 = render_weight_table_md(cusp, tab)
    assert md1 == md2
    assert "perversity" in md1
    recs = weight_records(tab)
    assert {"perversity": "0", "degree": 2, "weight": 2, "dim": 12} in recs
    ih_md = render_ih_md(cusp)
    assert ih_md.count("|") > 10


def test_ie2_cells_from_family(closed_families):
    fam = closed_families["segre"]
    h = Cohomology(fam.component(Perversity(3, 0)))
    cells = cell_dims(h.algebra)
    assert cells[(1, 2)] == 5    # Coker(j^2) at (1, n-1)
    assert cells[(0, 2)] == 1    # Ker(j^2)
    h3 = Cohomology(fam.component(Perversity(3, 3)))
    cells3 = cell_dims(h3.algebra)
    assert cells3[(-1, 4)] == 5  # Ker(γ^4)
    assert cells3[(0, 4)] == 1   # Coker(γ^4)


def test_cone_link_pairing_duality(k3_cone):
    # dual pair of the exceptional multiplication: Ker(j_#^4) and Coker(j_#^2)
    from pwss.linalg import image, kernel

    assert kernel(k3_cone.j_sharp(4)).dim == 21
    assert k3_cone.HD.dim(2) - image(k3_cone.j_sharp(2)).dim == 21


def test_poset_map_zero_to_infinity(closed_families):
    # the map IH_0 -> IH_inf induced by X_reg ↪ X̄ on the cone tables
    fam = closed_families["k3_cone"]
    h = fam.cohomology()
    n = 3
    zero, inf = Perversity.zero(n), Perversity.infinite(n)
    maps = h.poset_map(zero, inf)
    # degree 2: Q<Th> -> Q<w> ⊕ V is injective (the hyperplane class survives)
    assert maps[2].rank() == 1
    # degree 4: 22-dim -> 1-dim, surjective (Th^2 hits the volume direction)
    assert maps[4].nrows == 1 and maps[4].rank() == 1
    # degree 6: H^6(X̄) -> H^6(X_reg) = 0
    assert maps[6].nrows == 0


def test_rank_only_dimension_tables(segre):
    # products omitted: dimension tables still work, formality refuses
    from pwss.datum import load_datum

    obj = segre.to_json()
    obj["hx"]["mu"] = None
    obj["hd"]["mu"] = None
    d = load_datum(obj)
    assert d.rank_only
    assert ih_classical(d, Perversity(3, 0), 3).dim == 5
    tab = weight_table(d, t_bound=2)
    assert tab.dim(Perversity(3, 0), 3, 2) == 5
