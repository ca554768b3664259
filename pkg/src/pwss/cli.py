"""Command line front end.

Exit codes: 0 success, 1 invariant/verification failure, 2 usage or schema
error. Markdown output is deterministic: identical inputs and flags give
byte-identical reports (golden-file friendly).
"""

from __future__ import annotations

import json
import sys

import click

from .cdga import Cohomology
from .datum import LinkConnectivityFlag, check_link_lemmas, cone_datum, load_datum, save_datum
from .errors import (
    InvariantViolation,
    LemmaPreconditionFailed,
    PwssError,
    SchemaError,
    StabilizationFailure,
    WitnessVerificationFailed,
)
from .pages import e1_link, e1_regular, page_cells
from .perverse import Perversity, all_perversities
from .weights import (
    cell_dims,
    ie1_closed_family,
    ih_classical,
    render_ih_md,
    render_weight_table_md,
    weight_bounds_ok,
    weight_records,
    weight_table,
)

FAIL = 1
USAGE = 2


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        click.echo(text)


def _load(path):
    try:
        return load_datum(path)
    except SchemaError as exc:
        click.echo(f"schema error: {exc}", err=True)
        sys.exit(USAGE)
    except FileNotFoundError as exc:
        click.echo(f"cannot read datum: {exc}", err=True)
        sys.exit(USAGE)
    except InvariantViolation as exc:
        click.echo("datum rejected:", err=True)
        for f in exc.failures:
            click.echo(f"  - {f}", err=True)
        sys.exit(FAIL)


def _perversities(d, spec):
    if spec == "all":
        return all_perversities(d.n)
    try:
        return [Perversity.parse(spec, d.n)]
    except ValueError as exc:
        click.echo(f"bad perversity: {exc}", err=True)
        sys.exit(USAGE)


@click.group()
def main():
    """Exact-rational perverse weight spectral sequence toolkit."""


@main.command()
@click.option("--datum", required=True, type=click.Path())
def validate(datum):
    """Validate a datum file against schema and structural invariants."""
    d = _load(datum)
    rep = check_link_lemmas(d, LinkConnectivityFlag(d.link_connected)) \
        if d.kind == "ordinary" else None
    click.echo(f"valid {d.kind} datum: n={d.n}, sigma_count={d.sigma_count}")
    if rep is not None:
        click.echo(str(rep))
        if not rep.ok:
            sys.exit(FAIL)


@main.command()
@click.option("--datum", required=True, type=click.Path())
@click.option("--perversity", default="all", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["md", "json"]), default="md")
@click.option("--out", type=click.Path(), default=None)
def ih(datum, perversity, fmt, out):
    """Intersection cohomology tables (paper row ordering: degree downward)."""
    d = _load(datum)
    cuts = _perversities(d, perversity)
    if fmt == "md":
        _emit(render_ih_md(d, cuts), out)
        return
    records = [
        {"perversity": repr(p), "degree": k, "dim": ih_classical(d, p, k).dim}
        for p in cuts
        for k in range(2 * d.n + 1)
    ]
    _emit(json.dumps(records, indent=1), out)


@main.command()
@click.option("--datum", required=True, type=click.Path())
@click.option("--t-bound", default=2, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["md", "json"]), default="md")
@click.option("--out", type=click.Path(), default=None)
def weights(datum, t_bound, fmt, out):
    """Weight-graded IH tables Gr^W_s IH^k with the purity report."""
    d = _load(datum)
    try:
        table = weight_table(d, t_bound=t_bound)
    except StabilizationFailure as exc:
        click.echo(f"stabilization failure: {exc}", err=True)
        sys.exit(FAIL)
    ok, cell = weight_bounds_ok(table)
    if fmt == "json":
        payload = {
            "records": weight_records(table),
            "purity_ok": table.purity_ok,
            "bounds_ok": ok,
        }
        _emit(json.dumps(payload, indent=1), out)
    else:
        lines = [render_weight_table_md(d, table)]
        lines.append(f"purity report: {'pass' if table.purity_ok else 'FAIL'}")
        lines.append(f"weight bounds: {'pass' if ok else f'FAIL at {cell}'}")
        _emit("\n".join(lines), out)
    if not (table.purity_ok and ok):
        sys.exit(FAIL)


def _page_records(page, perversity=None):
    rec = []
    for (r, s) in page_cells(page):
        entry = {"r": r, "s": s, "dim": page.cell_dims[(r, s)]}
        if perversity is not None:
            entry["perversity"] = repr(perversity)
        rec.append(entry)
    return rec


def _cells_md(title, cells):
    rs = sorted({r for (r, _) in cells})
    ss = sorted({s for (_, s) in cells}, reverse=True)
    lines = [f"### {title}", "| s \\ r | " + " | ".join(str(r) for r in rs) + " |",
             "|---" * (len(rs) + 1) + "|"]
    for s in ss:
        row = [str(s)]
        for r in rs:
            row.append(str(cells.get((r, s), "·")))
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines)


@main.command()
@click.option("--datum", required=True, type=click.Path())
@click.option("--which", type=click.Choice(["regular", "link"]), default="regular",
              show_default=True)
@click.option("--t-bound", default=2, show_default=True,
              help="interval bound for the surface link page")
@click.option("--format", "fmt", type=click.Choice(["md", "json"]), default="md")
@click.option("--out", type=click.Path(), default=None)
def e1(datum, which, t_bound, fmt, out):
    """First weight pages E1(X_reg) / E1(L): cell dimension tables."""
    d = _load(datum)
    page = e1_regular(d) if which == "regular" else e1_link(d, l_bound=t_bound)
    cells = {c: page.cell_dims[c] for c in page_cells(page)}
    if fmt == "json":
        _emit(json.dumps(_page_records(page), indent=1), out)
    else:
        _emit(_cells_md(f"E1({'X_reg' if which == 'regular' else 'L'})", cells), out)


@main.command()
@click.option("--datum", required=True, type=click.Path())
@click.option("--t-bound", default=2, show_default=True)
@click.option("--perversity", default="all", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["md", "json"]), default="md")
@click.option("--out", type=click.Path(), default=None)
def e2(datum, t_bound, perversity, fmt, out):
    """IE2 cell tables (Gr^W of IH) per perversity."""
    d = _load(datum)
    try:
        fam = ie1_closed_family(d, t_bound=t_bound)
    except StabilizationFailure as exc:
        click.echo(f"stabilization failure: {exc}", err=True)
        sys.exit(FAIL)
    cuts = _perversities(d, perversity)
    blocks = []
    records = []
    for p in cuts:
        cells = cell_dims(Cohomology(fam.component(p)).algebra)
        blocks.append(_cells_md(f"IE2 at perversity {p}", cells))
        for (r, s), dim in sorted(cells.items()):
            records.append({"perversity": repr(p), "r": r, "s": s, "dim": dim})
    if fmt == "json":
        _emit(json.dumps(records, indent=1), out)
    else:
        _emit("\n\n".join(blocks), out)


@main.command()
@click.option("--datum", required=True, type=click.Path())
@click.option("--t-bound", default=2, show_default=True)
@click.option("--out", type=click.Path(), default=None,
              help="write the witness (matrices and complements) as JSON")
def formality(datum, t_bound, out):
    """Build and verify the formality witness; verdict GM/full/fail."""
    from .formality import build_witness_ordinary, build_witness_surface

    d = _load(datum)
    build = build_witness_ordinary if d.kind == "ordinary" else build_witness_surface
    try:
        w = build(d, t_bound=t_bound)
    except LemmaPreconditionFailed as exc:
        click.echo(f"fail: precondition: {exc}")
        sys.exit(FAIL)
    except (WitnessVerificationFailed, StabilizationFailure) as exc:
        click.echo(f"fail: {exc}")
        sys.exit(FAIL)
    click.echo(f"verdict: {w.scope}")
    for line in w.transcript:
        click.echo(f"  {line}")
    if out:
        w.save(out)
        click.echo(f"witness written to {out}")


@main.command()
@click.option("--datum", required=True, type=click.Path())
@click.option("--t-bound", default=2, show_default=True)
@click.option("--max-degree", default=None, type=int)
def massey(datum, t_bound, max_degree):
    """Exhaustive triple Massey search over basis classes (finite perversities)."""
    from .massey import exhaustive_massey

    d = _load(datum)
    if d.rank_only:
        click.echo("fail: Massey search needs products (rank-only datum)", err=True)
        sys.exit(FAIL)
    try:
        fam = ie1_closed_family(d, t_bound=t_bound)
        defined, offenders = exhaustive_massey(fam, max_degree=max_degree)
    except (StabilizationFailure, PwssError) as exc:
        click.echo(f"fail: {exc}", err=True)
        sys.exit(FAIL)
    click.echo(f"defined triples: {defined}")
    click.echo(f"cosets excluding zero: {len(offenders)}")
    for sys_ in offenders[:5]:
        click.echo(f"  {sys_}")
    if offenders:
        sys.exit(FAIL)


@main.command("cone-build")
@click.option("--surface", required=True, type=click.Path(),
              help="JSON file with the base surface algebra")
@click.option("--hyperplane", required=True,
              help="comma separated H^2 coefficients of the hyperplane class")
@click.option("--out", required=True, type=click.Path())
def cone_build(surface, hyperplane, out):
    """Build the projective-cone datum of a surface and write it."""
    from fractions import Fraction

    from .datum import _algebra_from_json
    from .errors import DegenerateHyperplaneClass

    try:
        with open(surface) as fh:
            obj = json.load(fh)
        hs = _algebra_from_json(obj, "H(S)")
    except (OSError, KeyError, ValueError) as exc:
        click.echo(f"cannot read surface algebra: {exc}", err=True)
        sys.exit(USAGE)
    try:
        w = [Fraction(v) for v in hyperplane.split(",")]
    except ValueError as exc:
        click.echo(f"bad hyperplane class: {exc}", err=True)
        sys.exit(USAGE)
    try:
        d = cone_datum(hs, w)
    except DegenerateHyperplaneClass as exc:
        click.echo(f"fail: {exc}", err=True)
        sys.exit(FAIL)
    except InvariantViolation as exc:
        click.echo(f"fail: {exc}", err=True)
        sys.exit(FAIL)
    save_datum(d, out)
    click.echo(f"cone datum written to {out}")


if __name__ == "__main__":
    main()
