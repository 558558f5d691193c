"""Command-line façade over the document formats and the solver.

Exit codes: 0 on success, 1 for usage/IO/validation problems, 2 is reserved
for `check` reporting an inadmissible pair. All outputs are deterministic:
the same inputs produce byte-identical documents.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .diagonals import REPAIR_MODES, check_compatibility, extract_diagonals, repair
from .formats import Document, DocumentError, export_mesh, read_document, write_document
from .solver import SolverError, dimension_formula, fill_free, realize, solve_prescription
from .bezier import eval_surface

_MODE_CHOICES = click.Choice(["diagonals", "boundary", "c1"])


def _read_payload(path: str, expected_kind: str):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise click.ClickException(f"cannot read {path}: {exc.strerror or exc}") from None
    doc = read_document(data)
    if doc.kind != expected_kind:
        raise click.ClickException(f"{path}: expected a {expected_kind} document, found {doc.kind}")
    return doc.payload


def _emit(data: bytes, output: str | None):
    if output is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        try:
            Path(output).write_bytes(data)
        except OSError as exc:
            raise click.ClickException(f"cannot write {output}: {exc.strerror or exc}") from None


def _parse_free_option(values: tuple[str, ...]) -> dict[tuple[int, int], list[float]]:
    out: dict[tuple[int, int], list[float]] = {}
    for item in values:
        head, sep, tail = item.partition("=")
        if not sep:
            raise click.BadParameter(f"{item!r} (expected i,j=x,y,...)", param_hint="--free")
        try:
            i, j = (int(part) for part in head.split(","))
            coords = [float(part) for part in tail.split(",")]
        except ValueError:
            raise click.BadParameter(f"{item!r} (expected i,j=x,y,...)", param_hint="--free") from None
        out[(i, j)] = coords
    return out


@click.group(name="diagpatch")
@click.version_option(package_name="diagpatch")
def cli():
    """Bezier patches with prescribed diagonal curves."""


@cli.command()
@click.argument("net_doc", metavar="NET")
@click.option("-o", "--output", metavar="PAIR", help="Output path (stdout by default).")
def extract(net_doc, output):
    """Extract the two diagonal curves of NET as a diagonal_pair document."""
    net = _read_payload(net_doc, "net")
    _emit(write_document(extract_diagonals(net)), output)


@cli.command()
@click.argument("pair_doc", metavar="PAIR")
@click.option("--tol", type=float, default=None, help="Relative tolerance (default 1e-9).")
def check(pair_doc, tol):
    """Print an admissibility report for PAIR; exit 2 when inadmissible."""
    pair = _read_payload(pair_doc, "diagonal_pair")
    report = check_compatibility(pair) if tol is None else check_compatibility(pair, tol)
    _emit(write_document(report), None)
    return 0 if report.admissible else 2


@cli.command(name="repair")
@click.argument("pair_doc", metavar="PAIR")
@click.option("--mode", "mode", type=click.Choice(list(REPAIR_MODES)), required=True)
@click.option("-o", "--output", metavar="PAIR", help="Output path (stdout by default).")
def repair_cmd(pair_doc, mode, output):
    """Rewrite PAIR into an admissible pair with the chosen strategy."""
    pair = _read_payload(pair_doc, "diagonal_pair")
    try:
        fixed = repair(pair, mode)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from None
    _emit(write_document(fixed), output)


@cli.command()
@click.argument("prescription_doc", metavar="PRESCRIPTION")
@click.option("-o", "--output", metavar="SPACE", help="Output path (stdout by default).")
def solve(prescription_doc, output):
    """Solve PRESCRIPTION into a solution_space document."""
    prescription = _read_payload(prescription_doc, "prescription")
    space = solve_prescription(prescription)
    _emit(write_document(space), output)


@cli.command(name="realize")
@click.argument("space_doc", metavar="SPACE")
@click.option("--free", "free_values", metavar="i,j=x,y,...", multiple=True,
              help="Value for one free slot; repeatable.")
@click.option("--fill", type=click.Choice(["coons", "dirichlet"]), default=None,
              help="Refill unassigned free slots with this strategy instead of the stored fill.")
@click.option("-o", "--output", metavar="NET", help="Output path (stdout by default).")
def realize_cmd(space_doc, free_values, fill, output):
    """Produce one net from SPACE, optionally pinning free slots."""
    space = _read_payload(space_doc, "solution_space")
    values = dict(fill_free(space, fill)) if fill else {}
    try:
        values.update(_parse_free_option(free_values))
        net = realize(space, values)
    except KeyError as exc:
        raise click.ClickException(str(exc.args[0])) from None
    except ValueError as exc:
        raise click.ClickException(str(exc)) from None
    _emit(write_document(net), output)


@cli.command()
@click.argument("n", type=int)
@click.option("--mode", type=_MODE_CHOICES, required=True)
def dims(n, mode):
    """Print the solution-space dimension for degree N under MODE."""
    result = dimension_formula(n, mode)
    suffix = " formula-exempt" if result.formula_exempt else ""
    click.echo(f"{result.dimension}{suffix}")


@cli.command(name="eval")
@click.argument("net_doc", metavar="NET")
@click.option("--u", type=float, required=True)
@click.option("--v", type=float, required=True)
def eval_cmd(net_doc, u, v):
    """Print the surface point of NET at (u, v)."""
    net = _read_payload(net_doc, "net")
    try:
        point = eval_surface(net, u, v)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from None
    click.echo(" ".join(repr(float(c)) for c in point))


@cli.command()
@click.argument("net_doc", metavar="NET")
@click.option("--samples", type=int, default=16, show_default=True)
@click.option("--diagonals", is_flag=True, help="Append the diagonal curves as polylines.")
@click.option("-o", "--output", metavar="OBJ", help="Output path (stdout by default).")
def mesh(net_doc, samples, diagonals, output):
    """Triangulate NET into a Wavefront OBJ mesh."""
    net = _read_payload(net_doc, "net")
    try:
        data = export_mesh(net, samples, include_diagonals=diagonals)
    except ValueError as exc:
        raise click.ClickException(str(exc)) from None
    _emit(data, output)


def main(argv=None) -> int:
    """Entry point mapping every failure to exit 1; exit 2 is reserved for check."""
    try:
        rv = cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except (DocumentError, SolverError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":
    sys.exit(main())
