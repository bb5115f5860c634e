"""Command-line client for the synthesis service.

Runs the service handlers in-process by default; with --server, posts the
same request models to a running instance over HTTP.
"""

from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Optional, Tuple

import click

from .core import ContractError
from .service import (
    CostRequest,
    CostResponse,
    EnumerateRequest,
    EnumerateResponse,
    SynthRequest,
    SynthResponse,
    TransformRequest,
    TransformResponse,
    VerifyRequest,
    VerifyResponse,
    handle_cost,
    handle_enumerate,
    handle_synth,
    handle_transform,
    handle_verify,
)

__all__ = ["main"]


def _call(server: Optional[str], path: str, req, handler, response_model):
    if server is None:
        return handler(req)
    import httpx

    resp = httpx.post(
        server.rstrip("/") + path, json=req.model_dump(), timeout=600.0
    )
    if resp.status_code != 200:
        detail = resp.json().get("detail", resp.text)
        raise ContractError(f"server error: {detail}")
    return response_model.model_validate(resp.json())


def _read(path: Optional[str]) -> Optional[str]:
    if path is None:
        return None
    return Path(path).read_text()


def _fail(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(2)


@click.group()
@click.option("--server", default=None, help="Base URL of a running service.")
@click.option("-v", "--verbose", is_flag=True, help="Log search progress.")
@click.pass_context
def main(ctx: click.Context, server: Optional[str], verbose: bool) -> None:
    """MVI Reed-Muller synthesis toolkit."""
    ctx.obj = {"server": server}
    if verbose:
        logging.basicConfig(level=logging.INFO, format="%(message)s")


method_opt = click.option(
    "--method",
    type=click.Choice(["products-matching", "butterfly"]),
    default="butterfly",
    show_default=True,
)
infile_opt = click.option(
    "--in", "in_path", required=True, help="Function file (DSL)."
)
polarity_opt = click.option(
    "--polarity", "polarity_path", default=None, help="Polarity file (DSL)."
)


@main.command()
@infile_opt
@polarity_opt
@method_opt
@click.option(
    "--target",
    type=click.Choice(["fprm", "grm", "esop"]),
    default="fprm",
    show_default=True,
)
@click.option("--pairing", type=click.Choice(["fixed", "exhaustive"]), default="fixed")
@click.option("--mirror", is_flag=True, help="Append mirror gates.")
@click.option(
    "--emit",
    "emits",
    multiple=True,
    type=click.Choice(["report", "netlist", "qasm"]),
    default=("report",),
    show_default=True,
)
@click.option("--search", default=None, help="exhaustive or sample:K.")
@click.option("--objective", type=click.Choice(["maslov", "tqc"]), default="maslov")
@click.option("--full-polarities", is_flag=True)
@click.option("--max-group", default=3, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--top", default=1, show_default=True)
@click.option("--jobs", default=1, show_default=True)
@click.option("--out", "out_dir", default=".", show_default=True)
@click.pass_context
def synth(
    ctx: click.Context,
    in_path: str,
    polarity_path: Optional[str],
    method: str,
    target: str,
    pairing: str,
    mirror: bool,
    emits: Tuple[str, ...],
    search: Optional[str],
    objective: str,
    full_polarities: bool,
    max_group: int,
    seed: Optional[int],
    top: int,
    jobs: int,
    out_dir: str,
) -> None:
    """Synthesize a verified circuit (optionally searching the space)."""
    req = SynthRequest(
        source=Path(in_path).read_text(),
        polarity_source=_read(polarity_path),
        method=method,
        target=target,
        mirror=mirror,
        emit=list(emits),
        search=search,
        pairing=pairing,
        max_group=max_group,
        full_polarities=full_polarities,
        objective=objective,
        seed=seed,
        top=top,
        jobs=jobs,
    )
    try:
        resp: SynthResponse = _call(
            ctx.obj["server"], "/synth", req, handle_synth, SynthResponse
        )
    except ContractError as exc:
        _fail(exc)
    out = Path(out_dir)
    all_ok = True
    for rank, sol in enumerate(resp.solutions):
        stem = "_".join(sol.outputs)
        suffix = f".rank{rank}" if len(resp.solutions) > 1 else ""
        if sol.report:
            click.echo(sol.report, nl=False)
        if sol.netlist:
            path = out / f"{stem}{suffix}.netlist.json"
            path.write_text(sol.netlist)
            click.echo(f"wrote {path}")
        if sol.qasm:
            path = out / f"{stem}{suffix}.qasm"
            path.write_text(sol.qasm)
            click.echo(f"wrote {path}")
        if not sol.verified or sol.ancillas_clean is False:
            all_ok = False
    sys.exit(0 if all_ok and resp.solutions else 1)


@main.command()
@infile_opt
@polarity_opt
@method_opt
@click.pass_context
def transform(
    ctx: click.Context,
    in_path: str,
    polarity_path: Optional[str],
    method: str,
) -> None:
    """Print the MVI-FPRM spectrum without synthesizing."""
    req = TransformRequest(
        source=Path(in_path).read_text(),
        polarity_source=_read(polarity_path),
        method=method,
    )
    try:
        resp: TransformResponse = _call(
            ctx.obj["server"],
            "/transform",
            req,
            handle_transform,
            TransformResponse,
        )
    except ContractError as exc:
        _fail(exc)
    click.echo("variables=" + ",".join(resp.variables))
    click.echo("labels=" + ",".join(resp.labels))
    for c in resp.coefficients:
        idx = ",".join(str(r) for r in c.index)
        click.echo(f"coefficient=({idx}) outputs={','.join(c.outputs)}")


@main.command()
@click.option("--in", "in_path", required=True, help="Netlist file.")
@click.pass_context
def cost(ctx: click.Context, in_path: str) -> None:
    """Re-cost an emitted netlist."""
    req = CostRequest(netlist=Path(in_path).read_text())
    try:
        resp: CostResponse = _call(
            ctx.obj["server"], "/cost", req, handle_cost, CostResponse
        )
    except ContractError as exc:
        _fail(exc)
    for k, c in resp.counts:
        click.echo(f"gates_with_{k}_controls={c}")
    click.echo(f"maslov={resp.maslov}")
    click.echo(f"tqc={resp.tqc}")


@main.command()
@infile_opt
@click.option("--netlist", "netlist_path", required=True, help="Netlist file.")
@click.pass_context
def verify(ctx: click.Context, in_path: str, netlist_path: str) -> None:
    """Check a netlist against a function file; exit 0 iff equivalent."""
    req = VerifyRequest(
        netlist=Path(netlist_path).read_text(),
        source=Path(in_path).read_text(),
    )
    try:
        resp: VerifyResponse = _call(
            ctx.obj["server"], "/verify", req, handle_verify, VerifyResponse
        )
    except ContractError as exc:
        _fail(exc)
    click.echo(f"equivalent={'true' if resp.equivalent else 'false'}")
    if resp.counterexample is not None:
        click.echo(
            "counterexample=" + ",".join(str(v) for v in resp.counterexample)
        )
    sys.exit(0 if resp.equivalent else 1)


@main.command("enumerate")
@click.argument("kind", type=click.Choice(["polarities", "pairings"]))
@click.option("--radix", type=int, default=None)
@click.option("--full-polarities", is_flag=True, help="Drop the P1=1 restriction.")
@click.option("--vars", "variables", default=None, help="Comma-separated names.")
@click.option("--max-group", default=3, show_default=True)
@click.option("--limit", type=int, default=None)
@click.pass_context
def enumerate_cmd(
    ctx: click.Context,
    kind: str,
    radix: Optional[int],
    full_polarities: bool,
    variables: Optional[str],
    max_group: int,
    limit: Optional[int],
) -> None:
    """List canonical polarities or variable pairings."""
    req = EnumerateRequest(
        kind=kind,
        radix=radix,
        first_row_ones=not full_polarities,
        variables=variables.split(",") if variables else None,
        max_group=max_group,
        limit=limit,
    )
    try:
        resp: EnumerateResponse = _call(
            ctx.obj["server"],
            "/enumerate",
            req,
            handle_enumerate,
            EnumerateResponse,
        )
    except ContractError as exc:
        _fail(exc)
    click.echo(f"count={resp.count}")
    for item in resp.items:
        click.echo(";".join(item) if kind == "polarities" else "|".join(item))


if __name__ == "__main__":
    main()
