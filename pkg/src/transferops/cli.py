"""Command-line front door: a thin client over the service operations.

Every run is reproducible from its flag set: iteration orders are fixed,
output JSON is key-sorted, and repeated runs on identical inputs are
byte-identical.  Exit codes separate the three outcomes scripting cares
about: 0 = success/pass, 2 = mathematical negative (fail with witness),
1 = broken input or unknown command.

With --server URL the same request models are POSTed to a running service
instead of executed in-process; the report format is identical.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import click

from . import __version__
from .cpmaps import InternalConsistencyError, MatrixDocumentError
from .fixtures import GRAPH_DOCS, MATRIX_DOCS
from .service import ops
from .service.models import GraphRequest, MatrixRequest

EXIT_PASS, EXIT_INPUT, EXIT_FAIL = 0, 1, 2


class CliInputError(click.ClickException):
    exit_code = EXIT_INPUT


def _load_config(path):
    if not path:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliInputError(f"config: {exc}")
    if not isinstance(cfg, dict):
        raise CliInputError("config must be a JSON object")
    return cfg


def _merged(ctx, cfg, name, value):
    """Explicit flag > config file > click default."""
    src = ctx.get_parameter_source(name)
    if src is not None and src.name == "DEFAULT" and name in cfg:
        return cfg[name]
    return value


def _graph_request(path, lam, depth, budget, allow_float):
    if os.path.exists(path):
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CliInputError(str(exc))
        payload = {"document": doc}
    elif path in GRAPH_DOCS:
        payload = {"fixture": path}
    else:
        raise CliInputError(f"file not found: {path}")
    payload.update(
        lambda_mode="uniform" if lam == "uniform" else "embedded",
        depth=depth,
        budget=budget,
        allow_float=allow_float,
    )
    try:
        return GraphRequest(**payload)
    except ValueError as exc:
        raise CliInputError(str(exc))


def _matrix_request(path, blocks=None):
    if os.path.exists(path):
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            raise CliInputError(str(exc))
        stripped = text.lstrip()
        if stripped.startswith("[") or stripped.startswith("{"):
            try:
                doc = json.loads(text)
                if isinstance(doc, dict):
                    doc = doc["matrix"]
            except (json.JSONDecodeError, KeyError) as exc:
                raise CliInputError(str(exc))
        else:
            # CSV of rationals
            doc = [
                [cell.strip() for cell in line.split(",")]
                for line in stripped.splitlines()
                if line.strip()
            ]
        payload = {"matrix": doc}
    elif path in MATRIX_DOCS:
        payload = {"fixture": path}
    else:
        raise CliInputError(f"file not found: {path}")
    if blocks is not None:
        if isinstance(blocks, dict):
            blocks = blocks.get("blocks")
        payload["subalgebra"] = blocks
    try:
        return MatrixRequest(**payload)
    except ValueError as exc:
        raise CliInputError(str(exc))


def _emit(reports, table):
    if table:
        for name, rep in reports:
            click.echo(f"== {name}")
            for line in _tabulate(rep):
                click.echo(line)
        return
    if len(reports) == 1:
        doc = reports[0][1]
    else:
        doc = {"reports": [{"input": n, "report": r} for n, r in reports]}
    click.echo(json.dumps(doc, sort_keys=True, separators=(",", ":")))


def _tabulate(doc, prefix=""):
    lines = []
    if isinstance(doc, dict):
        for k in sorted(doc):
            v = doc[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{prefix}{k}:")
                lines.extend(_tabulate(v, prefix + "  "))
            else:
                lines.append(f"{prefix}{k}: {v}")
    elif isinstance(doc, list):
        for v in doc:
            if isinstance(v, (dict, list)):
                lines.extend(_tabulate(v, prefix + "  "))
            else:
                lines.append(f"{prefix}- {v}")
    return lines


def _run_requests(route, local_fn, requests, server, jobs):
    """Run (name, request) pairs locally or against a remote service."""

    def one(item):
        name, req = item
        if server:
            import httpx

            resp = httpx.post(f"{server.rstrip('/')}{route}", json=req.model_dump(mode="json", by_alias=True))
            if resp.status_code == 400:
                raise CliInputError(resp.json().get("detail", "bad input"))
            resp.raise_for_status()
            return name, resp.json()
        try:
            result = local_fn(req)
        except ops.InputError as exc:
            raise CliInputError(str(exc))
        return name, json.loads(result.model_dump_json(by_alias=True))

    if jobs > 1 and len(requests) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            done = list(pool.map(one, requests))
    else:
        done = [one(it) for it in requests]
    return done


def _finish(reports, table):
    _emit(reports, table)
    if any(r.get("outcome") == "fail" for _n, r in reports):
        sys.exit(EXIT_FAIL)
    sys.exit(EXIT_PASS)


common_graph_options = [
    click.option("--lambda", "lam", type=click.Choice(["embedded", "uniform"]), default="embedded",
                 help="edge weights: embedded in the document, or uniform 1/outdegree"),
    click.option("--depth", type=int, default=3, show_default=True),
    click.option("--budget", type=int, default=10000, show_default=True),
    click.option("--float", "allow_float", is_flag=True,
                 help="accept floating weights (converted exactly via binary expansion)"),
    click.option("--table", is_flag=True, help="human-readable output instead of JSON"),
    click.option("--config", "config_path", type=str, default=None,
                 help="JSON file with default flag values"),
    click.option("--server", type=str, default=None, help="POST to a running service"),
    click.option("--jobs", type=int, default=1, show_default=True,
                 help="parallel workers for multiple inputs"),
]


def _wrap(opts, fn):
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(__version__)
def main():
    """Transfer-operator calculus on graph diagonal algebras, and positive
    maps on finite point sets."""


@main.group()
def graph():
    """Analyses of weighted graphs and their diagonal-algebra systems."""


@main.group()
def cp():
    """Analyses of positive maps given as nonnegative rational matrices."""


@main.group(name="exel")
def exel_group():
    """Exel-system structure over finite commutative algebras."""


@main.group()
def fixtures():
    """The shipped fixture corpus."""


def _graph_command(name, route, local_fn, help_text):
    @click.argument("paths", nargs=-1, required=True)
    @click.pass_context
    def cmd(ctx, paths, lam, depth, budget, allow_float, table, config_path, server, jobs):
        cfg = _load_config(config_path)
        lam = _merged(ctx, cfg, "lam", lam)
        depth = int(_merged(ctx, cfg, "depth", depth))
        budget = int(_merged(ctx, cfg, "budget", budget))
        jobs = int(_merged(ctx, cfg, "jobs", jobs))
        allow_float = bool(_merged(ctx, cfg, "allow_float", allow_float))
        table = bool(_merged(ctx, cfg, "table", table))
        server = _merged(ctx, cfg, "server", server)
        reqs = [(p, _graph_request(p, lam, depth, budget, allow_float)) for p in paths]
        reports = _run_requests(route, local_fn, reqs, server, jobs)
        _finish(reports, table)

    cmd = _wrap(common_graph_options, cmd)
    cmd.__name__ = name.replace("-", "_")
    return graph.command(name=name, help=help_text)(cmd)


classify_cmd = _graph_command(
    "classify", "/graph/classify", ops.graph_classify,
    "Exel/regular/corner classification of the weighted graph system.")
check_lambda_cmd = _graph_command(
    "check-lambda", "/graph/check-lambda", ops.graph_check_lambda,
    "Boundedness conditions for the weighted transfer operator.")
ideals_cmd = _graph_command(
    "ideals", "/graph/ideals", ops.graph_ideals,
    "Kernel ideal, annihilator, compact-preimage ideal, covariance span.")
represent_cmd = _graph_command(
    "represent", "/graph/represent", ops.graph_represent,
    "Concrete matrix representation with exact identity verification.")


def _matrix_command(group, name, route, local_fn, help_text, with_blocks=False):
    @click.argument("paths", nargs=-1, required=True)
    @click.option("--blocks", type=str, default=None,
                  help='subalgebra as JSON blocks, e.g. "[[0,1],[2]]"')
    @click.option("--table", is_flag=True)
    @click.option("--config", "config_path", type=str, default=None)
    @click.option("--server", type=str, default=None)
    @click.option("--jobs", type=int, default=1)
    @click.pass_context
    def cmd(ctx, paths, blocks, table, config_path, server, jobs):
        cfg = _load_config(config_path)
        jobs = int(_merged(ctx, cfg, "jobs", jobs))
        table = bool(_merged(ctx, cfg, "table", table))
        server = _merged(ctx, cfg, "server", server)
        blocks = _merged(ctx, cfg, "blocks", blocks)
        parsed_blocks = None
        if blocks is not None:
            if not with_blocks:
                raise CliInputError("--blocks is not accepted by this command")
            if isinstance(blocks, str):
                try:
                    parsed_blocks = json.loads(blocks)
                except json.JSONDecodeError as exc:
                    raise CliInputError(f"--blocks: {exc}")
            else:
                parsed_blocks = blocks
        reqs = [(p, _matrix_request(p, parsed_blocks)) for p in paths]
        reports = _run_requests(route, local_fn, reqs, server, jobs)
        _finish(reports, table)

    cmd.__name__ = name.replace("-", "_")
    return group.command(name=name, help=help_text)(cmd)


analyze_cmd = _matrix_command(
    cp, "analyze", "/cp/analyze", ops.cp_analyze,
    "Norm, GNS-kernel, multiplicative domain; faithfulness and conditional "
    "expectation against --blocks.", with_blocks=True)
quiver_cmd = _matrix_command(
    cp, "quiver", "/cp/quiver", ops.cp_quiver,
    "Support relation and quiver of the map, with exact round trip.")
correspondence_cmd = _matrix_command(
    cp, "correspondence", "/cp/correspondence", ops.cp_correspondence,
    "GNS correspondence: dimension, actions, Katsura support, compact frame.")
enumerate_regular_cmd = _matrix_command(
    exel_group, "enumerate-regular", "/exel/enumerate-regular", ops.exel_enumerate_regular,
    "All unit-preserving regular endomorphisms for the given transfer matrix.")


@fixtures.command(name="list")
@click.option("--table", is_flag=True)
@click.option("--server", type=str, default=None)
def fixtures_list(table, server):
    """Print the shipped corpus (canonical graphs, matrices, 20 seeded
    regression graphs)."""
    if server:
        import httpx

        resp = httpx.get(f"{server.rstrip('/')}/fixtures")
        resp.raise_for_status()
        report = resp.json()
    else:
        report = json.loads(ops.fixtures_list().model_dump_json())
    _emit([("fixtures", report)], table)
    sys.exit(EXIT_PASS)


def entrypoint():
    """Exit-code-stable wrapper: usage errors and bad inputs are 1, never
    click's default 2 (which is reserved for mathematical negatives)."""
    try:
        main(standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        sys.exit(EXIT_INPUT)
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        sys.exit(exc.exit_code)
    except click.exceptions.Abort:
        sys.exit(EXIT_INPUT)
    except (MatrixDocumentError, InternalConsistencyError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)


if __name__ == "__main__":
    entrypoint()
