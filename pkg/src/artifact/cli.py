"""Command-line front end: batch experiments, bound tables, acceptance suite.

Every stochastic subcommand takes --seed and reports reproducible rows; see
the experiments module for the per-trial PRNG stream convention.  The
simulator refuses states above GSIP_QUBIT_CAP qubits (default 24).
"""

from __future__ import annotations

import json
import math
import sys

import click
import numpy as np

from . import bounds
from .experiments import (ExperimentConfig, run_experiment, write_csv,
                          write_json_lines)
from .graphs import Graph, complete_graph, triangle_strip, triangular_lattice
from .mbqc import MeasurementPattern
from .protocol import run_amplified
from .provers import strategy_from_json
from .selftest import default_parameters


def _load_json_arg(value: str) -> dict:
    """Accept either a path to a JSON file or an inline JSON object."""
    text = value.strip()
    if text.startswith("{") or text.startswith("["):
        return json.loads(text)
    with open(value) as fh:
        return json.load(fh)


def _load_graph(value: str) -> Graph:
    return Graph.from_json(_load_json_arg(value))


def _load_pattern(value: str) -> MeasurementPattern:
    return MeasurementPattern.from_json(_load_json_arg(value))


def _parse_labels(value: str | None) -> tuple | None:
    if value is None:
        return None
    obj = _load_json_arg(value)
    if not isinstance(obj, list):
        raise click.BadParameter("labels must be a JSON list")
    return tuple(tuple(l) if isinstance(l, list) else l for l in obj)


def _parse_options(pairs: tuple[str, ...]) -> dict:
    opts = {}
    for pair in pairs:
        if "=" not in pair:
            raise click.BadParameter(f"option {pair!r} is not key=value")
        key, raw = pair.split("=", 1)
        try:
            opts[key] = json.loads(raw)
        except json.JSONDecodeError:
            opts[key] = raw
    return opts


def _emit(record, out: str | None, as_csv: bool) -> None:
    writer = write_csv if as_csv else write_json_lines
    if out is None or out == "-":
        writer(record, sys.stdout)
    else:
        with open(out, "w", newline="") as fh:
            writer(record, fh)
        click.echo(f"wrote {out}", err=True)


def _build_config(**kwargs) -> ExperimentConfig:
    try:
        return ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc


def _run_and_emit(cfg: ExperimentConfig, jobs: int, out: str | None,
                  as_csv: bool) -> None:
    try:
        record = run_experiment(cfg, jobs=jobs)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    _emit(record, out, as_csv)


_COMMON = [
    click.option("--graph", "graph_src", required=True,
                 help="graph JSON file or inline JSON"),
    click.option("--strategy", "strategy_src", default=None,
                 help="prover strategy JSON (file or inline); default honest"),
    click.option("--theta", type=float, default=math.pi / 4, show_default=True,
                 help="measurement angle applied to every vertex"),
    click.option("--trials", type=int, required=True),
    click.option("--seed", type=int, required=True),
    click.option("--jobs", type=int, default=1, show_default=True),
    click.option("--out", default=None, help="output path (default stdout)"),
    click.option("--csv", "as_csv", is_flag=True, help="emit CSV rows"),
]


def _with_common(fn):
    for opt in reversed(_COMMON):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Graph-state interactive-proof simulator."""


@main.command("gen-graph")
@click.option("--family", type=click.Choice(
    ["k3", "complete", "triangle-strip", "triangular-lattice"]), required=True)
@click.option("--n", type=int, default=None, help="vertex count (complete)")
@click.option("-k", type=int, default=None, help="strip length")
@click.option("--rows", type=int, default=None)
@click.option("--cols", type=int, default=None)
@click.option("--out", default=None)
def gen_graph(family, n, k, rows, cols, out):
    """Write a graph from a named family as JSON."""
    if family == "k3":
        g = complete_graph(3)
    elif family == "complete":
        if n is None:
            raise click.BadParameter("complete needs --n")
        g = complete_graph(n)
    elif family == "triangle-strip":
        if k is None:
            raise click.BadParameter("triangle-strip needs -k")
        g = triangle_strip(k)
    else:
        if rows is None or cols is None:
            raise click.BadParameter("triangular-lattice needs --rows/--cols")
        g = triangular_lattice(rows, cols)
    text = json.dumps(g.to_json())
    if out is None or out == "-":
        click.echo(text)
    else:
        with open(out, "w") as fh:
            fh.write(text + "\n")
        click.echo(f"wrote {out}", err=True)


@main.command()
@_with_common
def selftest(graph_src, strategy_src, theta, trials, seed, jobs, out, as_csv):
    """Run the one-shot honesty test repeatedly and report the accept rate."""
    cfg = _build_config(
        kind="selftest", graph=_load_graph(graph_src), theta=theta,
        strategy=None if strategy_src is None else _load_json_arg(strategy_src),
        trials=trials, seed=seed)
    _run_and_emit(cfg, jobs, out, as_csv)


@main.command()
@_with_common
@click.option("--pattern", "pattern_src", required=True,
              help="measurement pattern JSON (file or inline)")
def mbqc(graph_src, strategy_src, theta, trials, seed, jobs, out, as_csv,
         pattern_src):
    """Drive an adaptive measurement pattern and tally the output bit."""
    cfg = _build_config(
        kind="mbqc", graph=_load_graph(graph_src), theta=theta,
        strategy=None if strategy_src is None else _load_json_arg(strategy_src),
        pattern=_load_pattern(pattern_src), trials=trials, seed=seed)
    _run_and_emit(cfg, jobs, out, as_csv)


@main.command("isometry-check")
@_with_common
@click.option("--labels", "labels_src", default=None,
              help='JSON list of operator labels, e.g. \'["I",["X",0]]\'')
def isometry_check(graph_src, strategy_src, theta, trials, seed, jobs, out,
                   as_csv, labels_src):
    """Measure swap-isometry distances against their closed-form bounds."""
    cfg = _build_config(
        kind="isometry", graph=_load_graph(graph_src), theta=theta,
        strategy=None if strategy_src is None else _load_json_arg(strategy_src),
        labels=_parse_labels(labels_src), trials=trials, seed=seed)
    _run_and_emit(cfg, jobs, out, as_csv)


@main.command("bounds")
@click.option("--kind", default=None,
              help="bound name (thm2, lemma1, ..., thm1_n); omit for a table")
@click.option("--param", "params", multiple=True,
              help="key=value, repeatable (eps=1e-4 n=3 edges=3 ...)")
@click.option("--out", default=None)
def bounds_cmd(kind, params, out):
    """Evaluate closed-form error bounds."""
    opts = _parse_options(params)
    if kind is not None:
        value = bounds.evaluate(kind, **opts)
        key = kind.lower().replace("_", "").replace("-", "")
        text = json.dumps({"kind": kind, "value": value,
                           "formula": bounds.FORMULAS[key],
                           "inputs": opts}, sort_keys=True)
        if out is None or out == "-":
            click.echo(text)
        else:
            with open(out, "w") as fh:
                fh.write(text + "\n")
        return
    cfg = ExperimentConfig(kind="bounds", options=opts)
    _emit(run_experiment(cfg), out, False)


@main.command()
@click.option("--graph", "graph_src", required=True)
@click.option("--pattern", "pattern_src", required=True)
@click.option("--strategy", "strategy_src", default=None)
@click.option("--theta", type=float, default=math.pi / 4, show_default=True)
@click.option("--delta", type=float, default=0.1, show_default=True)
@click.option("--q", type=float, default=None,
              help="coin bias; default from the optimal-coin formula")
@click.option("--rounds", type=int, default=None,
              help="repetitions; default from the Hoeffding count")
@click.option("--seed", type=int, required=True)
@click.option("--option", "extra", multiple=True, help="key=value overrides")
def prove(graph_src, pattern_src, strategy_src, theta, delta, q, rounds, seed,
          extra):
    """One amplified protocol run; exit 0 on accept, 1 on reject."""
    from .experiments import _protocol_setup

    graph = _load_graph(graph_src)
    options = _parse_options(extra)
    options.setdefault("delta", delta)
    if q is not None:
        options["q"] = q
    if rounds is not None:
        options["n_rounds"] = rounds
    cfg = ExperimentConfig(kind="protocol", graph=graph, theta=theta,
                           strategy=None if strategy_src is None
                           else _load_json_arg(strategy_src),
                           pattern=_load_pattern(pattern_src),
                           trials=1, seed=seed, options=options)
    try:
        params, proto_cfg, meta = _protocol_setup(cfg)
        rng = np.random.default_rng([seed, 0])
        spec = cfg.strategy or {"kind": "honest"}
        theta_map = {v: params.theta[v] for v in range(len(params.theta))}
        p = strategy_from_json(spec, graph, theta_map, rng)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc
    result = run_amplified(p, proto_cfg, rng)
    payload = result.to_json()
    payload["setup"] = meta
    click.echo(json.dumps(payload, sort_keys=True))
    sys.exit(0 if result.accepted else 1)


@main.command()
@click.option("--only", default=None,
              help="comma-separated criterion numbers, e.g. 1,3,10")
@click.option("--fast", is_flag=True,
              help="shrink trial counts for a quick smoke pass")
def accept(only, fast):
    """Run the acceptance suite; one pass/fail line per criterion."""
    from .acceptance import run_suite

    selected = None
    if only:
        selected = [int(tok) for tok in only.split(",") if tok.strip()]
    ok = run_suite(selected=selected, fast=fast, stream=sys.stdout)
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
