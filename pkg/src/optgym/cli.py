"""The optgym command line interface."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

import optgym
from optgym.datasets import RemoteManifest, default_registry
from optgym.errors import DigestMismatchError, OptGymError
from optgym.state import EnvState


@click.group()
def main():
    """Compiler optimization environments: explore, search, replay, serve."""


def _echo_state(state: EnvState) -> None:
    click.echo(f"env:        {state.env_id}")
    click.echo(f"benchmark:  {state.benchmark}")
    click.echo(f"actions:    {len(state.actions)}")
    click.echo(f"cumulative: {state.cumulative_reward:+.6g}")
    click.echo(f"digest:     {state.state_digest}")


@main.command()
@click.option("--env", "env_spec", required=True)
@click.option("--benchmark", required=True)
@click.option("--compiler", default=None, help="gcc backend: compiler specifier")
def shell(env_spec, benchmark, compiler):
    """Interactive read-eval loop over one environment."""
    from optgym.shell import run_shell

    kwargs = {"compiler": compiler} if compiler else {}
    run_shell(env_spec, benchmark, **kwargs)


@main.command()
@click.argument("state_file", type=click.Path(exists=True))
@click.option("--local-dataset", type=click.Path(exists=True), default=None,
              help="directory to register as user-v0 before replaying")
def replay(state_file, local_dataset):
    """Replay a serialized state and print the resulting episode."""
    state = EnvState.load(state_file)
    datasets = default_registry()
    if local_dataset:
        datasets.add_local_dataset(local_dataset)
    env = optgym.restore_state(state, datasets=datasets)
    try:
        _echo_state(env.serialize_state())
        click.echo("replay ok: digest matches")
    finally:
        env.close()


@main.command()
@click.argument("state_file", type=click.Path(exists=True))
@click.option("--local-dataset", type=click.Path(exists=True), default=None)
def validate(state_file, local_dataset):
    """Exit nonzero when a serialized state fails to replay bit-exactly."""
    state = EnvState.load(state_file)
    datasets = default_registry()
    if local_dataset:
        datasets.add_local_dataset(local_dataset)
    try:
        env = optgym.restore_state(state, datasets=datasets)
    except DigestMismatchError as e:
        click.echo(f"INVALID: {e.message}")
        sys.exit(1)
    except OptGymError as e:
        click.echo(f"ERROR [{e.code}]: {e.message}")
        sys.exit(2)
    env.close()
    click.echo("VALID")


@main.group()
def datasets():
    """List, install, and register benchmark datasets."""


@datasets.command("list")
@click.option("--env", "env_spec", default=None)
def datasets_list(env_spec):
    for ds in default_registry().list(env_spec):
        click.echo(f"{ds.name:24s} origin={ds.origin:<14s} size={ds.size}")


@datasets.command("install")
@click.argument("name")
@click.option("--manifest", type=click.Path(exists=True), default=None,
              help="JSON file with {name, url, sha256, layout}")
def datasets_install(name, manifest):
    registry = default_registry()
    if manifest:
        registry.register_manifest(RemoteManifest.from_dict(json.loads(Path(manifest).read_text())))
    ds = registry.install_remote(name)
    click.echo(f"installed {ds.name}: {ds.size} benchmarks")


@datasets.command("add")
@click.argument("directory", type=click.Path(exists=True))
def datasets_add(directory):
    ds = default_registry().add_local_dataset(directory)
    click.echo(f"registered {ds.name}: {ds.size} benchmarks")
    for uri in ds.benchmarks():
        click.echo(f"  {uri}")


@main.command()
@click.option("--env", "env_spec", required=True)
@click.option("--benchmark", required=True)
@click.option("--technique", type=click.Choice(["random", "greedy", "hillclimb", "ga"]),
              required=True)
@click.option("--budget-seconds", type=float, default=None)
@click.option("--budget-evals", type=int, default=None)
@click.option("--patience", type=int, default=None)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(), default=None)
@click.option("--local-dataset", type=click.Path(exists=True), default=None)
@click.option("--compiler", default=None)
def search(env_spec, benchmark, technique, budget_seconds, budget_evals, patience, seed, out,
           local_dataset, compiler):
    """Run one search technique on one benchmark."""
    from optgym.autotune import SearchBudget
    from optgym.autotune.runner import run_search

    budget = SearchBudget(
        wall_seconds=budget_seconds, max_compilations=budget_evals, patience=patience
    )
    datasets = default_registry()
    if local_dataset:
        datasets.add_local_dataset(local_dataset)
    make_kwargs = {"compiler": compiler} if compiler else {}
    result = run_search(
        env_spec, benchmark, technique, budget, seed=seed, datasets=datasets,
        out_dir=out, make_kwargs=make_kwargs,
    )
    click.echo(
        f"{technique} on {benchmark}: best={result.best_metric:+.6g} "
        f"evaluations={result.evaluations} wall={result.wall_seconds:.1f}s"
    )
    if out:
        click.echo(f"result written to {out}")


@main.command()
@click.argument("results_dir", type=click.Path(exists=True))
def report(results_dir):
    """Geomean size-reduction table over a directory of search results."""
    from optgym.autotune.report import format_report, geomean_report, load_results_dir

    results = load_results_dir(results_dir)
    if not results:
        click.echo("no results found")
        sys.exit(1)
    click.echo(format_report(geomean_report(results)))


@main.group()
def db():
    """Operate on a state-transition store."""


@db.command("dedup")
@click.argument("store_path", type=click.Path(exists=True))
def db_dedup(store_path):
    from optgym.tdb import TransitionStore

    store = TransitionStore(store_path)
    created = store.dedup_transitions()
    click.echo(f"created {created} transitions")
    if store.nondeterminism_findings:
        click.echo(f"WARNING: {len(store.nondeterminism_findings)} nondeterministic transitions")
    store.close()


@db.command("export")
@click.argument("store_path", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), required=True)
def db_export(store_path, out):
    from optgym.tdb import TransitionStore

    store = TransitionStore(store_path)
    counts = store.export(out)
    for name, count in counts.items():
        click.echo(f"{name}: {count} rows")
    store.close()


@main.command("gcc-space")
@click.option("--compiler", default="gcc")
@click.option("--dump", is_flag=True, help="print the full extracted space as JSON")
def gcc_space(compiler, dump):
    """Extract and summarize a compiler's optimization space."""
    from optgym.gcc import categorical_actions, extract_space, space_size_log10

    spec = extract_space(compiler)
    if dump:
        click.echo(json.dumps(spec.to_dict(), indent=2, sort_keys=True))
        return
    click.echo(f"compiler: {spec.version}")
    click.echo(f"options:  {len(spec.options)}")
    click.echo(f"actions:  {len(categorical_actions(spec))}")
    click.echo(f"log10(space size): {space_size_log10(spec):.1f}")


@main.command()
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
@click.option("--static", "static_dir", type=click.Path(exists=True), default=None,
              help="directory of built UI assets to serve at /")
@click.option("--local-dataset", type=click.Path(exists=True), default=None)
def serve(port, host, static_dir, local_dataset):
    """Run the HTTP session service (and, optionally, the explorer UI)."""
    import uvicorn

    from optgym.rest import create_app

    datasets = default_registry()
    if local_dataset:
        datasets.add_local_dataset(local_dataset)
    app = create_app(datasets=datasets, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
