"""``qtwins twins``: sample twins from a stored snapshot."""

import json
from pathlib import Path

import rich_click as click
from config import settings
from twins import QuantumDigitalTwin, replicate_twins

from .app import CliState, exit_codes, resolve_snapshot

TWINS_MANIFEST = "twins.json"


def cmd_twins(
    store_path: Path,
    key_text: str,
    n: int,
    register_size: int,
    seed: int,
    output_dir: Path,
    identical: bool = False,
) -> list[QuantumDigitalTwin]:
    """Write ``twin_<i>.json`` files and a ``twins.json`` provenance manifest."""
    if register_size > settings.max_register_size:
        raise ValueError(f"register size {register_size} exceeds the cap {settings.max_register_size}")
    snapshot = resolve_snapshot(store_path, key_text)
    twins = replicate_twins(snapshot, n, register_size, seed, identical=identical)
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    files = []
    for i, twin in enumerate(twins):
        path = output_dir / f"twin_{i}.json"
        path.write_text(twin.to_json())
        files.append(path.name)
    manifest = {
        "snapshot": str(snapshot.key),
        "master_seed": seed,
        "n": n,
        "register_size": register_size,
        "identical": identical,
        "twin_seeds": [t.seed for t in twins],
        "files": files,
    }
    (output_dir / TWINS_MANIFEST).write_text(json.dumps(manifest, indent=2) + "\n")
    return twins


@click.command("twins")
@click.argument("key")
@click.option("-n", "--n", "n", type=click.IntRange(min=1), default=5, show_default=True, help="Number of twins.")
@click.option("-m", "--register-size", type=click.IntRange(min=1), default=3, show_default=True)
@click.option("-o", "--output", type=click.Path(file_okay=False, path_type=Path), default=Path("twins"))
@click.option("--identical", is_flag=True, help="Sample every twin with the same seed.")
@click.pass_obj
def twins(state: CliState, key: str, n: int, register_size: int, output: Path, identical: bool):
    """Sample N twins of KEY (backend@timestamp or backend) and print their noise summaries."""
    with exit_codes():
        sampled = cmd_twins(state.store, key, n, register_size, state.seed or 0, output, identical)
    for i, twin in enumerate(sampled):
        click.echo(f"twin {i} seed={twin.seed} {twin.describe().line()}")
