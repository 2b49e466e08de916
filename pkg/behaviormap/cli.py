#!/usr/bin/env python3
# src/behaviormap/cli.py

"""
behaviormap command line.

Subcommands:
  map      compute a world's behavior map, write CSV/SVG, print its signature
  equiv    compare two maps (CSV files, world JSON documents or world kinds)
  sweep    perturb world parameters and check the equivalence class holds
  path     count behavior-boundary crossings along an intervention path
  compose  run a composite world and report its behaviors
  worlds   list the world catalog with defaults
  dump     write a perceived transition table as CSV

Usage (examples):
  behaviormap map --world big-small --res 101 --out m.csv --svg m.svg
  behaviormap equiv big-small chain
  behaviormap sweep --world big-small --preset paper-b --res 51
  behaviormap path --map m.csv --from 0.05,0.9 --to 0.95,0.9

Machine-readable results go to stdout; status, progress and errors to stderr.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Dict, List, Optional

from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table
from rich.text import Text
from rich.theme import Theme

# Try to import RichHelpFormatter for better help output
try:
    from rich_argparse import RichHelpFormatter
except ImportError:
    RichHelpFormatter = argparse.HelpFormatter

custom_theme = Theme({
    "info": "cyan",
    "warning": "yellow",
    "error": "bold red",
    "success": "bold green",
    "command": "bold magenta",
})
console = Console(theme=custom_theme, stderr=True)

from . import __version__
from .atlas_engine import (
    BehaviorMap,
    check_equivalent,
    compute_behavior_map,
    interior_topology_report,
    maybe_signature,
    read_map_csv,
    signature,
    signature_json,
    trait_identifiability,
    write_map_csv,
)
from .banner import print_logo
from .behavior import label_names, palette_json
from .config import RunConfig, load_run_config, merge_cli_args
from .defaults import SAMPLES_PER_SEGMENT, SWEEP_CAP, WORLD_DEFAULTS, WORLD_KINDS
from .errors import BehaviorMapError, InvalidParamsError, NotEquivalentError
from .intervention_engine import (
    InterventionPath,
    load_path,
    parse_point,
    path_crossings,
    path_to_json,
    report_to_dict,
    transfer_strategy,
)
from .perception import UserTraits, build_user_mdp, dump_transitions_csv
from .render import write_svg
from .sweep_engine import composition_experiment, perturbation_sweep, preset, write_report
from .utils import ensure_parent, log_line, make_unique_path, open_run_log, sanitize_token, timestamp
from .world_zoo import World, WorldParams, load_world, make_world, normalize_kind, validate_world


HELP_TEXT = {
    "main": """
Computes [bold]behavior maps[/bold]: which behavior a simulated user picks for every
combination of discount factor [cyan]γ[/cyan] (myopia) and confidence [cyan]p[/cyan], and compares
worlds by the equivalence signature of their maps.

[bold green]Commands:[/bold green]
  [cyan]behaviormap map --world big-small --out m.csv --svg m.svg[/cyan]   Compute and save a map.
  [cyan]behaviormap equiv big-small chain[/cyan]                         Compare two worlds' signatures.
  [cyan]behaviormap sweep --world wall --preset paper-b --res 51[/cyan]    Check robustness to parameters.
  [cyan]behaviormap path --map m.csv --from 0.05,0.9 --to 0.95,0.9[/cyan] Count boundary crossings.
  [cyan]behaviormap compose --kind cliff-disengage[/cyan]                Run a composite world.
  [cyan]behaviormap worlds[/cyan]                                        List the world catalog.
  [cyan]behaviormap dump --world chain --p 0.8 --out t.csv[/cyan]          Dump perceived transitions.

[bold green]Exit codes:[/bold green]
  [yellow]0[/yellow] success   [yellow]1[/yellow] invalid input   [yellow]2[/yellow] computation failed   [yellow]3[/yellow] not equivalent
""",
    "map": """
Computes the behavior map of one world over the trait square and prints its
signature as JSON: [cyan]{"world": ..., "num_behaviors": k, "edge_switches": \\[n1,n2,n3,n4]}[/cyan].

[bold green]Key Options:[/bold green]
  [yellow]--world <KIND>[/yellow]          big-small, cliff, wall, chain, riverswim, gamblers-v1/v2, cafe, ...
  [yellow]--res <N>[/yellow]               Samples per axis (default 101).
  [yellow]--gamma-range lo:hi[/yellow]     Discount axis (default 0.01:0.99).
  [yellow]--p-range lo:hi[/yellow]         Confidence axis (default 0.34:1.0).
  [yellow]--out <CSV>[/yellow] [yellow]--svg <SVG>[/yellow]   Where to write the map.
  [yellow]--config <JSON>[/yellow]         Read flags from a JSON object; flags on the command line win.

A map with "wander" on its edge is still written, then the run exits 2.
""",
    "equiv": """
Compares two maps. Each input may be a map CSV, a world JSON document
([cyan]{"kind": ..., "params": {...}}[/cyan]) or a world kind name.

Exit [yellow]0[/yellow] when equivalent, [yellow]3[/yellow] when not.
""",
    "sweep": """
Perturbs constructor parameters and checks every cell keeps one signature.

[bold green]Usage Examples:[/bold green]
  [cyan]behaviormap sweep --world big-small --preset paper-b --res 51[/cyan]
  [cyan]behaviormap sweep --world chain --vary length=3,4,5 --vary reward_disengage=5,10[/cyan]

[yellow]--report <JSON>[/yellow] also writes the per-cell index CSV beside it.
Exit [yellow]0[/yellow] when every cell shares a signature, [yellow]3[/yellow] otherwise.
""",
    "path": """
Counts behavior-boundary crossings along a path in the normalized trait square.

[bold green]Usage Examples:[/bold green]
  [cyan]behaviormap path --map m.csv --from 0.05,0.9 --to 0.95,0.9[/cyan]
  [cyan]behaviormap path --map a.csv --path-file p.json --transfer-to b.csv[/cyan]
""",
    "compose": """
Runs a composite world ([cyan]cliff-disengage[/cyan] or [cyan]cafe-threeway[/cyan]) and prints
its signature and [cyan]behaviors: K[/cyan].
""",
    "worlds": """
Lists every world kind with its default parameters and validation status.
""",
    "dump": """
Writes the perceived transition table of a world at confidence [cyan]p[/cyan]
as CSV ([cyan]state,action,next_state,probability[/cyan]; nonzero entries only).
""",
}


def print_command_help(topic: str = "main"):
    """Prints the help panel for a command using rich."""
    title = "behaviormap" if topic == "main" else f"behaviormap {topic}"
    panel = Panel(
        Text.from_markup(HELP_TEXT[topic]),
        title=f"[bold magenta]Help: `{title}`[/bold magenta]",
        border_style="blue",
    )
    console.print(panel)


class RichHelpAction(argparse.Action):
    """A custom argparse action to show a rich-formatted help panel and exit."""
    def __init__(self, option_strings, dest, topic="main", **kwargs):
        self.topic = topic
        super().__init__(option_strings, dest, nargs=0, **kwargs)

    def __call__(self, parser, namespace, values, option_string=None):
        print_command_help(self.topic)
        parser.exit()


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit 1, matching invalid-input errors from the library."""

    def error(self, message):
        self.print_usage(sys.stderr)
        console.print(f"[error]Error: {escape(message)}[/error]")
        self.exit(1)


# --- argument parsing ---

_PARAM_FLAGS = {
    "width": int,
    "height": int,
    "length": int,
    "start": int,
    "reward_small": float,
    "reward_big": float,
    "reward_goal": float,
    "reward_cliff": float,
    "reward_wall": float,
    "reward_end": float,
    "reward_disengage": float,
    "reward_dead": float,
    "reward_donut": float,
    "reward_noodle": float,
    "reward_vegan": float,
    "step_reward": float,
    "p_c": float,
    "p_f": float,
    "wall_row": int,
    "wall_length": int,
}


def _common_parent() -> argparse.ArgumentParser:
    p = ArgumentParser(add_help=False)
    p.add_argument("--config", help="JSON file with flag values (flags override it)")
    p.add_argument("--log-file", dest="log_file", help="append a plain-text run log to this file")
    p.add_argument("--workers", type=int, help="worker threads (default: ATLAS_THREADS or min(8, cpus))")
    p.add_argument("--seed", type=int, help="reserved; every computation is deterministic")
    p.add_argument("--verbose", action="store_true", help="print grid, solver and topology details")
    p.add_argument("--quiet", action="store_true", help="do not print the banner")
    p.add_argument("--no-progress", dest="no_progress", action="store_true", help="hide progress bars")
    return p


def _grid_parent() -> argparse.ArgumentParser:
    p = ArgumentParser(add_help=False)
    p.add_argument("--res", type=int, help="samples per axis (default 101)")
    p.add_argument("--p-res", dest="p_res", type=int, help="samples on the p axis (default: --res)")
    p.add_argument("--gamma-range", dest="gamma_range", help="discount axis lo:hi (default 0.01:0.99)")
    p.add_argument("--p-range", dest="p_range", help="confidence axis lo:hi (default 0.34:1.0)")
    p.add_argument("--tol", type=float, help="value iteration tolerance (default 1e-8)")
    p.add_argument("--max-iter", dest="max_iter", type=int, help="value iteration sweep limit")
    p.add_argument("--min-run", dest="min_run", type=int, help="ignore edge runs shorter than N cells")
    return p


def _world_parent(flag: str = "--world") -> argparse.ArgumentParser:
    p = ArgumentParser(add_help=False)
    p.add_argument(flag, dest="world", help=f"world kind ({', '.join(k.replace('_', '-') for k in WORLD_KINDS)})")
    for name, kind in _PARAM_FLAGS.items():
        p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=kind, help=f"world parameter {name}")
    p.add_argument(
        "--reflect-walk", dest="reflect_walk", action=argparse.BooleanOptionalAction, help="gamblers: reflect the walk at position 1"
    )
    return p


def _color(value: str):
    name, sep, color = value.partition("=")
    if not sep or not name or not color:
        raise argparse.ArgumentTypeError(f"expected LABEL=COLOR, got '{value}'")
    return name, color


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(prog="behaviormap", add_help=False, formatter_class=RichHelpFormatter)
    parser.add_argument("-h", "--help", action=RichHelpAction, help="Show this help message and exit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=ArgumentParser)

    common, grid = _common_parent(), _grid_parent()

    def add(name, parents, handler, help_text):
        p = sub.add_parser(name, parents=parents, add_help=False, help=help_text, formatter_class=RichHelpFormatter)
        p.add_argument("-h", "--help", action=RichHelpAction, topic=name, help="Show this help message and exit.")
        p.set_defaults(handler=handler)
        return p

    p = add("map", [common, grid, _world_parent()], cmd_map, "compute a behavior map")
    p.add_argument("--out", help="map CSV path (default: <world>-<timestamp>.csv)")
    p.add_argument("--svg", help="also render the map as SVG")
    p.add_argument("--palette-out", dest="palette_out", help="write the label palette as JSON")
    p.add_argument("--color", dest="palette", action="append", type=_color, help="LABEL=COLOR override")

    p = add("equiv", [common, grid], cmd_equiv, "compare two maps")
    p.add_argument("first", help="map CSV, world JSON or world kind")
    p.add_argument("second", help="map CSV, world JSON or world kind")

    p = add("sweep", [common, grid, _world_parent()], cmd_sweep, "parameter perturbation sweep")
    p.add_argument("--preset", help="shipped sweep grid (paper-b)")
    p.add_argument("--vary", action="append", default=[], help="NAME=V1,V2,... (repeatable)")
    p.add_argument("--cap", type=int, default=SWEEP_CAP, help=f"maximum cells (default {SWEEP_CAP})")
    p.add_argument("--report", help="write the JSON report (and index CSV beside it)")

    p = add("path", [common, grid, _world_parent()], cmd_path, "count crossings along a path")
    p.add_argument("--map", dest="map_csv", help="map CSV (default: compute --world)")
    p.add_argument("--from", dest="start_point", help="start point gamma,p in the unit square")
    p.add_argument("--to", dest="end_point", help="end point gamma,p in the unit square")
    p.add_argument("--path-file", dest="path_file", help="JSON list of [gamma, p] waypoints")
    p.add_argument("--samples", type=int, default=SAMPLES_PER_SEGMENT, help="samples per segment")
    p.add_argument("--transfer-to", dest="transfer_to", help="map CSV, world JSON or kind to transfer into")
    p.add_argument("--out", help="write the crossing report as JSON")

    p = add("compose", [common, grid, _world_parent("--kind")], cmd_compose, "run a composite world")
    p.add_argument("--out", help="map CSV path")
    p.add_argument("--svg", help="also render the map as SVG")

    add("worlds", [common], cmd_worlds, "list the world catalog")

    p = add("dump", [common, _world_parent()], cmd_dump, "dump perceived transitions")
    p.add_argument("--p", dest="confidence", type=float, required=True, help="user confidence p")
    p.add_argument("--gamma", type=float, default=0.9, help="user discount (recorded only)")
    p.add_argument("--out", required=True, help="CSV path")
    return parser


# --- helpers ---


def _run_config(args) -> RunConfig:
    config = load_run_config(Path(args.config)) if getattr(args, "config", None) else RunConfig()
    if isinstance(getattr(args, "palette", None), list):
        args.palette = dict(args.palette)
    return merge_cli_args(config, args)


def _require_world(config: RunConfig) -> str:
    if not config.world:
        raise InvalidParamsError("a world kind is required (--world or 'world' in --config)")
    return normalize_kind(config.world)


def _compute(world: World, config: RunConfig, args) -> BehaviorMap:
    if args.verbose:
        P, G = config.spec.shape
        console.print(
            f"[info]{world.id}: {world.num_states} states, {P}x{G} grid, "
            f"tol={config.tol:g}, max_iter={config.max_iter}[/info]"
        )
    return compute_behavior_map(
        world,
        config.spec,
        tol=config.tol,
        max_iter=config.max_iter,
        workers=config.workers,
        show_progress=not args.no_progress,
    )


def _load_map(source: str, config: RunConfig, args) -> BehaviorMap:
    """A map from a CSV file, a world JSON document or a world kind name."""
    path = Path(source)
    if path.suffix.lower() == ".csv":
        return read_map_csv(path)
    if path.suffix.lower() == ".json":
        return _compute(load_world(path), config, args)
    return _compute(make_world(source), config, args)


def _write_outputs(m: BehaviorMap, config: RunConfig, log_fp) -> Path:
    out = config.out or make_unique_path(Path(f"{sanitize_token(m.world_id)}-{timestamp()}.csv"))
    write_map_csv(m, ensure_parent(out))
    console.print(f"[success]Map written: {out}[/success]")
    log_line(log_fp, f"map {m.world_id} -> {out}")
    if config.svg:
        write_svg(m, ensure_parent(config.svg), palette=config.palette)
        console.print(f"[success]SVG written: {config.svg}[/success]")
    if config.palette_out:
        ensure_parent(config.palette_out).write_text(
            palette_json(m.palette, config.palette) + "\n", encoding="utf-8"
        )
    return out


def _print_topology(m: BehaviorMap):
    topo = interior_topology_report(m)
    ident = trait_identifiability(m)
    console.print(f"[info]components per label: {topo.components_per_label}, interior loops: {topo.interior_loops}[/info]")
    for w in topo.warnings:
        console.print(f"[warning]{w}[/warning]")
    console.print(
        f"[info]behavior changes along γ in {ident.gamma_fraction:.0%} of rows, "
        f"along p in {ident.p_fraction:.0%} of columns[/info]"
    )


# --- commands ---


def cmd_map(args, config: RunConfig, log_fp) -> int:
    world = make_world(_require_world(config), config.params)
    m = _compute(world, config, args)
    _write_outputs(m, config, log_fp)
    if args.verbose:
        _print_topology(m)
    sig = signature(m, config.min_run)
    log_line(log_fp, f"signature {signature_json(sig, m.world_id)}")
    print(signature_json(sig, m.world_id))
    return 0


def cmd_equiv(args, config: RunConfig, log_fp) -> int:
    maps = [_load_map(args.first, config, args), _load_map(args.second, config, args)]
    sigs = [maybe_signature(m, config.min_run) for m in maps]
    for m, sig in zip(maps, sigs):
        if sig is None:
            console.print(f"[warning]'{m.world_id}' has 'wander' on its edge; it has no signature[/warning]")
            print(json.dumps({"world": m.world_id, "num_behaviors": m.num_behaviors, "edge_switches": None}))
        else:
            print(signature_json(sig, m.world_id))
    same = None not in sigs and check_equivalent(sigs[0], sigs[1])
    print(f"verdict: {'equivalent' if same else 'not equivalent'}")
    log_line(log_fp, f"equiv {maps[0].world_id} {maps[1].world_id}: {same}")
    return 0 if same else NotEquivalentError.exit_code


def _parse_vary(items: List[str]) -> Dict[str, list]:
    varied = {}
    for item in items:
        name, sep, values = item.partition("=")
        if not sep or not values:
            raise InvalidParamsError(f"--vary expects NAME=V1,V2,..., got '{item}'")
        parsed = []
        for v in values.split(","):
            try:
                parsed.append(int(v) if v.strip().lstrip("-").isdigit() else float(v))
            except ValueError:
                raise InvalidParamsError(f"--vary value '{v}' is not a number") from None
        varied[name.strip().replace("-", "_")] = parsed
    return varied


def cmd_sweep(args, config: RunConfig, log_fp) -> int:
    kind = _require_world(config)
    base, varied = config.params, {}
    if args.preset:
        preset_base, varied = preset(args.preset, kind)
        base = WorldParams.from_dict({**preset_base.to_dict(), **config.params.to_dict()})
    varied.update(_parse_vary(args.vary))
    report = perturbation_sweep(
        kind,
        base,
        varied,
        config.spec,
        cap=args.cap,
        tol=config.tol,
        max_iter=config.max_iter,
        workers=config.workers,
        show_progress=not args.no_progress,
    )
    for cell in report.failures:
        console.print(f"[warning]{escape(str(dict(cell.params)))}: {escape(cell.error)}[/warning]")
    if config.report:
        json_path, csv_path = write_report(report, ensure_parent(config.report))
        console.print(f"[success]Report written: {json_path} (+ {csv_path.name})[/success]")
    modal = report.modal_signature
    summary = {
        "world": kind,
        "verdict": report.verdict,
        "cells": len(report.cells),
        "failures": len(report.failures),
        "modal_signature": None if modal is None else modal.to_dict(kind),
    }
    print(json.dumps(summary))
    log_line(log_fp, f"sweep {kind}: verdict={report.verdict} cells={len(report.cells)}")
    return 0 if report.verdict else NotEquivalentError.exit_code


def _intervention_path(args) -> InterventionPath:
    if args.path_file:
        return load_path(Path(args.path_file))
    if not (args.start_point and args.end_point):
        raise InvalidParamsError("give --from and --to, or --path-file")
    return InterventionPath((parse_point(args.start_point), parse_point(args.end_point)))


def cmd_path(args, config: RunConfig, log_fp) -> int:
    path = _intervention_path(args)
    if args.map_csv:
        m = read_map_csv(Path(args.map_csv))
    else:
        m = _compute(make_world(_require_world(config), config.params), config, args)
    report = path_crossings(m, path, args.samples)
    print(f"crossings: {report.crossings}")
    if args.verbose:
        console.print(f"[info]labels along the path: {' -> '.join(report.labels_sequence)}[/info]")
    data = report_to_dict(report, path)
    if args.transfer_to:
        dst = _load_map(args.transfer_to, config, args)
        moved = transfer_strategy(m, path, dst, args.samples)
        print(f"transferred: {path_to_json(moved)}")
        data["transfer"] = report_to_dict(path_crossings(dst, moved, args.samples), moved)
    if config.out:
        ensure_parent(config.out).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    log_line(log_fp, f"path on {m.world_id}: {report.crossings} crossing(s)")
    return 0


def cmd_compose(args, config: RunConfig, log_fp) -> int:
    kind = _require_world(config)
    result = composition_experiment(
        kind,
        config.params,
        config.spec,
        tol=config.tol,
        max_iter=config.max_iter,
        workers=config.workers,
        show_progress=not args.no_progress,
    )
    if config.out or config.svg:
        _write_outputs(result.map, config, log_fp)
    if args.verbose:
        _print_topology(result.map)
    print(signature_json(result.signature, result.map.world_id))
    print(f"behaviors: {result.map.num_behaviors}")
    log_line(log_fp, f"compose {kind}: {result.map.num_behaviors} behaviors")
    return 0


def cmd_worlds(args, config: RunConfig, log_fp) -> int:
    table = Table(title="World catalog")
    table.add_column("kind", style="command")
    table.add_column("states", justify="right")
    table.add_column("labels")
    table.add_column("defaults")
    table.add_column("findings", justify="right")
    for kind in WORLD_KINDS:
        w = make_world(kind)
        findings = validate_world(w).findings
        defaults = ", ".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in WORLD_DEFAULTS[kind].items())
        table.add_row(kind.replace("_", "-"), str(w.num_states), ", ".join(label_names(w)), defaults, str(len(findings)))
    Console(theme=custom_theme).print(table)
    return 0


def cmd_dump(args, config: RunConfig, log_fp) -> int:
    world = make_world(_require_world(config), config.params)
    m = build_user_mdp(world, UserTraits(args.gamma, args.confidence))
    out = ensure_parent(Path(args.out))
    rows = dump_transitions_csv(m, out)
    print(f"rows: {rows}")
    log_line(log_fp, f"dump {world.id} p={args.confidence} -> {out} ({rows} rows)")
    return 0


def main(argv: Optional[List[str]] = None):
    argv = sys.argv[1:] if argv is None else argv
    if not argv:
        print_command_help()
        sys.exit(0)

    args = build_parser().parse_args(argv)
    if not getattr(args, "command", None):
        print_command_help()
        sys.exit(1)
    if not args.quiet:
        print_logo()

    log_fp = None
    try:
        config = _run_config(args)
        log_fp = open_run_log(config.log_file)
        log_line(log_fp, f"behaviormap {' '.join(argv)}")
        code = args.handler(args, config, log_fp)
    except BehaviorMapError as e:
        console.print(f"[error]Error: {escape(str(e))}[/error]")
        log_line(log_fp, f"ERROR: {e}")
        sys.exit(e.exit_code)
    except OSError as e:
        console.print(f"[error]Error: {escape(str(e))}[/error]")
        log_line(log_fp, f"ERROR: {e}")
        sys.exit(1)
    finally:
        if log_fp:
            try:
                log_fp.close()
            except Exception:
                pass
    sys.exit(code)


if __name__ == "__main__":
    main()
