"""Command-line entry point: ``lambdasim run | topo-check | oracle-check``.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence

from lambdasim.checks import run_oracle_check
from lambdasim.metrics import ResultRow
from lambdasim.simulation import ALGORITHMS, ConfigError, ScenarioConfig, run_scenario
from lambdasim.topology import TopologyError, render_topology, resolve_topology

SEED_ENV = "LAMBDASIM_SEED"

CSV_HEADER = (
    "load", "algorithm", "W", "F", "g", "blocking_prob", "bw_blocking_prob",
    "avg_total_cost", "multipath_fraction", "avg_paths_per_request", "utilization",
)
_CSV_FIELDS = (
    "load", "algorithm", "W", "F", "g", "blocking_probability", "bandwidth_blocking_probability",
    "avg_total_cost", "multipath_fraction", "avg_paths_per_request", "wavelength_utilization",
)

# flag name -> ScenarioConfig field
_FLAG_FIELDS = {
    "topology": "topology",
    "algorithm": "algorithm",
    "wavelengths": "wavelengths",
    "fibers": "fibers",
    "alternate_routes": "alternate_routes",
    "granularity": "granularity",
    "loads": "loads",
    "requests": "requests_per_point",
    "demand_max": "demand_max",
    "seed": "seed",
    "workers": "workers",
}
_REQUIRED = ("topology", "algorithm", "loads", "requests_per_point", "seed")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class OutputSettings:
    path: Path | None = None
    format: str = "csv"


def _number(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def parse_loads(text: str) -> tuple[float, ...]:
    """``a:b:step`` (inclusive of ``b``) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = (_number(p) for p in parts)
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError(f"empty or invalid load range {text!r}")
        count = int((stop - start) / step + 1e-9) + 1
        return tuple(round(start + i * step, 9) for i in range(count))
    return tuple(_number(p) for p in text.split(",") if p.strip())


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _add_run_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON scenario file; flags override its values")
    p.add_argument("--topology", help="built-in name or path to a topology JSON file")
    p.add_argument("--algorithm", choices=sorted(ALGORITHMS))
    p.add_argument("--wavelengths", type=_positive_int, help="override W")
    p.add_argument("--fibers", type=_positive_int, help="override fibers on every link")
    p.add_argument("--alternate-routes", type=_positive_int, help="routes per pair (N)")
    p.add_argument("--granularity", type=_positive_int, help="max disjoint paths per request (g)")
    p.add_argument("--loads", type=parse_loads, help="a:b:step or comma list, in Erlangs")
    p.add_argument("--requests", type=_positive_int, help="requests per load point")
    p.add_argument("--demand-max", type=_positive_int)
    p.add_argument("--seed", type=_seed, help=f"falls back to ${SEED_ENV}")
    p.add_argument("--workers", type=_positive_int, help="parallel load points")
    p.add_argument("--no-warmup-discard", action="store_true", help="count the first 10%% of requests too")
    p.add_argument("--output", "-o", type=Path, help="result file; a .dat plot file is written next to it")
    p.add_argument("--format", choices=("csv", "json"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lambdasim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="simulate a load sweep")
    _add_run_arguments(run)

    topo = sub.add_parser("topo-check", help="validate and summarize a topology")
    topo.add_argument("topology", help="built-in name or topology JSON file")
    topo.add_argument("--render", action="store_true", help="print the normalized JSON document")

    oracle = sub.add_parser("oracle-check", help="compare adaptive admission with brute force")
    oracle.add_argument("--graphs", type=_positive_int, default=200)
    oracle.add_argument("--states", type=_positive_int, default=50)
    oracle.add_argument("--max-nodes", type=_positive_int, default=8)
    oracle.add_argument("--max-wavelengths", type=_positive_int, default=4)
    oracle.add_argument("--seed", type=_seed, default=0)
    return parser


def _config_from_namespace(ns: argparse.Namespace, environ: dict[str, str]) -> tuple[ScenarioConfig, OutputSettings]:
    values: dict = {}
    if ns.config is not None:
        try:
            loaded = json.loads(ns.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"--config: cannot read {ns.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise UsageError("--config: scenario file must hold a JSON object")
        known = {f.name for f in fields(ScenarioConfig)}
        unknown = set(loaded) - known
        if unknown:
            raise UsageError(f"--config: unknown field(s) {', '.join(sorted(unknown))}")
        values.update(loaded)
    for flag, name in _FLAG_FIELDS.items():
        value = getattr(ns, flag)
        if value is not None:
            values[name] = value
    if ns.no_warmup_discard:
        values["warmup_discard"] = False
    if "seed" not in values and environ.get(SEED_ENV):
        try:
            values["seed"] = _seed(environ[SEED_ENV])
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"${SEED_ENV}: {exc}") from None
    for name in _REQUIRED:
        if name not in values:
            flag = next(f for f, n in _FLAG_FIELDS.items() if n == name)
            raise UsageError(f"missing required field: --{flag.replace('_', '-')}")
    if isinstance(values.get("loads"), (int, float)):
        values["loads"] = (values["loads"],)
    try:
        config = ScenarioConfig(**values)
    except (ConfigError, TypeError) as exc:
        raise UsageError(str(exc)) from exc
    fmt = ns.format
    if fmt is None:
        fmt = "json" if ns.output is not None and ns.output.suffix == ".json" else "csv"
    return config, OutputSettings(ns.output, fmt)


def parse_scenario(arguments: Sequence[str], environ: dict[str, str] | None = None) -> tuple[ScenarioConfig, OutputSettings]:
    """Parse ``run`` arguments (with or without the leading ``run``)."""
    args = list(arguments)
    if not args or args[0] != "run":
        args = ["run", *args]
    ns = build_parser().parse_args(args)
    return _config_from_namespace(ns, dict(os.environ) if environ is None else environ)


def render_args(config: ScenarioConfig) -> list[str]:
    """Flags that :func:`parse_scenario` turns back into ``config``."""
    args = [
        "run",
        "--topology", config.topology,
        "--algorithm", config.algorithm,
        "--loads", ",".join(repr(x) for x in config.loads),
        "--requests", str(config.requests_per_point),
        "--seed", str(config.seed),
        "--alternate-routes", str(config.alternate_routes),
        "--granularity", str(config.granularity),
        "--demand-max", str(config.demand_max),
        "--workers", str(config.workers),
    ]
    if config.wavelengths is not None:
        args += ["--wavelengths", str(config.wavelengths)]
    if config.fibers is not None:
        args += ["--fibers", str(config.fibers)]
    if not config.warmup_discard:
        args.append("--no-warmup-discard")
    return args


def _fmt(value: object) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def format_csv(rows: Sequence[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([_fmt(getattr(row, name)) for name in _CSV_FIELDS])
    return buf.getvalue()


def format_json(rows: Sequence[ResultRow]) -> str:
    return json.dumps([row.as_dict() for row in rows], indent=2) + "\n"


def format_plot_data(rows: Sequence[ResultRow]) -> str:
    lines = ["# load blocking_prob bw_blocking_prob"]
    for row in rows:
        lines.append(f"{_fmt(row.load)} {_fmt(row.blocking_probability)} {_fmt(row.bandwidth_blocking_probability)}")
    return "\n".join(lines) + "\n"


def write_results(rows: Sequence[ResultRow], fmt: str = "csv", path: Path | None = None) -> str:
    """Render rows sorted by load; with ``path``, also write the file and its ``.dat`` companion."""
    if not rows:
        raise ValueError("no result rows to write")
    ordered = sorted(rows, key=lambda row: row.load)
    if fmt == "csv":
        document = format_csv(ordered)
    elif fmt == "json":
        document = format_json(ordered)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        path = Path(path)
        path.write_text(document)
        path.with_suffix(".dat").write_text(format_plot_data(ordered))
    return document


def _topo_check(ns: argparse.Namespace) -> int:
    topo = resolve_topology(ns.topology)
    if ns.render:
        print(render_topology(topo))
        return 0
    degrees = [len(adj) for adj in topo.adjacency]
    print(f"name        {topo.name}")
    print(f"nodes       {topo.node_count}")
    print(f"links       {len(topo.links)}")
    print(f"wavelengths {topo.wavelengths}")
    print(f"fibers      {topo.default_fibers}")
    print(f"degree      min {min(degrees)} avg {sum(degrees) / len(degrees):.2f} max {max(degrees)}")
    print(f"connected   {'yes' if topo.is_connected() else 'no'}")
    return 0


def _oracle_check(ns: argparse.Namespace) -> int:
    report = run_oracle_check(ns.graphs, ns.states, ns.seed, ns.max_nodes, ns.max_wavelengths)
    for line in report.failures[:20]:
        print(f"MISMATCH {line}")
    status = "PASS" if report.passed else "FAIL"
    print(f"{status} oracle equivalence: {report.agreements}/{report.checks} agree "
          f"({report.feasible} feasible, {report.checks - report.feasible} infeasible)")
    return 0 if report.passed else 2


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        ns = build_parser().parse_args(argv)
        if ns.command == "run":
            config, output = _config_from_namespace(ns, dict(os.environ))
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    try:
        if ns.command == "topo-check":
            return _topo_check(ns)
        if ns.command == "oracle-check":
            return _oracle_check(ns)
        rows = run_scenario(config)
        document = write_results(rows, output.format, output.path)
        if output.path is None:
            sys.stdout.write(document)
        return 0
    except (TopologyError, ConfigError, OSError, ValueError) as exc:
        print(f"lambdasim: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
