"""Command-line entry point: ``hadq <subcommand> [flags]``.

Precedence of settings: built-in defaults < ``--config`` JSON file < flags.
The seed falls back to the HADQ_SEED environment variable, then to 0.
Exit codes: 0 when every verdict passes, 1 when any verdict fails, 2 on a
usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .analysis.experiments import EXPERIMENTS, resolve_params, run_experiment
from .core import Configuration, Geometry, RngStream, sample_configuration, sample_point_field
from .dynamics import evolve
from .errors import HadqError, InvalidParameters
from .queueing import (
    CoupledConfig,
    MulticlassConfig,
    MultiLineConfig,
    build_coupled,
    collapse_classes,
    expand_classes,
    fifo_links,
    map_multiclass,
    queue_trajectory,
    split_departures_unused,
    tandem_departures,
)

PROCESSES = ("multiline", "coupled", "multiclass")
OPS = ("split", "tandem", "couple", "multiclass", "collapse", "expand", "fifo", "trajectory")
FORMATS = ("csv", "json", "text")
# experiment parameters whose flag differs from the parameter name
ALIASES = {"lam": "lambda"}

# settings common to every subcommand: flag name -> (default, help)
GENERAL = {
    "seed": (None, "random seed (default: $HADQ_SEED, else 0)"),
    "output": ("-", "output path, '-' for stdout"),
    "format": (None, "output format: json or text for experiments, csv or json for data"),
}
MODEL = {
    "cycle": (None, "cycle length N (give exactly one of --cycle/--interval)"),
    "interval": (None, "interval length L"),
    "lines": (None, "number of lines n (default: number of --counts or --rates entries)"),
    "counts": (None, "comma-separated particles per line (cycle), strictly increasing"),
    "rates": (None, "comma-separated line rates (Poisson sampling), strictly increasing"),
    "process": ("multiline", "multiline, coupled (map C) or multiclass (map M)"),
}
EVOLVE = {
    "time": (None, "horizon T of the point field (required)"),
    "snapshots": (None, "comma-separated snapshot times (default: 0,T)"),
    "duals": (None, "dual-point CSV path (default: <output>.duals.csv, or after the trajectory on stdout)"),
}
OPS_FLAGS = {
    "op": (None, "one of " + ", ".join(OPS)),
    "input": ("-", "input CSV with header line,position; '-' for stdin"),
}
EXP_FLAGS = {
    "jobs": (1, "worker processes for replicas; results do not depend on it"),
    "samples_csv": (None, "also write raw samples as CSV to this path"),
    "timing": (False, "include wall-clock runtime_s in the report"),
}


@dataclass
class RunSpec:
    subcommand: str
    seed: int = 0
    output: str = "-"
    format: str | None = None
    geometry: tuple[str, float] | None = None
    lines: int | None = None
    counts: tuple[int, ...] | None = None
    rates: tuple[float, ...] | None = None
    process: str = "multiline"
    horizon: float | None = None
    snapshots: tuple[float, ...] | None = None
    duals: str | None = None
    op: str | None = None
    input: str = "-"
    replicas: int | None = None
    jobs: int = 1
    samples_csv: str | None = None
    timing: bool = False
    params: dict = field(default_factory=dict)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def _add(p: argparse.ArgumentParser, table: dict) -> None:
    for name, (default, text) in table.items():
        shown = "" if default in (None, False) or "default" in text else f" (default: {default})"
        if default is False:
            p.add_argument(_flag(name), dest=name, action="store_true", default=argparse.SUPPRESS, help=text)
        else:
            p.add_argument(_flag(name), dest=name, default=argparse.SUPPRESS, help=text + shown)


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="hadq", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = top.add_subparsers(dest="subcommand", metavar="SUBCOMMAND", parser_class=_Parser)
    cfg = {"config": (None, "flat JSON file of flag values; flags given on the command line win")}

    p = sub.add_parser("sample", help="sample a multi-line stack and optionally map it")
    _add(p, {**cfg, **GENERAL, **MODEL})
    p = sub.add_parser("ops", help="apply a queueing map to a CSV stack")
    _add(p, {**cfg, **GENERAL, **{k: MODEL[k] for k in ("cycle", "interval")}, **OPS_FLAGS})
    p = sub.add_parser("evolve", help="run the dynamics and write snapshots and dual points")
    _add(p, {**cfg, **GENERAL, **MODEL, **EVOLVE})
    for name, exp in EXPERIMENTS.items():
        p = sub.add_parser(name, help=exp.summary, description=exp.summary)
        table = {**cfg, **GENERAL, **EXP_FLAGS}
        for key, par in exp.params.items():
            d = par.default
            shown = ",".join(str(v) for v in d) if isinstance(d, tuple) else d
            table[ALIASES.get(key, key)] = (None, f"{par.help} (default: {shown})")
        _add(p, table)
    return top


def _csv_floats(text, flag: str) -> tuple[float, ...]:
    if isinstance(text, (list, tuple)):
        items = list(text)
    else:
        items = [s for s in str(text).split(",") if s.strip()]
    try:
        return tuple(float(v) for v in items)
    except ValueError:
        raise UsageError(f"{_flag(flag)}: expected comma-separated numbers, got {text!r}") from None


def _number(value, flag: str, kind=float):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise UsageError(f"{_flag(flag)}: expected a number, got {value!r}") from None
    if kind is int:
        if v != int(v):
            raise UsageError(f"{_flag(flag)}: expected an integer, got {value!r}")
        return int(v)
    return v


def _load_config(path: str, allowed: set[str]) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"--config: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"--config: {path} is not valid JSON ({exc.msg})") from None
    if not isinstance(doc, dict):
        raise UsageError("--config: the file must hold a flat JSON object")
    out = {}
    for key, value in doc.items():
        name = key.lstrip("-").replace("-", "_")
        if name not in allowed or name == "config":
            raise UsageError(f"--config: unknown key {key!r}")
        out[name] = value
    return out


def parse_run_spec(argv: Sequence[str] | None = None) -> RunSpec:
    """Parse command-line arguments (plus an optional --config file).

    Raises UsageError for malformed input and InvalidParameters for values
    outside an experiment's domain; both name the offending flag.
    """
    parser = build_parser()
    ns = vars(parser.parse_args(list(sys.argv[1:] if argv is None else argv)))
    cmd = ns.pop("subcommand", None)
    if cmd is None:
        raise UsageError("a subcommand is required (see hadq --help)")
    sub = parser._subparsers._group_actions[0].choices[cmd]
    allowed = {a.dest for a in sub._actions if a.dest != "help"}
    merged = {}
    if "config" in ns:
        merged.update(_load_config(ns.pop("config"), allowed))
    merged.update(ns)

    seed = merged.get("seed", os.environ.get("HADQ_SEED", 0))
    spec = RunSpec(cmd, seed=_number(seed, "seed", int))
    spec.output = str(merged.get("output", "-"))
    fmt = merged.get("format")
    if fmt is not None and fmt not in FORMATS:
        raise UsageError(f"--format: choose from {', '.join(FORMATS)}")
    spec.format = fmt

    if cmd in EXPERIMENTS:
        spec.jobs = _number(merged.get("jobs", 1), "jobs", int)
        if spec.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        spec.samples_csv = merged.get("samples_csv")
        spec.timing = bool(merged.get("timing", False))
        params = {}
        for key in EXPERIMENTS[cmd].params:
            flag = ALIASES.get(key, key)
            if flag in merged:
                params[key] = merged[flag]
        try:
            spec.params = resolve_params(cmd, params)
        except InvalidParameters as exc:
            raise InvalidParameters(_name_flags(str(exc), cmd)) from None
        spec.replicas = spec.params.get("replicas")
        return spec

    if "cycle" in merged and "interval" in merged:
        raise UsageError("--cycle and --interval are mutually exclusive")
    if "cycle" in merged:
        spec.geometry = ("cycle", _number(merged["cycle"], "cycle"))
    elif "interval" in merged:
        spec.geometry = ("interval", _number(merged["interval"], "interval"))
    else:
        raise UsageError("one of --cycle or --interval is required")
    if spec.geometry[1] <= 0:
        raise UsageError(f"--{spec.geometry[0]} must be positive")

    if cmd == "ops":
        op = merged.get("op")
        if op not in OPS:
            raise UsageError(f"--op: choose from {', '.join(OPS)}")
        spec.op = op
        spec.input = str(merged.get("input", "-"))
        return spec

    if "counts" in merged and "rates" in merged:
        raise UsageError("--counts and --rates are mutually exclusive")
    if "counts" in merged:
        spec.counts = tuple(_number(v, "counts", int) for v in _csv_floats(merged["counts"], "counts"))
        size, flag = len(spec.counts), "counts"
        vals = spec.counts
        if any(v < 1 for v in vals):
            raise UsageError("--counts entries must be positive")
    elif "rates" in merged:
        spec.rates = _csv_floats(merged["rates"], "rates")
        size, flag, vals = len(spec.rates), "rates", spec.rates
        if any(v <= 0 for v in vals):
            raise UsageError("--rates entries must be positive")
    else:
        raise UsageError("one of --counts or --rates is required")
    if size == 0:
        raise UsageError(f"--{flag} is empty")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise UsageError(f"--{flag} must be strictly increasing")
    spec.lines = _number(merged.get("lines", size), "lines", int)
    if spec.lines != size:
        raise UsageError(f"--lines {spec.lines} does not match {size} --{flag} entries")
    process = merged.get("process", "multiline")
    if process not in PROCESSES:
        raise UsageError(f"--process: choose from {', '.join(PROCESSES)}")
    spec.process = process

    if cmd == "evolve":
        if "time" not in merged:
            raise UsageError("--time is required")
        spec.horizon = _number(merged["time"], "time")
        if spec.horizon < 0:
            raise UsageError("--time must be nonnegative")
        if "snapshots" in merged:
            spec.snapshots = _csv_floats(merged["snapshots"], "snapshots")
        spec.duals = merged.get("duals")
    return spec


def _name_flags(message: str, cmd: str) -> str:
    """Rewrite parameter names in a message as the flags that set them."""
    for key in sorted(EXPERIMENTS[cmd].params, key=len, reverse=True):
        flag = _flag(ALIASES.get(key, key))
        message = message.replace(f"{key}=", f"{flag}=").replace(f"{key} ", f"{flag} ")
    return message


# --- data I/O ----------------------------------------------------------------


def stack_to_csv(lines: Sequence[Configuration], header: str = "line") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([header, "position"])
    for k, c in enumerate(lines, start=1):
        for x in c.positions.tolist():
            w.writerow([k, repr(x)])
    return buf.getvalue()


def stack_to_json(lines: Sequence[Configuration]) -> str:
    g = lines[0].geometry
    doc = {"geometry": g.kind, "length": g.length, "lines": [c.positions.tolist() for c in lines]}
    return json.dumps(doc) + "\n"


def stack_from_csv(geometry: Geometry, text: str) -> list[Configuration]:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if rows and rows[0][0].strip() in ("line", "class"):
        rows = rows[1:]
    by_line: dict[int, list[float]] = {}
    for r in rows:
        by_line.setdefault(int(r[0]), []).append(float(r[1]))
    if not by_line:
        raise UsageError("--input holds no rows")
    n = max(by_line)
    return [Configuration.from_unsorted(geometry, by_line.get(k, [])) for k in range(1, n + 1)]


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"--input: cannot read {path}: {exc.strerror}") from None


# --- subcommands ---------------------------------------------------------------


def _geometry(spec: RunSpec) -> Geometry:
    return Geometry(*spec.geometry)


def _sample_stack(spec: RunSpec, gen) -> MultiLineConfig:
    g = _geometry(spec)
    if spec.counts is not None:
        lines = [sample_configuration(g, gen, count=c) for c in spec.counts]
    else:
        lines = [sample_configuration(g, gen, rate=r) for r in spec.rates]
    return MultiLineConfig(lines)


def _initial_state(spec: RunSpec, gen):
    alpha = _sample_stack(spec, gen)
    if spec.process == "coupled":
        return build_coupled(alpha)
    if spec.process == "multiclass":
        return map_multiclass(alpha)
    return alpha


def _state_lines(state) -> list[Configuration]:
    return list(state.lines)


def _cmd_sample(spec: RunSpec) -> int:
    state = _initial_state(spec, RngStream(spec.seed).generator())
    header = "class" if spec.process == "multiclass" else "line"
    text = stack_to_json(_state_lines(state)) if spec.format == "json" else stack_to_csv(_state_lines(state), header)
    _write(spec.output, text)
    return 0


def _cmd_ops(spec: RunSpec) -> int:
    g = _geometry(spec)
    lines = stack_from_csv(g, _read(spec.input))
    op = spec.op

    def need(k: int) -> None:
        if len(lines) < k:
            raise UsageError(f"--op {op} needs at least {k} lines in --input")

    if op == "split":
        need(2)
        d, u = split_departures_unused(lines[0], lines[1])
        rows = ["set,position"] + [f"departure,{x!r}" for x in d] + [f"unused,{x!r}" for x in u]
        text = "\n".join(rows) + "\n"
    elif op == "tandem":
        need(1)
        text = tandem_departures(*lines).to_csv()
    elif op == "couple":
        text = stack_to_csv(build_coupled(lines).lines)
    elif op == "multiclass":
        text = stack_to_csv(map_multiclass(MultiLineConfig(lines)).lines, "class")
    elif op == "collapse":
        text = stack_to_csv(collapse_classes(CoupledConfig(lines)).lines, "class")
    elif op == "expand":
        text = stack_to_csv(expand_classes(MulticlassConfig(lines)).lines)
    elif op == "fifo":
        need(2)
        text = fifo_links(lines[:-1], lines[-1]).to_csv()
    else:
        need(2)
        tr = queue_trajectory(lines[:-1], lines[-1])
        rows = ["position,event,class,walk,queue"]
        for x, s, c, z, q in zip(tr.times.tolist(), tr.is_service.tolist(), tr.classes.tolist(), tr.z.tolist(), tr.total().tolist()):
            rows.append(f"{x!r},{'service' if s else 'arrival'},{c + 1 if c >= 0 else ''},{z},{q}")
        text = "\n".join(rows) + "\n"
    _write(spec.output, text)
    return 0


def _cmd_evolve(spec: RunSpec) -> int:
    root = RngStream(spec.seed)
    state = _initial_state(spec, root.child(0).generator())
    omega = sample_point_field(_geometry(spec), spec.horizon, root.child(1).generator())
    snaps = spec.snapshots if spec.snapshots is not None else (0.0, spec.horizon)
    traj = evolve(state, omega, snaps)
    header = "class" if spec.process == "multiclass" else "line"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["time", header, "position"])
    for t, snap in zip(traj.times, traj.snapshots):
        for k, c in enumerate(_state_lines(snap), start=1):
            for x in c.positions.tolist():
                w.writerow([repr(t), k, repr(x)])
    dbuf = io.StringIO()
    dw = csv.writer(dbuf, lineterminator="\n")
    dw.writerow(["line", "x", "t"])
    for k, field_k in enumerate(traj.duals, start=1):
        for x, t in field_k.pairs():
            dw.writerow([k, repr(x), repr(t)])
    if spec.output == "-" and spec.duals is None:
        _write("-", buf.getvalue() + "\n" + dbuf.getvalue())
        return 0
    _write(spec.output, buf.getvalue())
    duals = spec.duals
    if duals is None:
        stem = spec.output[:-4] if spec.output.endswith(".csv") else spec.output
        duals = stem + ".duals.csv"
    _write(duals, dbuf.getvalue())
    return 0


def _cmd_experiment(spec: RunSpec) -> int:
    report = run_experiment(spec.subcommand, spec.params, spec.seed, jobs=spec.jobs)
    if spec.format == "text":
        text = "\n".join(report.lines()) + "\n"
    else:
        text = report.to_json(timing=spec.timing)
    _write(spec.output, text)
    if spec.samples_csv:
        _write(spec.samples_csv, report.samples_csv())
    if spec.output != "-":
        for line in report.lines():
            print(line, file=sys.stderr)
    return 0 if report.passed else 1


def run(spec: RunSpec) -> int:
    if spec.subcommand == "sample":
        return _cmd_sample(spec)
    if spec.subcommand == "ops":
        return _cmd_ops(spec)
    if spec.subcommand == "evolve":
        return _cmd_evolve(spec)
    return _cmd_experiment(spec)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        spec = parse_run_spec(argv)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (UsageError, InvalidParameters) as exc:
        print(f"hadq: error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(spec)
    except UsageError as exc:
        print(f"hadq: error: {exc}", file=sys.stderr)
        return 2
    except (HadqError, ValueError) as exc:
        print(f"hadq: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
