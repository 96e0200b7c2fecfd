"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 runtime failure.  Values are resolved
in the order scenario defaults < config file < command-line flags.
"""

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import measures
from .dynamics import DegeneracyError, steady_state
from .experiments import (
    Scenario,
    ScenarioError,
    builtin_scenarios,
    emit,
    fmt,
    run,
    select,
)
from .linalg import ContractError
from .model import InitialState, SystemParams

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2

PARAM_KEYS = ("g1", "g2", "delta1", "delta2", "kappa")
SETTING_KEYS = PARAM_KEYS + ("initial", "tmax", "dt_out", "out", "format")
SWEEP_AXES = PARAM_KEYS + ("tmax",)


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    command: str
    settings: dict = field(default_factory=dict)  # config-file layer merged under flags
    target: str | None = None  # scenario name/group for `figure`
    sweep_axis: str | None = None
    sweep_values: tuple = ()


def finite_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return v


def _initial(text):
    try:
        return InitialState.parse(text)
    except ContractError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _value_list(text):
    try:
        vals = tuple(finite_float(v) for v in text.split(",") if v.strip())
    except argparse.ArgumentTypeError as exc:
        raise argparse.ArgumentTypeError(f"bad sweep value list {text!r}: {exc}") from None
    if not vals:
        raise argparse.ArgumentTypeError("sweep value list is empty")
    return vals


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_common(p):
    g = p.add_argument_group("system and run settings")
    for key in PARAM_KEYS:
        g.add_argument(f"--{key}", type=finite_float, default=None, help=f"{key} in units of g")
    g.add_argument("--initial", type=_initial, default=None, help="ee0 | eg1 | ge1 | bell")
    g.add_argument("--tmax", type=finite_float, default=None, help="final time gt")
    g.add_argument("--dt-out", dest="dt_out", type=finite_float, default=None, help="output spacing")
    g.add_argument("--out", default=None, help="output directory")
    g.add_argument("--format", choices=("csv", "svg"), default=None)
    g.add_argument("--config", default=None, help="key = value settings file")


def build_parser():
    parser = _Parser(prog="lossy-cavity", description="Two atoms in a lossy cavity: correlation dynamics")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run one custom simulation")
    _add_common(p)

    p = sub.add_parser("figure", help="run a named figure scenario or group (e.g. fig3)")
    p.add_argument("target")
    _add_common(p)

    p = sub.add_parser("steady-state", help="stationary state and its correlations")
    _add_common(p)

    p = sub.add_parser("sweep", help="vary one parameter over a list of values")
    p.add_argument("--axis", nargs=2, metavar=("NAME", "VALUES"), required=True,
                   help="parameter name and comma-separated values")
    _add_common(p)

    sub.add_parser("list-scenarios", help="print the built-in scenario names")
    return parser


def read_config(path):
    """Flat ``key = value`` file; ``#`` starts a comment."""
    settings = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror or exc}") from None
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in SETTING_KEYS:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        try:
            if key in PARAM_KEYS or key in ("tmax", "dt_out"):
                settings[key] = finite_float(value)
            elif key == "initial":
                settings[key] = _initial(value)
            elif key == "format":
                if value not in ("csv", "svg"):
                    raise argparse.ArgumentTypeError(f"format must be csv or svg, got {value!r}")
                settings[key] = value
            else:
                settings[key] = value
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"{path}:{n}: {key}: {exc}") from None
    _check_domains(settings, lambda key: f"{path}: {key}")
    return settings


_DOMAINS = {
    "g1": (lambda v: v > 0, "must be positive"),
    "g2": (lambda v: v > 0, "must be positive"),
    "kappa": (lambda v: v >= 0, "must be non-negative"),
    "tmax": (lambda v: v > 0, "must be positive"),
    "dt_out": (lambda v: v > 0, "must be positive"),
}


def _check_domains(settings, where):
    for key, (ok, why) in _DOMAINS.items():
        if key in settings and not ok(settings[key]):
            raise UsageError(f"{where(key)} {why}, got {settings[key]:g}")


def parse(args):
    """Turn an argument list into a validated CliConfig (raises UsageError)."""
    ns = build_parser().parse_args(list(args))
    cmd = ns.command
    if cmd == "list-scenarios":
        return CliConfig(cmd)
    settings = read_config(ns.config) if ns.config else {}
    for key in SETTING_KEYS:
        v = getattr(ns, key, None)
        if v is not None:
            settings[key] = v
    _check_domains(settings, lambda key: f"--{key.replace('_', '-')}")
    cfg = CliConfig(cmd, settings)
    if cmd == "figure":
        cfg.target = ns.target
    if cmd == "sweep":
        name, values = ns.axis
        name = name.replace("-", "_")
        if name not in SWEEP_AXES:
            raise UsageError(f"--axis: unknown parameter {name!r}; choose from {', '.join(SWEEP_AXES)}")
        try:
            cfg.sweep_values = _value_list(values)
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"--axis: {exc}") from None
        for v in cfg.sweep_values:
            _check_domains({name: v}, lambda key: f"--axis {key} value")
        cfg.sweep_axis = name
    return cfg


# --- execution ---------------------------------------------------------------

DEFAULT_SCENARIO = Scenario(
    "simulate",
    InitialState.EE0,
    SystemParams(),
    50.0,
    0.01,
    frozenset({"C", "B", "D", "I", "J", "purity"}),
)


def apply_settings(s, settings, name=None):
    """Overlay config/flag settings on a scenario's defaults."""
    pkw = {k: settings[k] for k in PARAM_KEYS if k in settings}
    params = replace(s.params, **pkw) if pkw else s.params
    return replace(
        s,
        name=name or s.name,
        params=params,
        initial=settings.get("initial", s.initial),
        t_max=settings.get("tmax", s.t_max),
        dt_out=settings.get("dt_out", s.dt_out),
    )


def _print_summary(r, out):
    print(f"[{r.scenario.name}] {r.scenario.initial.value} {r.scenario.params}", file=out)
    for ch, stats in r.summary.items():
        print(
            f"  {ch:>10}: max={fmt(stats['max'])} min={fmt(stats['min'])} "
            f"final={fmt(stats['final'])} asymptotic={fmt(stats['asymptotic'])}",
            file=out,
        )


def _write(r, outdir, fmt_name, stem=None):
    return emit(r, fmt_name, Path(outdir) / f"{stem or r.scenario.name}.{fmt_name}")


def _cmd_list(cfg, out):
    for s in builtin_scenarios():
        p = s.params
        print(f"{s.name}\t{s.initial.value}\tg1={p.g1:g} g2={p.g2:g} delta1={p.delta1:g} "
              f"delta2={p.delta2:g} kappa={p.kappa:g}\ttmax={s.t_max:g}\t{','.join(s.columns)}", file=out)


def _cmd_figure(cfg, out):
    outdir = cfg.settings.get("out", "results")
    fmt_name = cfg.settings.get("format", "csv")
    try:
        chosen = select(cfg.target)
    except ContractError as exc:
        raise UsageError(str(exc)) from None
    for s in chosen:
        r = run(apply_settings(s, cfg.settings))
        path = _write(r, outdir, fmt_name)
        _print_summary(r, out)
        print(f"  -> {path}", file=out)


def _cmd_simulate(cfg, out):
    s = apply_settings(DEFAULT_SCENARIO, cfg.settings)
    r = run(s)
    path = _write(r, cfg.settings.get("out", "results"), cfg.settings.get("format", "csv"))
    _print_summary(r, out)
    print(f"  -> {path}", file=out)


def _cmd_sweep(cfg, out):
    outdir = Path(cfg.settings.get("out", "results"))
    fmt_name = cfg.settings.get("format", "csv")
    base = apply_settings(DEFAULT_SCENARIO, cfg.settings, name="sweep")
    rows = []
    for v in cfg.sweep_values:
        stem = f"sweep_{cfg.sweep_axis}={v:g}"
        s = apply_settings(base, {cfg.sweep_axis: v}, name=stem)
        r = run(s)
        path = _write(r, outdir, fmt_name)
        _print_summary(r, out)
        row = {"axis": cfg.sweep_axis, "value": fmt(v), "file": path.name}
        for ch, stats in r.summary.items():
            row[f"{ch}_max"] = fmt(stats["max"])
            row[f"{ch}_asymptotic"] = fmt(stats["asymptotic"])
        rows.append(row)
    index = outdir / "index.csv"
    with open(index, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    print(f"index -> {index}", file=out)


def _cmd_steady(cfg, out):
    s = apply_settings(replace(DEFAULT_SCENARIO, initial=InitialState.EG1), cfg.settings)
    ss = steady_state(s.params, initial=s.initial)
    x = measures.xstate_from_full(ss, tol=1e-8)
    print(f"steady state for {s.initial.value}, {s.params}", file=out)
    a, b, c, d, er, ei = (round(v, 6) + 0.0 for v in (x.a, x.b, x.c, x.d, x.e.real, x.e.imag))
    print(f"a={a:.6f} b={b:.6f} c={c:.6f} d={d:.6f} e={er:.6f}{ei:+.6f}j", file=out)
    print(f"C={measures.concurrence(x):.3f}", file=out)
    print(f"B={measures.chsh(x):.3f}", file=out)
    print(f"D={measures.discord_closed(x):.3f}", file=out)
    print(f"I={measures.mutual_information(x):.3f}", file=out)
    print(f"J={measures.classical_correlation(x):.3f}", file=out)
    print(f"purity={measures.purity(x):.3f}", file=out)


COMMANDS = {
    "list-scenarios": _cmd_list,
    "figure": _cmd_figure,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "steady-state": _cmd_steady,
}


def execute(cfg, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        COMMANDS[cfg.command](cfg, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=err)
        return EXIT_USAGE
    except DegeneracyError as exc:
        print(f"steady-state failed: {exc}", file=err)
        return EXIT_RUNTIME
    except ScenarioError as exc:
        print(f"simulation failed: {exc}", file=err)
        return EXIT_RUNTIME
    except ContractError as exc:
        print(f"invalid settings: {exc}", file=err)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"output failed: {exc}", file=err)
        return EXIT_RUNTIME
    return EXIT_OK


def main(argv=None, out=None, err=None):
    err = err or sys.stderr
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse(argv)
    except UsageError as exc:
        print(str(exc), file=err)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    return execute(cfg, out, err)


if __name__ == "__main__":
    sys.exit(main())
