"""Named simulation scenarios, runs, and CSV/SVG output."""

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import IntegrationError, integrate
from .linalg import ContractError
from .measures import correlation_series
from .model import InitialState, SystemParams

KAPPAS = (0.0, 0.02, 0.2, 2.0, 20.0)
BELL_KAPPAS = (0.0, 0.2, 2.0, 20.0)
DELTA = 5.0

MEASURE_CHANNELS = ("C", "B", "D", "I", "J", "purity")
POPULATION_COLUMNS = tuple(f"rho{i}{i}" for i in range(1, 9))
COHERENCE_COLUMNS = ("abs_rho24", "abs_rho35")
OUTPUT_GROUPS = MEASURE_CHANNELS + ("populations", "coherences")

SIG_DIGITS = 9


class ScenarioError(RuntimeError):
    """A scenario run failed; the message names the scenario."""


def fmt(x):
    """Fixed CSV number format: 9 significant digits, locale independent."""
    s = f"{float(x):.{SIG_DIGITS}g}"
    return "0" if s == "-0" else s


def quantize(values):
    return np.array([float(fmt(v)) for v in np.asarray(values, dtype=float)])


def expand_outputs(outputs):
    cols = []
    for name in OUTPUT_GROUPS:
        if name not in outputs:
            continue
        if name == "populations":
            cols.extend(POPULATION_COLUMNS)
        elif name == "coherences":
            cols.extend(COHERENCE_COLUMNS)
        else:
            cols.append(name)
    return tuple(cols)


@dataclass(frozen=True)
class Scenario:
    name: str
    initial: InitialState
    params: SystemParams
    t_max: float = 50.0
    dt_out: float = 0.01
    outputs: frozenset = frozenset({"C", "B", "D"})

    def __post_init__(self):
        if not self.outputs:
            raise ContractError(f"scenario {self.name!r} requests no outputs")
        unknown = set(self.outputs) - set(OUTPUT_GROUPS)
        if unknown:
            raise ContractError(f"scenario {self.name!r}: unknown outputs {sorted(unknown)}")
        if not (self.t_max > 0 and self.dt_out > 0):
            raise ContractError(f"scenario {self.name!r}: t_max and dt_out must be positive")

    @property
    def group(self):
        return self.name.split("_", 1)[0]

    @property
    def columns(self):
        return expand_outputs(self.outputs)


def _kappa_tag(k):
    return f"kappa{k:g}"


def builtin_scenarios():
    """Every figure scenario: detuning type x cavity decay x initial state."""
    out = []
    fig1 = frozenset({"C", "B", "D", "I", "J"})
    for k in KAPPAS:
        out.append(Scenario(f"fig1_{_kappa_tag(k)}", InitialState.EE0,
                            SystemParams.unidentical(DELTA, k), 50.0, 0.01, fig1))
    for k in KAPPAS:
        out.append(Scenario(f"fig2_{_kappa_tag(k)}", InitialState.EE0,
                            SystemParams.identical(DELTA, k), 50.0, 0.01,
                            frozenset({"C", "B", "D"})))
    for kind, make in (("identical", SystemParams.identical), ("unidentical", SystemParams.unidentical)):
        for k in KAPPAS:
            out.append(Scenario(f"fig3_{kind}_{_kappa_tag(k)}", InitialState.EG1,
                                make(DELTA, k), 50.0, 0.01, frozenset({"C", "B", "D"})))
    fig4 = frozenset({"populations", "coherences", "purity", "C", "D"})
    out.append(Scenario("fig4_identical", InitialState.EG1, SystemParams.identical(DELTA, 20.0),
                        50.0, 0.01, fig4))
    out.append(Scenario("fig4_unidentical", InitialState.EG1, SystemParams.unidentical(DELTA, 20.0),
                        50.0, 0.01, fig4))
    for fig, make in (("fig5", SystemParams.unidentical), ("fig6", SystemParams.identical)):
        for k in BELL_KAPPAS:
            out.append(Scenario(f"{fig}_{_kappa_tag(k)}", InitialState.BELL_PLUS1,
                                make(DELTA, k), 30.0, 0.01, frozenset({"C", "B", "D"})))
    return out


def scenarios_by_name():
    return {s.name: s for s in builtin_scenarios()}


def select(group_or_name):
    """Scenarios whose name equals the argument or starts with ``<arg>_``."""
    found = [s for s in builtin_scenarios()
             if s.name == group_or_name or s.name.startswith(group_or_name + "_")]
    if not found:
        raise ContractError(f"no scenario or group named {group_or_name!r}")
    return found


def summarize(times, channels):
    """max / min / final / asymptotic (mean over the last 10% of samples)."""
    n = len(times)
    tail = max(1, int(math.ceil(0.1 * n)))
    summary = {}
    for name, v in channels.items():
        summary[name] = {
            "max": float(np.max(v)),
            "min": float(np.min(v)),
            "final": float(v[-1]),
            "asymptotic": float(np.mean(v[-tail:])),
        }
    return summary


@dataclass
class RunResult:
    scenario: Scenario
    trajectory: object
    times: np.ndarray
    channels: dict
    summary: dict = field(default_factory=dict)


def channel_values(traj, columns):
    corr = None
    out = {}
    for col in columns:
        if col in MEASURE_CHANNELS:
            if corr is None:
                corr = correlation_series(traj)
            out[col] = corr[col]
        elif col in POPULATION_COLUMNS:
            out[col] = traj.population(int(col[3]))
        elif col == "abs_rho24":
            out[col] = np.abs(traj.component(2, 4))
        elif col == "abs_rho35":
            out[col] = np.abs(traj.component(3, 5))
        else:
            raise ContractError(f"unknown channel {col!r}")
    return out


def run(s, dt=None):
    """Integrate a scenario and evaluate its output channels.

    Channel values are rounded to the CSV precision so that the stored
    summary, the in-memory series and an emitted file agree exactly.
    """
    try:
        traj = integrate(s.params, s.initial, s.t_max, s.dt_out, dt=dt)
    except (IntegrationError, ContractError) as exc:
        raise ScenarioError(f"scenario {s.name}: {exc}") from exc
    times = quantize(traj.times)
    channels = {k: quantize(v) for k, v in channel_values(traj, s.columns).items()}
    return RunResult(s, traj, times, channels, summarize(times, channels))


# --- emission ----------------------------------------------------------------


def _pick(r, channels):
    names = tuple(channels) if channels is not None else tuple(r.channels)
    for n in names:
        if n not in r.channels:
            raise ContractError(f"channel {n!r} not available in run {r.scenario.name!r}")
    return names


def csv_text(r, channels=None):
    names = _pick(r, channels)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("t",) + names)
    cols = [r.channels[n] for n in names]
    for k, t in enumerate(r.times):
        w.writerow([fmt(t)] + [fmt(c[k]) for c in cols])
    return buf.getvalue()


def read_csv(path):
    """Parse an emitted CSV back into ``{column: array}``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    return {h: np.array([float(row[i]) for row in body]) for i, h in enumerate(header)}


def _axis_label(name):
    return {"C": "concurrence C", "B": "CHSH B", "D": "discord D", "I": "mutual information I",
            "J": "classical correlation J", "purity": "atomic purity"}.get(name, name)


def svg_text(r, channels=None, width=640, panel_height=220):
    """One line chart per channel, stacked, with no external assets."""
    names = _pick(r, channels)
    margin_l, margin_r, margin_t, margin_b = 70, 20, 30, 45
    pw = width - margin_l - margin_r
    ph = panel_height - margin_t - margin_b
    t = r.times
    t0, t1 = float(t[0]), float(t[-1])
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{panel_height * len(names)}" font-family="sans-serif" font-size="12">',
        f"<title>{r.scenario.name}</title>",
    ]
    for i, name in enumerate(names):
        y = np.asarray(r.channels[name], dtype=float)
        lo, hi = float(y.min()), float(y.max())
        if hi - lo < 1e-12:
            lo, hi = lo - 0.5, hi + 0.5
        oy = i * panel_height + margin_t

        def px(tv):
            return margin_l + (tv - t0) / (t1 - t0) * pw

        def py(v):
            return oy + ph - (v - lo) / (hi - lo) * ph

        pts = " ".join(f"{px(tv):.2f},{py(v):.2f}" for tv, v in zip(t, y))
        parts += [
            f'<g id="panel-{name}">',
            f'<rect x="{margin_l}" y="{oy}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
            f'<polyline fill="none" stroke="#1f4e9a" stroke-width="1.2" points="{pts}"/>',
            f'<text x="{margin_l + pw / 2}" y="{oy + ph + 32}" text-anchor="middle">gt</text>',
            f'<text x="{margin_l - 50}" y="{oy + ph / 2}" text-anchor="middle" '
            f'transform="rotate(-90 {margin_l - 50} {oy + ph / 2})">{_axis_label(name)}</text>',
            f'<text x="{margin_l}" y="{oy + ph + 15}" text-anchor="middle">{fmt(t0)}</text>',
            f'<text x="{margin_l + pw}" y="{oy + ph + 15}" text-anchor="middle">{fmt(t1)}</text>',
            f'<text x="{margin_l - 5}" y="{oy + ph}" text-anchor="end">{fmt(lo)}</text>',
            f'<text x="{margin_l - 5}" y="{oy + 10}" text-anchor="end">{fmt(hi)}</text>',
            "</g>",
        ]
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit(r, format, destination, channels=None):  # noqa: A002
    """Write a run as CSV or SVG to ``destination``."""
    if format == "csv":
        text = csv_text(r, channels)
    elif format == "svg":
        text = svg_text(r, channels)
    else:
        raise ContractError(f"unknown output format {format!r}")
    path = Path(destination)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {format} output to {path}: {exc.strerror or exc}") from exc
    return path
