"""Parameter sweeps over state families, CSV emission and figure presets."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import ConfigError, DomainError, ParamError, PhaseUndefined, TruncationError, UnknownFigure
from .fock import normally_ordered_moment
from .metrics import antibunching_witness, bp_phase_report
from .states import DEFAULT_EPSILON, DEFAULT_NMAX_CAP, FAMILY_PARAMS, INTEGER_PARAMS, Family, StateSpec

STATUS_OK = "ok"
STATUS_PHASE_UNDEFINED = "phase_undefined"
STATUS_DOMAIN_ERROR = "domain_error"

METRIC_COLUMNS = ("n_bar", "var_n", "mean_a", "T", "U", "d_u", "antibunch")


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    step: float

    def values(self) -> List[float]:
        """Grid from ``start`` to ``stop`` inclusive, rounded to 12 significant digits."""
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [float(f"{self.start + i * self.step:.12g}") for i in range(count)]


@dataclass
class SweepConfig:
    family: Family
    fixed: Dict[str, float] = field(default_factory=dict)
    axes: List[Axis] = field(default_factory=list)
    epsilon: float = DEFAULT_EPSILON
    nmax_cap: int = DEFAULT_NMAX_CAP
    hoa_orders: Tuple[int, ...] = (2, 3)
    output_path: Optional[str] = None

    def __post_init__(self):
        try:
            self.family = Family(self.family)
        except ValueError:
            raise ConfigError(f"unknown family {self.family!r}") from None
        names = FAMILY_PARAMS[self.family]
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError("a sweep needs one or two axes")
        axis_names = [a.name for a in self.axes]
        if len(set(axis_names)) != len(axis_names):
            raise ConfigError("axis names must be distinct")
        for a in self.axes:
            if a.name not in names:
                raise ConfigError(f"{a.name!r} is not a parameter of {self.family.value} {names}")
            if not a.step > 0:
                raise ConfigError(f"axis {a.name}: step must be positive")
            if not a.start < a.stop:
                raise ConfigError(f"axis {a.name}: start must be below stop")
            if a.name in INTEGER_PARAMS and not all(float(v).is_integer() for v in a.values()):
                raise ConfigError(f"axis {a.name}: integer parameter needs integral grid values")
        missing = [n for n in names if n not in self.fixed and n not in axis_names]
        extra = [n for n in self.fixed if n not in names]
        if missing:
            raise ConfigError(f"parameters {missing} are neither fixed nor swept")
        if extra:
            raise ConfigError(f"unknown fixed parameters {extra}")
        if any(int(l) < 2 for l in self.hoa_orders):
            raise ConfigError("hoa orders must be >= 2")
        self.hoa_orders = tuple(int(l) for l in self.hoa_orders)

    @property
    def param_names(self) -> Tuple[str, ...]:
        return FAMILY_PARAMS[self.family]

    def header(self) -> List[str]:
        hoa = [f"hoa{l}" for l in self.hoa_orders]
        return ["family", *self.param_names, *METRIC_COLUMNS, *hoa, "status"]

    def grid(self) -> Iterator[Dict[str, float]]:
        """Points in lexicographic order, first axis outermost."""
        first = self.axes[0].values()
        second = self.axes[1].values() if len(self.axes) == 2 else [None]
        for u in first:
            for v in second:
                point = dict(self.fixed)
                point[self.axes[0].name] = u
                if v is not None:
                    point[self.axes[1].name] = v
                for key in INTEGER_PARAMS & point.keys():
                    point[key] = int(round(point[key]))
                yield point


@dataclass(frozen=True)
class SweepRow:
    params: Dict[str, float]
    status: str
    metrics: Dict[str, float] = field(default_factory=dict)


def _moment_or_zero(state, order: int) -> float:
    # <a^dag^l a^l> vanishes identically once l exceeds the support
    if order > state.n_max:
        return 0.0
    return normally_ordered_moment(state, order, order)


def evaluate_point(
    family: Family,
    params: Mapping[str, float],
    epsilon: float = DEFAULT_EPSILON,
    nmax_cap: int = DEFAULT_NMAX_CAP,
    hoa_orders: Sequence[int] = (2, 3),
) -> SweepRow:
    """Metrics for one grid point; failures become status rows."""
    try:
        state = StateSpec(family, dict(params), epsilon, nmax_cap).build()[0]
        report = bp_phase_report(state)
    except PhaseUndefined:
        return SweepRow(dict(params), STATUS_PHASE_UNDEFINED)
    except (ParamError, DomainError, TruncationError):
        return SweepRow(dict(params), STATUS_DOMAIN_ERROR)
    metrics = {
        "n_bar": report.n_bar,
        "var_n": report.variance,
        "mean_a": report.mean_a,
        "T": report.total_phase_noise,
        "U": report.u_value,
        "d_u": report.d_u,
        "antibunch": antibunching_witness(state),
    }
    for l in hoa_orders:
        metrics[f"hoa{l}"] = _moment_or_zero(state, l) - report.n_bar ** l
    if not all(math.isfinite(v) for v in metrics.values()):
        return SweepRow(dict(params), STATUS_DOMAIN_ERROR)
    return SweepRow(dict(params), STATUS_OK, metrics)


def _evaluate_args(args):
    return evaluate_point(*args)


def run_sweep(config: SweepConfig, jobs: int = 1) -> List[SweepRow]:
    """Evaluate every grid point; row order follows :meth:`SweepConfig.grid` regardless of ``jobs``."""
    tasks = [
        (config.family, point, config.epsilon, config.nmax_cap, config.hoa_orders)
        for point in config.grid()
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_evaluate_args, tasks, chunksize=16))
    return [_evaluate_args(t) for t in tasks]


def _fmt(value) -> str:
    if isinstance(value, int):
        return str(value)
    return f"{value:.12g}"


def rows_to_csv(config: SweepConfig, rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = config.header()
    writer.writerow(header)
    metric_names = header[1 + len(config.param_names):-1]
    for row in rows:
        line = [config.family.value]
        line += [_fmt(row.params[name]) for name in config.param_names]
        if row.status == STATUS_OK:
            line += [_fmt(row.metrics[name]) for name in metric_names]
        else:
            line += [""] * len(metric_names)
        line.append(row.status)
        writer.writerow(line)
    return buf.getvalue()


def write_csv(config: SweepConfig, rows: Sequence[SweepRow], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # newline="" keeps "\n" line endings on every platform
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(config, rows))
    return path


# ---------------------------------------------------------------------------
# config files


def config_from_mapping(data: Mapping) -> SweepConfig:
    """Build a config from a plain mapping (as loaded from JSON).

    Axes are given either as ``{"name": ..., "start": ..., "stop": ..., "step": ...}``
    objects or as ``[name, start, stop, step]`` lists.
    """
    try:
        axes = []
        for a in data.get("axes", []):
            if isinstance(a, Mapping):
                axes.append(Axis(a["name"], float(a["start"]), float(a["stop"]), float(a["step"])))
            else:
                name, start, stop, step = a
                axes.append(Axis(name, float(start), float(stop), float(step)))
        return SweepConfig(
            family=data["family"],
            fixed=dict(data.get("fixed", {})),
            axes=axes,
            epsilon=float(data.get("epsilon", DEFAULT_EPSILON)),
            nmax_cap=int(data.get("nmax_cap", DEFAULT_NMAX_CAP)),
            hoa_orders=tuple(data.get("hoa_orders", (2, 3))),
            output_path=data.get("output_path"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed sweep config: {exc}") from exc


def load_config(path) -> Dict:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigError("sweep config must be a JSON object")
    return data


# ---------------------------------------------------------------------------
# figure presets
#
# Plotted ranges in the source figures are not legible; these are chosen to
# cover each family's interesting region.

FIGURE_PRESETS: Dict[int, Dict] = {
    1: {
        "family": "binomial",
        "axes": [["p", 0.02, 0.98, 0.02], ["M", 2, 20, 2]],
    },
    2: {
        "family": "generalized_binomial",
        "fixed": {"N": 10},
        "axes": [["alpha", 0.0, 10.0, 0.5], ["beta", 0.0, 10.0, 0.5]],
    },
    3: {
        "family": "pacs",
        "axes": [["alpha", 0.1, 2.0, 0.05], ["m", 0, 3, 1]],
    },
    4: {
        "family": "negative_binomial",
        "axes": [["p", 0.2, 0.9, 0.02], ["M", 0, 5, 1]],
    },
    5: {
        "family": "hypergeometric",
        "fixed": {"L": 100.0, "M": 5},
        "axes": [["p", 0.06, 0.94, 0.01]],
    },
}


def figure_config(figure_id: int, epsilon: float = DEFAULT_EPSILON, nmax_cap: int = DEFAULT_NMAX_CAP) -> SweepConfig:
    if figure_id not in FIGURE_PRESETS:
        raise UnknownFigure(f"no preset for figure {figure_id}; choose from {sorted(FIGURE_PRESETS)}")
    data = dict(FIGURE_PRESETS[figure_id], epsilon=epsilon, nmax_cap=nmax_cap)
    return config_from_mapping(data)


# ---------------------------------------------------------------------------
# validation of emitted files


def validate_csv(path_or_text, tol: float = 1e-10) -> List[str]:
    """Check every ``ok`` row of an emitted CSV against the phase-metric invariants.

    Returns a list of human-readable problems; empty means the file is clean.
    """
    text = Path(path_or_text).read_text() if isinstance(path_or_text, Path) else path_or_text
    problems = []
    for i, rec in enumerate(csv.DictReader(io.StringIO(text)), start=2):
        if rec["status"] != STATUS_OK:
            if any(rec[c] for c in METRIC_COLUMNS):
                problems.append(f"line {i}: non-ok row carries metrics")
            continue
        try:
            vals = {c: float(rec[c]) for c in METRIC_COLUMNS}
        except ValueError:
            problems.append(f"line {i}: unparsable metric")
            continue
        if not all(math.isfinite(v) for v in vals.values()):
            problems.append(f"line {i}: non-finite metric")
            continue
        scale = max(1.0, abs(vals["U"]))
        if vals["U"] < 0.25 - tol * scale:
            problems.append(f"line {i}: U below 1/4")
        if not 0.0 < vals["T"] < 1.0:
            problems.append(f"line {i}: T outside (0, 1)")
        if abs(vals["d_u"] - (vals["U"] - 0.5)) > 1e-10 * scale:
            problems.append(f"line {i}: d_u != U - 1/2")
        if vals["d_u"] < -1e-12 and not vals["antibunch"] < 0.0:
            problems.append(f"line {i}: reduced U without antibunching")
    return problems
