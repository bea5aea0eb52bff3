"""Scenario orchestration: config files, the standard experiments, CSV output."""
from __future__ import annotations

import datetime as _dt
import json
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .dynamics import TimeGrid, convergence_check, evolve_observables
from .errors import NotConverged, ParseError, ValidationError
from .model import ModelParams

SCENARIOS = ("fig1", "sweep_pop", "sweep_neg_vib", "sweep_neg_bath", "convergence", "custom")
SWEEP_SCENARIOS = ("sweep_pop", "sweep_neg_vib", "sweep_neg_bath")

# config key -> (field name, type)
_MODEL_KEYS = {
    "delta_e_cm1": ("delta_e", float),
    "v_cm1": ("v", float),
    "omega_vib_cm1": ("omega_vib", float),
    "g_cm1": ("g", float),
    "temperature_k": ("temperature", float),
    "n_trunc_vib": ("n_trunc_vib", int),
    "omega0_cm1": ("omega0", float),
    "g0_cm1": ("g0", float),
    "n_trunc_bath": ("n_trunc_bath", int),
    "bath_init": ("bath_init", str),
}
_GRID_KEYS = {
    "t_start_fs": ("t_start", float),
    "t_end_fs": ("t_end", float),
    "n_points": ("n_points", int),
}
_OTHER_KEYS = {
    "scenario": str,
    "g0_values_cm1": list,
    "discord_grid_n": int,
    "discord_refine_iters": int,
    "output_path": str,
    "seed": int,
    "workers": int,
}
REQUIRED_KEYS = ("scenario", "delta_e_cm1", "v_cm1", "omega_vib_cm1", "g_cm1", "temperature_k")
ALL_KEYS = tuple(_MODEL_KEYS) + tuple(_GRID_KEYS) + tuple(_OTHER_KEYS)

DEFAULT_SWEEP_POINTS = 21


def default_g0_values(g: float) -> tuple:
    """21 log-spaced couplings from g/100 to g."""
    return tuple(float(x) for x in g * np.logspace(-2.0, 0.0, DEFAULT_SWEEP_POINTS))


@dataclass(frozen=True)
class ScenarioConfig:
    model: ModelParams
    grid: TimeGrid
    scenario: str
    g0_values: tuple = ()
    discord_grid_n: int = 64
    discord_refine_iters: int = 60
    output_path: str = ""
    seed: int = 0
    workers: int = 1
    defaults_used: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValidationError("scenario", f"must be one of {SCENARIOS}, got {self.scenario!r}")
        if self.scenario in SWEEP_SCENARIOS and not self.g0_values:
            raise ValidationError("g0_values_cm1", "must be nonempty for sweep scenarios")
        if any(g0 < 0 for g0 in self.g0_values):
            raise ValidationError("g0_values_cm1", "couplings must be >= 0")
        if self.discord_grid_n < 0 or self.discord_grid_n == 1:
            raise ValidationError("discord_grid_n", "must be 0 (disabled) or >= 2")
        if self.scenario == "fig1" and self.discord_grid_n == 0:
            raise ValidationError("discord_grid_n", "fig1 reports discord; must be >= 2")
        if self.discord_refine_iters < 0:
            raise ValidationError("discord_refine_iters", "must be >= 0")
        if self.workers < 1:
            raise ValidationError("workers", "must be >= 1")

    def echo(self) -> dict:
        """Flat config in file-key form, every resolved value included."""
        out = {"scenario": self.scenario}
        for key, (attr, _) in _MODEL_KEYS.items():
            out[key] = getattr(self.model, attr)
        for key, (attr, _) in _GRID_KEYS.items():
            out[key] = getattr(self.grid, attr)
        out["g0_values_cm1"] = list(self.g0_values)
        out["discord_grid_n"] = self.discord_grid_n
        out["discord_refine_iters"] = self.discord_refine_iters
        out["output_path"] = self.output_path
        out["seed"] = self.seed
        out["workers"] = self.workers
        return out


def _coerce(key: str, value, kind):
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(key, f"expected a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError(key, f"expected an integer, got {value!r}")
        return value
    if kind is str:
        if not isinstance(value, str):
            raise ValidationError(key, f"expected a string, got {value!r}")
        return value
    if kind is list:
        if not isinstance(value, list):
            raise ValidationError(key, f"expected a list, got {value!r}")
        return [_coerce(key, v, float) for v in value]
    raise TypeError(kind)


def config_from_mapping(raw: dict) -> ScenarioConfig:
    """Validate a flat key/value mapping into a :class:`ScenarioConfig`."""
    unknown = sorted(set(raw) - set(ALL_KEYS))
    if unknown:
        raise ValidationError(unknown[0], f"unknown key (allowed: {', '.join(ALL_KEYS)})")
    for key in REQUIRED_KEYS:
        if key not in raw:
            raise ValidationError(key, "required key is missing")
    scenario = _coerce("scenario", raw["scenario"], str)
    defaults_used = []

    model_kwargs = {}
    for key, (attr, kind) in _MODEL_KEYS.items():
        if key in raw:
            model_kwargs[attr] = _coerce(key, raw[key], kind)
    if "omega0_cm1" not in raw:
        model_kwargs["omega0"] = 1e-2 * model_kwargs["omega_vib"]
        defaults_used.append("omega0_cm1")
    try:
        model = ModelParams(**model_kwargs)
    except ValidationError as exc:
        key = next((k for k, (a, _) in _MODEL_KEYS.items() if a == exc.field), exc.field)
        raise ValidationError(key, str(exc).split(": ", 1)[-1]) from None

    grid_kwargs = {attr: _coerce(key, raw[key], kind)
                   for key, (attr, kind) in _GRID_KEYS.items() if key in raw}
    defaults_used += [key for key in _GRID_KEYS if key not in raw]
    try:
        grid = TimeGrid(**grid_kwargs)
    except ValueError as exc:
        raise ValidationError("t_end_fs" if "t_end" in str(exc) else "n_points", str(exc)) from None

    if "g0_values_cm1" in raw:
        g0_values = tuple(_coerce("g0_values_cm1", raw["g0_values_cm1"], list))
    elif scenario in SWEEP_SCENARIOS:
        g0_values = default_g0_values(model.g)
        defaults_used.append("g0_values_cm1")
    else:
        g0_values = ()

    default_grid_n = 0 if scenario in SWEEP_SCENARIOS else 64
    extra = {}
    for key in ("discord_grid_n", "discord_refine_iters", "output_path", "seed", "workers"):
        if key in raw:
            extra[key] = _coerce(key, raw[key], _OTHER_KEYS[key])
    extra.setdefault("discord_grid_n", default_grid_n)
    return ScenarioConfig(model=model, grid=grid, scenario=scenario, g0_values=g0_values,
                          defaults_used=tuple(defaults_used), **extra)


_TOML_POS = re.compile(r"\(at line (\d+), column (\d+)\)")


def load_config(path) -> ScenarioConfig:
    """Read a flat TOML config file.

    Raises
    ------
    ParseError
        Malformed TOML; carries line and column.
    ValidationError
        Unknown key, missing required key, or a value out of range.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = _TOML_POS.search(str(exc))
        line, col = (int(m.group(1)), int(m.group(2))) if m else (None, None)
        raise ParseError(_TOML_POS.sub("", str(exc)).strip(), line, col) from None
    nested = [k for k, v in raw.items() if isinstance(v, dict)]
    if nested:
        raise ValidationError(nested[0], "tables are not allowed; the config is flat")
    return config_from_mapping(raw)


SHIPPED_CONFIGS = ("fig1", "fig2_pop", "fig2b_pop", "fig3_neg_vib", "fig4_neg_bath", "convergence")


def shipped_config_path(name: str = "fig1"):
    """Path of a shipped config (see ``SHIPPED_CONFIGS``)."""
    if name not in SHIPPED_CONFIGS:
        raise ValueError(f"no shipped config {name!r}; choose from {SHIPPED_CONFIGS}")
    return resources.files("vibrodimer") / "data" / f"{name}.toml"


def shipped_config(name: str = "fig1") -> ScenarioConfig:
    with resources.as_file(shipped_config_path(name)) as path:
        return load_config(path)


# -- results --------------------------------------------------------------

@dataclass
class ResultTable:
    columns: tuple
    rows: np.ndarray
    metadata: dict = field(default_factory=dict)
    report: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        rows = np.asarray(self.rows, dtype=float)
        if rows.size == 0:
            rows = rows.reshape(0, len(self.columns))
        if rows.ndim != 2 or rows.shape[1] != len(self.columns):
            raise ValueError(f"rows of shape {rows.shape} do not match {len(self.columns)} columns")
        self.rows = rows

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]

    def where(self, name: str, value: float) -> "ResultTable":
        mask = self.column(name) == value
        return ResultTable(self.columns, self.rows[mask], dict(self.metadata))


RUN_LINE_KEY = "run"


def _metadata(cfg: ScenarioConfig, **extra) -> dict:
    meta = {"code": "vibrodimer", "code_version": __version__}
    meta.update(cfg.echo())
    meta["n_trunc_vib"] = cfg.model.n_trunc_vib
    meta["n_trunc_bath"] = cfg.model.n_trunc_bath
    meta["time_window_source"] = "default" if "t_end_fs" in cfg.defaults_used else "config"
    meta["g0_sweep_source"] = "default" if "g0_values_cm1" in cfg.defaults_used else "config"
    meta["units"] = "energies cm^-1, time fs, entropies bits"
    meta.update(extra)
    return meta


def _stamp(meta: dict, started: float) -> dict:
    now = _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()
    meta[RUN_LINE_KEY] = f"generated_utc={now} wall_time_s={time.perf_counter() - started:.3f}"
    return meta


def run_fig1(cfg: ScenarioConfig) -> ResultTable:
    """Negativity, discord and EoF lower bound of dimer|vib over time."""
    if cfg.scenario != "fig1":
        raise ValidationError("scenario", f"run_fig1 needs scenario 'fig1', got {cfg.scenario!r}")
    started = time.perf_counter()
    names = ["negativity", "discord", "eof_lb"]
    ts = evolve_observables(cfg.model, cfg.grid, names, with_bath=False,
                            discord_grid_n=cfg.discord_grid_n,
                            discord_refine_iters=cfg.discord_refine_iters, workers=cfg.workers)
    rows = np.column_stack([ts.times] + [ts[n] for n in names])
    meta = _metadata(cfg, model="dimer x vib", transpose="dimer", measured="dimer")
    return ResultTable(("time_fs", *names), rows, _stamp(meta, started))


_SWEEP_OBSERVABLE = {
    "sweep_pop": ("p_x_minus", "discord"),
    "sweep_neg_vib": ("negativity", "discord"),
    "sweep_neg_bath": ("negativity_bath", "discord_bath"),
}


def run_sweep(cfg: ScenarioConfig) -> ResultTable:
    """One time series per bath coupling ``g0`` on ``dimer ⊗ vib ⊗ bath``.

    Rows are ordered by ``(g0, t)`` in config order.  A ``discord`` column is
    added when ``discord_grid_n > 0``.
    """
    if cfg.scenario not in SWEEP_SCENARIOS:
        raise ValidationError("scenario", f"run_sweep needs one of {SWEEP_SCENARIOS}, got {cfg.scenario!r}")
    started = time.perf_counter()
    value_name, discord_name = _SWEEP_OBSERVABLE[cfg.scenario]
    names = [value_name] + ([discord_name] if cfg.discord_grid_n else [])

    def one(g0):
        ts = evolve_observables(cfg.model.with_(g0=g0), cfg.grid, names, with_bath=True,
                                discord_grid_n=max(cfg.discord_grid_n, 2),
                                discord_refine_iters=cfg.discord_refine_iters)
        return np.column_stack([np.full(cfg.grid.n_points, g0), ts.times] + [ts[n] for n in names])

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            blocks = list(pool.map(one, cfg.g0_values))
    else:
        blocks = [one(g0) for g0 in cfg.g0_values]
    columns = ("g0_cm1", "time_fs", "value") + (("discord",) if cfg.discord_grid_n else ())
    meta = _metadata(cfg, model="dimer x vib x bath", value=value_name)
    return ResultTable(columns, np.vstack(blocks), _stamp(meta, started))


def _convergence_observables(cfg: ScenarioConfig):
    with_bath = cfg.model.g0 > 0
    names = ["p_x_minus", "negativity"]
    if cfg.discord_grid_n:
        names.append("discord")
    if with_bath:
        names.append("negativity_bath")
    return names, with_bath


def run_convergence(cfg: ScenarioConfig, tol: float = 1e-6) -> ResultTable:
    """Truncation audit at ``n`` vs ``n + 2``.

    Always returns the table; raises :class:`NotConverged` afterwards via
    :func:`check_convergence_table` if the caller wants a hard failure.
    """
    started = time.perf_counter()
    names, with_bath = _convergence_observables(cfg)
    report = convergence_check(cfg.model, cfg.grid, names, with_bath=with_bath, tol=tol,
                               raise_on_failure=False, discord_grid_n=max(cfg.discord_grid_n, 2),
                               discord_refine_iters=cfg.discord_refine_iters)
    columns = ["n_trunc_vib", "n_trunc_vib_ref"] + [f"{n}_sup_dev" for n in names] + ["passed"]
    row = [report.n_trunc_vib, report.n_trunc_vib_ref] + [report.deviations[n] for n in names]
    row.append(1.0 if report.passed else 0.0)
    meta = _metadata(cfg, tolerance=tol, with_bath=with_bath,
                     n_trunc_bath_ref=report.n_trunc_bath_ref)
    return ResultTable(tuple(columns), np.array([row]), _stamp(meta, started), report=report)


def check_convergence_table(table: ResultTable) -> None:
    report = table.report
    if not report.passed:
        name, dev = report.worst()
        raise NotConverged(name, dev, report.tolerance, report)


def run_custom(cfg: ScenarioConfig) -> ResultTable:
    """Every scalar observable for the configured model (bath included if g0 > 0)."""
    started = time.perf_counter()
    with_bath = cfg.model.g0 > 0
    names = ["p_x_minus", "negativity", "eof_lb", "purity", "energy"]
    if with_bath:
        names.append("negativity_bath")
    if cfg.discord_grid_n:
        names.append("discord")
    ts = evolve_observables(cfg.model, cfg.grid, names, with_bath=with_bath,
                            discord_grid_n=max(cfg.discord_grid_n, 2),
                            discord_refine_iters=cfg.discord_refine_iters, workers=cfg.workers)
    rows = np.column_stack([ts.times] + [ts[n] for n in names])
    meta = _metadata(cfg, with_bath=with_bath)
    return ResultTable(("time_fs", *names), rows, _stamp(meta, started))


def run_scenario(cfg: ScenarioConfig) -> ResultTable:
    if cfg.scenario == "fig1":
        return run_fig1(cfg)
    if cfg.scenario in SWEEP_SCENARIOS:
        return run_sweep(cfg)
    if cfg.scenario == "convergence":
        return run_convergence(cfg)
    return run_custom(cfg)


# -- CSV ------------------------------------------------------------------

def format_value(x: float) -> str:
    return f"{x:.12g}"


def write_results(table: ResultTable, path) -> None:
    """CSV with ``#`` metadata lines, a header row and 12-significant-digit values."""
    lines = []
    for key, value in table.metadata.items():
        text = value if key == RUN_LINE_KEY else json.dumps(value)
        lines.append(f"# {key} = {text}")
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(format_value(x) for x in row))
    data = "\n".join(lines) + "\n"
    if path in (None, "", "-"):
        import sys
        sys.stdout.write(data)
        return
    Path(path).write_text(data, encoding="utf-8")


def read_results(path) -> ResultTable:
    meta = {}
    header = None
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(" = ")
            meta[key] = value if key == RUN_LINE_KEY else json.loads(value)
        elif header is None:
            header = tuple(line.split(","))
        elif line:
            rows.append([float(x) for x in line.split(",")])
    if header is None:
        raise ValueError(f"{path}: no header row")
    return ResultTable(header, np.array(rows, dtype=float).reshape(len(rows), len(header)), meta)
