"""Single runs, parameter sweeps and figure datasets written as CSV."""
from __future__ import annotations

import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .config import (ConfigError, RunConfig, SweepConfig, apply_overrides, format_config,
                     parse_config)
from .discharge import SelfDischargeParams, amplitude_sd
from .laplace import amplitude_arrays
from .observables import Trajectory, charging_time, ergotropy_from_population
from .oracle import DEFAULT_STEP, STABILITY_BOUND, integrate_on_grid, max_rate
from .params import InitialAmplitudes, SystemParams

log = logging.getLogger(__name__)

CHARGING_COLUMNS = ("t", "scaled_t", "re_mu", "im_mu", "re_nu", "im_nu",
                    "energy_A", "energy_B", "ergotropy_B", "ratio", "power")
ORACLE_COLUMNS = ("re_mu_oracle", "im_mu_oracle", "re_nu_oracle", "im_nu_oracle")
SELF_DISCHARGE_COLUMNS = ("t", "gamma_t", "abs_nu_sd", "energy_B", "ergotropy_B")
CONFIG_PREFIX = "config: "

FIG_R = (0.01, 0.1, 1.0, 10.0, 100.0)
FIG_DAMPING = (0.05, 1.0, 10.0)
FIG4_R = (0.01, 0.1, 0.5, 1.0, 10.0, 100.0)
FIG4_DETUNING = (0.0, 0.5, 2.0)
FIG4_GAMMA_T = 20.0
TABLE_P_R = (0.01, 0.1, 10.0, 100.0)
TABLE_P_DAMPING = 0.05
FIGURES = ("fig2", "fig3", "fig4", "table-p")


class SolverError(RuntimeError):
    pass


@dataclass
class OutputTable:
    columns: tuple[str, ...]
    data: np.ndarray
    metadata: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        if self.data.ndim != 2 or self.data.shape[1] != len(self.columns):
            raise ValueError("data shape does not match columns")

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]

    def meta(self, key: str) -> Optional[str]:
        for k, v in self.metadata:
            if k == key:
                return v
        return None

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.metadata:
            buf.write(f"# {k} = {v}\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.data:
            buf.write(",".join(format(x, ".17g") for x in row) + "\n")
        return buf.getvalue()

    def write(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_csv())
        return path


def read_csv(text: str) -> OutputTable:
    meta, rows, columns = [], [], None
    for line in text.splitlines():
        if line.startswith("#"):
            k, _, v = line[1:].strip().partition(" = ")
            meta.append((k, v))
        elif columns is None:
            columns = tuple(line.split(","))
        elif line:
            rows.append([float(x) for x in line.split(",")])
    return OutputTable(columns, np.array(rows).reshape(len(rows), len(columns)), meta)


def config_from_header(table_or_text) -> RunConfig:
    """Recover the run config echoed into a table's metadata."""
    table = read_csv(table_or_text) if isinstance(table_or_text, str) else table_or_text
    lines = [f"{k[len(CONFIG_PREFIX):]} = {v}" for k, v in table.metadata
             if k.startswith(CONFIG_PREFIX)]
    return parse_config("\n".join(lines))


def _config_meta(cfg: RunConfig) -> list[tuple[str, str]]:
    out = []
    for line in format_config(cfg).splitlines():
        k, _, v = line.partition(" = ")
        out.append((CONFIG_PREFIX + k, v))
    return out


def oracle_step(p: SystemParams) -> float:
    """Default RK4 step: 1e-4 in units of 1/kappa (1/gamma without charger), within the stability bound."""
    scale = p.kappa if p.kappa > 0 else max(p.gamma, p.lam)
    return min(DEFAULT_STEP / scale, STABILITY_BOUND / max_rate(p))


def run_single(cfg: RunConfig) -> OutputTable:
    p = cfg.params
    scaled = np.linspace(0.0, cfg.t_max, cfg.n_points)
    t = scaled / cfg.time_scale
    try:
        if cfg.solver in ("analytic", "both"):
            mu, nu = amplitude_arrays(p, cfg.init, t)
        if cfg.solver in ("oracle", "both"):
            mu_o, nu_o = integrate_on_grid(p, cfg.init, t, oracle_step(p))
            if cfg.solver == "oracle":
                mu, nu = mu_o, nu_o
    except (ArithmeticError, ValueError) as e:
        raise SolverError(f"{cfg.solver} solver failed for {p}: {e}") from e

    traj = Trajectory(t, mu, nu, p.omega0)
    obs = {
        "energy_A": traj.energy_A / p.omega0,
        "energy_B": traj.energy_B / p.omega0,
        "ergotropy_B": traj.ergotropy_B / p.omega0,
        "ratio": traj.ratio,
        "power": traj.power / (p.omega0 * cfg.time_scale) if len(t) >= 3 else np.full(len(t), np.nan),
    }
    columns = ["t", "scaled_t", "re_mu", "im_mu", "re_nu", "im_nu"]
    cols = [t, scaled, mu.real, mu.imag, nu.real, nu.imag]
    for name in CHARGING_COLUMNS[6:]:
        if name in cfg.outputs:
            columns.append(name)
            cols.append(obs[name])

    meta = [("artifact", f"qbattery {__version__}"), ("solver", cfg.solver),
            ("units", f"energy in omega0, ergotropy in W_max, power in omega0*{cfg.time_unit[:-2]}")]
    if cfg.solver == "both":
        columns += ORACLE_COLUMNS
        cols += [mu_o.real, mu_o.imag, nu_o.real, nu_o.imag]
        dev = max(np.max(np.abs(mu - mu_o)), np.max(np.abs(nu - nu_o)))
        meta.append(("max_deviation", format(float(dev), ".17g")))
    meta += _config_meta(cfg)
    return OutputTable(tuple(columns), np.column_stack(cols), meta)


@dataclass
class SweepResult:
    tables: dict[str, OutputTable]
    index: list[dict]
    failures: list[tuple[dict, str]]
    index_path: Optional[Path] = None


def _run_point(base: RunConfig, values: dict) -> OutputTable:
    return run_single(apply_overrides(base, values))


def run_sweep(cfg: SweepConfig, workers: Optional[int] = None) -> SweepResult:
    """Run every grid point; write one CSV per point plus ``index.csv`` if ``cfg.out_dir`` is set.

    Failed points are reported in ``failures``; the others are kept.
    Output does not depend on ``workers``.
    """
    cfg.check_cap()
    points = cfg.points()
    names = [n for n, _ in cfg.axes]

    def task(i_values):
        i, values = i_values
        try:
            return i, _run_point(cfg.base, values), None
        except (ConfigError, SolverError) as e:
            return i, None, str(e)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = sorted(pool.map(task, enumerate(points)), key=lambda r: r[0])

    tables, index, failures = {}, [], []
    for (i, table, err), values in zip(results, points):
        fname = f"run_{i:04d}.csv"
        entry = {"file": fname, **values, "status": "ok" if err is None else "failed"}
        index.append(entry)
        if err is None:
            tables[fname] = table
        else:
            failures.append((values, err))
            log.warning("sweep point %s failed: %s", values, err)

    index_path = None
    if cfg.out_dir is not None:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for fname, table in tables.items():
            table.write(out / fname)
        index_path = _write_index(out / "index.csv", ["file", *names, "status"], index)
    return SweepResult(tables, index, failures, index_path)


def _write_index(path: Path, columns, rows) -> Path:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(format(row[c], ".17g") if isinstance(row[c], float) else str(row[c])
                              for c in columns))
    path.write_text("\n".join(lines) + "\n")
    return path


def self_discharge_table(R: float, delta_over_gamma: float, gamma: float = 1.0,
                         gamma_t_max: float = FIG4_GAMMA_T, n_points: int = 2000,
                         omega0: float = 1.0) -> OutputTable:
    p = SelfDischargeParams.from_ratio(R, gamma, delta_over_gamma * gamma)
    gt = np.linspace(0.0, gamma_t_max, n_points)
    t = gt / gamma
    amp = np.asarray(amplitude_sd(p, t))
    pop = amp ** 2
    meta = [("artifact", f"qbattery {__version__}"), ("solver", "closed-form self-discharge"),
            ("gamma", format(gamma, ".17g")), ("R", format(R, ".17g")),
            ("delta", format(delta_over_gamma * gamma, ".17g")), ("omega0", format(omega0, ".17g"))]
    data = np.column_stack([t, gt, amp, pop, ergotropy_from_population(pop)])
    return OutputTable(SELF_DISCHARGE_COLUMNS, data, meta)


def charging_config(gamma_over_kappa: float, R: float, n_points: int = 2000,
                    solver: str = "analytic") -> RunConfig:
    gamma = gamma_over_kappa
    return RunConfig(params=SystemParams(omega0=1.0, kappa=1.0, gamma=gamma, lam=gamma / R),
                     init=InitialAmplitudes(1.0, 0.0), t_max=4 * math.pi, n_points=n_points,
                     solver=solver, time_unit="kappa_t", R=R)


def table_p() -> OutputTable:
    """Charging probability and ergotropy at the ideal charging time for gamma = 0.05 kappa."""
    rows = []
    tau = charging_time(1.0)
    for R in TABLE_P_R:
        p = SystemParams(omega0=1.0, kappa=1.0, gamma=TABLE_P_DAMPING, lam=TABLE_P_DAMPING / R)
        _, nu = amplitude_arrays(p, InitialAmplitudes(1.0, 0.0), [tau])
        pop = float(abs(nu[0]) ** 2)
        rows.append([R, TABLE_P_DAMPING, tau, pop, float(ergotropy_from_population(pop))])
    meta = [("artifact", f"qbattery {__version__}"), ("solver", "analytic"),
            ("kappa", "1"), ("omega0", "1"), ("delta", "0")]
    return OutputTable(("R", "gamma_over_kappa", "tau_ch", "p_tau_ch", "ergotropy_tau_ch"),
                       np.array(rows), meta)


def reproduce_figure(fig_id: str, out_dir, n_points: int = 2000,
                     workers: Optional[int] = None) -> list[Path]:
    """Write the dataset behind a figure (or the charging table) under ``out_dir/fig_id``."""
    if fig_id not in FIGURES:
        raise ValueError(f"unknown figure id {fig_id!r}; choose from {', '.join(FIGURES)}")
    out = Path(out_dir)
    if fig_id == "table-p":
        return [table_p().write(out / "table-p.csv")]

    target = out / fig_id
    target.mkdir(parents=True, exist_ok=True)
    index, paths = [], []
    if fig_id in ("fig2", "fig3"):
        jobs = [(gk, R) for gk in FIG_DAMPING for R in FIG_R]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            tables = list(pool.map(lambda j: run_single(charging_config(*j, n_points=n_points)), jobs))
        for (gk, R), table in zip(jobs, tables):
            name = f"gk{gk:g}_R{R:g}.csv"
            paths.append(table.write(target / name))
            index.append({"file": name, "gamma_over_kappa": gk, "R": R})
        _write_index(target / "index.csv", ["file", "gamma_over_kappa", "R"], index)
    else:
        for dg in FIG4_DETUNING:
            for R in FIG4_R:
                name = f"dg{dg:g}_R{R:g}.csv"
                paths.append(self_discharge_table(R, dg, n_points=n_points).write(target / name))
                index.append({"file": name, "delta_over_gamma": dg, "R": R})
        _write_index(target / "index.csv", ["file", "delta_over_gamma", "R"], index)
    return paths
