"""Line-oriented ``key = value`` run configurations.

Example::

    omega0 = 1
    kappa = 1
    gamma = 0.05
    R = 10              # or: lambda = 0.005, never both
    delta = 0
    t_max = 4*pi        # in units of time_unit
    n_points = 2000
    solver = analytic   # analytic | oracle | both
    time_unit = kappa_t # kappa_t | gamma_t
    outputs = energy_B, ergotropy_B
    sweep.R = 0.01, 0.1, 1, 10, 100
"""
from __future__ import annotations

import ast
import itertools
import math
import operator
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .params import InitialAmplitudes, SystemParams, validate_params

OBSERVABLES = ("energy_A", "energy_B", "ergotropy_B", "ratio", "power")
SOLVERS = ("analytic", "oracle", "both")
TIME_UNITS = ("kappa_t", "gamma_t")
SWEEPABLE = ("omega0", "kappa", "gamma", "lambda", "R", "delta")
SCALAR_KEYS = ("omega0", "kappa", "gamma", "lambda", "R", "delta", "t_max", "n_points",
               "mu0_re", "mu0_im", "nu0_re", "nu0_im", "solver", "time_unit", "outputs")
DEFAULT_CAP = 10_000


class ConfigError(ValueError):
    """Invalid configuration text or values."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams
    init: InitialAmplitudes = InitialAmplitudes()
    t_max: float = 4 * math.pi
    n_points: int = 2000
    solver: str = "analytic"
    outputs: tuple[str, ...] = OBSERVABLES
    time_unit: str = "kappa_t"
    # memory ratio as given by the user; None when lambda was given directly
    R: Optional[float] = None

    def __post_init__(self):
        if self.n_points < 2:
            raise ConfigError("n_points must be at least 2")
        if not (self.t_max > 0 and math.isfinite(self.t_max)):
            raise ConfigError("t_max must be positive")
        if self.solver not in SOLVERS:
            raise ConfigError(f"solver must be one of {', '.join(SOLVERS)}")
        if self.time_unit not in TIME_UNITS:
            raise ConfigError(f"time_unit must be one of {', '.join(TIME_UNITS)}")
        unknown = [o for o in self.outputs if o not in OBSERVABLES]
        if unknown:
            raise ConfigError(f"outputs: unknown observable(s) {', '.join(unknown)}")
        rate = self.params.kappa if self.time_unit == "kappa_t" else self.params.gamma
        if rate <= 0:
            raise ConfigError(f"time_unit = {self.time_unit} needs "
                              f"{'kappa' if self.time_unit == 'kappa_t' else 'gamma'} > 0")

    @property
    def time_scale(self) -> float:
        """Rate that converts physical time to the scaled time axis."""
        return self.params.kappa if self.time_unit == "kappa_t" else self.params.gamma


@dataclass(frozen=True)
class SweepConfig:
    base: RunConfig
    axes: tuple[tuple[str, tuple[float, ...]], ...] = ()
    out_dir: Optional[Path] = None
    cap: int = DEFAULT_CAP

    @property
    def size(self) -> int:
        return math.prod(len(v) for _, v in self.axes)

    def check_cap(self) -> None:
        if self.size > self.cap:
            raise ConfigError(f"sweep has {self.size} points, exceeding the cap of {self.cap}")

    def points(self) -> list[dict[str, float]]:
        names = [n for n, _ in self.axes]
        return [dict(zip(names, combo)) for combo in itertools.product(*(v for _, v in self.axes))]


_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow}


def parse_number(text: str) -> float:
    """Parse a float, allowing simple arithmetic with ``pi`` (e.g. ``4*pi``, ``pi/2``)."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError:
        raise ValueError(f"not a number: {text.strip()!r}") from None

    def ev(node):
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
                and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(f"not a number: {text.strip()!r}")

    return ev(tree.body)


def _parse_int(text: str) -> int:
    v = parse_number(text)
    if v != int(v):
        raise ValueError(f"not an integer: {text.strip()!r}")
    return int(v)


def _tokenize(text: str):
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key in seen:
            raise ConfigError(f"duplicate key {key!r} (first on line {seen[key]})", lineno)
        seen[key] = lineno
        yield lineno, key, value


def parse_config(text: str, *, out_dir=None, cap: int = DEFAULT_CAP):
    """Parse config text into a :class:`RunConfig`, or a :class:`SweepConfig` if it has ``sweep.*`` keys."""
    scalars: dict[str, tuple[int, str]] = {}
    axes: list[tuple[str, tuple[float, ...]]] = []
    for lineno, key, value in _tokenize(text):
        if key.startswith("sweep."):
            name = key[len("sweep."):]
            if name not in SWEEPABLE:
                raise ConfigError(f"cannot sweep {name!r}; sweepable: {', '.join(SWEEPABLE)}", lineno)
            try:
                vals = tuple(parse_number(v) for v in value.split(",") if v.strip())
            except ValueError as e:
                raise ConfigError(f"{key}: {e}", lineno) from None
            if not vals:
                raise ConfigError(f"{key}: no values", lineno)
            axes.append((name, vals))
        elif key in SCALAR_KEYS:
            scalars[key] = (lineno, value)
        else:
            raise ConfigError(f"unknown key {key!r}", lineno)

    names = [n for n, _ in axes]
    if "R" in names and "lambda" in names:
        raise ConfigError("over-determined: R vs lambda")
    # a swept parameter only needs a placeholder in the base config
    first = {n: v[0] for n, v in axes}

    def num(key, default=None, *, integer=False):
        if key in scalars:
            lineno, value = scalars[key]
            try:
                return _parse_int(value) if integer else parse_number(value)
            except ValueError as e:
                raise ConfigError(f"{key}: {e}", lineno) from None
        if key in first:
            return first[key]
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default

    def word(key, default):
        return scalars[key][1] if key in scalars else default

    has_R = "R" in scalars or "R" in first
    has_lam = "lambda" in scalars or "lambda" in first
    if has_R and has_lam:
        raise ConfigError("over-determined: R vs lambda")
    if not (has_R or has_lam):
        raise ConfigError("missing required key 'lambda' (or 'R')")

    gamma = num("gamma")
    R = num("R") if has_R else None
    if R is not None:
        if not (R > 0 and math.isfinite(R)):
            raise ConfigError("R must be positive")
        if gamma <= 0 and "R" in scalars:
            raise ConfigError("R requires gamma > 0 (lambda = gamma/R)")
    lam = gamma / R if R is not None else num("lambda")

    try:
        params = validate_params(SystemParams(
            omega0=num("omega0", 1.0), kappa=num("kappa"), gamma=gamma, lam=lam,
            delta=num("delta", 0.0)))
    except ValueError as e:
        raise ConfigError(str(e)) from None
    try:
        init = InitialAmplitudes(complex(num("mu0_re", 1.0), num("mu0_im", 0.0)),
                                 complex(num("nu0_re", 0.0), num("nu0_im", 0.0)))
    except ValueError as e:
        raise ConfigError(str(e)) from None

    outputs = OBSERVABLES
    if "outputs" in scalars:
        outputs = tuple(o.strip() for o in scalars["outputs"][1].split(",") if o.strip())
    n_points = num("n_points", integer=True)
    if n_points < 2:
        raise ConfigError("n_points must be at least 2", scalars["n_points"][0])

    run = RunConfig(params=params, init=init, t_max=num("t_max"), n_points=n_points,
                    solver=word("solver", "analytic"), outputs=outputs,
                    time_unit=word("time_unit", "kappa_t"), R=R)
    if not axes:
        return run
    sweep = SweepConfig(base=run, axes=tuple(axes),
                        out_dir=Path(out_dir) if out_dir is not None else None, cap=cap)
    return sweep


def apply_overrides(base: RunConfig, values: dict[str, float]) -> RunConfig:
    """Copy of ``base`` with some physical parameters replaced.

    A given ``R`` is held fixed when ``gamma`` changes, so sweeping gamma
    at constant memory ratio works as expected.
    """
    p = base.params
    fields = {"omega0": p.omega0, "kappa": p.kappa, "gamma": p.gamma, "delta": p.delta}
    fields.update({k: v for k, v in values.items() if k in fields})
    R = base.R
    if "R" in values:
        R = values["R"]
    elif "lambda" in values:
        R = None
    if R is not None:
        if not R > 0:
            raise ConfigError("R must be positive")
        lam = fields["gamma"] / R
    else:
        lam = values.get("lambda", p.lam)
    try:
        params = validate_params(SystemParams(lam=lam, **fields))
    except ValueError as e:
        raise ConfigError(str(e)) from None
    return replace(base, params=params, R=R)


def _fmt(x: float) -> str:
    return format(x, ".17g")


def format_config(cfg) -> str:
    """Render a config back to text; ``parse_config(format_config(c)) == c``."""
    run = cfg.base if isinstance(cfg, SweepConfig) else cfg
    p = run.params
    lines = [f"omega0 = {_fmt(p.omega0)}", f"kappa = {_fmt(p.kappa)}", f"gamma = {_fmt(p.gamma)}"]
    lines.append(f"R = {_fmt(run.R)}" if run.R is not None else f"lambda = {_fmt(p.lam)}")
    lines += [
        f"delta = {_fmt(p.delta)}",
        f"t_max = {_fmt(run.t_max)}",
        f"n_points = {run.n_points}",
        f"mu0_re = {_fmt(run.init.mu0.real)}",
        f"mu0_im = {_fmt(run.init.mu0.imag)}",
        f"nu0_re = {_fmt(run.init.nu0.real)}",
        f"nu0_im = {_fmt(run.init.nu0.imag)}",
        f"solver = {run.solver}",
        f"time_unit = {run.time_unit}",
        f"outputs = {', '.join(run.outputs)}",
    ]
    if isinstance(cfg, SweepConfig):
        for name, vals in cfg.axes:
            lines.append(f"sweep.{name} = {', '.join(_fmt(v) for v in vals)}")
    return "\n".join(lines) + "\n"
