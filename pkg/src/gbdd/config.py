"""Line-oriented `key = value` run configuration.

The grammar is deliberately tiny: one assignment per line, `#` starts a
comment, blank lines ignored. Every key is validated against the module
that consumes it before a run starts, and every parse or constraint error
carries the offending line number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .grid import Grid2D, make_grid
from .moc import Modulus, ModulusKind
from .model import DensityState, InitKind, ModelParams, Variant, init_data
from .stepping import Scheme, StepperConfig


class ConfigError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _cast_int(s: str) -> int:
    return int(s, 10)


def _cast_real(s: str) -> float:
    v = float(s)
    if math.isnan(v):
        raise ValueError("nan is not a valid value")
    return v


def _cast_bool(s: str) -> bool:
    low = s.lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


def _cast_str(s: str) -> str:
    return s


_SCHEMA = {
    "grid.n1": _cast_int,
    "grid.n2": _cast_int,
    "grid.length": _cast_real,
    "model.variant": _cast_str,
    "model.kappa": _cast_real,
    "model.alpha": _cast_real,
    "model.beta": _cast_real,
    "init.kind": _cast_str,
    "init.amplitude": _cast_real,
    "init.sigma": _cast_real,
    "init.center_x": _cast_real,
    "init.center_y": _cast_real,
    "init.mode1": _cast_int,
    "init.mode2": _cast_int,
    "init.phase": _cast_real,
    "init.path": _cast_str,
    "time.scheme": _cast_str,
    "time.dt": _cast_real,
    "time.cfl": _cast_real,
    "time.t_end": _cast_real,
    "output.every": _cast_int,
    "output.dir": _cast_str,
    "diag.p": _cast_real,
    "diag.m": _cast_real,
    "diag.blowup0": _cast_real,
    "moc.delta": _cast_real,
    "moc.gamma": _cast_real,
    "moc.track": _cast_bool,
}


@dataclass(frozen=True)
class RunConfig:
    """Fully validated run configuration with documented defaults."""

    n1: int = 256
    n2: int = 256
    length: float = 8.0 * math.pi
    variant: Variant = Variant.THETA_FORM
    kappa: float = 1.0
    alpha: float = 1.5
    beta: float | None = None
    init_kind: InitKind = InitKind.SEPARABLE_GAUSSIAN
    amplitude: float = 1.0
    sigma: float = 0.5
    center_x: float | None = None
    center_y: float | None = None
    mode1: int = 1
    mode2: int = 1
    phase: float = 0.0
    path: str | None = None
    scheme: Scheme = Scheme.IF_RK2
    dt: float = 0.0
    cfl: float = 0.5
    t_end: float = 1.0
    every: int = 1
    out_dir: str = "out"
    p: float = 4.0
    m: float = 1.0
    blowup0: float = 0.0
    moc_delta: float | None = None
    moc_gamma: float | None = None
    moc_track: bool = False

    def make_grid(self) -> Grid2D:
        return make_grid(self.n1, self.n2, self.length, self.length)

    def model_params(self) -> ModelParams:
        beta = self.beta if self.beta is not None else 1.0
        return ModelParams(
            variant=self.variant, kappa=self.kappa, alpha=self.alpha, beta=beta
        )

    def stepper_config(self) -> StepperConfig:
        return StepperConfig(
            scheme=self.scheme, dt=self.dt, cfl=self.cfl, t_end=self.t_end
        )

    def initial_state(self) -> DensityState:
        center = None
        if self.center_x is not None or self.center_y is not None:
            cx = self.center_x if self.center_x is not None else self.length / 2.0
            cy = self.center_y if self.center_y is not None else self.length / 2.0
            center = (cx, cy)
        return init_data(
            self.init_kind,
            self.make_grid() if self.init_kind is not InitKind.FROM_SNAPSHOT else None,
            amplitude=self.amplitude,
            sigma=self.sigma,
            center=center,
            mode=(self.mode1, self.mode2),
            phase=self.phase,
            path=self.path,
        )

    def modulus(self) -> Modulus | None:
        if not self.moc_track:
            return None
        if self.moc_gamma is not None:
            return Modulus(ModulusKind.MOC1, self.moc_delta, self.moc_gamma)
        return Modulus(ModulusKind.MOC_ALPHA, self.moc_delta)


def _enum_by_value(enum_cls, raw: str, line: int, what: str):
    for member in enum_cls:
        if member.value == raw:
            return member
    options = ", ".join(m.value for m in enum_cls)
    raise ConfigError(line, f"unknown {what} {raw!r}; options: {options}")


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate; raises ConfigError with a line number."""
    raw: dict[str, tuple[object, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(lineno, f"expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SCHEMA:
            raise ConfigError(lineno, f"unknown key {key!r}")
        if key in raw:
            raise ConfigError(
                lineno, f"duplicate key {key!r} (first set on line {raw[key][1]})"
            )
        if not value:
            raise ConfigError(lineno, f"empty value for {key!r}")
        try:
            raw[key] = (_SCHEMA[key](value), lineno)
        except (ValueError, OverflowError) as exc:
            raise ConfigError(lineno, f"bad value for {key!r}: {exc}") from None

    def get(key, default=None):
        return raw[key][0] if key in raw else default

    def line_of(key, fallback: int = 0) -> int:
        return raw[key][1] if key in raw else fallback

    def check(cond: bool, key: str, message: str):
        if not cond:
            raise ConfigError(line_of(key), message)

    n1 = get("grid.n1", 256)
    n2 = get("grid.n2", 256)
    check(n1 >= 8 and n1 % 2 == 0, "grid.n1", f"grid.n1 must be even and >= 8, got {n1}")
    check(n2 >= 8 and n2 % 2 == 0, "grid.n2", f"grid.n2 must be even and >= 8, got {n2}")
    length = get("grid.length", 8.0 * math.pi)
    check(length > 0.0, "grid.length", f"grid.length must be positive, got {length}")

    variant = _enum_by_value(
        Variant, get("model.variant", Variant.THETA_FORM.value),
        line_of("model.variant"), "model variant",
    )
    kappa = get("model.kappa", 1.0)
    check(kappa >= 0.0, "model.kappa", f"model.kappa must be >= 0, got {kappa}")
    alpha = get("model.alpha", 1.5)
    check(0.0 < alpha <= 2.0, "model.alpha", f"model.alpha must lie in (0, 2], got {alpha}")
    beta = get("model.beta")
    if beta is not None:
        check(0.0 < beta <= 2.0, "model.beta", f"model.beta must lie in (0, 2], got {beta}")
    if variant is Variant.GENERALIZED_THETA and beta is None:
        raise ConfigError(
            line_of("model.variant"),
            "model.variant = GeneralizedTheta requires model.beta",
        )

    init_kind = _enum_by_value(
        InitKind, get("init.kind", InitKind.SEPARABLE_GAUSSIAN.value),
        line_of("init.kind"), "init kind",
    )
    sigma = get("init.sigma", 0.5)
    check(sigma > 0.0, "init.sigma", f"init.sigma must be positive, got {sigma}")
    if init_kind is InitKind.FROM_SNAPSHOT and "init.path" not in raw:
        raise ConfigError(line_of("init.kind"), "init.kind = FromSnapshot requires init.path")

    scheme = _enum_by_value(
        Scheme, get("time.scheme", Scheme.IF_RK2.value), line_of("time.scheme"), "scheme"
    )
    dt = get("time.dt", 0.0)
    check(dt >= 0.0, "time.dt", f"time.dt must be >= 0, got {dt}")
    cfl = get("time.cfl", 0.5)
    check(0.0 < cfl <= 1.0, "time.cfl", f"time.cfl must lie in (0, 1], got {cfl}")
    t_end = get("time.t_end", 1.0)
    check(t_end >= 0.0, "time.t_end", f"time.t_end must be >= 0, got {t_end}")

    every = get("output.every", 1)
    check(every >= 1, "output.every", f"output.every must be >= 1, got {every}")
    p = get("diag.p", 4.0)
    check(p >= 1.0, "diag.p", f"diag.p must be >= 1, got {p}")
    m = get("diag.m", 1.0)
    check(m >= 0.0, "diag.m", f"diag.m must be >= 0, got {m}")

    moc_track = get("moc.track", False)
    moc_delta = get("moc.delta")
    moc_gamma = get("moc.gamma")
    if moc_track and moc_delta is None:
        raise ConfigError(line_of("moc.track"), "moc.track = true requires moc.delta")
    if moc_delta is not None:
        # construct eagerly so kink/concavity violations surface at parse time
        try:
            if moc_gamma is not None:
                Modulus(ModulusKind.MOC1, moc_delta, moc_gamma)
            else:
                Modulus(ModulusKind.MOC_ALPHA, moc_delta)
        except ValueError as exc:
            raise ConfigError(line_of("moc.delta"), str(exc)) from None

    return RunConfig(
        n1=n1,
        n2=n2,
        length=length,
        variant=variant,
        kappa=kappa,
        alpha=alpha,
        beta=beta,
        init_kind=init_kind,
        amplitude=get("init.amplitude", 1.0),
        sigma=sigma,
        center_x=get("init.center_x"),
        center_y=get("init.center_y"),
        mode1=get("init.mode1", 1),
        mode2=get("init.mode2", 1),
        phase=get("init.phase", 0.0),
        path=get("init.path"),
        scheme=scheme,
        dt=dt,
        cfl=cfl,
        t_end=t_end,
        every=every,
        out_dir=get("output.dir", "out"),
        p=p,
        m=m,
        blowup0=get("diag.blowup0", 0.0),
        moc_delta=moc_delta,
        moc_gamma=moc_gamma,
        moc_track=moc_track,
    )
