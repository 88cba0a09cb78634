"""Switched longitudinal vehicle dynamics with an on/off engine.

The model is a point mass subject to quadratic aerodynamic drag relative to
the wind, constant solid friction opposing motion, gravity along the slope,
and a constant traction force per unit mass while the engine is on.  The
friction term makes the dynamics non-Lipschitz at zero speed, which is what
lets the vehicle actually come to rest: a sticking convention holds the state
at zero whenever the one-sided forward acceleration is nonpositive.
"""

from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import (
    DomainError,
    InfeasibleSliceError,
    NumericError,
    ScenarioError,
)

SPEED_ROOT_TOL = 1e-9
SPEED_BRACKET_MAX = 100.0
DEFAULT_DT = 1e-3

WHEEL_POWER = "wheel_power"
CONSTANT_ELECTRICAL = "constant_electrical"


@dataclass(frozen=True)
class VehicleParams:
    """Physical constants of the longitudinal model plus the switching cost.

    ``signed_drag`` selects drag proportional to -(x-v)|x-v| instead of the
    default -(x-v)^2; the default form never pushes the vehicle forward even
    under an overtaking tailwind, the signed form does.
    """

    drag_coeff: float = 6e-4        # 1/m
    solid_friction: float = 3e-2    # m/s^2
    gravity: float = 9.81           # m/s^2
    traction: float = 0.20          # m/s^2, engine force per unit mass
    mass: float = 93.0              # kg
    switch_cost: float = 10.0       # J charged at each off->on transition
    signed_drag: bool = False

    def __post_init__(self) -> None:
        for name in ("drag_coeff", "solid_friction", "gravity", "traction", "mass", "switch_cost"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if self.traction <= self.solid_friction:
            raise ValueError(
                "traction must exceed solid friction or the vehicle cannot "
                "move on a flat windless track"
            )


DEFAULT_PARAMS = VehicleParams()


@dataclass(frozen=True)
class PowerModel:
    """Instantaneous electrical power draw while the engine is on.

    ``wheel_power`` charges the mechanical power delivered at the wheels,
    ``constant_electrical`` a speed-independent battery draw.  Both are zero
    with the engine off and nondecreasing in speed.
    """

    kind: str = CONSTANT_ELECTRICAL
    constant_watts: float = 161.0

    def __post_init__(self) -> None:
        if self.kind not in (WHEEL_POWER, CONSTANT_ELECTRICAL):
            raise ValueError(f"unknown power model kind: {self.kind!r}")
        if self.constant_watts <= 0.0:
            raise ValueError("constant_watts must be strictly positive")


def engine_power(
    speed: float, engine_on: bool, model: PowerModel, params: VehicleParams
) -> float:
    """Electrical power draw in watts at the given speed and engine state."""
    if not engine_on:
        return 0.0
    if model.kind == WHEEL_POWER:
        return max(speed, 0.0) * params.mass * params.traction
    return model.constant_watts


@dataclass(frozen=True)
class TrackProfile:
    """Piecewise track description over arclength.

    Slope is piecewise-constant between breakpoints (the row value holds up to
    the next row); the safety speed is interpolated linearly.
    """

    arclength: tuple[float, ...]
    slope: tuple[float, ...]
    safe_speed: tuple[float, ...]

    def __post_init__(self) -> None:
        n = len(self.arclength)
        if n < 2:
            raise ScenarioError("track needs at least two breakpoints (no breakpoints)")
        if len(self.slope) != n or len(self.safe_speed) != n:
            raise ScenarioError("track columns must have equal length")
        if self.arclength[0] != 0.0:
            raise ScenarioError("track must start at arclength 0")
        if any(b <= a for a, b in zip(self.arclength, self.arclength[1:])):
            raise ScenarioError("track arclengths must be strictly increasing")
        if any(v <= 0.0 for v in self.safe_speed):
            raise ScenarioError("safety speed must be strictly positive everywhere")

    @property
    def length(self) -> float:
        return self.arclength[-1]

    def _index(self, s: float) -> int:
        if s < 0.0 or s > self.length:
            raise DomainError(f"position {s} outside track [0, {self.length}]")
        return min(max(bisect.bisect_right(self.arclength, s) - 1, 0), len(self.arclength) - 1)

    def slope_at(self, s: float) -> float:
        return self.slope[self._index(s)]

    def safe_speed_at(self, s: float) -> float:
        i = self._index(s)
        if i >= len(self.arclength) - 1:
            return self.safe_speed[-1]
        s0, s1 = self.arclength[i], self.arclength[i + 1]
        w = (s - s0) / (s1 - s0)
        return (1.0 - w) * self.safe_speed[i] + w * self.safe_speed[i + 1]

    def next_boundary(self, s: float) -> float:
        """First breakpoint strictly beyond ``s`` (inf past the end)."""
        i = bisect.bisect_right(self.arclength, s)
        return self.arclength[i] if i < len(self.arclength) else math.inf

    @classmethod
    def flat(cls, length: float, safe_speed: float = 12.0) -> TrackProfile:
        return cls((0.0, length), (0.0, 0.0), (safe_speed, safe_speed))

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[float, float, float]]) -> TrackProfile:
        arcs, slopes, safes = [], [], []
        for s, theta, vs in rows:
            arcs.append(s)
            slopes.append(theta)
            safes.append(vs)
        return cls(tuple(arcs), tuple(slopes), tuple(safes))

    @classmethod
    def from_csv(cls, path: str | Path) -> TrackProfile:
        rows = _read_csv_rows(path, ("s_m", "slope_rad", "vsafe_mps"))
        return cls.from_rows((r[0], r[1], r[2]) for r in rows)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("s_m", "slope_rad", "vsafe_mps"))
            for s, theta, vs in zip(self.arclength, self.slope, self.safe_speed):
                writer.writerow((repr(float(s)), repr(float(theta)), repr(float(vs))))


@dataclass(frozen=True)
class WindField:
    """Along-track wind speed on a rectangular (arclength, time) grid.

    Evaluation is piecewise-constant in both axes; outside the grid the
    nearest sample holds.
    """

    arclength: tuple[float, ...]
    time: tuple[float, ...]
    speed: tuple[tuple[float, ...], ...]  # speed[i][j] at (arclength[i], time[j])

    def __post_init__(self) -> None:
        if not self.arclength or not self.time:
            raise ScenarioError("wind grid must be nonempty")
        if any(b <= a for a, b in zip(self.arclength, self.arclength[1:])):
            raise ScenarioError("wind arclengths must be strictly increasing")
        if any(b <= a for a, b in zip(self.time, self.time[1:])):
            raise ScenarioError("wind times must be strictly increasing")
        if len(self.speed) != len(self.arclength) or any(
            len(row) != len(self.time) for row in self.speed
        ):
            raise ScenarioError("wind grid must be rectangular")

    def at(self, s: float, t: float) -> float:
        i = min(max(bisect.bisect_right(self.arclength, s) - 1, 0), len(self.arclength) - 1)
        j = min(max(bisect.bisect_right(self.time, t) - 1, 0), len(self.time) - 1)
        return self.speed[i][j]

    def next_boundary_s(self, s: float) -> float:
        i = bisect.bisect_right(self.arclength, s)
        return self.arclength[i] if i < len(self.arclength) else math.inf

    def next_boundary_t(self, t: float) -> float:
        j = bisect.bisect_right(self.time, t)
        return self.time[j] if j < len(self.time) else math.inf

    @classmethod
    def zero(cls) -> WindField:
        return cls((0.0,), (0.0,), ((0.0,),))

    @classmethod
    def from_csv(cls, path: str | Path) -> WindField:
        rows = _read_csv_rows(path, ("s_m", "t_s", "v_mps"))
        arcs = sorted({r[0] for r in rows})
        times = sorted({r[1] for r in rows})
        if len(rows) != len(arcs) * len(times):
            raise ScenarioError(
                f"{path}: wind grid is not rectangular "
                f"({len(rows)} rows for {len(arcs)}x{len(times)} grid)"
            )
        expected = [(s, t) for s in arcs for t in times]
        if [(r[0], r[1]) for r in rows] != expected:
            raise ScenarioError(f"{path}: wind rows must be in row-major (s, t) order")
        values = iter(r[2] for r in rows)
        grid = tuple(tuple(next(values) for _ in times) for _ in arcs)
        return cls(tuple(arcs), tuple(times), grid)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("s_m", "t_s", "v_mps"))
            for i, s in enumerate(self.arclength):
                for j, t in enumerate(self.time):
                    writer.writerow((repr(float(s)), repr(float(t)), repr(float(self.speed[i][j]))))


def _read_csv_rows(path: str | Path, header: tuple[str, ...]) -> list[tuple[float, ...]]:
    path = Path(path)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise ScenarioError(f"{path}: empty file") from None
        if tuple(h.strip() for h in first) != header:
            raise ScenarioError(
                f"{path} line 1: expected header {','.join(header)}, got {','.join(first)}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise ScenarioError(
                    f"{path} line {lineno}: expected {len(header)} fields, got {len(row)}"
                )
            try:
                rows.append(tuple(float(cell) for cell in row))
            except ValueError as exc:
                raise ScenarioError(f"{path} line {lineno}: {exc}") from exc
    return rows


def _sgn(x: float) -> float:
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


def _accel_scalar(
    x2: float, engine_on: bool, wind_speed: float, gravity_component: float, p: VehicleParams
) -> float:
    rel = x2 - wind_speed
    if p.signed_drag:
        drag = -p.drag_coeff * rel * abs(rel)
    else:
        drag = -p.drag_coeff * rel * rel
    f = drag - p.solid_friction * _sgn(x2) - gravity_component
    if engine_on:
        f += p.traction
    return f


def acceleration(
    x1: float,
    x2: float,
    t: float,
    engine_on: bool,
    params: VehicleParams,
    track: TrackProfile,
    wind: WindField,
) -> float:
    """Longitudinal acceleration at position x1, speed x2 and time t.

    The friction term uses sign(0) = 0, so exactly at rest the formula drops
    solid friction; the sticking convention in :func:`integrate` is what keeps
    a stopped vehicle at rest.
    """
    theta = track.slope_at(x1)  # raises DomainError outside the track
    v = wind.at(x1, t)
    return _accel_scalar(x2, engine_on, v, params.gravity * math.sin(theta), params)


@dataclass(frozen=True)
class FrozenDynamics:
    """Autonomous slice of the dynamics at fixed slope and wind.

    ``v_high`` is the engine-on equilibrium (unique positive root of the
    engine-on acceleration).  ``v_low`` is the engine-off rest speed: the
    root of the engine-off acceleration when one exists in [0, inf), else the
    sticking point 0; ``v_low_is_root`` records which case applies.
    """

    params: VehicleParams
    power: PowerModel
    slope: float
    wind_speed: float
    v_low: float
    v_high: float
    v_low_is_root: bool
    gravity_component: float = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "gravity_component", self.params.gravity * math.sin(self.slope)
        )

    def accel(self, x2: float, engine_on: bool) -> float:
        return _accel_scalar(x2, engine_on, self.wind_speed, self.gravity_component, self.params)

    def accel_grid(self, x2: np.ndarray, engine_on: bool) -> np.ndarray:
        p = self.params
        rel = x2 - self.wind_speed
        if p.signed_drag:
            drag = -p.drag_coeff * rel * np.abs(rel)
        else:
            drag = -p.drag_coeff * rel * rel
        f = drag - p.solid_friction * np.sign(x2) - self.gravity_component
        if engine_on:
            f = f + p.traction
        return f

    def engine_power_at(self, x2: float) -> float:
        return engine_power(x2, True, self.power, self.params)

    def power_grid(self, x2: np.ndarray) -> np.ndarray:
        if self.power.kind == WHEEL_POWER:
            return np.maximum(x2, 0.0) * (self.params.mass * self.params.traction)
        return np.full_like(x2, self.power.constant_watts)

    def equilibrium_speeds(self) -> tuple[float, float]:
        return self.v_low, self.v_high

    @classmethod
    def from_conditions(
        cls,
        params: VehicleParams,
        power: PowerModel,
        slope: float = 0.0,
        wind_speed: float = 0.0,
    ) -> FrozenDynamics:
        gravity_component = params.gravity * math.sin(slope)

        def f_on(x: float) -> float:
            return _accel_scalar(x, True, wind_speed, gravity_component, params)

        def f_off(x: float) -> float:
            return _accel_scalar(x, False, wind_speed, gravity_component, params)

        v_high = _engine_on_equilibrium(f_on)
        v_low, is_root = _engine_off_rest_speed(f_off)
        if v_low >= v_high - SPEED_ROOT_TOL:
            raise InfeasibleSliceError(
                f"engine-off rest speed {v_low:.6g} does not lie below the "
                f"engine-on equilibrium {v_high:.6g}"
            )
        return cls(params, power, slope, wind_speed, v_low, v_high, is_root)


def _scan_last_downcrossing(fn, lo: float, hi: float, n: int = 2000) -> tuple[float, float] | None:
    """Bracket of the last +/- sign change of ``fn`` on (lo, hi]."""
    xs = [lo + (hi - lo) * i / n for i in range(n + 1)]
    vals = [fn(x) for x in xs]
    bracket = None
    for a, b, fa, fb in zip(xs, xs[1:], vals, vals[1:]):
        if fa > 0.0 >= fb:
            bracket = (a, b)
    return bracket


def _bisect_down(fn, lo: float, hi: float, tol: float = SPEED_ROOT_TOL) -> float:
    """Root of ``fn`` in [lo, hi] given fn(lo) > 0 >= fn(hi)."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fn(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _engine_on_equilibrium(f_on) -> float:
    eps = 1e-12  # evaluate the 0+ side of the friction sign
    if f_on(eps) <= 0.0 and _scan_last_downcrossing(f_on, eps, SPEED_BRACKET_MAX) is None:
        raise InfeasibleSliceError(
            "engine-on acceleration is nonpositive for all speeds: the "
            "vehicle cannot move forward on this slice"
        )
    if f_on(SPEED_BRACKET_MAX) > 0.0:
        raise InfeasibleSliceError(
            f"engine-on acceleration has no root below {SPEED_BRACKET_MAX} m/s"
        )
    bracket = _scan_last_downcrossing(f_on, eps, SPEED_BRACKET_MAX)
    if bracket is None:
        raise InfeasibleSliceError("no engine-on equilibrium found on (0, 100] m/s")
    return _bisect_down(f_on, *bracket)


def _engine_off_rest_speed(f_off) -> tuple[float, bool]:
    eps = 1e-12
    f0 = f_off(eps)
    if f0 < -1e-12:
        return 0.0, False  # sticking point: friction wins at 0+
    if abs(f0) <= 1e-12:
        return 0.0, True
    if f_off(SPEED_BRACKET_MAX) > 0.0:
        raise InfeasibleSliceError(
            f"engine-off acceleration has no rest speed below {SPEED_BRACKET_MAX} m/s"
        )
    bracket = _scan_last_downcrossing(f_off, eps, SPEED_BRACKET_MAX)
    if bracket is None:
        raise InfeasibleSliceError("no engine-off rest speed found on (0, 100] m/s")
    return _bisect_down(f_off, *bracket), True


def freeze(
    track: TrackProfile,
    wind: WindField,
    params: VehicleParams,
    power: PowerModel,
    x1: float,
    t: float,
) -> FrozenDynamics:
    """Autonomous dynamics with slope and wind sampled at (x1, t)."""
    theta = track.slope_at(x1)  # raises DomainError outside the track
    v = wind.at(x1, t)
    return FrozenDynamics.from_conditions(params, power, theta, v)


def equilibrium_speeds(frozen: FrozenDynamics) -> tuple[float, float]:
    """Rest speed of each mode, cached on the frozen slice."""
    return frozen.equilibrium_speeds()


@dataclass(frozen=True)
class RaceState:
    """Instantaneous simulation state.

    ``switches`` counts off->on transitions (each costing the switching
    energy); ``energy`` is total consumption including switching costs.
    """

    t: float
    position: float
    speed: float
    engine_on: bool
    switches: int
    energy: float


def integrate(
    state: RaceState,
    engine_on: bool,
    dt: float,
    track: TrackProfile,
    wind: WindField,
    params: VehicleParams,
    power: PowerModel,
) -> RaceState:
    """Advance the state by ``dt`` holding the engine mode fixed.

    One explicit midpoint step, split exactly at track breakpoints, wind-grid
    cell boundaries, and the sticking event where the speed reaches zero.
    Energy accumulates trapezoidally from the power model while the engine is
    on.  Switch accounting is the caller's job: ``switches`` and the
    switching cost are not touched here.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    t, x1, x2 = state.t, state.position, state.speed
    energy = state.energy
    remaining = dt
    guard = 0
    while remaining > 1e-15:
        guard += 1
        if guard > 10_000:
            raise NumericError("integration step split too many times")
        theta = track.slope_at(x1)
        w = wind.at(x1, t)
        g_comp = params.gravity * math.sin(theta)
        s_stop = min(track.next_boundary(x1), wind.next_boundary_s(x1))
        h = min(remaining, max(wind.next_boundary_t(t) - t, 1e-12))
        t, x1, x2, de = _midpoint_step(t, x1, x2, engine_on, h, w, g_comp, s_stop, params, power)
        energy += de
        if not (math.isfinite(x1) and math.isfinite(x2)):
            raise NumericError(f"state became non-finite at t={t}")
        remaining = state.t + dt - t
    return RaceState(t, x1, x2, engine_on, state.switches, energy)


def _midpoint_step(
    t: float,
    x1: float,
    x2: float,
    engine_on: bool,
    h: float,
    wind_speed: float,
    gravity_component: float,
    s_stop: float,
    params: VehicleParams,
    power: PowerModel,
) -> tuple[float, float, float, float]:
    """One midpoint step of at most ``h``, stopping exactly at ``s_stop``.

    Returns the advanced (t, x1, x2, energy increment).  Implements the
    sticking convention: from zero speed the state only moves if the
    one-sided forward acceleration is positive, and a downward zero crossing
    clamps speed to zero for the rest of the step.
    """
    if x2 <= 0.0:
        f_plus = _accel_scalar(1e-12, engine_on, wind_speed, gravity_component, params)
        if f_plus <= 0.0:
            # stuck: time passes, nothing moves, engine-on draw still counts
            de = engine_power(0.0, engine_on, power, params) * h if engine_on else 0.0
            return t + h, x1, 0.0, de
        a1 = f_plus
    else:
        a1 = _accel_scalar(x2, engine_on, wind_speed, gravity_component, params)
    xm = x2 + 0.5 * h * a1
    a2 = _accel_scalar(xm, engine_on, wind_speed, gravity_component, params)
    x2_new = x2 + h * a2
    h_eff = h
    if x2_new < 0.0:
        # split at the downward zero crossing, then stick
        frac = x2 / (x2 - x2_new) if x2 > 0.0 else 0.0
        h_eff = h * frac
        x1_new = x1 + h_eff * 0.5 * x2
        x2_new = 0.0
        # sticking consumes the whole step: position holds afterwards
        de = 0.0
        if engine_on:
            de = 0.5 * (
                engine_power(x2, True, power, params) + engine_power(0.0, True, power, params)
            ) * h_eff + engine_power(0.0, True, power, params) * (h - h_eff)
        return t + h, x1_new, x2_new, de
    x1_new = x1 + h * xm
    if x1_new > s_stop:
        frac = (s_stop - x1) / (x1_new - x1)
        h_eff = h * frac
        xm = x2 + 0.5 * h_eff * a1
        a2 = _accel_scalar(xm, engine_on, wind_speed, gravity_component, params)
        x2_new = x2 + h_eff * a2
        x1_new = s_stop
    de = 0.0
    if engine_on:
        de = 0.5 * (
            engine_power(x2, True, power, params) + engine_power(x2_new, True, power, params)
        ) * h_eff
    return t + h_eff, x1_new, x2_new, de


@dataclass(frozen=True)
class AssumptionItem:
    """Outcome of one numerical assumption check; ``passed=None`` means the
    check could not be completed (reported, never silently passed)."""

    name: str
    passed: bool | None
    witness: dict[str, float | str]


@dataclass(frozen=True)
class AssumptionReport:
    items: tuple[AssumptionItem, ...]
    convexity_verdict: str
    inequality_lhs: float
    inequality_rhs: float
    grid_points: int

    @property
    def passed(self) -> bool:
        return all(item.passed is True for item in self.items)

    def item(self, name: str) -> AssumptionItem:
        for it in self.items:
            if it.name == name:
                return it
        raise KeyError(name)


def check_assumptions(frozen: FrozenDynamics, grid_points: int = 200) -> AssumptionReport:
    """Numerically verify the structural assumptions on a frozen slice.

    Regularity (continuity, forward uniqueness) is checked by grid scans;
    the mode structure by sign scans around the cached equilibria; the
    switching-cost inequality by improper quadrature; and the curvature of
    the acceleration/consumption tradeoff F by second differences on a
    uniform grid over the open band.
    """
    from . import quadrature  # deferred: quadrature depends on this module

    if grid_points < 3:
        raise ValueError("grid_points must be at least 3")
    items: list[AssumptionItem] = []
    v_lo, v_hi = frozen.v_low, frozen.v_high
    width = v_hi - v_lo
    inner_lo = v_lo + 1e-9  # stay on the 0+ side of the friction discontinuity

    # -- regularity: continuity of both modes on the band
    def max_increment(n: int) -> float:
        xs = np.linspace(inner_lo, v_hi, n)
        worst = 0.0
        for on in (True, False):
            vals = frozen.accel_grid(xs, on)
            if not np.all(np.isfinite(vals)):
                return math.inf
            worst = max(worst, float(np.max(np.abs(np.diff(vals)))))
        return worst

    coarse, fine = max_increment(2 * grid_points), max_increment(4 * grid_points)
    continuity_ok = math.isfinite(fine) and (fine <= 0.75 * coarse + 1e-12)
    items.append(
        AssumptionItem(
            "continuity",
            continuity_ok,
            {"max_step_coarse": coarse, "max_step_fine": fine},
        )
    )

    # -- regularity: forward uniqueness proxy, one monotone crossing per mode
    scan = np.linspace(1e-9, 1.5 * v_hi, 4 * grid_points)
    on_signs = np.sign(frozen.accel_grid(scan, True))
    off_signs = np.sign(frozen.accel_grid(scan, False))
    on_changes = int(np.sum(np.abs(np.diff(np.where(on_signs == 0, 1, on_signs))) > 0))
    off_changes = int(np.sum(np.abs(np.diff(np.where(off_signs == 0, 1, off_signs))) > 0))
    items.append(
        AssumptionItem(
            "forward_uniqueness",
            on_changes == 1 and off_changes <= 1,
            {"engine_on_sign_changes": float(on_changes), "engine_off_sign_changes": float(off_changes)},
        )
    )

    # -- engine on: positive below the equilibrium, negative above
    below = np.linspace(inner_lo, v_hi - 1e-6 * width, grid_points)
    above = np.linspace(v_hi + 1e-6 * width, 1.5 * v_hi, grid_points)
    on_ok = (
        bool(np.all(frozen.accel_grid(below, True) > 0.0))
        and bool(np.all(frozen.accel_grid(above, True) < 0.0))
        and abs(frozen.accel(v_hi, True)) < 1e-6
    )
    items.append(
        AssumptionItem(
            "engine_on_equilibrium",
            on_ok,
            {"v_high": v_hi, "residual": frozen.accel(v_hi, True)},
        )
    )

    # -- engine on always accelerates harder than engine off
    band = np.linspace(inner_lo, v_hi, 2 * grid_points)
    gap = frozen.accel_grid(band, True) - frozen.accel_grid(band, False)
    items.append(
        AssumptionItem(
            "mode_ordering",
            bool(np.all(gap > 0.0)),
            {"min_gap": float(np.min(gap))},
        )
    )

    # -- engine off: decays toward the rest speed
    off_above = np.linspace(v_lo + 1e-6 * width, v_hi, 2 * grid_points)
    off_ok = bool(np.all(frozen.accel_grid(off_above, False) < 0.0))
    witness: dict[str, float | str] = {"v_low": v_lo}
    if frozen.v_low_is_root:
        witness["kind"] = "root"
        witness["residual"] = frozen.accel(v_lo, False)
        off_ok = off_ok and abs(frozen.accel(v_lo, False)) < 1e-6
        if v_lo > 1e-9:
            off_below = np.linspace(1e-9, v_lo - 1e-6 * width, grid_points)
            off_ok = off_ok and bool(np.all(frozen.accel_grid(off_below, False) > 0.0))
    else:
        # sticking: the one-sided limits bracket zero speed
        witness["kind"] = "sticking"
        witness["f_zero_minus"] = frozen.accel(-1e-12, False)
        witness["f_zero_plus"] = frozen.accel(1e-12, False)
        off_ok = off_ok and frozen.accel(1e-12, False) < 0.0
    items.append(AssumptionItem("engine_off_equilibrium", off_ok, witness))

    # -- consumption: zero off, positive on
    h_on = frozen.power_grid(band)
    items.append(
        AssumptionItem(
            "idle_consumption_zero",
            bool(np.all(h_on > 0.0)),
            {"min_power_on": float(np.min(h_on)), "power_off": 0.0},
        )
    )

    # -- consumption nondecreasing in speed
    increments = np.diff(frozen.power_grid(np.linspace(0.0, 1.5 * v_hi, 2 * grid_points)))
    items.append(
        AssumptionItem(
            "consumption_nondecreasing",
            bool(np.all(increments >= -1e-12)),
            {"min_increment": float(np.min(increments))},
        )
    )

    # -- switching cost small enough that oscillating beats full speed
    h_star = frozen.engine_power_at(v_hi)
    eps = 1e-6 * width
    try:
        lhs_integral = quadrature.integrate_with_vanishing_endpoint(
            lambda s: (h_star - frozen.power_grid(s)) / frozen.accel_grid(s, True),
            v_lo,
            v_hi,
            singular_at=v_hi,
            eps=eps,
        )
        up_moment = quadrature.integrate_with_vanishing_endpoint(
            lambda s: (s - v_hi) / frozen.accel_grid(s, True),
            v_lo,
            v_hi,
            singular_at=v_hi,
            eps=eps,
        )
        if frozen.v_low_is_root:
            down_moment = -quadrature.integrate_with_vanishing_endpoint(
                lambda s: (s - v_lo) / frozen.accel_grid(s, False),
                v_lo,
                v_hi,
                singular_at=v_lo,
                eps=eps,
            )
        else:
            down_moment = -quadrature.adaptive_quadrature(
                lambda s: (s - v_lo) / frozen.accel_grid(s, False), v_lo, v_hi
            )
        lhs = lhs_integral + frozen.params.switch_cost
        rhs = (h_star / (v_hi - v_lo)) * (down_moment + up_moment)
        if not (math.isfinite(lhs) and math.isfinite(rhs)):
            items.append(
                AssumptionItem(
                    "switching_cost_small",
                    None,
                    {"diagnostic": "divergent integral", "lhs": lhs, "rhs": rhs},
                )
            )
        else:
            items.append(
                AssumptionItem("switching_cost_small", lhs < rhs, {"lhs": lhs, "rhs": rhs})
            )
    except NumericError as exc:
        lhs = rhs = math.nan
        items.append(
            AssumptionItem("switching_cost_small", None, {"diagnostic": str(exc)})
        )

    # -- strict curvature of F = h(x,1) f(x,0) / (f(x,1) - f(x,0))
    n = max(grid_points, 200)
    margin = 1e-4 * width
    xs = np.linspace(v_lo + margin, v_hi - margin, n)
    f_on_vals = frozen.accel_grid(xs, True)
    f_off_vals = frozen.accel_grid(xs, False)
    tradeoff = frozen.power_grid(xs) * f_off_vals / (f_on_vals - f_off_vals)
    second = np.diff(tradeoff, 2)
    threshold = 1e-12 * max(1.0, float(np.max(np.abs(tradeoff))))
    if np.all(second > threshold):
        verdict = "strictly_convex"
    elif np.all(second < -threshold):
        verdict = "strictly_concave"
    else:
        verdict = "neither"
    items.append(
        AssumptionItem(
            "tradeoff_curvature",
            verdict != "neither",
            {"verdict": verdict, "grid_points": float(n)},
        )
    )

    return AssumptionReport(
        items=tuple(items),
        convexity_verdict=verdict,
        inequality_lhs=lhs,
        inequality_rhs=rhs,
        grid_points=grid_points,
    )
