"""Closed-form 2D free-throw flight model.

Coordinates: x is horizontal distance from the baseline (the shooter stands
at large x and the ball travels toward smaller x), z is height above the
floor. Internal units are feet, seconds and radians; MPH and degrees are
converted only at the edges via :func:`mph_to_fps` / :func:`deg_to_rad`.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

MPH_TO_FPS = 5280.0 / 3600.0


def mph_to_fps(v_mph: float) -> float:
    return v_mph * MPH_TO_FPS


def fps_to_mph(v_fps: float) -> float:
    return v_fps / MPH_TO_FPS


def deg_to_rad(deg: float) -> float:
    return math.radians(deg)


def rad_to_deg(rad: float) -> float:
    return math.degrees(rad)


class NeverReachesRim(ValueError):
    """The ball's apex is below the rim plane, so it never gets there."""


class InvalidAxisSpec(ValueError):
    pass


class InvalidStep(ValueError):
    pass


class InvalidLaunch(ValueError):
    pass


class InvalidGeometry(ValueError):
    pass


@dataclass(frozen=True)
class CourtGeometry:
    """Rim, ball and gravity constants (feet, seconds).

    ``bullseye_x`` is derived from the rim center when omitted; it always
    sits 2 inches behind the center, toward the baseline.
    """

    rim_height: float = 10.0
    rim_center_x: float = 5.25
    rim_radius: float = 0.75
    ball_radius: float = 29.5 / (24.0 * math.pi)
    bullseye_x: float | None = None
    g: float = 32.174

    def __post_init__(self):
        expected = self.rim_center_x - 2.0 / 12.0
        if self.bullseye_x is None:
            object.__setattr__(self, "bullseye_x", expected)
        elif abs(self.bullseye_x - expected) > 1e-9:
            raise InvalidGeometry(
                f"bullseye_x must be rim_center_x - 2in ({expected:.6f}), got {self.bullseye_x}"
            )
        for name in ("rim_height", "rim_center_x", "rim_radius", "ball_radius", "g"):
            if not getattr(self, name) > 0:
                raise InvalidGeometry(f"{name} must be positive")
        if self.ball_radius >= self.rim_radius:
            raise InvalidGeometry("ball_radius must be smaller than rim_radius")

    @property
    def front_x(self) -> float:
        """Rim edge nearest the shooter."""
        return self.rim_center_x + self.rim_radius

    @property
    def back_x(self) -> float:
        """Rim edge nearest the backboard."""
        return self.rim_center_x - self.rim_radius


DEFAULT_GEOMETRY = CourtGeometry()


@dataclass(frozen=True)
class LaunchConditions:
    """Release point (ft), speed (ft/s) and angle above horizontal (rad).

    A vertical launch (theta0 = pi/2) is accepted as a limiting case.
    """

    x0: float
    z0: float
    v0: float
    theta0: float

    def __post_init__(self):
        if not self.v0 > 0:
            raise InvalidLaunch(f"v0 must be positive, got {self.v0}")
        if not 0 < self.theta0 <= math.pi / 2:
            raise InvalidLaunch(f"theta0 must lie in (0, pi/2], got {self.theta0}")
        if not self.z0 > 0:
            raise InvalidLaunch(f"z0 must be positive, got {self.z0}")

    @classmethod
    def from_mph_deg(cls, x0: float, z0: float, v_mph: float, theta_deg: float) -> "LaunchConditions":
        return cls(x0, z0, mph_to_fps(v_mph), deg_to_rad(theta_deg))

    @property
    def v_mph(self) -> float:
        return fps_to_mph(self.v0)

    @property
    def theta_deg(self) -> float:
        return rad_to_deg(self.theta0)


def _components(launch: LaunchConditions) -> tuple[float, float]:
    # cos(pi/2) is 6e-17, not zero; pin it so vertical shots stay vertical
    if launch.theta0 == math.pi / 2:
        return 0.0, launch.v0
    return launch.v0 * math.cos(launch.theta0), launch.v0 * math.sin(launch.theta0)


class Outcome(IntEnum):
    SWISH = 0
    RIM = 1
    MISS = 2


@dataclass(frozen=True)
class RimCrossing:
    x_f: float
    dt: float
    gamma: float
    vx_f: float
    vz_f: float


def discriminant(launch: LaunchConditions, geom: CourtGeometry = DEFAULT_GEOMETRY) -> float:
    _, vz = _components(launch)
    return vz * vz - 2.0 * geom.g * (geom.rim_height - launch.z0)


def flight_time(launch: LaunchConditions, geom: CourtGeometry = DEFAULT_GEOMETRY) -> float:
    """Time to reach rim height on the way down (the later root)."""
    disc = discriminant(launch, geom)
    if disc < 0:
        raise NeverReachesRim(f"apex below rim plane (discriminant {disc:.6g})")
    _, vz = _components(launch)
    dt = (vz + math.sqrt(disc)) / geom.g
    if dt <= 0:
        raise NeverReachesRim("ball is already below the rim on a falling path")
    return dt


def landing_x(launch: LaunchConditions, geom: CourtGeometry = DEFAULT_GEOMETRY) -> RimCrossing:
    dt = flight_time(launch, geom)
    vx, vz = _components(launch)
    x_f = launch.x0 - vx * dt
    vz_f = vz - geom.g * dt
    # ball moves toward -x; use the speed of approach so gamma is in (0, pi/2]
    gamma = math.atan2(-vz_f, vx)
    return RimCrossing(x_f=x_f, dt=dt, gamma=gamma, vx_f=vx, vz_f=vz_f)


def classify_crossing(crossing: RimCrossing, geom: CourtGeometry = DEFAULT_GEOMETRY) -> Outcome:
    """Classify a rim-plane crossing by edge clearance along the entry line."""
    s = math.sin(crossing.gamma)
    d_front = (geom.front_x - crossing.x_f) * s
    d_back = (crossing.x_f - geom.back_x) * s
    if d_front >= geom.ball_radius and crossing.x_f >= geom.back_x:
        return Outcome.SWISH
    if abs(d_front) < geom.ball_radius or abs(d_back) < geom.ball_radius:
        return Outcome.RIM
    return Outcome.MISS


def classify_outcome(launch: LaunchConditions, geom: CourtGeometry = DEFAULT_GEOMETRY) -> Outcome:
    try:
        crossing = landing_x(launch, geom)
    except NeverReachesRim:
        return Outcome.MISS
    return classify_crossing(crossing, geom)


def error_propagation(
    launch: LaunchConditions,
    dv_mph: float,
    dtheta_deg: float,
    geom: CourtGeometry = DEFAULT_GEOMETRY,
) -> float:
    """Worst landing shift (ft) over the four corners (v0 +/- dv, theta0 +/- dtheta).

    Returns ``math.inf`` when any perturbed corner fails to reach the rim
    or leaves the valid launch domain.
    """
    if dv_mph < 0 or dtheta_deg < 0:
        raise ValueError("perturbations must be non-negative")
    x_ref = landing_x(launch, geom).x_f
    if dv_mph == 0 and dtheta_deg == 0:
        return 0.0
    dv = mph_to_fps(dv_mph)
    dth = deg_to_rad(dtheta_deg)
    worst = 0.0
    for sv in (-1.0, 1.0):
        for st in (-1.0, 1.0):
            v = launch.v0 + sv * dv
            th = launch.theta0 + st * dth
            if v <= 0 or th <= 0:
                return math.inf
            # past vertical the shot is mirrored; fold back onto the valid side
            if th > math.pi / 2:
                th = math.pi - th
            try:
                x = landing_x(LaunchConditions(launch.x0, launch.z0, v, th), geom).x_f
            except NeverReachesRim:
                return math.inf
            if th != launch.theta0 + st * dth:
                x = 2.0 * launch.x0 - x
            worst = max(worst, abs(x - x_ref))
    return worst


def simulate_trajectory(
    launch: LaunchConditions,
    geom: CourtGeometry = DEFAULT_GEOMETRY,
    dt_step: float = 1e-3,
) -> np.ndarray:
    """Sample the flight at fixed time steps until the ball hits the floor or passes the baseline.

    Returns an array of shape (n, 3) with columns (t, x, z). The final
    row is the first sample past the termination condition, so every
    crossing of interest is bracketed.
    """
    if not dt_step > 0:
        raise InvalidStep(f"dt_step must be positive, got {dt_step}")
    vx, vz = _components(launch)
    g = geom.g
    # upper bound on the time to the floor; trimmed below
    t_floor = (vz + math.sqrt(vz * vz + 2.0 * g * launch.z0)) / g
    n = int(math.ceil(t_floor / dt_step)) + 2
    t = np.arange(n, dtype=float) * dt_step
    x = launch.x0 - vx * t
    z = launch.z0 + vz * t - 0.5 * g * t * t
    outside = (z < 0) | (x < 0)
    if outside.any():
        n = int(np.argmax(outside)) + 1
    return np.column_stack([t[:n], x[:n], z[:n]])


def interpolate_crossing(samples: np.ndarray, z_level: float) -> tuple[float, float]:
    """(t, x) of the last downward crossing of ``z_level``, by linear interpolation."""
    z = samples[:, 2]
    above = z >= z_level
    idx = np.nonzero(above[:-1] & ~above[1:])[0]
    if idx.size == 0:
        raise NeverReachesRim("sampled path never descends through the level")
    i = idx[-1]
    t0, x0, z0 = samples[i]
    t1, x1, z1 = samples[i + 1]
    w = (z0 - z_level) / (z0 - z1)
    return t0 + w * (t1 - t0), x0 + w * (x1 - x0)


@dataclass(frozen=True)
class AxisSpec:
    """Inclusive grid axis ``min:max:step``; the max is kept when it lands on a step."""

    min: float
    max: float
    step: float

    def __post_init__(self):
        if not self.step > 0:
            raise InvalidAxisSpec(f"step must be positive, got {self.step}")
        if self.min > self.max:
            raise InvalidAxisSpec(f"empty range: min {self.min} > max {self.max}")

    @classmethod
    def parse(cls, text: str) -> "AxisSpec":
        parts = text.split(":")
        if len(parts) != 3:
            raise InvalidAxisSpec(f"expected MIN:MAX:STEP, got {text!r}")
        try:
            lo, hi, step = (float(p) for p in parts)
        except ValueError as exc:
            raise InvalidAxisSpec(f"non-numeric axis spec {text!r}") from exc
        return cls(lo, hi, step)

    def values(self) -> np.ndarray:
        n = int(math.floor((self.max - self.min) / self.step + 1e-9)) + 1
        return self.min + np.arange(n) * self.step


@dataclass
class OutcomeGrid:
    v_axis: AxisSpec
    theta_axis: AxisSpec
    x0: float
    z0: float
    v_mph: np.ndarray
    theta_deg: np.ndarray
    cells: np.ndarray  # (n_theta, n_v) of Outcome codes

    def row_major(self):
        """Yield (v_mph, theta_deg, value) with theta as the outer loop."""
        for i, th in enumerate(self.theta_deg):
            for j, v in enumerate(self.v_mph):
                yield float(v), float(th), self.cells[i, j]


@dataclass
class ErrorGrid:
    v_axis: AxisSpec
    theta_axis: AxisSpec
    x0: float
    z0: float
    dv_mph: float
    dtheta_deg: float
    v_mph: np.ndarray
    theta_deg: np.ndarray
    cells: np.ndarray  # (n_theta, n_v) landing shift in feet
    amplifying: np.ndarray  # bool mask of cells replaced by the sentinel
    contours: dict[str, list[tuple[float, float]]] = field(default_factory=dict)

    def row_major(self):
        for i, th in enumerate(self.theta_deg):
            for j, v in enumerate(self.v_mph):
                yield float(v), float(th), float(self.cells[i, j])


def _map_rows(fn, thetas, threads: int):
    if threads <= 1:
        return [fn(th) for th in thetas]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, thetas))


def outcome_grid(
    v_spec: AxisSpec,
    theta_spec: AxisSpec,
    x0: float,
    z0: float,
    geom: CourtGeometry = DEFAULT_GEOMETRY,
    threads: int = 1,
) -> OutcomeGrid:
    vs = v_spec.values()
    ths = theta_spec.values()

    def row(th):
        return [
            int(classify_outcome(LaunchConditions.from_mph_deg(x0, z0, float(v), float(th)), geom))
            for v in vs
        ]

    cells = np.array(_map_rows(row, ths, threads), dtype=np.int8).reshape(len(ths), len(vs))
    return OutcomeGrid(v_spec, theta_spec, x0, z0, vs, ths, cells)


def _landing_or_nan(launch, geom):
    try:
        return landing_x(launch, geom).x_f
    except NeverReachesRim:
        return math.nan


def error_grid(
    v_spec: AxisSpec,
    theta_spec: AxisSpec,
    x0: float,
    z0: float,
    dv_mph: float,
    dtheta_deg: float,
    geom: CourtGeometry = DEFAULT_GEOMETRY,
    threads: int = 1,
) -> ErrorGrid:
    """Error-propagation raster plus bullseye and rim-edge contour cells.

    A cell belongs to a contour when the target x lies within half the
    cell's own landing span, i.e. the landing shift produced by moving to
    the cell's edges (half a step in v and theta). Cells whose unperturbed
    launch never reaches the rim, or whose perturbed corners fail, take
    the grid's largest finite value and are flagged in ``amplifying``.
    """
    vs = v_spec.values()
    ths = theta_spec.values()
    half_dv = v_spec.step / 2.0 if len(vs) > 1 else 0.0
    half_dth = theta_spec.step / 2.0 if len(ths) > 1 else 0.0

    def row(th):
        out = []
        for v in vs:
            launch = LaunchConditions.from_mph_deg(x0, z0, float(v), float(th))
            try:
                err = error_propagation(launch, dv_mph, dtheta_deg, geom)
                span = error_propagation(launch, half_dv, half_dth, geom)
            except NeverReachesRim:
                err, span = math.inf, math.nan
            out.append((err, _landing_or_nan(launch, geom), span))
        return out

    rows = _map_rows(row, ths, threads)
    arr = np.array(rows, dtype=float).reshape(len(ths), len(vs), 3)
    cells = arr[:, :, 0].copy()
    xf = arr[:, :, 1]
    span = arr[:, :, 2]
    amplifying = ~np.isfinite(cells)
    finite = cells[~amplifying]
    sentinel = float(finite.max()) if finite.size else 0.0
    cells[amplifying] = sentinel

    contours = {}
    for name, target in (
        ("bullseye", geom.bullseye_x),
        ("front_rim", geom.front_x),
        ("back_rim", geom.back_x),
    ):
        with np.errstate(invalid="ignore"):
            hit = np.abs(xf - target) < span
        hit &= np.isfinite(xf) & np.isfinite(span)
        contours[name] = [(float(vs[j]), float(ths[i])) for i, j in zip(*np.nonzero(hit))]

    return ErrorGrid(
        v_spec, theta_spec, x0, z0, dv_mph, dtheta_deg, vs, ths, cells, amplifying, contours
    )
