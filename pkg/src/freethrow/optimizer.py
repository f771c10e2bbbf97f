"""Gradient descent on launch speed and angle toward the bullseye."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .physics import (
    DEFAULT_GEOMETRY,
    CourtGeometry,
    InvalidLaunch,
    LaunchConditions,
    NeverReachesRim,
    _components,
    discriminant,
    fps_to_mph,
    landing_x,
)

EPS_DISC = 1e-9


class NearSingularDiscriminant(ValueError):
    """Launch sits on the edge of reachability; d(sqrt)/dp is unbounded there."""


def loss(x_f: float, x_g: float) -> float:
    return 0.5 * (x_f - x_g) ** 2


def landing_partials(launch: LaunchConditions, geom: CourtGeometry = DEFAULT_GEOMETRY):
    """Return (x_f, dx_f/dv0, dx_f/dtheta0) in feet, ft per ft/s, ft per rad."""
    disc = discriminant(launch, geom)
    if disc < 0:
        raise NeverReachesRim(f"apex below rim plane (discriminant {disc:.6g})")
    if disc < EPS_DISC:
        raise NearSingularDiscriminant(f"discriminant {disc:.3g} below {EPS_DISC:g}")
    v = launch.v0
    g = geom.g
    vx, vz = _components(launch)
    c, s = vx / v, vz / v
    root = math.sqrt(disc)
    t = (vz + root) / g
    # d(disc)/dv = 2 v s^2, d(disc)/dtheta = 2 v^2 s c
    dt_dv = (s + v * s * s / root) / g
    dt_dth = (v * c + v * v * s * c / root) / g
    x_f = launch.x0 - vx * t
    dx_dv = -c * t - vx * dt_dv
    dx_dth = vz * t - vx * dt_dth
    return x_f, dx_dv, dx_dth


def loss_gradient(
    launch: LaunchConditions, x_g: float, geom: CourtGeometry = DEFAULT_GEOMETRY
) -> tuple[float, float]:
    """Analytic (dL/dv0, dL/dtheta0) for L = 0.5 (x_f - x_g)^2."""
    x_f, dx_dv, dx_dth = landing_partials(launch, geom)
    r = x_f - x_g
    return r * dx_dv, r * dx_dth


@dataclass(frozen=True)
class DescentSettings:
    learning_rate_v: float = 1e-2
    learning_rate_theta: float = 1e-3
    max_iters: int = 10_000
    tolerance: float = 0.01
    max_halvings: int = 30

    def __post_init__(self):
        if not (self.learning_rate_v > 0 and self.learning_rate_theta > 0):
            raise ValueError("learning rates must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class TraceStep:
    iteration: int
    v0: float
    theta0: float
    x_f: float
    loss: float


@dataclass
class DescentTrace:
    steps: list[TraceStep] = field(default_factory=list)
    converged: bool = False
    final: LaunchConditions | None = None

    def __len__(self):
        return len(self.steps)


def _evaluate(launch, x_g, geom):
    try:
        x_f = landing_x(launch, geom).x_f
        if discriminant(launch, geom) < EPS_DISC:
            return None
    except NeverReachesRim:
        return None
    return x_f


def optimize_launch(
    initial: LaunchConditions,
    x_g: float | None = None,
    geom: CourtGeometry = DEFAULT_GEOMETRY,
    settings: DescentSettings = DescentSettings(),
) -> DescentTrace:
    """Adjust (v0, theta0) by gradient descent until x_f is within tolerance of x_g.

    Each step scales the gradient by the per-parameter learning rates and
    halves it while the candidate raises the loss or can no longer reach
    the rim. Release point stays fixed. ``x_g`` defaults to the bullseye.
    """
    if x_g is None:
        x_g = geom.bullseye_x
    x_f = landing_x(initial, geom).x_f
    current = initial
    cur_loss = loss(x_f, x_g)
    trace = DescentTrace(steps=[TraceStep(0, current.v0, current.theta0, x_f, cur_loss)])

    for it in range(1, settings.max_iters + 1):
        if abs(x_f - x_g) < settings.tolerance:
            trace.converged = True
            break
        try:
            gv, gth = loss_gradient(current, x_g, geom)
        except NearSingularDiscriminant:
            break
        scale = 1.0
        accepted = None
        for _ in range(settings.max_halvings + 1):
            v = current.v0 - scale * settings.learning_rate_v * gv
            th = current.theta0 - scale * settings.learning_rate_theta * gth
            try:
                cand = LaunchConditions(current.x0, current.z0, v, th)
            except InvalidLaunch:
                cand = None
            if cand is not None:
                cand_x = _evaluate(cand, x_g, geom)
                if cand_x is not None and loss(cand_x, x_g) < cur_loss:
                    accepted = (cand, cand_x)
                    break
            scale *= 0.5
        if accepted is None:
            break
        current, x_f = accepted
        cur_loss = loss(x_f, x_g)
        trace.steps.append(TraceStep(it, current.v0, current.theta0, x_f, cur_loss))
    else:
        trace.converged = abs(x_f - x_g) < settings.tolerance

    trace.final = current
    return trace


def trace_rows(trace: DescentTrace):
    """Rows for the ``iter,v_mph,theta_deg,xf_ft,loss`` export."""
    for s in trace.steps:
        yield s.iteration, fps_to_mph(s.v0), math.degrees(s.theta0), s.x_f, s.loss
