"""Double-integrator agent dynamics, discretized with semi-implicit Euler.

The commanded acceleration is saturated per axis, then velocity and position
are advanced; positions are clamped to the region box with the touching
velocity component zeroed. Saturation keeps the discrete-time system
well-posed (the avoidance term is unbounded near the surface), the clamp
enforces the stay-in-region constraint.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import InspectionRegion

__all__ = ["AgentKinematics", "StepParams", "step"]


@dataclass(frozen=True)
class AgentKinematics:
    p: np.ndarray  # position, m
    v: np.ndarray  # velocity, m/s


@dataclass(frozen=True)
class StepParams:
    """Integration step and saturation bounds.

    ``v_max`` (optional) caps speed by rescaling the velocity vector. With
    saturated accelerations the damping term inside the control cannot act,
    so without a speed cap the closed loop builds kinetic energy without
    bound whenever the centroid pull exceeds ``u_max``; the cap keeps
    flight speeds physical.
    """

    dt: float              # s
    u_max: float           # m/s^2, per-axis saturation bound
    v_max: float | None = None  # m/s, speed cap (norm), None disables

    def __post_init__(self):
        if not (0 < self.dt <= 0.1):
            raise ValueError("dt must be in (0, 0.1] (stability guard)")
        if self.u_max <= 0:
            raise ValueError("u_max must be positive")
        if self.v_max is not None and self.v_max <= 0:
            raise ValueError("v_max must be positive (or None)")


def step(state: AgentKinematics, u: np.ndarray, params: StepParams,
         region: InspectionRegion) -> AgentKinematics:
    """One semi-implicit Euler step: v' = v + sat(u)*dt, p' = p + v'*dt.

    p' is clamped to the region box; a clamped axis has its velocity zeroed.
    Non-finite inputs are a simulation bug and raise immediately.
    """
    u = np.asarray(u, dtype=np.float64)
    if not (np.isfinite(u).all() and np.isfinite(state.p).all()
            and np.isfinite(state.v).all()):
        raise FloatingPointError("non-finite state or control input")
    u_applied = np.clip(u, -params.u_max, params.u_max)
    v = state.v + u_applied * params.dt
    if params.v_max is not None:
        speed = float(np.linalg.norm(v))
        if speed > params.v_max:
            v = v * (params.v_max / speed)
    p = state.p + v * params.dt
    below = p < region.lo
    above = p > region.hi
    if below.any() or above.any():
        p = np.where(below, region.lo, np.where(above, region.hi, p))
        v = np.where(below | above, 0.0, v)
    return AgentKinematics(p=p, v=v)
