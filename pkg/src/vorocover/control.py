"""Distributed control law and inspection-status bookkeeping.

Each agent's control is the sum of two terms: a PD drive toward the mass
centroid of its Voronoi cell, and a repulsive term pushing away from every
raw target point closer than the safety distance. Status bits (1 while a
target is uninspected) are cleared locally when the agent gets close enough
to a projected point, and propagated by elementwise-minimum merges with
neighbor status vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import AgentKinematics
from .field import DensityField, MassCentroid, QuadratureGrid, cost_H

SINGULARITY_DISTANCE = 1e-6  # m

__all__ = [
    "Gains",
    "SingularityError",
    "u_centroid",
    "u_avoid",
    "total_control",
    "update_inspection",
    "merge_status",
    "repulsive_potential",
    "lyapunov",
]


class SingularityError(RuntimeError):
    """An agent reached a raw target point; the safety barrier failed."""


@dataclass(frozen=True)
class Gains:
    """Controller gains and thresholds.

    ``r`` is the sensing range in meters: a projected point within distance
    r of an agent counts as inspected. ``eps`` is the potential gain used by
    the energy monitor only; it defaults to ``mu_o`` so that the repulsive
    control is exactly the negative potential gradient.
    """

    k_p: float
    k_d: float
    mu_o: float
    d_o: float
    r: float
    eps: float | None = None

    def __post_init__(self):
        if self.eps is None:
            object.__setattr__(self, "eps", self.mu_o)
        for name in ("k_p", "k_d", "mu_o", "d_o", "r", "eps"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise ValueError(f"gain {name} must be finite and positive")


def u_centroid(state: AgentKinematics, mc: MassCentroid, g: Gains) -> np.ndarray:
    """PD drive toward the cell centroid: k_p*M*(C - p) - k_d*v.

    With no cell mass there is nothing to track and the term degrades to
    pure damping -k_d*v.
    """
    if not mc.valid:
        return -g.k_d * state.v
    return g.k_p * mc.mass * (mc.centroid - state.p) - g.k_d * state.v


def u_avoid(p: np.ndarray, targets: np.ndarray, g: Gains) -> np.ndarray:
    """Repulsion away from every raw target point within the safety distance.

    sum over active l of mu_o * (1/d_l - 1/d_o) * (p - q_l) / d_l^2,
    active iff d_l <= d_o. Continuous at d_l = d_o (the factor vanishes).
    """
    p = np.asarray(p, dtype=np.float64)
    diff = p - np.asarray(targets, dtype=np.float64)
    d = np.linalg.norm(diff, axis=1)
    if np.any(d < SINGULARITY_DISTANCE):
        l = int(np.argmin(d))
        raise SingularityError(
            f"agent at {p.tolist()} reached target {l} (distance {d[l]:.3e} m)")
    active = d <= g.d_o
    if not np.any(active):
        return np.zeros(3)
    da = d[active]
    coeff = g.mu_o * (1.0 / da - 1.0 / g.d_o) / (da * da)
    return (coeff[:, None] * diff[active]).sum(axis=0)


def total_control(u_c: np.ndarray, u_o: np.ndarray) -> np.ndarray:
    return u_c + u_o


def update_inspection(p: np.ndarray, projected: np.ndarray,
                      status: np.ndarray, g: Gains) -> np.ndarray:
    """Clear the bit of every still-active target whose projected point lies
    within the sensing range: ||projected_l - p|| <= r.

    ``r`` is the sensing radius in meters. (The quadratic unreliability only
    shapes the coverage cost; the inspection trigger is the range check.)
    """
    d2 = np.square(np.asarray(projected, dtype=np.float64) - p).sum(axis=1)
    cleared = (d2 <= g.r * g.r) & (status == 1)
    if not np.any(cleared):
        return status
    out = status.copy()
    out[cleared] = 0
    return out


def merge_status(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise minimum: a target inspected by anyone stays inspected."""
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    if a.shape != b.shape:
        raise ValueError(f"status length mismatch: {a.shape} vs {b.shape}")
    return np.minimum(a, b)


def repulsive_potential(p: np.ndarray, targets: np.ndarray, g: Gains) -> float:
    """Barrier energy of one agent: sum of 0.5*eps*(1/d - 1/d_o)^2 over
    targets within the safety distance."""
    d = np.linalg.norm(np.asarray(targets, dtype=np.float64) - p, axis=1)
    active = d <= g.d_o
    if not np.any(active):
        return 0.0
    da = d[active]
    return float((0.5 * g.eps * np.square(1.0 / da - 1.0 / g.d_o)).sum())


def lyapunov(states: list[AgentKinematics], field: DensityField,
             grid: QuadratureGrid, targets: np.ndarray, g: Gains) -> float:
    """Energy monitor: k_p*H + total kinetic energy + total barrier energy.

    Tracked numerically along a run; expected non-increasing between
    status-change events while no saturation or boundary clamp is active.
    """
    positions = np.array([s.p for s in states])
    value = g.k_p * cost_H(positions, field, grid)
    for s in states:
        value += 0.5 * float(s.v @ s.v)
        value += repulsive_potential(s.p, targets, g)
    return value
