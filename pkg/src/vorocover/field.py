"""Coverage field: inspection density, Voronoi ownership, and cell moments.

The density over the region is a Gaussian mixture anchored at the projected
target points, gated by status bits (1 = still uninspected). Integrals are
realized by midpoint quadrature on a regular lattice of cell centers with
nearest-agent ownership; the lattice must tile the region exactly. All
operations are pure and deterministic: node ordering, per-node summation
order over mixture components, and the lowest-index ownership tie rule are
fixed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .geometry import InspectionRegion

MASS_FLOOR = 1e-12

__all__ = [
    "MASS_FLOOR",
    "QuadratureGrid",
    "DensityField",
    "MassCentroid",
    "unreliability",
    "density_at",
    "owns",
    "ownership_grid",
    "density_on_grid",
    "mass_centroid",
    "moments_with_owner",
    "cost_H",
    "cost_H_with_owner",
    "grad_H",
    "neighbor_sets",
    "voronoi_neighbors",
]


class QuadratureGrid:
    """Regular lattice of cell centers tiling an axis-aligned region.

    Node weight is h^3. Node order is fixed (x-major, then y, then z) and is
    part of the determinism contract.
    """

    def __init__(self, region: InspectionRegion, h: float):
        if h <= 0:
            raise ValueError("grid resolution h must be positive")
        counts = region.extent / h
        rounded = np.rint(counts)
        if np.any(np.abs(counts - rounded) > 1e-9 * np.maximum(1.0, counts)):
            raise ValueError(
                f"region edges {region.extent} are not integer multiples of h={h}")
        self.region = region
        self.h = float(h)
        self.shape = tuple(int(n) for n in rounded)
        self._nodes: np.ndarray | None = None

    @property
    def n_nodes(self) -> int:
        nx, ny, nz = self.shape
        return nx * ny * nz

    @property
    def node_weight(self) -> float:
        return self.h ** 3

    @property
    def nodes(self) -> np.ndarray:
        """(M, 3) float64 cell centers, C-contiguous, cached."""
        if self._nodes is None:
            axes = [
                self.region.lo[d] + (np.arange(self.shape[d]) + 0.5) * self.h
                for d in range(3)
            ]
            mesh = np.meshgrid(*axes, indexing="ij")
            self._nodes = np.ascontiguousarray(
                np.stack([m.ravel() for m in mesh], axis=1))
        return self._nodes

    def refined(self, factor: int = 2) -> "QuadratureGrid":
        return QuadratureGrid(self.region, self.h / factor)


@dataclass
class DensityField:
    """Gaussian-mixture density gated by per-target status bits.

    phi(q) = sum_l status[l] * alpha * exp(-beta * ||q - projected[l]||^2)
    """

    projected: np.ndarray  # (L, 3) mixture sites
    status: np.ndarray     # (L,) uint8, 1 = active (uninspected)
    alpha: float
    beta: float

    def __post_init__(self):
        self.projected = np.ascontiguousarray(self.projected, dtype=np.float64)
        self.status = np.asarray(self.status, dtype=np.uint8)
        if self.status.shape != (self.projected.shape[0],):
            raise ValueError("status length must match number of projected points")
        if not (np.isfinite(self.alpha) and self.alpha > 0):
            raise ValueError("alpha must be finite and positive")
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise ValueError("beta must be finite and positive")

    def active_sites(self) -> np.ndarray:
        return np.ascontiguousarray(self.projected[self.status == 1])


@dataclass(frozen=True)
class MassCentroid:
    """Mass and centroid of one agent's Voronoi cell under the density.

    ``valid`` is False when the cell carries (numerically) no mass; the
    centroid then falls back to the agent's own position so downstream
    control degrades to pure damping.
    """

    mass: float
    centroid: np.ndarray
    valid: bool


def unreliability(q: np.ndarray, p: np.ndarray) -> float:
    """Quadratic sensing unreliability 0.5*||q - p||^2."""
    d = np.asarray(q, dtype=np.float64) - np.asarray(p, dtype=np.float64)
    return 0.5 * float(d @ d)


def density_at(q: np.ndarray, field: DensityField) -> float:
    """Mixture density at a single point."""
    sites = field.active_sites()
    if sites.shape[0] == 0:
        return 0.0
    q2 = np.ascontiguousarray(np.asarray(q, dtype=np.float64).reshape(1, 3))
    return float(_kernels.gaussian_mixture(q2, sites, field.alpha, field.beta)[0])


def _nearest_index(q: np.ndarray, positions: np.ndarray) -> int:
    d2 = np.square(positions - q).sum(axis=1)
    return int(np.argmin(d2))  # argmin returns the lowest index on ties


def owns(q: np.ndarray, positions: np.ndarray, i: int) -> bool:
    """True iff point q belongs to agent i's cell (ties -> lowest index)."""
    return _nearest_index(np.asarray(q, dtype=np.float64),
                          np.asarray(positions, dtype=np.float64)) == i


def ownership_grid(positions: np.ndarray, grid: QuadratureGrid) -> np.ndarray:
    """(M,) int32 owner index per grid node."""
    pos = np.ascontiguousarray(positions, dtype=np.float64)
    return _kernels.ownership(grid.nodes, pos)


def density_on_grid(field: DensityField, grid: QuadratureGrid) -> np.ndarray:
    """(M,) density evaluated at every grid node."""
    sites = field.active_sites()
    if sites.shape[0] == 0:
        return np.zeros(grid.n_nodes)
    return _kernels.gaussian_mixture(grid.nodes, sites, field.alpha, field.beta)


def moments_with_owner(i: int, positions: np.ndarray, owner: np.ndarray,
                       phi: np.ndarray, grid: QuadratureGrid
                       ) -> tuple[float, np.ndarray, float]:
    """(mass, first moment, cost) of agent i's cell for a fixed ownership.

    mass = sum phi*h^3 over owned nodes, moment = sum node*phi*h^3,
    cost = sum 0.5*||node - p_i||^2 * phi * h^3.
    """
    pos = np.ascontiguousarray(positions, dtype=np.float64)
    m0, mx, my, mz, cost = _kernels.owned_moments(
        grid.nodes, owner, phi, int(i), np.ascontiguousarray(pos[i]))
    w = grid.node_weight
    return m0 * w, np.array([mx, my, mz]) * w, cost * w


def mass_centroid(i: int, positions: np.ndarray, field: DensityField,
                  grid: QuadratureGrid) -> MassCentroid:
    """Mass and centroid of agent i's Voronoi cell under the density."""
    owner = ownership_grid(positions, grid)
    phi = density_on_grid(field, grid)
    return mass_centroid_with_owner(i, positions, owner, phi, grid)


def mass_centroid_with_owner(i: int, positions: np.ndarray, owner: np.ndarray,
                             phi: np.ndarray, grid: QuadratureGrid) -> MassCentroid:
    mass, moment, _ = moments_with_owner(i, positions, owner, phi, grid)
    if mass < MASS_FLOOR:
        return MassCentroid(mass=0.0,
                            centroid=np.array(positions[i], dtype=np.float64),
                            valid=False)
    return MassCentroid(mass=mass, centroid=moment / mass, valid=True)


def cost_H_with_owner(positions: np.ndarray, owner: np.ndarray,
                      field: DensityField, grid: QuadratureGrid) -> float:
    """Coverage cost for a fixed (frozen) node-ownership assignment."""
    phi = density_on_grid(field, grid)
    total = 0.0
    for i in range(np.asarray(positions).shape[0]):
        _, _, cost = moments_with_owner(i, positions, owner, phi, grid)
        total += cost
    return total


def cost_H(positions: np.ndarray, field: DensityField, grid: QuadratureGrid) -> float:
    """Coverage cost: density-weighted 0.5*||q - p_i||^2 over each cell, summed."""
    owner = ownership_grid(positions, grid)
    return cost_H_with_owner(positions, owner, field, grid)


def grad_H(i: int, positions: np.ndarray, field: DensityField,
           grid: QuadratureGrid) -> np.ndarray:
    """Cost gradient wrt agent i's position: mass * (p_i - centroid).

    Zero when the cell carries no mass (matches the damping fallback).
    """
    mc = mass_centroid(i, positions, field, grid)
    if not mc.valid:
        return np.zeros(3)
    return mc.mass * (np.asarray(positions[i], dtype=np.float64) - mc.centroid)


def neighbor_sets(positions: np.ndarray, grid: QuadratureGrid,
                  owner: np.ndarray | None = None) -> list[list[int]]:
    """Voronoi neighbor lists via 6-connected adjacency of the owner lattice.

    Symmetric by construction. May include near-degenerate neighbors that
    exact polytope adjacency would drop; that only adds messages.
    """
    n = np.asarray(positions).shape[0]
    if owner is None:
        owner = ownership_grid(positions, grid)
    lattice = owner.reshape(grid.shape)
    codes = []
    for axis in range(3):
        a = np.moveaxis(lattice, axis, 0)
        lo, hi = a[:-1], a[1:]
        diff = lo != hi
        if np.any(diff):
            u = lo[diff].astype(np.int64)
            v = hi[diff].astype(np.int64)
            codes.append(u * n + v)
            codes.append(v * n + u)
    result: list[list[int]] = [[] for _ in range(n)]
    if codes:
        for code in np.unique(np.concatenate(codes)):
            result[int(code) // n].append(int(code) % n)
    return result


def voronoi_neighbors(i: int, positions: np.ndarray,
                      grid: QuadratureGrid) -> set[int]:
    """Agents whose cells share a lattice face with agent i's cell."""
    return set(neighbor_sets(positions, grid)[i])
