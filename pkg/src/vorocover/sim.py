"""Synchronous-round simulation of the distributed inspection mission.

Each round, every agent reads the previous round's position/status snapshot
of its Voronoi neighbors, merges statuses, computes the mass centroid of its
cell under the merged density, applies the control law, steps its dynamics,
and clears the bits of targets now within inspection range. All agents work
from the same snapshot, so evaluation order (and worker count) never affects
results; logs are byte-identical run to run.

Density evaluations over the grid are cached per status vector: the density
only changes when bits clear, which is rare compared to the round rate.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from collections import OrderedDict
from dataclasses import dataclass, field as dc_field
from threading import Lock

import numpy as np

from . import control, dynamics, field, geometry

__all__ = [
    "Scenario",
    "ScenarioError",
    "SimulationAbort",
    "SimLog",
    "run",
    "facet_status",
    "encode_rle",
    "decode_rle",
    "encode_record",
    "write_log",
    "write_summary",
]


class ScenarioError(ValueError):
    """Scenario violates a precondition (bad geometry, placement, counts)."""


class SimulationAbort(RuntimeError):
    """The run hit a safety failure and cannot continue meaningfully."""

    def __init__(self, reason: str, round_index: int, partial_log: "SimLog | None" = None):
        super().__init__(f"round {round_index}: {reason}")
        self.reason = reason
        self.round_index = round_index
        self.partial_log = partial_log


@dataclass(eq=False)
class Scenario:
    """Complete description of one mission (mirrors the config file)."""

    region: geometry.InspectionRegion
    mesh_path: str
    d_proj: float
    n_agents: int
    starts: np.ndarray          # (N, 3) initial positions
    gains: control.Gains
    alpha: float
    beta: float
    dt: float
    t_max: float
    grid_h: float
    u_max: float
    v_max: float | None
    log_path: str

    def __post_init__(self):
        self.starts = np.asarray(self.starts, dtype=np.float64)

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return (
            np.array_equal(self.region.lo, other.region.lo)
            and np.array_equal(self.region.hi, other.region.hi)
            and self.mesh_path == other.mesh_path
            and self.d_proj == other.d_proj
            and self.n_agents == other.n_agents
            and np.array_equal(self.starts, other.starts)
            and self.gains == other.gains
            and (self.alpha, self.beta, self.dt, self.t_max,
                 self.grid_h, self.u_max, self.v_max, self.log_path)
            == (other.alpha, other.beta, other.dt, other.t_max,
                other.grid_h, other.u_max, other.v_max, other.log_path)
        )


@dataclass
class SimLog:
    """Per-round records plus the final summary quantities."""

    records: list[dict] = dc_field(default_factory=list)
    success: bool = False
    timed_out: bool = False
    completion_time: float | None = None
    min_pairwise_dist: float = float("inf")
    min_target_dist: float = float("inf")

    def summary(self) -> dict:
        return {
            "completion_time_s": self.completion_time,
            "success": self.success,
            "min_pairwise_dist_m": _finite_or_none(self.min_pairwise_dist),
            "min_target_dist_m": _finite_or_none(self.min_target_dist),
        }


def _finite_or_none(x: float):
    return float(x) if np.isfinite(x) else None


def facet_status(status: np.ndarray, facet_members: np.ndarray) -> np.ndarray:
    """Per-facet inspected flags: 1 iff all four member bits are cleared."""
    status = np.asarray(status, dtype=np.uint8)
    return (status[facet_members].max(axis=1) == 0).astype(np.uint8)


def encode_rle(bits: np.ndarray) -> list[int]:
    """Run-length encode a bit vector. Runs alternate in value starting with
    1, so an all-ones vector of length L encodes as [L] and an all-zeros one
    as [0, L]."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size == 0:
        return []
    change = np.nonzero(np.diff(bits))[0] + 1
    starts = np.concatenate([[0], change])
    ends = np.concatenate([change, [bits.size]])
    out = [0] if bits[0] == 0 else []
    out.extend(int(e - s) for s, e in zip(starts, ends))
    return out


def decode_rle(runs: list[int]) -> np.ndarray:
    value = 1
    parts = []
    for n in runs:
        parts.append(np.full(int(n), value, dtype=np.uint8))
        value ^= 1
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.uint8)


class _DensityCache:
    """LRU cache of grid-density arrays keyed by status-vector bytes.

    Values are pure functions of the key, so concurrent recomputation is
    harmless (identical bits); eviction order does not affect results.
    """

    def __init__(self, projected: np.ndarray, alpha: float, beta: float,
                 grid: field.QuadratureGrid, max_entries: int = 16):
        self._projected = projected
        self._alpha = alpha
        self._beta = beta
        self._grid = grid
        self._max = max_entries
        self._data: OrderedDict[bytes, np.ndarray] = OrderedDict()
        self._lock = Lock()

    def density(self, status: np.ndarray) -> np.ndarray:
        key = status.tobytes()
        with self._lock:
            if key in self._data:
                self._data.move_to_end(key)
                return self._data[key]
        phi = field.density_on_grid(
            field.DensityField(self._projected, status, self._alpha, self._beta),
            self._grid)
        with self._lock:
            self._data[key] = phi
            self._data.move_to_end(key)
            while len(self._data) > self._max:
                self._data.popitem(last=False)
        return phi


def validate_scenario(scenario: Scenario, targets: geometry.TargetSet) -> None:
    """Check every precondition that depends on scenario + geometry."""
    region = scenario.region
    starts = scenario.starts
    if starts.ndim != 2 or starts.shape[1] != 3:
        raise ScenarioError("initial positions must be an (N, 3) array")
    if scenario.n_agents != starts.shape[0]:
        raise ScenarioError(
            f"agents={scenario.n_agents} but {starts.shape[0]} start positions given")
    if not np.isfinite(starts).all():
        raise ScenarioError("initial positions must be finite")
    if not region.contains(starts):
        raise ScenarioError("initial positions must lie inside the region")
    n = starts.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if np.array_equal(starts[i], starts[j]):
                raise ScenarioError(f"agents {i} and {j} start at the same position")
    d = np.linalg.norm(starts[:, None, :] - targets.targets[None, :, :], axis=2)
    if d.min() <= scenario.gains.d_o:
        i, l = np.unravel_index(int(np.argmin(d)), d.shape)
        raise ScenarioError(
            f"agent {i} starts {d[i, l]:.2f} m from target {l}, inside the "
            f"safety distance {scenario.gains.d_o} m")
    # Closed containment: a structure standing on the region floor is valid.
    if not region.contains(targets.targets):
        raise ScenarioError("mesh is not inside the region")
    if not region.contains(targets.projected):
        raise ScenarioError(
            "projected target points fall outside the region; "
            "reduce d_proj or enlarge the region")
    if scenario.alpha <= 0 or scenario.beta <= 0:
        raise ScenarioError("alpha and beta must be positive")
    if scenario.t_max <= 0:
        raise ScenarioError("t_max must be positive")


def run(scenario: Scenario, workers: int = 1,
        mesh: geometry.TriangleMesh | None = None,
        initial_status: np.ndarray | None = None) -> SimLog:
    """Run the mission until every status bit clears or t_max is reached.

    Returns the complete log. Raises SimulationAbort on safety failures
    (overlapping agents, an agent reaching a raw target point); the partial
    log rides along on the exception. ``initial_status`` resumes a mission
    from a known inspection state (default: everything uninspected).
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if mesh is None:
        mesh = geometry.load_mesh(scenario.mesh_path)
    targets = geometry.build_target_set(mesh, scenario.d_proj)
    grid = field.QuadratureGrid(scenario.region, scenario.grid_h)
    validate_scenario(scenario, targets)

    gains = scenario.gains
    params = dynamics.StepParams(dt=scenario.dt, u_max=scenario.u_max,
                                 v_max=scenario.v_max)
    n = scenario.n_agents
    n_targets = len(targets)
    raw = targets.targets
    projected = targets.projected

    states = [dynamics.AgentKinematics(p=scenario.starts[i].copy(),
                                       v=np.zeros(3)) for i in range(n)]
    if initial_status is None:
        initial_status = np.ones(n_targets, dtype=np.uint8)
    else:
        initial_status = np.asarray(initial_status, dtype=np.uint8)
        if initial_status.shape != (n_targets,):
            raise ScenarioError(
                f"initial status length {initial_status.shape} != {n_targets} targets")
    statuses = [initial_status.copy() for _ in range(n)]
    cache = _DensityCache(projected, scenario.alpha, scenario.beta, grid)
    log = SimLog()
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None

    def agent_round(i: int, neighbor_lists, owner):
        merged = statuses[i]
        for j in neighbor_lists[i]:
            merged = control.merge_status(merged, statuses[j])
        phi = cache.density(merged)
        positions = _positions(states)
        mc = field.mass_centroid_with_owner(i, positions, owner, phi, grid)
        _, _, cost = field.moments_with_owner(i, positions, owner, phi, grid)
        uc = control.u_centroid(states[i], mc, gains)
        uo = control.u_avoid(states[i].p, raw, gains)
        new_state = dynamics.step(states[i], control.total_control(uc, uo),
                                  params, scenario.region)
        new_status = control.update_inspection(new_state.p, projected, merged, gains)
        return merged, mc, cost, uc, uo, new_state, new_status

    def global_cost(global_status, merged_list, costs, owner):
        # Reuse the per-agent cost sums when every agent already worked from
        # the global status; recompute on the (transient) disagreements.
        if all(np.array_equal(m, global_status) for m in merged_list):
            return sum(costs)
        phi = cache.density(global_status)
        positions = _positions(states)
        total = 0.0
        for i in range(n):
            _, _, c = field.moments_with_owner(i, positions, owner, phi, grid)
            total += c
        return total

    k = 0
    try:
        while True:
            t = k * scenario.dt
            positions = _positions(states)
            global_status = statuses[0]
            for s in statuses[1:]:
                global_status = np.minimum(global_status, s)
            popcount = int(global_status.sum())

            if popcount == 0:
                owner = field.ownership_grid(positions, grid)
                neighbor_lists = field.neighbor_sets(positions, grid, owner)
                _update_minima(log, positions, raw)
                log.records.append(_terminal_record(
                    t, states, neighbor_lists, global_status, targets, gains, raw))
                log.success = True
                log.completion_time = t
                break
            if t >= scenario.t_max:
                log.timed_out = True
                break

            pairwise = _min_pairwise(positions)
            if pairwise == 0.0:
                raise SimulationAbort("agents occupy the same position", k, log)

            owner = field.ownership_grid(positions, grid)
            neighbor_lists = field.neighbor_sets(positions, grid, owner)

            try:
                if pool is None:
                    results = [agent_round(i, neighbor_lists, owner) for i in range(n)]
                else:
                    results = list(pool.map(
                        lambda i: agent_round(i, neighbor_lists, owner), range(n)))
            except control.SingularityError as exc:
                raise SimulationAbort(str(exc), k, log) from exc

            merged_list = [r[0] for r in results]
            costs = [r[2] for r in results]
            upsilon = gains.k_p * global_cost(global_status, merged_list, costs, owner)
            for s in states:
                upsilon += 0.5 * float(s.v @ s.v)
                upsilon += control.repulsive_potential(s.p, raw, gains)

            _update_minima(log, positions, raw)
            log.min_pairwise_dist = min(log.min_pairwise_dist, pairwise)

            agents_out = []
            for i, (merged, mc, cost, uc, uo, new_state, new_status) in enumerate(results):
                agents_out.append({
                    "p": _vec(states[i].p),
                    "v": _vec(states[i].v),
                    "uc": _vec(uc),
                    "uo": _vec(uo),
                    "centroid": _vec(mc.centroid),
                    "mass": float(mc.mass),
                    "neighbors": neighbor_lists[i],
                })
            log.records.append({
                "t": t,
                "agents": agents_out,
                "status_popcount": popcount,
                "status_bits": encode_rle(global_status),
                "lyapunov": float(upsilon),
                "facets_done": int(facet_status(global_status, targets.facet_members).sum()),
            })

            states = [r[5] for r in results]
            statuses = [r[6] for r in results]
            k += 1
    finally:
        if pool is not None:
            pool.shutdown(wait=False)
    return log


def _positions(states) -> np.ndarray:
    return np.array([s.p for s in states])


def _vec(x: np.ndarray) -> list[float]:
    return [float(x[0]), float(x[1]), float(x[2])]


def _min_pairwise(positions: np.ndarray) -> float:
    n = positions.shape[0]
    if n < 2:
        return float("inf")
    d = np.linalg.norm(positions[:, None, :] - positions[None, :, :], axis=2)
    return float(d[np.triu_indices(n, k=1)].min())


def _update_minima(log: SimLog, positions: np.ndarray, raw_targets: np.ndarray):
    d = np.linalg.norm(positions[:, None, :] - raw_targets[None, :, :], axis=2)
    log.min_target_dist = min(log.min_target_dist, float(d.min()))
    log.min_pairwise_dist = min(log.min_pairwise_dist, _min_pairwise(positions))


def _terminal_record(t, states, neighbor_lists, global_status, targets, gains, raw):
    """Final snapshot once every bit is cleared: no control is computed, the
    density is identically zero, so mass is 0 and centroids fall back to the
    agents' positions."""
    upsilon = 0.0
    agents_out = []
    for i, s in enumerate(states):
        upsilon += 0.5 * float(s.v @ s.v)
        upsilon += control.repulsive_potential(s.p, raw, gains)
        agents_out.append({
            "p": _vec(s.p),
            "v": _vec(s.v),
            "uc": [0.0, 0.0, 0.0],
            "uo": [0.0, 0.0, 0.0],
            "centroid": _vec(s.p),
            "mass": 0.0,
            "neighbors": neighbor_lists[i],
        })
    return {
        "t": t,
        "agents": agents_out,
        "status_popcount": 0,
        "status_bits": encode_rle(global_status),
        "lyapunov": float(upsilon),
        "facets_done": int(facet_status(global_status, targets.facet_members).sum()),
    }


def encode_record(record: dict) -> str:
    return json.dumps(record, separators=(",", ":"), allow_nan=False)


def log_bytes(log: SimLog) -> bytes:
    return "".join(encode_record(r) + "\n" for r in log.records).encode("utf-8")


def write_log(log: SimLog, path) -> None:
    with open(path, "wb") as fh:
        fh.write(log_bytes(log))


def write_summary(log: SimLog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(log.summary(), fh, indent=2)
        fh.write("\n")
