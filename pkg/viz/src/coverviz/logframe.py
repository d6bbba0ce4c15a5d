"""Round-log ingestion with strict schema validation.

The log is line-delimited JSON, one record per round:

    {"t": float, "agents": [{"p","v","uc","uo","centroid": [x,y,z],
     "mass": float, "neighbors": [int,...]}, ...],
     "status_popcount": int, "status_bits": [run,...],
     "lyapunov": float, "facets_done": int}

``status_bits`` is run-length encoded with runs alternating in value
starting at 1 (a leading 0-length run encodes a vector that starts with 0).
Unknown field names are rejected; rounds must be strictly increasing in t
and non-increasing in popcount.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

RECORD_FIELDS = {"t", "agents", "status_popcount", "status_bits",
                 "lyapunov", "facets_done"}
AGENT_FIELDS = {"p", "v", "uc", "uo", "centroid", "mass", "neighbors"}


class SchemaError(ValueError):
    """Log does not conform to the round-record schema."""


def decode_rle(runs: list[int]) -> np.ndarray:
    value = 1
    parts = []
    for n in runs:
        if not isinstance(n, int) or n < 0:
            raise SchemaError(f"bad run length {n!r}")
        parts.append(np.full(n, value, dtype=np.uint8))
        value ^= 1
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.uint8)


def _vec(record: dict, agent: int, key: str, lineno: int) -> list[float]:
    val = record["agents"][agent][key]
    if (not isinstance(val, list) or len(val) != 3
            or not all(isinstance(x, (int, float)) for x in val)):
        raise SchemaError(f"line {lineno}: agents[{agent}].{key} is not a 3-vector")
    return val


@dataclass
class LogFrame:
    """Parsed log: arrays indexed (round, agent, axis)."""

    t: np.ndarray               # (T,)
    p: np.ndarray               # (T, N, 3)
    v: np.ndarray
    uc: np.ndarray
    uo: np.ndarray
    centroid: np.ndarray
    mass: np.ndarray            # (T, N)
    popcount: np.ndarray        # (T,)
    facets_done: np.ndarray     # (T,)
    lyapunov: np.ndarray        # (T,)
    final_status: np.ndarray    # (L,) uint8 bits of the last round

    @property
    def n_rounds(self) -> int:
        return self.t.shape[0]

    @property
    def n_agents(self) -> int:
        return self.p.shape[1]

    @property
    def n_targets(self) -> int:
        return self.final_status.shape[0]


def parse_log_text(text: str, name: str = "<log>") -> LogFrame:
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{name}:{lineno}: not valid JSON: {exc}") from exc
        if not isinstance(rec, dict):
            raise SchemaError(f"{name}:{lineno}: record is not an object")
        unknown = set(rec) - RECORD_FIELDS
        if unknown:
            raise SchemaError(f"{name}:{lineno}: unknown field names {sorted(unknown)}")
        missing = RECORD_FIELDS - set(rec)
        if missing:
            raise SchemaError(f"{name}:{lineno}: missing fields {sorted(missing)}")
        if not isinstance(rec["agents"], list) or not rec["agents"]:
            raise SchemaError(f"{name}:{lineno}: agents must be a non-empty list")
        for i, agent in enumerate(rec["agents"]):
            if not isinstance(agent, dict):
                raise SchemaError(f"{name}:{lineno}: agents[{i}] is not an object")
            bad = set(agent) ^ AGENT_FIELDS
            if bad:
                raise SchemaError(
                    f"{name}:{lineno}: agents[{i}] fields differ from schema: "
                    f"{sorted(bad)}")
        records.append((lineno, rec))

    if not records:
        raise SchemaError(f"{name}: empty log (0 rounds)")

    n = len(records[0][1]["agents"])
    length = None
    t, pop, facets, lyap = [], [], [], []
    p, v, uc, uo, cen, mass = [], [], [], [], [], []
    final_bits = None
    for lineno, rec in records:
        if len(rec["agents"]) != n:
            raise SchemaError(f"{name}:{lineno}: agent count changed mid-log")
        bits = decode_rle(rec["status_bits"])
        if length is None:
            length = bits.size
        elif bits.size != length:
            raise SchemaError(f"{name}:{lineno}: status vector length changed")
        if int(bits.sum()) != rec["status_popcount"]:
            raise SchemaError(f"{name}:{lineno}: popcount does not match bits")
        if t and rec["t"] <= t[-1]:
            raise SchemaError(f"{name}:{lineno}: rounds not strictly increasing in t")
        if pop and rec["status_popcount"] > pop[-1]:
            raise SchemaError(f"{name}:{lineno}: popcount increased")
        t.append(float(rec["t"]))
        pop.append(int(rec["status_popcount"]))
        facets.append(int(rec["facets_done"]))
        lyap.append(float(rec["lyapunov"]))
        p.append([_vec(rec, i, "p", lineno) for i in range(n)])
        v.append([_vec(rec, i, "v", lineno) for i in range(n)])
        uc.append([_vec(rec, i, "uc", lineno) for i in range(n)])
        uo.append([_vec(rec, i, "uo", lineno) for i in range(n)])
        cen.append([_vec(rec, i, "centroid", lineno) for i in range(n)])
        mass.append([float(rec["agents"][i]["mass"]) for i in range(n)])
        final_bits = bits

    return LogFrame(
        t=np.array(t), p=np.array(p), v=np.array(v), uc=np.array(uc),
        uo=np.array(uo), centroid=np.array(cen), mass=np.array(mass),
        popcount=np.array(pop), facets_done=np.array(facets),
        lyapunov=np.array(lyap), final_status=final_bits,
    )


def load_log(path) -> LogFrame:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_log_text(fh.read(), name=str(path))
