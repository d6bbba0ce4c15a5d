"""Pure-numpy twins of the compiled kernels in ``_core.pyx``.

Selected automatically when the extension is not built (or when forced via
``VOROCOVER_BACKEND=python``). Per-node accumulation over mixture components
runs in the same order as the compiled loop, so the two backends agree to
floating-point rounding.
"""

from __future__ import annotations

import numpy as np


def ownership(nodes: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Index of the nearest position for every node; ties -> lowest index."""
    m = nodes.shape[0]
    best = np.full(m, np.inf)
    owner = np.zeros(m, dtype=np.int32)
    for j in range(positions.shape[0]):
        d2 = np.square(nodes - positions[j]).sum(axis=1)
        closer = d2 < best  # strict: earlier (lower) index keeps ties
        owner[closer] = j
        np.minimum(best, d2, out=best)
    return owner


def gaussian_mixture(nodes: np.ndarray, centers: np.ndarray,
                     alpha: float, beta: float) -> np.ndarray:
    """Sum of alpha*exp(-beta*||node - center||^2) over centers, per node."""
    acc = np.zeros(nodes.shape[0])
    for center in centers:
        d2 = np.square(nodes - center).sum(axis=1)
        acc += np.exp(-beta * d2)
    return alpha * acc


def owned_moments(nodes: np.ndarray, owner: np.ndarray, phi: np.ndarray,
                  agent: int, p: np.ndarray):
    """Raw sums over the nodes owned by `agent` (no cell-volume factor)."""
    mask = owner == agent
    w = phi[mask]
    sel = nodes[mask]
    m0 = float(w.sum())
    mx, my, mz = (sel * w[:, None]).sum(axis=0)
    cost = float((0.5 * np.square(sel - p).sum(axis=1) * w).sum())
    return m0, float(mx), float(my), float(mz), cost
