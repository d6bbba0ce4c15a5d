# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled quadrature kernels: nearest-agent ownership, Gaussian-mixture
evaluation, and per-cell moment reduction over the grid nodes.

Loop/summation order is part of the contract: the numpy fallback in
``_py.py`` must keep the same per-node accumulation order over mixture
components so both backends agree to rounding error.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport HUGE_VAL, exp

cnp.import_array()


def ownership(double[:, ::1] nodes, double[:, ::1] positions):
    """Index of the nearest position for every node; ties -> lowest index."""
    cdef Py_ssize_t m = nodes.shape[0]
    cdef Py_ssize_t n = positions.shape[0]
    out = np.empty(m, dtype=np.int32)
    cdef int[::1] owner = out
    cdef Py_ssize_t i, j, best_j
    cdef double dx, dy, dz, d2, best
    with nogil:
        for i in range(m):
            best = HUGE_VAL
            best_j = 0
            for j in range(n):
                dx = nodes[i, 0] - positions[j, 0]
                dy = nodes[i, 1] - positions[j, 1]
                dz = nodes[i, 2] - positions[j, 2]
                d2 = dx * dx + dy * dy + dz * dz
                if d2 < best:
                    best = d2
                    best_j = j
            owner[i] = <int> best_j
    return out


def gaussian_mixture(double[:, ::1] nodes, double[:, ::1] centers,
                     double alpha, double beta):
    """Sum of alpha*exp(-beta*||node - center||^2) over centers, per node."""
    cdef Py_ssize_t m = nodes.shape[0]
    cdef Py_ssize_t L = centers.shape[0]
    out = np.zeros(m, dtype=np.float64)
    cdef double[::1] phi = out
    cdef Py_ssize_t i, l
    cdef double dx, dy, dz, acc
    with nogil:
        for i in range(m):
            acc = 0.0
            for l in range(L):
                dx = nodes[i, 0] - centers[l, 0]
                dy = nodes[i, 1] - centers[l, 1]
                dz = nodes[i, 2] - centers[l, 2]
                acc += exp(-beta * (dx * dx + dy * dy + dz * dz))
            phi[i] = alpha * acc
    return out


def owned_moments(double[:, ::1] nodes, int[::1] owner, double[::1] phi,
                  int agent, double[::1] p):
    """Raw sums over the nodes owned by `agent` (no cell-volume factor).

    Returns (sum phi, sum x*phi, sum y*phi, sum z*phi,
             sum 0.5*||node - p||^2 * phi).
    """
    cdef Py_ssize_t m = nodes.shape[0]
    cdef Py_ssize_t i
    cdef double w, dx, dy, dz
    cdef double m0 = 0.0, mx = 0.0, my = 0.0, mz = 0.0, cost = 0.0
    with nogil:
        for i in range(m):
            if owner[i] == agent:
                w = phi[i]
                m0 += w
                mx += nodes[i, 0] * w
                my += nodes[i, 1] * w
                mz += nodes[i, 2] * w
                dx = nodes[i, 0] - p[0]
                dy = nodes[i, 1] - p[1]
                dz = nodes[i, 2] - p[2]
                cost += 0.5 * (dx * dx + dy * dy + dz * dz) * w
    return m0, mx, my, mz, cost
