"""The three figures: 3D trajectories over the shaded mesh, inspection
timeline, and per-agent control inputs. All rendering is headless (Agg);
output is a pure function of the log, mesh, and style defaults."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from mpl_toolkits.mplot3d.art3d import Poly3DCollection  # noqa: E402

from .logframe import LogFrame  # noqa: E402

AGENT_CMAP = plt.get_cmap("tab10")


def facet_inspected_flags(frame: LogFrame, vertices: np.ndarray,
                          facets: np.ndarray) -> np.ndarray:
    """Final per-facet inspected state from the log's last status vector.

    Target ordering contract: status bit l < V refers to vertex l, bit V + k
    to the center of facet k. A facet is inspected when its three vertices
    and its center are all cleared.
    """
    nv, nf = len(vertices), len(facets)
    if frame.n_targets != nv + nf:
        raise ValueError(
            f"log has {frame.n_targets} targets but mesh has {nv} vertices "
            f"+ {nf} facets")
    bits = frame.final_status
    flags = np.empty(nf, dtype=bool)
    for k, tri in enumerate(facets):
        flags[k] = (bits[tri].max() == 0) and (bits[nv + k] == 0)
    return flags


def plot_trajectories(frame: LogFrame, vertices: np.ndarray,
                      facets: np.ndarray, out_path) -> dict:
    """3D view: mesh facets shaded by final inspected state, one colored
    trajectory per agent."""
    flags = facet_inspected_flags(frame, vertices, facets)
    fig = plt.figure(figsize=(9, 7))
    ax = fig.add_subplot(projection="3d")

    tris = vertices[facets]
    done = Poly3DCollection(tris[flags], facecolor="0.35", edgecolor="0.2",
                            linewidth=0.3, alpha=0.95)
    todo = Poly3DCollection(tris[~flags], facecolor="#d9c9a3", edgecolor="0.4",
                            linewidth=0.3, alpha=0.9)
    ax.add_collection3d(done)
    ax.add_collection3d(todo)

    for i in range(frame.n_agents):
        color = AGENT_CMAP(i % 10)
        ax.plot(frame.p[:, i, 0], frame.p[:, i, 1], frame.p[:, i, 2],
                color=color, linewidth=1.0, label=f"agent {i + 1}")
        ax.scatter(*frame.p[0, i], color=color, marker="o", s=25)
        ax.scatter(*frame.p[-1, i], color=color, marker="^", s=25)

    both = np.concatenate([vertices, frame.p.reshape(-1, 3)])
    lo, hi = both.min(axis=0), both.max(axis=0)
    ax.set_xlim(lo[0], hi[0])
    ax.set_ylim(lo[1], hi[1])
    ax.set_zlim(lo[2], hi[2])
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_zlabel("z [m]")
    ax.set_title(f"trajectories, {int(flags.sum())}/{len(flags)} facets inspected")
    ax.legend(loc="upper left", fontsize=8)
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return {"out": str(out_path), "facets_inspected": int(flags.sum()),
            "facets_total": int(len(flags))}


def plot_timeline(frame: LogFrame, out_path, facets_total: int | None = None) -> dict:
    """Step plot of inspected-facet count and remaining target bits vs time.

    With the facet total (from a mesh) the left axis is drawn in percent.
    """
    fig, ax = plt.subplots(figsize=(8, 4.5))
    if facets_total:
        series = 100.0 * frame.facets_done / facets_total
        ax.set_ylabel("facets inspected [%]")
        ax.set_ylim(0, 105)
    else:
        series = frame.facets_done
        ax.set_ylabel("facets inspected")
    ax.step(frame.t, series, where="post", color="tab:blue", label="facets done")
    ax2 = ax.twinx()
    ax2.step(frame.t, frame.popcount, where="post", color="tab:red",
             label="uninspected targets")
    ax2.set_ylabel("uninspected targets")
    ax.set_xlabel("t [s]")
    ax.set_title("inspection progress")
    lines, labels = ax.get_legend_handles_labels()
    l2, lab2 = ax2.get_legend_handles_labels()
    ax.legend(lines + l2, labels + lab2, loc="center right", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    final_pct = (100.0 * frame.facets_done[-1] / facets_total
                 if facets_total else None)
    return {"out": str(out_path),
            "final_facets_done": int(frame.facets_done[-1]),
            "final_percent": final_pct}


def plot_controls(frame: LogFrame, out_path) -> dict:
    """Per-axis commanded control input (centroid + avoidance term) for every
    agent over time."""
    total = frame.uc + frame.uo
    fig, axes = plt.subplots(3, 1, figsize=(8, 7), sharex=True)
    for ax_idx, (ax, label) in enumerate(zip(axes, ("$u_x$", "$u_y$", "$u_z$"))):
        for i in range(frame.n_agents):
            ax.plot(frame.t, total[:, i, ax_idx],
                    color=AGENT_CMAP(i % 10), linewidth=0.8,
                    label=f"agent {i + 1}" if ax_idx == 0 else None)
        ax.set_ylabel(f"{label} [m/s$^2$]")
        ax.grid(True, alpha=0.3)
    axes[0].legend(loc="upper right", fontsize=8, ncol=min(frame.n_agents, 5))
    axes[-1].set_xlabel("t [s]")
    axes[0].set_title("commanded control inputs")
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return {"out": str(out_path), "max_abs_control": float(np.abs(total).max())}
