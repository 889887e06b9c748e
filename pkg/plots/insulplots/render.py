"""The four figure kinds rendered from insulfem output files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import matplotlib.tri as mtri
import numpy as np

from .ioformats import read_csv, read_vtk

THICKNESS_COLUMNS = ("arclength", "x", "y", "thickness")


def chain_is_closed(points):
    steps = np.linalg.norm(np.diff(points, axis=0), axis=1)
    gap = np.linalg.norm(points[-1] - points[0])
    return gap < 1.5 * np.median(steps)


def chain_normals(points, closed):
    """Outward bisector normals; the chain keeps the domain on its left."""
    if closed:
        d_in = points - np.roll(points, 1, axis=0)
        d_out = np.roll(points, -1, axis=0) - points
    else:
        diffs = np.diff(points, axis=0)
        d_in = np.vstack([diffs[:1], diffs])
        d_out = np.vstack([diffs, diffs[-1:]])
    d_in /= np.linalg.norm(d_in, axis=1)[:, None]
    d_out /= np.linalg.norm(d_out, axis=1)[:, None]
    normals = np.stack([d_in[:, 1] + d_out[:, 1],
                        -(d_in[:, 0] + d_out[:, 0])], axis=1)
    normals /= np.linalg.norm(normals, axis=1)[:, None]
    return normals


def film_band(points, thickness, scale):
    """(inner, outer) polylines of the film band: each boundary node is
    offset along its outward bisector normal by scale * thickness."""
    points = np.asarray(points, dtype=float)
    thickness = np.asarray(thickness, dtype=float)
    normals = chain_normals(points, chain_is_closed(points))
    return points, points + scale * thickness[:, None] * normals


def _band_polygon(ax, inner, outer, mirror=False):
    for sign in ((1.0, -1.0) if mirror else (1.0,)):
        ring = np.vstack([inner * [1.0, sign], outer[::-1] * [1.0, sign]])
        ax.fill(ring[:, 0], ring[:, 1], color="0.35", lw=0, zorder=3)


def _load_band(thickness_path, scale):
    _, rows = read_csv(thickness_path, THICKNESS_COLUMNS)
    return film_band(rows[:, 1:3], rows[:, 3], scale)


def render_field(vtk_path, thickness_path, out_path, scale=0.1, dpi=600):
    """Eigenfunction contours with the film band along the boundary."""
    points, triangles, fields = read_vtk(vtk_path)
    tri = mtri.Triangulation(points[:, 0], points[:, 1], triangles)
    inner, outer = _load_band(thickness_path, scale)

    fig, ax = plt.subplots(figsize=(5.2, 5.2))
    ax.tricontourf(tri, fields["u"], levels=24, cmap="viridis")
    _band_polygon(ax, inner, outer)
    ax.set_aspect("equal")
    ax.set_axis_off()
    fig.savefig(out_path, dpi=dpi, bbox_inches="tight")
    plt.close(fig)
    return out_path


def render_profile(vtk_path, thickness_path, out_path, scale=0.1, dpi=600):
    """Rotational-body cross section: gray-shaded eigenfunction on the
    half-profile mirrored across the axis, plus the film band."""
    points, triangles, fields = read_vtk(vtk_path)
    inner, outer = _load_band(thickness_path, scale)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for sign in (1.0, -1.0):
        tri = mtri.Triangulation(points[:, 0], sign * points[:, 1], triangles)
        ax.tricontourf(tri, fields["u"], levels=24, cmap="Greys")
    _band_polygon(ax, inner, outer, mirror=True)
    span = points[:, 0].min(), points[:, 0].max()
    ax.plot(span, [0.0, 0.0], color="0.6", lw=0.6, ls="--", zorder=4)
    ax.set_aspect("equal")
    ax.set_axis_off()
    fig.savefig(out_path, dpi=dpi, bbox_inches="tight")
    plt.close(fig)
    return out_path


def render_mass_curve(csv_path, out_path, dpi=600):
    """Eigenvalue against film mass with the linear asymptotes."""
    _, rows = read_csv(csv_path, ("m", "lambda", "lambda_D", "lambda_N"))
    fig, ax = plt.subplots(figsize=(5.6, 3.8))
    ax.plot(rows[:, 0], rows[:, 1], "o-", color="C0", label=r"$\lambda_m$")
    ax.axhline(rows[0, 2], color="C3", ls="--", lw=1,
               label=r"$\lambda_D$")
    ax.axhline(rows[0, 3], color="C2", ls=":", lw=1,
               label=r"$\lambda_N$")
    ax.set_xlabel("film mass m")
    ax.set_ylabel("eigenvalue")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=dpi)
    plt.close(fig)
    return out_path


def render_sweep(csv_path, out_path, dpi=600):
    """Ellipsoid-family eigenvalue curve with the minimizer marked."""
    _, rows = read_csv(csv_path, ("a", "lambda"))
    finite = rows[np.isfinite(rows[:, 1])]
    best = finite[np.argmin(finite[:, 1])]
    fig, ax = plt.subplots(figsize=(5.6, 3.8))
    ax.plot(rows[:, 0], rows[:, 1], "o-", color="C0")
    ax.plot(best[0], best[1], "s", color="C3", ms=9, mfc="none",
            label=f"optimum a={best[0]:g}")
    ax.set_xlabel("axial semi-axis a")
    ax.set_ylabel("eigenvalue")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=dpi)
    plt.close(fig)
    return out_path
