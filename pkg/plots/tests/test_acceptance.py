"""Acceptance checks for the figure renderer: every plot kind renders from
the golden fixtures, and the film band is geometrically exact to sub-pixel
accuracy at print resolution."""

from pathlib import Path

import numpy as np

from insulplots.__main__ import main
from insulplots.ioformats import read_csv
from insulplots.render import film_band

FIXTURES = Path(__file__).parent / "fixtures"

FIELD_FIGSIZE_INCHES = 5.2  # matches render_field


def check(name, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, f"{name}: {detail}"


def test_all_plot_kinds_render_at_600dpi(tmp_path):
    jobs = {
        "field": ["field", "--vtk", str(FIXTURES / "solution.vtk"),
                  "--thickness", str(FIXTURES / "thickness.csv")],
        "profile": ["profile", "--vtk", str(FIXTURES / "ball_solution.vtk"),
                    "--thickness", str(FIXTURES / "ball_thickness.csv")],
        "mass-curve": ["mass-curve", "--csv", str(FIXTURES / "mass_sweep.csv")],
        "sweep": ["sweep", "--csv", str(FIXTURES / "ellipsoid_sweep.csv")],
    }
    for kind, argv in jobs.items():
        out = tmp_path / f"{kind}.png"
        code = main(argv + ["--out", str(out), "--dpi", "600"])
        ok = code == 0 and out.exists() and out.stat().st_size > 1000
        check(f"render {kind}", ok, f"{out.name} "
              f"({out.stat().st_size if out.exists() else 0} bytes)")


def test_film_band_width_is_subpixel_accurate():
    for name, scale in (("thickness.csv", 0.1), ("ball_thickness.csv", 0.1)):
        _, rows = read_csv(FIXTURES / name,
                           ("arclength", "x", "y", "thickness"))
        points, thickness = rows[:, 1:3], rows[:, 3]
        inner, outer = film_band(points, thickness, scale)
        widths = np.linalg.norm(outer - inner, axis=1)
        deviation = np.abs(widths - scale * thickness).max()
        extent = points[:, 0].max() - points[:, 0].min() + 2 * scale
        pixel = extent / (FIELD_FIGSIZE_INCHES * 600)
        check(f"film band width ({name})", deviation <= pixel,
              f"max deviation {deviation:.2e} <= one pixel {pixel:.2e} "
              "at 600 dpi")
