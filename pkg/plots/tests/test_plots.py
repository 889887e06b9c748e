import shutil
from pathlib import Path

import numpy as np
import pytest

from insulplots.__main__ import main
from insulplots.ioformats import ParseError, read_csv, read_vtk
from insulplots.render import chain_is_closed, chain_normals, film_band

FIXTURES = Path(__file__).parent / "fixtures"


def test_read_csv_checks_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ParseError, match="bad.csv:1"):
        read_csv(path, ("x", "y"))


def test_read_csv_reports_bad_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n1,2\n3\n")
    with pytest.raises(ParseError, match="bad.csv:3"):
        read_csv(path)


def test_read_vtk_fixture():
    points, triangles, fields = read_vtk(FIXTURES / "solution.vtk")
    assert points.shape[1] == 2
    assert triangles.shape == (1024, 3)
    assert set(fields) == {"u", "thickness"}
    assert np.isfinite(fields["u"]).all()


def test_read_vtk_rejects_binary(tmp_path):
    path = tmp_path / "bad.vtk"
    path.write_text("# vtk DataFile Version 2.0\nt\nBINARY\n")
    with pytest.raises(ParseError, match="bad.vtk:3"):
        read_vtk(path)


def test_chain_detection():
    _, rows = read_csv(FIXTURES / "thickness.csv",
                       ("arclength", "x", "y", "thickness"))
    assert chain_is_closed(rows[:, 1:3])
    _, rows = read_csv(FIXTURES / "ball_thickness.csv",
                       ("arclength", "x", "y", "thickness"))
    assert not chain_is_closed(rows[:, 1:3])


def test_normals_point_outward_on_circle():
    _, rows = read_csv(FIXTURES / "thickness.csv",
                       ("arclength", "x", "y", "thickness"))
    pts = rows[:, 1:3]
    normals = chain_normals(pts, True)
    radial = pts / np.linalg.norm(pts, axis=1)[:, None]
    assert np.abs(normals - radial).max() < 1e-9


def test_uniform_thickness_gives_constant_band():
    _, rows = read_csv(FIXTURES / "thickness.csv",
                       ("arclength", "x", "y", "thickness"))
    pts = rows[:, 1:3]
    inner, outer = film_band(pts, np.full(len(pts), 2.0), 0.1)
    widths = np.linalg.norm(outer - inner, axis=1)
    assert widths == pytest.approx(0.2, rel=1e-12)


@pytest.mark.parametrize("argv_tail", [
    ["field", "--vtk", "solution.vtk", "--thickness", "thickness.csv"],
    ["profile", "--vtk", "ball_solution.vtk",
     "--thickness", "ball_thickness.csv"],
    ["mass-curve", "--csv", "mass_sweep.csv"],
    ["sweep", "--csv", "ellipsoid_sweep.csv"],
])
def test_render_kinds(tmp_path, argv_tail):
    argv = list(argv_tail)
    for k, v in enumerate(argv):
        if (FIXTURES / v).exists():
            argv[k] = str(FIXTURES / v)
    out = tmp_path / "figure.png"
    argv += ["--out", str(out), "--dpi", "150"]
    assert main(argv) == 0
    assert out.stat().st_size > 1000


def test_render_is_deterministic(tmp_path):
    outs = []
    for name in ("a.png", "b.png"):
        out = tmp_path / name
        main(["sweep", "--csv", str(FIXTURES / "ellipsoid_sweep.csv"),
              "--out", str(out), "--dpi", "120"])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_missing_input_is_reported(tmp_path, capsys):
    code = main(["sweep", "--csv", str(tmp_path / "nope.csv"),
                 "--out", str(tmp_path / "o.png")])
    assert code == 1
    assert "nope.csv" in capsys.readouterr().err
