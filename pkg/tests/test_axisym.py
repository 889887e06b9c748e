import numpy as np
import pytest

from insulfem.assembly import assemble
from insulfem.axisym import (BALL_VOLUME, RotationalBodySpec, axisym_eig,
                             ellipsoid_sweep, half_ellipsoid_opt)
from insulfem.flow import default_params
from insulfem.mesh import measures


def test_spec_meshes_hit_target_volume():
    for spec in (RotationalBodySpec("ball"),
                 RotationalBodySpec("ellipsoid", a=1.3),
                 RotationalBodySpec("half_ellipsoids", a=1.6, b=0.7)):
        mesh = spec.mesh(5)
        volume, _ = measures(mesh)
        assert volume == pytest.approx(BALL_VOLUME, rel=3e-3)


def test_axisym_weights_reproduce_ball_measures():
    mesh = RotationalBodySpec("ball").mesh(5)
    ops = assemble(mesh)
    assert ops.M_lump.sum() == pytest.approx(4.0 * np.pi / 3.0, rel=2e-3)
    assert ops.beta.sum() == pytest.approx(4.0 * np.pi, rel=2e-3)


def test_ball_thickness_regimes():
    spec = RotationalBodySpec("ball")
    mesh = spec.mesh(5)
    ops = assemble(mesh)
    boundary = ops.beta > 0

    gap = axisym_eig(spec, default_params(mesh, 5.0), 5)
    ell = gap.thickness[boundary]
    assert ell.min() / ell.max() < 0.01

    radial = axisym_eig(spec, default_params(mesh, 40.0), 5)
    ell = radial.thickness[boundary]
    assert ell.min() / ell.max() > 0.99


def test_ball_gap_sits_opposite_the_maximum():
    spec = RotationalBodySpec("ball")
    mesh = spec.mesh(5)
    ops = assemble(mesh)
    result = axisym_eig(spec, default_params(mesh, 5.0), 5)
    boundary = np.flatnonzero(ops.beta > 0)
    x = mesh.nodes[boundary, 0]
    ell = result.thickness[boundary]
    assert abs(x[np.argmin(ell)] - (-x[np.argmax(ell)])) < 0.35


def test_sweep_contains_ball_and_is_smooth():
    grid = [1.0, 1.1, 1.2, 1.3]
    points, a_star = ellipsoid_sweep(grid, 5.0, refinements=4)
    lams = [lam for _, lam in points]
    assert all(np.isfinite(lams))
    spec = RotationalBodySpec("ball")
    ball = axisym_eig(spec, default_params(spec.mesh(4), 5.0), 4)
    assert lams[0] == pytest.approx(ball.lam_plain, rel=2e-3)
    diffs = np.abs(np.diff(lams))
    assert diffs.max() <= 5.0 * max(np.median(diffs), 1e-6)
    assert a_star in (1.1, 1.2, 1.3)


def test_half_ellipsoid_descent_from_inside_the_egg_basin():
    # level 4 landscape carries a discretization barrier around the
    # symmetric line, so the cheap machinery test starts inside the basin;
    # the acceptance suite runs the symmetric start at level 5
    a, b, lam = half_ellipsoid_opt(5.0, a0=1.5, b0=0.8, refinements=4)
    assert a > b
    assert 1.3 < a < 1.9
    assert 0.5 < b < 0.9
    spec = RotationalBodySpec("ball")
    lam_ball = axisym_eig(spec, default_params(spec.mesh(4), 5.0), 4).lam_plain
    assert lam < lam_ball
