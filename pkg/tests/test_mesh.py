import numpy as np
import pytest

from insulfem import mesh as meshmod
from insulfem.errors import DegenerateElement
from insulfem.mesh import (OUTER, SYMMETRY_AXIS, deform, load_mesh, make_disk,
                           make_half_profile, make_square, measures, refine,
                           save_mesh, validate)


def polygon_area(n_sides):
    # area of the regular n-gon inscribed in the unit circle
    return 0.5 * n_sides * np.sin(2.0 * np.pi / n_sides)


def test_disk_triangle_counts():
    assert make_disk(0).num_triangles == 4
    assert make_disk(4).num_triangles == 1024
    assert make_disk(5).num_triangles == 4096


def test_disk_base_boundary_on_circle():
    mesh = make_disk(0)
    boundary = np.unique(mesh.boundary_edges)
    radii = np.linalg.norm(mesh.nodes[boundary], axis=1)
    assert radii == pytest.approx(1.0)


def test_disk_area_matches_inscribed_polygon():
    mesh = make_disk(5)
    area, perimeter = measures(mesh)
    n_sides = 4 * 2 ** 5
    assert area == pytest.approx(polygon_area(n_sides), rel=1e-12)
    assert area == pytest.approx(np.pi, rel=1e-3)
    assert perimeter == pytest.approx(n_sides * 2 * np.sin(np.pi / n_sides),
                                      rel=1e-12)


def test_square_counts_and_area():
    mesh = make_square(0)
    assert mesh.num_triangles == 2
    assert mesh.num_nodes == 4
    mesh4 = make_square(4)
    assert mesh4.num_triangles == 512
    assert mesh4.num_nodes == 289
    for k in range(4):
        assert measures(make_square(k)) == (1.0, 4.0)


def test_half_profile_radii():
    ball = make_half_profile("ball", 0)
    ell1 = make_half_profile("ellipsoid", 0, a=1.0)
    assert np.allclose(ball.nodes, ell1.nodes)
    both1 = make_half_profile("half_ellipsoids", 0, a=1.0, b=1.0)
    assert np.allclose(ball.nodes, both1.nodes)
    ell = make_half_profile("ellipsoid", 0, a=1.225)
    assert ell.nodes[:, 1].max() == pytest.approx(1.225 ** -0.5)
    assert ell.axisymmetric


def test_half_profile_rejects_bad_axes():
    with pytest.raises(ValueError):
        make_half_profile("ellipsoid", 0, a=-1.0)
    with pytest.raises(ValueError):
        make_half_profile("half_ellipsoids", 0, a=1.0, b=0.0)
    with pytest.raises(ValueError):
        make_half_profile("egg", 0)


def test_refine_counts_and_projection():
    assert refine(make_disk(0)).num_triangles == 16
    sq = refine(make_square(1))
    boundary = np.unique(sq.boundary_edges)
    pts = sq.nodes[boundary]
    on_edge = ((np.abs(pts) < 1e-15) | (np.abs(pts - 1.0) < 1e-15)).any(axis=1)
    assert on_edge.all()

    hp = refine(make_half_profile("ball", 1))
    axis_edges = hp.boundary_edges[hp.boundary_markers == SYMMETRY_AXIS]
    assert (hp.nodes[np.unique(axis_edges), 1] == 0.0).all()
    outer = np.unique(hp.boundary_edges[hp.boundary_markers == OUTER])
    assert np.linalg.norm(hp.nodes[outer], axis=1) == pytest.approx(1.0)


def test_refine_interior_nodes_are_midpoints():
    mesh = make_square(2)
    fine = refine(mesh)
    # parent nodes keep their positions; each triangle's children tile it
    assert np.allclose(fine.nodes[:mesh.num_nodes], mesh.nodes)
    assert fine.signed_areas().sum() == pytest.approx(
        mesh.signed_areas().sum())
    child_areas = fine.signed_areas().reshape(4, -1)
    assert np.allclose(child_areas, mesh.signed_areas() / 4.0)


def test_all_constructions_validate():
    for mesh in (make_disk(3), make_square(3),
                 make_half_profile("ball", 3),
                 make_half_profile("half_ellipsoids", 3, a=1.5, b=0.7)):
        validate(mesh)
        assert (mesh.signed_areas() > 0).all()


def test_boundary_chain_closed_in_2d():
    mesh = make_disk(3)
    outer = mesh.outer_edges()
    counts = np.bincount(outer.ravel(), minlength=mesh.num_nodes)
    touched = counts[counts > 0]
    assert (touched == 2).all()


def test_deform_identity_and_translation():
    mesh = make_disk(2)
    same = deform(mesh, np.zeros_like(mesh.nodes))
    assert np.array_equal(same.nodes, mesh.nodes)
    shifted = deform(mesh, np.ones_like(mesh.nodes), scale=2.5)
    assert np.allclose(shifted.signed_areas(), mesh.signed_areas())


def test_deform_scaling_multiplies_areas():
    mesh = make_square(2)
    s = 0.3
    scaled = deform(mesh, mesh.nodes, scale=s)
    assert np.allclose(scaled.signed_areas(),
                       (1.0 + s) ** 2 * mesh.signed_areas())


def test_deform_rejects_inverted_elements():
    mesh = make_square(1)
    with pytest.raises(DegenerateElement):
        deform(mesh, -mesh.nodes, scale=1.0)  # collapses to the origin


def test_measures_axisymmetric_half_disk():
    mesh = make_half_profile("ball", 5)
    volume, surface = measures(mesh)
    assert volume == pytest.approx(4.0 * np.pi / 3.0, rel=2e-3)
    assert surface == pytest.approx(4.0 * np.pi, rel=2e-3)


def test_mesh_size_halves_under_refinement():
    mesh = make_square(1)
    assert refine(mesh).mesh_size() == pytest.approx(mesh.mesh_size() / 2)


def test_text_format_roundtrip(tmp_path):
    mesh = make_half_profile("half_ellipsoids", 2, a=1.3, b=0.8)
    path = tmp_path / "mesh.txt"
    save_mesh(path, mesh)
    back = load_mesh(path, axisymmetric=True)
    assert np.array_equal(back.nodes, mesh.nodes)
    assert np.array_equal(back.triangles, mesh.triangles)
    assert np.array_equal(back.boundary_edges, mesh.boundary_edges)
    assert list(back.boundary_markers) == list(mesh.boundary_markers)
    validate(back)
