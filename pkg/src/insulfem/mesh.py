"""Triangulations of the computational domains.

Planar meshes (disk, square) and axisymmetric half-profiles (ball,
ellipsoids, assembled half-ellipsoids) share one representation: nodes,
counterclockwise triangles, and a directed boundary-edge list that keeps the
domain on its left. Axisymmetric profiles live in (x, r) coordinates with
the rotation axis on r = 0; edges on the axis are marked separately because
they are interior to the three-dimensional body.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateElement

OUTER = "outer"
SYMMETRY_AXIS = "symmetry_axis"


@dataclass(frozen=True)
class EllipseProfile:
    """Piecewise elliptic outer boundary: semi-axis a for x <= 0, b for
    x >= 0, shared transverse radius r. The unit circle is (1, 1, 1)."""

    a: float
    b: float
    r: float

    def project(self, points):
        """Componentwise-scaled radial projection onto the curve."""
        points = np.asarray(points, dtype=np.float64)
        axis = np.where(points[:, 0] >= 0.0, self.b, self.a)
        scale = np.hypot(points[:, 0] / axis, points[:, 1] / self.r)
        return points / scale[:, None]


@dataclass(frozen=True)
class Mesh:
    nodes: np.ndarray             # (n, 2) float64
    triangles: np.ndarray         # (m, 3) int64, counterclockwise
    boundary_edges: np.ndarray    # (b, 2) int64, domain on the left
    boundary_markers: np.ndarray  # (b,) str, OUTER or SYMMETRY_AXIS
    axisymmetric: bool = False
    curve: EllipseProfile | None = None

    @property
    def num_nodes(self):
        return self.nodes.shape[0]

    @property
    def num_triangles(self):
        return self.triangles.shape[0]

    def signed_areas(self):
        p = self.nodes[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def edge_lengths(self):
        """Lengths of all triangle edges (with repetitions)."""
        p = self.nodes[self.triangles]
        out = []
        for i, j in ((0, 1), (1, 2), (2, 0)):
            out.append(np.linalg.norm(p[:, i] - p[:, j], axis=1))
        return np.concatenate(out)

    def mesh_size(self):
        """h, the maximal edge length."""
        return float(self.edge_lengths().max())

    def outer_edges(self):
        return self.boundary_edges[self.boundary_markers == OUTER]


def _mesh(nodes, triangles, edges, markers, axisymmetric=False, curve=None):
    return Mesh(
        nodes=np.asarray(nodes, dtype=np.float64),
        triangles=np.asarray(triangles, dtype=np.int64),
        boundary_edges=np.asarray(edges, dtype=np.int64).reshape(-1, 2),
        boundary_markers=np.asarray(markers, dtype=object),
        axisymmetric=axisymmetric,
        curve=curve,
    )


def make_disk(refinements):
    """Unit disk from a 4-triangle fan (origin plus 4 circle points), red
    refined with radial projection of new boundary nodes."""
    if refinements < 0:
        raise ValueError("refinements must be >= 0")
    nodes = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]
    triangles = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 1)]
    edges = [(1, 2), (2, 3), (3, 4), (4, 1)]
    markers = [OUTER] * 4
    mesh = _mesh(nodes, triangles, edges, markers,
                 curve=EllipseProfile(1.0, 1.0, 1.0))
    for _ in range(refinements):
        mesh = refine(mesh)
    return mesh


def make_square(refinements):
    """Unit square split into 2 triangles, red refined; area is exact."""
    if refinements < 0:
        raise ValueError("refinements must be >= 0")
    nodes = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    triangles = [(0, 1, 2), (0, 2, 3)]
    edges = [(0, 1), (1, 2), (2, 3), (3, 0)]
    markers = [OUTER] * 4
    mesh = _mesh(nodes, triangles, edges, markers)
    for _ in range(refinements):
        mesh = refine(mesh)
    return mesh


def make_half_profile(kind, refinements, a=1.0, b=None):
    """Generating half-domain of a rotational body in (x, r) coordinates.

    kind "ball": half-disk of radius 1. kind "ellipsoid": half-ellipse with
    semi-axes (a, a**-0.5) so the solid keeps the unit-ball volume. kind
    "half_ellipsoids": left half-ellipse with semi-axis a, right with b,
    shared radius (2 / (a + b))**0.5. The segment on r = 0 carries the
    symmetry-axis marker; the curved arc is the outer boundary.
    """
    if kind == "ball":
        left = right = 1.0
    elif kind == "ellipsoid":
        if a <= 0:
            raise ValueError("semi-axis a must be positive")
        left = right = float(a)
    elif kind == "half_ellipsoids":
        if b is None:
            raise ValueError("half_ellipsoids needs both a and b")
        if a <= 0 or b <= 0:
            raise ValueError("semi-axes must be positive")
        left, right = float(a), float(b)
    else:
        raise ValueError(f"unknown profile kind {kind!r}")
    r = (2.0 / (left + right)) ** 0.5

    s = 0.5 ** 0.5
    nodes = [
        (0.0, 0.0),
        (right, 0.0),
        (right * s, r * s),
        (0.0, r),
        (-left * s, r * s),
        (-left, 0.0),
    ]
    triangles = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5)]
    edges = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 1)]
    markers = [OUTER] * 4 + [SYMMETRY_AXIS] * 2
    mesh = _mesh(nodes, triangles, edges, markers, axisymmetric=True,
                 curve=EllipseProfile(left, right, r))
    for _ in range(refinements):
        mesh = refine(mesh)
    return mesh


def refine(mesh):
    """Uniform red refinement; new outer-boundary nodes are projected onto
    the analytic curve when the mesh carries one."""
    tri = mesh.triangles
    n_old = mesh.num_nodes

    pairs = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
    pairs_sorted = np.sort(pairs, axis=1)
    edges, inverse = np.unique(pairs_sorted, axis=0, return_inverse=True)
    mid_of = n_old + inverse.reshape(3, -1)  # per (slot, triangle)

    midpoints = 0.5 * (mesh.nodes[edges[:, 0]] + mesh.nodes[edges[:, 1]])
    nodes = np.vstack([mesh.nodes, midpoints])

    m01, m12, m20 = mid_of
    v0, v1, v2 = tri[:, 0], tri[:, 1], tri[:, 2]
    children = np.concatenate([
        np.stack([v0, m01, m20], axis=1),
        np.stack([v1, m12, m01], axis=1),
        np.stack([v2, m20, m12], axis=1),
        np.stack([m01, m12, m20], axis=1),
    ])

    # boundary edges split in place, keeping direction and marker
    be = mesh.boundary_edges
    be_sorted = np.sort(be, axis=1)
    locate = {tuple(e): k for k, e in enumerate(edges.tolist())}
    be_mid = np.array([n_old + locate[tuple(e)] for e in be_sorted.tolist()],
                      dtype=np.int64)
    new_edges = np.concatenate([
        np.stack([be[:, 0], be_mid], axis=1),
        np.stack([be_mid, be[:, 1]], axis=1),
    ])
    new_markers = np.concatenate([mesh.boundary_markers, mesh.boundary_markers])

    if mesh.curve is not None:
        outer_mid = np.unique(be_mid[mesh.boundary_markers == OUTER])
        nodes[outer_mid] = mesh.curve.project(nodes[outer_mid])

    refined = replace(mesh, nodes=nodes, triangles=children,
                      boundary_edges=new_edges, boundary_markers=new_markers)
    if np.any(refined.signed_areas() <= 0.0):
        raise DegenerateElement("refinement produced a nonpositive area")
    return refined


def deform(mesh, displacement, scale=1.0):
    """Move every node by scale * displacement; rejects degenerate results.

    Raises DegenerateElement when any signed area becomes <= 0, signalling
    that the caller's step size is too large. The analytic boundary curve is
    dropped, the deformed shape is no longer described by it.
    """
    displacement = np.asarray(displacement, dtype=np.float64)
    if displacement.shape != mesh.nodes.shape:
        raise ValueError("displacement must be defined at every node")
    moved = replace(mesh, nodes=mesh.nodes + scale * displacement, curve=None)
    if np.any(moved.signed_areas() <= 0.0):
        raise DegenerateElement("deformation inverted a triangle")
    return moved


def measures(mesh):
    """(area, boundary length) for planar meshes; (volume, outer surface
    area) via the 2*pi*r centroid/midpoint weights for axisymmetric ones."""
    areas = mesh.signed_areas()
    outer = mesh.outer_edges()
    lengths = np.linalg.norm(mesh.nodes[outer[:, 1]] - mesh.nodes[outer[:, 0]],
                             axis=1)
    if not mesh.axisymmetric:
        return float(areas.sum()), float(lengths.sum())
    r_centroid = mesh.nodes[mesh.triangles, 1].mean(axis=1)
    r_mid = 0.5 * (mesh.nodes[outer[:, 0], 1] + mesh.nodes[outer[:, 1], 1])
    volume = float(2.0 * np.pi * (r_centroid * areas).sum())
    surface = float(2.0 * np.pi * (r_mid * lengths).sum())
    return volume, surface


def validate(mesh):
    """Check the structural invariants; raises ValueError on violation."""
    n = mesh.num_nodes
    if mesh.triangles.min(initial=0) < 0 or mesh.triangles.max(initial=-1) >= n:
        raise ValueError("triangle node index out of range")
    if mesh.boundary_edges.size and (mesh.boundary_edges.min() < 0
                                     or mesh.boundary_edges.max() >= n):
        raise ValueError("boundary edge node index out of range")
    if np.any(mesh.signed_areas() <= 0.0):
        raise ValueError("nonpositive triangle area")

    tri = mesh.triangles
    directed = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
    pairs_sorted = np.sort(directed, axis=1)
    uniq, counts = np.unique(pairs_sorted, axis=0, return_counts=True)
    boundary_set = {tuple(e) for e in uniq[counts == 1].tolist()}
    listed = {tuple(e) for e in np.sort(mesh.boundary_edges, axis=1).tolist()}
    if boundary_set != listed:
        raise ValueError("boundary_edges do not match single-triangle edges")

    directed_set = {tuple(e) for e in directed.tolist()}
    for i, j in mesh.boundary_edges.tolist():
        if (i, j) not in directed_set:
            raise ValueError("boundary edge oriented with domain on the right")

    if mesh.axisymmetric:
        if np.any(mesh.nodes[:, 1] < -1e-14):
            raise ValueError("axisymmetric mesh has nodes at r < 0")
        axis_edges = mesh.boundary_edges[mesh.boundary_markers == SYMMETRY_AXIS]
        if axis_edges.size:
            r = mesh.nodes[np.unique(axis_edges), 1]
            if np.any(np.abs(r) > 1e-14):
                raise ValueError("symmetry-axis edge off r = 0")
    return mesh


def save_mesh(path, mesh):
    """Plain-text format: "nodes N", N lines "x y"; "triangles M", M lines
    "i j k"; "boundary B", B lines "i j marker"."""
    with open(path, "w") as f:
        f.write(f"nodes {mesh.num_nodes}\n")
        for x, y in mesh.nodes:
            f.write(f"{x:.17g} {y:.17g}\n")
        f.write(f"triangles {mesh.num_triangles}\n")
        for i, j, k in mesh.triangles:
            f.write(f"{i} {j} {k}\n")
        f.write(f"boundary {mesh.boundary_edges.shape[0]}\n")
        for (i, j), marker in zip(mesh.boundary_edges, mesh.boundary_markers):
            f.write(f"{i} {j} {marker}\n")


def load_mesh(path, axisymmetric=False):
    with open(path) as f:
        tokens = f.read().split()
    pos = 0

    def expect(word):
        nonlocal pos
        if tokens[pos] != word:
            raise ValueError(f"expected {word!r} at token {pos}, got {tokens[pos]!r}")
        pos += 1
        count = int(tokens[pos])
        pos += 1
        return count

    n = expect("nodes")
    nodes = np.array(tokens[pos:pos + 2 * n], dtype=np.float64).reshape(n, 2)
    pos += 2 * n
    m = expect("triangles")
    triangles = np.array(tokens[pos:pos + 3 * m], dtype=np.int64).reshape(m, 3)
    pos += 3 * m
    b = expect("boundary")
    edges = np.empty((b, 2), dtype=np.int64)
    markers = np.empty(b, dtype=object)
    for k in range(b):
        edges[k, 0] = int(tokens[pos])
        edges[k, 1] = int(tokens[pos + 1])
        markers[k] = tokens[pos + 2]
        pos += 3
    return Mesh(nodes=nodes, triangles=triangles, boundary_edges=edges,
                boundary_markers=markers, axisymmetric=axisymmetric)
