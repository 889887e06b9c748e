"""Legacy-ASCII VTK writer for triangulations with nodal scalar fields."""

from __future__ import annotations


def write_vtk(path, mesh, point_data=None, title="insulfem output"):
    """Unstructured-grid file with the mesh and optional per-node scalars.

    point_data maps field names to length-num_nodes arrays; fields are
    written as SCALARS in insertion order.
    """
    point_data = point_data or {}
    n = mesh.num_nodes
    m = mesh.num_triangles
    for name, values in point_data.items():
        if len(values) != n:
            raise ValueError(f"field {name!r} has {len(values)} values, "
                             f"expected {n}")
    with open(path, "w") as f:
        f.write("# vtk DataFile Version 2.0\n")
        f.write(f"{title}\n")
        f.write("ASCII\n")
        f.write("DATASET UNSTRUCTURED_GRID\n")
        f.write(f"POINTS {n} double\n")
        for x, y in mesh.nodes:
            f.write(f"{x:.12g} {y:.12g} 0\n")
        f.write(f"CELLS {m} {4 * m}\n")
        for i, j, k in mesh.triangles:
            f.write(f"3 {i} {j} {k}\n")
        f.write(f"CELL_TYPES {m}\n")
        for _ in range(m):
            f.write("5\n")
        if point_data:
            f.write(f"POINT_DATA {n}\n")
            for name, values in point_data.items():
                f.write(f"SCALARS {name} double 1\n")
                f.write("LOOKUP_TABLE default\n")
                for v in values:
                    f.write(f"{v:.12g}\n")
