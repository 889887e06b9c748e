"""Parsers for the interchange files, with file/line diagnostics."""

from __future__ import annotations

import numpy as np


class ParseError(ValueError):
    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


def read_csv(path, expected_columns=None):
    """Header-checked numeric CSV; returns (header, float array)."""
    with open(path) as f:
        lines = f.read().splitlines()
    if not lines:
        raise ParseError(path, 1, "empty file")
    header = lines[0].split(",")
    if expected_columns is not None and header != list(expected_columns):
        raise ParseError(path, 1,
                         f"expected columns {list(expected_columns)}, "
                         f"got {header}")
    rows = []
    for k, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(header):
            raise ParseError(path, k, f"expected {len(header)} fields, "
                                      f"got {len(parts)}")
        try:
            rows.append([float(v) for v in parts])
        except ValueError as exc:
            raise ParseError(path, k, str(exc)) from None
    return header, np.array(rows)


def read_vtk(path):
    """Legacy-ASCII unstructured grid: points, triangles, point scalars.

    Returns (points (n, 2), triangles (m, 3), fields dict name -> array).
    Only the subset written by insulfem is understood.
    """
    with open(path) as f:
        lines = f.read().splitlines()

    def fail(k, message):
        raise ParseError(path, k + 1, message)

    k = 0

    def next_content():
        nonlocal k
        while k < len(lines) and not lines[k].strip():
            k += 1
        if k >= len(lines):
            fail(len(lines) - 1, "unexpected end of file")
        k += 1
        return lines[k - 1]

    if not next_content().startswith("# vtk DataFile"):
        fail(k - 1, "missing VTK header")
    next_content()  # title
    if next_content().strip() != "ASCII":
        fail(k - 1, "only ASCII files supported")
    if next_content().strip() != "DATASET UNSTRUCTURED_GRID":
        fail(k - 1, "only unstructured grids supported")

    header = next_content().split()
    if header[0] != "POINTS":
        fail(k - 1, f"expected POINTS, got {header[0]!r}")
    n = int(header[1])
    points = np.empty((n, 2))
    for i in range(n):
        parts = next_content().split()
        if len(parts) != 3:
            fail(k - 1, "point line must have 3 coordinates")
        points[i] = float(parts[0]), float(parts[1])

    header = next_content().split()
    if header[0] != "CELLS":
        fail(k - 1, f"expected CELLS, got {header[0]!r}")
    m = int(header[1])
    triangles = np.empty((m, 3), dtype=np.int64)
    for i in range(m):
        parts = next_content().split()
        if len(parts) != 4 or parts[0] != "3":
            fail(k - 1, "only triangle cells supported")
        triangles[i] = [int(v) for v in parts[1:]]

    header = next_content().split()
    if header[0] != "CELL_TYPES":
        fail(k - 1, f"expected CELL_TYPES, got {header[0]!r}")
    for _ in range(int(header[1])):
        if next_content().strip() != "5":
            fail(k - 1, "only triangle cell type 5 supported")

    fields = {}
    while k < len(lines):
        line = lines[k].strip()
        k += 1
        if not line:
            continue
        parts = line.split()
        if parts[0] == "POINT_DATA":
            if int(parts[1]) != n:
                fail(k - 1, "POINT_DATA count differs from POINTS")
            continue
        if parts[0] == "SCALARS":
            name = parts[1]
            table = next_content()
            if not table.startswith("LOOKUP_TABLE"):
                fail(k - 1, "expected LOOKUP_TABLE after SCALARS")
            values = np.empty(n)
            for i in range(n):
                values[i] = float(next_content())
            fields[name] = values
            continue
        fail(k - 1, f"unsupported section {parts[0]!r}")
    return points, triangles, fields
