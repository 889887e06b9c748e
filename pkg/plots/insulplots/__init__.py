"""Figure rendering for insulfem output files.

Consumes only the documented interchange formats (legacy-ASCII VTK fields,
thickness/sweep CSVs) and renders four figure kinds: eigenfunction fields
with the insulating film drawn as a boundary band, rotational-body
profiles, eigenvalue-versus-mass curves, and ellipsoid sweep curves.
"""

__version__ = "0.1.0"
