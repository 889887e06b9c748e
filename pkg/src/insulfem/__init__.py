"""Finite-element computation of optimally insulating films.

Nonlinear eigenvalue problems for insulated heat-conducting bodies: a
regularized semi-implicit gradient flow for the eigenfunctions, film
thickness extraction, linear reference eigenvalues, and shape optimization
in 2-D and for axisymmetric rotational bodies.
"""

__version__ = "0.1.0"
