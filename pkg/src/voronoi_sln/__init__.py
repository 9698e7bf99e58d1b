"""Voronoi complexes for SL_N(Z) and exact twisted-cohomology coranks."""

__version__ = "0.1.0"
