"""Hyperbolic gluing equations, spinning and holonomy for closed triangulated 3-manifolds."""
