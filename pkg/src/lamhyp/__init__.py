"""Numerical toolkit for lambda-hypersurfaces ``H - <x, n>/2 = lambda``.

Modules
-------
canonical
    Spheres, cylinders and hyperplanes solving the equation; gap thresholds.
curvegeom
    Closed polygonal plane curves and their discrete differential geometry.
weightedcalc
    Gaussian-weighted operators and identity checks on curves.
lambdaode
    Curvature ODE of convex lambda-curves, period function, closed curves.
flow
    Rescaled mean curvature flow of plane curves.
surfint
    Curvature integrals over closed parametrized surfaces.
"""

from .report import WeightedReport

__all__ = ["WeightedReport"]
__version__ = "0.1.0"
