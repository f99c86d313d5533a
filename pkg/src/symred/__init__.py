"""Symmetry-reduced holonomies, invariant connections and reduced measures on R^3 x SU(2)."""

from . import bohrspace, curvealg, invconn, rbarspace, redhom, redmeasure, su2core, transport

__all__ = ["bohrspace", "curvealg", "invconn", "rbarspace", "redhom", "redmeasure", "su2core", "transport"]
__version__ = "0.1.0"
