"""Mass partitions of weighted point sets.

Solvers for bisections by cones and double wedges, equipartitions by fans,
projective ham-sandwich cuts and parallel-slab partitions, with topological
runtime certificates (winding numbers, sphere map degrees, antipodality and
equivariance checks).
"""

from . import (errors, geometry, jsonio, masses, regions, solvers, testmaps,
               topology)

__all__ = ["errors", "geometry", "jsonio", "masses", "regions", "solvers",
           "testmaps", "topology"]
__version__ = "0.1.0"
