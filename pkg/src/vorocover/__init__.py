"""Multi-agent 3D structure inspection simulator.

A team of double-integrator agents cooperatively inspects target points on
the surface of a 3D structure. Agents descend the coverage cost over a
Gaussian inspection density by moving to the mass centroids of their Voronoi
cells, repel from the structure through an inverse-distance barrier, and
share inspection progress with Voronoi neighbors in synchronous rounds.

The quadrature hot loops run on a compiled Cython kernel when built, with a
numpy fallback selected automatically at import (``_kernels.BACKEND``).
"""

from ._kernels import BACKEND as kernel_backend

__version__ = "0.1.0"

__all__ = ["kernel_backend", "__version__"]
