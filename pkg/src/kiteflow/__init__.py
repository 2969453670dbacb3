"""Circle patterns with prescribed combinatorics and intersection angles.

Submodules: bquad (quad complexes and labellings), kernel (half-angle
function family and kite geometry), euclid (Euclidean radius solver),
hyper (hyperbolic functional and solver), layout (plane realization and
SVG), dcmap (discrete conformal maps), network (conductances, resistance,
vertex extremal length), harness (convergence and rigidity experiments),
cli (command-line front end).
"""

__version__ = "0.1.0"
