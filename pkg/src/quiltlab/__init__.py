"""quilt-lab: meander combinatorics, planar-map quilts, mating-of-trees
discretization, total-curvature computations, and lattice field rotation."""

__version__ = "0.1.0"
