"""Simplicial-complex toolkit for self-organizing cellular networks.

Networks are modelled as node sets in a square, lifted to Vietoris-Rips or
Cech complexes.  Betti numbers beta0/beta1 over GF(2) drive three planners:
frequency auto-planning, coverage-preserving energy conservation, and
disaster recovery with repulsive (determinantal) node placement.
"""

from .geometry import (
    NodeSet,
    Point,
    assign_radii_uniform,
    make_boundary,
    min_enclosing_ball_radius,
    perturb_gaussian,
    sample_poisson,
)
from .complexes import (
    SimplicialComplex,
    cech,
    delete_vertex,
    maximal_simplices,
    restrict,
    rips_from_disks,
    rips_from_neighbors,
)
from .homology import BettiPair, beta0_unionfind, betti, boundary_matrix, rank_gf2
from .reduction import degrees, indices, reduce_complex, reduce_with_guards

__all__ = [
    "NodeSet", "Point", "assign_radii_uniform", "make_boundary",
    "min_enclosing_ball_radius", "perturb_gaussian", "sample_poisson",
    "SimplicialComplex", "cech", "delete_vertex", "maximal_simplices",
    "restrict", "rips_from_disks", "rips_from_neighbors",
    "BettiPair", "beta0_unionfind", "betti", "boundary_matrix", "rank_gf2",
    "degrees", "indices", "reduce_complex", "reduce_with_guards",
]

__version__ = "0.1.0"
