"""Exact lattice combinatorics of Mumford degenerations of abelian varieties."""

from .delaunay import delaunay, same_delaunay, voronoi_cell
from .errors import Refusal, ValidationError
from .matroid import Graph, MatroidRep, cographic_rep, is_unimodular, matroidal_cone, r10
from .monodromy import (
    SymplecticLattice, graph_monodromy, graph_vanishing_forms, monodromy_forms,
    picard_lefschetz, unipotent_from_forms, weight_filtration,
)
from .mumford import (
    MumfordData, classify_singularities, dual_complex, is_K_trivial, is_smooth,
    load_data, recover_arrangement, stratification,
)
from .plsection import (
    HyperplaneTerm, PLSection, bending_locus, is_dicing, pl_from_form, shifted_matroidal_arrangement,
)
from .resolve import ResolutionPlan, monomial_base_change, resolve
from .svg import data_svg, emit_svg
from .theta import central_fiber_relations, theta_expand, theta_multiply, theta_product

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "HyperplaneTerm",
    "MatroidRep",
    "MumfordData",
    "PLSection",
    "Refusal",
    "ResolutionPlan",
    "SymplecticLattice",
    "ValidationError",
    "bending_locus",
    "central_fiber_relations",
    "classify_singularities",
    "cographic_rep",
    "data_svg",
    "delaunay",
    "dual_complex",
    "emit_svg",
    "graph_monodromy",
    "graph_vanishing_forms",
    "is_K_trivial",
    "is_dicing",
    "is_smooth",
    "is_unimodular",
    "load_data",
    "matroidal_cone",
    "monodromy_forms",
    "monomial_base_change",
    "picard_lefschetz",
    "pl_from_form",
    "r10",
    "recover_arrangement",
    "resolve",
    "same_delaunay",
    "shifted_matroidal_arrangement",
    "stratification",
    "theta_expand",
    "theta_multiply",
    "theta_product",
    "unipotent_from_forms",
    "voronoi_cell",
    "weight_filtration",
]
