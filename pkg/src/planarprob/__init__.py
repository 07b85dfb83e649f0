"""Planar-algebra combinatorics and the random-matrix models that realize them."""

from .diagrams import TLDiagram, TLElement, cup, cupcup, enumerate_tl, nested_cup, parse_diagram
from .errors import ResourceLimitError, ValidationError
from .graphs import BipartiteGraph, GraphElement, load_graph, pf_eigen, tl_to_graph
from .maps import (PotentialTerm, TruncatedSeries, gibbs_series, nc_partition_moments,
                   on_model_series)
from .poly import PolyElement, embed_tl, parse_poly
from .scalars import LaurentPoly, delta_eval
from .tangles import adjoint, boxtimes, eps, gram_matrix, include, parse_tl_element, trace_tl, wedge

__all__ = [
    "BipartiteGraph", "GraphElement", "LaurentPoly", "PolyElement", "PotentialTerm",
    "ResourceLimitError", "TLDiagram", "TLElement", "TruncatedSeries", "ValidationError",
    "adjoint", "boxtimes", "cup", "cupcup", "delta_eval", "embed_tl", "enumerate_tl", "eps",
    "gibbs_series", "gram_matrix", "include", "load_graph", "nc_partition_moments",
    "nested_cup", "on_model_series", "parse_diagram", "parse_poly", "parse_tl_element",
    "pf_eigen", "tl_to_graph", "trace_tl", "wedge",
]
