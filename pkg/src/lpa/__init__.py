"""Invariants, classification and symbolic arithmetic for Leavitt path algebras.

Graphs are finite directed multigraphs (optionally with infinite edge bundles);
every ring-theoretic question is answered by the corresponding graph-theoretic
criterion, exactly and without floating point.
"""
from .graph import Graph, GraphError, ParseError, make_graph, parse_graph
from .zoo import by_name

__all__ = ["Graph", "GraphError", "ParseError", "by_name", "make_graph", "parse_graph"]
__version__ = "0.1.0"
