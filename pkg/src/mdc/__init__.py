"""Dual complexes of spaces of stable maps in genus zero and one.

Builds the virtual dual complex over stable ``(g, n, d)``-graphs and the
genus-one dual complex over radially aligned graphs as symmetric
Delta-complexes, computes their rational homology exactly, and checks the
straight-line retraction and the genus-one embedding on sampled points.
"""

from mdc.complex import (
    SymmetricDeltaComplex,
    betti,
    build_genus1_complex,
    build_virtual_complex,
    chain_complex,
    euler_characteristic,
)
from mdc.enumeration import EnumerationRequest, GraphCatalog, aligned_graphs, stable_graphs
from mdc.errors import BudgetExceeded, DomainError, MDCError, StructureError
from mdc.genus_one import AlignedGraph, enumerate_alignments, in_tilde_category, radial_merge
from mdc.graph import DecoratedGraph, automorphisms, canonical_form, contract_edge, is_stable, sprout
from mdc.retract import DualPoint, MetricPoint, embed_dual, flow, in_Z, project_to_dual
from mdc.tangent import RootTuple, fiber_witness, has_nonvanishing_dependency

__version__ = "0.1.0"

__all__ = [
    "AlignedGraph",
    "BudgetExceeded",
    "DecoratedGraph",
    "DomainError",
    "DualPoint",
    "EnumerationRequest",
    "GraphCatalog",
    "MDCError",
    "MetricPoint",
    "RootTuple",
    "StructureError",
    "SymmetricDeltaComplex",
    "aligned_graphs",
    "automorphisms",
    "betti",
    "build_genus1_complex",
    "build_virtual_complex",
    "canonical_form",
    "chain_complex",
    "contract_edge",
    "embed_dual",
    "enumerate_alignments",
    "euler_characteristic",
    "fiber_witness",
    "flow",
    "has_nonvanishing_dependency",
    "in_Z",
    "in_tilde_category",
    "is_stable",
    "project_to_dual",
    "radial_merge",
    "sprout",
    "stable_graphs",
]
