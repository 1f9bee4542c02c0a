"""Train-track analysis of free-group outer automorphisms.

Detects full irreducibility obstructions and certificates through train-track
verification, exact transition-matrix dynamics, Whitehead graph connectivity,
vertex blow-ups, Stallings cores, and bounded lamination carriage checks.
"""

from .words import Automorphism, Word, conjugate_equal, parse_automorphism
from .graphs import Graph, GraphMap, rose, rose_representative
from .traintrack import (
    is_train_track,
    transition_matrix,
    is_irreducible,
    primitive_exponent,
    is_expanding,
)
from .whitehead import whitehead_graph, is_clean, is_weakly_clean
from .blowup import blow_up, verify_reduction, invariant_subgraph_witness
from .subgroups import stallings_core, core_of_words, is_finite_index, leaf_segments, carries_segments
from .decide import AnalysisOptions, analyze, search_periodic_conjugacy

__all__ = [
    "Automorphism",
    "Word",
    "conjugate_equal",
    "parse_automorphism",
    "Graph",
    "GraphMap",
    "rose",
    "rose_representative",
    "is_train_track",
    "transition_matrix",
    "is_irreducible",
    "primitive_exponent",
    "is_expanding",
    "whitehead_graph",
    "is_clean",
    "is_weakly_clean",
    "blow_up",
    "verify_reduction",
    "invariant_subgraph_witness",
    "stallings_core",
    "core_of_words",
    "is_finite_index",
    "leaf_segments",
    "carries_segments",
    "AnalysisOptions",
    "analyze",
    "search_periodic_conjugacy",
]

__version__ = "0.1.0"
