"""Frequency queries on paths of node-colored trees.

Path mode, least frequent color, maximum weighted color and alpha-minority
queries, with brute-force reference answers for testing.
"""

from .kernels import BACKEND
from .minority import MinorityIndex
from .subtask_engine import Engine, PathQueries, PathStructure, QueryResult
from .tree_core import NONE, ColoredTree, TreeFormatError, make_tree, parse_tree

__all__ = [
    "BACKEND",
    "NONE",
    "ColoredTree",
    "Engine",
    "MinorityIndex",
    "PathQueries",
    "PathStructure",
    "QueryResult",
    "TreeFormatError",
    "make_tree",
    "parse_tree",
]
