"""Separator-tree A* heuristics for road networks."""
from ._accel import numba_enabled, set_numba, use_numba
from .errors import (
    BadMagicError, ChecksumError, GraphParseError, IndexFormatError, SeptreeError,
    StaleIndexError, StructuralError, TruncatedIndexError, UnsupportedVersionError, ValidationError,
)
from .graph import (
    BoundingBox, GraphFingerprint, RoadGraph, bounding_box, euclidean_distance, generate_synthetic,
    is_connected, largest_connected_component, load_dimacs, load_dimacs_files, write_dimacs,
)
from .index import (
    AxisLabels, GshIndex, LshIndex, Separation, build_axis_labels, build_gsh_index, build_lsh_index,
    gsh_evaluate, lsh_evaluate, separation_diagnostics,
)
from .index_io import dump_json, index_to_json, load_index, save_index
from .search import (
    ExactHeuristic, Heuristic, LabelHeuristic, PathResult, QueryStats, ZeroHeuristic, astar,
    astar_generic, dijkstra_all, multi_source_dijkstra, shortest_distance,
)
from .separator import Axis, AxisLine, SeparatorCut, build_cut, cut_edges

__version__ = "0.1.0"
