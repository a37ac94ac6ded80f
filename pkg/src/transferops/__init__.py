"""transferops: exact transfer-operator calculus on graph diagonal algebras
and positive maps on finite point sets."""

__version__ = "0.1.0"

from .diagonal import DiagElement
from .graphs import Graph, Path, WeightSystem, load_graph, load_graph_file, shift
from .cpmaps import PositiveMapMatrix

__all__ = [
    "DiagElement",
    "Graph",
    "Path",
    "PositiveMapMatrix",
    "WeightSystem",
    "load_graph",
    "load_graph_file",
    "shift",
    "__version__",
]
