"""Learning-graph toolkit: gadgets, compositions, witnesses, cost models."""

from .model import (
    BooleanFunction,
    Edge,
    GraphBuilder,
    LearningGraph,
    StageInfo,
    SuperEdge,
    Vertex,
)
from .complexity import ComplexityReport, complexity, graph_c0, graph_c1
from .expand import expand
from .validate import ValidationReport, validate

__all__ = [
    "BooleanFunction",
    "ComplexityReport",
    "Edge",
    "GraphBuilder",
    "LearningGraph",
    "StageInfo",
    "SuperEdge",
    "ValidationReport",
    "Vertex",
    "complexity",
    "expand",
    "graph_c0",
    "graph_c1",
    "validate",
]
