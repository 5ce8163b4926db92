"""Streaming clustering-coefficient estimation with naive edge sampling."""
from .graph import Graph
from .ingest import parse_edge_list, shuffle_stream, file_order_stream, EdgeStream, IngestReport
from .oracle import ExactStats, exact_stats
from .stream import NesConfig, NesState, NesStream, run_stream, FastNes
from .estimators import EstimateReport, estimate_report

__version__ = "0.1.0"

__all__ = [
    "Graph", "parse_edge_list", "shuffle_stream", "file_order_stream", "EdgeStream",
    "IngestReport", "ExactStats", "exact_stats", "NesConfig", "NesState", "NesStream",
    "run_stream", "FastNes", "EstimateReport", "estimate_report",
]
