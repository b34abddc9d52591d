"""Directed link-stream analytics for coupled certification and
transaction ledgers."""

from .stream_core import (
    BinnedSeries,
    InducedGraph,
    Link,
    LinkStream,
    NodeClass,
    NodeClassification,
    NodeTable,
    activity,
    activity_series,
    build_stream,
    induced_graph,
    rolling_sum,
    substream_by_class,
)

__version__ = "0.1.0"

__all__ = [
    "BinnedSeries",
    "InducedGraph",
    "Link",
    "LinkStream",
    "NodeClass",
    "NodeClassification",
    "NodeTable",
    "activity",
    "activity_series",
    "build_stream",
    "induced_graph",
    "rolling_sum",
    "substream_by_class",
]
