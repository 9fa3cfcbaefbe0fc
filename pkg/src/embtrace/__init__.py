"""Per-point quality measures for 2D embeddings of high-dimensional data."""

from .arrays import read_array, write_array
from .errors import (
    ArrayFormatError,
    ManifestError,
    NonFiniteError,
    ParameterError,
    ShapeMismatchError,
    TraceError,
)
from .metrics import (
    AnchorSet,
    TripletSampler,
    distance_rank_correlation,
    hd_distances_to_point,
    hd_neighbor_union,
    neighborhood_preservation,
    point_stability,
    spearman_rho,
    triplet_accuracy,
)
from .model import DatasetBundle, Embedding, Manifest, MetadataColumn, MetricColumn, load_bundle
from .neighbors import NeighborGraph, build_approx_knn, build_exact_knn, knn_recall
from .pipeline import PrecomputeConfig, precompute, status

__version__ = "0.1.0"

__all__ = [
    "AnchorSet",
    "ArrayFormatError",
    "DatasetBundle",
    "Embedding",
    "Manifest",
    "ManifestError",
    "MetadataColumn",
    "MetricColumn",
    "NeighborGraph",
    "NonFiniteError",
    "ParameterError",
    "PrecomputeConfig",
    "ShapeMismatchError",
    "TraceError",
    "TripletSampler",
    "build_approx_knn",
    "build_exact_knn",
    "distance_rank_correlation",
    "hd_distances_to_point",
    "hd_neighbor_union",
    "knn_recall",
    "load_bundle",
    "neighborhood_preservation",
    "point_stability",
    "precompute",
    "read_array",
    "spearman_rho",
    "status",
    "triplet_accuracy",
    "write_array",
]
