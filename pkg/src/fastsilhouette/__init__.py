"""Linear-time Silhouette scores for squared Euclidean and cosine distance."""
from .core import (
    Dataset,
    PointScore,
    SilhouetteReport,
    ValidationError,
    assemble_score,
    finalize_report,
    validate_and_densify,
)
from .data_io import BlobSpec, CsvSchema, generate_blobs, read_csv, read_report, write_report
from .estimator import SilhouetteEvaluator, evaluate, silhouette_report, silhouette_samples, silhouette_score
from .naive import naive_silhouette, pairwise_distance
from .parallel import ShardPlan, plan_shards, run_two_phase

__version__ = "0.1.0"

__all__ = [
    "BlobSpec",
    "CsvSchema",
    "Dataset",
    "PointScore",
    "ShardPlan",
    "SilhouetteEvaluator",
    "SilhouetteReport",
    "ValidationError",
    "assemble_score",
    "evaluate",
    "finalize_report",
    "generate_blobs",
    "naive_silhouette",
    "pairwise_distance",
    "plan_shards",
    "read_csv",
    "read_report",
    "run_two_phase",
    "silhouette_report",
    "silhouette_samples",
    "silhouette_score",
    "validate_and_densify",
    "write_report",
]
