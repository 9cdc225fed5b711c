"""Top-k sequential pattern mining on database graphs."""

__version__ = "0.1.0"

from .baseline import enumerate_paths, exact_frequency, exact_topk, induce_sequences
from .errors import (
    DGSPError,
    GraphFormatError,
    GraphValidationError,
    NoPathError,
    RejectionBudgetExceeded,
)
from .eval import (
    BoundInputs,
    average_precision,
    estimate_a,
    mean_estimation_error,
    ranking_similarity,
    sample_size_bound,
)
from .gen import DbSizeRule, GenConfig, generate
from .graph import DatabaseGraph, compute_weights, distance, dump_graph, load_graph, read_graph
from .miner import EstimatorState, estimate_frequency, mine_topk
from .patterns import RankedPatterns, contains, make_pattern
from .sampler import SampleBatch, sample_batch, sample_path, sample_transaction_sequence
