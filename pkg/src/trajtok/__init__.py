"""Discrete trajectory vocabularies for next-token behavior models.

Quick start::

    from trajtok import synthetic_dataset, flip_augment, build_vocabulary, encode

    data = flip_augment(synthetic_dataset(10_000, "vehicle", seed=0))
    vocab = build_vocabulary(data)          # Table-1 vehicle grid, k=5
    token_id = encode(vocab, data[0])
"""

from .codec import (
    SmoothingMode,
    SmoothingTargets,
    decode,
    encode,
    encode_points,
    smoothing_targets_spatial,
    smoothing_targets_uniform,
    token_distance,
)
from .config import KDisksConfig, TrajTokConfig
from .core import (
    TOKEN_LENGTH,
    AgentState,
    AgentType,
    NormalizedDataset,
    Pose,
    Trajectory,
    apply_token_global,
    flip_augment,
    flip_trajectory,
    normalize_to_agent_frame,
    wrap_angle,
)
from .grid import (
    Provenance,
    bin_endpoint,
    build_occupancy,
    build_vocabulary,
    classify_cells,
    default_grid,
    estimate_cell_yaw,
    interp_token,
    mean_token,
)
from .kdisks import build_kdisks_vocab
from .metrics import (
    EvalReport,
    evaluate,
    reconstruction_error,
    robustness_probe,
    symmetry_score,
    utilization,
)
from .synthetic import gen_synthetic, synthetic_dataset
from .vocab import GridSpec, TokenSource, TrajToken, Vocabulary, make_grid_spec

__version__ = "0.1.0"
