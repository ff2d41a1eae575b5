"""Train coordinate MLPs on images and prune them (edge, uniform, importance, coreset)."""

from ._core import (
    ArchSpec,
    ContractError,
    DegenerateDistribution,
    InvalidArgument,
    IoError,
    Model,
    ParseError,
    ShapeError,
    Strategy,
    cmd_eval,
    cmd_experiment,
    cmd_prune,
    cmd_retrain,
    cmd_train,
    compute_importance,
    coreset_probabilities,
    decode_checkpoint,
    encode_checkpoint,
    init_model,
    load_checkpoint,
    load_ppm,
    mse,
    positional_encode,
    predict,
    prune_edges,
    prune_model,
    psnr,
    render,
    save_checkpoint,
    save_ppm,
    train,
)

__all__ = [name for name in dir() if not name.startswith("_")]
