"""Python access to the wastebench core: features, classifiers, selection,
metrics and experiment plans."""

import json

import numpy as np

from . import _core
from ._core import (
    HANDCRAFTED_DIM,
    ConfigError,
    DecodeError,
    DegenerateInput,
    FormatError,
    InitError,
    IoError,
    LayoutError,
    Model,
    StratificationError,
    TrainingError,
    ValidationError,
    WastebenchError,
    block_layout,
    extract_image,
    focal_loss,
    read_matrix,
    set_worker_count,
    synth_image,
    write_matrix,
    write_synth_corpus,
)

__all__ = [
    "HANDCRAFTED_DIM",
    "ConfigError",
    "DecodeError",
    "DegenerateInput",
    "FormatError",
    "InitError",
    "IoError",
    "LayoutError",
    "Model",
    "StratificationError",
    "TrainingError",
    "ValidationError",
    "WastebenchError",
    "audit",
    "block_layout",
    "evaluate",
    "extract_image",
    "focal_loss",
    "rank_embedded",
    "read_matrix",
    "run_plan",
    "set_worker_count",
    "synth_image",
    "train",
    "write_matrix",
    "write_synth_corpus",
]


def _spec(model, **params):
    spec = {"family": model}
    spec.update(params)
    return json.dumps(spec)


def train(model, X, y, seed=0, class_count=0, **params):
    """Fit one classifier. `model` is a family name (logistic, knn, svm,
    dtree, rforest, gbdt); keyword arguments are its spec fields."""
    return _core.train(_spec(model, **params), np.asarray(X, dtype=float), np.asarray(y, dtype=np.int32), seed, class_count)


def rank_embedded(X, y, trees=200, seed=0):
    """Random-forest importance ranking as a dict (ranked_indices, scores, k)."""
    return json.loads(_core.rank_embedded(np.asarray(X, dtype=float), np.asarray(y, dtype=np.int32), trees, seed))


def evaluate(truth, pred, classes):
    """Confusion matrix with macro and weighted summaries, in percent."""
    return json.loads(_core.evaluate(np.asarray(truth, dtype=np.int32), np.asarray(pred, dtype=np.int32), classes))


def audit(X, y, folds=5, model="logistic", seed=0, **params):
    """Rows whose out-of-fold prediction disagrees with the label, as
    (row, stored, predicted, confidence), most confident first."""
    return _core.audit(np.asarray(X, dtype=float), np.asarray(y, dtype=np.int32), folds, _spec(model, **params), seed)


def run_plan(path):
    """Runs a plan file and returns the combined results CSV."""
    return _core.run_plan(str(path))
