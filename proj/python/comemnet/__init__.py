"""Continual traffic forecasting: drift-aware node sampling, temporal memory
and the dual-branch trainer, backed by the native core."""

import json as _json

from comemnet._core import (
    drift_score,
    histogram_bins,
    memory_delta,
    normalize_features,
    topk_nodes,
    two_hop_nodes,
)
from comemnet import _core

__all__ = [
    "drift_score",
    "generate_dataset",
    "histogram_bins",
    "ingest_summary",
    "memory_delta",
    "normalize_features",
    "run_training",
    "select_nodes",
    "topk_nodes",
    "two_hop_nodes",
]


def select_nodes(prev_ids, scores, cur_ids, rho):
    """Top-M drifted old nodes unioned with the new nodes, as a dict."""
    return _json.loads(_core.select_nodes_json(list(prev_ids), list(scores), list(cur_ids), rho))


def generate_dataset(out_dir, periods=3, initial_nodes=40, growth=10,
                     drift_fraction=0.1, days=7, seed=7):
    """Write a synthetic growing-network dataset; returns per-period info."""
    return _json.loads(_core.generate_dataset_json(
        str(out_dir), periods, initial_nodes, growth, drift_fraction, days, seed))


def ingest_summary(manifest_path):
    """Validate and load a dataset manifest; returns per-period split sizes."""
    return _json.loads(_core.ingest_summary_json(str(manifest_path)))


def run_training(manifest_path, config=None, variant="comemnet", forgetting=False):
    """Run the continual loop over every period in the manifest.

    `config` is a dict of training options (unknown keys are rejected).
    Returns run id, per-period metrics rows, summaries with sampler reports,
    and forgetting cells when requested.
    """
    cfg = _json.dumps(config or {})
    return _json.loads(_core.run_training_json(str(manifest_path), cfg, variant, forgetting))
