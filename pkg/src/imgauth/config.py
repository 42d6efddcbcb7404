"""Pipeline configuration and its JSON file form.

One config drives every command: the detector knobs (including the
calibrated verdict threshold), the feature mode, and the training
hyperparameters. Files are plain JSON so a calibration run can rewrite the
threshold in place and humans can diff the result.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .detect import DetectorConfig
from .network import TrainConfig

FEATURE_MODES = ("raw400", "dct_lowfreq", "pca")
MATCHERS = ("network", "euclidean")


@dataclass(frozen=True)
class PipelineConfig:
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    feature_mode: str = "pca"
    pca_k: int = 30
    dct_k: int = 60
    target_side: int = 20
    hidden: int = 90
    train: TrainConfig = field(default_factory=TrainConfig)
    reject_below: float = 0.0
    matcher: str = "network"

    def __post_init__(self):
        if self.feature_mode not in FEATURE_MODES:
            raise ValueError(f"feature_mode must be one of {FEATURE_MODES}, got {self.feature_mode!r}")
        if self.matcher not in MATCHERS:
            raise ValueError(f"matcher must be one of {MATCHERS}, got {self.matcher!r}")
        if self.pca_k < 1 or self.dct_k < 1:
            raise ValueError("pca_k and dct_k must be positive")
        if self.target_side < 4:
            raise ValueError(f"target_side must be >= 4, got {self.target_side}")
        if self.hidden < 1:
            raise ValueError(f"hidden width must be positive, got {self.hidden}")
        if not 0.0 <= self.reject_below <= 1.0:
            raise ValueError(f"reject_below must be in [0, 1], got {self.reject_below}")

    def feature_length(self) -> int:
        if self.feature_mode == "raw400":
            return self.target_side * self.target_side
        if self.feature_mode == "dct_lowfreq":
            return self.dct_k
        return self.pca_k


def config_to_dict(cfg: PipelineConfig) -> dict:
    return {
        "detector": {
            "derivative_order": cfg.detector.derivative_order,
            "threshold": cfg.detector.threshold,
            "max_lag": cfg.detector.max_lag,
            "dc_exclusion_bins": cfg.detector.dc_exclusion_bins,
        },
        "feature_mode": cfg.feature_mode,
        "pca_k": cfg.pca_k,
        "dct_k": cfg.dct_k,
        "target_side": cfg.target_side,
        "hidden": cfg.hidden,
        "train": {
            "learning_rate": cfg.train.learning_rate,
            "momentum": cfg.train.momentum,
            "error_goal": cfg.train.error_goal,
            "max_epochs": cfg.train.max_epochs,
            "seed": cfg.train.seed,
        },
        "reject_below": cfg.reject_below,
        "matcher": cfg.matcher,
    }


def config_from_dict(doc: dict) -> PipelineConfig:
    base = PipelineConfig()
    det = doc.get("detector", {})
    trn = doc.get("train", {})
    return PipelineConfig(
        detector=DetectorConfig(
            derivative_order=int(det.get("derivative_order", base.detector.derivative_order)),
            threshold=float(det.get("threshold", base.detector.threshold)),
            max_lag=int(det.get("max_lag", base.detector.max_lag)),
            dc_exclusion_bins=int(det.get("dc_exclusion_bins", base.detector.dc_exclusion_bins)),
        ),
        feature_mode=doc.get("feature_mode", base.feature_mode),
        pca_k=int(doc.get("pca_k", base.pca_k)),
        dct_k=int(doc.get("dct_k", base.dct_k)),
        target_side=int(doc.get("target_side", base.target_side)),
        hidden=int(doc.get("hidden", base.hidden)),
        train=TrainConfig(
            learning_rate=float(trn.get("learning_rate", base.train.learning_rate)),
            momentum=float(trn.get("momentum", base.train.momentum)),
            error_goal=float(trn.get("error_goal", base.train.error_goal)),
            max_epochs=int(trn.get("max_epochs", base.train.max_epochs)),
            seed=int(trn.get("seed", base.train.seed)),
        ),
        reject_below=float(doc.get("reject_below", base.reject_below)),
        matcher=doc.get("matcher", base.matcher),
    )


def save_config(cfg: PipelineConfig, path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_config(path) -> PipelineConfig:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return config_from_dict(doc)


def with_threshold(cfg: PipelineConfig, tau: float) -> PipelineConfig:
    return replace(cfg, detector=replace(cfg.detector, threshold=tau))


def with_seed(cfg: PipelineConfig, seed: int) -> PipelineConfig:
    return replace(cfg, train=replace(cfg.train, seed=seed))
