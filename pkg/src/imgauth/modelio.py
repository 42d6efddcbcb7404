"""Versioned JSON model files.

A model file bundles everything recognition needs: the trained network (or
the stored gallery features for the nearest-neighbour matcher), the fitted
PCA basis if any, the label table, and the detector settings that gated the
training gallery. Floats serialise via repr, so a load/save round trip
reproduces bit-identical parameters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .detect import DetectorConfig
from .network import Network
from .preprocess import PcaModel

MODEL_FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    """Unreadable, truncated, or wrong-version model payload."""


@dataclass(frozen=True)
class RecognizerModel:
    feature_mode: str
    target_side: int
    labels: list
    detector: DetectorConfig
    seed: int
    matcher: str
    network: Network | None = None
    pca: PcaModel | None = None
    gallery_features: np.ndarray | None = None
    gallery_labels: list | None = None

    def feature_length(self) -> int:
        if self.network is not None:
            return self.network.layer_sizes[0]
        if self.gallery_features is not None:
            return self.gallery_features.shape[1]
        raise ModelFormatError("model carries neither a network nor gallery features")


def model_to_bytes(model: RecognizerModel) -> bytes:
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "layer_sizes": model.network.layer_sizes if model.network else None,
        "activation": "sigmoid",
        "weights": [w.tolist() for w in model.network.weights] if model.network else None,
        "biases": [b.tolist() for b in model.network.biases] if model.network else None,
        "pca": (
            {
                "mean": model.pca.mean.tolist(),
                "components": model.pca.components.tolist(),
                "eigenvalues": model.pca.eigenvalues.tolist(),
            }
            if model.pca
            else None
        ),
        "feature_mode": model.feature_mode,
        "target_side": model.target_side,
        "labels": list(model.labels),
        "detector": {
            "n": model.detector.derivative_order,
            "tau": model.detector.threshold,
            "max_lag": model.detector.max_lag,
            "dc_exclusion": model.detector.dc_exclusion_bins,
        },
        "seed": model.seed,
        "matcher": model.matcher,
        "gallery_features": (
            model.gallery_features.tolist() if model.gallery_features is not None else None
        ),
        "gallery_labels": list(model.gallery_labels) if model.gallery_labels is not None else None,
    }
    return (json.dumps(doc, sort_keys=True, separators=(",", ": "), indent=1) + "\n").encode("utf-8")


def model_from_bytes(data: bytes) -> RecognizerModel:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"corrupted model payload: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError("model payload must be a JSON object")
    version = doc.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model format version {version!r}, this build reads version {MODEL_FORMAT_VERSION}"
        )
    try:
        det = doc["detector"]
        detector = DetectorConfig(
            derivative_order=int(det["n"]),
            threshold=float(det["tau"]),
            max_lag=int(det["max_lag"]),
            dc_exclusion_bins=int(det["dc_exclusion"]),
        )
        network = None
        if doc.get("weights") is not None:
            weights = tuple(np.asarray(w, dtype=np.float64) for w in doc["weights"])
            biases = tuple(np.asarray(b, dtype=np.float64) for b in doc["biases"])
            network = Network(weights=weights, biases=biases)
            if doc.get("layer_sizes") is not None and list(doc["layer_sizes"]) != network.layer_sizes:
                raise ModelFormatError(
                    f"layer_sizes {doc['layer_sizes']} disagree with weight shapes {network.layer_sizes}"
                )
        pca = None
        if doc.get("pca") is not None:
            pca = PcaModel(
                mean=np.asarray(doc["pca"]["mean"], dtype=np.float64),
                components=np.asarray(doc["pca"]["components"], dtype=np.float64),
                eigenvalues=np.asarray(doc["pca"]["eigenvalues"], dtype=np.float64),
            )
        feats = doc.get("gallery_features")
        gallery_features = np.asarray(feats, dtype=np.float64) if feats is not None else None
        gallery_labels = doc.get("gallery_labels")
        model = RecognizerModel(
            feature_mode=doc["feature_mode"],
            target_side=int(doc["target_side"]),
            labels=list(doc["labels"]),
            detector=detector,
            seed=int(doc["seed"]),
            matcher=doc["matcher"],
            network=network,
            pca=pca,
            gallery_features=gallery_features,
            gallery_labels=list(gallery_labels) if gallery_labels is not None else None,
        )
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model payload: {exc}") from exc
    model.feature_length()  # must carry at least one matcher backend
    return model


def save_model(model: RecognizerModel, path) -> None:
    Path(path).write_bytes(model_to_bytes(model))


def load_model(path) -> RecognizerModel:
    return model_from_bytes(Path(path).read_bytes())
