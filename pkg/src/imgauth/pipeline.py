"""Verify-then-recognize pipeline: calibration, training, matching, benchmarks.

The gate is absolute: nothing is admitted to feature extraction or matching
until the detector has ruled it authentic, whether it is a probe or a
gallery image at training time.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .config import PipelineConfig
from .detect import DetectorConfig, ForgeryVerdict, detect_forgery
from .gallery import Gallery
from .image_io import GrayImage
from .modelio import ModelFormatError, RecognizerModel
from .network import init_network, macs_per_epoch, predict, train
from .preprocess import (
    PcaModel,
    dct_lowfreq_features,
    pca_fit,
    preprocess_to_vector,
    project_features,
)
from .resample import apply_affine, synthesis_params

CALIBRATION_SCALES = (1.1, 1.2, 1.3, 1.4, 1.5)
CALIBRATION_KERNELS = ("linear", "cubic")


@dataclass(frozen=True)
class CalibrationResult:
    tau: float
    original_scores: list
    forgery_scores: list
    balanced_accuracy: float


@dataclass(frozen=True)
class RecognitionResult:
    verdict: ForgeryVerdict
    label: str | None
    confidence: float
    rejected: bool

    @property
    def matched(self) -> bool:
        return self.label is not None and not self.rejected and not self.verdict.forged


def raw_feature_vector(img: GrayImage, cfg: PipelineConfig) -> np.ndarray:
    """Conditioned, flattened vector before any PCA/DCT reduction."""
    return preprocess_to_vector(img, cfg.target_side)


def reduce_features(vec: np.ndarray, cfg: PipelineConfig, pca: PcaModel | None) -> np.ndarray:
    if cfg.feature_mode == "raw400":
        return vec
    if cfg.feature_mode == "dct_lowfreq":
        side = cfg.target_side
        return dct_lowfreq_features(GrayImage(vec.reshape(side, side)), min(cfg.dct_k, side * side))
    if pca is None:
        raise ValueError("pca feature mode needs a fitted PCA model")
    return project_features(pca, vec)


def effective_pca_k(cfg: PipelineConfig, n_vectors: int) -> int:
    """pca_k clamped to what the training set can support."""
    return max(1, min(cfg.pca_k, n_vectors - 1, cfg.target_side * cfg.target_side))


def balanced_accuracy(original_scores, forgery_scores, tau: float) -> float:
    orig = np.asarray(original_scores, dtype=np.float64)
    forg = np.asarray(forgery_scores, dtype=np.float64)
    tnr = float(np.mean(orig <= tau))
    tpr = float(np.mean(forg > tau))
    return 0.5 * (tnr + tpr)


def choose_threshold(original_scores, forgery_scores) -> float:
    """Midpoint candidate maximizing balanced accuracy; lowest tau on ties.

    Candidates are the midpoints of consecutive distinct pooled scores, so a
    perfectly separated corpus yields the midpoint of the separating gap.
    """
    pooled = np.unique(np.concatenate([original_scores, forgery_scores]))
    if pooled.size < 2:
        return float(pooled[0]) if pooled.size else 1.0
    candidates = (pooled[:-1] + pooled[1:]) / 2.0
    best_tau, best_ba = None, -1.0
    for tau in candidates:
        ba = balanced_accuracy(original_scores, forgery_scores, float(tau))
        if ba > best_ba + 1e-12:
            best_ba, best_tau = ba, float(tau)
    return best_tau


def forgery_grid(img: GrayImage, kernels=CALIBRATION_KERNELS, scales=CALIBRATION_SCALES):
    """The synthetic forgeries calibration derives from one original."""
    out = []
    for kernel in kernels:
        for scale in scales:
            params = synthesis_params(img.width, img.height, scale=scale)
            out.append(apply_affine(img, params, kernel))
    return out


def calibrate_detector(originals, detector: DetectorConfig) -> CalibrationResult:
    """Score originals and their forgery grid, then fix the threshold."""
    if len(originals) < 10:
        raise ValueError(f"calibration needs at least 10 originals, got {len(originals)}")
    orig_scores, forg_scores = [], []
    for img in originals:
        orig_scores.append(detect_forgery(img, detector).score)
        for forged in forgery_grid(img):
            forg_scores.append(detect_forgery(forged, detector).score)
    tau = choose_threshold(orig_scores, forg_scores)
    return CalibrationResult(
        tau=tau,
        original_scores=orig_scores,
        forgery_scores=forg_scores,
        balanced_accuracy=balanced_accuracy(orig_scores, forg_scores, tau),
    )


class ForgedGalleryError(Exception):
    """Training gallery contains images the detector rules forged."""

    def __init__(self, offenders):
        self.offenders = offenders
        names = ", ".join(path for path, _ in offenders)
        super().__init__(f"gallery images failed authentication: {names}")


@dataclass(frozen=True)
class TrainOutcome:
    model: RecognizerModel
    history: list
    final_mse: float | None
    goal_met: bool
    pca_k_used: int | None


def train_recognizer(gallery: Gallery, cfg: PipelineConfig) -> TrainOutcome:
    """Gate the gallery, fit features, and build the configured matcher.

    Raises ForgedGalleryError listing offenders if any gallery image fails
    authentication. The euclidean matcher stores gallery features and skips
    network training entirely.
    """
    forged = []
    for entry in gallery.entries:
        verdict = detect_forgery(entry.image, cfg.detector)
        if verdict.forged:
            forged.append((entry.rel_path, verdict.score))
    if forged:
        raise ForgedGalleryError(forged)

    labels = gallery.labels
    label_index = {lab: i for i, lab in enumerate(labels)}
    raw = [raw_feature_vector(e.image, cfg) for e in gallery.entries]
    y = [label_index[e.label] for e in gallery.entries]

    pca = None
    pca_k_used = None
    if cfg.feature_mode == "pca":
        pca_k_used = effective_pca_k(cfg, len(raw))
        pca = pca_fit(np.asarray(raw), pca_k_used)
    feats = np.asarray([reduce_features(v, cfg, pca) for v in raw])

    if cfg.matcher == "euclidean":
        model = RecognizerModel(
            feature_mode=cfg.feature_mode,
            target_side=cfg.target_side,
            labels=labels,
            detector=cfg.detector,
            seed=cfg.train.seed,
            matcher="euclidean",
            pca=pca,
            gallery_features=feats,
            gallery_labels=y,
        )
        return TrainOutcome(model=model, history=[], final_mse=None, goal_met=True,
                            pca_k_used=pca_k_used)

    classes = len(labels)
    net = init_network([feats.shape[1], cfg.hidden, classes], cfg.train.seed)
    trained, history = train(net, list(zip(feats, y)), cfg.train)
    final_mse = history[-1].mse
    model = RecognizerModel(
        feature_mode=cfg.feature_mode,
        target_side=cfg.target_side,
        labels=labels,
        detector=cfg.detector,
        seed=cfg.train.seed,
        matcher="network",
        network=trained,
        pca=pca,
        gallery_features=feats,
        gallery_labels=y,
    )
    return TrainOutcome(
        model=model,
        history=history,
        final_mse=final_mse,
        goal_met=final_mse <= cfg.train.error_goal,
        pca_k_used=pca_k_used,
    )


def model_features(img: GrayImage, model: RecognizerModel) -> np.ndarray:
    """Features for a probe, matching how the model was trained."""
    vec = preprocess_to_vector(img, model.target_side)
    if model.feature_mode == "raw400":
        return vec
    if model.feature_mode == "dct_lowfreq":
        side = model.target_side
        return dct_lowfreq_features(GrayImage(vec.reshape(side, side)), model.feature_length())
    if model.pca is None:
        raise ModelFormatError("model uses pca features but carries no PCA block")
    return project_features(model.pca, vec)


def match_features(feat: np.ndarray, model: RecognizerModel, reject_below: float):
    """(label, confidence, rejected) under the model's matcher."""
    if model.matcher == "network":
        if model.network is None:
            raise ModelFormatError("network matcher selected but model has no weights")
        pred = predict(model.network, feat, reject_below)
        return model.labels[pred.label], pred.confidence, pred.rejected
    if model.gallery_features is None or model.gallery_labels is None:
        raise ModelFormatError("euclidean matcher selected but model stores no gallery features")
    dists = np.linalg.norm(model.gallery_features - feat, axis=1)
    best = int(np.argmin(dists))
    confidence = 1.0 / (1.0 + float(dists[best]))
    return model.labels[model.gallery_labels[best]], confidence, confidence < reject_below


def recognize(img: GrayImage, model: RecognizerModel, reject_below: float,
              detector: DetectorConfig | None = None) -> RecognitionResult:
    """Authenticate first; only an authentic probe reaches the matcher."""
    verdict = detect_forgery(img, detector or model.detector)
    if verdict.forged:
        return RecognitionResult(verdict=verdict, label=None, confidence=0.0, rejected=False)
    feat = model_features(img, model)
    if feat.shape[0] != model.feature_length():
        raise ValueError(
            f"feature length {feat.shape[0]} does not match the model's {model.feature_length()}"
        )
    label, confidence, rejected = match_features(feat, model, reject_below)
    return RecognitionResult(
        verdict=verdict,
        label=None if rejected else label,
        confidence=confidence,
        rejected=rejected,
    )


def split_gallery(gallery: Gallery):
    """Per-subject deterministic split: last third (>= 1) of the sorted
    file names are test items, the rest train."""
    train_items, test_items = [], []
    for label in gallery.labels:
        entries = sorted(gallery.by_label(label), key=lambda e: e.rel_path)
        n_test = max(1, len(entries) // 3)
        if len(entries) <= n_test:
            raise ValueError(f"subject {label!r} has too few images to split")
        train_items.extend(entries[:-n_test])
        test_items.extend(entries[-n_test:])
    return train_items, test_items


def _gallery_from_entries(root, entries) -> Gallery:
    return Gallery(root=root, entries=list(entries), checksum="derived")


HIDDEN_SWEEP = (30, 60, 90, 180, 360)


def bench_hidden(gallery: Gallery, cfg: PipelineConfig, widths=HIDDEN_SWEEP):
    """Train at each hidden width; report per-epoch wall time and MAC count.

    Rows come out in sweep order: (hidden, epochs, seconds_per_epoch,
    macs_per_epoch).
    """
    labels = gallery.labels
    label_index = {lab: i for i, lab in enumerate(labels)}
    raw = [raw_feature_vector(e.image, cfg) for e in gallery.entries]
    pca = None
    if cfg.feature_mode == "pca":
        pca = pca_fit(np.asarray(raw), effective_pca_k(cfg, len(raw)))
    feats = np.asarray([reduce_features(v, cfg, pca) for v in raw])
    y = [label_index[e.label] for e in gallery.entries]
    data = list(zip(feats, y))

    rows = []
    for width in widths:
        net = init_network([feats.shape[1], width, len(labels)], cfg.train.seed)
        start = time.perf_counter()
        _, history = train(net, data, cfg.train)
        elapsed = time.perf_counter() - start
        epochs = history[-1].epoch
        rows.append(
            (
                width,
                epochs,
                elapsed / epochs,
                macs_per_epoch([feats.shape[1], width, len(labels)], len(data)),
            )
        )
    return rows


def bench_subjects(gallery: Gallery, cfg: PipelineConfig, counts=None):
    """Accuracy at increasing subject counts with the deterministic split.

    Rows: (subjects, train_images, test_images, accuracy).
    """
    labels = gallery.labels
    if counts is None:
        counts = list(range(2, len(labels) + 1, 2))
    if not counts or max(counts) > len(labels):
        raise ValueError(
            f"subject sweep {counts} infeasible with {len(labels)} subjects"
        )
    train_items, test_items = split_gallery(gallery)
    rows = []
    for c in counts:
        keep = set(labels[:c])
        sub_train = [e for e in train_items if e.label in keep]
        sub_test = [e for e in test_items if e.label in keep]
        sub_gallery = _gallery_from_entries(gallery.root, sub_train)
        outcome = train_recognizer(sub_gallery, cfg)
        correct = 0
        for entry in sub_test:
            result = recognize(entry.image, outcome.model, cfg.reject_below)
            if result.matched and result.label == entry.label:
                correct += 1
        rows.append((c, len(sub_train), len(sub_test), correct / len(sub_test)))
    return rows
