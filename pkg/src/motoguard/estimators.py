"""scikit-learn wrappers around the LBP recognition pipeline.

``LBPHistogramTransformer`` turns face images into flat 16384-wide feature
rows; ``LBPFaceRecognizer`` is a nearest-template classifier with a rejection
threshold, so an unknown face predicts ``unknown_label`` rather than the
closest enrolled identity.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .facerec import (
    BINS,
    DEFAULT_THRESHOLD,
    GRID,
    FaceDb,
    FaceTemplate,
    detect_face,
    extract_template,
)
from .imaging import GrayImage

__all__ = ["check_images", "LBPHistogramTransformer", "LBPFaceRecognizer"]

N_FEATURES = GRID * GRID * BINS


def check_images(X) -> list[GrayImage]:
    """Coerce ``X`` into a non-empty list of :class:`GrayImage`.

    Accepts GrayImage instances, 2-D integer arrays in [0, 255], or a 3-D
    array stacking equally sized frames.
    """
    if isinstance(X, GrayImage):
        raise ValueError("expected a sequence of images, got a single GrayImage")
    if isinstance(X, np.ndarray) and X.ndim == 3:
        X = list(X)
    images = []
    for i, item in enumerate(X):
        if isinstance(item, GrayImage):
            images.append(item)
            continue
        arr = np.asarray(item)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError(f"sample {i}: expected a non-empty 2-D array, got shape {arr.shape}")
        if not np.issubdtype(arr.dtype, np.integer):
            if not np.all(np.mod(arr, 1) == 0):
                raise ValueError(f"sample {i}: intensities must be integers")
        images.append(GrayImage.from_array(arr))
    if not images:
        raise ValueError("expected at least one image")
    return images


class LBPHistogramTransformer(TransformerMixin, BaseEstimator):
    """Map face images to concatenated per-cell LBP histograms.

    Parameters
    ----------
    detector : callable, default=None
        ``GrayImage -> Rect`` face locator; ``None`` uses the whole frame.
    """

    def __init__(self, detector=None):
        self.detector = detector

    def fit(self, X, y=None):
        check_images(X)
        self.n_features_out_ = N_FEATURES
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_out_")
        detector = self.detector or detect_face
        rows = [
            extract_template(img, detector(img), "x").grid.ravel()
            for img in check_images(X)
        ]
        return np.vstack(rows)


def _chi_square_rows(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    total = A + b
    diff = A - b
    terms = np.divide(diff * diff, total, out=np.zeros_like(total), where=total > 0)
    return terms.sum(axis=1)


class LBPFaceRecognizer(ClassifierMixin, BaseEstimator):
    """Nearest-template LBP face classifier with open-set rejection.

    Parameters
    ----------
    threshold : float, default=1.0
        Largest summed chi-square distance accepted as a match.
    detector : callable, default=None
        Face locator; ``None`` uses the whole frame.
    unknown_label : object, default=None
        Prediction for faces farther than ``threshold`` from every template.
    """

    def __init__(self, threshold=DEFAULT_THRESHOLD, detector=None, unknown_label=None):
        self.threshold = threshold
        self.detector = detector
        self.unknown_label = unknown_label

    def fit(self, X, y):
        if self.threshold < 0:
            raise ValueError("threshold must be non-negative")
        images = check_images(X)
        y = np.asarray(y)
        if y.ndim != 1 or len(y) != len(images):
            raise ValueError(f"y must be 1-D with {len(images)} labels")
        self._features = LBPHistogramTransformer(self.detector).fit(images)
        self.templates_ = self._features.transform(images)
        self.labels_ = y
        self.classes_ = np.unique(y)
        return self

    def distances(self, X) -> np.ndarray:
        """Summed chi-square distance from each sample to each template, ``(n, n_templates)``."""
        check_is_fitted(self, "templates_")
        probes = self._features.transform(X)
        return np.vstack([_chi_square_rows(self.templates_, p) for p in probes])

    def predict(self, X):
        D = self.distances(X)
        nearest = D.argmin(axis=1)
        best = D[np.arange(len(D)), nearest]
        out = np.empty(len(D), dtype=object)
        for i, (j, d) in enumerate(zip(nearest, best)):
            out[i] = self.labels_[j] if d <= self.threshold else self.unknown_label
        return out

    def to_facedb(self) -> FaceDb:
        """Export the fitted templates; labels must be unique."""
        check_is_fitted(self, "templates_")
        return FaceDb(tuple(
            FaceTemplate(str(label), row.reshape(GRID, GRID, BINS))
            for label, row in zip(self.labels_, self.templates_)
        ))
