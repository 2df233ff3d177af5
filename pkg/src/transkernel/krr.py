"""Dual kernel ridge regression over precomputed kernel matrices.

The classifier follows the scikit-learn estimator conventions with
``kernel="precomputed"`` semantics: ``fit`` takes the train-by-train
kernel block and labels, ``decision_function``/``predict`` take an
eval-by-train block.  One ridge system ``(K + alpha*I) a = t`` is solved
per +/-1 target vector (a single vector for binary problems, one per
class otherwise), sharing a single Cholesky factorization.
"""

import json
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from sklearn.base import BaseEstimator, ClassifierMixin

from .corpus import LabelCodec
from .errors import DataFormatError, NumericalError, ValidationError
from .validation import as_float_matrix, check_finite, check_square

_MODEL_MAGIC = b"KRRMODEL1\n"


def score_confidence(scores) -> np.ndarray:
    """Confidence of each prediction from its class scores.

    A single score column (binary, or a one-class degenerate problem)
    yields the absolute score; multiple columns yield the margin between
    the top and the second score.  Always non-negative.
    """
    arr = np.asarray(scores, dtype=np.float64)
    if arr.ndim == 1:
        return np.abs(arr)
    if arr.ndim != 2 or arr.shape[1] == 0:
        raise ValidationError(f"scores must be a vector or a 2-D array, got shape {arr.shape}")
    if arr.shape[1] == 1:
        return np.abs(arr[:, 0])
    top_two = -np.partition(-arr, 1, axis=1)[:, :2]
    return top_two[:, 0] - top_two[:, 1]


def labels_from_scores(scores, classes) -> np.ndarray:
    """Predicted labels from a score matrix, ties broken by class order.

    Binary problems carry one score column whose sign selects the class
    (positive means the second class; an exact zero falls back to the
    first).  Multiclass problems take the argmax, which resolves ties in
    favor of the earliest class.
    """
    classes = np.asarray(classes, dtype=object)
    arr = np.asarray(scores, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.shape[1] == 1:
        if len(classes) == 1:
            return np.repeat(classes[0], arr.shape[0])
        if len(classes) != 2:
            raise ValidationError(
                f"got a single score column for {len(classes)} classes"
            )
        return classes[(arr[:, 0] > 0).astype(np.intp)]
    if arr.shape[1] != len(classes):
        raise ValidationError(
            f"got {arr.shape[1]} score columns for {len(classes)} classes"
        )
    return classes[np.argmax(arr, axis=1)]


@dataclass(frozen=True)
class PredictionSet:
    """Per-sample class scores, predicted labels, and confidences, in eval order."""

    classes: tuple
    scores: np.ndarray
    labels: np.ndarray
    confidences: np.ndarray

    def __len__(self):
        return len(self.labels)

    def to_dict(self) -> dict:
        return {
            "classes": list(self.classes),
            "scores": self.scores.tolist(),
            "labels": self.labels.tolist(),
            "confidences": self.confidences.tolist(),
        }


class KernelRidgeClassifier(ClassifierMixin, BaseEstimator):
    """Classification by kernel ridge regression on a precomputed kernel.

    Labels are encoded as +/-1 targets (one-vs-rest for more than two
    classes) and each target vector t gets dual coefficients solving
    ``(K + alpha * I) a = t`` through one shared Cholesky factorization.
    Prediction scores a sample by its kernel row against the training set.

    Parameters
    ----------
    alpha : float, default=1e-5
        Ridge regularization; must be strictly positive.

    Attributes
    ----------
    classes_ : ndarray of shape (n_classes,)
        Sorted class labels.
    dual_coef_ : ndarray of shape (n_train, n_vectors)
        Dual coefficients, one column per target vector (a single column
        for binary problems).
    """

    def __init__(self, alpha=1e-5):
        self.alpha = alpha

    def fit(self, K, y):
        """Fit from the train-by-train kernel block and training labels.

        Parameters
        ----------
        K : array-like of shape (n_train, n_train)
            Symmetric kernel block over the training samples.
        y : array-like of shape (n_train,)
            Training labels.
        """
        if not isinstance(self.alpha, (int, float)) or self.alpha <= 0:
            raise ValidationError(f"alpha must be a positive number, got {self.alpha!r}")
        K = as_float_matrix(K, "training kernel")
        check_square(K, "training kernel")
        check_finite(K, "training kernel")
        y = list(y)
        if len(y) != K.shape[0]:
            raise ValidationError(
                f"got {len(y)} labels for a {K.shape[0]}x{K.shape[0]} kernel block"
            )
        if len(y) == 0:
            raise ValidationError("cannot fit on an empty training set")
        codec = LabelCodec.from_labels(y)
        targets = codec.targets(y)

        system = K.copy()
        diag = np.arange(K.shape[0])
        system[diag, diag] += float(self.alpha)
        try:
            factor = linalg.cho_factor(system, lower=True, check_finite=False)
            coef = linalg.cho_solve(factor, targets, check_finite=False)
        except linalg.LinAlgError as exc:
            eigs = np.linalg.eigvalsh(system)
            raise NumericalError(
                "ridge system is not positive definite "
                f"(eigenvalue range [{eigs[0]:.3e}, {eigs[-1]:.3e}], alpha={self.alpha:g}); "
                "the kernel matrix is likely invalid"
            ) from exc

        self.classes_ = np.asarray(codec.classes, dtype=object)
        self.dual_coef_ = coef
        return self

    def _check_fitted(self):
        if not hasattr(self, "dual_coef_"):
            raise ValidationError("classifier is not fitted")

    def _scores(self, K):
        self._check_fitted()
        K = as_float_matrix(K, "evaluation kernel")
        check_finite(K, "evaluation kernel")
        if K.shape[1] != self.dual_coef_.shape[0]:
            raise ValidationError(
                f"evaluation kernel has {K.shape[1]} columns, "
                f"model was trained on {self.dual_coef_.shape[0]} samples"
            )
        return K @ self.dual_coef_

    def decision_function(self, K):
        """Class scores for eval-by-train kernel rows.

        Returns a 1-D array for binary problems (positive means the second
        class) and an (n_eval, n_classes) array otherwise.
        """
        scores = self._scores(K)
        if scores.shape[1] == 1 and len(self.classes_) == 2:
            return scores[:, 0]
        return scores

    def predict(self, K):
        """Predicted labels for eval-by-train kernel rows."""
        return labels_from_scores(self._scores(K), self.classes_)

    def predict_set(self, K) -> PredictionSet:
        """Scores, labels, and confidences bundled for downstream ranking."""
        scores = self._scores(K)
        return PredictionSet(
            classes=tuple(self.classes_),
            scores=scores,
            labels=labels_from_scores(scores, self.classes_),
            confidences=score_confidence(scores),
        )


def save_model(path, model: KernelRidgeClassifier, train_indices):
    """Serialize a fitted classifier and its joint-order training indices.

    The format is a versioned binary blob: magic bytes, one JSON header
    line (classes, sizes, training indices), then the dual coefficients as
    little-endian float64 in row-major order.
    """
    model._check_fitted()
    train_indices = [int(i) for i in train_indices]
    if len(train_indices) != model.dual_coef_.shape[0]:
        raise ValidationError(
            f"got {len(train_indices)} training indices for "
            f"{model.dual_coef_.shape[0]} dual coefficient rows"
        )
    header = {
        "classes": [str(c) for c in model.classes_],
        "n_train": model.dual_coef_.shape[0],
        "n_vectors": model.dual_coef_.shape[1],
        "alpha": float(model.alpha),
        "train_indices": train_indices,
    }
    with open(path, "wb") as fh:
        fh.write(_MODEL_MAGIC)
        fh.write(json.dumps(header, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        fh.write(np.ascontiguousarray(model.dual_coef_, dtype="<f8").tobytes())


def load_model(path):
    """Load a serialized classifier; returns ``(model, train_indices)``."""
    try:
        with open(path, "rb") as fh:
            magic = fh.read(len(_MODEL_MAGIC))
            if magic != _MODEL_MAGIC:
                raise DataFormatError(f"{path}: not a model file (bad magic bytes)")
            header_line = fh.readline()
            payload = fh.read()
    except OSError as exc:
        raise DataFormatError(f"cannot read model file {path}: {exc}") from exc
    try:
        header = json.loads(header_line.decode("utf-8"))
        classes = [str(c) for c in header["classes"]]
        n_train = int(header["n_train"])
        n_vectors = int(header["n_vectors"])
        alpha = float(header["alpha"])
        train_indices = [int(i) for i in header["train_indices"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise DataFormatError(f"{path}: malformed model header") from exc
    expected = n_train * n_vectors * 8
    if len(payload) != expected:
        raise DataFormatError(
            f"{path}: payload holds {len(payload)} bytes, header declares {expected}"
        )
    if len(train_indices) != n_train:
        raise DataFormatError(f"{path}: training index count does not match n_train")
    model = KernelRidgeClassifier(alpha=alpha)
    model.classes_ = np.asarray(classes, dtype=object)
    model.dual_coef_ = (
        np.frombuffer(payload, dtype="<f8").reshape(n_train, n_vectors).astype(np.float64)
    )
    return model, train_indices
