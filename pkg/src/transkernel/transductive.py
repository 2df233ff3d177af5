"""Two-round self-training on top of the adapted kernel.

The classifier runs exactly two learning iterations.  Round one trains
kernel ridge regression on the labeled training block and scores every
test sample.  Test samples are then ranked by prediction confidence
(descending, ties broken by ascending test index) and the top ``n_adopt``
join the training set carrying their predicted labels; the ground-truth
test labels are never an input.  Round two retrains on the augmented set
and re-scores all test samples, adopted ones included.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .errors import ValidationError
from .krr import KernelRidgeClassifier, PredictionSet
from .matrix import KernelMatrix
from .validation import as_float_matrix, check_finite, check_square

_TKC_STAGES = ("transductive", "sum")


@dataclass(frozen=True)
class TkcTrace:
    """Audit record of a self-training run.

    Keeps both rounds' predictions plus the adopted test samples with
    their pseudo-labels and confidences, so mislabeled adoptions can be
    measured after the fact when gold labels become available.
    """

    first_pass: PredictionSet
    adopted_indices: np.ndarray
    adopted_pseudo_labels: np.ndarray
    adopted_confidences: np.ndarray
    second_pass: PredictionSet
    adopted_ids: tuple | None = None

    def to_dict(self) -> dict:
        adopted = []
        for rank, idx in enumerate(self.adopted_indices):
            entry = {
                "rank": rank,
                "test_index": int(idx),
                "pseudo_label": str(self.adopted_pseudo_labels[rank]),
                "confidence": float(self.adopted_confidences[rank]),
            }
            if self.adopted_ids is not None:
                entry["id"] = self.adopted_ids[rank]
            adopted.append(entry)
        return {
            "iteration_1": self.first_pass.to_dict(),
            "adopted": adopted,
            "iteration_2": self.second_pass.to_dict(),
        }


def _rank_by_confidence(confidences) -> np.ndarray:
    """Test indices sorted by confidence descending, index ascending on ties."""
    return np.argsort(-np.asarray(confidences), kind="stable")


class TransductiveKernelClassifier(ClassifierMixin, BaseEstimator):
    """Self-training classifier over a test-adapted kernel matrix.

    Parameters
    ----------
    n_adopt : int, default=1000
        How many of the most confident test predictions to add to the
        training set for the second round.  Clamped to the test-set size
        with a warning; 0 degenerates to plain kernel ridge regression.
    alpha : float, default=1e-5
        Ridge regularization passed to the underlying classifier.
    n_iterations : int, default=2
        Kept as an explicit knob so misuse fails loudly; only the
        two-round scheme is supported and other values are rejected.

    Attributes
    ----------
    classes_ : ndarray
        Sorted class labels seen in the training block.
    transduction_ : ndarray of shape (n_test,)
        Final predicted labels for every test sample, in test order.
    prediction_set_ : PredictionSet
        Final scores, labels, and confidences for the test block.
    trace_ : TkcTrace
        Both rounds plus the adopted samples, for auditing.
    """

    def __init__(self, n_adopt=1000, alpha=1e-5, n_iterations=2):
        self.n_adopt = n_adopt
        self.alpha = alpha
        self.n_iterations = n_iterations

    def _unpack(self, K, n_labeled):
        """Accept a KernelMatrix (stage-checked) or a plain square array."""
        if isinstance(K, KernelMatrix):
            if K.stage not in _TKC_STAGES:
                raise ValidationError(
                    f"self-training expects a kernel matrix at stage "
                    f"{' or '.join(_TKC_STAGES)}, got {K.stage!r}"
                )
            if K.m != n_labeled:
                raise ValidationError(
                    f"got {n_labeled} training labels for a partition with m={K.m}"
                )
            return K.values, K.partition.test_ids
        values = as_float_matrix(K, "kernel matrix")
        check_square(values, "kernel matrix")
        check_finite(values, "kernel matrix")
        if n_labeled > values.shape[0]:
            raise ValidationError(
                f"got {n_labeled} training labels for a {values.shape[0]}-sample kernel"
            )
        return values, None

    def _round(self, values, train_idx, labels, eval_idx) -> PredictionSet:
        clf = KernelRidgeClassifier(alpha=self.alpha)
        clf.fit(values[np.ix_(train_idx, train_idx)], labels)
        return clf.predict_set(values[np.ix_(eval_idx, train_idx)])

    def fit(self, K, y):
        """Run both self-training rounds.

        Parameters
        ----------
        K : KernelMatrix or array-like of shape (m+n, m+n)
            Full joint kernel over training samples (first block) and test
            samples (second block).
        y : array-like of shape (m,)
            Labels for the training block only.  The signature takes no
            test labels; that is what keeps the procedure honest.
        """
        if self.n_iterations != 2:
            raise ValidationError(
                f"only the two-round scheme is supported, got n_iterations={self.n_iterations!r}"
            )
        if not isinstance(self.n_adopt, (int, np.integer)) or self.n_adopt < 0:
            raise ValidationError(f"n_adopt must be a non-negative integer, got {self.n_adopt!r}")
        y = np.asarray(list(y), dtype=object)
        values, test_ids = self._unpack(K, len(y))
        m = len(y)
        n = values.shape[0] - m
        train_idx = np.arange(m)
        test_idx = np.arange(m, m + n)

        first = self._round(values, train_idx, y, test_idx)

        n_adopt = int(self.n_adopt)
        if n_adopt > n:
            warnings.warn(
                f"n_adopt={n_adopt} exceeds the test-set size {n}; adopting all test samples",
                stacklevel=2,
            )
            n_adopt = n
        ranked = _rank_by_confidence(first.confidences)
        adopted = ranked[:n_adopt]
        pseudo = first.labels[adopted]

        augmented_idx = np.concatenate([train_idx, test_idx[adopted]])
        augmented_y = np.concatenate([y, pseudo])
        second = self._round(values, augmented_idx, augmented_y, test_idx)

        self.classes_ = np.asarray(first.classes, dtype=object)
        self.transduction_ = second.labels
        self.prediction_set_ = second
        self.trace_ = TkcTrace(
            first_pass=first,
            adopted_indices=adopted,
            adopted_pseudo_labels=pseudo,
            adopted_confidences=first.confidences[adopted],
            second_pass=second,
            adopted_ids=(
                tuple(test_ids[i] for i in adopted) if test_ids is not None else None
            ),
        )
        self.n_test_ = n
        return self

    def fit_predict(self, K, y):
        """Fit and return the final test-block labels."""
        return self.fit(K, y).transduction_
