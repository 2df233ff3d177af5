"""Accuracy, paired significance testing, and prediction files."""

from dataclasses import dataclass

import numpy as np

from .errors import DataFormatError, ValidationError

# Upper critical value of chi-squared with one degree of freedom at the
# 0.01 level.  The continuity-corrected statistic must exceed this.
CHI2_CRITICAL_0_01 = 6.635


@dataclass(frozen=True)
class EvalResult:
    """Per-sample correctness plus the derived accuracy."""

    correctness: np.ndarray

    @property
    def correct(self) -> int:
        return int(np.count_nonzero(self.correctness))

    @property
    def total(self) -> int:
        return int(self.correctness.shape[0])

    @property
    def accuracy(self) -> float:
        return self.correct / self.total

    def to_dict(self) -> dict:
        return {
            "correct": self.correct,
            "total": self.total,
            "accuracy": self.accuracy,
        }


def evaluate_predictions(predicted, gold) -> EvalResult:
    """Compare aligned label sequences; both orderings must match."""
    predicted = list(predicted)
    gold = list(gold)
    if len(predicted) != len(gold):
        raise ValidationError(
            f"got {len(predicted)} predictions for {len(gold)} gold labels"
        )
    if not gold:
        raise ValidationError("cannot evaluate an empty label set")
    correctness = np.fromiter(
        (p == g for p, g in zip(predicted, gold)), dtype=bool, count=len(gold)
    )
    return EvalResult(correctness=correctness)


def accuracy(predicted, gold) -> float:
    return evaluate_predictions(predicted, gold).accuracy


@dataclass(frozen=True)
class McNemarResult:
    """Continuity-corrected McNemar test over paired correctness vectors."""

    b: int
    c: int
    statistic: float
    significant_at_0_01: bool

    def to_dict(self) -> dict:
        return {
            "b": self.b,
            "c": self.c,
            "statistic": self.statistic,
            "significant_at_0_01": self.significant_at_0_01,
        }


def mcnemar(correctness_a, correctness_b, alpha: float = 0.01) -> McNemarResult:
    """Paired test on the discordant counts of two classifiers.

    ``b`` counts samples only the first classifier got right, ``c`` those
    only the second got right.  The statistic is
    ``max(|b - c| - 1, 0)**2 / (b + c)``, defined as 0 when both counts
    are 0, and compared against the 0.01 chi-squared critical value.
    Only ``alpha=0.01`` is supported; the critical value is hardwired.
    """
    if alpha != 0.01:
        raise ValidationError(f"only alpha=0.01 is supported, got {alpha!r}")
    a = np.asarray(correctness_a, dtype=bool)
    bv = np.asarray(correctness_b, dtype=bool)
    if a.ndim != 1 or bv.ndim != 1:
        raise ValidationError("correctness vectors must be one-dimensional")
    if a.shape[0] != bv.shape[0]:
        raise ValidationError(
            f"correctness vectors differ in length: {a.shape[0]} vs {bv.shape[0]}"
        )
    if a.shape[0] == 0:
        raise ValidationError("cannot test empty correctness vectors")
    b = int(np.count_nonzero(a & ~bv))
    c = int(np.count_nonzero(~a & bv))
    if b + c == 0:
        statistic = 0.0
    else:
        statistic = max(abs(b - c) - 1, 0) ** 2 / (b + c)
    return McNemarResult(
        b=b,
        c=c,
        statistic=statistic,
        significant_at_0_01=statistic > CHI2_CRITICAL_0_01,
    )


def write_predictions(path, ids, labels, confidences) -> None:
    """Write one ``id<TAB>label<TAB>confidence`` line per sample."""
    ids = list(ids)
    labels = list(labels)
    confidences = list(confidences)
    if not (len(ids) == len(labels) == len(confidences)):
        raise ValidationError(
            f"mismatched prediction columns: {len(ids)} ids, "
            f"{len(labels)} labels, {len(confidences)} confidences"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, label, conf in zip(ids, labels, confidences):
            fh.write(f"{i}\t{label}\t{float(conf):.17g}\n")


def read_predictions(path):
    """Read a predictions file back as (ids, labels, confidences)."""
    ids, labels, confidences = [], [], []
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise DataFormatError(f"cannot read predictions file {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataFormatError(
                    f"{path}:{lineno}: expected 3 tab-separated fields, got {len(parts)}"
                )
            sample_id, label, conf = parts
            try:
                conf_value = float(conf)
            except ValueError as exc:
                raise DataFormatError(
                    f"{path}:{lineno}: confidence is not a number: {conf!r}"
                ) from exc
            ids.append(sample_id)
            labels.append(label)
            confidences.append(conf_value)
    if not ids:
        raise DataFormatError(f"{path}: no predictions found")
    return ids, labels, np.asarray(confidences, dtype=np.float64)
