"""Character n-gram profiles and the three base string kernels.

All three kernels compare the contiguous substrings (n-grams) two texts
share, summed over every n-gram length in a configured inclusive range:

* ``spectrum``:      sum over shared n-grams v of count_v(x) * count_v(y)
* ``presence``:      number of distinct shared n-grams
* ``intersection``:  sum over shared n-grams v of min(count_v(x), count_v(y))

Texts are byte strings by default; passing decoded ``str`` texts switches
counting to Unicode code points.  Values are integer-valued by definition
and stored as float64 so the whole pipeline shares one matrix type.
"""

from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .corpus import Partition, make_partition
from .errors import ValidationError
from .matrix import KernelMatrix

KERNEL_KINDS = ("spectrum", "presence", "intersection")


@dataclass(frozen=True)
class KernelSpec:
    """A base string kernel choice: kind plus inclusive n-gram length range."""

    kind: str
    p_min: int
    p_max: int

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValidationError(f"unknown kernel kind {self.kind!r}; expected one of {KERNEL_KINDS}")
        if not (1 <= self.p_min <= self.p_max):
            raise ValidationError(
                f"invalid n-gram range ({self.p_min}, {self.p_max}); need 1 <= p_min <= p_max"
            )


@dataclass(frozen=True)
class NGramProfile:
    """Multiset of a document's n-grams over a length range.

    ``counts`` maps each n-gram (a bytes or str slice whose length lies in
    ``[p_min, p_max]``) to its occurrence count.
    """

    p_min: int
    p_max: int
    counts: dict

    @property
    def total(self) -> int:
        """Total n-gram occurrences; equals k(x, x) under the intersection kernel."""
        return sum(self.counts.values())


def ngram_profile(text, p_min, p_max) -> NGramProfile:
    """Count the contiguous substrings of each length in [p_min, p_max].

    Texts shorter than a length contribute no n-grams of that length; an
    empty text yields an empty profile.
    """
    if p_min < 1 or p_min > p_max:
        raise ValidationError(f"invalid n-gram range ({p_min}, {p_max})")
    counts = Counter()
    for p in range(p_min, p_max + 1):
        counts.update(text[i : i + p] for i in range(len(text) - p + 1))
    return NGramProfile(p_min, p_max, dict(counts))


def kernel_value(a: NGramProfile, b: NGramProfile, kind) -> float:
    """Base kernel between two profiles built over the same length range."""
    if kind not in KERNEL_KINDS:
        raise ValidationError(f"unknown kernel kind {kind!r}")
    if (a.p_min, a.p_max) != (b.p_min, b.p_max):
        raise ValidationError(
            f"profiles built over different n-gram ranges: "
            f"({a.p_min}, {a.p_max}) vs ({b.p_min}, {b.p_max})"
        )
    small, big = (a.counts, b.counts)
    if len(big) < len(small):
        small, big = big, small
    total = 0
    if kind == "spectrum":
        for gram, ca in small.items():
            cb = big.get(gram)
            if cb is not None:
                total += ca * cb
    elif kind == "presence":
        for gram in small:
            if gram in big:
                total += 1
    else:
        for gram, ca in small.items():
            cb = big.get(gram)
            if cb is not None:
                total += ca if ca < cb else cb
    return float(total)


def _count_matrix(texts, p_min, p_max):
    """Sparse document-by-ngram count matrix over a shared vocabulary.

    The vocabulary is assigned in first-appearance order scanning the texts
    in sequence, so the matrix is deterministic.
    """
    vocab = {}
    rows, cols, data = [], [], []
    for row, text in enumerate(texts):
        counts = Counter()
        for p in range(p_min, p_max + 1):
            counts.update(text[i : i + p] for i in range(len(text) - p + 1))
        for gram, count in counts.items():
            col = vocab.setdefault(gram, len(vocab))
            rows.append(row)
            cols.append(col)
            data.append(count)
    shape = (len(texts), max(len(vocab), 1))
    return sparse.csr_matrix(
        (np.asarray(data, dtype=np.int64), (rows, cols)), shape=shape
    )


def _intersection_gram(counts):
    """Histogram-intersection Gram matrix of a sparse count matrix.

    Uses the level-set identity min(a, b) = sum_t [a >= t][b >= t]: peel one
    occurrence of every surviving n-gram per level and accumulate the
    presence Gram of each level.  Total work is proportional to the summed
    n-gram mass, and all arithmetic is exact integer arithmetic.
    """
    n = counts.shape[0]
    total = np.zeros((n, n), dtype=np.int64)
    level = counts.copy()
    first = True
    while level.nnz:
        bits = level.copy()
        bits.data = np.ones_like(bits.data)
        gram = bits @ bits.T
        if first:
            total += gram.toarray()
            first = False
        else:
            coo = gram.tocoo()
            np.add.at(total, (coo.row, coo.col), coo.data)
        level.data -= 1
        level.eliminate_zeros()
    return total


def gram_matrix(texts, partition: Partition, spec: KernelSpec) -> KernelMatrix:
    """Dense raw Gram matrix of a base string kernel over the joint order.

    Parameters
    ----------
    texts : sequence of bytes or str
        Document texts in joint order (train block first); length must
        equal ``partition.m + partition.n``.
    partition : Partition
    spec : KernelSpec

    Returns
    -------
    KernelMatrix with stage ``raw``.  Entries are exact integers stored as
    float64; the computation is deterministic.
    """
    texts = list(texts)
    if len(texts) != partition.size:
        raise ValidationError(
            f"got {len(texts)} texts for a partition of {partition.size} samples"
        )
    counts = _count_matrix(texts, spec.p_min, spec.p_max)
    if spec.kind == "spectrum":
        gram = (counts @ counts.T).toarray()
    elif spec.kind == "presence":
        bits = counts.copy()
        bits.data = np.ones_like(bits.data)
        gram = (bits @ bits.T).toarray()
    else:
        gram = _intersection_gram(counts)
    return KernelMatrix(gram.astype(np.float64), partition, "raw")


def gram_from_corpora(train, test, spec: KernelSpec, unicode_grams=False) -> KernelMatrix:
    """Raw Gram matrix over a train corpus and a test corpus.

    Builds the joint partition (train ids first, disjoint from test ids)
    and counts byte n-grams, or Unicode code-point n-grams when
    ``unicode_grams`` is set.
    """
    partition = make_partition(train, test)
    texts = train.texts(unicode_grams) + test.texts(unicode_grams)
    return gram_matrix(texts, partition, spec)
