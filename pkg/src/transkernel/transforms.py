"""The kernel adaptation pipeline: normalize, RBF re-embed, row-feature product.

Starting from a raw Gram matrix K over the joint train+test order, the
pipeline computes

1. cosine normalization      N_ij = K_ij / sqrt(K_ii * K_jj)
2. RBF re-embedding          R_ij = exp(-(1 - N_ij) / (2 * sigma2))
3. row-feature linear kernel T = R @ R.T

Step 3 treats each row of R (a sample's similarities to every train and
test sample) as that sample's feature vector, so the resulting kernel is
adapted to the test set at hand.  Each step only accepts its predecessor's
stage; violations raise instead of silently coercing.
"""

import numpy as np

from .corpus import Partition
from .errors import DataFormatError, ValidationError
from .matrix import KernelMatrix
from .validation import as_float_matrix, check_finite

DEFAULT_SIGMA2 = 0.5


def _require_stage(kernel, expected, op):
    if kernel.stage != expected:
        raise ValidationError(
            f"{op} requires a {expected!r} kernel matrix, got stage {kernel.stage!r}"
        )


def _symmetric_product(values):
    """values @ values.T, exactly symmetrized."""
    product = values @ values.T
    return (product + product.T) / 2.0


def normalize(kernel: KernelMatrix) -> KernelMatrix:
    """Cosine-normalize a raw Gram matrix.

    Every entry is divided by the square root of the product of its two
    diagonal entries, putting self-similarity at exactly 1.  Rows with zero
    self-similarity (documents too short to produce any n-gram) get 0 off
    the diagonal and 1 on it, which keeps the matrix a valid normalized
    kernel.  For valid, PSD inputs the result lies in [-1, 1]; entries are
    clipped to that interval to absorb floating-point rounding.
    """
    _require_stage(kernel, "raw", "normalize")
    values = kernel.values
    diag = np.diagonal(values).copy()
    if (diag < 0).any():
        raise ValidationError("normalize: kernel matrix has negative diagonal entries")
    zero = diag == 0.0
    scale = np.sqrt(diag)
    scale[zero] = 1.0
    normalized = values / np.outer(scale, scale)
    np.clip(normalized, -1.0, 1.0, out=normalized)
    normalized[zero, :] = 0.0
    normalized[:, zero] = 0.0
    np.fill_diagonal(normalized, 1.0)
    return kernel.with_values(normalized, "normalized")


def rbf_transform(kernel: KernelMatrix, sigma2=DEFAULT_SIGMA2) -> KernelMatrix:
    """Map a normalized kernel elementwise through exp(-(1 - x) / (2 * sigma2)).

    At the default ``sigma2 = 0.5`` this reduces to exp(x - 1), sending
    similarity 1 to 1 and similarity 0 to exp(-1).
    """
    _require_stage(kernel, "normalized", "rbf_transform")
    if sigma2 <= 0:
        raise ValidationError(f"sigma2 must be positive, got {sigma2}")
    if sigma2 == DEFAULT_SIGMA2:
        values = np.exp(kernel.values - 1.0)
    else:
        values = np.exp(-(1.0 - kernel.values) / (2.0 * sigma2))
    return kernel.with_values(values, "rbf")


def transductive_kernel(kernel: KernelMatrix, renormalize=False) -> KernelMatrix:
    """Linear kernel over the rows of the RBF matrix: R @ R.T.

    The input must be the full joint matrix so that every feature vector
    includes similarities to the test samples; that is what adapts the
    resulting kernel to the test set.  The result is PSD by construction
    (it is the Gram matrix of the rows).

    ``renormalize`` additionally cosine-normalizes the product; off by
    default.
    """
    _require_stage(kernel, "rbf", "transductive_kernel")
    values = _symmetric_product(kernel.values)
    if renormalize:
        diag = np.diagonal(values).copy()
        scale = np.sqrt(diag)
        scale[diag == 0.0] = 1.0
        values = values / np.outer(scale, scale)
        np.clip(values, -1.0, 1.0, out=values)
        np.fill_diagonal(values, 1.0)
    return kernel.with_values(values, "transductive")


def sum_kernels(kernels) -> KernelMatrix:
    """Elementwise sum of kernel matrices sharing a partition and stage."""
    kernels = list(kernels)
    if not kernels:
        raise ValidationError("sum_kernels needs at least one kernel matrix")
    head = kernels[0]
    for other in kernels[1:]:
        if other.values.shape != head.values.shape:
            raise ValidationError(
                f"sum_kernels: size mismatch ({other.dim} vs {head.dim})"
            )
        if other.partition != head.partition:
            raise ValidationError("sum_kernels: kernel matrices cover different partitions")
        if other.stage != head.stage:
            raise ValidationError(
                f"sum_kernels: stage mismatch ({other.stage!r} vs {head.stage!r})"
            )
    total = np.zeros_like(head.values)
    for kernel in kernels:
        total += kernel.values
    return KernelMatrix(total, head.partition, "sum")


def rbf_dense_kernel(features, gamma, partition: Partition) -> KernelMatrix:
    """Gaussian kernel exp(-gamma * ||u - v||^2) over dense feature vectors.

    Used for fixed-length vector features (such as acoustic embeddings
    shipped alongside a transcript corpus); the result is a raw-stage
    matrix that feeds the same normalize / rbf / transductive pipeline.
    """
    feats = as_float_matrix(features, "feature matrix")
    check_finite(feats, "feature matrix")
    if gamma <= 0:
        raise ValidationError(f"gamma must be positive, got {gamma}")
    if feats.shape[0] != partition.size:
        raise ValidationError(
            f"got {feats.shape[0]} feature vectors for a partition of {partition.size} samples"
        )
    gram = _symmetric_product(feats)
    norms = np.diagonal(gram)
    sq_dist = norms[:, None] + norms[None, :] - 2.0 * gram
    np.maximum(sq_dist, 0.0, out=sq_dist)
    values = np.exp(-gamma * sq_dist)
    np.fill_diagonal(values, 1.0)
    return KernelMatrix(values, partition, "raw")


def load_dense_features(path):
    """Read whitespace-separated dense feature vectors.

    Each line is ``id`` followed by the vector components; all vectors must
    share one dimension.  Returns ``(ids, array)`` in file order.
    """
    ids = []
    vectors = []
    dim = None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                fields = line.split()
                if not fields:
                    continue
                if len(fields) < 2:
                    raise DataFormatError(
                        f"{path}:{lineno}: expected an id followed by vector components"
                    )
                try:
                    vec = [float(x) for x in fields[1:]]
                except ValueError as exc:
                    raise DataFormatError(f"{path}:{lineno}: non-numeric component") from exc
                if dim is None:
                    dim = len(vec)
                elif len(vec) != dim:
                    raise DataFormatError(
                        f"{path}:{lineno}: vector has {len(vec)} components, expected {dim}"
                    )
                ids.append(fields[0])
                vectors.append(vec)
    except OSError as exc:
        raise DataFormatError(f"cannot read feature file {path}: {exc}") from exc
    if not ids:
        raise DataFormatError(f"{path}: no feature vectors found")
    return ids, np.asarray(vectors, dtype=np.float64)
