"""Dense symmetric kernel matrices and their on-disk format.

A KernelMatrix pairs a dense symmetric similarity matrix over the joint
train+test sample order with its Partition and a pipeline stage tag.  The
stage records how far along the adaptation pipeline the matrix is:

    raw -> normalized -> rbf -> transductive
                                    \\-> sum (elementwise sum of kernels)

Matrices are serialized in the KMAT binary format: the magic bytes
``KMAT1\\n``, one ASCII header line ``dim=<d> m=<m> n=<n> stage=<stage>``,
then d*d little-endian IEEE-754 float64 values in row-major order.
"""

from dataclasses import dataclass

import numpy as np

from .corpus import Partition
from .errors import DataFormatError, ValidationError
from .validation import as_float_matrix, check_finite, check_square, check_symmetric

STAGES = ("raw", "normalized", "rbf", "transductive", "sum")

_MAGIC = b"KMAT1\n"
_SYMMETRY_RTOL = 1e-12


@dataclass(frozen=True)
class KernelMatrix:
    """Symmetric (m+n) x (m+n) similarity matrix with provenance.

    Attributes
    ----------
    values : ndarray of float64, shape (m+n, m+n)
        Pairwise similarities over the joint order, training block first.
    partition : Partition
        Train/test bookkeeping matching the matrix dimension.
    stage : str
        One of ``raw``, ``normalized``, ``rbf``, ``transductive``, ``sum``.
    """

    values: np.ndarray
    partition: Partition
    stage: str

    def __post_init__(self):
        arr = as_float_matrix(self.values, "kernel matrix")
        check_square(arr, "kernel matrix")
        check_finite(arr, "kernel matrix")
        check_symmetric(arr, "kernel matrix", rtol=_SYMMETRY_RTOL)
        if self.stage not in STAGES:
            raise ValidationError(f"unknown kernel stage {self.stage!r}; expected one of {STAGES}")
        if arr.shape[0] != self.partition.size:
            raise ValidationError(
                f"kernel matrix is {arr.shape[0]}x{arr.shape[0]} but the partition "
                f"covers {self.partition.size} samples"
            )
        if self.stage in ("normalized", "rbf") and arr.size:
            diag = np.diagonal(arr)
            if np.abs(diag - 1.0).max() > 1e-9:
                raise ValidationError(f"{self.stage} kernel matrix must have a unit diagonal")
        object.__setattr__(self, "values", arr)

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.partition.m

    @property
    def n(self) -> int:
        return self.partition.n

    def train_block(self) -> np.ndarray:
        """Train x train sub-matrix."""
        return self.values[: self.m, : self.m]

    def test_train_block(self) -> np.ndarray:
        """Test x train sub-matrix (rows evaluate, columns index the model)."""
        return self.values[self.m :, : self.m]

    def with_values(self, values, stage) -> "KernelMatrix":
        return KernelMatrix(values, self.partition, stage)

    def same_partition(self, other) -> bool:
        return self.partition == other.partition


def save_kmat(path, kernel: KernelMatrix):
    """Write a kernel matrix in KMAT format (bit-exact round trip)."""
    header = f"dim={kernel.dim} m={kernel.m} n={kernel.n} stage={kernel.stage}\n"
    payload = np.ascontiguousarray(kernel.values, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(header.encode("ascii"))
        fh.write(payload.tobytes())


def load_kmat(path, order=None) -> KernelMatrix:
    """Read a KMAT file.

    Parameters
    ----------
    path : str or Path
    order : sequence of str, optional
        Sample ids for the joint order.  KMAT files carry only the block
        sizes, so without this the partition gets synthetic ids.
    """
    try:
        with open(path, "rb") as fh:
            magic = fh.read(len(_MAGIC))
            if magic != _MAGIC:
                raise DataFormatError(f"{path}: not a KMAT file (bad magic bytes)")
            header = b""
            while not header.endswith(b"\n"):
                byte = fh.read(1)
                if not byte:
                    raise DataFormatError(f"{path}: truncated KMAT header")
                header += byte
                if len(header) > 256:
                    raise DataFormatError(f"{path}: oversized KMAT header")
            payload = fh.read()
    except OSError as exc:
        raise DataFormatError(f"cannot read kernel matrix {path}: {exc}") from exc

    fields = {}
    for token in header.decode("ascii", errors="replace").split():
        key, sep, value = token.partition("=")
        if not sep:
            raise DataFormatError(f"{path}: malformed KMAT header token {token!r}")
        fields[key] = value
    try:
        dim = int(fields["dim"])
        m = int(fields["m"])
        n = int(fields["n"])
        stage = fields["stage"]
    except (KeyError, ValueError) as exc:
        raise DataFormatError(f"{path}: malformed KMAT header {header!r}") from exc
    if dim < 0 or m < 0 or n < 0 or m + n != dim:
        raise DataFormatError(f"{path}: inconsistent KMAT header (dim={dim}, m={m}, n={n})")
    if stage not in STAGES:
        raise DataFormatError(f"{path}: unknown KMAT stage {stage!r}")
    expected = dim * dim * 8
    if len(payload) != expected:
        raise DataFormatError(
            f"{path}: payload holds {len(payload)} bytes, header declares {expected}"
        )

    values = np.frombuffer(payload, dtype="<f8").reshape(dim, dim).astype(np.float64)
    if order is not None:
        partition = Partition(m, n, tuple(order))
    else:
        partition = Partition.anonymous(m, n)
    try:
        return KernelMatrix(values, partition, stage)
    except ValidationError as exc:
        raise DataFormatError(f"{path}: {exc}") from exc


def export_csv(path, kernel: KernelMatrix):
    """Debug export: comma-separated values with 17 significant digits."""
    np.savetxt(path, kernel.values, fmt="%.17g", delimiter=",")
