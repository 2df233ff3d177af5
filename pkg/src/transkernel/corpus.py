"""Text corpora, train/test partitions, and label encoding.

A corpus is an ordered collection of documents with unique ids.  Document
text is kept as a raw byte sequence: no lowercasing, tokenization, or
normalization is applied unless explicitly requested at load time, so
n-gram counting downstream is deterministic and encoding-agnostic.

On disk a corpus is a UTF-8 TSV file with one document per line::

    id<TAB>label<TAB>text

The literal label ``?`` marks an unlabeled document (test data whose gold
labels are withheld from every training code path).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataFormatError, ValidationError

UNLABELED_MARKER = "?"


@dataclass(frozen=True)
class Document:
    """One text sample: a unique id, raw bytes, and an optional label."""

    id: str
    text: bytes
    label: str | None = None

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise ValidationError("document id must be a non-empty string")
        if not isinstance(self.text, bytes):
            raise ValidationError(f"document {self.id!r}: text must be bytes")
        if self.label is not None:
            if not isinstance(self.label, str) or not self.label:
                raise ValidationError(f"document {self.id!r}: label must be a non-empty string or None")
            if self.label == UNLABELED_MARKER:
                raise ValidationError(
                    f"document {self.id!r}: label {UNLABELED_MARKER!r} is reserved for unlabeled data"
                )

    def chars(self) -> str:
        """Text decoded as UTF-8 (for Unicode code-point n-grams)."""
        return self.text.decode("utf-8")


class Corpus:
    """Immutable ordered collection of documents with unique ids."""

    def __init__(self, documents):
        docs = tuple(documents)
        index = {}
        for pos, doc in enumerate(docs):
            if not isinstance(doc, Document):
                raise ValidationError("corpus entries must be Document instances")
            if doc.id in index:
                raise ValidationError(f"duplicate document id {doc.id!r}")
            index[doc.id] = pos
        self._docs = docs
        self._index = index

    def __len__(self):
        return len(self._docs)

    def __iter__(self):
        return iter(self._docs)

    def __getitem__(self, pos) -> Document:
        return self._docs[pos]

    def __eq__(self, other):
        return isinstance(other, Corpus) and self._docs == other._docs

    @property
    def ids(self) -> tuple:
        return tuple(doc.id for doc in self._docs)

    def by_id(self, doc_id) -> Document:
        try:
            return self._docs[self._index[doc_id]]
        except KeyError:
            raise ValidationError(f"unknown document id {doc_id!r}") from None

    def labels(self) -> tuple:
        """Labels in corpus order; ``None`` for unlabeled documents."""
        return tuple(doc.label for doc in self._docs)

    def require_labels(self) -> list:
        """Labels in corpus order, raising if any document is unlabeled."""
        labels = []
        for doc in self._docs:
            if doc.label is None:
                raise ValidationError(f"document {doc.id!r} is unlabeled")
            labels.append(doc.label)
        return labels

    def texts(self, unicode_grams=False) -> list:
        """Document texts in corpus order, as bytes or decoded strings."""
        if unicode_grams:
            return [doc.chars() for doc in self._docs]
        return [doc.text for doc in self._docs]

    def without_labels(self) -> "Corpus":
        """Copy of this corpus with every label removed."""
        return Corpus(Document(d.id, d.text, None) for d in self._docs)

    def prefixed(self, prefix) -> "Corpus":
        """Copy with ids namespaced as ``{prefix}:{id}`` (for corpus unions)."""
        return Corpus(Document(f"{prefix}:{d.id}", d.text, d.label) for d in self._docs)


def concat_corpora(corpora) -> Corpus:
    """Concatenate corpora in order; ids must stay globally unique."""
    docs = []
    for corpus in corpora:
        docs.extend(corpus)
    return Corpus(docs)


def load_corpus(path, lowercase=False) -> Corpus:
    """Load a TSV corpus file.

    Parameters
    ----------
    path : str or Path
        TSV file with lines ``id<TAB>label<TAB>text`` (UTF-8; the text
        field may itself contain tabs).  Label ``?`` means unlabeled.
    lowercase : bool, default=False
        Lowercase the text before storing.  Off by default; the kernels
        operate on raw bytes.
    """
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise DataFormatError(f"cannot read corpus file {path}: {exc}") from exc

    docs = []
    for lineno, line in enumerate(data.split(b"\n"), start=1):
        if line.endswith(b"\r"):
            line = line[:-1]
        if not line:
            continue
        fields = line.split(b"\t", 2)
        if len(fields) != 3:
            raise DataFormatError(
                f"{path}:{lineno}: expected id<TAB>label<TAB>text, got {len(fields)} field(s)"
            )
        raw_id, raw_label, text = fields
        try:
            doc_id = raw_id.decode("utf-8")
            label = raw_label.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DataFormatError(f"{path}:{lineno}: invalid UTF-8 in id or label") from exc
        if not doc_id:
            raise DataFormatError(f"{path}:{lineno}: empty document id")
        if lowercase:
            text = text.decode("utf-8", errors="surrogateescape").lower().encode(
                "utf-8", errors="surrogateescape"
            )
        docs.append(
            Document(doc_id, text, None if label == UNLABELED_MARKER else label)
        )
    return Corpus(docs)


def save_corpus(corpus, path):
    """Write a corpus back to TSV, byte-exactly recoverable by load_corpus."""
    with open(path, "wb") as fh:
        for doc in corpus:
            if b"\n" in doc.text or doc.text.endswith(b"\r"):
                raise ValidationError(
                    f"document {doc.id!r}: text with newlines or a trailing carriage "
                    "return cannot be stored in the TSV format"
                )
            label = UNLABELED_MARKER if doc.label is None else doc.label
            fh.write(doc.id.encode("utf-8"))
            fh.write(b"\t")
            fh.write(label.encode("utf-8"))
            fh.write(b"\t")
            fh.write(doc.text)
            fh.write(b"\n")


@dataclass(frozen=True)
class Partition:
    """Train/test bookkeeping over the joint sample order.

    The joint order places the ``m`` training samples first and the ``n``
    test samples second, so index ``i`` is a training sample iff ``i < m``.
    """

    m: int
    n: int
    order: tuple

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise ValidationError("partition sizes must be non-negative")
        if len(self.order) != self.m + self.n:
            raise ValidationError(
                f"partition order has {len(self.order)} ids, expected m+n = {self.m + self.n}"
            )
        if len(set(self.order)) != len(self.order):
            raise ValidationError("partition order contains duplicate ids")

    @property
    def size(self) -> int:
        return self.m + self.n

    @property
    def train_ids(self) -> tuple:
        return self.order[: self.m]

    @property
    def test_ids(self) -> tuple:
        return self.order[self.m :]

    def is_train(self, index) -> bool:
        return 0 <= index < self.m

    @classmethod
    def anonymous(cls, m, n) -> "Partition":
        """Partition with synthetic ids, for matrices loaded without corpora."""
        order = tuple(f"#{i}" for i in range(m + n))
        return cls(m, n, order)


def make_partition(train: Corpus, test: Corpus) -> Partition:
    """Joint order over a training and a test corpus with disjoint ids."""
    shared = set(train.ids) & set(test.ids)
    if shared:
        sample = ", ".join(sorted(shared)[:5])
        raise ValidationError(f"train and test corpora share ids (e.g. {sample})")
    return Partition(len(train), len(test), train.ids + test.ids)


class LabelCodec:
    """Ordered class list with one-vs-rest +/-1 target encoding.

    Classes are kept in sorted order so the encoding is deterministic.
    Binary problems use a single target vector that is +1 for the second
    class and -1 for the first; multiclass problems get one vector per
    class.
    """

    def __init__(self, classes):
        classes = tuple(classes)
        if not classes:
            raise ValidationError("label codec needs at least one class")
        if len(set(classes)) != len(classes):
            raise ValidationError("label codec classes must be distinct")
        if list(classes) != sorted(classes):
            raise ValidationError("label codec classes must be sorted")
        self.classes = classes

    @classmethod
    def from_labels(cls, labels) -> "LabelCodec":
        return cls(sorted(set(labels)))

    @property
    def n_vectors(self) -> int:
        """Number of +/-1 target vectors (1 for binary, one per class otherwise)."""
        return 1 if len(self.classes) <= 2 else len(self.classes)

    def targets(self, labels) -> np.ndarray:
        """Encode labels as an (n_samples, n_vectors) array of +/-1 targets."""
        class_index = {c: i for i, c in enumerate(self.classes)}
        try:
            idx = np.array([class_index[lab] for lab in labels], dtype=np.intp)
        except KeyError as exc:
            raise ValidationError(f"unknown label {exc.args[0]!r}") from None
        if len(self.classes) == 1:
            return np.ones((len(idx), 1))
        if len(self.classes) == 2:
            return np.where(idx == 1, 1.0, -1.0).reshape(-1, 1)
        targets = -np.ones((len(idx), len(self.classes)))
        targets[np.arange(len(idx)), idx] = 1.0
        return targets
