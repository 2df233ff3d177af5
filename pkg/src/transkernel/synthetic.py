"""Synthetic cross-domain text generator.

Builds a balanced binary task over two vocabularically disjoint domains.
A handful of class-marker words is shared by both domains but appears
with noise, so a classifier trained on the source domain generalizes
imperfectly.  Each domain additionally has its own background vocabulary
whose words lean toward one class.  Target-domain leaning words never
occur in the source training data, which is exactly the signal a
transductive second round can pick up from confidently self-labeled test
documents.

Documents come in antithetic twin pairs: for every document of one class
the generator emits an opposite-class twin whose text is the letter-wise
rot13 image.  Rot13 maps the vocabulary of one class onto the other, so
the resulting n-gram kernel matrix is exactly invariant under the class
swap.  Prediction scores on such a task are antisymmetric between twins,
which keeps confidence-ranked adoption in self-training balanced across
classes instead of drifting toward whichever class a random vocabulary
happens to favor.
"""

import string

import numpy as np

from .corpus import Corpus, Document
from .errors import ValidationError

CLASSES = ("neg", "pos")

_LETTERS = np.array(list(string.ascii_lowercase))
_ROT13 = str.maketrans(
    string.ascii_lowercase,
    string.ascii_lowercase[13:] + string.ascii_lowercase[:13],
)


def _mirror(word: str) -> str:
    return word.translate(_ROT13)


def _fresh_words(rng, count: int, taken: set, length: int = 5) -> list:
    """Random lowercase words whose rot13 images are also unused."""
    out = []
    while len(out) < count:
        word = "".join(rng.choice(_LETTERS, size=length))
        twin = _mirror(word)
        if word not in taken and twin not in taken and word != twin:
            taken.update((word, twin))
            out.append(word)
    return out


def _pair_tokens(rng, markers, background, params) -> list:
    """Token list for one positive-class document; the twin is its mirror."""
    tokens = []
    for word in markers:
        if rng.random() < params["marker_rate"]:
            tokens.append(word)
    for word in markers:
        if rng.random() < params["noise_rate"]:
            tokens.append(_mirror(word))
    for _ in range(params["doc_len"]):
        word = background[rng.integers(len(background))]
        if rng.random() >= params["lean"]:
            word = _mirror(word)
        tokens.append(word)
    rng.shuffle(tokens)
    return tokens


def _twin_documents(rng, id_prefix, count, markers, background, params) -> list:
    """``count`` documents as adjacent (positive, negative) twin pairs."""
    docs = []
    for pair in range(count // 2):
        tokens = _pair_tokens(rng, markers, background, params)
        text = " ".join(tokens)
        docs.append(
            Document(
                id=f"{id_prefix}-{2 * pair:04d}",
                text=text.encode("ascii"),
                label=CLASSES[1],
            )
        )
        docs.append(
            Document(
                id=f"{id_prefix}-{2 * pair + 1:04d}",
                text=_mirror(text).encode("ascii"),
                label=CLASSES[0],
            )
        )
    return docs


def make_cross_domain_corpus(
    seed: int,
    n_train: int = 500,
    n_test: int = 500,
    n_markers: int = 3,
    marker_rate: float = 0.55,
    noise_rate: float = 0.10,
    lean: float = 0.75,
    n_background: int = 20,
    doc_len: int = 30,
):
    """Generate (train_corpus, test_corpus) for one random seed.

    Train documents come from the source domain, test documents from the
    target domain.  Both corpora carry gold labels; test labels are meant
    for scoring only.  Sizes must be even because documents are generated
    as class-balanced twin pairs.
    """
    if n_train % 2 or n_test % 2:
        raise ValidationError(
            f"twin-pair generation needs even sizes, got n_train={n_train}, n_test={n_test}"
        )
    if n_train <= 0 or n_test <= 0:
        raise ValidationError("corpus sizes must be positive")
    rng = np.random.default_rng(seed)
    taken: set = set()
    markers = _fresh_words(rng, n_markers, taken)
    source_bg = _fresh_words(rng, n_background, taken)
    target_bg = _fresh_words(rng, n_background, taken)
    params = {
        "marker_rate": marker_rate,
        "noise_rate": noise_rate,
        "lean": lean,
        "doc_len": doc_len,
    }
    train_docs = _twin_documents(rng, "src", n_train, markers, source_bg, params)
    test_docs = _twin_documents(rng, "tgt", n_test, markers, target_bg, params)
    return Corpus(train_docs), Corpus(test_docs)
