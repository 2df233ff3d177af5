import numpy as np
import pytest

from transkernel.corpus import Partition
from transkernel.errors import ValidationError
from transkernel.string_kernels import KernelSpec, gram_matrix
from transkernel.synthetic import CLASSES, _mirror, make_cross_domain_corpus


class TestMirror:
    def test_rot13_involution(self):
        assert _mirror("abcde") == "nopqr"
        assert _mirror(_mirror("kernel")) == "kernel"

    def test_space_fixed(self):
        assert _mirror("a b") == "n o"


class TestGenerator:
    def test_sizes_and_balance(self):
        train, test = make_cross_domain_corpus(0, n_train=40, n_test=20)
        assert len(train) == 40 and len(test) == 20
        for corpus in (train, test):
            labels = corpus.require_labels()
            assert labels.count("pos") == labels.count("neg")

    def test_labels_are_the_two_classes(self):
        train, _ = make_cross_domain_corpus(1, n_train=10, n_test=10)
        assert set(train.require_labels()) == set(CLASSES)

    def test_ids_unique_across_domains(self):
        train, test = make_cross_domain_corpus(2, n_train=30, n_test=30)
        ids = [d.id for d in train] + [d.id for d in test]
        assert len(set(ids)) == len(ids)

    def test_twin_texts_are_mirrors(self):
        train, _ = make_cross_domain_corpus(3, n_train=20, n_test=10)
        docs = list(train)
        for k in range(0, len(docs), 2):
            pos, neg = docs[k], docs[k + 1]
            assert pos.label == "pos" and neg.label == "neg"
            assert _mirror(pos.text.decode("ascii")) == neg.text.decode("ascii")

    def test_odd_sizes_rejected(self):
        with pytest.raises(ValidationError, match="even"):
            make_cross_domain_corpus(0, n_train=11, n_test=10)
        with pytest.raises(ValidationError, match="even"):
            make_cross_domain_corpus(0, n_train=10, n_test=7)

    def test_nonpositive_sizes_rejected(self):
        with pytest.raises(ValidationError):
            make_cross_domain_corpus(0, n_train=0, n_test=10)

    def test_same_seed_reproduces(self):
        a_train, a_test = make_cross_domain_corpus(7, n_train=20, n_test=20)
        b_train, b_test = make_cross_domain_corpus(7, n_train=20, n_test=20)
        assert [(d.id, d.text, d.label) for d in a_train] == [
            (d.id, d.text, d.label) for d in b_train
        ]
        assert [(d.id, d.text, d.label) for d in a_test] == [
            (d.id, d.text, d.label) for d in b_test
        ]

    def test_seeds_differ(self):
        a, _ = make_cross_domain_corpus(0, n_train=20, n_test=20)
        b, _ = make_cross_domain_corpus(1, n_train=20, n_test=20)
        assert [d.text for d in a] != [d.text for d in b]

    def test_domains_share_only_marker_vocabulary(self):
        train, test = make_cross_domain_corpus(5, n_train=60, n_test=60, n_markers=3)
        def words(corpus):
            out = set()
            for doc in corpus:
                out.update(doc.text.decode("ascii").split())
            return out
        shared = words(train) & words(test)
        # three markers plus their mirrors at most
        assert 0 < len(shared) <= 6


class TestKernelSymmetry:
    def test_gram_invariant_under_class_swap(self):
        # swapping every document with its twin permutes the corpus but,
        # because rot13 is a byte bijection, leaves the kernel values of
        # corresponding pairs untouched: P K P^T == K exactly
        train, _ = make_cross_domain_corpus(11, n_train=16, n_test=2)
        size = len(train)
        partition = Partition.anonymous(size, 0)
        swap = np.arange(size).reshape(-1, 2)[:, ::-1].ravel()
        for kind in ("spectrum", "presence", "intersection"):
            K = gram_matrix(train.texts(), partition, KernelSpec(kind=kind, p_min=2, p_max=4))
            np.testing.assert_array_equal(K.values[np.ix_(swap, swap)], K.values)

    def test_scores_antisymmetric_between_twins(self):
        from transkernel.krr import KernelRidgeClassifier
        from transkernel.string_kernels import gram_from_corpora
        from transkernel.transforms import normalize, rbf_transform, transductive_kernel

        train, test = make_cross_domain_corpus(13, n_train=40, n_test=40)
        raw = gram_from_corpora(train, test.without_labels(), KernelSpec("presence", 5, 5))
        kernel = transductive_kernel(rbf_transform(normalize(raw)))
        clf = KernelRidgeClassifier(alpha=1e-5).fit(
            kernel.train_block(), train.require_labels()
        )
        result = clf.predict_set(kernel.test_train_block())
        twins = result.scores.reshape(-1, 2)
        np.testing.assert_allclose(twins[:, 0], -twins[:, 1], atol=1e-10)
