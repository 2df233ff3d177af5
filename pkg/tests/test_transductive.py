import numpy as np
import pytest

from transkernel.corpus import Partition
from transkernel.errors import ValidationError
from transkernel.krr import KernelRidgeClassifier
from transkernel.matrix import KernelMatrix
from transkernel.string_kernels import KernelSpec, gram_from_corpora
from transkernel.synthetic import make_cross_domain_corpus
from transkernel.transductive import TransductiveKernelClassifier
from transkernel.transforms import normalize, rbf_transform, transductive_kernel

SPEC = KernelSpec(kind="presence", p_min=5, p_max=5)


def adapted_kernel(seed, n=60):
    train, test = make_cross_domain_corpus(seed, n_train=n, n_test=n)
    raw = gram_from_corpora(train, test.without_labels(), SPEC)
    kernel = transductive_kernel(rbf_transform(normalize(raw)))
    return kernel, train.require_labels(), test.require_labels()


class TestValidation:
    def test_stage_gating(self):
        kernel, labels, _ = adapted_kernel(0)
        raw = KernelMatrix(np.eye(kernel.dim), kernel.partition, "raw")
        clf = TransductiveKernelClassifier(n_adopt=2)
        with pytest.raises(ValidationError, match="stage"):
            clf.fit(raw, labels)

    def test_sum_stage_accepted(self):
        kernel, labels, _ = adapted_kernel(0)
        summed = KernelMatrix(kernel.values * 2.0, kernel.partition, "sum")
        clf = TransductiveKernelClassifier(n_adopt=2).fit(summed, labels)
        assert len(clf.transduction_) == kernel.n

    def test_plain_array_accepted(self):
        kernel, labels, _ = adapted_kernel(0)
        clf = TransductiveKernelClassifier(n_adopt=2).fit(kernel.values, labels)
        assert len(clf.transduction_) == kernel.n
        assert clf.trace_.adopted_ids is None

    def test_label_count_mismatch(self):
        kernel, labels, _ = adapted_kernel(0)
        with pytest.raises(ValidationError):
            TransductiveKernelClassifier(n_adopt=2).fit(kernel, labels[:-1])

    def test_negative_adopt_count(self):
        kernel, labels, _ = adapted_kernel(0)
        with pytest.raises(ValidationError):
            TransductiveKernelClassifier(n_adopt=-1).fit(kernel, labels)

    def test_iterations_fixed_at_two(self):
        kernel, labels, _ = adapted_kernel(0)
        with pytest.raises(ValidationError, match="two-round"):
            TransductiveKernelClassifier(n_adopt=2, n_iterations=3).fit(kernel, labels)

    def test_sklearn_params(self):
        clf = TransductiveKernelClassifier(n_adopt=5, alpha=0.1)
        params = clf.get_params()
        assert params == {"n_adopt": 5, "alpha": 0.1, "n_iterations": 2}


class TestDegenerateCases:
    def test_zero_adoption_is_bit_identical_to_plain_classifier(self):
        kernel, labels, _ = adapted_kernel(1)
        plain = KernelRidgeClassifier(alpha=1e-5).fit(kernel.train_block(), labels)
        expected = plain.predict_set(kernel.test_train_block())
        clf = TransductiveKernelClassifier(n_adopt=0, alpha=1e-5).fit(kernel, labels)
        assert clf.prediction_set_.scores.tobytes() == expected.scores.tobytes()
        assert clf.transduction_.tolist() == expected.labels.tolist()
        # both rounds of the degenerate run coincide exactly
        assert (clf.trace_.first_pass.scores.tobytes()
                == clf.trace_.second_pass.scores.tobytes())

    def test_adopt_count_clamped_with_warning(self):
        kernel, labels, _ = adapted_kernel(2, n=20)
        clf = TransductiveKernelClassifier(n_adopt=10_000, alpha=1e-5)
        with pytest.warns(UserWarning, match="exceeds the test-set size"):
            clf.fit(kernel, labels)
        assert len(clf.trace_.adopted_indices) == kernel.n
        assert len(clf.transduction_) == kernel.n


class TestAdoptionRule:
    def test_adopted_are_top_confidence_with_stable_ties(self):
        kernel, labels, _ = adapted_kernel(3)
        r = 10
        clf = TransductiveKernelClassifier(n_adopt=r, alpha=1e-5).fit(kernel, labels)
        conf = clf.trace_.first_pass.confidences
        expected = np.argsort(-conf, kind="stable")[:r]
        np.testing.assert_array_equal(clf.trace_.adopted_indices, expected)
        # adopted confidences dominate every non-adopted confidence
        adopted = set(expected.tolist())
        rest = [conf[i] for i in range(kernel.n) if i not in adopted]
        assert conf[expected].min() >= max(rest)

    def test_exact_ties_adopt_lowest_test_indices(self):
        # a block-constant kernel makes every test confidence identical
        dim, m = 8, 4
        values = np.ones((dim, dim))
        kernel = KernelMatrix(values, Partition.anonymous(m, dim - m), "sum")
        clf = TransductiveKernelClassifier(n_adopt=2, alpha=1.0)
        clf.fit(kernel, ["a", "a", "b", "b"])
        assert clf.trace_.adopted_indices.tolist() == [0, 1]

    def test_pseudo_labels_come_from_first_pass(self):
        kernel, labels, _ = adapted_kernel(4)
        clf = TransductiveKernelClassifier(n_adopt=8, alpha=1e-5).fit(kernel, labels)
        first = clf.trace_.first_pass.labels
        for rank, idx in enumerate(clf.trace_.adopted_indices):
            assert clf.trace_.adopted_pseudo_labels[rank] == first[idx]

    def test_adopted_ids_match_partition(self):
        kernel, labels, _ = adapted_kernel(5)
        clf = TransductiveKernelClassifier(n_adopt=5, alpha=1e-5).fit(kernel, labels)
        test_ids = kernel.partition.test_ids
        assert clf.trace_.adopted_ids == tuple(
            test_ids[i] for i in clf.trace_.adopted_indices
        )


class TestSelfTraining:
    def test_deterministic(self):
        kernel, labels, _ = adapted_kernel(6)
        a = TransductiveKernelClassifier(n_adopt=10, alpha=1e-5).fit(kernel, labels)
        b = TransductiveKernelClassifier(n_adopt=10, alpha=1e-5).fit(kernel, labels)
        assert a.prediction_set_.scores.tobytes() == b.prediction_set_.scores.tobytes()
        np.testing.assert_array_equal(a.trace_.adopted_indices, b.trace_.adopted_indices)

    def test_final_predictions_cover_all_test_samples(self):
        kernel, labels, _ = adapted_kernel(7)
        clf = TransductiveKernelClassifier(n_adopt=10, alpha=1e-5).fit(kernel, labels)
        assert clf.prediction_set_.scores.shape[0] == kernel.n
        assert set(clf.transduction_) <= set(clf.classes_)

    def test_second_round_is_prediction_set(self):
        kernel, labels, _ = adapted_kernel(8)
        clf = TransductiveKernelClassifier(n_adopt=10, alpha=1e-5).fit(kernel, labels)
        assert clf.prediction_set_ is clf.trace_.second_pass

    def test_fit_predict(self):
        kernel, labels, _ = adapted_kernel(9)
        labels_out = TransductiveKernelClassifier(n_adopt=10, alpha=1e-5).fit_predict(
            kernel, labels
        )
        assert len(labels_out) == kernel.n

    def test_trace_serializes(self):
        import json

        kernel, labels, _ = adapted_kernel(10)
        clf = TransductiveKernelClassifier(n_adopt=4, alpha=1e-5).fit(kernel, labels)
        blob = json.dumps(clf.trace_.to_dict())
        assert "iteration_1" in blob and "iteration_2" in blob

    def test_improves_on_cross_domain_task(self):
        # discriminative test-domain vocabulary is only reachable through
        # the adopted samples; averaged over seeds the second round wins
        gains = []
        for seed in range(6):
            kernel, labels, gold = adapted_kernel(seed, n=200)
            clf = TransductiveKernelClassifier(n_adopt=60, alpha=1e-5).fit(kernel, labels)
            first = np.mean(clf.trace_.first_pass.labels == np.asarray(gold, dtype=object))
            second = np.mean(clf.transduction_ == np.asarray(gold, dtype=object))
            gains.append(second - first)
        assert np.mean(gains) >= 0.0
