import pytest

from transkernel.corpus import (
    Corpus,
    Document,
    LabelCodec,
    Partition,
    concat_corpora,
    load_corpus,
    make_partition,
    save_corpus,
)
from transkernel.errors import DataFormatError, ValidationError


def doc(doc_id, text, label=None):
    return Document(doc_id, text.encode("utf-8"), label)


class TestDocument:
    def test_fields(self):
        d = doc("a", "hello", "pos")
        assert d.id == "a"
        assert d.text == b"hello"
        assert d.label == "pos"

    def test_chars_decodes_utf8(self):
        d = Document("a", "café".encode("utf-8"))
        assert d.chars() == "café"
        assert len(d.text) == 5  # two bytes for the accented character

    def test_empty_id_rejected(self):
        with pytest.raises(ValidationError):
            Document("", b"x")

    def test_text_must_be_bytes(self):
        with pytest.raises(ValidationError):
            Document("a", "not bytes")

    def test_unlabeled_marker_reserved(self):
        with pytest.raises(ValidationError):
            Document("a", b"x", "?")

    def test_empty_label_rejected(self):
        with pytest.raises(ValidationError):
            Document("a", b"x", "")


class TestCorpus:
    def test_order_and_lookup(self):
        c = Corpus([doc("a", "x"), doc("b", "y")])
        assert len(c) == 2
        assert c.ids == ("a", "b")
        assert c.by_id("b").text == b"y"
        assert c[0].id == "a"

    def test_unknown_id(self):
        c = Corpus([doc("a", "x")])
        with pytest.raises(ValidationError):
            c.by_id("zzz")

    def test_duplicate_ids_rejected(self):
        with pytest.raises(ValidationError):
            Corpus([doc("a", "x"), doc("a", "y")])

    def test_labels_and_require(self):
        c = Corpus([doc("a", "x", "pos"), doc("b", "y")])
        assert c.labels() == ("pos", None)
        with pytest.raises(ValidationError):
            c.require_labels()
        assert Corpus([doc("a", "x", "pos")]).require_labels() == ["pos"]

    def test_without_labels(self):
        c = Corpus([doc("a", "x", "pos")]).without_labels()
        assert c.labels() == (None,)
        assert c.by_id("a").text == b"x"

    def test_prefixed(self):
        c = Corpus([doc("a", "x", "pos")]).prefixed("books")
        assert c.ids == ("books:a",)
        assert c.by_id("books:a").label == "pos"

    def test_texts_modes(self):
        c = Corpus([Document("a", "café".encode("utf-8"))])
        assert c.texts() == ["café".encode("utf-8")]
        assert c.texts(unicode_grams=True) == ["café"]

    def test_concat_requires_unique_ids(self):
        a = Corpus([doc("a", "x")])
        b = Corpus([doc("b", "y")])
        assert concat_corpora([a, b]).ids == ("a", "b")
        with pytest.raises(ValidationError):
            concat_corpora([a, a])


class TestCorpusFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "c.tsv"
        original = Corpus(
            [
                doc("d1", "some text", "pos"),
                doc("d2", "tab\tinside text", "neg"),
                doc("d3", "unlabeled text"),
            ]
        )
        save_corpus(original, path)
        assert load_corpus(path) == original

    def test_unlabeled_marker_round_trip(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_bytes(b"d1\t?\tsome text\n")
        c = load_corpus(path)
        assert c.by_id("d1").label is None

    def test_crlf_line_endings(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_bytes(b"d1\tpos\ttext one\r\nd2\tneg\ttext two\r\n")
        c = load_corpus(path)
        assert c.by_id("d1").text == b"text one"
        assert c.by_id("d2").label == "neg"

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_bytes(b"d1\tpos\tx\n\n\nd2\tneg\ty\n")
        assert len(load_corpus(path)) == 2

    def test_lowercase_option(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_bytes(b"d1\tpos\tHeLLo\n")
        assert load_corpus(path).by_id("d1").text == b"HeLLo"
        assert load_corpus(path, lowercase=True).by_id("d1").text == b"hello"

    def test_missing_fields(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_bytes(b"d1\tpos\n")
        with pytest.raises(DataFormatError, match="c.tsv:1"):
            load_corpus(path)

    def test_empty_id_in_file(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_bytes(b"\tpos\tx\n")
        with pytest.raises(DataFormatError):
            load_corpus(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataFormatError):
            load_corpus(tmp_path / "absent.tsv")

    def test_newline_in_text_rejected_on_save(self, tmp_path):
        c = Corpus([Document("a", b"two\nlines")])
        with pytest.raises(ValidationError):
            save_corpus(c, tmp_path / "c.tsv")


class TestPartition:
    def test_blocks(self):
        p = Partition(2, 1, ("a", "b", "c"))
        assert p.size == 3
        assert p.train_ids == ("a", "b")
        assert p.test_ids == ("c",)
        assert p.is_train(1) and not p.is_train(2)

    def test_size_mismatch(self):
        with pytest.raises(ValidationError):
            Partition(2, 2, ("a", "b", "c"))

    def test_duplicate_order(self):
        with pytest.raises(ValidationError):
            Partition(1, 1, ("a", "a"))

    def test_anonymous(self):
        p = Partition.anonymous(2, 1)
        assert p.order == ("#0", "#1", "#2")

    def test_make_partition(self):
        train = Corpus([doc("a", "x"), doc("b", "y")])
        test = Corpus([doc("c", "z")])
        p = make_partition(train, test)
        assert (p.m, p.n) == (2, 1)
        assert p.order == ("a", "b", "c")

    def test_make_partition_shared_ids(self):
        train = Corpus([doc("a", "x")])
        test = Corpus([doc("a", "z")])
        with pytest.raises(ValidationError):
            make_partition(train, test)


class TestLabelCodec:
    def test_sorted_classes(self):
        codec = LabelCodec.from_labels(["pos", "neg", "pos"])
        assert codec.classes == ("neg", "pos")

    def test_unsorted_rejected(self):
        with pytest.raises(ValidationError):
            LabelCodec(("pos", "neg"))

    def test_binary_targets(self):
        # one target vector; +1 marks the second class in sorted order
        codec = LabelCodec(("neg", "pos"))
        assert codec.n_vectors == 1
        targets = codec.targets(["pos", "neg", "pos"])
        assert targets.shape == (3, 1)
        assert targets[:, 0].tolist() == [1.0, -1.0, 1.0]

    def test_multiclass_targets(self):
        codec = LabelCodec(("a", "b", "c"))
        assert codec.n_vectors == 3
        targets = codec.targets(["b", "c"])
        assert targets.tolist() == [[-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]

    def test_single_class(self):
        codec = LabelCodec(("only",))
        assert codec.targets(["only", "only"]).tolist() == [[1.0], [1.0]]

    def test_unknown_label(self):
        codec = LabelCodec(("neg", "pos"))
        with pytest.raises(ValidationError):
            codec.targets(["mystery"])
