"""Command-line interface.

Each subcommand wraps one pipeline step so multi-hour runs can be staged
and resumed from files: compute a joint kernel matrix, push it through
the normalization / smoothing / test-adaptation transforms, train or
apply a classifier, run self-training, score predictions, or drive a
whole multi-domain comparison from a JSON config.

Exit codes: 0 on success, 2 for invalid flags or configuration, 3 for
malformed data files, 4 for numerical failures.
"""

import argparse
import dataclasses
import json
import sys

import numpy as np

from .corpus import Partition, load_corpus, make_partition, save_corpus
from .errors import TranskernelError, ValidationError
from .evaluation import evaluate_predictions, mcnemar, read_predictions, write_predictions
from .experiment import load_config, run_experiment
from .krr import KernelRidgeClassifier, load_model, save_model
from .matrix import export_csv, load_kmat, save_kmat
from .string_kernels import KERNEL_KINDS, KernelSpec, gram_from_corpora
from .synthetic import make_cross_domain_corpus
from .transductive import TransductiveKernelClassifier
from .transforms import (
    DEFAULT_SIGMA2,
    load_dense_features,
    normalize,
    rbf_dense_kernel,
    rbf_transform,
    sum_kernels,
    transductive_kernel,
)

DENSE_KIND = "rbf"


def _add_corpus_flags(parser):
    parser.add_argument("--lowercase", action="store_true",
                        help="lowercase text when loading corpora")
    parser.add_argument("--unicode-grams", action="store_true",
                        help="count n-grams over Unicode code points instead of bytes")


def _load_pair(args):
    train = load_corpus(args.train, lowercase=args.lowercase)
    test = load_corpus(args.test, lowercase=args.lowercase)
    return train, test


def _cmd_kernel(args) -> int:
    if args.kind == DENSE_KIND:
        if not (args.train_features and args.test_features):
            raise ValidationError(
                "--kind rbf needs --train-features and --test-features"
            )
        if args.gamma is None:
            raise ValidationError("--kind rbf needs --gamma")
        train_ids, train_vecs = load_dense_features(args.train_features)
        test_ids, test_vecs = load_dense_features(args.test_features)
        if train_vecs.shape[1] != test_vecs.shape[1]:
            raise ValidationError(
                f"feature dimensions differ: {train_vecs.shape[1]} vs {test_vecs.shape[1]}"
            )
        order = tuple(train_ids) + tuple(test_ids)
        if len(set(order)) != len(order):
            raise ValidationError("train and test feature files share ids")
        partition = Partition(len(train_ids), len(test_ids), order)
        kernel = rbf_dense_kernel(
            np.vstack([train_vecs, test_vecs]), args.gamma, partition
        )
    else:
        if not (args.train and args.test):
            raise ValidationError(f"--kind {args.kind} needs --train and --test corpora")
        if args.pmin is None or args.pmax is None:
            raise ValidationError(f"--kind {args.kind} needs --pmin and --pmax")
        train, test = _load_pair(args)
        spec = KernelSpec(kind=args.kind, p_min=args.pmin, p_max=args.pmax)
        kernel = gram_from_corpora(train, test, spec, unicode_grams=args.unicode_grams)
    save_kmat(args.out, kernel)
    print(f"wrote {kernel.stage} kernel ({kernel.m} train + {kernel.n} test) to {args.out}")
    return 0


def _cmd_transform(args) -> int:
    if args.op == "sum":
        kernels = [load_kmat(path) for path in args.inputs]
        result = sum_kernels(kernels)
    else:
        if len(args.inputs) != 1:
            raise ValidationError(f"--op {args.op} takes exactly one --in matrix")
        kernel = load_kmat(args.inputs[0])
        if args.op == "normalize":
            result = normalize(kernel)
        elif args.op == "rbf":
            result = rbf_transform(kernel, sigma2=args.sigma2)
        else:
            result = transductive_kernel(kernel, renormalize=args.renormalize)
    save_kmat(args.out, result)
    print(f"wrote {result.stage} kernel to {args.out}")
    return 0


def _cmd_export(args) -> int:
    export_csv(args.out, load_kmat(args.matrix))
    print(f"wrote CSV to {args.out}")
    return 0


def _cmd_train(args) -> int:
    kernel = load_kmat(args.kernel)
    corpus = load_corpus(args.train, lowercase=False)
    if len(corpus) != kernel.m:
        raise ValidationError(
            f"training corpus has {len(corpus)} documents, kernel has m={kernel.m}"
        )
    model = KernelRidgeClassifier(alpha=args.ridge_lambda)
    model.fit(kernel.train_block(), corpus.require_labels())
    save_model(args.out, model, train_indices=range(kernel.m))
    print(f"trained on {kernel.m} samples ({len(model.classes_)} classes), wrote {args.out}")
    return 0


def _test_ids(args, kernel):
    """Ids for the kernel's test block, from --test when given."""
    if args.test is None:
        return kernel.partition.test_ids
    corpus = load_corpus(args.test, lowercase=False)
    if len(corpus) != kernel.n:
        raise ValidationError(
            f"test corpus has {len(corpus)} documents, kernel has n={kernel.n}"
        )
    return corpus.ids


def _cmd_predict(args) -> int:
    kernel = load_kmat(args.kernel)
    model, train_indices = load_model(args.model)
    if kernel.n == 0:
        raise ValidationError("kernel has no test block to predict on")
    indices = np.asarray(train_indices, dtype=np.intp)
    if indices.size and (indices.min() < 0 or indices.max() >= kernel.dim):
        raise ValidationError(
            f"model training indices exceed the kernel dimension {kernel.dim}"
        )
    rows = kernel.values[kernel.m :, :][:, indices]
    predictions = model.predict_set(rows)
    write_predictions(
        args.out, _test_ids(args, kernel), predictions.labels, predictions.confidences
    )
    print(f"wrote {kernel.n} predictions to {args.out}")
    return 0


def _cmd_tkc(args) -> int:
    order = None
    train = load_corpus(args.train, lowercase=False)
    if args.test is not None:
        test = load_corpus(args.test, lowercase=False)
        order = make_partition(train, test).order
    kernel = load_kmat(args.kernel, order=order)
    if len(train) != kernel.m:
        raise ValidationError(
            f"training corpus has {len(train)} documents, kernel has m={kernel.m}"
        )
    clf = TransductiveKernelClassifier(n_adopt=args.n_adopt, alpha=args.ridge_lambda)
    clf.fit(kernel, train.require_labels())
    predictions = clf.prediction_set_
    write_predictions(
        args.out, kernel.partition.test_ids, predictions.labels, predictions.confidences
    )
    if args.trace is not None:
        with open(args.trace, "w", encoding="utf-8") as fh:
            json.dump(clf.trace_.to_dict(), fh, indent=2)
            fh.write("\n")
    adopted = len(clf.trace_.adopted_indices)
    print(
        f"self-training adopted {adopted} of {kernel.n} test samples; "
        f"wrote predictions to {args.out}"
    )
    return 0


def _aligned_correctness(pred_path, gold):
    """Correctness vector in gold-corpus order for one predictions file."""
    ids, labels, _ = read_predictions(pred_path)
    by_id = dict(zip(ids, labels))
    if len(by_id) != len(ids):
        raise ValidationError(f"{pred_path}: duplicate prediction ids")
    missing = [i for i in gold.ids if i not in by_id]
    if missing:
        raise ValidationError(
            f"{pred_path}: no prediction for gold id(s) {missing[:5]}"
        )
    extra = set(ids) - set(gold.ids)
    if extra:
        raise ValidationError(
            f"{pred_path}: predictions for unknown id(s) {sorted(extra)[:5]}"
        )
    predicted = [by_id[i] for i in gold.ids]
    return evaluate_predictions(predicted, gold.require_labels())


def _cmd_evaluate(args) -> int:
    gold = load_corpus(args.gold, lowercase=False)
    result = _aligned_correctness(args.predictions, gold)
    print(json.dumps(result.to_dict(), indent=2))
    return 0


def _cmd_mcnemar(args) -> int:
    gold = load_corpus(args.gold, lowercase=False)
    result_a = _aligned_correctness(args.predictions_a, gold)
    result_b = _aligned_correctness(args.predictions_b, gold)
    test = mcnemar(result_a.correctness, result_b.correctness)
    payload = test.to_dict()
    payload["accuracy_a"] = result_a.accuracy
    payload["accuracy_b"] = result_b.accuracy
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_experiment(args) -> int:
    config = load_config(args.config)
    if args.output is not None:
        config = dataclasses.replace(config, output=args.output)
    report = run_experiment(config)
    print(report["table"])
    if config.output is not None:
        print(f"wrote report to {config.output}")
    return 0


def _cmd_synth(args) -> int:
    train, test = make_cross_domain_corpus(
        args.seed, n_train=args.n_train, n_test=args.n_test
    )
    save_corpus(train, args.train_out)
    save_corpus(test, args.test_out)
    print(
        f"wrote {len(train)} training and {len(test)} test documents "
        f"(seed {args.seed})"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="transkernel",
        description="String-kernel text classification with transductive adaptation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="compute a joint train+test kernel matrix")
    p.add_argument("--kind", required=True, choices=KERNEL_KINDS + (DENSE_KIND,),
                   help="n-gram kernel kind, or 'rbf' for dense feature vectors")
    p.add_argument("--train", help="training corpus TSV")
    p.add_argument("--test", help="test corpus TSV")
    p.add_argument("--pmin", type=int, help="shortest n-gram length")
    p.add_argument("--pmax", type=int, help="longest n-gram length (inclusive)")
    p.add_argument("--train-features", help="dense feature file for --kind rbf")
    p.add_argument("--test-features", help="dense feature file for --kind rbf")
    p.add_argument("--gamma", type=float, help="RBF width for --kind rbf")
    p.add_argument("--out", required=True, help="output kernel matrix file")
    _add_corpus_flags(p)
    p.set_defaults(func=_cmd_kernel)

    p = sub.add_parser("transform", help="apply a kernel transform stage")
    p.add_argument("--op", required=True,
                   choices=("normalize", "rbf", "transductive", "sum"))
    p.add_argument("--in", dest="inputs", action="append", required=True,
                   metavar="MATRIX", help="input matrix (repeat for --op sum)")
    p.add_argument("--sigma2", type=float, default=DEFAULT_SIGMA2,
                   help="RBF width for --op rbf (default %(default)s)")
    p.add_argument("--renormalize", action="store_true",
                   help="re-normalize after the test-adaptation product")
    p.add_argument("--out", required=True, help="output kernel matrix file")
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("export", help="export a kernel matrix to CSV")
    p.add_argument("--matrix", required=True, help="input kernel matrix file")
    p.add_argument("--out", required=True, help="output CSV file")
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("train", help="fit a kernel ridge classifier")
    p.add_argument("--kernel", required=True, help="joint kernel matrix file")
    p.add_argument("--train", required=True, help="labeled training corpus TSV")
    p.add_argument("--lambda", dest="ridge_lambda", type=float, default=1e-5,
                   help="ridge regularization (default %(default)s)")
    p.add_argument("--out", required=True, help="output model file")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="score the test block with a trained model")
    p.add_argument("--kernel", required=True, help="joint kernel matrix file")
    p.add_argument("--model", required=True, help="trained model file")
    p.add_argument("--test", help="test corpus TSV (for document ids)")
    p.add_argument("--out", required=True, help="output predictions TSV")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("tkc", help="two-round self-training on an adapted kernel")
    p.add_argument("--kernel", required=True,
                   help="joint kernel matrix file (transductive or sum stage)")
    p.add_argument("--train", required=True, help="labeled training corpus TSV")
    p.add_argument("--test", help="test corpus TSV (for document ids)")
    p.add_argument("--r", dest="n_adopt", type=int, default=1000,
                   help="confident test predictions to adopt (default %(default)s)")
    p.add_argument("--lambda", dest="ridge_lambda", type=float, default=1e-5,
                   help="ridge regularization (default %(default)s)")
    p.add_argument("--trace", help="optional JSON audit trail of both rounds")
    p.add_argument("--out", required=True, help="output predictions TSV")
    p.set_defaults(func=_cmd_tkc)

    p = sub.add_parser("evaluate", help="score a predictions file against gold labels")
    p.add_argument("--predictions", required=True, help="predictions TSV")
    p.add_argument("--gold", required=True, help="gold corpus TSV")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("mcnemar", help="paired significance test for two prediction files")
    p.add_argument("--predictions-a", required=True, help="first predictions TSV")
    p.add_argument("--predictions-b", required=True, help="second predictions TSV")
    p.add_argument("--gold", required=True, help="gold corpus TSV")
    p.set_defaults(func=_cmd_mcnemar)

    p = sub.add_parser("experiment", help="run a multi-domain comparison from a config")
    p.add_argument("--config", required=True, help="experiment config JSON")
    p.add_argument("--output", help="override the report path from the config")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("synth", help="generate a synthetic cross-domain demo task")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n-train", type=int, default=500)
    p.add_argument("--n-test", type=int, default=500)
    p.add_argument("--train-out", required=True, help="output training corpus TSV")
    p.add_argument("--test-out", required=True, help="output test corpus TSV")
    p.set_defaults(func=_cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TranskernelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
