"""Config-driven cross-domain experiment runner.

A JSON config names the domain corpora, the kernel methods to compare,
and the adaptation settings.  The runner builds every train/test cell
for the chosen mode, scores each method in each cell, and reports
accuracies with paired significance marks against a baseline method.

Multi-source mode holds one domain out as the test set and trains on
the union of the rest; single-source mode runs every ordered domain
pair.  Test-set gold labels are used for scoring only and never reach
the kernel or the classifiers.
"""

import json
import os
import re
from dataclasses import dataclass

import numpy as np

from .corpus import concat_corpora, load_corpus
from .errors import ConfigError, DataFormatError
from .evaluation import evaluate_predictions, mcnemar, write_predictions
from .krr import KernelRidgeClassifier
from .matrix import save_kmat
from .string_kernels import KERNEL_KINDS, KernelSpec, gram_from_corpora
from .transductive import TransductiveKernelClassifier
from .transforms import DEFAULT_SIGMA2, normalize, rbf_transform, transductive_kernel

MODES = ("multi-source", "single-source")
PIPELINES = ("baseline", "transductive")
BEST_BASELINE = "best"

_CONFIG_KEYS = {
    "mode",
    "domains",
    "methods",
    "baseline",
    "lambda",
    "r",
    "sigma2",
    "lowercase",
    "unicode_grams",
    "renormalize",
    "output",
    "predictions_dir",
    "matrices_dir",
    "seed",
}
_METHOD_KEYS = {"name", "kernel", "pipeline", "tkc"}
_KERNEL_KEYS = {"kind", "pmin", "pmax"}


@dataclass(frozen=True)
class MethodSpec:
    """One column of the comparison: a kernel plus a pipeline choice."""

    name: str
    kernel: KernelSpec
    pipeline: str
    tkc: bool


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    domains: tuple  # ((name, path), ...) in config order
    methods: tuple  # (MethodSpec, ...)
    baseline: str
    ridge_lambda: float
    n_adopt: int
    sigma2: float
    lowercase: bool
    unicode_grams: bool
    renormalize: bool
    output: str | None
    predictions_dir: str | None
    matrices_dir: str | None
    seed: int | None


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _check_keys(mapping: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    _require(not unknown, f"{where}: unknown keys {unknown}")


def _parse_method(entry, position: int) -> MethodSpec:
    where = f"methods[{position}]"
    _require(isinstance(entry, dict), f"{where}: expected an object")
    _check_keys(entry, _METHOD_KEYS, where)
    name = entry.get("name")
    _require(isinstance(name, str) and name, f"{where}: 'name' must be a non-empty string")
    kernel = entry.get("kernel")
    _require(isinstance(kernel, dict), f"{where}: 'kernel' must be an object")
    _check_keys(kernel, _KERNEL_KEYS, f"{where}.kernel")
    kind = kernel.get("kind")
    _require(kind in KERNEL_KINDS, f"{where}.kernel: 'kind' must be one of {KERNEL_KINDS}")
    pmin, pmax = kernel.get("pmin"), kernel.get("pmax")
    _require(
        isinstance(pmin, int) and isinstance(pmax, int) and not isinstance(pmin, bool)
        and not isinstance(pmax, bool),
        f"{where}.kernel: 'pmin' and 'pmax' must be integers",
    )
    _require(1 <= pmin <= pmax, f"{where}.kernel: need 1 <= pmin <= pmax")
    pipeline = entry.get("pipeline", "transductive")
    _require(pipeline in PIPELINES, f"{where}: 'pipeline' must be one of {PIPELINES}")
    tkc = entry.get("tkc", False)
    _require(isinstance(tkc, bool), f"{where}: 'tkc' must be a boolean")
    _require(
        not (tkc and pipeline != "transductive"),
        f"{where}: self-training requires the transductive pipeline",
    )
    return MethodSpec(
        name=name,
        kernel=KernelSpec(kind=kind, p_min=pmin, p_max=pmax),
        pipeline=pipeline,
        tkc=tkc,
    )


def _positive_number(raw, default, where: str) -> float:
    if raw is None:
        return default
    _require(
        isinstance(raw, (int, float)) and not isinstance(raw, bool) and raw > 0,
        f"{where} must be a positive number",
    )
    return float(raw)


def config_from_dict(data: dict, base_dir: str = ".") -> ExperimentConfig:
    """Validate a parsed config and resolve paths relative to ``base_dir``."""
    _require(isinstance(data, dict), "config root must be an object")
    _check_keys(data, _CONFIG_KEYS, "config")

    mode = data.get("mode")
    _require(mode in MODES, f"'mode' must be one of {MODES}")

    domains_raw = data.get("domains")
    _require(
        isinstance(domains_raw, dict) and len(domains_raw) >= 2,
        "'domains' must map at least two domain names to corpus paths",
    )
    domains = []
    for name, path in domains_raw.items():
        _require(isinstance(name, str) and name, "domain names must be non-empty strings")
        _require(isinstance(path, str) and path, f"domains[{name!r}]: path must be a string")
        domains.append((name, os.path.join(base_dir, path)))

    methods_raw = data.get("methods")
    _require(
        isinstance(methods_raw, list) and methods_raw,
        "'methods' must be a non-empty list",
    )
    methods = [_parse_method(entry, i) for i, entry in enumerate(methods_raw)]
    names = [m.name for m in methods]
    _require(len(set(names)) == len(names), f"duplicate method names in {names}")

    baseline = data.get("baseline", BEST_BASELINE)
    _require(
        baseline == BEST_BASELINE or baseline in names,
        f"'baseline' must be {BEST_BASELINE!r} or one of {names}",
    )

    ridge_lambda = _positive_number(data.get("lambda"), 1e-5, "'lambda'")
    sigma2 = _positive_number(data.get("sigma2"), DEFAULT_SIGMA2, "'sigma2'")
    n_adopt = data.get("r", 1000)
    _require(
        isinstance(n_adopt, int) and not isinstance(n_adopt, bool) and n_adopt >= 0,
        "'r' must be a non-negative integer",
    )
    seed = data.get("seed")
    _require(
        seed is None or (isinstance(seed, int) and not isinstance(seed, bool)),
        "'seed' must be an integer",
    )

    flags = {}
    for key in ("lowercase", "unicode_grams", "renormalize"):
        value = data.get(key, False)
        _require(isinstance(value, bool), f"'{key}' must be a boolean")
        flags[key] = value

    paths = {}
    for key in ("output", "predictions_dir", "matrices_dir"):
        value = data.get(key)
        _require(
            value is None or (isinstance(value, str) and value),
            f"'{key}' must be a non-empty string when given",
        )
        paths[key] = os.path.join(base_dir, value) if value is not None else None

    return ExperimentConfig(
        mode=mode,
        domains=tuple(domains),
        methods=tuple(methods),
        baseline=baseline,
        ridge_lambda=ridge_lambda,
        n_adopt=n_adopt,
        sigma2=sigma2,
        lowercase=flags["lowercase"],
        unicode_grams=flags["unicode_grams"],
        renormalize=flags["renormalize"],
        output=paths["output"],
        predictions_dir=paths["predictions_dir"],
        matrices_dir=paths["matrices_dir"],
        seed=seed,
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise DataFormatError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path} is not valid JSON: {exc}") from exc
    return config_from_dict(data, base_dir=os.path.dirname(os.path.abspath(path)))


def _cells(config: ExperimentConfig):
    """Yield (cell_name, source_domains, target_domain) in report order."""
    names = [name for name, _ in config.domains]
    if config.mode == "multi-source":
        for target in names:
            yield target, [d for d in names if d != target], target
    else:
        for source in names:
            for target in names:
                if source != target:
                    yield f"{source}->{target}", [source], target


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "-", name)


class _CellKernels:
    """Per-cell cache of kernel stages, keyed by kernel spec."""

    def __init__(self, train, test, config: ExperimentConfig):
        self.train = train
        self.test = test
        self.config = config
        self._raw = {}
        self._normalized = {}
        self._transductive = {}

    def normalized(self, spec: KernelSpec):
        if spec not in self._normalized:
            if spec not in self._raw:
                self._raw[spec] = gram_from_corpora(
                    self.train, self.test, spec,
                    unicode_grams=self.config.unicode_grams,
                )
            self._normalized[spec] = normalize(self._raw.pop(spec))
        return self._normalized[spec]

    def transductive(self, spec: KernelSpec):
        if spec not in self._transductive:
            smoothed = rbf_transform(self.normalized(spec), sigma2=self.config.sigma2)
            self._transductive[spec] = transductive_kernel(
                smoothed, renormalize=self.config.renormalize
            )
        return self._transductive[spec]


def _run_method(method: MethodSpec, kernels: _CellKernels, config: ExperimentConfig):
    """Return the PredictionSet for one method in one cell."""
    train_labels = kernels.train.require_labels()
    if method.pipeline == "baseline":
        kernel = kernels.normalized(method.kernel)
    else:
        kernel = kernels.transductive(method.kernel)
    if method.tkc:
        clf = TransductiveKernelClassifier(n_adopt=config.n_adopt, alpha=config.ridge_lambda)
        clf.fit(kernel, train_labels)
        return clf.prediction_set_, kernel
    clf = KernelRidgeClassifier(alpha=config.ridge_lambda)
    clf.fit(kernel.train_block(), train_labels)
    return clf.predict_set(kernel.test_train_block()), kernel


def _pick_baseline(config: ExperimentConfig, method: MethodSpec, accuracies: dict):
    """Name of the method this one is compared against, or None."""
    if config.baseline == BEST_BASELINE:
        rivals = [m.name for m in config.methods if m.name != method.name]
        if not rivals:
            return None
        return max(rivals, key=lambda name: (accuracies[name], -rivals.index(name)))
    if method.name == config.baseline:
        return None
    return config.baseline


def run_experiment(config: ExperimentConfig) -> dict:
    """Run every cell and return the report as a plain dict."""
    corpora = {}
    for name, path in config.domains:
        corpus = load_corpus(path, lowercase=config.lowercase)
        corpus.require_labels()  # every domain serves as a training source
        corpora[name] = corpus.prefixed(name)

    for directory in (config.predictions_dir, config.matrices_dir):
        if directory is not None:
            os.makedirs(directory, exist_ok=True)

    cells = []
    per_method_accuracies = {m.name: [] for m in config.methods}
    for cell_name, sources, target in _cells(config):
        train = concat_corpora([corpora[s] for s in sources])
        gold = corpora[target].require_labels()
        test = corpora[target].without_labels()
        kernels = _CellKernels(train, test, config)

        results = {}
        saved_specs = set()
        for method in config.methods:
            predictions, kernel = _run_method(method, kernels, config)
            results[method.name] = {
                "predictions": predictions,
                "eval": evaluate_predictions(predictions.labels, gold),
            }
            if config.predictions_dir is not None:
                write_predictions(
                    os.path.join(
                        config.predictions_dir,
                        f"{_safe_name(cell_name)}__{_safe_name(method.name)}.tsv",
                    ),
                    test.ids,
                    predictions.labels,
                    predictions.confidences,
                )
            if config.matrices_dir is not None:
                spec_key = (method.kernel, kernel.stage)
                if spec_key not in saved_specs:
                    saved_specs.add(spec_key)
                    save_kmat(
                        os.path.join(
                            config.matrices_dir,
                            f"{_safe_name(cell_name)}__{method.kernel.kind}"
                            f"-{method.kernel.p_min}-{method.kernel.p_max}"
                            f"-{kernel.stage}.kmat",
                        ),
                        kernel,
                    )

        accuracies = {name: results[name]["eval"].accuracy for name in results}
        methods_report = {}
        for method in config.methods:
            entry = results[method.name]
            record = entry["eval"].to_dict()
            baseline_name = _pick_baseline(config, method, accuracies)
            record["baseline"] = baseline_name
            if baseline_name is None:
                record["mcnemar"] = None
                record["significant"] = False
            else:
                test_result = mcnemar(
                    entry["eval"].correctness,
                    results[baseline_name]["eval"].correctness,
                )
                record["mcnemar"] = test_result.to_dict()
                record["significant"] = bool(
                    test_result.significant_at_0_01
                    and accuracies[method.name] > accuracies[baseline_name]
                )
            methods_report[method.name] = record
            per_method_accuracies[method.name].append(accuracies[method.name])

        cells.append(
            {
                "name": cell_name,
                "train_domains": sources,
                "test_domain": target,
                "m": len(train),
                "n": len(test),
                "methods": methods_report,
            }
        )

    report = {
        "mode": config.mode,
        "domains": [name for name, _ in config.domains],
        "baseline": config.baseline,
        "settings": {
            "lambda": config.ridge_lambda,
            "r": config.n_adopt,
            "sigma2": config.sigma2,
            "lowercase": config.lowercase,
            "unicode_grams": config.unicode_grams,
            "renormalize": config.renormalize,
            "seed": config.seed,
        },
        "methods": [m.name for m in config.methods],
        "cells": cells,
        "mean_accuracy": {
            name: float(np.mean(values)) for name, values in per_method_accuracies.items()
        },
    }
    report["table"] = render_table(report)
    if config.output is not None:
        with open(config.output, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")
    return report


def render_table(report: dict) -> str:
    """Aligned text table: one row per method, one column per cell."""
    cell_names = [cell["name"] for cell in report["cells"]]
    header = ["method"] + cell_names + ["mean"]
    rows = [header]
    for name in report["methods"]:
        row = [name]
        for cell in report["cells"]:
            record = cell["methods"][name]
            mark = "*" if record["significant"] else ""
            row.append(f"{100.0 * record['accuracy']:.2f}{mark}")
        row.append(f"{100.0 * report['mean_accuracy'][name]:.2f}")
        rows.append(row)
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for row in rows:
        cells = [row[0].ljust(widths[0])]
        cells += [value.rjust(widths[i]) for i, value in enumerate(row) if i > 0]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)
