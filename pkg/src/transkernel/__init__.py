"""String-kernel text classification with transductive domain adaptation.

The toolkit computes character n-gram string kernels over a joint
train+test document collection, adapts the kernel to the test domain
through a normalize / smooth / re-embed transform chain, and classifies
with kernel ridge regression, optionally adding a two-round self-training
pass over the most confident test predictions.
"""

from .corpus import (
    Corpus,
    Document,
    LabelCodec,
    Partition,
    UNLABELED_MARKER,
    concat_corpora,
    load_corpus,
    make_partition,
    save_corpus,
)
from .errors import (
    ConfigError,
    DataFormatError,
    NumericalError,
    TranskernelError,
    ValidationError,
)
from .evaluation import (
    EvalResult,
    McNemarResult,
    accuracy,
    evaluate_predictions,
    mcnemar,
    read_predictions,
    write_predictions,
)
from .experiment import (
    ExperimentConfig,
    MethodSpec,
    load_config,
    render_table,
    run_experiment,
)
from .krr import (
    KernelRidgeClassifier,
    PredictionSet,
    load_model,
    save_model,
)
from .matrix import KernelMatrix, export_csv, load_kmat, save_kmat
from .string_kernels import (
    KERNEL_KINDS,
    KernelSpec,
    NGramProfile,
    gram_from_corpora,
    gram_matrix,
    kernel_value,
    ngram_profile,
)
from .synthetic import make_cross_domain_corpus
from .transductive import TkcTrace, TransductiveKernelClassifier
from .transforms import (
    DEFAULT_SIGMA2,
    load_dense_features,
    normalize,
    rbf_dense_kernel,
    rbf_transform,
    sum_kernels,
    transductive_kernel,
)

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "Document",
    "LabelCodec",
    "Partition",
    "UNLABELED_MARKER",
    "concat_corpora",
    "load_corpus",
    "make_partition",
    "save_corpus",
    "ConfigError",
    "DataFormatError",
    "NumericalError",
    "TranskernelError",
    "ValidationError",
    "EvalResult",
    "McNemarResult",
    "accuracy",
    "evaluate_predictions",
    "mcnemar",
    "read_predictions",
    "write_predictions",
    "ExperimentConfig",
    "MethodSpec",
    "load_config",
    "render_table",
    "run_experiment",
    "KernelRidgeClassifier",
    "PredictionSet",
    "load_model",
    "save_model",
    "KernelMatrix",
    "export_csv",
    "load_kmat",
    "save_kmat",
    "KERNEL_KINDS",
    "KernelSpec",
    "NGramProfile",
    "gram_from_corpora",
    "gram_matrix",
    "kernel_value",
    "ngram_profile",
    "make_cross_domain_corpus",
    "TkcTrace",
    "TransductiveKernelClassifier",
    "DEFAULT_SIGMA2",
    "load_dense_features",
    "normalize",
    "rbf_dense_kernel",
    "rbf_transform",
    "sum_kernels",
    "transductive_kernel",
    "__version__",
]
