"""Four classifiers sharing one train/predict/serialize contract."""

from .base import (
    Dataset,
    DimensionMismatchError,
    KindMismatchError,
    ModelFormatError,
    TrainedModel,
    dumps_model,
    load_model,
    loads_model,
    predict,
    save_model,
)
from .forest import ForestConfig, ForestModel, gini, train_forest
from .linear import (
    LinearModel,
    LogisticConfig,
    LogisticModel,
    SVMConfig,
    SVMModel,
    hinge_objective,
    logistic_loss_grad,
    train_logistic,
    train_svm,
)
from .naive_bayes import NBConfig, NBModel, train_naive_bayes

# canonical order: rows of the experiment grid
ALGORITHMS = ("forest", "naive_bayes", "svm", "logistic")

CONFIGS = {
    "naive_bayes": NBConfig,
    "logistic": LogisticConfig,
    "svm": SVMConfig,
    "forest": ForestConfig,
}

TRAINERS = {
    "naive_bayes": train_naive_bayes,
    "logistic": train_logistic,
    "svm": train_svm,
    "forest": train_forest,
}

MODEL_KINDS = {"naive_bayes": "naive_bayes", "logistic": "logistic", "svm": "svm_ovr", "forest": "forest"}


def train(algorithm: str, data: Dataset, config=None) -> TrainedModel:
    if algorithm not in TRAINERS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")
    return TRAINERS[algorithm](data, config if config is not None else CONFIGS[algorithm]())
