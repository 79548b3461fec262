"""From-scratch classifier roster behind one fit/predict contract."""

from opentrend.learners.base import (
    ClassifierSpec,
    ConstantState,
    Standardizer,
    TrainedModel,
    family_names,
    fit,
    model_from_json,
    model_to_json,
    predict,
    sigmoid,
    softplus,
)

# importing the family modules registers them with the base dispatcher
from opentrend.learners import trees, forest, boosting, naive_bayes, neighbors, linear, mlp  # noqa: F401, E402
from opentrend.learners.presets import PRESET_NAMES, REPORT_LABELS, preset

__all__ = [
    "ClassifierSpec",
    "ConstantState",
    "Standardizer",
    "TrainedModel",
    "family_names",
    "fit",
    "predict",
    "preset",
    "model_to_json",
    "model_from_json",
    "sigmoid",
    "softplus",
    "PRESET_NAMES",
    "REPORT_LABELS",
]
