"""Online prediction over expert hidden Markov models.

Thin re-export of the compiled core: load or build a model, run the
filtering / past-posterior mixture / model-free reference algorithms over an
outcome sequence, and invoke the numeric certifications shipped with the
library.
"""

from ._core import (
    CapacityError,
    InvalidInputError,
    Model,
    PredictionTable,
    ZeroProbabilityError,
    check,
    check_names,
    load_model,
    log_partition_prior,
    model_from_text,
    predictions_from_text,
    run,
    run_reference,
    sample_outcomes,
    scheme_weights,
)

__all__ = [
    "CapacityError",
    "InvalidInputError",
    "Model",
    "PredictionTable",
    "ZeroProbabilityError",
    "check",
    "check_names",
    "load_model",
    "log_partition_prior",
    "model_from_text",
    "predictions_from_text",
    "run",
    "run_reference",
    "sample_outcomes",
    "scheme_weights",
]
