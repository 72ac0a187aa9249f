"""Video quality features (full- and no-reference) and MOS regressors."""

from ._core import (
    Error,
    Model,
    extract_fr,
    extract_nr,
    fit_ggd,
    fr_feature_names,
    nr_feature_names,
    pcc,
    read_raw,
    read_y4m,
    run_splits,
    srcc,
    train,
    write_y4m,
)

__all__ = [
    "Error",
    "Model",
    "extract_fr",
    "extract_nr",
    "fit_ggd",
    "fr_feature_names",
    "nr_feature_names",
    "pcc",
    "read_raw",
    "read_y4m",
    "run_splits",
    "srcc",
    "train",
    "write_y4m",
]
