"""Exact symbolic algebra in ladder normal form."""
from .algebra import (
    SPHERE,
    AlgebraParams,
    NormalForm,
    SpanError,
    build_pmn,
    casimir,
    commutator,
    dagger,
    eigen_residuals,
    expand_in_basis,
    inner,
    jminus,
    jplus,
    laplacian,
    multiply,
    norm_formula,
    one,
    pi0,
    xgen,
    ygen,
    zgen,
)
from .table1 import load_table1, table1_check
from .scalar import EPS, RSQ, Z, ExactScalar

__all__ = [
    "SPHERE",
    "AlgebraParams",
    "NormalForm",
    "SpanError",
    "ExactScalar",
    "EPS",
    "RSQ",
    "Z",
    "build_pmn",
    "casimir",
    "commutator",
    "dagger",
    "eigen_residuals",
    "expand_in_basis",
    "inner",
    "jminus",
    "jplus",
    "laplacian",
    "multiply",
    "norm_formula",
    "one",
    "pi0",
    "xgen",
    "ygen",
    "zgen",
    "load_table1",
    "table1_check",
]
