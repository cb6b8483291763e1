"""Uniform perfectness, quasisymmetric and quasimobius maps on finite quasi-metric spaces."""

from .core import (
    AxiomReport,
    DomainError,
    InsufficientPointsError,
    MalformedInputError,
    QuasiMetricError,
    QuasiMetricSpace,
    SpaceGeneratorSpec,
    SpecError,
    arithmetic_grid,
    cantor,
    euclidean_space,
    generate_space,
    geometric,
    load_space,
    min_quasimetric_coefficient,
    perturbed_metric_space,
    save_space,
    snowflake_transform,
    validate_space,
)

__version__ = "0.1.0"
