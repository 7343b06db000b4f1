"""Mediator diffusion on weighted hypergraphs: Laplacian, gamma_2 and sweep cuts."""
from .core import (
    Edge,
    Hypergraph,
    build,
    edge_extrema,
    from_normalized,
    inner_w,
    load_hypergraph,
    load_vector,
    norm_w,
    to_density,
    to_measure,
    to_normalized,
)
from .diffusion import (
    DensestSubsetInstance,
    DerivativeReport,
    apply_operator,
    densest_subset,
    derivative,
    equivalence_classes,
)
from .errors import HMDError, NumericalError, ValidationError
from .forms import (
    CutResult,
    conductance,
    discrepancy_ratio,
    interaction_matrix,
    quadratic_form,
    quadratic_form_q0,
)
from .partition import exact_conductance, spectral_partition, sweep_cut, two_sided_sweep
from .spectral import FlowConfig, SpectralEstimate, estimate_gamma2, integrate

__all__ = [
    "CutResult",
    "DensestSubsetInstance",
    "DerivativeReport",
    "Edge",
    "FlowConfig",
    "HMDError",
    "Hypergraph",
    "NumericalError",
    "SpectralEstimate",
    "ValidationError",
    "apply_operator",
    "build",
    "conductance",
    "densest_subset",
    "derivative",
    "discrepancy_ratio",
    "edge_extrema",
    "equivalence_classes",
    "estimate_gamma2",
    "exact_conductance",
    "from_normalized",
    "inner_w",
    "integrate",
    "interaction_matrix",
    "load_hypergraph",
    "load_vector",
    "norm_w",
    "quadratic_form",
    "quadratic_form_q0",
    "spectral_partition",
    "sweep_cut",
    "to_density",
    "to_measure",
    "to_normalized",
    "two_sided_sweep",
]
