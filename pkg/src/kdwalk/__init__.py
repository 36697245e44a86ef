"""Staggered quantum-walk toolkit for element k-distinctness.

Three ways to evaluate the same search algorithm: closed-form spectral
predictions, exact evolution in the small invariant subspace (any n), and
a dense full-graph simulation (small n) with an optional two-register
variant that tracks the oracle explicitly.
"""

from ._version import __version__
from .combinatorics import (
    KDistinctnessInstance,
    ProblemParams,
    binomial,
    canonical_instance,
    class_basis,
    class_fraction,
    class_position,
    class_size,
    classical_k_collision,
    count_k_collisions,
    make_instance,
    nearest_r,
    unique_colliding_set,
    vertex_count,
)
from .fullwalk import (
    WalkSpace,
    apply_phase_flip,
    apply_polygon_reflection,
    build_tessellations,
    build_walk_space,
    dump_state,
    enumerate_vertices,
    load_state,
    marked_mask,
    project_onto_classes,
    query_accounting,
    run_full_algorithm,
    sample_measurement,
    sample_success_count,
)
from .microsim import TwoRegisterSim, run_two_register_microsim
from .reduced import (
    ReducedWalk,
    SpectralData,
    asymptotic_success,
    build_reduced_walk,
    completeness_sum,
    compute_spectral_data,
    eigenphases,
    evolve_reduced,
    gap_constant,
    initial_reduced_state,
    marked_class_overlaps,
    principal_phase,
    principal_phase_numeric,
    probability_series,
    step_parameters,
    success_probability,
)

__all__ = [name for name in dir() if not name.startswith("_")]
