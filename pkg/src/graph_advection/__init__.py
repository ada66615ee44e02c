"""Axiomatic advection operators on distance-weighted directed graphs."""
from .dynamics import (
    Trajectory,
    average_displacement,
    center_of_mass,
    cone_mass,
    evolve,
    flow_residual,
    l1_mass,
    min_value,
    total_mass,
    trajectory,
)
from .graph import (
    Graph,
    GraphClassification,
    Potential,
    build_graph,
    classify,
    compute_potential,
    iterated_neighborhood,
    neighbors,
    read_edge_list,
    signed_distance,
    successor_cone,
    write_edge_list,
)
from .operators import AdvectionMatrix, AxiomReport, Kind, Status, apply, build_operator, check_axioms, inf_norm

__version__ = "0.1.0"
