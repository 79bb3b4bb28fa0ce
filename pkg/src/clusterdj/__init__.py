"""Measurement-based Deutsch-Jozsa on a six-qubit photonic cluster state.

The package simulates the two-photon, six-qubit E cluster, runs the balanced
and constant measurement patterns with feed-forward, models per-degree-of-freedom
dephasing and evaluates the stabilizer entanglement witness.
"""

from __future__ import annotations

from .characterization import (
    OutputTable,
    WitnessSpec,
    e_cluster_witness,
    fidelity_lower_bound,
    render_table,
    witness_expectation,
)
from .core import DensityMatrix, InputError, PauliString, StateVector, ZeroProbabilityError
from .deutsch import BooleanFunction, FunctionClass, classical_decide, classify, dj_decide, dj_run
from .graphs import E_GRAPH, HE6_GRAPH, Frame, Graph, e_cluster, e_lab, graph_state
from .mbqc import (
    FunctionKind,
    MeasurementBasis,
    MeasurementPattern,
    dj_pattern,
    enumerate_distribution,
    logical_output,
    run_pattern,
    sample_outcomes,
)
from .noise import NoiseProfile, apply_profile, fit_profile, noisy_distribution

__version__ = "0.1.0"

__all__ = [
    "BooleanFunction",
    "DensityMatrix",
    "E_GRAPH",
    "Frame",
    "FunctionClass",
    "FunctionKind",
    "Graph",
    "HE6_GRAPH",
    "InputError",
    "MeasurementBasis",
    "MeasurementPattern",
    "NoiseProfile",
    "OutputTable",
    "PauliString",
    "StateVector",
    "WitnessSpec",
    "ZeroProbabilityError",
    "apply_profile",
    "classical_decide",
    "classify",
    "dj_decide",
    "dj_pattern",
    "dj_run",
    "e_cluster",
    "e_cluster_witness",
    "e_lab",
    "enumerate_distribution",
    "fidelity_lower_bound",
    "fit_profile",
    "graph_state",
    "logical_output",
    "noisy_distribution",
    "render_table",
    "run_pattern",
    "sample_outcomes",
    "witness_expectation",
]
