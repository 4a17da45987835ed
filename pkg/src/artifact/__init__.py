"""Simulator and verifier for graph-state self-testing protocols.

The package covers the full pipeline at desk scale: triangular graph
states and their stabilizers, a one-shot honesty test with its exact
pass-probability ceilings, measurement-pattern execution against
untrusted provers, the swap-isometry closeness measure with every
closed-form error bound, and the composed interactive proof with
Hoeffding amplification.  ``artifact.experiments`` batches seeded runs
and ``artifact.cli`` exposes them as the ``gsip`` command.
"""

from .graphs import Graph, complete_graph, triangle_strip, triangular_lattice
from .graphstate import build_graph_state, stabilizer_expectations
from .provers import (
    ProverSet,
    classical_provers,
    honest_provers,
    perturbed_provers,
    strategy_from_json,
    xz_plane_provers,
)
from .selftest import (
    TestParameters,
    c_test,
    default_parameters,
    exact_pass_probability,
    run_oneshot,
    s_test,
)
from .mbqc import (
    MeasurementPattern,
    PatternStep,
    reference_run,
    run_distribution,
    run_pattern,
    total_variation,
)
from .isometry import equivalence_distance, measured_epsilon
from .protocol import ProtocolConfig, choose_q, run_amplified
from .experiments import ExperimentConfig, ResultRecord, run_experiment
from . import bounds

__version__ = "0.1.0"
__all__ = [
    # graphs and states
    "Graph",
    "complete_graph",
    "triangle_strip",
    "triangular_lattice",
    "build_graph_state",
    "stabilizer_expectations",
    # provers
    "ProverSet",
    "honest_provers",
    "perturbed_provers",
    "classical_provers",
    "xz_plane_provers",
    "strategy_from_json",
    # one-shot test
    "TestParameters",
    "default_parameters",
    "c_test",
    "s_test",
    "exact_pass_probability",
    "run_oneshot",
    # pattern execution
    "MeasurementPattern",
    "PatternStep",
    "run_pattern",
    "run_distribution",
    "reference_run",
    "total_variation",
    # isometry and bounds
    "equivalence_distance",
    "measured_epsilon",
    "bounds",
    # composed protocol
    "ProtocolConfig",
    "choose_q",
    "run_amplified",
    # experiment harness
    "ExperimentConfig",
    "ResultRecord",
    "run_experiment",
]
