"""Adaptive measurement patterns on graph states.

A pattern measures vertices in order.  Each step's angle sign is chosen
by the parity of earlier raw outcomes named in ``x_deps`` (sent to the
prover as an R+ or R- label), and the step's reported outcome is the raw
outcome flipped by the parity of ``z_deps``.  The run's output bit is
the parity of the corrected outcomes over ``output_bits``.

``reference_run`` executes the same semantics against the ideal graph
state by exact branch enumeration; ``run_distribution`` does the same
through a prover set's actual observables, so the two can be compared
without sampling noise.

The cascaded-teleportation check lives here too.  It uses the X-Y-plane
rotation R(a) = cos(a) X + sin(a) Y and the diagonal U(a) = exp(i a Z/2),
for which the correction identities X R(a) X = R(-a) and
Z R(a) Z = -R(a) hold exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph
from .graphstate import build_graph_state
from .provers import ProverSet, R_MINUS, R_PLUS
from .statevec import (
    HADAMARD,
    PAULI_X,
    PAULI_Z,
    SingleQubitObservable,
    StateVector,
    measure,
    project,
)


class DependencyError(ValueError):
    pass


class MissingAngleSupportError(ValueError):
    pass


@dataclass(frozen=True)
class PatternStep:
    vertex: int
    theta: float
    x_deps: tuple[int, ...] = ()
    z_deps: tuple[int, ...] = ()


@dataclass(frozen=True)
class MeasurementPattern:
    """Ordered adaptive measurements plus the output parity set."""

    steps: tuple[PatternStep, ...]
    output_bits: tuple[int, ...]

    def __post_init__(self):
        measured: set[int] = set()
        for k, step in enumerate(self.steps):
            if step.vertex in measured:
                raise DependencyError(f"vertex {step.vertex} measured twice")
            if not 0 <= step.theta <= math.pi / 2:
                raise ValueError(f"step {k} angle {step.theta} outside [0, pi/2]")
            for dep in (*step.x_deps, *step.z_deps):
                if dep not in measured:
                    raise DependencyError(
                        f"step {k} depends on {dep}, not yet measured")
            measured.add(step.vertex)
        for v in self.output_bits:
            if v not in measured:
                raise DependencyError(f"output bit {v} is never measured")

    @property
    def vertices(self) -> list[int]:
        return [s.vertex for s in self.steps]

    def step_for(self, vertex: int) -> PatternStep:
        for step in self.steps:
            if step.vertex == vertex:
                return step
        raise KeyError(vertex)

    def to_json(self) -> dict:
        return {
            "steps": [{"v": s.vertex, "theta": s.theta,
                       "x_deps": list(s.x_deps), "z_deps": list(s.z_deps)}
                      for s in self.steps],
            "output_bits": list(self.output_bits),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "MeasurementPattern":
        steps = tuple(
            PatternStep(int(s["v"]), float(s["theta"]),
                        tuple(int(d) for d in s.get("x_deps", ())),
                        tuple(int(d) for d in s.get("z_deps", ())))
            for s in obj["steps"]
        )
        return cls(steps, tuple(int(v) for v in obj["output_bits"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json())


@dataclass(frozen=True)
class StepRecord:
    vertex: int
    t: int
    outcome: int
    corrected: int


@dataclass(frozen=True)
class RunTranscript:
    steps: tuple[StepRecord, ...]

    def raw(self) -> dict[int, int]:
        return {r.vertex: r.outcome for r in self.steps}


def _parity(raw: dict[int, int], deps) -> int:
    sign = 1
    for dep in deps:
        sign *= raw[dep]
    return sign


def _output_bit(pattern: MeasurementPattern, raw: dict[int, int]) -> int:
    product = 1
    for v in pattern.output_bits:
        step = pattern.step_for(v)
        product *= raw[v] * _parity(raw, step.z_deps)
    return (1 - product) // 2


def run_pattern(p: ProverSet, pattern: MeasurementPattern,
                rng: np.random.Generator) -> tuple[int, RunTranscript]:
    """Execute the pattern against a prover set, one query per step."""
    for step in pattern.steps:
        if step.vertex >= p.n:
            raise MissingAngleSupportError(
                f"no prover for pattern vertex {step.vertex}")
    raw: dict[int, int] = {}
    records = []
    state = p.shared_state
    for step in pattern.steps:
        t = _parity(raw, step.x_deps)
        label = R_PLUS if t == 1 else R_MINUS
        if p.is_classical:
            outcome = p.strategy.table[step.vertex][label]
        else:
            outcome, state = measure(state, p.observable(step.vertex, label),
                                     step.vertex, rng)
        raw[step.vertex] = outcome
        records.append(StepRecord(step.vertex, t, outcome,
                                  outcome * _parity(raw, step.z_deps)))
    return _output_bit(pattern, raw), RunTranscript(tuple(records))


def _branch_distribution(state: StateVector, pattern: MeasurementPattern,
                         observable_for) -> dict[int, float]:
    """Exact output law by enumerating every outcome branch."""
    dist = {0: 0.0, 1: 0.0}

    def walk(current: StateVector, k: int, raw: dict[int, int], weight: float):
        if k == len(pattern.steps):
            dist[_output_bit(pattern, raw)] += weight
            return
        step = pattern.steps[k]
        t = _parity(raw, step.x_deps)
        obs = observable_for(step, t)
        for outcome in (1, -1):
            prob, collapsed = project(current, obs, step.vertex, outcome)
            if collapsed is None:
                continue
            raw[step.vertex] = outcome
            walk(collapsed, k + 1, raw, weight * prob)
            del raw[step.vertex]

    walk(state, 0, {}, 1.0)
    return dist


def reference_run(graph: Graph, pattern: MeasurementPattern) -> dict[int, float]:
    """Ideal output distribution: the pattern on |G> with exact rotations."""
    for step in pattern.steps:
        if step.vertex >= graph.n:
            raise MissingAngleSupportError(
                f"pattern vertex {step.vertex} outside the graph")
    state = build_graph_state(graph).state

    def observable_for(step: PatternStep, t: int) -> SingleQubitObservable:
        return SingleQubitObservable.rotation(t * step.theta)

    return _branch_distribution(state, pattern, observable_for)


def run_distribution(p: ProverSet, pattern: MeasurementPattern) -> dict[int, float]:
    """Exact output distribution through the prover set's observables."""
    for step in pattern.steps:
        if step.vertex >= p.n:
            raise MissingAngleSupportError(
                f"no prover for pattern vertex {step.vertex}")
    if p.is_classical:
        raw = {}
        for step in pattern.steps:
            t = _parity(raw, step.x_deps)
            label = R_PLUS if t == 1 else R_MINUS
            raw[step.vertex] = p.strategy.table[step.vertex][label]
        bit = _output_bit(pattern, raw)
        return {bit: 1.0, 1 - bit: 0.0}

    def observable_for(step: PatternStep, t: int) -> SingleQubitObservable:
        return p.observable(step.vertex, R_PLUS if t == 1 else R_MINUS)

    return _branch_distribution(p.shared_state, pattern, observable_for)


def total_variation(a: dict[int, float], b: dict[int, float]) -> float:
    keys = set(a) | set(b)
    return 0.5 * sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys)


def rotation_xy(angle: float) -> np.ndarray:
    """cos(a) X + sin(a) Y; the plane the teleportation figures live in."""
    return np.array([[0, np.exp(-1j * angle)],
                     [np.exp(1j * angle), 0]], dtype=complex)


def u_diag(angle: float) -> np.ndarray:
    """U(a) = exp(i a Z / 2)."""
    return np.diag([np.exp(1j * angle / 2), np.exp(-1j * angle / 2)])


def _qubit2_state(state: StateVector) -> np.ndarray:
    """Extract the last qubit of a 3-qubit product state e0 x e1 x phi."""
    mat = state.amplitudes.reshape(2, 4)
    column = int(np.argmax(np.linalg.norm(mat, axis=0)))
    phi = mat[:, column]
    return phi / np.linalg.norm(phi)


def teleport_chain_check(theta1: float, theta2: float) -> float:
    """Worst-branch residual of two cascaded teleportations.

    Builds the 3-qubit chain state, measures qubit 0 at angle theta1 and
    qubit 1 at m1 * theta2 (the folded X correction), undoes the final
    X^{s2} Z^{s1} byproduct, and compares each branch against
    H U(theta2) H U(theta1) |+> up to global phase.
    """
    chain = Graph.from_edges(3, [(0, 1), (1, 2)])
    state = build_graph_state(chain).state
    plus = np.array([1, 1], dtype=complex) / math.sqrt(2)
    target = HADAMARD @ u_diag(theta2) @ HADAMARD @ u_diag(theta1) @ plus
    worst = 0.0
    for m1 in (1, -1):
        obs1 = SingleQubitObservable(f"Rxy({theta1:.6g})", rotation_xy(theta1))
        p1, s1 = project(state, obs1, 0, m1)
        if s1 is None:
            continue
        folded = m1 * theta2
        obs2 = SingleQubitObservable(f"Rxy({folded:.6g})", rotation_xy(folded))
        for m2 in (1, -1):
            p2, s2 = project(s1, obs2, 1, m2)
            if s2 is None:
                continue
            phi = _qubit2_state(s2)
            if m2 == -1:
                phi = PAULI_X @ phi
            if m1 == -1:
                phi = PAULI_Z @ phi
            worst = max(worst, _phase_aligned_distance(target, phi))
    return worst


def _phase_aligned_distance(target: np.ndarray, phi: np.ndarray) -> float:
    """min over global phases of ||target - e^{ia} phi||.

    Computed as a direct vector difference after alignment; the closed
    form sqrt(2 - 2|<t|phi>|) loses all precision below ~1e-8.
    """
    overlap = np.vdot(target, phi)
    if abs(overlap) > 1e-12:
        phi = phi * (overlap.conjugate() / abs(overlap))
    return float(np.linalg.norm(target - phi))
