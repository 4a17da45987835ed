"""Untrusted-device model: a shared state plus per-prover strategies.

Each prover answers one of four query labels (X, Z, R+, R-) with +-1.
Quantum strategies assign a single-qubit observable per label, measured
on the prover's own qubit of the shared state; classical strategies are
deterministic reply tables.  "Ignore" means no query is sent and the
reply is taken to be +1.

Prover v owns qubit v of the shared state.  The state may carry extra
unmeasured qubits beyond the provers' own (indices >= n), which models
private ancillas without changing the reply interface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .graphs import Graph
from .graphstate import build_graph_state
from .statevec import (
    PAULI_I,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    ProductObservable,
    SingleQubitObservable,
    StateVector,
    measure,
)

X_LABEL = "X"
Z_LABEL = "Z"
R_PLUS = "R+"
R_MINUS = "R-"
IGNORE = "ignore"
QUERY_LABELS = (X_LABEL, Z_LABEL, R_PLUS, R_MINUS)


class IncompleteTableError(ValueError):
    pass


@dataclass(frozen=True)
class Query:
    """Per-prover query labels plus a verifier-side +-1 prefactor."""

    bases: tuple[str, ...]
    sign: int = 1

    def __post_init__(self):
        for b in self.bases:
            if b not in QUERY_LABELS and b != IGNORE:
                raise ValueError(f"unknown query label {b!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +-1")

    @staticmethod
    def from_assignments(n: int, assigned: dict[int, str], sign: int = 1) -> "Query":
        bases = [IGNORE] * n
        for v, label in assigned.items():
            bases[v] = label
        return Query(tuple(bases), sign)

    def queried(self) -> list[int]:
        return [v for v, b in enumerate(self.bases) if b != IGNORE]


@dataclass(frozen=True)
class QuantumStrategy:
    """observables[v][label] -> SingleQubitObservable on prover v's qubit."""

    observables: tuple[dict[str, SingleQubitObservable], ...]

    def __post_init__(self):
        for v, per_label in enumerate(self.observables):
            missing = [l for l in QUERY_LABELS if l not in per_label]
            if missing:
                raise IncompleteTableError(f"prover {v} missing labels {missing}")

    @property
    def n(self) -> int:
        return len(self.observables)


@dataclass(frozen=True)
class ClassicalStrategy:
    """Deterministic +-1 replies per (prover, label)."""

    table: tuple[dict[str, int], ...]

    def __post_init__(self):
        for v, per_label in enumerate(self.table):
            missing = [l for l in QUERY_LABELS if l not in per_label]
            if missing:
                raise IncompleteTableError(f"prover {v} missing labels {missing}")
            bad = [l for l, r in per_label.items() if r not in (1, -1)]
            if bad:
                raise ValueError(f"prover {v} has non +-1 replies for {bad}")

    @property
    def n(self) -> int:
        return len(self.table)


@dataclass(frozen=True)
class ProverSet:
    """A strategy bound to its shared state (None for classical)."""

    n: int
    strategy: QuantumStrategy | ClassicalStrategy
    shared_state: StateVector | None

    def __post_init__(self):
        if self.strategy.n != self.n:
            raise ValueError("strategy size does not match prover count")
        if isinstance(self.strategy, QuantumStrategy):
            if self.shared_state is None:
                raise ValueError("quantum strategy needs a shared state")
            if self.shared_state.n_qubits < self.n:
                raise ValueError("shared state too small for prover count")
        elif self.shared_state is not None:
            raise ValueError("classical strategy does not use a shared state")

    @property
    def is_classical(self) -> bool:
        return isinstance(self.strategy, ClassicalStrategy)

    def observable(self, v: int, label: str) -> SingleQubitObservable:
        return self.strategy.observables[v][label]

    def clone(self) -> "ProverSet":
        state = None if self.shared_state is None else self.shared_state.copy()
        return replace(self, shared_state=state)


def honest_provers(graph: Graph, theta: dict[int, float]) -> ProverSet:
    """Graph state plus the ideal X, Z, R(+-theta_v) observables."""
    per_prover = []
    for v in range(graph.n):
        th = float(theta[v])
        if not 0 <= th <= math.pi / 2:
            raise ValueError(f"theta[{v}] = {th} outside [0, pi/2]")
        per_prover.append({
            X_LABEL: SingleQubitObservable.x(),
            Z_LABEL: SingleQubitObservable.z(),
            R_PLUS: SingleQubitObservable.rotation(th),
            R_MINUS: SingleQubitObservable.rotation(-th),
        })
    strategy = QuantumStrategy(tuple(per_prover))
    return ProverSet(graph.n, strategy, build_graph_state(graph).state)


def _xz_angle(m: np.ndarray) -> float:
    """Angle a with m = cos(a) X + sin(a) Z; error if off-plane."""
    a_x = np.trace(m @ PAULI_X).real / 2
    a_z = np.trace(m @ PAULI_Z).real / 2
    a_y = np.trace(m @ PAULI_Y) / 2
    a_i = np.trace(m @ PAULI_I) / 2
    if abs(a_y) > 1e-9 or abs(a_i) > 1e-9:
        raise ValueError("observable is not in the X-Z plane")
    return math.atan2(a_z, a_x)


def perturbed_provers(base: ProverSet, eta: float, rng: np.random.Generator) -> ProverSet:
    """Rotate every observable's X-Z axis by an independent U(-eta, eta)."""
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    if base.is_classical:
        raise ValueError("cannot perturb classical provers")
    per_prover = []
    for v in range(base.n):
        noisy = {}
        for label in QUERY_LABELS:
            angle = _xz_angle(base.observable(v, label).matrix)
            angle += rng.uniform(-eta, eta)
            noisy[label] = SingleQubitObservable.rotation(angle)
        per_prover.append(noisy)
    return ProverSet(base.n, QuantumStrategy(tuple(per_prover)),
                     base.shared_state.copy())


def xz_plane_provers(state: StateVector, angles: list[dict[str, float]],
                     n: int | None = None) -> ProverSet:
    """Adversarial strategy from arbitrary per-label X-Z angles."""
    n = len(angles) if n is None else n
    per_prover = tuple(
        {label: SingleQubitObservable.rotation(per_label[label])
         for label in QUERY_LABELS}
        for per_label in angles
    )
    return ProverSet(n, QuantumStrategy(per_prover), state)


def custom_provers(state: StateVector,
                   observables: list[dict[str, SingleQubitObservable]]) -> ProverSet:
    """Expert constructor: any Hermitian involutions, one qubit each."""
    return ProverSet(len(observables), QuantumStrategy(tuple(observables)), state)


def classical_provers(n: int, table: dict[tuple[int, str], int]) -> ProverSet:
    """Deterministic provers; the table must cover every (vertex, label)."""
    per_prover = []
    for v in range(n):
        per_label = {}
        for label in QUERY_LABELS:
            if (v, label) not in table:
                raise IncompleteTableError(f"table missing ({v}, {label})")
            per_label[label] = table[(v, label)]
        per_prover.append(per_label)
    return ProverSet(n, ClassicalStrategy(tuple(per_prover)), None)


def constant_classical_provers(n: int, value: int = 1) -> ProverSet:
    table = {(v, label): value for v in range(n) for label in QUERY_LABELS}
    return classical_provers(n, table)


def execute_query(p: ProverSet, q: Query, rng: np.random.Generator
                  ) -> tuple[dict[int, int], int]:
    """Measure the queried qubits in ascending order; return replies, product.

    The product includes the query's verifier-side sign; ignored provers
    contribute +1.  The caller's ProverSet is never mutated.
    """
    if len(q.bases) != p.n:
        raise ValueError("query length does not match prover count")
    replies: dict[int, int] = {}
    product = q.sign
    if p.is_classical:
        for v in q.queried():
            r = p.strategy.table[v][q.bases[v]]
            replies[v] = r
            product *= r
        return replies, product
    state = p.shared_state
    for v in q.queried():
        outcome, state = measure(state, p.observable(v, q.bases[v]), v, rng)
        replies[v] = outcome
        product *= outcome
    return replies, product


def query_observable(p: ProverSet, q: Query) -> ProductObservable:
    """The joint +-1 observable a query measures (quantum strategies)."""
    if p.is_classical:
        raise ValueError("classical strategies have no joint observable")
    terms = {v: p.observable(v, q.bases[v]).matrix for v in q.queried()}
    return ProductObservable(terms, sign=q.sign)


def classical_product(p: ProverSet, q: Query) -> int:
    """Closed-form reply product for a deterministic strategy."""
    product = q.sign
    for v in q.queried():
        product *= p.strategy.table[v][q.bases[v]]
    return product


def strategy_from_json(spec: dict, graph: Graph, theta: dict[int, float],
                       rng: np.random.Generator) -> ProverSet:
    """Build a ProverSet from a JSON strategy description.

    Kinds: {"kind": "honest"}; {"kind": "perturbed", "eta": 0.1};
    {"kind": "classical", "value": 1} or {"kind": "classical",
    "table": {"0": {"X": 1, ...}, ...}}; {"kind": "xz", "angles":
    {"0": {"X": 0.1, ...}, ...}} measured on the ideal graph state.
    """
    kind = spec.get("kind")
    if kind == "honest":
        return honest_provers(graph, theta)
    if kind == "perturbed":
        return perturbed_provers(honest_provers(graph, theta),
                                 float(spec["eta"]), rng)
    if kind == "classical":
        if "table" in spec:
            table = {(int(v), label): int(r)
                     for v, per_label in spec["table"].items()
                     for label, r in per_label.items()}
            return classical_provers(graph.n, table)
        return constant_classical_provers(graph.n, int(spec.get("value", 1)))
    if kind == "xz":
        angles = [dict.fromkeys(QUERY_LABELS, 0.0) for _ in range(graph.n)]
        for v, per_label in spec["angles"].items():
            angles[int(v)].update({k: float(a) for k, a in per_label.items()})
        return xz_plane_provers(build_graph_state(graph).state, angles)
    raise ValueError(f"unknown strategy kind {kind!r}")
