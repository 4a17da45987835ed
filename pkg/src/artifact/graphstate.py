"""Graph states and the ideal-side operator algebra.

A graph state is prepared by entangling |+>^n with ctl-Z along every
edge.  The closed-form amplitudes are (-1)^{#induced edges} / 2^{n/2},
and the state is the unique +1 eigenstate of the stabilizer generators
S_v = X_v Z^{A 1_v}.  For a triangle with characteristic vector tau the
operator X^tau Z^{A tau} has expectation -1 on the graph state, which is
the negative-correlation hook the honesty test is built on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import pauli
from .graphs import Graph, support
from .pauli import PauliProduct, lc_generator_transform  # noqa: F401  (re-export)
from .statevec import (
    PAULI_X,
    PAULI_Z,
    ProductObservable,
    StateVector,
    apply_cz,
    expectation,
    plus_state,
)


class NotATriangleError(ValueError):
    pass


@dataclass(frozen=True)
class GraphState:
    graph: Graph
    state: StateVector


def build_graph_state(graph: Graph) -> GraphState:
    """CZ along every edge of |+>^n."""
    state = plus_state(graph.n)
    for u, v in graph.edges:
        state = apply_cz(state, u, v)
    return GraphState(graph, state)


def amplitude(graph: Graph, x) -> float:
    """<x|G> = (-1)^{edges induced by x} / 2^{n/2}, always real."""
    x = np.asarray(x, dtype=np.uint8) % 2
    if len(x) != graph.n:
        raise ValueError("length mismatch")
    sign = -1.0 if graph.induced_edge_count(x) % 2 else 1.0
    return sign * 2.0 ** (-graph.n / 2)


def stabilizer(graph: Graph, v: int) -> ProductObservable:
    """S_v = X_v Z^{A 1_v} as a measurable product."""
    if not 0 <= v < graph.n:
        raise IndexError(f"vertex {v} out of range")
    terms: dict[int, np.ndarray] = {v: PAULI_X}
    for u in graph.neighbors(v):
        terms[u] = PAULI_Z
    return ProductObservable(terms)


def triangle_operator(graph: Graph, tau) -> ProductObservable:
    """X^tau Z^{A tau} for a triangle tau; expectation -1 on |G>.

    Because the three vertices are pairwise adjacent, (A tau)_v is even
    on tau itself, so the product carries pure X on the triangle and
    pure Z on its outside neighborhood.
    """
    tau = np.asarray(tau, dtype=np.uint8) % 2
    if len(tau) != graph.n:
        raise ValueError("length mismatch")
    verts = support(tau)
    if len(verts) != 3:
        raise NotATriangleError(f"need exactly three vertices, got {len(verts)}")
    for i, a in enumerate(verts):
        for b in verts[i + 1:]:
            if not graph.adjacency[a, b]:
                raise NotATriangleError(f"vertices {a} and {b} are not adjacent")
    z_bits = graph.mul(tau)
    terms: dict[int, np.ndarray] = {}
    for v in range(graph.n):
        if tau[v] and z_bits[v]:
            terms[v] = PAULI_X @ PAULI_Z
        elif tau[v]:
            terms[v] = PAULI_X
        elif z_bits[v]:
            terms[v] = PAULI_Z
    return ProductObservable(terms)


def stabilizer_element(graph: Graph, t) -> ProductObservable:
    """prod_{t_v=1} S_v as a measurable product (expectation +1 on |G>).

    In normal form the element is (-1)^{(t.At)/2} X^t Z^{At} with the
    quadratic form over the integers; the rendered sign used here also
    accounts for XZ pairs collapsing to Y letters.
    """
    prod = pauli.stabilizer_product(graph, t)
    terms: dict[int, np.ndarray] = {}
    for v, letter in enumerate(prod.letters()):
        if letter != "I":
            terms[v] = pauli.letter_matrix(letter)
    return ProductObservable(terms, sign=prod.sign())


def stabilizer_expectations(gs: GraphState) -> np.ndarray:
    """<G| S_v |G> for every vertex (all should be 1)."""
    return np.array([expectation(gs.state, stabilizer(gs.graph, v))
                     for v in range(gs.graph.n)])
