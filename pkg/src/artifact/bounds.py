"""Closed-form error bounds and protocol constants.

Every bound is a direct transcription of a displayed formula; nothing
here samples or simulates.  ``evaluate`` dispatches on a kind string so
callers (CLI, reports) can request any bound uniformly.

Bitstring-valued quantities enter through their integer dot products:
``p`` stands for p.p (the number of ones in the X exponent), ``s_dot_t``
and ``t_dot_at`` for the corresponding integer products.
"""

from __future__ import annotations

import math


class MissingParameterError(ValueError):
    pass


class DomainError(ValueError):
    pass


def thm2_bound(eps: float, n: int, edges: int, p: float) -> float:
    """Equivalence distance (2 sqrt(p.p) + 2 sqrt(2n) + sqrt(|E|+n)) (2 eps)^{1/4}."""
    _check_eps(eps)
    return (2 * math.sqrt(p) + 2 * math.sqrt(2 * n)
            + math.sqrt(edges + n)) * (2 * eps) ** 0.25


def lemma1_anticommutator(eps: float) -> float:
    """Anti-commutator norm bound 4 sqrt(2 eps) at a triangle vertex."""
    _check_eps(eps)
    return 4 * math.sqrt(2 * eps)


def cor1_bound(eps: float, s_dot_t: int) -> float:
    """Cost 4 (s.t) sqrt(2 eps) of commuting X^s past Z^t, s.t over Z."""
    _check_eps(eps)
    if s_dot_t < 0:
        raise DomainError("s_dot_t must be nonnegative")
    return 4 * s_dot_t * math.sqrt(2 * eps)


def lemma2_bound(eps: float, t_dot_at: int, t_dot_t: int) -> float:
    """Distance (2 (t.At) + t.t) sqrt(2 eps) for X^t vs Z^{At} action."""
    _check_eps(eps)
    if t_dot_at < 0 or t_dot_t < 0:
        raise DomainError("dot products must be nonnegative")
    return (2 * t_dot_at + t_dot_t) * math.sqrt(2 * eps)


def lemma3_bound(eps: float, delta: float) -> float:
    """Rotation-observable distance sqrt(2 (eps + 2 delta))."""
    _check_eps(eps)
    if delta < 0:
        raise DomainError("delta must be nonnegative")
    return math.sqrt(2 * (eps + 2 * delta))


def lemma4_bound(delta: float, n: int, m: int) -> float:
    """Adaptive-sequence deviation (2 n m + 1) delta in state norm."""
    if delta < 0:
        raise DomainError("delta must be nonnegative")
    return (2 * n * m + 1) * delta


def cor2_bound(delta: float, n: int, m: int = 4) -> float:
    """Outcome-probability deviation 2 (2 n m + 1) delta."""
    return 2 * lemma4_bound(delta, n, m)


def lemma5_eps_of_delta(delta: float, n: int) -> float:
    """Invert the honesty-test gap: eps = (delta^2 / (22 + 25 sqrt(n)))^4."""
    if delta < 0:
        raise DomainError("delta must be nonnegative")
    return (delta ** 2 / (22 + 25 * math.sqrt(n))) ** 4


def lemma5_delta_of_eps(eps: float, n: int) -> float:
    """Forward direction: delta = sqrt(22 + 25 sqrt(n)) eps^{1/8}."""
    _check_eps(eps)
    return math.sqrt(22 + 25 * math.sqrt(n)) * eps ** 0.125


def lemma5_gap(delta: float, n: int, n_g: int) -> float:
    """Pass-probability deficit (1 / 2 N_G) (delta^2 / (22 + 25 sqrt(n)))^4."""
    if n_g <= 0:
        raise DomainError("n_g must be positive")
    return lemma5_eps_of_delta(delta, n) / (2 * n_g)


def cor3_gap(delta: float, n: int) -> float:
    """Simplified deficit delta^8 / (10^{17.7} n^{11})."""
    if delta < 0:
        raise DomainError("delta must be nonnegative")
    return delta ** 8 / (10 ** 17.7 * n ** 11)


def cor3_chain(delta: float, n: int, n_g: int | None = None) -> dict[str, float]:
    """The estimate chain behind cor3_gap, stage by stage.

    exact: lemma5_gap at the composed delta' = delta / (2 (8 n + 1));
    line1: N_G replaced by its ceiling 4 n;
    line2: 8 n + 1 and the angle constant coarsened to 9 n and 47 sqrt(n);
    line3: the numeric constants collapsed into 10^{17.7}.
    The middle inequality line2 <= line1 needs n >= 7; for smaller n the
    chain is reported as-is and the comparison left to the caller.
    """
    if n_g is None:
        n_g = 4 * n
    delta_prime = delta / (2 * (8 * n + 1))
    exact = lemma5_gap(delta_prime, n, n_g)
    line1 = (1 / (4 * n)) * (delta ** 2 / (8 * (8 * n + 1) ** 2
                                           * (22 + 25 * math.sqrt(n)))) ** 4
    line2 = (1 / (8 * n)) * (delta ** 2 / (4 * (9 * n) ** 2
                                           * (47 * math.sqrt(n)))) ** 4
    line3 = delta ** 8 / (10 ** 17.7 * n ** 11)
    return {"exact": exact, "line1": line1, "line2": line2, "line3": line3}


def lemma6_q(c_test: float, s_test: float, s_calc: float, delta: float) -> float:
    """Optimal coin weight q = (c_test - s_test) / (1 + c_test - s_calc - s_test - delta).

    The boundary delta = 1/6 is allowed; the gap formula is evaluated there
    when bounding the worst case.
    """
    if not 0 < delta <= 1 / 6:
        raise DomainError("delta must lie in (0, 1/6]")
    if c_test <= s_test:
        raise DomainError("need c_test > s_test")
    return (c_test - s_test) / (1 + c_test - s_calc - s_test - delta)


def lemma6_gap(c_calc: float, s_calc: float, c_test: float, s_test: float,
               delta: float) -> float:
    """Composite gap (c_calc - s_calc - delta)(c_test - s_test) / denominator."""
    if not 0 < delta <= 1 / 6:
        raise DomainError("delta must lie in (0, 1/6]")
    if c_test <= s_test:
        raise DomainError("need c_test > s_test")
    return ((c_calc - s_calc - delta) * (c_test - s_test)
            / (1 + c_test - s_calc - s_test - delta))


def lemma6_gap_floor(delta: float, n: int) -> float:
    """Guaranteed composite gap delta^8 / (10^{18.8} n^{11})."""
    if delta < 0:
        raise DomainError("delta must be nonnegative")
    return delta ** 8 / (10 ** 18.8 * n ** 11)


def hoeffding_n(gap: float, error: float = 1 / 3) -> int:
    """Repetitions ceil(2 ln(1/error) / gap^2), from exp(-N gap^2 / 2) <= error."""
    if not 0 < gap <= 1:
        raise DomainError("gap must lie in (0, 1]")
    if not 0 < error < 1:
        raise DomainError("error must lie in (0, 1)")
    return math.ceil(2 * math.log(1 / error) / gap ** 2)


def thm1_n(n: int, delta: float) -> float:
    """Protocol-scale repetition count 10^{37.9} n^{22} / delta^{16}."""
    if delta <= 0:
        raise DomainError("delta must be positive")
    return 10 ** 37.9 * n ** 22 / delta ** 16


def bound_chain_report(n: int, edges: int, eps: float, m: int = 4,
                       p: float = 1) -> list[dict]:
    """Trace the bound composition from a test deviation eps downward.

    Stages: the equivalence distance for X^q Z^p labels, the rotation
    label distance that feeds adaptive runs, the sequence and outcome
    deviations, and the honesty-test deficits at the implied delta.
    """
    _check_eps(eps)
    stages = []
    d_thm2 = thm2_bound(eps, n, edges, p)
    stages.append({"stage": "thm2", "value": d_thm2,
                   "inputs": {"eps": eps, "n": n, "edges": edges, "p": p}})
    d_rot = lemma3_bound(eps, d_thm2)
    stages.append({"stage": "lemma3", "value": d_rot,
                   "inputs": {"eps": eps, "delta": d_thm2}})
    stages.append({"stage": "lemma4", "value": lemma4_bound(d_rot, n, m),
                   "inputs": {"delta": d_rot, "n": n, "m": m}})
    stages.append({"stage": "cor2", "value": cor2_bound(d_rot, n, m),
                   "inputs": {"delta": d_rot, "n": n, "m": m}})
    delta5 = lemma5_delta_of_eps(eps, n)
    stages.append({"stage": "lemma5_delta", "value": delta5,
                   "inputs": {"eps": eps, "n": n}})
    stages.append({"stage": "cor3_gap", "value": cor3_gap(delta5, n),
                   "inputs": {"delta": delta5, "n": n}})
    return stages


def _check_eps(eps: float):
    if eps < 0:
        raise DomainError("eps must be nonnegative")


_REGISTRY: dict[str, tuple] = {
    "thm2": (thm2_bound, ("eps", "n", "edges", "p")),
    "lemma1": (lemma1_anticommutator, ("eps",)),
    "cor1": (cor1_bound, ("eps", "s_dot_t")),
    "lemma2": (lemma2_bound, ("eps", "t_dot_at", "t_dot_t")),
    "lemma3": (lemma3_bound, ("eps", "delta")),
    "lemma4": (lemma4_bound, ("delta", "n", "m")),
    "cor2": (cor2_bound, ("delta", "n", "m")),
    "lemma5gap": (lemma5_gap, ("delta", "n", "n_g")),
    "lemma5eps": (lemma5_eps_of_delta, ("delta", "n")),
    "lemma5delta": (lemma5_delta_of_eps, ("eps", "n")),
    "cor3gap": (cor3_gap, ("delta", "n")),
    "lemma6q": (lemma6_q, ("c_test", "s_test", "s_calc", "delta")),
    "lemma6gap": (lemma6_gap, ("c_calc", "s_calc", "c_test", "s_test", "delta")),
    "lemma6gapfloor": (lemma6_gap_floor, ("delta", "n")),
    "hoeffdingn": (hoeffding_n, ("gap", "error")),
    "thm1n": (thm1_n, ("n", "delta")),
}

FORMULAS = {
    "thm2": "(2*sqrt(p) + 2*sqrt(2*n) + sqrt(edges + n)) * (2*eps)**(1/4)",
    "lemma1": "4*sqrt(2*eps)",
    "cor1": "4*s_dot_t*sqrt(2*eps)",
    "lemma2": "(2*t_dot_at + t_dot_t)*sqrt(2*eps)",
    "lemma3": "sqrt(2*(eps + 2*delta))",
    "lemma4": "(2*n*m + 1)*delta",
    "cor2": "2*(2*n*m + 1)*delta",
    "lemma5gap": "(delta**2/(22 + 25*sqrt(n)))**4 / (2*n_g)",
    "lemma5eps": "(delta**2/(22 + 25*sqrt(n)))**4",
    "lemma5delta": "sqrt(22 + 25*sqrt(n)) * eps**(1/8)",
    "cor3gap": "delta**8 / (10**17.7 * n**11)",
    "lemma6q": "(c_test - s_test)/(1 + c_test - s_calc - s_test - delta)",
    "lemma6gap": "(c_calc - s_calc - delta)*(c_test - s_test)"
                 "/(1 + c_test - s_calc - s_test - delta)",
    "lemma6gapfloor": "delta**8 / (10**18.8 * n**11)",
    "hoeffdingn": "ceil(2*ln(1/error)/gap**2)",
    "thm1n": "10**37.9 * n**22 / delta**16",
}

KINDS = tuple(sorted(_REGISTRY))


def evaluate(kind: str, **params) -> float:
    """Evaluate a bound by kind name (case-insensitive)."""
    key = kind.lower().replace("_", "").replace("-", "")
    if key not in _REGISTRY:
        raise ValueError(f"unknown bound kind {kind!r}; choose from {KINDS}")
    fn, names = _REGISTRY[key]
    args = []
    for name in names:
        if name in params:
            args.append(params[name])
        elif name == "m":
            args.append(4)
        elif name == "error":
            args.append(1 / 3)
        elif name == "n_g" and "n" in params:
            args.append(4 * params["n"])
        else:
            raise MissingParameterError(f"{kind} needs parameter {name!r}")
    extra = set(params) - set(names)
    if extra:
        raise ValueError(f"{kind} does not take {sorted(extra)}")
    return fn(*args)
