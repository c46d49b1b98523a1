"""Distribution metrics, mixing curves, and the measurement trade-off sweep."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classical import classical_run, uniform_distribution
from .errors import StructureError
from .evolution import StepMap, make_step, marginal_history
from .graph import PortGraph
from .meter import distinguishability, visibility
from .state import pure_position_marginal

__all__ = [
    "ComplementarityPoint",
    "MixingComparison",
    "MixingCurve",
    "coherence_l1",
    "compare_mixing",
    "complementarity_sweep",
    "first_crossing",
    "time_averaged_distribution",
    "tvd",
]


def tvd(p: np.ndarray, q: np.ndarray) -> float:
    """Total variation distance, half the l1 distance between distributions."""
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise StructureError(f"distribution shapes differ: {p.shape} vs {q.shape}")
    return 0.5 * float(np.sum(np.abs(p - q)))


def time_averaged_distribution(marginals: np.ndarray) -> np.ndarray:
    """Arithmetic mean of a nonempty sequence of distributions."""
    marginals = np.asarray(marginals, dtype=float)
    if marginals.size == 0:
        raise StructureError("cannot average an empty sequence of distributions")
    return marginals.mean(axis=0)


def coherence_l1(rho: np.ndarray) -> float:
    """Sum of absolute off-diagonal elements, zero exactly for diagonal states.

    One of two interference sharpness proxies this package reports; the
    other is the distance of the position distribution from the fully
    measured walk's. Neither is privileged.
    """
    rho = np.asarray(rho)
    return float(np.sum(np.abs(rho)) - np.sum(np.abs(np.diagonal(rho))))


@dataclass(frozen=True)
class MixingCurve:
    """TVD to uniform against time, instantaneous or time-averaged."""

    times: tuple[int, ...]
    tvd_to_uniform: tuple[float, ...]
    variant: str


@dataclass(frozen=True)
class ComplementarityPoint:
    """One measurement strength with its trade-off coordinates."""

    beta: float
    visibility: float
    distinguishability: float
    tvd_to_unitary: float
    tvd_to_classical: float


@dataclass(frozen=True)
class MixingComparison:
    quantum: MixingCurve
    classical: MixingCurve
    quantum_crossing: int | None
    classical_crossing: int | None
    first_to_cross: str


def first_crossing(curve: MixingCurve, epsilon: float) -> int | None:
    """Earliest time the curve reaches TVD <= epsilon, None if it never does."""
    for t, value in zip(curve.times, curve.tvd_to_uniform):
        if value <= epsilon:
            return t
    return None


def _curve_from_marginals(marginals: np.ndarray, variant: str) -> MixingCurve:
    num = marginals.shape[1]
    uniform = uniform_distribution(num)
    values = []
    if variant == "time-averaged":
        acc = np.zeros(num)
        for t, m in enumerate(marginals):
            acc += m
            values.append(tvd(acc / (t + 1), uniform))
    elif variant == "instantaneous":
        values = [tvd(m, uniform) for m in marginals]
    else:
        raise StructureError(f"unknown mixing curve variant {variant!r}")
    return MixingCurve(tuple(range(len(values))), tuple(values), variant)


def compare_mixing(
    graph: PortGraph,
    step: StepMap,
    psi0: np.ndarray,
    t_max: int,
    epsilon: float,
) -> MixingComparison:
    """Race the walk's time-averaged distribution against the classical chain.

    The quantum curve uses the Cesaro average of the configured walk's
    position distributions, the quantity that settles down even when
    the instantaneous one keeps oscillating. The classical curve is the
    instantaneous chain distribution started from the same vertex
    marginal. Both are scored by TVD to uniform and the comparison
    reports which reaches epsilon first.
    """
    if t_max < 1:
        raise StructureError(f"t_max must be at least 1, got {t_max}")
    if not 0.0 < epsilon < 1.0 + 1e-12:
        raise StructureError(f"epsilon must lie in (0, 1], got {epsilon}")
    quantum_marginals = marginal_history(psi0, step, t_max)
    quantum = _curve_from_marginals(quantum_marginals, "time-averaged")

    p = pure_position_marginal(psi0, graph.degree)
    classical_marginals = [p]
    for _ in range(t_max):
        p = classical_run(p, graph, 1)
        classical_marginals.append(p)
    classical = _curve_from_marginals(np.asarray(classical_marginals), "instantaneous")

    qc = first_crossing(quantum, epsilon)
    cc = first_crossing(classical, epsilon)
    if qc is None and cc is None:
        first = "neither"
    elif cc is None or (qc is not None and qc < cc):
        first = "quantum"
    elif qc is None or cc < qc:
        first = "classical"
    else:
        first = "tie"
    return MixingComparison(quantum, classical, qc, cc, first)


def complementarity_sweep(
    graph: PortGraph,
    psi0: np.ndarray,
    steps: int,
    betas: list[float],
    **step_kwargs,
) -> list[ComplementarityPoint]:
    """Trace the trade-off curve over a grid of measurement strengths.

    For each beta the walk runs for the given number of steps and its
    final position distribution is compared against two anchors: the
    unmeasured walk (beta=0) and the classical chain. Visibility and
    which-path knowledge come straight from beta. At beta=0 the first
    distance is zero by construction; at beta=1 the second vanishes
    for basis-state starts.
    """
    anchor_unitary = marginal_history(
        psi0, make_step(graph, beta=0.0, **step_kwargs), steps
    )[-1]
    anchor_classical = classical_run(
        pure_position_marginal(psi0, graph.degree), graph, steps
    )
    points = []
    for beta in betas:
        final = marginal_history(
            psi0, make_step(graph, beta=beta, **step_kwargs), steps
        )[-1]
        points.append(
            ComplementarityPoint(
                beta=beta,
                visibility=visibility(beta),
                distinguishability=distinguishability(beta),
                tvd_to_unitary=tvd(final, anchor_unitary),
                tvd_to_classical=tvd(final, anchor_classical),
            )
        )
    return points
