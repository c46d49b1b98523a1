"""Walk evolution: step composition, density runs, and trajectory sampling.

A single time step applies, in order: the coin unitary, the coin
measurement channel (when a measurement strength is configured),
optional dephasing between vertices, and the shift. The vertex
dephasing may instead be placed after the shift; both orders are
conventions and the choice is recorded with every run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coin import build_coin_operator, default_coin_spec, CoinSpec
from .errors import ConfigError, InvariantViolation, StructureError
from .graph import PortGraph
from .meter import apply_kraus, dephasing_kraus, uniform_dephasing_kraus
from .shift import ShiftOperator, build_shift
from .state import pure_position_marginal, position_marginal, to_density

__all__ = [
    "StepMap",
    "TrajectoryRecord",
    "assembled_step_operators",
    "cp_step",
    "enumerate_branches",
    "make_step",
    "marginal_history",
    "reconstruct_cycle_path",
    "run",
    "sample_trajectory",
    "unitary_step",
    "vertex_dephasing",
]

PLACEMENTS = ("before-shift", "after-shift")


@dataclass(frozen=True)
class StepMap:
    """Everything needed to advance the walk by one time step."""

    coin: np.ndarray
    shift: ShiftOperator
    coin_kraus: tuple[np.ndarray, ...] | None = None
    vertex_dephasing: float = 0.0
    placement: str = "before-shift"
    beta: float = 0.0

    @property
    def is_unitary(self) -> bool:
        return self.coin_kraus is None and self.vertex_dephasing == 0.0


def make_step(
    graph: PortGraph,
    coin_spec: CoinSpec | None = None,
    shift: ShiftOperator | None = None,
    beta: float = 0.0,
    vertex_p: float = 0.0,
    placement: str = "before-shift",
    phi: float = math.pi / 2,
) -> StepMap:
    """Assemble a StepMap with the package defaults filled in.

    With beta > 0 the coin measurement Kraus family is attached: the
    two-outcome meter pair when the coin is two-sided, the uniform
    dephasing family otherwise.
    """
    if placement not in PLACEMENTS:
        raise ConfigError(f"placement must be one of {PLACEMENTS}, got {placement!r}")
    if not 0.0 <= vertex_p <= 1.0:
        raise ConfigError(f"vertex dephasing strength must lie in [0, 1], got {vertex_p}")
    spec = coin_spec if coin_spec is not None else default_coin_spec(graph, phi)
    coin_op = build_coin_operator(graph, spec)
    shift_op = shift if shift is not None else build_shift(graph)
    kraus = None
    if beta > 0.0:
        if graph.degree == 2:
            kraus = dephasing_kraus(beta).operators
        else:
            kraus = uniform_dephasing_kraus(beta, graph.degree)
    return StepMap(coin_op, shift_op, kraus, vertex_p, placement, beta)


# ----------------------------------------------------------------------
# deterministic evolution

def unitary_step(psi: np.ndarray, step: StepMap) -> np.ndarray:
    """Advance a pure state one step: shift after coin."""
    if not step.is_unitary:
        raise StructureError(
            "unitary_step requires a StepMap without measurement options; "
            "use cp_step on a density matrix instead"
        )
    return step.shift.apply(step.coin @ psi)


def vertex_dephasing(rho: np.ndarray, p: float, degree: int) -> np.ndarray:
    """Scale matrix elements between different vertices by (1 - p).

    Coin coherences within a vertex are untouched, so the diagonal and
    the trace are exactly preserved. p=0 is the identity; p=1 removes
    all position coherence.
    """
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"vertex dephasing strength must lie in [0, 1], got {p}")
    if p == 0.0:
        return rho.copy()
    n = rho.shape[0] // degree
    same_vertex = np.kron(np.eye(n), np.ones((degree, degree)))
    return rho * ((1.0 - p) + p * same_vertex)


def _expanded_kraus(step: StepMap) -> list[np.ndarray]:
    n = step.shift.num_vertices
    return [np.kron(np.eye(n), k) for k in step.coin_kraus]


def cp_step(rho: np.ndarray, step: StepMap) -> np.ndarray:
    """Advance a density matrix one step through the full channel."""
    d = step.shift.degree
    rho = step.coin @ rho @ step.coin.conj().T
    if step.coin_kraus is not None:
        rho = apply_kraus(rho, _expanded_kraus(step))
    if step.vertex_dephasing > 0.0 and step.placement == "before-shift":
        rho = vertex_dephasing(rho, step.vertex_dephasing, d)
    rho = step.shift.conjugate(rho)
    if step.vertex_dephasing > 0.0 and step.placement == "after-shift":
        rho = vertex_dephasing(rho, step.vertex_dephasing, d)
    return rho


def run(psi0: np.ndarray, step: StepMap, steps: int) -> np.ndarray:
    """Evolve a pure initial state for the given number of steps.

    Returns the density matrix after t applications of cp_step; t=0
    gives the initial projector.
    """
    if steps < 0:
        raise ConfigError(f"step count must be nonnegative, got {steps}")
    rho = to_density(psi0)
    for _ in range(steps):
        rho = cp_step(rho, step)
    return rho


def marginal_history(psi0: np.ndarray, step: StepMap, steps: int) -> np.ndarray:
    """Position distribution at every time 0..steps, shape (steps+1, N).

    Uses the pure-state path when the step is unitary and the density
    path otherwise.
    """
    d = step.shift.degree
    out = np.empty((steps + 1, step.shift.num_vertices))
    if step.is_unitary:
        psi = psi0.copy()
        out[0] = pure_position_marginal(psi, d)
        for t in range(1, steps + 1):
            psi = unitary_step(psi, step)
            out[t] = pure_position_marginal(psi, d)
    else:
        rho = to_density(psi0)
        out[0] = position_marginal(rho, d)
        for t in range(1, steps + 1):
            rho = cp_step(rho, step)
            out[t] = position_marginal(rho, d)
    return out


def assembled_step_operators(step: StepMap) -> list[np.ndarray]:
    """The full-space Kraus set {S K_i C} of one measured step.

    Their completeness sum is the identity on graphs where every port
    is used, and the projector onto the used subspace otherwise. Vertex
    dephasing is a separate channel and is not included.
    """
    if step.coin_kraus is None:
        return [step.shift.matrix() @ step.coin]
    smat = step.shift.matrix()
    return [smat @ g @ step.coin for g in _expanded_kraus(step)]


# ----------------------------------------------------------------------
# trajectories

@dataclass(frozen=True)
class TrajectoryRecord:
    """Measurement record of one sampled walk."""

    seed: int
    outcomes: tuple[int, ...]
    outcome_probabilities: tuple[float, ...]
    vertex_outcomes: tuple[int, ...] | None = None


def _require_unravelable(step: StepMap) -> None:
    if step.coin_kraus is None:
        raise ConfigError(
            "trajectory sampling needs a configured coin measurement (beta > 0)"
        )
    if step.vertex_dephasing not in (0.0, 1.0):
        raise ConfigError(
            "pure-state trajectories support vertex dephasing 0 (off) or 1 "
            f"(projective), not {step.vertex_dephasing}"
        )


def _branch_probabilities(phi: np.ndarray, expanded: list[np.ndarray]) -> np.ndarray:
    probs = np.array([float(np.vdot(k @ phi, k @ phi).real) for k in expanded])
    total = probs.sum()
    if abs(total - 1.0) > 1e-10:
        raise InvariantViolation(f"branch probabilities sum to {total!r}")
    return probs / total


def _project_vertex(psi: np.ndarray, vertex: int, degree: int) -> np.ndarray:
    out = np.zeros_like(psi)
    lo = vertex * degree
    out[lo: lo + degree] = psi[lo: lo + degree]
    norm = float(np.vdot(out, out).real)
    if norm < 1e-14:
        raise InvariantViolation("vertex projection left a state of negligible norm")
    return out / math.sqrt(norm)


def sample_trajectory(
    psi0: np.ndarray, step: StepMap, steps: int, seed: int
) -> tuple[np.ndarray, TrajectoryRecord]:
    """Sample one measurement record and the conditioned final state.

    Each step draws a meter outcome with the Born probability of its
    Kraus branch, renormalizes, and shifts. With vertex dephasing 1 the
    walker's position is also measured each step and recorded. The
    draw sequence is fully determined by the seed.
    """
    _require_unravelable(step)
    rng = np.random.default_rng(seed)
    expanded = _expanded_kraus(step)
    n, d = step.shift.num_vertices, step.shift.degree
    measure_position = step.vertex_dephasing == 1.0

    psi = psi0.copy()
    outcomes: list[int] = []
    probs: list[float] = []
    vertices: list[int] = []
    for _ in range(steps):
        phi = step.coin @ psi
        w = _branch_probabilities(phi, expanded)
        viable = np.flatnonzero(w > 1e-28)
        i = int(viable[rng.choice(viable.size, p=w[viable] / w[viable].sum())])
        psi = expanded[i] @ phi
        norm = float(np.vdot(psi, psi).real)
        if norm < 1e-14:
            raise InvariantViolation("sampled branch has negligible norm")
        psi = psi / math.sqrt(norm)
        outcomes.append(i)
        probs.append(float(w[i]))
        if measure_position and step.placement == "before-shift":
            pv = pure_position_marginal(psi, d)
            v = int(rng.choice(n, p=pv / pv.sum()))
            psi = _project_vertex(psi, v, d)
            vertices.append(v)
        psi = step.shift.apply(psi)
        if measure_position and step.placement == "after-shift":
            pv = pure_position_marginal(psi, d)
            v = int(rng.choice(n, p=pv / pv.sum()))
            psi = _project_vertex(psi, v, d)
            vertices.append(v)
    record = TrajectoryRecord(
        seed,
        tuple(outcomes),
        tuple(probs),
        tuple(vertices) if measure_position else None,
    )
    return psi, record


def enumerate_branches(
    psi0: np.ndarray, step: StepMap, steps: int, prune: float = 1e-18
) -> list[tuple[float, np.ndarray, tuple[int, ...]]]:
    """Expand every measurement branch exactly, for small step counts.

    Returns (probability, normalized state, outcome tuple) per branch.
    Branches of probability below prune are dropped; the surviving
    probabilities still sum to 1 up to that resolution. The weighted
    mixture of the returned states reproduces the density-matrix
    evolution, which is what makes the record ensemble a faithful
    unraveling.
    """
    _require_unravelable(step)
    if step.vertex_dephasing != 0.0:
        raise ConfigError("branch enumeration supports coin measurement only")
    expanded = _expanded_kraus(step)
    branches: list[tuple[float, np.ndarray, tuple[int, ...]]] = [(1.0, psi0.copy(), ())]
    for _ in range(steps):
        grown: list[tuple[float, np.ndarray, tuple[int, ...]]] = []
        for weight, psi, history in branches:
            phi = step.coin @ psi
            for i, k in enumerate(expanded):
                child = k @ phi
                w = float(np.vdot(child, child).real)
                if weight * w < prune:
                    continue
                grown.append(
                    (weight * w, step.shift.apply(child / math.sqrt(w)), history + (i,))
                )
        branches = grown
    return branches


def reconstruct_cycle_path(
    outcomes: tuple[int, ...], start_vertex: int, num_vertices: int, direction: int = 1
) -> list[int]:
    """Vertex sequence implied by a record on the direction-preserving cycle.

    Valid when the coin measurement is projective (beta = 1), where
    outcome 0 certifies coin state 0 (a move along the cycle direction)
    and outcome 1 the reverse move. Weaker measurements leave outcome 0
    ambiguous, and general graphs give records no such reading.
    """
    path = [start_vertex]
    v = start_vertex
    for o in outcomes:
        if o == 0:
            v = (v + direction) % num_vertices
        elif o == 1:
            v = (v - direction) % num_vertices
        else:
            raise ConfigError(f"cycle records carry outcomes 0 or 1, got {o}")
        path.append(v)
    return path
