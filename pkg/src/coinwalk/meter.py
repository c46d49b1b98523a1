"""Coin-meter coupling of tunable strength and its induced coin channel.

A two-level meter is prepared in |0> and coupled to the coin qubit by a
unitary W(beta) built from a fixed sequence of five rotation factors,
with the strength knob beta in [0, 1]. Acting on (gamma |0> + eta |1>)
(x) |0>_m the coupling produces

    gamma |0>|0>_m + eta |1> (cos(beta pi/2) |0>_m + sin(beta pi/2) |1>_m),

so the meter ends orthogonal to its start exactly when the coin is |1>
and the coupling is strong. Tracing out the meter multiplies the coin's
off-diagonal elements by cos(beta pi/2) and leaves the diagonal alone:
a pure dephasing channel in the coin basis. beta=0 is the identity,
beta=1 a projective coin measurement.

The generator sequence fixes the coupling only up to internal phase
conventions. This module picks the convention in which the coin-|0>
branch carries no phase (a final meter-axis phase rotation is folded
into the product). The alternative conventions differ by a meter-local
phase only, which cancels in every probability and in the induced
channel; with this choice the branch form above holds entrywise.

Reading the meter in its computational basis turns each outcome into a
Kraus operator on the coin: outcome 0 leaves diag(1, cos(beta pi/2)),
outcome 1 leaves diag(0, sin(beta pi/2)). Outcome 1 therefore certifies
the coin was |1>, which is what makes the record a which-path record.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .state import partial_trace_meter

__all__ = [
    "DephasingKraus",
    "MeterCoupling",
    "apply_kraus",
    "build_meter_unitary",
    "conditional_meter_states",
    "dephasing_kraus",
    "distinguishability",
    "induced_coin_channel",
    "trace_distance",
    "uniform_dephasing_kraus",
    "visibility",
]

_ID2 = np.eye(2, dtype=complex)
# Interaction generators. The y and z axes enter with the sign that makes
# the ladder operators |1><0| and |0><1| raise and lower the coin.
_COIN_X = np.array([[0, 1], [1, 0]], dtype=complex)
_COIN_Y = np.array([[0, 1j], [-1j, 0]], dtype=complex)
_METER_X = _COIN_X
_METER_Y = _COIN_Y
_METER_Z = np.diag([-1.0, 1.0]).astype(complex)
# Folds the leftover phase of the factor product onto the meter axis so
# that the coin-|0> branch comes out phase-free (see module docstring).
_PHASE_FIX = np.kron(_ID2, np.diag([-1j, 1.0]))


def _rotation(theta: float, generator: np.ndarray) -> np.ndarray:
    """exp(i theta G) in closed form for a generator with G^2 = I."""
    dim = generator.shape[0]
    return math.cos(theta) * np.eye(dim, dtype=complex) + 1j * math.sin(theta) * generator


@dataclass(frozen=True)
class MeterCoupling:
    """The 4 x 4 coupling unitary, coin factor left, meter factor right."""

    beta: float
    matrix: np.ndarray


@dataclass(frozen=True)
class DephasingKraus:
    """Two coin Kraus operators labeled by the meter outcome."""

    beta: float
    operators: tuple[np.ndarray, np.ndarray]


def _check_beta(beta: float) -> None:
    if not 0.0 <= beta <= 1.0:
        raise ConfigError(f"measurement strength beta must lie in [0, 1], got {beta}")


def build_meter_unitary(beta: float) -> MeterCoupling:
    """Assemble the coupling unitary W(beta) from its rotation factors.

    The five factors are applied right to left: prepare the meter phase,
    tilt the meter by an angle that shrinks as beta grows, phase both
    registers, apply the coin-meter coupling rotation of angle
    beta pi/4, then undo the initial tilts.
    """
    _check_beta(beta)
    f1 = np.kron(_rotation(math.pi / 4, _COIN_Y), _rotation(-math.pi / 4, _METER_X))
    f2 = _rotation(-beta * math.pi / 4, np.kron(_COIN_X, _METER_X))
    f3 = np.kron(_rotation(-math.pi / 4, _COIN_Y), _rotation(-math.pi / 4, _METER_Z))
    f4 = np.kron(_ID2, _rotation(-math.pi * (1 - beta) / 4, _METER_Y))
    f5 = np.kron(_ID2, _rotation(-math.pi / 4, _METER_Z))
    return MeterCoupling(beta, _PHASE_FIX @ f1 @ f2 @ f3 @ f4 @ f5)


def induced_coin_channel(coupling: MeterCoupling, coin_rho: np.ndarray) -> np.ndarray:
    """Couple a fresh meter to the coin, then trace the meter out.

    Computes W (rho (x) |0><0|_m) W^dagger followed by the partial
    trace, which multiplies the coin off-diagonals by cos(beta pi/2).
    """
    meter0 = np.zeros((2, 2), dtype=complex)
    meter0[0, 0] = 1.0
    joint = np.kron(np.asarray(coin_rho, dtype=complex), meter0)
    evolved = coupling.matrix @ joint @ coupling.matrix.conj().T
    return partial_trace_meter(evolved, meter_dim=2)


def dephasing_kraus(beta: float) -> DephasingKraus:
    """Kraus pair of the coin channel, labeled by the meter outcome.

    K_0 = diag(1, cos(beta pi/2)) for outcome 0, K_1 = diag(0,
    sin(beta pi/2)) for outcome 1. Completeness K_0^dag K_0 + K_1^dag
    K_1 = I holds exactly. The pair reproduces the traced meter model
    channel for every coin state.
    """
    _check_beta(beta)
    c = math.cos(beta * math.pi / 2)
    s = math.sin(beta * math.pi / 2)
    k0 = np.diag([1.0, c]).astype(complex)
    k1 = np.diag([0.0, s]).astype(complex)
    return DephasingKraus(beta, (k0, k1))


def uniform_dephasing_kraus(beta: float, dim: int) -> tuple[np.ndarray, ...]:
    """Dephasing Kraus family for a coin of any dimension.

    The two-level meter construction has no given analogue for a
    many-port coin, so for dim > 2 this package substitutes the channel
    rho -> f rho + (1 - f) diag(rho) with f = cos(beta pi/2): every
    off-diagonal element decays by the same factor as in the two-level
    case and the diagonal is untouched. Operators are sqrt(f) I plus
    one sqrt(1-f) projector per coin direction; outcome 0 means no
    information gained, outcome k >= 1 means the coin was seen at
    direction k-1.
    """
    _check_beta(beta)
    if dim < 1:
        raise ConfigError(f"coin dimension must be positive, got {dim}")
    f = math.cos(beta * math.pi / 2)
    ops = [math.sqrt(f) * np.eye(dim, dtype=complex)]
    for k in range(dim):
        proj = np.zeros((dim, dim), dtype=complex)
        proj[k, k] = math.sqrt(1.0 - f)
        ops.append(proj)
    return tuple(ops)


def apply_kraus(rho: np.ndarray, operators) -> np.ndarray:
    """Sum_i K_i rho K_i^dagger."""
    out = np.zeros_like(rho, dtype=complex)
    for op in operators:
        out += op @ rho @ op.conj().T
    return out


def visibility(beta: float) -> float:
    """Interference visibility cos(beta pi/2) surviving one measured step."""
    _check_beta(beta)
    return math.cos(beta * math.pi / 2)


def distinguishability(beta: float) -> float:
    """Which-path knowledge sin(beta pi/2); squares with visibility to 1."""
    _check_beta(beta)
    return math.sin(beta * math.pi / 2)


def conditional_meter_states(beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Meter states conditioned on the coin being |0> or |1>.

    Obtained by applying the coupling to each coin basis state with the
    meter prepared in |0>. Their trace distance equals
    distinguishability(beta): orthogonal at beta=1, identical at beta=0.
    """
    w = build_meter_unitary(beta).matrix
    states = []
    for coin_index in (0, 1):
        out = w[:, coin_index * 2]  # input (coin basis) (x) |0>_m
        block = out.reshape(2, 2)[coin_index]
        leak = np.linalg.norm(out.reshape(2, 2)[1 - coin_index])
        if leak > 1e-12:
            raise AssertionError(f"coupling leaked {leak:.3e} across coin states")
        states.append(block)
    return states[0], states[1]


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Half the sum of absolute eigenvalues of the (Hermitian) difference."""
    eigs = np.linalg.eigvalsh(np.asarray(rho) - np.asarray(sigma))
    return 0.5 * float(np.sum(np.abs(eigs)))
