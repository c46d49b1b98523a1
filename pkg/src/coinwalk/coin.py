"""Coin blocks and the block-diagonal coin operator.

The coin acts independently at each vertex: vertex j carries a unitary
on its d_j used ports, embedded into the d x d coin block with zero
rows and columns at unused ports. Blocks may differ per vertex or be
shared when the graph is regular.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import ConfigError, StructureError
from .graph import PortGraph

__all__ = [
    "CoinSpec",
    "build_coin_operator",
    "coin_spec_from_config",
    "default_coin_spec",
    "dft_coin",
    "embedded_blocks",
    "hadamard_phi",
]

UNITARITY_TOL = 1e-10


def hadamard_phi(phi: float) -> np.ndarray:
    """Two-sided coin with a tunable relative phase.

    Parameters
    ----------
    phi : float
        Phase angle in radians. phi = pi/2 gives the standard real
        Hadamard matrix.

    Returns
    -------
    ndarray
        The 2 x 2 unitary
        (1/sqrt(2)) [[1, -i e^{i phi}], [i e^{-i phi}, -1]].
    """
    return np.array(
        [
            [1.0, -1j * cmath.exp(1j * phi)],
            [1j * cmath.exp(-1j * phi), -1.0],
        ],
        dtype=complex,
    ) / math.sqrt(2)


def dft_coin(dim: int) -> np.ndarray:
    """Discrete Fourier transform coin, the unbiased choice for any degree.

    Entry (k, k2) is (1/sqrt(dim)) e^{2 pi i k k2 / dim}; every
    transition probability is 1/dim.
    """
    if dim < 1:
        raise ConfigError(f"coin dimension must be positive, got {dim}")
    k = np.arange(dim)
    return np.exp(2j * np.pi * np.outer(k, k) / dim) / math.sqrt(dim)


class CoinSpec:
    """Per-vertex coin blocks, or one block shared by every vertex.

    A shared block is only allowed when all vertices have full degree,
    since a reduced-degree vertex needs its own smaller unitary.
    """

    def __init__(self, blocks: list[np.ndarray], shared: bool = False):
        self.blocks = [np.asarray(b, dtype=complex) for b in blocks]
        self.shared = shared
        if shared and len(self.blocks) != 1:
            raise ConfigError("a shared CoinSpec takes exactly one block")
        if not self.blocks:
            raise ConfigError("CoinSpec needs at least one block")

    @classmethod
    def from_shared(cls, block: np.ndarray) -> "CoinSpec":
        return cls([block], shared=True)


def default_coin_spec(graph: PortGraph, phi: float = math.pi / 2) -> CoinSpec:
    """The package default: hadamard_phi(phi) on degree-2 regular graphs,
    otherwise a DFT coin of each vertex's own degree."""
    if all(dj == 2 for dj in graph.vertex_degrees):
        return CoinSpec.from_shared(hadamard_phi(phi))
    return CoinSpec([dft_coin(dj) if dj > 0 else np.zeros((0, 0)) for dj in graph.vertex_degrees])


def _check_block_unitary(block: np.ndarray, where: str) -> None:
    dim = block.shape[0]
    dev = np.max(np.abs(block.conj().T @ block - np.eye(dim))) if dim else 0.0
    if dev > UNITARITY_TOL:
        raise StructureError(f"coin block {where} is not unitary (deviation {dev:.3e})")


def embedded_blocks(graph: PortGraph, spec: CoinSpec) -> list[np.ndarray]:
    """Validate a CoinSpec against a graph and return one d x d block per vertex.

    Each supplied block must be either d_j x d_j (embedded with zero
    padding) or already d x d with exact zeros outside the used-port
    corner. Anything acting on an unused port is rejected.
    """
    n, d = graph.num_vertices, graph.degree
    if spec.shared:
        if any(dj != d for dj in graph.vertex_degrees):
            raise StructureError(
                "shared coin block requires every vertex to have full degree"
            )
        per_vertex = [spec.blocks[0]] * n
    else:
        if len(spec.blocks) != n:
            raise StructureError(
                f"need {n} coin blocks (one per vertex), got {len(spec.blocks)}"
            )
        per_vertex = spec.blocks

    out = []
    for j, block in enumerate(per_vertex):
        dj = graph.vertex_degrees[j]
        if block.shape == (dj, dj):
            _check_block_unitary(block, f"at vertex {j}")
            full = np.zeros((d, d), dtype=complex)
            full[:dj, :dj] = block
        elif block.shape == (d, d):
            if np.any(block[dj:, :] != 0) or np.any(block[:, dj:] != 0):
                raise StructureError(
                    f"coin block at vertex {j} (degree {dj}) has nonzero entries "
                    f"on unused ports; supply a {dj}x{dj} unitary instead"
                )
            _check_block_unitary(block[:dj, :dj], f"at vertex {j}")
            full = np.array(block, dtype=complex)
        else:
            raise StructureError(
                f"coin block at vertex {j} has shape {block.shape}; "
                f"expected ({dj},{dj}) or ({d},{d})"
            )
        out.append(full)
    return out


def build_coin_operator(graph: PortGraph, spec: CoinSpec) -> np.ndarray:
    """Assemble the full coin operator on the joint space.

    Returns a dense (N d) x (N d) matrix, block diagonal over vertices.
    It is unitary on the used subspace; rows and columns belonging to
    unused ports are identically zero.
    """
    blocks = embedded_blocks(graph, spec)
    n, d = graph.num_vertices, graph.degree
    op = np.zeros((n * d, n * d), dtype=complex)
    for j, block in enumerate(blocks):
        op[j * d: (j + 1) * d, j * d: (j + 1) * d] = block
    return op


def coin_spec_from_config(config: dict, graph: PortGraph, phi: float = math.pi / 2) -> CoinSpec:
    """Parse the coin section of a config dict.

    Accepted shapes: {"type": "hadamard", "phi": x}, {"type": "dft"},
    {"type": "custom", "blocks": [...]} where each block is a nested
    list of [re, im] pairs, one block per vertex.
    """
    kind = config.get("type")
    if kind == "hadamard":
        return CoinSpec.from_shared(hadamard_phi(float(config.get("phi", phi))))
    if kind == "dft":
        if all(dj == graph.degree for dj in graph.vertex_degrees):
            return CoinSpec.from_shared(dft_coin(graph.degree))
        return CoinSpec([dft_coin(dj) for dj in graph.vertex_degrees])
    if kind == "custom":
        if "blocks" not in config:
            raise ConfigError("custom coin config needs a 'blocks' list")
        blocks = []
        for j, raw in enumerate(config["blocks"]):
            try:
                block = np.array(
                    [[complex(re, im) for re, im in row] for row in raw], dtype=complex
                )
            except (TypeError, ValueError):
                raise ConfigError(
                    f"coin blocks[{j}]: entries must be [re, im] pairs"
                ) from None
            blocks.append(block)
        return CoinSpec(blocks)
    raise ConfigError(f"unknown coin type {kind!r}; use hadamard, dft, or custom")
