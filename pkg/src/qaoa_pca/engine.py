"""Exact statevector simulation of alternating-layer circuits over a diagonal cost operator.

A p-layer circuit on n qubits starts from the uniform superposition and applies,
per layer i, the diagonal phase exp(-i * gamma_i * E(b)) followed by the
transverse-field mixer exp(-i * beta_i * X_q) on every qubit q. The mixer acts
as a butterfly on each amplitude pair (x, y) differing only in bit q:

    (x, y) -> (cos(beta) * x - i sin(beta) * y,  cos(beta) * y - i sin(beta) * x)

Cost is O(p * n * 2^n) amplitude updates; no gate matrices are materialized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ParameterVector:
    """The 2p circuit angles in radians: gamma_1..gamma_p then beta_1..beta_p."""

    gamma: tuple[float, ...]
    beta: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(float(x) for x in self.gamma))
        object.__setattr__(self, "beta", tuple(float(x) for x in self.beta))
        if len(self.gamma) != len(self.beta):
            raise ValueError(
                f"gamma and beta must have equal length, got {len(self.gamma)} and {len(self.beta)}"
            )
        if len(self.gamma) < 1:
            raise ValueError("at least one layer is required")
        if not all(np.isfinite(self.gamma)) or not all(np.isfinite(self.beta)):
            raise ValueError("all angles must be finite")

    @property
    def p(self) -> int:
        return len(self.gamma)

    def as_array(self) -> np.ndarray:
        """Flat layout gamma_1..gamma_p, beta_1..beta_p."""
        return np.array(self.gamma + self.beta, dtype=np.float64)

    @classmethod
    def from_array(cls, theta) -> "ParameterVector":
        theta = np.asarray(theta, dtype=np.float64)
        if theta.ndim != 1 or theta.size % 2 != 0 or theta.size < 2:
            raise ValueError(f"expected a flat vector of 2p angles, got shape {theta.shape}")
        p = theta.size // 2
        return cls(tuple(theta[:p]), tuple(theta[p:]))


def _qubit_count(size: int) -> int:
    n = size.bit_length() - 1
    if size < 2 or (1 << n) != size:
        raise ValueError(f"diagonal length must be a power of two >= 2, got {size}")
    return n


def evolve(diag: np.ndarray, params: ParameterVector) -> np.ndarray:
    """Final statevector of the p-layer circuit for the given energy diagonal."""
    diag = np.asarray(diag, dtype=np.float64)
    n = _qubit_count(diag.size)
    size = diag.size
    psi = np.full(size, 1.0 / np.sqrt(size), dtype=np.complex128)
    for gamma, beta in zip(params.gamma, params.beta):
        psi *= np.exp(-1j * gamma * diag)
        c = np.cos(beta)
        s = 1j * np.sin(beta)
        for q in range(n):
            pairs = psi.reshape(size >> (q + 1), 2, 1 << q)
            lo = pairs[:, 0, :].copy()
            hi = pairs[:, 1, :]
            pairs[:, 0, :] = c * lo - s * hi
            pairs[:, 1, :] = c * hi - s * lo
    return psi


def expectation(sv: np.ndarray, diag: np.ndarray) -> float:
    """Energy expectation sum_b |amplitude_b|^2 * E(b); real by construction."""
    sv = np.asarray(sv)
    diag = np.asarray(diag, dtype=np.float64)
    if sv.shape != diag.shape:
        raise ValueError(f"statevector shape {sv.shape} != diagonal shape {diag.shape}")
    prob = sv.real * sv.real + sv.imag * sv.imag
    return float(prob @ diag)


def approximation_ratio(energy: float, cmin: float) -> float:
    """energy / cmin; lies in [0, 1] for positive-weight graphs, 1 means optimal."""
    if not cmin < 0:
        raise ValueError(f"cmin must be negative (nonempty positive-weight graph), got {cmin}")
    return energy / cmin


def objective(diag: np.ndarray, params: ParameterVector) -> float:
    """The scalar the optimizer minimizes: expectation of the evolved statevector."""
    return expectation(evolve(diag, params), diag)
