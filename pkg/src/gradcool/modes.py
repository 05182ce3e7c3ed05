"""Normal modes of a harmonically confined ion chain.

Frequencies are in units of the axial trap frequency; the mode matrix M has
rows = ions and columns = modes, with M^T M = I.  Chains of up to three ions
use exact tabulated values; longer chains solve the Coulomb-crystal
equilibrium by Newton iteration and diagonalize the Hessian.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError, ConvergenceError

__all__ = ["ModeSpec", "modes_for_chain", "chain_equilibrium_positions"]

_DEFAULT_COM_TRUNCATION = 12
_DEFAULT_EXCITED_TRUNCATION = 6


@dataclass(frozen=True)
class ModeSpec:
    """Normal-mode description of an ion chain.

    ``mode_freqs`` are ascending and start at exactly 1 (the COM mode equals
    the trap frequency); ``driven_ion`` is the 0-based index of the ion that
    carries the laser coupling (ion 1 of the scheme).
    """

    n_ions: int
    mode_freqs: tuple[float, ...]
    mode_matrix: np.ndarray
    driven_ion: int = 0
    per_mode_truncation: tuple[int, ...] = field(default=())

    def __post_init__(self):
        m = np.asarray(self.mode_matrix, dtype=float)
        object.__setattr__(self, "mode_matrix", m)
        if self.n_ions < 1:
            raise ConfigError("n_ions must be >= 1")
        if m.shape != (self.n_ions, self.n_ions):
            raise ConfigError(f"mode matrix shape {m.shape} != ({self.n_ions}, {self.n_ions})")
        if len(self.mode_freqs) != self.n_ions:
            raise ConfigError("one frequency per mode required")
        if np.max(np.abs(m.T @ m - np.eye(self.n_ions))) > 1e-12:
            raise ConfigError("mode matrix is not orthogonal within 1e-12")
        if abs(self.mode_freqs[0] - 1.0) > 1e-12:
            raise ConfigError("lowest (COM) mode frequency must equal the trap frequency")
        if any(f2 <= f1 for f1, f2 in zip(self.mode_freqs, self.mode_freqs[1:])):
            raise ConfigError("mode frequencies must be strictly ascending")
        if not 0 <= self.driven_ion < self.n_ions:
            raise ConfigError(f"driven_ion {self.driven_ion} outside 0..{self.n_ions - 1}")
        if not self.per_mode_truncation:
            default = (_DEFAULT_COM_TRUNCATION,) + (_DEFAULT_EXCITED_TRUNCATION,) * (self.n_ions - 1)
            object.__setattr__(self, "per_mode_truncation", default)
        if len(self.per_mode_truncation) != self.n_ions:
            raise ConfigError("one truncation per mode required")

    @property
    def driven_row(self) -> np.ndarray:
        """Mode amplitudes M_d^n of the driven ion."""
        return self.mode_matrix[self.driven_ion]

    def with_truncation(self, per_mode_truncation: Sequence[int]) -> "ModeSpec":
        return ModeSpec(
            self.n_ions,
            self.mode_freqs,
            self.mode_matrix,
            self.driven_ion,
            tuple(int(n) for n in per_mode_truncation),
        )


def chain_equilibrium_positions(n_ions: int, tol: float = 1e-13, max_iter: int = 200) -> np.ndarray:
    """Dimensionless equilibrium positions of the axial Coulomb chain.

    Length unit l with l^3 = e^2 / (4 pi eps0 m nu^2); the potential is
    sum u_i^2 / 2 + sum_{i<j} 1 / |u_i - u_j|.
    """
    if n_ions == 1:
        return np.zeros(1)
    # Evenly spread starting guess with the right outer scale.
    u = 0.6 * (n_ions - 1) ** 0.6 * np.linspace(-1.0, 1.0, n_ions)
    for _ in range(max_iter):
        diff = u[:, None] - u[None, :]
        np.fill_diagonal(diff, np.inf)
        inv2 = np.sign(diff) / diff**2
        grad = u - inv2.sum(axis=1)
        inv3 = 2.0 / np.abs(diff) ** 3
        hess = -inv3
        np.fill_diagonal(hess, 1.0 + inv3.sum(axis=1))
        step = np.linalg.solve(hess, grad)
        u = u - step
        if np.max(np.abs(step)) < tol:
            return np.sort(u)
    raise ConvergenceError(f"chain equilibrium Newton iteration did not converge for N={n_ions}")


def _chain_mode_data(n_ions: int) -> tuple[np.ndarray, np.ndarray]:
    u = chain_equilibrium_positions(n_ions)
    diff = u[:, None] - u[None, :]
    np.fill_diagonal(diff, np.inf)
    inv3 = 2.0 / np.abs(diff) ** 3
    hess = -inv3
    np.fill_diagonal(hess, 1.0 + inv3.sum(axis=1))
    lam, vec = np.linalg.eigh(hess)
    freqs = np.sqrt(lam)
    # Column sign convention: last ion's amplitude positive (matches the
    # tabulated three-ion matrix).
    for n in range(n_ions):
        col = vec[:, n]
        lead = col[np.max(np.nonzero(np.abs(col) > 1e-9))]
        if lead < 0:
            vec[:, n] = -col
    return freqs, vec


def modes_for_chain(
    n_ions: int,
    per_mode_truncation: Sequence[int] | None = None,
    driven_ion: int = 0,
) -> ModeSpec:
    """ModeSpec of an N-ion chain (exact values for N <= 3, computed otherwise)."""
    if n_ions < 1:
        raise ConfigError("n_ions must be >= 1")
    if n_ions == 1:
        freqs: tuple[float, ...] = (1.0,)
        mat = np.array([[1.0]])
    elif n_ions == 2:
        freqs = (1.0, float(np.sqrt(3.0)))
        s = 1.0 / np.sqrt(2.0)
        mat = np.array([[s, -s], [s, s]])
    elif n_ions == 3:
        freqs = (1.0, float(np.sqrt(3.0)), float(np.sqrt(29.0 / 5.0)))
        mat = np.array(
            [
                [1 / np.sqrt(3.0), -1 / np.sqrt(2.0), 1 / np.sqrt(6.0)],
                [1 / np.sqrt(3.0), 0.0, -2 / np.sqrt(6.0)],
                [1 / np.sqrt(3.0), 1 / np.sqrt(2.0), 1 / np.sqrt(6.0)],
            ]
        )
    else:
        f, mat = _chain_mode_data(n_ions)
        if abs(f[0] - 1.0) > 1e-10:
            raise ConvergenceError(f"COM frequency came out as {f[0]!r}, expected 1")
        freqs = (1.0,) + tuple(float(x) for x in f[1:])
    trunc = tuple(int(n) for n in per_mode_truncation) if per_mode_truncation else ()
    return ModeSpec(n_ions, freqs, mat, driven_ion=driven_ion, per_mode_truncation=trunc)
