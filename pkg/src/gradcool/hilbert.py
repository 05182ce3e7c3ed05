"""Operator algebra on truncated Fock spaces tensored with a 3-level internal space.

All operators and states are dense complex numpy arrays.  Composite spaces are
ordered internal (x) mode_1 (x) ... (x) mode_K; :class:`CompositeSpace` does the
factor bookkeeping so the other modules never hand-index tensor blocks.

Everything here is immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm
from scipy.optimize import brentq

from .errors import ConfigError, DimensionError, TruncationError

__all__ = [
    "FockSpace",
    "InternalSpace",
    "INTERNAL",
    "CompositeSpace",
    "fock_ops",
    "kron",
    "displacement",
    "expect",
    "dag",
    "thermal_diagonal",
    "assert_hermitian",
    "check_density_matrix",
]


def dag(op: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return op.conj().T


@dataclass(frozen=True)
class FockSpace:
    """Harmonic oscillator truncated at Fock level ``n_max`` (dimension ``n_max + 1``)."""

    n_max: int

    def __post_init__(self):
        if self.n_max < 1:
            raise ConfigError(f"n_max must be >= 1, got {self.n_max}")

    @property
    def dim(self) -> int:
        return self.n_max + 1

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def annihilator(self) -> np.ndarray:
        """Matrix a with <m|a|n> = sqrt(n) delta_{m,n-1}."""
        a = np.zeros((self.dim, self.dim), dtype=complex)
        ns = np.arange(1, self.dim)
        a[ns - 1, ns] = np.sqrt(ns)
        return a

    def creator(self) -> np.ndarray:
        return dag(self.annihilator())

    def number_op(self) -> np.ndarray:
        return np.diag(np.arange(self.dim, dtype=float)).astype(complex)

    def fock_state(self, n: int) -> np.ndarray:
        if not 0 <= n <= self.n_max:
            raise DimensionError(f"Fock level {n} outside [0, {self.n_max}]")
        v = np.zeros(self.dim, dtype=complex)
        v[n] = 1.0
        return v


def fock_ops(space: FockSpace) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Annihilator, creator and number operator of a truncated Fock space."""
    a = space.annihilator()
    a_dag = dag(a)
    return a, a_dag, a_dag @ a


@dataclass(frozen=True)
class InternalSpace:
    """The 3-level internal space with fixed basis ordering (e, +1, -1).

    The derived ground-state superpositions are
    bright = (|+1> + |-1>)/sqrt(2) and dark = (|+1> - |-1>)/sqrt(2).
    """

    labels: tuple[str, str, str] = ("e", "+1", "-1")

    dim = 3

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise DimensionError(f"unknown internal label {label!r}") from None

    def ket(self, label: str) -> np.ndarray:
        v = np.zeros(3, dtype=complex)
        v[self.index(label)] = 1.0
        return v

    def bright(self) -> np.ndarray:
        return (self.ket("+1") + self.ket("-1")) / np.sqrt(2.0)

    def dark(self) -> np.ndarray:
        return (self.ket("+1") - self.ket("-1")) / np.sqrt(2.0)

    def projector(self, label: str) -> np.ndarray:
        v = self.ket(label)
        return np.outer(v, v.conj())

    def transition(self, to_label: str, from_label: str) -> np.ndarray:
        """|to><from| for basis labels or the derived labels 'B'/'D'."""
        special = {"B": self.bright, "D": self.dark}
        bra = special[from_label]() if from_label in special else self.ket(from_label)
        ket = special[to_label]() if to_label in special else self.ket(to_label)
        return np.outer(ket, bra.conj())

    def sigma_z_ground(self) -> np.ndarray:
        """|+1><+1| - |-1><-1| (the gradient coupling operator)."""
        return self.projector("+1") - self.projector("-1")


INTERNAL = InternalSpace()


def kron(ops: Sequence[np.ndarray]) -> np.ndarray:
    """Tensor product of operators in the declared factor order."""
    if len(ops) == 0:
        raise DimensionError("kron of an empty operator list")
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def displacement(space: FockSpace, alpha: float) -> np.ndarray:
    """exp(alpha (a_dag - a)) via matrix exponential on the truncated space.

    The generator is anti-Hermitian so the result is unitary to machine
    precision; the truncation artifact is that the top Fock rows differ from
    the infinite-dimensional displacement.  Raises
    :class:`TruncationError` when the unitarity defect on the lower
    ``n_max - 5`` block exceeds 1e-6.
    """
    if abs(alpha) * np.sqrt(space.n_max) > 0.5 * space.n_max:
        warnings.warn(
            f"displacement amplitude {alpha} is large for n_max={space.n_max}; "
            "truncation artifacts expected",
            stacklevel=2,
        )
    a = space.annihilator()
    d = expm(alpha * (dag(a) - a))
    k = max(space.n_max - 5, 1)
    defect = np.max(np.abs((dag(d) @ d - np.eye(space.dim))[:k, :k]))
    if defect > 1e-6:
        raise TruncationError(
            f"displacement unitarity defect {defect:.2e} on the lower block "
            f"(alpha={alpha}, n_max={space.n_max})"
        )
    return d


def expect(rho: np.ndarray, obs: np.ndarray) -> complex:
    """trace(obs @ rho); asserts a real result for Hermitian inputs."""
    rho = np.asarray(rho)
    obs = np.asarray(obs)
    if rho.shape != obs.shape or rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"shape mismatch: rho {rho.shape}, obs {obs.shape}")
    val = complex(np.einsum("ij,ji->", obs, rho))
    obs_hermitian = np.max(np.abs(obs - dag(obs))) < 1e-12
    rho_hermitian = np.max(np.abs(rho - dag(rho))) < 1e-10
    if obs_hermitian and rho_hermitian:
        assert abs(val.imag) < 1e-8, f"imaginary expectation {val.imag:.2e} for Hermitian observable"
    return val


def thermal_diagonal(space: FockSpace, n_mean: float, support_cap: int | None = None) -> np.ndarray:
    """Diagonal thermal-profile density matrix with exact mean phonon number.

    ``support_cap`` restricts the population to Fock levels <= cap (the
    geometric profile is renormalized and its parameter re-solved so that
    <n> equals ``n_mean`` exactly).  Capping keeps the top of the truncated
    space strictly empty, which the evolution tail monitor requires.
    """
    if n_mean < 0:
        raise ConfigError(f"n_mean must be >= 0, got {n_mean}")
    cap = space.n_max if support_cap is None else min(support_cap, space.n_max)
    if n_mean == 0:
        rho = np.zeros((space.dim, space.dim), dtype=complex)
        rho[0, 0] = 1.0
        return rho
    if n_mean >= cap:
        raise ConfigError(f"n_mean={n_mean} not representable with support <= {cap}")
    ns = np.arange(cap + 1, dtype=float)

    def mean_of(q: float) -> float:
        w = q**ns
        return float(np.sum(ns * w) / np.sum(w))

    # q in (0, 1) covers <n> in (0, cap/2); allow q > 1 up to near-uniform tilts.
    q_hi = 1.0
    while mean_of(q_hi) < n_mean:
        q_hi += 0.5
    q = brentq(lambda x: mean_of(x) - n_mean, 1e-12, q_hi + 1e-12, xtol=1e-15, rtol=8.9e-16)
    w = q**ns
    p = np.zeros(space.dim)
    p[: cap + 1] = w / np.sum(w)
    return np.diag(p).astype(complex)


def assert_hermitian(op: np.ndarray, tol: float = 1e-12, what: str = "operator") -> None:
    defect = np.max(np.abs(op - dag(op)))
    if defect > tol:
        raise ValueError(f"{what} is not Hermitian: max|H - H^dag| = {defect:.2e}")


def check_density_matrix(rho: np.ndarray, trace_tol: float = 1e-10, herm_tol: float = 1e-10) -> None:
    """Validate trace normalization and Hermiticity of a density matrix."""
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace {tr} deviates from 1")
    if np.max(np.abs(rho - dag(rho))) > herm_tol:
        raise ValueError("density matrix is not Hermitian")


@dataclass(frozen=True)
class CompositeSpace:
    """Internal (x) mode_1 (x) ... (x) mode_K bookkeeping and operator embedding."""

    internal: InternalSpace
    modes: tuple[FockSpace, ...]
    _mode_dims: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_mode_dims", tuple(m.dim for m in self.modes))

    @classmethod
    def single_ion(cls, n_max: int) -> "CompositeSpace":
        return cls(INTERNAL, (FockSpace(n_max),))

    @classmethod
    def multimode(cls, truncations: Sequence[int]) -> "CompositeSpace":
        return cls(INTERNAL, tuple(FockSpace(n) for n in truncations))

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def mode_dim(self) -> int:
        return int(np.prod(self._mode_dims))

    @property
    def dim(self) -> int:
        return self.internal.dim * self.mode_dim

    @property
    def tag(self) -> str:
        return "internal(x)" + "(x)".join(f"mode{k}[{m.n_max}]" for k, m in enumerate(self.modes))

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def embed_internal(self, op3: np.ndarray) -> np.ndarray:
        return kron([op3, np.eye(self.mode_dim)])

    def embed_mode(self, k: int, op: np.ndarray) -> np.ndarray:
        """Embed a single-mode operator at mode index ``k``."""
        if not 0 <= k < self.n_modes:
            raise DimensionError(f"mode index {k} outside 0..{self.n_modes - 1}")
        factors: list[np.ndarray] = [np.eye(3)]
        for j, m in enumerate(self.modes):
            factors.append(op if j == k else np.eye(m.dim))
        return kron(factors)

    def embed(self, op3: np.ndarray, mode_ops: dict[int, np.ndarray] | None = None) -> np.ndarray:
        """kron of an internal operator with per-mode operators (identity elsewhere)."""
        mode_ops = mode_ops or {}
        factors = [np.asarray(op3, dtype=complex)]
        for j, m in enumerate(self.modes):
            factors.append(mode_ops.get(j, np.eye(m.dim)))
        return kron(factors)

    def mode_annihilator(self, k: int) -> np.ndarray:
        return self.embed_mode(k, self.modes[k].annihilator())

    def mode_number_op(self, k: int) -> np.ndarray:
        return self.embed_mode(k, self.modes[k].number_op())

    def internal_projector(self, label: str) -> np.ndarray:
        special = {"B": self.internal.bright, "D": self.internal.dark}
        if label in special:
            v = special[label]()
            return self.embed_internal(np.outer(v, v.conj()))
        return self.embed_internal(self.internal.projector(label))

    # --- cheap diagonal observables used by the evolution monitors ---

    def _diag_tensor(self, rho: np.ndarray) -> np.ndarray:
        return np.real(np.diagonal(rho)).reshape((self.internal.dim, *self._mode_dims))

    def mode_occupations(self, rho: np.ndarray) -> np.ndarray:
        """<a_k^dag a_k> for each mode from the diagonal (exact for <n>)."""
        d = self._diag_tensor(rho)
        out = np.empty(self.n_modes)
        for k in range(self.n_modes):
            axes = tuple(i for i in range(d.ndim) if i != k + 1)
            marg = d.sum(axis=axes)
            out[k] = float(np.dot(np.arange(marg.size), marg))
        return out

    def mode_tail(self, rho: np.ndarray) -> float:
        """Largest per-mode population of the top two Fock levels."""
        d = self._diag_tensor(rho)
        worst = 0.0
        for k in range(self.n_modes):
            axes = tuple(i for i in range(d.ndim) if i != k + 1)
            marg = d.sum(axis=axes)
            worst = max(worst, float(marg[-2:].sum()))
        return worst

    def internal_population(self, rho: np.ndarray, label: str) -> float:
        p = self.internal_projector(label)
        return float(np.real(expect(rho, p)))
