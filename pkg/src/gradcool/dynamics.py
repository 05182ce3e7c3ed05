"""Master-equation integration, monitoring, and steady states.

The density matrix is evolved in matrix form (the right-hand side is computed
by sparse-operator products, never by materializing the dim^2 x dim^2
superoperator); the vectorized superoperator is built only for steady-state
extraction and spectral analysis.

Two integrators are available: adaptive Runge-Kutta (scipy RK45, the default)
and a fixed-step classical RK4 whose step is chosen from an Arnoldi estimate
of the Liouvillian spectral radius.  Both preserve the trace exactly up to
roundoff (the right-hand side is traceless), and the stationary state is an
exact fixed point of either stepper.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import solve_ivp

from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateSteadyStateError,
    DimensionError,
    IntegratorError,
    TruncationError,
)
from .hilbert import CompositeSpace, check_density_matrix, dag, kron, thermal_diagonal
from .model import INTERNAL, LindbladModel

__all__ = [
    "IntegratorConfig",
    "CoolingTrace",
    "evolve",
    "steady_state",
    "initial_state",
    "liouvillian_matrix",
    "lindblad_rhs",
    "spectral_radius",
]

_DENSE_THRESHOLD = 512  # below this dimension dense matmul beats sparse products


@dataclass(frozen=True)
class IntegratorConfig:
    """Time-evolution controls.

    ``method`` is 'rk45' (adaptive, default) or 'rk4' (fixed step).  For
    'rk4', ``rk4_step`` overrides the automatic stability-derived step.
    ``sample_every`` is the output cadence in units of 1/nu (default
    t_end/400).  ``tail_tol`` bounds the population of the top two Fock
    levels of any mode; beyond it the run aborts with TruncationError.
    """

    t_end: float = 100.0
    method: str = "rk45"
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    sample_every: float | None = None
    tail_tol: float = 1e-6
    rk4_step: float | None = None

    def __post_init__(self):
        if self.t_end <= 0:
            raise ConfigError("t_end must be positive")
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.tail_tol <= 0:
            raise ConfigError("tolerances must be positive")
        if self.method not in ("rk45", "rk4"):
            raise ConfigError(f"method must be 'rk45' or 'rk4', got {self.method!r}")
        if self.sample_every is not None and self.sample_every <= 0:
            raise ConfigError("sample_every must be positive")


@dataclass(frozen=True)
class CoolingTrace:
    """Observable time series of one master-equation run.

    ``n_mean`` is the total phonon number (summed over modes); ``n_modes``
    holds the per-mode occupations for chains (shape (samples, modes)).
    ``valid`` is False when the trace monitor found |tr rho - 1| > 1e-7.
    """

    times: np.ndarray
    n_mean: np.ndarray
    pop_e: np.ndarray
    pop_D: np.ndarray
    tail: np.ndarray
    trace_defect: np.ndarray
    n_modes: np.ndarray | None = None
    valid: bool = True
    meta: dict = field(default_factory=dict)

    def mode_population(self, k: int) -> np.ndarray:
        if self.n_modes is None:
            if k != 0:
                raise DimensionError("single-mode trace has only mode 0")
            return self.n_mean
        return self.n_modes[:, k]


# --------------------------------------------------------------------------
# Right-hand side engine
# --------------------------------------------------------------------------


class _RhsEngine:
    """Precomputed operators for fast evaluation of the Lindblad RHS.

    K = -i H - (1/2) sum c^dag c.  For Hermitian rho,
        L(rho) = K rho + (K rho)^dag + sum c rho c^dag + sum [A, C rho C^dag],
    which costs a single large product per term (the feeding and commutator
    terms exploit c rho c^dag = (c (c rho)^dag)^dag and A^dag = -A).
    """

    def __init__(self, model: LindbladModel):
        self.dim = model.dim
        h = model.hamiltonian
        k_mat = -1j * h
        for c in model.collapse_ops:
            k_mat = k_mat - 0.5 * (dag(c) @ c)
        self.dense = self.dim <= _DENSE_THRESHOLD
        wrap = (lambda m: np.ascontiguousarray(m)) if self.dense else (lambda m: sp.csr_matrix(m))
        self.k_op = wrap(k_mat)
        self.collapse = [wrap(c) for c in model.collapse_ops]
        self.grad_terms = []
        for a_op, c_op in model.gradient_decay_terms:
            if np.max(np.abs(a_op + dag(a_op))) > 1e-12 * max(1.0, np.max(np.abs(a_op))):
                raise ConfigError("gradient decay term A must be anti-Hermitian")
            self.grad_terms.append((wrap(a_op), wrap(c_op)))

    def apply_hermitian(self, rho: np.ndarray) -> np.ndarray:
        """L(rho) assuming rho Hermitian (the fast path used by the steppers)."""
        y = self.k_op @ rho
        out = y + y.conj().T
        for c in self.collapse:
            out += (c @ (c @ rho).conj().T).conj().T
        for a_op, c_op in self.grad_terms:
            x = (c_op @ (c_op @ rho).conj().T).conj().T
            g = a_op @ x
            out += g + g.conj().T
        return out

    def apply_general(self, rho: np.ndarray) -> np.ndarray:
        """L(rho) for arbitrary (not necessarily Hermitian) rho."""
        out = self.k_op @ rho + (self.k_op @ rho.conj().T).conj().T
        for c in self.collapse:
            out += c @ ((c @ rho.conj().T).conj().T)
        for a_op, c_op in self.grad_terms:
            x = c_op @ ((c_op @ rho.conj().T).conj().T)
            g = a_op @ x
            out += g + (a_op @ x.conj().T).conj().T
        return out


def lindblad_rhs(model: LindbladModel, rho: np.ndarray) -> np.ndarray:
    """d rho / dt for an arbitrary operator rho (validation/testing entry point)."""
    return _RhsEngine(model).apply_general(np.asarray(rho, dtype=complex))


def spectral_radius(model: LindbladModel, tol: float = 1e-2) -> float:
    """Arnoldi estimate of the largest |eigenvalue| of the Liouvillian."""
    eng = _RhsEngine(model)
    n = model.dim

    def matvec(v):
        return eng.apply_general(v.reshape(n, n)).ravel()

    op = spla.LinearOperator((n * n, n * n), matvec=matvec, dtype=complex)
    rng = np.random.default_rng(12345)
    v0 = rng.standard_normal(n * n) + 1j * rng.standard_normal(n * n)
    try:
        vals = spla.eigs(op, k=1, which="LM", tol=tol, v0=v0, return_eigenvectors=False)
        return float(np.abs(vals[0]))
    except Exception:
        # power iteration fallback; overestimates are safe (smaller step)
        v = v0 / np.linalg.norm(v0)
        lam = 1.0
        for _ in range(60):
            w = matvec(v)
            lam = np.linalg.norm(w)
            if lam == 0:
                return 1.0
            v = w / lam
        return float(lam)


# --------------------------------------------------------------------------
# Initial states
# --------------------------------------------------------------------------

_INTERNAL_STATES = ("mixed", "dark", "bright", "plus", "minus", "excited")


def _internal_matrix(kind: str) -> np.ndarray:
    if kind == "mixed":
        return 0.5 * (INTERNAL.projector("+1") + INTERNAL.projector("-1"))
    if kind == "dark":
        v = INTERNAL.dark()
        return np.outer(v, v.conj())
    if kind == "bright":
        v = INTERNAL.bright()
        return np.outer(v, v.conj())
    if kind == "plus":
        return INTERNAL.projector("+1")
    if kind == "minus":
        return INTERNAL.projector("-1")
    if kind == "excited":
        return INTERNAL.projector("e")
    raise ConfigError(f"internal state must be one of {_INTERNAL_STATES}, got {kind!r}")


def initial_state(
    space: CompositeSpace,
    n_initial: float | Sequence[float] = 0.0,
    kind: str = "thermal",
    internal: str = "mixed",
    support_margin: int = 12,
) -> np.ndarray:
    """Product initial state internal (x) modes.

    ``kind`` 'thermal' builds per-mode diagonal thermal-profile mixtures with
    the exact requested mean occupation; the profile support is capped at
    max(n_max - support_margin, n_max/2) so the monitored truncation tail
    starts empty and keeps headroom during the cooling transient.  'fock'
    puts each mode in the nearest Fock state.  The default internal state is
    the even mixture of |+1> and |-1>.
    """
    if kind not in ("thermal", "fock"):
        raise ConfigError(f"initial state kind must be 'thermal' or 'fock', got {kind!r}")
    targets = [float(n_initial)] * space.n_modes if np.isscalar(n_initial) else [float(x) for x in n_initial]
    if len(targets) != space.n_modes:
        raise ConfigError("one initial occupation per mode required")
    factors = [_internal_matrix(internal)]
    for mode, target in zip(space.modes, targets):
        if kind == "fock":
            n = int(round(target))
            if n > mode.n_max:
                raise TruncationError(f"initial Fock level {n} exceeds n_max={mode.n_max}")
            v = mode.fock_state(n)
            factors.append(np.outer(v, v.conj()))
        else:
            cap = max(mode.n_max - support_margin, int(np.ceil(mode.n_max / 2)), 1)
            factors.append(thermal_diagonal(mode, target, support_cap=cap))
    return kron(factors)


# --------------------------------------------------------------------------
# evolve
# --------------------------------------------------------------------------


def _sample_times(cfg: IntegratorConfig) -> np.ndarray:
    dt = cfg.sample_every if cfg.sample_every is not None else cfg.t_end / 400.0
    n = max(int(np.ceil(cfg.t_end / dt)), 2)
    return np.linspace(0.0, cfg.t_end, n + 1)


class _Monitor:
    """Per-sample observable accumulation with truncation/trace checks."""

    def __init__(self, model: LindbladModel, cfg: IntegratorConfig):
        self.space = model.space
        self.tail_tol = cfg.tail_tol
        e_label = "u" if model.picture == "dressed" else "e"
        self.p_e = self.space.internal_projector(e_label)
        self.p_d = self.space.internal_projector("D")
        self.rows: list[tuple] = []

    def record(self, t: float, rho: np.ndarray) -> None:
        occ = self.space.mode_occupations(rho)
        tail = self.space.mode_tail(rho)
        pop_e = float(np.real(np.einsum("ij,ji->", self.p_e, rho)))
        pop_d = float(np.real(np.einsum("ij,ji->", self.p_d, rho)))
        defect = abs(complex(np.trace(rho)) - 1.0)
        self.rows.append((t, occ, pop_e, pop_d, tail, defect))
        if tail > self.tail_tol:
            raise TruncationError(
                f"Fock tail {tail:.3e} exceeds tail_tol={self.tail_tol} at t={t:.3f}"
            )

    def build(self, picture: str, meta_method: dict) -> CoolingTrace:
        times = np.array([r[0] for r in self.rows])
        n_modes = np.array([r[1] for r in self.rows])
        pop_e = np.array([r[2] for r in self.rows])
        pop_d = np.array([r[3] for r in self.rows])
        tail = np.array([r[4] for r in self.rows])
        defect = np.array([r[5] for r in self.rows])
        valid = bool(np.all(defect < 1e-7))
        meta = {"picture": picture, "tail_tol": self.tail_tol, **meta_method}
        return CoolingTrace(
            times=times,
            n_mean=n_modes.sum(axis=1),
            pop_e=pop_e,
            pop_D=pop_d,
            tail=tail,
            trace_defect=defect,
            n_modes=n_modes if self.space.n_modes > 1 else None,
            valid=valid,
            meta=meta,
        )


def evolve(model: LindbladModel, rho0: np.ndarray, cfg: IntegratorConfig) -> CoolingTrace:
    """Integrate d rho/dt = -i[H, rho] + dissipators and record observables.

    States are never accumulated (only the monitor rows are), so chain-sized
    runs stay within memory.  Raises TruncationError when the per-mode
    top-two Fock population exceeds ``cfg.tail_tol`` at any sample,
    IntegratorError when step control fails.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (model.dim, model.dim):
        raise DimensionError(f"rho0 shape {rho0.shape} does not match model dim {model.dim}")
    check_density_matrix(rho0)
    eng = _RhsEngine(model)
    times = _sample_times(cfg)
    monitor = _Monitor(model, cfg)
    monitor.record(times[0], rho0)
    n = model.dim

    if cfg.method == "rk4":
        h_target = cfg.rk4_step
        if h_target is None:
            lam = spectral_radius(model)
            h_target = 2.4 / max(lam, 1e-12)
        rho = rho0.copy()
        for t0, t1 in zip(times[:-1], times[1:]):
            span = t1 - t0
            steps = max(int(np.ceil(span / h_target)), 1)
            h = span / steps
            for _ in range(steps):
                k1 = eng.apply_hermitian(rho)
                k2 = eng.apply_hermitian(rho + 0.5 * h * k1)
                k3 = eng.apply_hermitian(rho + 0.5 * h * k2)
                k4 = eng.apply_hermitian(rho + h * k3)
                rho += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
            monitor.record(t1, rho)
        meta_method = {"method": "rk4", "step": h_target}
    else:

        def fun(_t, y):
            return eng.apply_hermitian(y.reshape(n, n)).ravel()

        if n * n * len(times) * 16 < 3e8:
            # One adaptive pass, sampled by dense output.
            sol = solve_ivp(
                fun,
                (float(times[0]), float(times[-1])),
                rho0.ravel(),
                method="RK45",
                t_eval=times[1:],
                rtol=cfg.rel_tol,
                atol=cfg.abs_tol,
            )
            if not sol.success:
                raise IntegratorError(f"adaptive RK failed: {sol.message}")
            for k, t1 in enumerate(sol.t):
                monitor.record(t1, sol.y[:, k].reshape(n, n))
        else:
            # Segment per sample interval: bounded memory for large spaces.
            y = rho0.ravel().copy()
            for t0, t1 in zip(times[:-1], times[1:]):
                sol = solve_ivp(
                    fun,
                    (float(t0), float(t1)),
                    y,
                    method="RK45",
                    rtol=cfg.rel_tol,
                    atol=cfg.abs_tol,
                )
                if not sol.success:
                    raise IntegratorError(f"adaptive RK failed on [{t0}, {t1}]: {sol.message}")
                y = sol.y[:, -1]
                monitor.record(t1, y.reshape(n, n))
        meta_method = {"method": "rk45", "rel_tol": cfg.rel_tol, "abs_tol": cfg.abs_tol}

    return monitor.build(model.picture, meta_method)


# --------------------------------------------------------------------------
# Vectorized superoperator and steady state
# --------------------------------------------------------------------------


def liouvillian_matrix(
    hamiltonian: np.ndarray,
    collapse_ops: Sequence[np.ndarray] = (),
    gradient_decay_terms: Sequence[tuple[np.ndarray, np.ndarray]] = (),
) -> np.ndarray:
    """Dense superoperator acting on row-major vec(rho).

    vec(A rho B) = kron(A, B^T) vec(rho).
    """
    h = np.asarray(hamiltonian, dtype=complex)
    n = h.shape[0]
    ident = np.eye(n, dtype=complex)
    lmat = -1j * (np.kron(h, ident) - np.kron(ident, h.T))
    for c in collapse_ops:
        cdc = dag(c) @ c
        lmat += np.kron(c, c.conj())
        lmat -= 0.5 * (np.kron(cdc, ident) + np.kron(ident, cdc.T))
    for a_op, c_op in gradient_decay_terms:
        sandwich = np.kron(c_op, c_op.conj())
        lmat += (np.kron(a_op, ident) - np.kron(ident, a_op.T)) @ sandwich
    return lmat


def liouvillian_of(model: LindbladModel) -> np.ndarray:
    if model.dim > 80:
        raise ConfigError(
            f"dense superoperator for dim={model.dim} would need "
            f"{(model.dim ** 2) ** 2 * 16 / 1e9:.1f} GB; materialize only at single-ion scale"
        )
    return liouvillian_matrix(model.hamiltonian, model.collapse_ops, model.gradient_decay_terms)


def steady_state(model: LindbladModel) -> np.ndarray:
    """Stationary density matrix by null-space extraction of the vectorized
    Liouvillian.

    Raises DegenerateSteadyStateError when the second-smallest singular value
    is below 1e-10 (non-unique stationary state, e.g. Omega = 0).
    """
    lmat = liouvillian_of(model)
    svals = np.linalg.svd(lmat, compute_uv=False)
    if svals[-2] <= 1e-10:
        raise DegenerateSteadyStateError(
            f"stationary state is not unique: second-smallest singular value {svals[-2]:.2e}"
        )
    _, _, vh = np.linalg.svd(lmat)
    rho = vh[-1].conj().reshape(model.dim, model.dim)
    tr = complex(np.trace(rho))
    if abs(tr) < 1e-12:
        raise DegenerateSteadyStateError("null vector has (near-)zero trace")
    rho = rho / tr
    rho = 0.5 * (rho + dag(rho))
    residual = np.max(np.abs(lmat @ rho.ravel()))
    if residual > 1e-10:
        raise ConvergenceError(f"steady-state residual {residual:.2e} exceeds 1e-10")
    return rho
