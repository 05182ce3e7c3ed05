"""Analytic cooling-rate machinery and numerical rate extraction.

Covers the resonance condition, the dressed-state basis of the
carrier-coupled {e, B} block, the effective Rabi frequency bound, the
weak-coupling rate formula, the two-time-spectrum route (heating and cooling
rates A+- via resolvent evaluation of the Laplace-transformed internal
correlations), and the exponential fit that extracts a rate from a simulated
trace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import CoolingTrace, liouvillian_matrix
from .errors import ConfigError, FitError, SingularResolventError
from .hilbert import INTERNAL, dag
from .model import SystemParams

__all__ = [
    "DressedInfo",
    "SpectralRates",
    "RateResult",
    "resonance_detuning",
    "dressed_info",
    "omega_eff_at_resonance",
    "rate_formula",
    "adiabatic_rates",
    "internal_liouvillian",
    "extract_rate",
]


def resonance_detuning(omega: float, nu: float = 1.0) -> float:
    """Detuning that tunes the upper dressed state to the mode frequency:
    delta = (nu^2 - omega^2) / nu."""
    if nu <= 0:
        raise ConfigError("nu must be positive")
    return (nu**2 - omega**2) / nu


@dataclass(frozen=True)
class DressedInfo:
    """Eigendata of the carrier-coupled {e, B} block.

    omega_u >= omega_d are the dressed energies; a_e_u and a_e_d the |e>
    amplitudes of the dressed states (gauge: real, a_e_u >= 0);
    omega_eff = Omega * a_e_u measures the strength of the resonant cooling
    coupling.
    """

    omega_u: float
    omega_d: float
    a_e_u: complex
    a_e_d: complex
    omega_eff: complex


def dressed_info(p: SystemParams) -> DressedInfo:
    """Diagonalize the 2x2 block delta |e><e| + (Omega/sqrt(2))(1+i)|e><B| + h.c.

    The off-diagonal magnitude is |Omega (1+i)/sqrt(2)| = Omega, so the
    energies are (delta +- sqrt(delta^2 + 4 Omega^2)) / 2.
    """
    g = p.omega / np.sqrt(2.0) * (1.0 + 1j)
    block = np.array([[p.delta, g], [np.conj(g), 0.0]], dtype=complex)
    vals, vecs = np.linalg.eigh(block)
    hi, lo = int(np.argmax(vals)), int(np.argmin(vals))
    a_u, a_d = vecs[0, hi], vecs[0, lo]
    # gauge: real non-negative |e> amplitudes
    phase_u = np.exp(-1j * np.angle(a_u)) if a_u != 0 else 1.0
    phase_d = np.exp(-1j * np.angle(a_d)) if a_d != 0 else 1.0
    a_u = complex(a_u * phase_u)
    a_d = complex(a_d * phase_d)
    return DressedInfo(
        omega_u=float(vals[hi]),
        omega_d=float(vals[lo]),
        a_e_u=a_u,
        a_e_d=a_d,
        omega_eff=p.omega * a_u,
    )


def omega_eff_at_resonance(omega: float, nu: float = 1.0) -> float:
    """|Omega_eff| = nu |Omega| / sqrt(nu^2 + Omega^2) under the resonance
    condition; strictly below nu and monotone in |Omega|."""
    if nu <= 0:
        raise ConfigError("nu must be positive")
    return nu * abs(omega) / np.sqrt(nu**2 + omega**2)


def rate_formula(p: SystemParams) -> float:
    """Weak-coupling cooling rate
    W = 8 eta^2 Omega^2 gamma nu^2 / (gamma^2 nu^2 + [(delta - nu) nu + Omega^2]^2),
    which reduces to 8 eta^2 Omega^2 / gamma at the resonance detuning.

    gamma is the per-channel decay rate; for unequal channels the mean
    (gamma_plus + gamma_minus)/2 enters (it is the e-coherence decay rate).
    """
    gamma = p.gamma_bar
    if gamma == 0:
        raise ConfigError("rate formula requires a nonzero decay rate")
    nu = p.nu
    bracket = (p.delta - nu) * nu + p.omega**2
    return 8 * p.eta**2 * p.omega**2 * gamma * nu**2 / (gamma**2 * nu**2 + bracket**2)


# --------------------------------------------------------------------------
# Adiabatic elimination: internal two-time spectra and the A+- rates
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralRates:
    """Phonon heating/cooling rates from the internal two-time spectra.

    A_minus = 2 Re S21(+nu), A_plus = 2 Re S12(-nu); the rate is
    W = A_minus - A_plus and the predicted stationary occupation
    n_ss = A_plus / (A_minus - A_plus).
    """

    A_plus: float
    A_minus: float
    S12_at_minus_nu: complex
    S21_at_nu: complex
    n_ss: float

    @property
    def W(self) -> float:
        return self.A_minus - self.A_plus


def internal_liouvillian(p: SystemParams) -> np.ndarray:
    """9x9 vectorized Liouvillian of the internal 3-level dynamics
    (carrier coupling + spontaneous decay, no motion)."""
    g = p.omega / np.sqrt(2.0) * (1.0 + 1j)
    coupling = g * INTERNAL.transition("e", "B")
    h_int = p.delta * INTERNAL.projector("e") + coupling + dag(coupling)
    collapse = []
    for label, rate in (("+1", p.gamma_plus), ("-1", p.gamma_minus)):
        if rate > 0:
            collapse.append(np.sqrt(rate) * INTERNAL.transition(label, "e"))
    return liouvillian_matrix(h_int, collapse)


def _coupling_operators(p: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """Internal factors of the first-order cooling coupling:
    F1 = sqrt(2) eta Omega (1+i) |e><D| (pairs with b), F2 = F1^dag."""
    f1 = np.sqrt(2.0) * p.eta * p.omega * (1.0 + 1j) * INTERNAL.transition("e", "D")
    return f1, dag(f1)


def _resolvent_spectrum(
    lmat: np.ndarray, f_out: np.ndarray, f_in: np.ndarray, rho_ss: np.ndarray, freq: float
) -> complex:
    """S(freq) = integral_0^inf exp(i freq t) tr(f_out e^{L t}[f_in rho_ss]) dt
    evaluated as tr(f_out X) with (L + i freq) X = -(f_in rho_ss)."""
    rhs = (f_in @ rho_ss).ravel()
    shifted = lmat + 1j * freq * np.eye(lmat.shape[0])
    try:
        x = np.linalg.solve(shifted, -rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularResolventError(f"L + i*{freq} is singular: {exc}") from exc
    residual = np.linalg.norm(shifted @ x + rhs)
    scale = max(np.linalg.norm(rhs), 1e-300)
    if residual > 1e-8 * scale:
        raise SingularResolventError(
            f"resolvent solve at frequency {freq} left residual {residual:.2e}"
        )
    return complex(np.einsum("ij,ji->", f_out, x.reshape(3, 3)))


def adiabatic_rates(p: SystemParams) -> SpectralRates:
    """Heating/cooling rates of the first-order model by adiabatic elimination.

    The internal steady state is the dark state |D><D|; the first-order
    transformed-decay terms do not contribute.  The heating-side spectrum is
    computed even though A_plus vanishes identically in the first-order model
    (the same code path measures residual heating when applied to extended
    models).
    """
    lmat = internal_liouvillian(p)
    evals = np.linalg.eigvals(lmat)
    nonzero = evals[np.abs(evals) > 1e-10]
    if np.any(nonzero.real > -1e-12):
        raise ConfigError(
            "internal dynamics is not stable; adiabatic elimination is undefined "
            f"(eigenvalue with Re = {np.max(nonzero.real):.2e})"
        )
    dark = INTERNAL.dark()
    rho_ss = np.outer(dark, dark.conj())
    if np.max(np.abs(lmat @ rho_ss.ravel())) > 1e-12:
        raise ConfigError("dark state is not stationary for these parameters")
    f1, f2 = _coupling_operators(p)
    s21 = _resolvent_spectrum(lmat, f2, f1, rho_ss, +p.nu)
    s12 = _resolvent_spectrum(lmat, f1, f2, rho_ss, -p.nu)
    a_minus = 2.0 * s21.real
    a_plus = 2.0 * s12.real
    if a_minus < 0:
        raise ConfigError(f"negative cooling rate A_minus = {a_minus:.3e}")
    n_ss = a_plus / (a_minus - a_plus) if a_minus > a_plus else float("inf")
    return SpectralRates(
        A_plus=a_plus,
        A_minus=a_minus,
        S12_at_minus_nu=s12,
        S21_at_nu=s21,
        n_ss=n_ss,
    )


# --------------------------------------------------------------------------
# Rate extraction from simulated traces
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RateResult:
    """Exponential-decay fit of a cooling trace: <n>(t) ~ (n0 - n_final) e^{-W t} + n_final."""

    W: float
    n_final: float
    fit_window: tuple[float, float]
    residual: float
    valid: bool = True


def extract_rate(trace: CoolingTrace, mode: int | None = None) -> RateResult:
    """Fit the cooling rate of a decaying population trace.

    The asymptote is the mean of the last 5% of samples; log(<n> - n_final)
    is fit linearly over the window where the normalized excess lies in
    [0.1, 0.9].  Raises FitError when the trace is invalid, not decaying,
    the window holds fewer than 10 samples, or the rms log-residual exceeds
    0.05.
    """
    if not trace.valid:
        raise FitError("trace is flagged invalid (trace normalization drifted)")
    n = trace.n_mean if mode is None else trace.mode_population(mode)
    t = trace.times
    if len(n) < 20:
        raise FitError("trace too short to fit")
    k_tail = max(int(round(0.05 * len(n))), 2)
    n_final = float(np.mean(n[-k_tail:]))
    excess = n - n_final
    if excess[0] <= 0 or n[0] <= n[-1]:
        raise FitError("population does not decay overall")
    norm = excess / excess[0]
    below_hi = np.nonzero(norm <= 0.9)[0]
    below_lo = np.nonzero(norm < 0.1)[0]
    i_start = int(below_hi[0]) if below_hi.size else len(n)
    i_end = int(below_lo[0]) if below_lo.size else len(n) - k_tail
    if i_end - i_start < 10:
        raise FitError(
            f"fit window [{i_start}, {i_end}) holds fewer than 10 samples; "
            "extend t_end or sample more densely"
        )
    t_w = t[i_start:i_end]
    y_w = np.log(excess[i_start:i_end])
    slope, intercept = np.polyfit(t_w, y_w, 1)
    residual = float(np.sqrt(np.mean((y_w - (slope * t_w + intercept)) ** 2)))
    if residual > 0.05:
        raise FitError(f"log-linear fit residual {residual:.3f} exceeds 0.05")
    return RateResult(
        W=float(-slope),
        n_final=n_final,
        fit_window=(float(t_w[0]), float(t_w[-1])),
        residual=residual,
        valid=True,
    )
