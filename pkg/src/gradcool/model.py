"""Hamiltonians and dissipators of the magnetic-gradient cooling scheme.

Builds the single-ion and chain models in three pictures:

* ``original``  -- interaction-picture RWA Hamiltonian with the gradient term
  and the four-beam laser coupling at selectable Lamb-Dicke expansion order,
  plus bare decay operators.
* ``schrieffer_wolff`` -- state-dependent-displacement transformed picture.
  At order 1 with matched gradient (eta == eta_eff) the closed form is used,
  in which the carrier and blue-sideband couplings of the dark state cancel;
  otherwise the exact displacement unitary conjugates the order-expanded
  Hamiltonian.  Decay acquires the first-order commutator corrections (or the
  exactly displaced collapse operators at order='exact').
* ``dressed`` -- the Schrieffer-Wolff picture rotated to the eigenbasis of
  the carrier-coupled {e, B} block.

Frequencies are in units of the trap frequency nu, times in 1/nu.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .errors import ConfigError
from .hilbert import INTERNAL, CompositeSpace, FockSpace, dag, displacement, kron
from .modes import ModeSpec, modes_for_chain

__all__ = [
    "SystemParams",
    "GradientSpec",
    "LindbladModel",
    "ION_PRESETS",
    "build_rwa_hamiltonian",
    "build_sw_unitary",
    "build_sw_hamiltonian",
    "build_dissipators",
    "build_multimode_model",
    "dressed_rotation",
    "eta_from_gradient",
    "gradient_from_eta",
]

PICTURES = ("original", "schrieffer_wolff", "dressed")
ORDERS = (1, 2, "exact")


def _normalize_order(order) -> int | str:
    if order in (1, 2):
        return int(order)
    if order in ("1", "2"):
        return int(order)
    if order == "exact":
        return "exact"
    raise ConfigError(f"order must be 1, 2 or 'exact', got {order!r}")


@dataclass(frozen=True)
class SystemParams:
    """Physical scalars of the single-ion scheme, in units of the trap frequency.

    ``gamma_plus``/``gamma_minus`` are the per-channel decay rates into |+1>
    and |-1>; the paper's scalar gamma corresponds to equal channels
    (gamma_plus = gamma_minus = gamma, total excited-state decay 2 gamma).
    ``eta_eff`` defaults to ``eta`` (the matched-gradient condition).
    """

    omega: float = 0.0
    delta: float = 0.0
    gamma_plus: float = 0.0
    gamma_minus: float = 0.0
    eta: float = 0.0
    eta_eff: float | None = None
    phi: float = np.pi / 2
    order: int | str = 2
    n_max: int = 20
    nu: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "order", _normalize_order(self.order))
        if self.nu <= 0:
            raise ConfigError("nu must be positive")
        if self.gamma_plus < 0 or self.gamma_minus < 0:
            raise ConfigError("decay rates must be >= 0")
        if self.n_max < 4:
            raise ConfigError("n_max must be >= 4")
        if self.eta_eff is None:
            object.__setattr__(self, "eta_eff", self.eta)

    @classmethod
    def make(cls, omega=0.0, gamma=0.0, eta=0.0, delta="resonance", **kw) -> "SystemParams":
        """Convenience constructor: scalar gamma sets both channels, delta may
        be the string 'resonance' (condition delta = (nu^2 - omega^2)/nu)."""
        nu = kw.get("nu", 1.0)
        if delta == "resonance":
            delta = (nu**2 - omega**2) / nu
        return cls(omega=omega, delta=float(delta), gamma_plus=gamma, gamma_minus=gamma, eta=eta, **kw)

    @property
    def gamma_bar(self) -> float:
        """Mean channel rate; equals the common gamma for equal channels."""
        return 0.5 * (self.gamma_plus + self.gamma_minus)

    def replace(self, **kw) -> "SystemParams":
        if "eta" in kw and "eta_eff" not in kw:
            # keep the matched-gradient default when only eta changes
            kw["eta_eff"] = None
        return replace(self, **kw)


# --------------------------------------------------------------------------
# Magnetic-gradient physics (SI units)
# --------------------------------------------------------------------------

_HBAR = 1.054571817e-34  # J s
_MU_B = 9.2740100783e-24  # J/T
_G_E = -2.00231930436  # electron g-factor
_AMU = 1.66053906660e-27  # kg

# S1/2 -> P1/2 cooling transitions used in the gradient table
ION_PRESETS = {
    "yb172": {"mass_kg": 171.9363859 * _AMU, "wavelength_m": 369e-9},
    "ca40": {"mass_kg": 39.96259086 * _AMU, "wavelength_m": 397e-9},
}


@dataclass(frozen=True)
class GradientSpec:
    """Magnetic-gradient configuration of one ion in SI units.

    ``omega0`` is the level-shift frequency of the |+-1> states,
    omega0 = (-g) mu_B B0 / (2 hbar): the Zeeman levels sit at +-omega0 so the
    full splitting is 2 omega0 (m_j = +-1/2 ground states).
    """

    ion_mass: float
    wavelength: float
    trap_freq: float
    angle_theta: float = 0.0
    B0: float = 1e-3
    g_factor: float = _G_E
    dB_dx: float = 0.0

    def __post_init__(self):
        if self.ion_mass <= 0 or self.wavelength <= 0 or self.trap_freq <= 0:
            raise ConfigError("mass, wavelength and trap frequency must be positive")
        if self.B0 <= 0:
            raise ConfigError("B0 must be positive")

    @property
    def omega0(self) -> float:
        return (-self.g_factor) * _MU_B * self.B0 / (2 * _HBAR)

    @property
    def k(self) -> float:
        return 2 * np.pi / self.wavelength

    @property
    def ground_state_size(self) -> float:
        return np.sqrt(_HBAR / (2 * self.ion_mass * self.trap_freq))

    @property
    def eta_laser(self) -> float:
        """Laser Lamb-Dicke parameter k cos(theta) sqrt(hbar / 2 m nu)."""
        return self.k * np.cos(self.angle_theta) * self.ground_state_size


def eta_from_gradient(spec: GradientSpec, dB_dx: float | None = None) -> float:
    """Effective Lamb-Dicke parameter of a magnetic gradient,
    eta_eff = sqrt(hbar / 2 m nu) * (omega0 / (nu B0)) * dB/dx."""
    g = spec.dB_dx if dB_dx is None else dB_dx
    return spec.ground_state_size * spec.omega0 / (spec.trap_freq * spec.B0) * g


def gradient_from_eta(spec: GradientSpec, eta: float | None = None) -> float:
    """Gradient dB/dx producing a prescribed eta_eff (default: the laser eta,
    i.e. the matched-gradient condition; then
    dB/dx = 2 nu hbar k cos(theta) / ((-g) mu_B))."""
    target = spec.eta_laser if eta is None else eta
    scale = spec.ground_state_size * spec.omega0 / (spec.trap_freq * spec.B0)
    return target / scale


# --------------------------------------------------------------------------
# Model container
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LindbladModel:
    """A time-independent master equation drho/dt = -i[H, rho] + dissipators.

    ``collapse_ops`` are pre-scaled: each c contributes
    c rho c^dag - {c^dag c, rho}/2.  ``gradient_decay_terms`` are (A, C)
    pairs contributing [A, C rho C^dag] with A anti-Hermitian (the
    first-order displacement correction to the decay in the transformed
    picture; scale factors are folded into A).
    """

    hamiltonian: np.ndarray
    collapse_ops: tuple[np.ndarray, ...]
    gradient_decay_terms: tuple[tuple[np.ndarray, np.ndarray], ...]
    picture: str
    space: CompositeSpace
    params: SystemParams
    modes: ModeSpec | None = None
    basis_labels: tuple[str, str, str] = ("e", "+1", "-1")

    def __post_init__(self):
        if self.picture not in PICTURES:
            raise ConfigError(f"picture must be one of {PICTURES}, got {self.picture!r}")
        n = self.space.dim
        if self.hamiltonian.shape != (n, n):
            raise ConfigError("Hamiltonian dimension does not match the declared space")

    @property
    def dim(self) -> int:
        return self.space.dim


# --------------------------------------------------------------------------
# Laser plane-wave factors
# --------------------------------------------------------------------------


def _plane_wave(eta: float, x_op: np.ndarray, sign: int, order: int | str) -> np.ndarray:
    """exp(sign * i * eta * x) expanded to the requested order (x = b + b^dag)."""
    n = x_op.shape[0]
    ident = np.eye(n, dtype=complex)
    z = 1j * sign * eta
    if order == "exact":
        return expm(z * x_op)
    out = ident + z * x_op
    if order == 2:
        out = out + 0.5 * z**2 * (x_op @ x_op)
    return out


def _laser_envelopes(p: SystemParams, x_op: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two-beam envelopes for the |+1> and |-1> pairs.

    Pair a couples |e><+1| with beams (+k, phase 0) and (-k, phase phi);
    pair b couples |e><-1| with the opposite wavevector signs.
    """
    pp = np.exp(1j * p.phi)
    e_plus = _plane_wave(p.eta, x_op, +1, p.order) + pp * _plane_wave(p.eta, x_op, -1, p.order)
    e_minus = _plane_wave(p.eta, x_op, -1, p.order) + pp * _plane_wave(p.eta, x_op, +1, p.order)
    return e_plus, e_minus


# --------------------------------------------------------------------------
# Single-ion builders
# --------------------------------------------------------------------------


def _single_ion_space(p: SystemParams) -> CompositeSpace:
    return CompositeSpace.single_ion(p.n_max)


def build_rwa_hamiltonian(p: SystemParams, space: CompositeSpace | None = None) -> np.ndarray:
    """Interaction-picture Hamiltonian after the rotating-wave approximation.

    H = nu b^dag b + delta |e><e|
        + eta_eff nu (|+1><+1| - |-1><-1|)(b + b^dag)
        + (Omega/2) [ |e><+1| E_+ + |e><-1| E_- + h.c. ]

    with E_+- the two-beam plane-wave envelopes at the configured expansion
    order and intra-pair phase phi.
    """
    space = space or _single_ion_space(p)
    if space.n_modes != 1:
        raise ConfigError("build_rwa_hamiltonian is single-ion; use build_multimode_model")
    mode = space.modes[0]
    a = mode.annihilator()
    x = a + dag(a)
    n_op = dag(a) @ a

    h = p.nu * space.embed_mode(0, n_op)
    h = h + p.delta * space.internal_projector("e")
    h = h + p.eta_eff * p.nu * space.embed(INTERNAL.sigma_z_ground(), {0: x})

    e_plus, e_minus = _laser_envelopes(p, x)
    coupling = 0.5 * p.omega * (
        kron([INTERNAL.transition("e", "+1"), e_plus])
        + kron([INTERNAL.transition("e", "-1"), e_minus])
    )
    h = h + coupling + dag(coupling)
    return h


def build_sw_unitary(p: SystemParams, modes: ModeSpec | None = None) -> np.ndarray:
    """State-dependent displacement unitary removing the gradient displacement.

    Single ion: |+1> is displaced by +eta, |-1> by -eta, |e> untouched.
    For a chain the per-mode amplitudes are eta M_d^n (nu/nu_n)^(3/2).
    """
    if modes is None:
        space = _single_ion_space(p)
        amps = [p.eta]
    else:
        space = CompositeSpace.multimode(modes.per_mode_truncation)
        amps = [
            p.eta * m1 * (1.0 / f) ** 1.5
            for m1, f in zip(modes.driven_row, modes.mode_freqs)
        ]
    blocks = {}
    for label, sign in (("e", 0), ("+1", +1), ("-1", -1)):
        factors = [INTERNAL.projector(label)]
        for k, mode in enumerate(space.modes):
            if sign == 0 or amps[k] == 0.0:
                factors.append(np.eye(mode.dim))
            else:
                factors.append(displacement(mode, sign * amps[k]))
        blocks[label] = kron(factors)
    return blocks["e"] + blocks["+1"] + blocks["-1"]


def _sw_closed_form_coeffs(p: SystemParams, mode_freq: float = 1.0, m_amp: float = 1.0):
    """First-order transformed couplings of one mode at general phase.

    Returns (c_carrier_B, c_red, c_blue): coefficients of |e><B|,
    a |e><D| and a^dag |e><D|.  At phi = pi/2 the blue coefficient vanishes
    for the COM mode (mode_freq == 1).
    """
    one_plus = 1.0 + np.exp(1j * p.phi)
    one_minus = 1.0 - np.exp(1j * p.phi)
    c_hat = m_amp * np.sqrt(1.0 / mode_freq)
    ratio = 1.0 / mode_freq
    c_b = p.omega / np.sqrt(2.0) * one_plus
    c_red = p.eta * p.omega / np.sqrt(2.0) * c_hat * (1j * one_minus + one_plus * ratio)
    c_blue = p.eta * p.omega / np.sqrt(2.0) * c_hat * (1j * one_minus - one_plus * ratio)
    return c_b, c_red, c_blue


def build_sw_hamiltonian(
    p: SystemParams,
    closed_form: bool | None = None,
    space: CompositeSpace | None = None,
) -> np.ndarray:
    """Single-ion Hamiltonian in the Schrieffer-Wolff transformed picture.

    ``closed_form`` defaults to True at order 1 (requires eta == eta_eff) and
    False otherwise, where the exact displacement unitary conjugates the
    order-expanded Hamiltonian.  At order 1, phi = pi/2 the closed form is

    H' = nu b^dag b + delta |e><e|
         + [ (Omega/sqrt(2))(1+i) |e><B| + sqrt(2) eta Omega (1+i) b |e><D| + h.c. ]

    with no carrier or b^dag coupling on |e><D|.
    """
    space = space or _single_ion_space(p)
    if closed_form is None:
        closed_form = p.order == 1
    if closed_form:
        if p.order != 1:
            raise ConfigError("the closed-form transformed Hamiltonian is first order only")
        if p.eta != p.eta_eff:
            raise ConfigError(
                "closed form requires the matched gradient eta == eta_eff; "
                "use closed_form=False for the conjugation route"
            )
        mode = space.modes[0]
        a = mode.annihilator()
        n_op = dag(a) @ a
        c_b, c_red, c_blue = _sw_closed_form_coeffs(p)
        h = p.nu * space.embed_mode(0, n_op) + p.delta * space.internal_projector("e")
        coupling = (
            kron([INTERNAL.transition("e", "B"), c_b * np.eye(mode.dim)])
            + kron([INTERNAL.transition("e", "D"), c_red * a + c_blue * dag(a)])
        )
        return h + coupling + dag(coupling)
    if p.eta != p.eta_eff:
        warnings.warn(
            "eta != eta_eff: transformed picture built by exact conjugation; "
            "carrier/blue-sideband cancellation does not hold",
            stacklevel=2,
        )
    u = build_sw_unitary(p)
    h = build_rwa_hamiltonian(p, space)
    return u @ h @ dag(u)


def dressed_rotation(p: SystemParams) -> np.ndarray:
    """3x3 basis change from (e, +1, -1) to (u, d, D).

    Columns of the returned W are |u>, |d>, |D> so that W^dag H W expresses an
    internal operator in the dressed basis.
    """
    g = p.omega / np.sqrt(2.0) * (1.0 + 1j)
    block = np.array([[p.delta, g], [np.conj(g), 0.0]], dtype=complex)
    vals, vecs = np.linalg.eigh(block)
    order = np.argsort(vals)[::-1]  # u = upper dressed state first
    vecs = vecs[:, order]
    # gauge: real positive |e> amplitude
    for k in range(2):
        a_e = vecs[0, k]
        if a_e != 0:
            vecs[:, k] *= np.exp(-1j * np.angle(a_e))
    e_ket = INTERNAL.ket("e")
    b_ket = INTERNAL.bright()
    w = np.zeros((3, 3), dtype=complex)
    for k in range(2):
        w[:, k] = vecs[0, k] * e_ket + vecs[1, k] * b_ket
    w[:, 2] = INTERNAL.dark()
    return w


# --------------------------------------------------------------------------
# Dissipators and full models
# --------------------------------------------------------------------------


def _bare_collapse_ops(space: CompositeSpace, p: SystemParams) -> list[np.ndarray]:
    ops = []
    for label, rate in (("+1", p.gamma_plus), ("-1", p.gamma_minus)):
        if rate > 0:
            ops.append(np.sqrt(rate) * space.embed_internal(INTERNAL.transition(label, "e")))
    return ops


def _displaced_collapse_ops(
    space: CompositeSpace, p: SystemParams, amps: Sequence[float]
) -> list[np.ndarray]:
    """Exactly transformed collapse operators |i><e| (x) prod_n D(s_i amp_n)."""
    ops = []
    for label, sign, rate in (("+1", +1, p.gamma_plus), ("-1", -1, p.gamma_minus)):
        if rate <= 0:
            continue
        factors = [INTERNAL.transition(label, "e")]
        for k, mode in enumerate(space.modes):
            factors.append(
                displacement(mode, sign * amps[k]) if amps[k] != 0.0 else np.eye(mode.dim)
            )
        ops.append(np.sqrt(rate) * kron(factors))
    return ops


def _first_order_decay_terms(
    space: CompositeSpace, p: SystemParams, amps: Sequence[float]
) -> list[tuple[np.ndarray, np.ndarray]]:
    """(A, C) pairs of the first-order transformed-decay commutator terms.

    Expanding the displaced collapse operator |i><e| D(s_i eta) to first
    order gives the correction  gamma_i s_i eta [ (a^dag - a), |i><e| rho |e><i| ]
    per mode, with s_+1 = +1 and s_-1 = -1 (the displacement signs of the
    transformation).  The rate and amplitude are folded into A.
    """
    terms = []
    for label, sign, rate in (("+1", +1, p.gamma_plus), ("-1", -1, p.gamma_minus)):
        if rate <= 0:
            continue
        c = space.embed_internal(INTERNAL.transition(label, "e"))
        for k, mode in enumerate(space.modes):
            if amps[k] == 0.0:
                continue
            a = mode.annihilator()
            a_op = rate * sign * amps[k] * space.embed_mode(k, dag(a) - a)
            terms.append((a_op, c))
    return terms


def build_dissipators(p: SystemParams, picture: str = "original") -> LindbladModel:
    """Complete single-ion Lindblad model in the requested picture.

    Zeroth-order decay is sqrt(gamma_i) |i><e| in every picture.  In the
    transformed (and dressed) picture the decay additionally carries the
    first-order commutator corrections, or, at order='exact', the exactly
    displaced collapse operators.
    """
    if picture not in PICTURES:
        raise ConfigError(f"picture must be one of {PICTURES}, got {picture!r}")
    space = _single_ion_space(p)
    if picture == "original":
        h = build_rwa_hamiltonian(p, space)
        return LindbladModel(
            hamiltonian=h,
            collapse_ops=tuple(_bare_collapse_ops(space, p)),
            gradient_decay_terms=(),
            picture=picture,
            space=space,
            params=p,
        )

    h = build_sw_hamiltonian(p, space=space)
    if p.order == "exact":
        collapse = _displaced_collapse_ops(space, p, [p.eta])
        grad_terms: list[tuple[np.ndarray, np.ndarray]] = []
    else:
        collapse = _bare_collapse_ops(space, p)
        grad_terms = _first_order_decay_terms(space, p, [p.eta])

    labels = ("e", "+1", "-1")
    if picture == "dressed":
        w = dressed_rotation(p)
        w_full = space.embed_internal(w)
        h = dag(w_full) @ h @ w_full
        collapse = [dag(w_full) @ c @ w_full for c in collapse]
        grad_terms = [(dag(w_full) @ a @ w_full, dag(w_full) @ c @ w_full) for a, c in grad_terms]
        labels = ("u", "d", "D")
    return LindbladModel(
        hamiltonian=h,
        collapse_ops=tuple(collapse),
        gradient_decay_terms=tuple(grad_terms),
        picture=picture,
        space=space,
        params=p,
        basis_labels=labels,
    )


# --------------------------------------------------------------------------
# Multimode builders
# --------------------------------------------------------------------------


def _local_coordinate(space: CompositeSpace, modes: ModeSpec) -> np.ndarray:
    """(b_d + b_d^dag) of the driven ion expressed in normal-mode operators:
    sum_n M_d^n sqrt(nu/nu_n) (a_n + a_n^dag)."""
    x = np.zeros((space.dim, space.dim), dtype=complex)
    for k, (m1, f) in enumerate(zip(modes.driven_row, modes.mode_freqs)):
        a = space.modes[k].annihilator()
        x = x + m1 * np.sqrt(1.0 / f) * space.embed_mode(k, a + dag(a))
    return x


def _multimode_rwa_hamiltonian(p: SystemParams, modes: ModeSpec, space: CompositeSpace) -> np.ndarray:
    h = p.delta * space.internal_projector("e")
    for k, f in enumerate(modes.mode_freqs):
        mode = space.modes[k]
        a = mode.annihilator()
        h = h + p.nu * f * space.embed_mode(k, dag(a) @ a)
    x1 = _local_coordinate(space, modes)
    h = h + p.eta_eff * p.nu * space.embed_internal(INTERNAL.sigma_z_ground()) @ x1

    pp = np.exp(1j * p.phi)
    e_plus = _plane_wave(p.eta, x1, +1, p.order) + pp * _plane_wave(p.eta, x1, -1, p.order)
    e_minus = _plane_wave(p.eta, x1, -1, p.order) + pp * _plane_wave(p.eta, x1, +1, p.order)
    coupling = 0.5 * p.omega * (
        space.embed_internal(INTERNAL.transition("e", "+1")) @ e_plus
        + space.embed_internal(INTERNAL.transition("e", "-1")) @ e_minus
    )
    return h + coupling + dag(coupling)


def _multimode_sw_closed_form(p: SystemParams, modes: ModeSpec, space: CompositeSpace) -> np.ndarray:
    h = p.delta * space.internal_projector("e")
    for k, f in enumerate(modes.mode_freqs):
        mode = space.modes[k]
        a = mode.annihilator()
        h = h + p.nu * f * space.embed_mode(k, dag(a) @ a)
    c_b, _, _ = _sw_closed_form_coeffs(p)
    coupling = c_b * space.embed_internal(INTERNAL.transition("e", "B"))
    for k, (m1, f) in enumerate(zip(modes.driven_row, modes.mode_freqs)):
        _, c_red, c_blue = _sw_closed_form_coeffs(p, mode_freq=f, m_amp=m1)
        a = space.modes[k].annihilator()
        coupling = coupling + space.embed_internal(INTERNAL.transition("e", "D")) @ space.embed_mode(
            k, c_red * a + c_blue * dag(a)
        )
    return h + coupling + dag(coupling)


def build_multimode_model(
    p: SystemParams,
    modes: ModeSpec,
    picture: str = "original",
) -> LindbladModel:
    """Lindblad model of a chain with the laser acting on the driven ion.

    In the transformed picture at order 1 (matched gradient) the per-mode red
    and blue sideband couplings carry the factors (1 + nu/nu_n) and
    (1 - nu/nu_n): the blue sideband of the COM mode cancels exactly.
    Truncations come from ``modes.per_mode_truncation``.
    """
    if picture not in PICTURES:
        raise ConfigError(f"picture must be one of {PICTURES}, got {picture!r}")
    space = CompositeSpace.multimode(modes.per_mode_truncation)
    amps = [
        p.eta * m1 * (1.0 / f) ** 1.5 for m1, f in zip(modes.driven_row, modes.mode_freqs)
    ]
    if picture == "original":
        h = _multimode_rwa_hamiltonian(p, modes, space)
        return LindbladModel(
            hamiltonian=h,
            collapse_ops=tuple(_bare_collapse_ops(space, p)),
            gradient_decay_terms=(),
            picture=picture,
            space=space,
            params=p,
            modes=modes,
        )

    if p.order == 1 and p.eta == p.eta_eff:
        h = _multimode_sw_closed_form(p, modes, space)
    else:
        if p.eta != p.eta_eff:
            warnings.warn("eta != eta_eff: multimode transformed picture built by conjugation", stacklevel=2)
        u = build_sw_unitary(p, modes)
        h = u @ _multimode_rwa_hamiltonian(p, modes, space) @ dag(u)
    if p.order == "exact":
        collapse = _displaced_collapse_ops(space, p, amps)
        grad_terms: list[tuple[np.ndarray, np.ndarray]] = []
    else:
        collapse = _bare_collapse_ops(space, p)
        grad_terms = _first_order_decay_terms(space, p, amps)

    labels = ("e", "+1", "-1")
    if picture == "dressed":
        w_full = space.embed_internal(dressed_rotation(p))
        h = dag(w_full) @ h @ w_full
        collapse = [dag(w_full) @ c @ w_full for c in collapse]
        grad_terms = [(dag(w_full) @ a @ w_full, dag(w_full) @ c @ w_full) for a, c in grad_terms]
        labels = ("u", "d", "D")
    return LindbladModel(
        hamiltonian=h,
        collapse_ops=tuple(collapse),
        gradient_decay_terms=tuple(grad_terms),
        picture=picture,
        space=space,
        params=p,
        modes=modes,
        basis_labels=labels,
    )
