"""Brute-force first-moment dynamics of a mode coupled to a discretised bath.

The Hamiltonian is quadratic, so at zero temperature the mean amplitudes
obey a closed linear system,

    i d<a>/dt   = omega(t) <a> + sum_k g_k(t) <b_k>
    i d<b_k>/dt = omega_k <b_k> + g_k(t) <a>,

with g_k(t) = w_k lambda(mu_k, t) and w_k = sqrt(sigma0 dmu / 2pi). The decay
of |<a>| gives Re Gamma(t) without any perturbative step. Bath phases are
removed analytically (interaction picture) so the integrator only tracks
slow envelopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .kernel import big_omega, coupling_profile
from .params import ModulationSpec, ReservoirSpec

TAIL_FRACTION = 1e-4
MIN_MODES = 500


class ResourceError(ValueError):
    """The requested run needs more modes than configured."""

    def __init__(self, message, *, min_modes=None, max_horizon=None):
        super().__init__(message)
        self.min_modes = min_modes
        self.max_horizon = max_horizon


class RecurrenceError(ResourceError):
    """The uniform bath grid would revive within the requested horizon."""


class IntegrationError(RuntimeError):
    pass


def lorentzian_tail_fraction(halfwidth: float, xi: float) -> float:
    """Share of int xi^4/(d^2+xi^2)^2 dd lying outside |d| > halfwidth."""
    w = halfwidth / xi
    inside = 2 * (math.atan(w) + w / (1 + w * w)) / math.pi
    return max(0.0, 1.0 - inside)


@dataclass(frozen=True)
class BathGrid:
    mus: np.ndarray       # absolute mode frequencies
    weights: np.ndarray   # sqrt(sigma0 dmu / 2pi)
    M: int
    W: float
    omega0: float

    @property
    def spacing(self) -> float:
        return 2 * self.W / self.M

    @property
    def detunings(self) -> np.ndarray:
        return self.mus - self.omega0

    @property
    def recurrence_time(self) -> float:
        return 2 * math.pi / self.spacing

    def sum_rule(self, res: ReservoirSpec, mod: ModulationSpec, t: float = 0.0) -> float:
        """sum_k w_k^2 lambda(mu_k, t)^2; the continuum value is gamma0 xi / 4."""
        lam = coupling_profile(res, mod, self.mus, t)
        return float(np.sum(self.weights**2 * lam**2))


def build_bath(res: ReservoirSpec, mod: ModulationSpec, t_max: float, M: int, *,
               halfwidth_xi_multiples: float = 100.0,
               horizon_factor: float = 3.0) -> BathGrid:
    """Uniform midpoint grid on [omega0 - W, omega0 + W], W = n xi + chi.

    Raises :class:`RecurrenceError` if 2pi/dmu <= horizon_factor * t_max and
    ``ValueError`` if the Lorentzian tail outside the grid exceeds 1e-4.
    """
    if M < MIN_MODES:
        raise ResourceError(f"M must be at least {MIN_MODES}, got {M}", min_modes=MIN_MODES)
    W = halfwidth_xi_multiples * res.xi + mod.chi
    tail = lorentzian_tail_fraction(W - mod.chi, res.xi)
    if tail >= TAIL_FRACTION:
        raise ValueError(
            f"half-width {halfwidth_xi_multiples} xi leaves {tail:.2e} of the "
            f"coupling sum rule outside the grid (limit {TAIL_FRACTION})")
    dmu = 2 * W / M
    horizon = 2 * math.pi / dmu
    if horizon <= horizon_factor * t_max:
        need = int(math.ceil(horizon_factor * t_max * 2 * W / (2 * math.pi))) + 1
        raise RecurrenceError(
            f"recurrence horizon violated: 2pi/dmu = {horizon:.4g} <= "
            f"{horizon_factor} * t_max = {horizon_factor * t_max:.4g}; "
            f"use at least M = {need} modes or t_max < {horizon / horizon_factor:.4g}",
            min_modes=need, max_horizon=horizon / horizon_factor)
    mus = mod.omega0 - W + (np.arange(M) + 0.5) * dmu
    weights = np.full(M, math.sqrt(res.sigma0 * dmu / (2 * math.pi)))
    return BathGrid(mus, weights, M, W, mod.omega0)


@dataclass(frozen=True)
class MomentState:
    """Lab-frame mean amplitudes at time t."""

    a_amp: complex
    b_amps: np.ndarray
    t: float

    @property
    def norm(self) -> float:
        return abs(self.a_amp) ** 2 + float(np.sum(np.abs(self.b_amps) ** 2))


def _lab_phase_offset(mod: ModulationSpec, t):
    # big_omega without the omega0 t term, so large omega0 never enters the ODE.
    return big_omega(mod, t) - mod.omega0 * t


def evolve_moments(grid: BathGrid, mod: ModulationSpec, res: ReservoirSpec,
                   a0: complex, t_max: float, samples, *, rtol: float = 1e-8,
                   atol: float | None = None, norm_tol: float = 1e-7,
                   method: str = "DOP853") -> list[MomentState]:
    """Integrate the first moments from an empty bath.

    ``samples`` is a sample count (uniform on [0, t_max]) or an array of
    times. In the rotating frame A = e^{i Omega} <a>, B_k = e^{i mu_k t} <b_k>:

        dA/dt   = -i sum_k g_k e^{ i phi_k} B_k
        dB_k/dt = -i g_k e^{-i phi_k} A,   phi_k = Omega(t) - mu_k t.
    """
    times = (np.linspace(0.0, t_max, int(samples)) if np.ndim(samples) == 0
             else np.asarray(samples, dtype=float))
    d = grid.detunings
    w = grid.weights
    lam0, xi2 = res.lambda0, res.xi**2
    scale = abs(a0) if a0 != 0 else 1.0
    if atol is None:
        atol = 1e-12 * scale

    def rhs(t, y):
        A = y[0]
        B = y[1:]
        dev = omega_dev(t) - d
        g = w * lam0 * xi2 / (dev * dev + xi2)
        ph = np.exp(1j * (_lab_phase_offset(mod, t) - d * t))
        out = np.empty_like(y)
        out[0] = -1j * np.dot(g * ph, B)
        out[1:] = -1j * g * np.conj(ph) * A
        return out

    if mod.chi == 0:
        def omega_dev(t):
            return 0.0
    else:
        def omega_dev(t):
            return mod.sign * mod.chi * math.sin(mod.zeta * t)

    y0 = np.zeros(grid.M + 1, dtype=complex)
    y0[0] = a0
    sol = solve_ivp(rhs, (0.0, t_max), y0, method=method, t_eval=times,
                    rtol=rtol, atol=atol)
    if sol.status != 0:
        reached = sol.t[-1] if sol.t.size else 0.0
        raise IntegrationError(f"moment integration stopped at t={reached!r}: {sol.message}")

    norm0 = abs(a0) ** 2
    states = []
    for k, t in enumerate(sol.t):
        y = sol.y[:, k]
        drift = abs(float(np.sum(np.abs(y) ** 2)) - norm0)
        if drift > norm_tol * max(norm0, 1e-300):
            raise IntegrationError(
                f"norm drift {drift:.3e} exceeds {norm_tol:g} (relative) at t={t!r}")
        a_lab = y[0] * np.exp(-1j * big_omega(mod, t))
        b_lab = y[1:] * np.exp(-1j * grid.mus * t)
        states.append(MomentState(complex(a_lab), b_lab, float(t)))
    return states


@dataclass(frozen=True)
class DecayEnvelope:
    times: np.ndarray
    re_gamma: np.ndarray      # -ln |a(t)/a0|
    im_gamma: np.ndarray      # extra phase beyond Omega(t)
    total_phase: np.ndarray   # Omega(t) + Im Gamma(t)
    note: str = ""


def extract_decay(states: list[MomentState], mod: ModulationSpec,
                  floor: float = 1e-12) -> DecayEnvelope:
    """Empirical damping exponent from a sampled amplitude history."""
    if len(states) < 10:
        raise ValueError("need at least 10 samples to extract a decay envelope")
    a0 = states[0].a_amp
    if a0 == 0:
        raise ValueError("initial amplitude is zero")
    times = np.array([s.t for s in states])
    amps = np.array([s.a_amp for s in states])
    ratio = np.abs(amps) / abs(a0)
    note = ""
    keep = np.flatnonzero(ratio < floor)
    if keep.size:
        cut = keep[0]
        note = f"amplitude fell below {floor:g} at t={times[cut]!r}; series truncated"
        times, amps, ratio = times[:cut], amps[:cut], ratio[:cut]
    # Remove the known Omega(t) before unwrapping, so sampling need not resolve omega0.
    slow = amps * np.exp(1j * big_omega(mod, times)) / a0
    im_gamma = -np.unwrap(np.angle(slow))
    return DecayEnvelope(times, -np.log(ratio), im_gamma,
                         big_omega(mod, times) + im_gamma, note)
