"""Effective time-dependent damping of a frequency-modulated mode.

The zero-temperature bath correlation accumulated since t = 0,

    gamma(t) = int_0^t dt' <Lambda(t) Lambda^dagger(t')>,

is written in the scaled delay tau = zeta (t - t') and the scaled detuning
nu = (omega0 - mu)/chi - s sin(zeta t), with s = -sign (s = +1 canonically):

    gamma(t) = varkappa kappa^4 chi int_0^{zeta t} dtau e^{-i eps F(tau)}
               int_{-inf}^{a} dnu/(2 pi)
               e^{i nu eps tau} / ((nu^2 + kappa^2)((nu + G)^2 + kappa^2))

    F(tau) = s [cos(zeta t - tau) - cos(zeta t) - tau sin(zeta t)]
    G(tau) = s [sin(zeta t) - sin(zeta t - tau)]
    a      = omega0/chi - s sin(zeta t)

With a -> infinity the nu integral closes in the upper half plane (poles at
i kappa and -G + i kappa), leaving a single oscillatory tau integral:

    gamma(t) = varkappa kappa^3 chi int_0^{zeta t} dtau
               e^{-i eps [F + tau G/2]} e^{-eps kappa tau}
               [G cos(x) + 2 kappa sin(x)] / (G (G^2 + 4 kappa^2)),
    x = eps tau G / 2.

``gamma_of_t`` evaluates the one-dimensional form with vectorised adaptive
panels; ``gamma_2d`` evaluates the two-dimensional form with scipy's QUADPACK
wrappers and a finite upper limit, as an independent cross-check.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate, interpolate

from .params import (DimensionlessGroup, ModulationSpec, ReservoirSpec,
                     StationaryModeError, derive_groups)
from .quadrature import QuadratureError, integrate_panels

G_THRESHOLD = 1e-6
TAU_CUT_DECAYS = 40.0

# Five-point Gauss-Lobatto rule on [-1, 1].
_LOB_X = np.array([-1.0, -math.sqrt(3 / 7), 0.0, math.sqrt(3 / 7), 1.0])
_LOB_W = np.array([1 / 10, 49 / 90, 32 / 45, 49 / 90, 1 / 10])


def omega_of_t(mod: ModulationSpec, t):
    """Instantaneous mode frequency omega0 + sign*chi*sin(zeta t)."""
    t = np.asarray(t, dtype=float)
    if mod.chi == 0:
        return np.full_like(t, mod.omega0)
    return mod.omega0 + mod.sign * mod.chi * np.sin(mod.zeta * t)


def big_omega(mod: ModulationSpec, t):
    """Accumulated phase int_0^t omega, in closed form."""
    t = np.asarray(t, dtype=float)
    if mod.chi == 0:
        return mod.omega0 * t
    eps = mod.chi / mod.zeta
    return mod.omega0 * t - mod.sign * eps * (np.cos(mod.zeta * t) - 1.0)


def coupling_profile(res: ReservoirSpec, mod: ModulationSpec, mu, t):
    """Lorentzian coupling centred on the instantaneous mode frequency."""
    d = omega_of_t(mod, t) - np.asarray(mu, dtype=float)
    return res.lambda0 * res.xi**2 / (d * d + res.xi**2)


@dataclass(frozen=True)
class KernelGeometry:
    tau: np.ndarray
    F: np.ndarray
    G: np.ndarray
    theta: np.ndarray
    a_limit: float


def _fg(tau, zt, s):
    tau = np.asarray(tau, dtype=float)
    sz, cz = math.sin(zt), math.cos(zt)
    shifted = zt - tau
    F = s * (np.cos(shifted) - cz - tau * sz)
    G = s * (sz - np.sin(shifted))
    return F, G


def kernel_geometry(groups: DimensionlessGroup, mod: ModulationSpec, t, tau) -> KernelGeometry:
    s = -mod.sign
    zt = mod.zeta * float(t)
    F, G = _fg(tau, zt, s)
    with np.errstate(divide="ignore"):
        theta = 2 * groups.kappa / G
    return KernelGeometry(np.asarray(tau, dtype=float), F, G, theta,
                          mod.omega0 / mod.chi - s * math.sin(zt))


def _amp_general(G, x, kappa):
    return (G * np.cos(x) + 2 * kappa * np.sin(x)) / (G * (G * G + 4 * kappa**2))


def _amp_series(G, x, kappa, k_eps_tau):
    # Second-order expansion in G of the general amplitude; x = eps*tau*G/2.
    x2 = x * x
    num = 1 + k_eps_tau - 0.5 * x2 - k_eps_tau * x2 / 6
    return num * (1 - G * G / (4 * kappa**2)) / (4 * kappa**2)


def kernel_integrand(tau, zt: float, groups: DimensionlessGroup, sign: int = -1,
                     *, g_threshold: float = G_THRESHOLD, branch: str = "auto"):
    """Dimensionless tau-integrand of the one-dimensional kernel.

    ``branch`` selects ``"general"``, ``"series"`` (small-|G| expansion) or
    ``"auto"`` (series below ``g_threshold``).
    """
    kappa, eps = groups.kappa, groups.epsilon
    tau = np.asarray(tau, dtype=float)
    F, G = _fg(tau, zt, -sign)
    x = 0.5 * eps * tau * G
    ket = kappa * eps * tau
    if branch == "general":
        amp = _amp_general(G, x, kappa)
    elif branch == "series":
        amp = _amp_series(G, x, kappa, ket)
    elif branch == "auto":
        small = np.abs(G) < g_threshold
        Gs = np.where(small, 1.0, G)
        amp = np.where(small, _amp_series(G, x, kappa, ket), _amp_general(Gs, x, kappa))
    else:
        raise ValueError(f"unknown branch {branch!r}")
    return np.exp(-1j * eps * (F + 0.5 * tau * G) - ket) * amp


def _require_modulated(mod: ModulationSpec, check_regime: bool):
    if mod.stationary:
        raise StationaryModeError(
            "chi == 0: the modulated kernel is singular, use stationary_reference")
    if check_regime and not mod.weak_modulation_ok:
        raise ValueError(
            f"chi/omega0 = {mod.chi / mod.omega0:.3g} >= 0.1: the closed nu-integral "
            "assumes weak modulation; pass check_regime=False to override")


def tau_range(groups: DimensionlessGroup, zt: float, truncate: bool = True) -> float:
    """Upper tau limit, optionally cut where exp(-eps kappa tau) < e^-40."""
    if truncate:
        return min(zt, TAU_CUT_DECAYS / (groups.epsilon * groups.kappa))
    return zt


def panel_width(groups: DimensionlessGroup, tau_max: float, scale: float = 10.0) -> float:
    """Largest panel allowed so the phase (slope <= eps (1 + tau)) is resolved."""
    return min(0.25, math.pi / (scale * groups.epsilon * (1.0 + tau_max)))


def gamma_of_t(groups: DimensionlessGroup, mod: ModulationSpec, t: float, *,
               atol: float = 1e-9, truncate: bool = True,
               g_threshold: float = G_THRESHOLD, check_regime: bool = True,
               panel_scale: float = 10.0) -> complex:
    """Complex effective damping rate gamma(t) (rad/s), zero temperature.

    The thermal occupation is not included; ``atol`` bounds the Re and Im
    error of the dimensionless tau integral.
    """
    _require_modulated(mod, check_regime)
    zt = mod.zeta * float(t)
    if zt == 0:
        return 0j
    tmax = tau_range(groups, zt, truncate)
    res = integrate_panels(
        lambda tau: kernel_integrand(tau, zt, groups, mod.sign, g_threshold=g_threshold),
        0.0, tmax, max_width=panel_width(groups, tmax, panel_scale), atol=atol)
    return groups.varkappa * groups.kappa**3 * mod.chi * res.value


def _nu_integral(tau, G, kappa, eps, upper, epsrel):
    """int_{-L}^{upper} dnu/(2 pi) e^{i nu eps tau} / ((nu^2+k^2)((nu+G)^2+k^2))."""
    k2 = kappa * kappa

    def r(nu):
        return 1.0 / ((nu * nu + k2) * ((nu + G) ** 2 + k2))

    peak = max(r(0.0), r(-G), r(-0.5 * G))
    # Beyond L the integrand is below 1e-12 of its peak.
    L = abs(G) + kappa + (1e-12 * peak) ** -0.25
    lo, hi = -L, min(upper, L)
    if hi <= lo:
        return 0j
    w = eps * tau
    pts = [p for p in (-G, -0.5 * G, 0.0) if lo < p < hi]
    # Split into chunks of a few oscillations each so QUADPACK never sees
    # more than ~20 periods at once.
    edges = sorted(set([lo, hi] + pts))
    if w > 0:
        step = 40 * math.pi / w
        fine = [edges[0]]
        for e0, e1 in zip(edges[:-1], edges[1:]):
            n = max(1, int(math.ceil((e1 - e0) / step)))
            fine.extend(e0 + (e1 - e0) * np.arange(1, n + 1) / n)
        edges = fine
    scale = peak * (hi - lo) * 1e-16
    re = im = 0.0
    for e0, e1 in zip(edges[:-1], edges[1:]):
        re += integrate.quad(lambda nu: r(nu) * math.cos(w * nu), e0, e1,
                             epsabs=scale, epsrel=epsrel, limit=400)[0]
        if w > 0:
            im += integrate.quad(lambda nu: r(nu) * math.sin(w * nu), e0, e1,
                                 epsabs=scale, epsrel=epsrel, limit=400)[0]
    return complex(re, im) / (2 * math.pi)


def gamma_2d(groups: DimensionlessGroup, mod: ModulationSpec, t: float, *,
             a_limit: float | None = None, epsrel: float = 1e-10,
             check_regime: bool = True) -> complex:
    """Two-dimensional (tau, nu) quadrature of gamma(t) with finite upper limit.

    ``a_limit`` overrides omega0/chi - s sin(zeta t), e.g. to expose the
    breakdown of the weak-modulation assumption.
    """
    _require_modulated(mod, check_regime)
    zt = mod.zeta * float(t)
    if zt == 0:
        return 0j
    s = -mod.sign
    kappa, eps = groups.kappa, groups.epsilon
    upper = (mod.omega0 / mod.chi - s * math.sin(zt)) if a_limit is None else a_limit

    def outer(tau):
        F, G = _fg(tau, zt, s)
        inner = _nu_integral(tau, float(G), kappa, eps, upper, epsrel * 1e-2)
        return complex(np.exp(-1j * eps * float(F))) * inner

    # Resolve the outer phase the same way the panels do, but with QUADPACK.
    n = max(1, int(math.ceil(zt * eps * (1 + zt) / (4 * math.pi))))
    edges = zt * np.arange(n + 1) / n
    total = 0j
    with warnings.catch_warnings():
        # QUADPACK flags roundoff once epsrel nears machine precision.
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for e0, e1 in zip(edges[:-1], edges[1:]):
            val, _ = integrate.quad(outer, e0, e1, complex_func=True, epsabs=0,
                                    epsrel=epsrel, limit=400)
            total += val
    return groups.varkappa * groups.kappa**4 * mod.chi * total


@dataclass(frozen=True)
class ComplexDampingTrace:
    """gamma(t) (rad/s) and its running integral Gamma(t) on a time grid."""

    times: np.ndarray
    gamma: np.ndarray
    big_gamma: np.ndarray

    def __post_init__(self):
        if self.times.ndim != 1 or self.times.size < 2:
            raise ValueError("trace needs at least two samples")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("trace times must be strictly increasing")

    @property
    def t_max(self) -> float:
        return float(self.times[-1])

    @cached_property
    def _gamma_spline(self):
        return interpolate.CubicSpline(self.times, self.gamma)

    @cached_property
    def _big_gamma_spline(self):
        # Hermite interpolation uses gamma as the exact derivative of Gamma.
        return interpolate.CubicHermiteSpline(self.times, self.big_gamma, self.gamma)

    def _check_range(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.times[0], self.times[-1]
        tol = 1e-12 * max(1.0, abs(hi))
        if np.any(t < lo - tol) or np.any(t > hi + tol):
            raise ValueError(f"time outside trace range [{lo}, {hi}]")
        return np.clip(t, lo, hi)

    def gamma_at(self, t):
        return self._gamma_spline(self._check_range(t))

    def big_gamma_at(self, t):
        return self._big_gamma_spline(self._check_range(t))


def _lobatto(f, t0, t1, f0, f1):
    h = 0.5 * (t1 - t0)
    mid = 0.5 * (t0 + t1)
    inner = [f(mid + h * x) for x in _LOB_X[1:4]]
    return h * (np.array([f0, *inner, f1]) @ _LOB_W), inner[1]


def _interval_integral(f, t0, t1, f0, f1, tol, whole=None, depth=0, rtol=1e-8,
                       max_depth=8):
    """Adaptive Gauss-Lobatto; the error is estimated from one halving."""
    if whole is None:
        whole, fm = _lobatto(f, t0, t1, f0, f1)
    else:
        whole, fm = whole
    mid = 0.5 * (t0 + t1)
    left = _lobatto(f, t0, mid, f0, fm)
    right = _lobatto(f, mid, t1, fm, f1)
    halves = left[0] + right[0]
    d = whole - halves
    err = max(abs(d.real), abs(d.imag))
    # The relative floor stops refinement chasing the kernel's own quadrature noise.
    if err <= max(tol, rtol * abs(halves)) or depth >= max_depth:
        return halves
    return (_interval_integral(f, t0, mid, f0, fm, tol / 2, left, depth + 1, rtol, max_depth)
            + _interval_integral(f, mid, t1, fm, f1, tol / 2, right, depth + 1, rtol,
                                 max_depth))


def big_gamma_trace(groups: DimensionlessGroup, mod: ModulationSpec, t_max: float,
                    n_samples: int, *, tol: float = 1e-9, **kernel_kw) -> ComplexDampingTrace:
    """Sample gamma on a uniform grid and integrate it cumulatively.

    Each grid interval is integrated with an adaptive Gauss-Lobatto rule;
    ``tol`` bounds the absolute error of Gamma(t_max) (dimensionless).
    """
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    times = t_max * np.arange(n_samples) / (n_samples - 1)

    def g(t):
        try:
            return gamma_of_t(groups, mod, t, **kernel_kw)
        except QuadratureError as exc:
            raise QuadratureError(f"kernel quadrature failed at t={t!r}: {exc}",
                                  error=exc.error, panels=exc.panels, worst=t) from exc

    gam = np.array([g(t) for t in times], dtype=complex)
    pieces = np.zeros(n_samples, dtype=complex)
    for i in range(n_samples - 1):
        share = tol * (times[i + 1] - times[i]) / t_max
        pieces[i + 1] = _interval_integral(g, times[i], times[i + 1],
                                           gam[i], gam[i + 1], share)
    return ComplexDampingTrace(times, gam, np.cumsum(pieces))


def stationary_reference(res: ReservoirSpec, t):
    """Markovian damping exponent of an unmodulated mode, gamma0 t / 2."""
    return 0.5 * res.gamma0 * np.asarray(t, dtype=float)


def stationary_trace(res: ReservoirSpec, t_max: float, n_samples: int) -> ComplexDampingTrace:
    times = t_max * np.arange(n_samples) / (n_samples - 1)
    gam = np.full(n_samples, 0.5 * res.gamma0, dtype=complex)
    return ComplexDampingTrace(times, gam, stationary_reference(res, times).astype(complex))


def stationary_born_gamma(res: ReservoirSpec, t):
    """Second-order rate of an unmodulated mode including the transient.

    The squared-Lorentzian bath correlation (gamma0 xi/4)(1 + xi s)e^{-xi s}
    integrates to (gamma0/4)[2 - (2 + xi t) e^{-xi t}].
    """
    t = np.asarray(t, dtype=float)
    x = res.xi * t
    return 0.25 * res.gamma0 * (2 - (2 + x) * np.exp(-x))


def stationary_born_big_gamma(res: ReservoirSpec, t):
    t = np.asarray(t, dtype=float)
    x = res.xi * t
    return 0.5 * res.gamma0 * t - 0.25 * res.gamma0 / res.xi * (3 - (3 + x) * np.exp(-x))


def damping_trace(mod: ModulationSpec, res: ReservoirSpec, t_max: float,
                  n_samples: int, **kw) -> ComplexDampingTrace:
    """Modulated trace, or the stationary reference when chi == 0."""
    if mod.stationary:
        return stationary_trace(res, t_max, n_samples)
    return big_gamma_trace(derive_groups(mod, res), mod, t_max, n_samples, **kw)


def samples_per_period(mod: ModulationSpec, t_max: float, n_samples: int,
                       per_period: int = 50) -> int:
    """Raise ``n_samples`` so the grid spacing is at most period/per_period."""
    if mod.stationary:
        return n_samples
    need = int(math.ceil(t_max / mod.period * per_period)) + 1
    return max(n_samples, need)
