"""Closed-form state of a damped superposition of coherent states.

Each coherent component follows alpha_l(t) = alpha_0l exp(-i Omega(t) - Gamma(t))
and the dyad |alpha_l><alpha_l'| acquires the weight

    C_ll'(t) = exp{[-(|a_l|^2 + |a_l'|^2)/2 + a_l'^* a_l] (1 - e^{-2 Re Gamma})} c_l'^* c_l,

so only Re Gamma enters the coherences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .kernel import ComplexDampingTrace, big_omega
from .params import ModulationSpec


class CutoffError(ValueError):
    """The Fock-basis truncation is too small for the requested state."""


def overlap(alpha: complex, beta: complex) -> complex:
    """<alpha|beta> for coherent states."""
    return np.exp(-0.5 * abs(alpha) ** 2 - 0.5 * abs(beta) ** 2 + np.conj(alpha) * beta)


@dataclass(frozen=True)
class CatStateSpec:
    amplitudes: tuple
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", tuple(complex(a) for a in self.amplitudes))
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if len(self.amplitudes) != len(self.coeffs) or not self.amplitudes:
            raise ValueError("amplitudes and coeffs must be non-empty and equal length")

    @classmethod
    def even_cat(cls, alpha0: complex) -> "CatStateSpec":
        return cls((alpha0, -alpha0), (1.0, 1.0))

    @property
    def normalization(self) -> float:
        return normalization(self)

    @property
    def alpha_max(self) -> float:
        return max(abs(a) for a in self.amplitudes)


def normalization(spec: CatStateSpec) -> float:
    """N such that N * sum_l c_l |alpha_l> has unit norm."""
    a = np.array(spec.amplitudes)
    c = np.array(spec.coeffs)
    gram = overlap(a[:, None], a[None, :])   # <a_i|a_j>
    norm2 = float(np.real(np.conj(c) @ gram @ c))
    if not norm2 > 1e-300:
        raise ValueError("null state: the superposition has zero norm")
    return 1.0 / math.sqrt(norm2)


def _check_time(trace: ComplexDampingTrace, t):
    return trace.big_gamma_at(t)


def alpha_traj(alpha0: complex, mod: ModulationSpec, trace: ComplexDampingTrace, t):
    """alpha0 exp(-i Omega(t) - Gamma(t)); Im Gamma adds to the rotation."""
    big_gamma = _check_time(trace, t)
    return alpha0 * np.exp(-1j * big_omega(mod, t) - big_gamma)


def decay_weight(re_big_gamma):
    """1 - exp(-2 Re Gamma), computed without cancellation near zero."""
    return -np.expm1(-2.0 * np.asarray(re_big_gamma, dtype=float))


def coherence_coeff(spec: CatStateSpec, l: int, lp: int, trace: ComplexDampingTrace, t):
    n = len(spec.amplitudes)
    if not (0 <= l < n and 0 <= lp < n):
        raise IndexError(f"component indices ({l}, {lp}) out of range for {n} components")
    a, ap = spec.amplitudes[l], spec.amplitudes[lp]
    bracket = -0.5 * (abs(a) ** 2 + abs(ap) ** 2) + np.conj(ap) * a
    w = decay_weight(np.real(_check_time(trace, t)))
    return np.exp(bracket * w) * np.conj(spec.coeffs[lp]) * spec.coeffs[l]


def c12_from_gamma(alpha0: complex, re_big_gamma):
    """Even-cat coherence factor as a function of Re Gamma."""
    return np.exp(-2 * abs(alpha0) ** 2 * decay_weight(re_big_gamma))


def c12(alpha0: complex, trace: ComplexDampingTrace, t):
    return c12_from_gamma(alpha0, np.real(_check_time(trace, t)))


def min_cutoff(alpha_max: float) -> int:
    return int(math.ceil(alpha_max**2 + 8 * alpha_max + 10))


def coherent_state(alpha: complex, n_cut: int) -> np.ndarray:
    """Fock amplitudes <n|alpha>, n = 0..n_cut, assembled in log space."""
    n = np.arange(n_cut + 1)
    if alpha == 0:
        out = np.zeros(n_cut + 1, dtype=complex)
        out[0] = 1.0
        return out
    r, phi = abs(alpha), np.angle(alpha)
    logmag = -0.5 * r * r + n * math.log(r) - 0.5 * gammaln(n + 1)
    return np.exp(logmag + 1j * n * phi)


def density_matrix(spec: CatStateSpec, trace: ComplexDampingTrace, t: float, n_cut: int,
                   mod: ModulationSpec | None = None) -> np.ndarray:
    """rho(t) = N^2 sum C_ll'(t) |alpha_l(t)><alpha_l'(t)| in the number basis.

    Without ``mod`` the amplitudes are alpha_0l e^{-Gamma(t)}, i.e. the frame
    co-rotating with Omega(t) in which the zero-temperature master equation is
    written; with ``mod`` the e^{-i Omega(t)} rotation is included.
    """
    need = min_cutoff(spec.alpha_max)
    if n_cut < need:
        raise CutoffError(f"n_cut={n_cut} below the required {need} for |alpha|={spec.alpha_max:g}")
    big_gamma = complex(_check_time(trace, t))
    rot = np.exp(-big_gamma)
    if mod is not None:
        rot *= np.exp(-1j * float(big_omega(mod, t)))
    vecs = np.array([coherent_state(a * rot, n_cut) for a in spec.amplitudes])
    k = len(spec.amplitudes)
    C = np.array([[coherence_coeff(spec, i, j, trace, t) for j in range(k)] for i in range(k)])
    rho = spec.normalization**2 * (vecs.T @ C @ vecs.conj())
    deficit = abs(1.0 - np.trace(rho).real)
    if deficit > 1e-4:
        raise CutoffError(f"trace deficit {deficit:.2e} at n_cut={n_cut}")
    return rho
