"""Zero-temperature master equation with a complex, time-dependent rate.

    drho/dt = 2 Re[gamma(t)] a rho a^dag - gamma^*(t) rho a^dag a - gamma(t) a^dag a rho

integrated directly in a truncated number basis. In components,

    drho_mn/dt = 2 Re[gamma] sqrt((m+1)(n+1)) rho_{m+1,n+1} - (gamma m + gamma^* n) rho_mn,

which preserves the trace exactly in the truncated space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .bath import IntegrationError
from .decoherence import CatStateSpec, CutoffError, coherent_state
from .kernel import ComplexDampingTrace

DEFAULT_N_CUT = 24


@dataclass(frozen=True)
class TruncatedState:
    rho: np.ndarray
    n_cut: int
    t: float = 0.0

    @classmethod
    def from_pure(cls, psi, t: float = 0.0) -> "TruncatedState":
        psi = np.asarray(psi, dtype=complex)
        return cls(np.outer(psi, psi.conj()), psi.size - 1, t)

    @classmethod
    def from_cat(cls, spec: CatStateSpec, n_cut: int = DEFAULT_N_CUT) -> "TruncatedState":
        psi = sum(c * coherent_state(a, n_cut) for a, c in zip(spec.amplitudes, spec.coeffs))
        return cls.from_pure(spec.normalization * psi)

    @property
    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    def expect_a(self) -> complex:
        n = np.arange(1, self.n_cut + 1)
        return complex(np.sum(np.sqrt(n) * np.diag(self.rho, -1)))

    def expect_a2(self) -> complex:
        n = np.arange(2, self.n_cut + 1)
        return complex(np.sum(np.sqrt(n * (n - 1)) * np.diag(self.rho, -2)))


def evolve_master(initial: TruncatedState, gamma_fn: Callable[[float], complex],
                  t_max: float, samples, *, rtol: float = 1e-8, atol: float = 1e-12,
                  trace_tol: float = 1e-6, top_tol: float = 1e-8) -> list[TruncatedState]:
    """Integrate the master equation from ``initial.t`` to ``t_max``.

    ``samples`` is a count (uniform grid) or an explicit array of times.
    """
    rho0 = initial.rho
    if not np.allclose(rho0, rho0.conj().T, atol=1e-10):
        raise ValueError("initial state is not Hermitian")
    if abs(initial.trace - 1) > 1e-9:
        raise ValueError(f"initial trace {initial.trace!r} is not 1")
    top = float(rho0[-1, -1].real)
    if top > top_tol:
        raise CutoffError(f"population {top:.2e} at n_cut={initial.n_cut} exceeds {top_tol:g}")

    dim = initial.n_cut + 1
    n = np.arange(dim, dtype=float)
    feed = np.sqrt(np.outer(n[1:], n[1:]))    # sqrt((m+1)(n+1)) for m, n < n_cut

    def rhs(t, y):
        rho = y.reshape(dim, dim)
        g = complex(gamma_fn(t))
        out = -(g * n[:, None] + np.conj(g) * n[None, :]) * rho
        out[:-1, :-1] += 2 * g.real * feed * rho[1:, 1:]
        return out.ravel()

    times = (np.linspace(initial.t, t_max, int(samples)) if np.ndim(samples) == 0
             else np.asarray(samples, dtype=float))
    sol = solve_ivp(rhs, (initial.t, t_max), rho0.ravel(), method="DOP853",
                    t_eval=times, rtol=rtol, atol=atol)
    if sol.status != 0:
        raise IntegrationError(f"master equation stopped at t={sol.t[-1]!r}: {sol.message}")
    out = []
    for k, t in enumerate(sol.t):
        rho = sol.y[:, k].reshape(dim, dim)
        drift = abs(np.trace(rho).real - 1)
        if drift > trace_tol:
            raise IntegrationError(f"trace drift {drift:.2e} at t={t!r}")
        out.append(TruncatedState(rho, initial.n_cut, float(t)))
    return out


def gamma_interpolant(trace: ComplexDampingTrace) -> Callable[[float], complex]:
    """Cubic interpolant of a sampled gamma(t)."""
    return lambda t: complex(trace.gamma_at(t))


@dataclass(frozen=True)
class CoherenceSeries:
    times: np.ndarray
    coherence: np.ndarray      # NaN where the fit is ill-conditioned
    alpha: np.ndarray          # fitted co-rotating amplitude alpha(t)
    condition: np.ndarray
    note: str = ""

    @property
    def valid(self) -> np.ndarray:
        return np.isfinite(self.coherence)


def coherence_extract(states: list[TruncatedState], spec: CatStateSpec, *,
                      max_condition: float = 1e8) -> CoherenceSeries:
    """Cross-term weight of |alpha(t)><-alpha(t)| in each sampled rho.

    alpha(t)^2 = Tr(a^2 rho) is read off the state itself, then rho is
    projected (Hilbert-Schmidt least squares) onto the four dyads built from
    |+alpha(t)> and |-alpha(t)>. The returned coherence is
    |coefficient| / (N^2 |c_1 c_2|), directly comparable with C_12(t).
    """
    if len(spec.amplitudes) != 2 or not np.isclose(spec.amplitudes[0], -spec.amplitudes[1]):
        raise ValueError("coherence_extract expects a two-component cat |a> + c|-a>")
    a0 = spec.amplitudes[0]
    norm2 = spec.normalization**2
    scale = abs(spec.coeffs[0] * spec.coeffs[1])
    prev = a0
    times, coh, alphas, conds = [], [], [], []
    notes = []
    for st in states:
        alpha = np.sqrt(st.expect_a2() / st.trace)
        if abs(alpha - prev) > abs(alpha + prev):
            alpha = -alpha
        prev = alpha if alpha != 0 else prev
        plus = coherent_state(alpha, st.n_cut)
        minus = coherent_state(-alpha, st.n_cut)
        kets = [plus, plus, minus, minus]
        bras = [plus, minus, plus, minus]
        # HS Gram matrix of dyads |u><v|: <u_i|u_j><v_j|v_i>.
        gram = np.array([[np.vdot(kets[i], kets[j]) * np.vdot(bras[j], bras[i])
                          for j in range(4)] for i in range(4)])
        rhs = np.array([np.vdot(kets[i], st.rho @ bras[i]) for i in range(4)])
        cond = float(np.linalg.cond(gram))
        times.append(st.t)
        alphas.append(alpha)
        conds.append(cond)
        if cond > max_condition:
            coh.append(np.nan)
            continue
        coeffs = np.linalg.solve(gram, rhs)
        coh.append(abs(coeffs[1]) / (norm2 * scale))
    coh = np.array(coh)
    if np.isnan(coh).any():
        first = np.array(times)[np.isnan(coh)][0]
        notes.append(f"dyad fit ill-conditioned from t={first!r}; comparison window reduced")
    return CoherenceSeries(np.array(times), coh, np.array(alphas), np.array(conds),
                           "; ".join(notes))
