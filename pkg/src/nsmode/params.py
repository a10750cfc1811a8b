"""Physical and dimensionless parameter sets for a frequency-modulated mode.

All frequencies are angular (rad/s). The modulated mode follows

    omega(t) = omega0 + sign * chi * sin(zeta * t)

with ``sign = -1`` the canonical choice used everywhere downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

WEAK_MODULATION_RATIO = 0.1


class StationaryModeError(ValueError):
    """Raised when a modulated-mode path is asked to handle chi == 0."""


@dataclass(frozen=True)
class ModulationSpec:
    omega0: float
    chi: float = 0.0
    zeta: float = 0.0
    sign: int = -1

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError(f"omega0 must be positive, got {self.omega0!r}")
        if not self.chi >= 0:
            raise ValueError(f"chi must be non-negative, got {self.chi!r}")
        if self.chi > 0 and not self.zeta > 0:
            raise ValueError("zeta must be positive when chi > 0")
        if self.zeta < 0:
            raise ValueError(f"zeta must be non-negative, got {self.zeta!r}")
        if self.sign not in (-1, 1):
            raise ValueError(f"sign must be -1 or +1, got {self.sign!r}")

    @property
    def stationary(self) -> bool:
        return self.chi == 0

    @property
    def weak_modulation_ok(self) -> bool:
        return self.chi / self.omega0 < WEAK_MODULATION_RATIO

    @property
    def period(self) -> float:
        return 2 * math.pi / self.zeta

    def flipped(self) -> "ModulationSpec":
        """Same modulation with the opposite sign of the sine term."""
        return ModulationSpec(self.omega0, self.chi, self.zeta, -self.sign)


@dataclass(frozen=True)
class ReservoirSpec:
    """Zero-temperature-ready bath description.

    ``gamma0 = sigma0 * lambda0**2`` is always derived, never stored.
    """

    lambda0: float
    xi: float
    sigma0: float
    n_thermal: float = 0.0

    def __post_init__(self):
        if not self.lambda0 >= 0:
            raise ValueError(f"lambda0 must be non-negative, got {self.lambda0!r}")
        if not self.xi > 0:
            raise ValueError(f"xi must be positive, got {self.xi!r}")
        if not self.sigma0 > 0:
            raise ValueError(f"sigma0 must be positive, got {self.sigma0!r}")
        if not self.n_thermal >= 0:
            raise ValueError(f"n_thermal must be non-negative, got {self.n_thermal!r}")

    @property
    def gamma0(self) -> float:
        return self.sigma0 * self.lambda0**2

    @classmethod
    def from_rate(cls, gamma0: float, xi: float, lambda0: float = 1.0,
                  n_thermal: float = 0.0) -> "ReservoirSpec":
        """Pick ``sigma0`` so the derived stationary rate equals ``gamma0``."""
        if not lambda0 > 0:
            raise ValueError("lambda0 must be positive to realise a finite gamma0")
        return cls(lambda0=lambda0, xi=xi, sigma0=gamma0 / lambda0**2,
                   n_thermal=n_thermal)


@dataclass(frozen=True)
class DimensionlessGroup:
    varkappa: float  # gamma0 / zeta
    kappa: float     # xi / chi
    epsilon: float   # chi / zeta


def derive_groups(mod: ModulationSpec, res: ReservoirSpec) -> DimensionlessGroup:
    if mod.chi == 0 or mod.zeta == 0:
        raise StationaryModeError(
            "stationary mode (chi == 0 or zeta == 0): use "
            "kernel.stationary_reference instead of the modulated kernel")
    return DimensionlessGroup(
        varkappa=res.gamma0 / mod.zeta,
        kappa=res.xi / mod.chi,
        epsilon=mod.chi / mod.zeta,
    )


def modulation_from_groups(varkappa: float, kappa: float, res: ReservoirSpec,
                           omega0: float, sign: int = -1) -> ModulationSpec:
    """Invert :func:`derive_groups` for a given reservoir.

    zeta = gamma0 / varkappa and chi = xi / kappa.
    """
    if varkappa <= 0 or kappa <= 0:
        raise ValueError("varkappa and kappa must be positive")
    return ModulationSpec(omega0=omega0, chi=res.xi / kappa,
                          zeta=res.gamma0 / varkappa, sign=sign)


@dataclass(frozen=True)
class Diagnostic:
    level: str  # "note" or "warning"
    code: str
    message: str
    ratio: float | None = field(default=None)


def validate_regime(mod: ModulationSpec, res: ReservoirSpec) -> list[Diagnostic]:
    """Collect the validity conditions the perturbative treatment relies on."""
    out: list[Diagnostic] = []
    r = mod.chi / mod.omega0
    if r >= WEAK_MODULATION_RATIO:
        out.append(Diagnostic(
            "warning", "strong-modulation",
            f"chi/omega0 = {r:.3g} >= {WEAK_MODULATION_RATIO}: extending the "
            "frequency integral's upper limit to infinity is not justified", r))
    if mod.zeta > 0:
        r = mod.zeta / mod.omega0
        if r >= WEAK_MODULATION_RATIO:
            out.append(Diagnostic(
                "warning", "non-adiabatic",
                f"zeta/omega0 = {r:.3g} >= {WEAK_MODULATION_RATIO}: "
                "outside the adiabatic regime", r))
    if res.lambda0 == 0:
        out.append(Diagnostic("note", "decoupled",
                              "lambda0 = 0: system is decoupled from the bath", 0.0))
    else:
        r = res.lambda0 / res.xi
        if r >= 1.0:
            out.append(Diagnostic(
                "warning", "strong-coupling",
                f"lambda0/xi = {r:.3g}: weak system-bath coupling is questionable", r))
    if res.n_thermal > 0:
        out.append(Diagnostic(
            "note", "finite-temperature",
            "n_thermal > 0 is ignored: only the zero-temperature dynamics are modelled",
            res.n_thermal))
    if mod.stationary:
        out.append(Diagnostic("note", "stationary",
                              "chi = 0: stationary mode, damping is gamma0*t/2"))
    return out
