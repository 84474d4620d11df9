"""TWDP channel parameters in physical and normalized coordinates.

Physical form: the two specular amplitudes ``v1 >= v2 >= 0``, the diffuse
half-power ``sigma2`` and the phase ``phi1`` of the stronger ray.
Normalized form: ``K = (v1**2 + v2**2) / (2 sigma2)``, ``Gamma = v2 / v1``,
``Omega = v1**2 + v2**2 + 2 sigma2``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import ParameterDomainError


def wrap_phase(x):
    """Wrap an angle (scalar or array) into (-pi, pi]."""
    import numpy as np

    y = np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2.0 * np.pi)
    if np.ndim(y) == 0:
        return float(y)
    return y


@dataclass(frozen=True)
class ChannelParams:
    v1: float
    v2: float
    sigma2: float
    phi1: float = 0.0
    # permits sigma2 = 0 for simulation of purely specular channels
    allow_zero_diffuse: bool = False

    def __post_init__(self):
        for name in ("v1", "v2", "sigma2", "phi1"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise ParameterDomainError(f"{name} must be finite, got {val}")
            object.__setattr__(self, name, val)
        if self.v1 < 0 or self.v2 < 0:
            raise ParameterDomainError("specular amplitudes must be nonnegative")
        if self.v2 > self.v1:
            raise ParameterDomainError(f"v2={self.v2} exceeds v1={self.v1}")
        if self.sigma2 < 0:
            raise ParameterDomainError("sigma2 must be nonnegative")
        if self.sigma2 == 0 and self.v1 > 0 and not self.allow_zero_diffuse:
            # the phase density divides by 2 sigma^2 everywhere
            raise ParameterDomainError("sigma2 = 0 with a specular component is not supported")
        if self.sigma2 == 0 and self.v1 == 0:
            raise ParameterDomainError("all components vanish (Omega = 0)")
        object.__setattr__(self, "phi1", wrap_phase(self.phi1))

    def _ratio(self, num: float) -> float:
        if self.sigma2 == 0:
            return math.inf if num > 0 else 0.0
        return num / (2.0 * self.sigma2)

    @property
    def k(self) -> float:
        return self._ratio(self.v1**2 + self.v2**2)

    @property
    def gamma(self) -> float:
        return self.v2 / self.v1 if self.v1 > 0 else 0.0

    @property
    def omega(self) -> float:
        return self.v1**2 + self.v2**2 + 2.0 * self.sigma2

    @property
    def nu(self) -> float:
        """Poisson mean ``v2**2 / (2 sigma2)`` of the mixture index."""
        return self._ratio(self.v2**2)

    @property
    def a(self) -> float:
        """Stronger-ray SNR-like ratio ``v1**2 / (2 sigma2)``."""
        return self._ratio(self.v1**2)

    def with_phi1(self, phi1: float) -> "ChannelParams":
        return ChannelParams(self.v1, self.v2, self.sigma2, phi1, self.allow_zero_diffuse)

    def to_dict(self) -> dict:
        d = {"v1": self.v1, "v2": self.v2, "sigma2": self.sigma2, "phi1": self.phi1}
        if self.allow_zero_diffuse:
            d["allow_zero_diffuse"] = True
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ChannelParams":
        """Build from either ``{v1, v2, sigma2, phi1}`` or ``{K, Gamma, Omega, Phi1}``."""
        if "v1" in d:
            return cls(d["v1"], d.get("v2", 0.0), d["sigma2"], d.get("phi1", 0.0),
                       bool(d.get("allow_zero_diffuse", False)))
        if "K" in d:
            return from_normalized(d["K"], d.get("Gamma", 0.0), d.get("Omega", 1.0), d.get("Phi1", 0.0))
        raise ParameterDomainError(f"unrecognised parameter keys: {sorted(d)}")

    @classmethod
    def from_json(cls, text: str) -> "ChannelParams":
        return cls.from_dict(json.loads(text))


def from_normalized(k: float, gamma: float, omega: float = 1.0, phi1: float = 0.0) -> ChannelParams:
    """Convert ``(K, Gamma, Omega)`` to physical amplitudes."""
    k, gamma, omega = float(k), float(gamma), float(omega)
    if not (k >= 0 and math.isfinite(k)):
        raise ParameterDomainError(f"K must be >= 0, got {k}")
    if not 0.0 <= gamma <= 1.0:
        raise ParameterDomainError(f"Gamma must lie in [0, 1], got {gamma}")
    if not (omega > 0 and math.isfinite(omega)):
        raise ParameterDomainError(f"Omega must be > 0, got {omega}")
    two_sigma2 = omega / (1.0 + k)
    v1_sq = two_sigma2 * k / (1.0 + gamma**2)
    v1 = math.sqrt(v1_sq)
    return ChannelParams(v1=v1, v2=gamma * v1, sigma2=two_sigma2 / 2.0, phi1=phi1)


def to_normalized(p: ChannelParams) -> tuple[float, float, float]:
    return p.k, p.gamma, p.omega
