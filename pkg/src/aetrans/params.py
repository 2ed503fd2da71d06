"""Material parameters and the dimensionless groups of the coupled system."""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path


class ParameterError(ValueError):
    """Raised when material constants violate positivity or strong convexity."""


@dataclass(frozen=True)
class PhysicalMedium:
    """Raw constants: fluid density/bulk modulus, solid density/Lamé pair."""

    rho_b: float
    rho_e: float
    kappa: float
    lambda_t: float
    mu_t: float
    l_omega: float = 1.0
    dim: int = 2

    def __post_init__(self):
        for name in ("rho_b", "rho_e", "kappa", "l_omega"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")
        if self.dim not in (2, 3):
            raise ParameterError("dim must be 2 or 3")
        if not self.mu_t > 0:
            raise ParameterError("shear modulus must be positive")
        if not self.dim * self.lambda_t + 2 * self.mu_t > 0:
            raise ParameterError(f"strong convexity fails: {self.dim}*lambda + 2*mu <= 0")

    @classmethod
    def from_json(cls, path: str | Path) -> "PhysicalMedium":
        return cls(**json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class NondimParams:
    """delta = rho_b/rho_e, tau = c_b/c_p, and the normalized Lamé pair.

    ``lam + 2*mu == 1`` is enforced by construction in :func:`nondimensionalize`;
    direct construction checks it to round-off.
    """

    delta: float
    tau: float
    lam: float
    mu: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ParameterError("delta must be positive")
        if not self.tau > 0:
            raise ParameterError("tau must be positive")
        if not self.mu > 0:
            raise ParameterError("mu must be positive")
        if abs(self.lam + 2 * self.mu - 1) > 1e-12:
            raise ParameterError("normalized Lamé constants must satisfy lam + 2 mu = 1")

    @classmethod
    def from_tau_mu(cls, tau: float, mu: float, delta: float) -> "NondimParams":
        return cls(delta=delta, tau=tau, lam=1.0 - 2.0 * mu, mu=mu)

    @property
    def in_localization_regime(self) -> bool:
        return 0 < self.tau < 1

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Wavenumbers:
    k: float
    k_p: float
    k_s: float


def nondimensionalize(m: PhysicalMedium) -> NondimParams:
    c_b = math.sqrt(m.kappa / m.rho_b)
    c_p = math.sqrt((m.lambda_t + 2 * m.mu_t) / m.rho_e)
    denom = m.lambda_t + 2 * m.mu_t
    mu = m.mu_t / denom
    p = NondimParams(delta=m.rho_b / m.rho_e, tau=c_b / c_p, lam=1.0 - 2.0 * mu, mu=mu)
    if not p.in_localization_regime:
        warnings.warn(f"tau = {p.tau:.6g} is outside (0, 1); radial solvers will refuse it", stacklevel=2)
    return p


def wavenumbers(k: float, p: NondimParams) -> Wavenumbers:
    """Compressional ``k tau`` and shear ``k tau / sqrt(mu)`` wavenumbers."""
    if not k > 0:
        raise ValueError("wavenumber k must be positive")
    k_p = k * p.tau
    return Wavenumbers(k=k, k_p=k_p, k_s=k_p / math.sqrt(p.mu))
