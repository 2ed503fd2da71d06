"""Transmission eigenvalues on the unit disk and ball from the explicit
characteristic functions.

For order ``m`` the searched bracket is ``(j_{nu,1}, j_{nu,2})`` with
``nu = m`` (2D) or ``m + 1/2`` (3D). Roots are located by bisection with
secant (Illinois) acceleration after the endpoint signs are certified.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special as sp

from .params import NondimParams
from .specfun import bessel_zero, phi

log = logging.getLogger(__name__)


class BracketFailure(ArithmeticError):
    """f has the same sign at both bracket endpoints."""


class PreconditionFailure(ValueError):
    """tau is too large for the bracket argument at this order."""


class InsufficientData(ValueError):
    pass


@dataclass(frozen=True)
class ModeIndex:
    dim: int
    m: int
    s: int = 1

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("dim must be 2 or 3")
        if self.m < 1 or self.s < 1:
            raise ValueError("need m >= 1 and s >= 1")

    @property
    def nu(self) -> float:
        return float(self.m) if self.dim == 2 else self.m + 0.5


@dataclass(frozen=True)
class EigRecord:
    mode: ModeIndex
    k: float
    bracket: tuple[float, float]
    f_residual: float
    rela1_residual: float
    params: NondimParams
    crossings: int = 1
    f_scale: float = 1.0
    extra: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "dim": self.mode.dim,
            "m": self.mode.m,
            "s": self.mode.s,
            "k": self.k,
            "bracket": list(self.bracket),
            "f_residual": self.f_residual,
            "rela1_residual": self.rela1_residual,
            "crossings": self.crossings,
            "params": self.params.to_dict(),
        }


def _check_k(k):
    if np.any(np.asarray(k) <= 0):
        raise ValueError("k must be positive")


def char_fn_2d(m: int, k, p: NondimParams):
    """Disk characteristic function.

    ``[-k^2 tau^2 + 2 mu (m^2-1)] J_{m-1}(k) J_m(tau k)
    + [k tau^2 m - 2 mu (m^2-1) m / k + delta tau^2 k] J_m(k) J_m(tau k)``
    """
    _check_k(k)
    k = np.asarray(k, dtype=float)
    t, mu, d = p.tau, p.mu, p.delta
    c = 2.0 * mu * (m * m - 1)
    jt = sp.jv(m, t * k)
    out = (-(k * k) * t * t + c) * sp.jv(m - 1, k) * jt + (k * t * t * m - c * m / k + d * t * t * k) * sp.jv(m, k) * jt
    return float(out) if out.ndim == 0 else out


def char_fn_3d(m: int, k, p: NondimParams):
    """Ball characteristic function, in terms of J_{m+1/2} and J_{m+3/2}."""
    _check_k(k)
    k = np.asarray(k, dtype=float)
    t, mu, d = p.tau, p.mu, p.delta
    st = math.sqrt(t)
    t32 = t * st
    a = 4 * mu / (k * st) + t32 - 2 * mu * m * (m + 1) / (st * k)
    b = -4 * mu * m / (k * k * st) - m * t32 - 2 * mu * m * m * (m + 1) / (st * k * k) + d * t32
    jt = sp.jv(m + 0.5, t * k)
    out = a * sp.jv(m + 1.5, k) * jt + b * sp.jv(m + 0.5, k) * jt
    return float(out) if out.ndim == 0 else out


def char_fn(mode: ModeIndex, k, p: NondimParams):
    return (char_fn_2d if mode.dim == 2 else char_fn_3d)(mode.m, k, p)


def decay_ratio(tau: float) -> float:
    """Geometric rate ``tau e^{sqrt(1-tau^2)} / (1 + sqrt(1-tau^2))`` (< 1 for tau < 1)."""
    return phi(tau)


def _rela1(dim: int, m: int, k_p: float) -> float:
    if dim == 2:
        return abs(sp.jv(m, k_p) - k_p * sp.jvp(m, k_p))
    return abs(sp.spherical_jn(m, k_p) - k_p * sp.spherical_jn(m, k_p, derivative=True))


def rela1_residual(rec: EigRecord) -> tuple[float, float]:
    """``|Z_m(k_p) - k_p Z_m'(k_p)|`` (Z = J in 2D, j in 3D) and the decay rate q."""
    return _rela1(rec.mode.dim, rec.mode.m, rec.k * rec.params.tau), decay_ratio(rec.params.tau)


def bracket_for(mode: ModeIndex) -> tuple[float, float]:
    nu = mode.nu
    return bessel_zero(nu, "j", 1), bessel_zero(nu, "j", 2)


def _root(f, lo: float, hi: float, flo: float, fhi: float, rtol: float) -> float:
    """Illinois false position, bisection-guarded, to ``hi - lo <= rtol * x``."""
    side = 0
    for _ in range(400):
        if hi - lo <= rtol * 0.5 * (lo + hi):
            break
        x = (lo * fhi - hi * flo) / (fhi - flo)
        width = hi - lo
        if not (lo < x < hi):
            x = 0.5 * (lo + hi)
        fx = f(x)
        if fx == 0.0:
            return x
        if fx * flo < 0:
            hi, fhi = x, fx
            if side == -1:
                flo *= 0.5
            side = -1
        else:
            lo, flo = x, fx
            if side == 1:
                fhi *= 0.5
            side = 1
        if hi - lo > 0.5 * width:
            # slow convergence, force a bisection step
            mid = 0.5 * (lo + hi)
            fm = f(mid)
            if fm == 0.0:
                return mid
            if fm * flo < 0:
                hi, fhi = mid, fm
            else:
                lo, flo = mid, fm
            side = 0
    return 0.5 * (lo + hi)


def find_eigenvalue(mode: ModeIndex, p: NondimParams, *, samples: int = 256, rtol: float = 1e-11) -> EigRecord:
    """Root of the characteristic function inside ``(j_{nu,1}, j_{nu,2})``.

    The endpoint sign change is checked first; the bracket interior is then
    sampled on ``samples`` points and the smallest root is refined. The number
    of sampled sign changes is stored in ``crossings``.
    """
    if not p.in_localization_regime:
        raise PreconditionFailure(f"tau = {p.tau} is outside (0, 1)")
    lo, hi = bracket_for(mode)
    if not p.tau < lo / hi:
        raise PreconditionFailure(f"tau = {p.tau} >= j_(nu,1)/j_(nu,2) = {lo / hi:.6f} at m = {mode.m}")

    def f(x):
        return char_fn(mode, x, p)

    flo, fhi = f(lo), f(hi)
    # endpoint values are zero only up to round-off of the zero itself; nudge inward
    eps = 1e-9 * lo
    flo_n, fhi_n = f(lo + eps), f(hi - eps)
    if not flo_n * fhi_n < 0:
        raise BracketFailure(f"m={mode.m} dim={mode.dim}: f(lo)={flo_n:.3e}, f(hi)={fhi_n:.3e}")

    xs = np.linspace(lo + eps, hi - eps, samples + 1)
    fs = f(xs)
    sgn = np.sign(fs)
    changes = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
    crossings = int(len(changes))
    if crossings > 1:
        log.info("m=%d dim=%d: %d sign changes in bracket, taking the smallest", mode.m, mode.dim, crossings)
    i = int(changes[0])
    k = _root(f, xs[i], xs[i + 1], fs[i], fs[i + 1], rtol)
    scale = float(np.max(np.abs(fs)))
    fk = abs(f(k))
    return EigRecord(
        mode=mode,
        k=k,
        bracket=(lo, hi),
        f_residual=fk,
        rela1_residual=_rela1(mode.dim, mode.m, k * p.tau),
        params=p,
        crossings=crossings,
        f_scale=scale,
        extra={"f_lo": flo, "f_hi": fhi},
    )


def sweep(dim: int, ms, p: NondimParams) -> tuple[list[EigRecord], dict[int, str]]:
    """Eigenvalues for each order in ``ms``; failures are collected, not raised."""
    recs, failures = [], {}
    for m in ms:
        try:
            recs.append(find_eigenvalue(ModeIndex(dim, int(m)), p))
        except (BracketFailure, PreconditionFailure) as exc:
            failures[int(m)] = f"{type(exc).__name__}: {exc}"
    return recs, failures


def asymptotic_fit(records: list[EigRecord]) -> tuple[float, float]:
    """Fit ``k/nu - 1 = C nu^a``; returns ``(a, C)``."""
    if len(records) < 5:
        raise InsufficientData("need at least 5 records")
    ms = [r.mode.m for r in records]
    if any(b <= a for a, b in zip(ms, ms[1:])):
        raise InsufficientData("orders must be strictly increasing")
    nu = np.array([r.mode.nu for r in records])
    k = np.array([r.k for r in records])
    y = k / nu - 1.0
    if np.any(y <= 0):
        raise InsufficientData("k/nu - 1 must be positive for a log fit")
    slope, intercept = np.polyfit(np.log(nu), np.log(y), 1)
    return float(slope), float(math.exp(intercept))
