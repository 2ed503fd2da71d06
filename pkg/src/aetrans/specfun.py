"""Real-argument special functions: Bessel J, spherical Bessel j, associated
Legendre functions, zeros of J and J', and the uniform large-order form of J
below the turning point.

Function values come from :mod:`scipy.special`; zero location, interlacing
checks and the large-order asymptotics are implemented here.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special as sp

__all__ = [
    "ZeroKind",
    "ZeroTable",
    "bessel_j",
    "bessel_zero",
    "zero_table",
    "airy_zero_bracket",
    "zero_bounds",
    "spherical_j",
    "assoc_legendre",
    "uniform_asym_j",
    "jm_bound",
    "jpm_bound",
    "phi",
]


class ZeroKind(enum.Enum):
    J = "j"
    JPRIME = "jp"


def _check_order(nu: float) -> None:
    if not nu >= 0:
        raise ValueError(f"Bessel order must be non-negative, got {nu}")


def bessel_j(nu: float, x):
    """Return ``(J_nu(x), J_nu'(x))``.

    Works elementwise on arrays. ``x`` must be non-negative.
    """
    _check_order(nu)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("bessel_j is defined here for x >= 0 only")
    val = sp.jv(nu, x)
    # J'_nu = (J_{nu-1} - J_{nu+1}) / 2 has no cancellation issue at x = 0
    der = sp.jvp(nu, x)
    if val.ndim == 0:
        return float(val), float(der)
    return val, der


def _j_and_jp(nu: float, x: float) -> tuple[float, float, float]:
    """J, J', J'' at scalar x > 0 (J'' from Bessel's equation)."""
    j = float(sp.jv(nu, x))
    jp = float(sp.jvp(nu, x))
    jpp = -jp / x - (1.0 - nu * nu / (x * x)) * j
    return j, jp, jpp


# ---------------------------------------------------------------------------
# zeros
# ---------------------------------------------------------------------------

def airy_zero_bracket(s: int) -> tuple[float, float]:
    """Interval containing a_s, the s-th negative Airy zero.

    ``a_s = -[3*pi/8*(4s-1)]**(2/3) * (1 + U)`` with
    ``U in [0, 0.13 / (3*pi/8*(4s-1.051))]``. Returned as ``(lo, hi)`` with
    ``lo <= a_s <= hi < 0``.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    t = (3.0 * math.pi / 8.0 * (4 * s - 1)) ** (2.0 / 3.0)
    umax = 0.13 / (3.0 * math.pi / 8.0 * (4 * s - 1.051))
    return -t * (1.0 + umax), -t


def zero_bounds(nu: float, s: int) -> tuple[float, float]:
    """Two-sided bound on j_{nu,s} from the Airy-zero inequality.

    Lower bound ``nu*(1 - a/(2 nu^2)^(1/3))``, upper bound adds
    ``nu * 3 a^2/20 * (2/nu^4)^(1/3)``. The Airy zero is only known to lie in
    an interval, so the lower bound uses the smallest ``|a_s|`` and the upper
    bound the largest.
    """
    _check_order(nu)
    if nu <= 0:
        raise ValueError("the Airy-type bound needs nu > 0")
    a_lo, a_hi = airy_zero_bracket(s)  # a_lo < a_hi < 0
    c = (2.0 * nu * nu) ** (1.0 / 3.0)
    d = (2.0 / nu**4) ** (1.0 / 3.0)
    lower = nu * (1.0 - a_hi / c)
    upper = nu * (1.0 - a_lo / c + 3.0 * a_lo * a_lo / 20.0 * d)
    return lower, upper


def _mcmahon(nu: float, s: int, kind: ZeroKind) -> float:
    mu = 4.0 * nu * nu
    if kind is ZeroKind.J:
        b = (s + nu / 2.0 - 0.25) * math.pi
        return b - (mu - 1) / (8 * b) - 4 * (mu - 1) * (7 * mu - 31) / (3 * (8 * b) ** 3)
    b = (s + nu / 2.0 - 0.75) * math.pi
    return b - (mu + 3) / (8 * b) - 4 * (7 * mu * mu + 82 * mu - 9) / (3 * (8 * b) ** 3)


def _refine(f, lo: float, hi: float, x0: float, tol: float = 1e-15) -> float:
    """Safeguarded Newton on a sign-changing bracket ``[lo, hi]``.

    ``f`` returns ``(value, derivative)``.
    """
    flo, _ = f(lo)
    fhi, _ = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise ArithmeticError(f"no sign change on [{lo}, {hi}]")
    x = min(max(x0, lo), hi)
    for _ in range(200):
        fx, dfx = f(x)
        if fx == 0.0:
            return x
        if fx * flo < 0:
            hi = x
        else:
            lo, flo = x, fx
        step = fx / dfx if dfx != 0 else math.inf
        xn = x - step
        if not (lo < xn < hi):
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= tol * max(1.0, abs(x)) or hi - lo <= tol * max(1.0, abs(x)):
            return xn
        x = xn
    return x


def _fj(nu):
    def f(x):
        j, jp, _ = _j_and_jp(nu, x)
        return j, jp
    return f


def _fjp(nu):
    def f(x):
        _, jp, jpp = _j_and_jp(nu, x)
        return jp, jpp
    return f


def _j_zero_bracket(nu: float, s: int) -> tuple[float, float, float]:
    """Sign-change bracket and starting point for j_{nu,s}."""
    f = _fj(nu)
    if nu >= 1 and s <= 3:
        lo, hi = zero_bounds(nu, s)
        x0 = 0.5 * (lo + hi)
        if f(lo)[0] * f(hi)[0] < 0:
            return lo, hi, x0
    else:
        x0 = _mcmahon(nu, s, ZeroKind.J)
    # sequential scan from the previous zero; consecutive zeros are > 2.9 apart
    start = nu + 1e-9 if s == 1 else _zero_cached(nu, ZeroKind.J, s - 1) + 1e-6
    step = 0.5
    a, fa = start, f(start)[0]
    while True:
        b = a + step
        fb = f(b)[0]
        if fa * fb <= 0:
            return a, b, min(max(x0, a), b)
        a, fa = b, fb


@lru_cache(maxsize=8192)
def _zero_cached(nu: float, kind: ZeroKind, s: int) -> float:
    if kind is ZeroKind.J:
        lo, hi, x0 = _j_zero_bracket(nu, s)
        return _refine(_fj(nu), lo, hi, x0)
    if nu == 0:
        # J_0' = -J_1; x = 0 is not counted
        return _zero_cached(1.0, ZeroKind.J, s)
    # nu <= j'_{nu,1} < j_{nu,1} < j'_{nu,2} < j_{nu,2} < ...
    lo = nu if s == 1 else _zero_cached(nu, ZeroKind.J, s - 1)
    hi = _zero_cached(nu, ZeroKind.J, s)
    return _refine(_fjp(nu), lo, hi, 0.5 * (lo + hi))


def bessel_zero(nu: float, kind: ZeroKind | str, s: int) -> float:
    """The s-th positive zero of ``J_nu`` (``kind='j'``) or ``J_nu'`` (``'jp'``)."""
    _check_order(nu)
    kind = ZeroKind(kind)
    if s < 1 or int(s) != s:
        raise ValueError("zero index s must be a positive integer")
    return _zero_cached(float(nu), kind, int(s))


@dataclass(frozen=True)
class ZeroTable:
    nu: float
    kind: ZeroKind
    zeros: tuple[float, ...]


def zero_table(nu: float, kind: ZeroKind | str, count: int) -> ZeroTable:
    kind = ZeroKind(kind)
    return ZeroTable(float(nu), kind, tuple(bessel_zero(nu, kind, s) for s in range(1, count + 1)))


# ---------------------------------------------------------------------------
# spherical Bessel and Legendre
# ---------------------------------------------------------------------------

def spherical_j(m: int, x):
    """Return ``(j_m(x), j_m'(x))`` for x > 0."""
    if m < 0 or int(m) != m:
        raise ValueError("spherical Bessel order must be a non-negative integer")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("spherical_j requires x > 0")
    val = sp.spherical_jn(int(m), x)
    der = sp.spherical_jn(int(m), x, derivative=True)
    if val.ndim == 0:
        return float(val), float(der)
    return val, der


def _legendre_nocs(m: int, l: int, t):
    """P_m^l(t) without the Condon-Shortley phase, any integer l with |l| <= m.

    Negative orders follow ``P_m^{-l} = (-1)^l (m-l)!/(m+l)! P_m^l``.
    """
    if abs(l) > m:
        return np.zeros_like(np.asarray(t, dtype=float))
    if l >= 0:
        return (-1.0) ** l * sp.lpmv(l, m, t)
    la = -l
    fac = math.exp(sp.gammaln(m - la + 1) - sp.gammaln(m + la + 1))
    return (-1.0) ** la * fac * ((-1.0) ** la * sp.lpmv(la, m, t))


def assoc_legendre(m: int, l: int, t):
    """Return ``(P_m^{|l|}(t), d/dtheta P_m^{|l|}(cos theta))`` with t = cos(theta).

    No Condon-Shortley phase, so ``P_1^1 = sin(theta)``. Away from the poles
    the theta-derivative uses ``(t^2-1) P' = m t P_m - (m+|l|) P_{m-1}``;
    at the poles the ladder form
    ``1/2 [(m+|l|)(m-|l|+1) P^{|l|-1} - P^{|l|+1}]`` is used.
    """
    if m < 0 or abs(l) > m:
        raise ValueError("need m >= 0 and |l| <= m")
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1):
        raise ValueError("t must lie in [-1, 1]")
    la = abs(l)
    p = _legendre_nocs(m, la, t)
    s = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    ladder = 0.5 * ((m + la) * (m - la + 1) * _legendre_nocs(m, la - 1, t) - _legendre_nocs(m, la + 1, t))
    pm1 = _legendre_nocs(m - 1, la, t) if m >= 1 else np.zeros_like(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        interior = (m * t * p - (m + la) * pm1) / np.where(s > 0, s, 1.0)
    dth = np.where(s > 1e-8, interior, ladder)
    if p.ndim == 0:
        return float(p), float(dth)
    return p, dth


# ---------------------------------------------------------------------------
# large-order asymptotics below the turning point
# ---------------------------------------------------------------------------

def phi(z):
    """``z e^{sqrt(1-z^2)} / (1 + sqrt(1-z^2))``, increasing on (0, 1)."""
    z = np.asarray(z, dtype=float)
    w = np.sqrt(1.0 - z * z)
    out = z * np.exp(w) / (1.0 + w)
    return float(out) if out.ndim == 0 else out


def _check_z(z):
    z = np.asarray(z, dtype=float)
    if np.any((z <= 0) | (z >= 1)):
        raise ValueError("argument ratio z must lie in (0, 1)")
    return z


def uniform_asym_j(nu: float, z):
    """Leading term of J_nu(nu z) for 0 < z < 1.

    ``z^nu e^{nu w} / ((2 pi nu)^{1/2} w^{1/2} (1 + w)^nu)`` with
    ``w = sqrt(1 - z^2)``; evaluated in log form to avoid underflow.
    """
    z = _check_z(z)
    if nu <= 0:
        raise ValueError("nu must be positive")
    w = np.sqrt(1.0 - z * z)
    logv = nu * (np.log(z) + w - np.log1p(w)) - 0.5 * np.log(2 * np.pi * nu) - 0.25 * np.log(1 - z * z)
    out = np.exp(logv)
    return float(out) if out.ndim == 0 else out


def jm_bound(nu: float, z):
    """Upper bound on |J_nu(nu z)| for 0 < z <= 1: ``phi(z)**nu``."""
    z = np.asarray(z, dtype=float)
    out = np.asarray(phi(z)) ** nu
    return float(out) if out.ndim == 0 else out


def jpm_bound(nu: float, z):
    """Upper bound on |J_nu'(nu z)| for 0 < z <= 1."""
    z = np.asarray(z, dtype=float)
    out = (1 + z * z) ** 0.25 / (z * np.sqrt(2 * np.pi * nu)) * np.asarray(phi(z)) ** nu
    return float(out) if out.ndim == 0 else out
