"""Radial transmission eigenfunctions, their L2 norms on concentric balls, and
boundary-localization ratios.

Only the compressional elastic family and the acoustic field enter: in 2D
``u = alpha * grad(J_m(k_p r) e^{i m theta})`` and ``v = beta J_m(k r) e^{i m theta}``;
in 3D ``u = alpha * grad(j_m(k_p r) Y) / k_p`` and ``v = beta j_m(k r) Y`` with
``Y = P_m^{|l|}(cos theta) e^{i l phi}``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .quadrature import adaptive_gl
from .radial import EigRecord, ModeIndex
from .specfun import assoc_legendre, phi


class DegenerateCoupling(ArithmeticError):
    """J'_nu(k) vanishes, so the normal-displacement condition fixes no beta."""


class Field(enum.Enum):
    ACOUSTIC = "acoustic"
    ELASTIC = "elastic"


@dataclass(frozen=True)
class RadialEigenpair:
    mode: ModeIndex
    k: float
    k_p: float
    alpha: complex
    beta: complex
    l: int = 0

    @property
    def dim(self) -> int:
        return self.mode.dim


@dataclass(frozen=True)
class LocalizationReport:
    mode: ModeIndex
    eps: float
    field: Field
    ratio: float
    bound: float
    # True when ``bound`` majorizes ratio**2 rather than ratio
    bound_is_squared: bool

    def to_row(self, k: float) -> dict:
        return {
            "dim": self.mode.dim, "m": self.mode.m, "s": self.mode.s, "k": k,
            "eps": self.eps, "field": self.field.value, "ratio": self.ratio, "envelope": self.bound,
        }


def _coupling(dim: int, m: int, k: float, k_p: float, alpha: complex) -> complex:
    if dim == 2:
        den = sp.jvp(m, k)
        num = k_p * k * sp.jvp(m, k_p)
    else:
        den = sp.spherical_jn(m, k, derivative=True)
        num = k * sp.spherical_jn(m, k_p, derivative=True)
    if abs(den) < 1e-13:
        raise DegenerateCoupling(f"|Z_m'(k)| = {abs(den):.2e} at k = {k}")
    return alpha * num / den


def build_eigenpair(rec: EigRecord, alpha: complex = 1.0, l: int = 0) -> RadialEigenpair:
    if alpha == 0:
        raise ValueError("alpha must be nonzero")
    m = rec.mode.m
    if rec.mode.dim == 3 and abs(l) > m:
        raise ValueError("need |l| <= m")
    k_p = rec.k * rec.params.tau
    beta = _coupling(rec.mode.dim, m, rec.k, k_p, complex(alpha))
    return RadialEigenpair(rec.mode, rec.k, k_p, complex(alpha), beta, int(l) if rec.mode.dim == 3 else 0)


# ---------------------------------------------------------------------------
# pointwise fields
# ---------------------------------------------------------------------------

def eval_fields(pair: RadialEigenpair, point) -> tuple[np.ndarray, complex]:
    """``(u, v)`` at a Cartesian point inside the closed unit ball."""
    x = np.asarray(point, dtype=float)
    if x.shape != (pair.dim,):
        raise ValueError(f"expected a {pair.dim}-vector")
    r = float(np.linalg.norm(x))
    if r > 1 + 1e-12:
        raise ValueError("point lies outside the unit ball")
    return _fields2(pair, x, r) if pair.dim == 2 else _fields3(pair, x, r)


def _fields2(pair, x, r):
    m, kp, k = pair.mode.m, pair.k_p, pair.k
    if r < 1e-8:
        v = 0j if m >= 1 else pair.beta
        u = np.zeros(2, complex)
        if m == 1:
            u = pair.alpha * kp / 2 * np.array([1.0, 1j])
        return u, v
    th = math.atan2(x[1], x[0])
    e = np.exp(1j * m * th)
    rhat = np.array([math.cos(th), math.sin(th)])
    that = np.array([-math.sin(th), math.cos(th)])
    ur = pair.alpha * kp * sp.jvp(m, kp * r) * e
    ut = pair.alpha * 1j * m / r * sp.jv(m, kp * r) * e
    return ur * rhat + ut * that, pair.beta * sp.jv(m, k * r) * e


def _fields3(pair, x, r):
    m, l, kp, k = pair.mode.m, pair.l, pair.k_p, pair.k
    if r < 1e-8:
        # only m = 1 leaves a nonzero gradient at the origin; approach along +z
        x = np.array([0.0, 0.0, 1e-8])
        r = 1e-8
    th = math.acos(max(-1.0, min(1.0, x[2] / r)))
    th = min(max(th, 1e-9), math.pi - 1e-9)
    ph = math.atan2(x[1], x[0])
    ct, st = math.cos(th), math.sin(th)
    P, dP = assoc_legendre(m, l, ct)
    e = np.exp(1j * l * ph)
    rhat = np.array([st * math.cos(ph), st * math.sin(ph), ct])
    that = np.array([ct * math.cos(ph), ct * math.sin(ph), -st])
    phat = np.array([-math.sin(ph), math.cos(ph), 0.0])
    jr = sp.spherical_jn(m, kp * r)
    jpr = sp.spherical_jn(m, kp * r, derivative=True)
    a = pair.alpha * e
    u = a * jpr * P * rhat + a * jr / (kp * r) * dP * that + a * jr / (kp * r) * (1j * l / st) * P * phat
    v = pair.beta * sp.spherical_jn(m, k * r) * P * e
    return u, v


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def _sphere_weight(m: int, l: int) -> float:
    """Integral of |P_m^{|l|}(cos theta) e^{i l phi}|^2 over the unit sphere."""
    la = abs(l)
    return 2 * math.pi * math.exp(sp.gammaln(m + la + 1) - sp.gammaln(m - la + 1)) / (m + 0.5)


def radial_integrands(pair: RadialEigenpair):
    """Vectorized radial densities ``(g_v, g_u)`` whose integrals give the squared norms."""
    m, k, kp = pair.mode.m, pair.k, pair.k_p
    if pair.dim == 2:
        cv = 2 * math.pi * abs(pair.beta) ** 2
        cu = 2 * math.pi * abs(pair.alpha) ** 2

        def gv(r):
            return cv * r * sp.jv(m, k * r) ** 2

        def gu(r):
            return cu * (kp * kp * r * sp.jvp(m, kp * r) ** 2 + m * m / r * sp.jv(m, kp * r) ** 2)
    else:
        w = _sphere_weight(m, pair.l)
        cv = w * abs(pair.beta) ** 2
        cu = w * abs(pair.alpha) ** 2
        mm = m * (m + 1)

        def gv(r):
            return cv * r * r * sp.spherical_jn(m, k * r) ** 2

        def gu(r):
            x = kp * r
            return cu * r * r * (sp.spherical_jn(m, x, derivative=True) ** 2 + mm * (sp.spherical_jn(m, x) / x) ** 2)
    return gv, gu


def l2_norms(pair: RadialEigenpair, eps: float, lo: float = 0.0, rtol: float = 1e-11) -> tuple[float, float]:
    """Squared L2 norms ``(||v||^2, ||u||^2)`` over ``lo < |x| < eps``."""
    if not (0 < eps <= 1) or not (0 <= lo < eps):
        raise ValueError("need 0 <= lo < eps <= 1")
    nu = pair.mode.nu
    gv, gu = radial_integrands(pair)
    nv = adaptive_gl(gv, lo, eps, breakpoints=(nu / pair.k,), rtol=rtol)
    nu_ = adaptive_gl(gu, lo, eps, breakpoints=(nu / pair.k_p,), rtol=rtol)
    return nv, nu_


def envelope(pair: RadialEigenpair, eps: float, field: Field) -> tuple[float, bool]:
    """Theoretical decay envelope with the unspecified constant set to 1.

    Acoustic envelopes bound the squared ratio; elastic ones the ratio itself.
    The mean-value points are taken at their worst case (inner at eps, outer at 1).
    """
    m = pair.mode.m
    nu = pair.mode.nu
    if field is Field.ACOUSTIC:
        return nu ** (1 / 3) / math.sqrt(1 - eps * eps) * phi(eps) ** (2 * nu), True
    tau = pair.k_p / pair.k
    z1 = tau * pair.k * eps / nu
    z2 = min(tau * pair.k / nu, 1.0)
    contraction = phi(z1) / phi(z2)
    if pair.dim == 2:
        return eps * m ** (5 / 3) * contraction ** (2 * m - 1), False
    return nu ** (2 / 3) * contraction ** (2 * m), False


def localization_ratio(pair: RadialEigenpair, eps: float, field: Field | str) -> LocalizationReport:
    field = Field(field)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    inner = l2_norms(pair, eps)
    outer = l2_norms(pair, 1.0, lo=eps)
    i = 0 if field is Field.ACOUSTIC else 1
    ratio = math.sqrt(inner[i] / (inner[i] + outer[i]))
    bound, sq = envelope(pair, eps, field)
    return LocalizationReport(pair.mode, eps, field, ratio, bound, sq)
