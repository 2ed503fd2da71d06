"""Nyström discretization of the coupled acoustic-elastic boundary integral
system on smooth closed curves, and a smallest-singular-value eigenvalue scan.

Densities are laid out as ``[phi_b (n), phi_e1 (n), phi_e2 (n)]`` at the
nodes ``t_j = 2 pi j / n``. The block operator is::

    [ -I/2 + K^{k,*}          -k^2 nu . S^{k tau}     ]
    [ delta tau^2 nu S^k      -I/2 + K_el^{k tau,*}   ]

with the single layers built on ``G^k = -(i/4) H_0(k|x|)`` and the Lamé
fundamental solution at frequency ``omega = k tau`` (unit density).
Logarithmic kernels use the Kress splitting ``M = M1 log(4 sin^2((t-s)/2)) + M2``;
the Cauchy part of the static traction kernel uses trigonometric
principal-value weights.
"""
from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Callable

import numpy as np
import scipy.linalg as sla
from scipy import special as sp
from scipy.sparse.linalg import svds

from .params import NondimParams

log = logging.getLogger(__name__)

EULER_GAMMA = float(np.euler_gamma)
TWO_PI = 2 * math.pi


class CurveError(ValueError):
    """Bad curve description or a self-intersecting polygon at node resolution."""


class NotStarShaped(ValueError):
    pass


class NearBoundaryWarning(UserWarning):
    pass


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CurveNodes:
    t: np.ndarray
    x: np.ndarray       # (n, 2)
    d1: np.ndarray      # x'(t)
    d2: np.ndarray      # x''(t)

    @property
    def n(self) -> int:
        return len(self.t)

    @cached_property
    def speed(self) -> np.ndarray:
        return np.hypot(self.d1[:, 0], self.d1[:, 1])

    @cached_property
    def tangent(self) -> np.ndarray:
        return self.d1 / self.speed[:, None]

    @cached_property
    def normal(self) -> np.ndarray:
        """Outward unit normal for a counterclockwise curve."""
        return np.column_stack([self.d1[:, 1], -self.d1[:, 0]]) / self.speed[:, None]

    @cached_property
    def spacing(self) -> float:
        return float(np.max(self.speed)) * TWO_PI / self.n


@dataclass(frozen=True)
class BoundaryCurve:
    """Smooth closed 2pi-periodic curve, counterclockwise."""

    name: str
    x: Callable[[np.ndarray], np.ndarray]
    dx: Callable[[np.ndarray], np.ndarray]
    ddx: Callable[[np.ndarray], np.ndarray]

    def nodes(self, n: int, check: bool = True) -> CurveNodes:
        if n < 8 or n % 2:
            raise ValueError("n must be even and at least 8")
        return _nodes(self, n, check)

    # -- constructors -----------------------------------------------------
    @classmethod
    def circle(cls, r: float = 1.0) -> "BoundaryCurve":
        return cls.ellipse(r, r, name="circle" if r == 1 else f"circle:{r}")

    @classmethod
    def ellipse(cls, a: float, b: float, name: str | None = None) -> "BoundaryCurve":
        if not (a > 0 and b > 0):
            raise CurveError("ellipse semi-axes must be positive")
        return cls(
            name or f"ellipse:{a},{b}",
            lambda t: np.stack([a * np.cos(t), b * np.sin(t)], -1),
            lambda t: np.stack([-a * np.sin(t), b * np.cos(t)], -1),
            lambda t: np.stack([-a * np.cos(t), -b * np.sin(t)], -1),
        )

    @classmethod
    def kite(cls) -> "BoundaryCurve":
        return cls(
            "kite",
            lambda t: np.stack([np.cos(t) + 0.65 * np.cos(2 * t) - 0.65, 1.5 * np.sin(t)], -1),
            lambda t: np.stack([-np.sin(t) - 1.3 * np.sin(2 * t), 1.5 * np.cos(t)], -1),
            lambda t: np.stack([-np.cos(t) - 2.6 * np.cos(2 * t), -1.5 * np.sin(t)], -1),
        )

    @classmethod
    def from_samples(cls, xy: np.ndarray, name: str = "custom") -> "BoundaryCurve":
        """Trigonometric interpolant through samples at uniform ``t``."""
        xy = np.asarray(xy, dtype=float)
        if xy.ndim != 2 or xy.shape[1] != 2 or len(xy) < 8:
            raise CurveError("need at least 8 (x1, x2) samples")
        m = len(xy)
        if _signed_area(xy) < 0:
            xy = np.concatenate([xy[:1], xy[:0:-1]])
        c = np.fft.fft(xy, axis=0) / m
        freq = np.fft.fftfreq(m, 1.0 / m)
        if m % 2 == 0:
            # split the Nyquist mode symmetrically so the interpolant is real
            c[m // 2] *= 0.5
            c = np.concatenate([c, c[m // 2: m // 2 + 1]])
            freq = np.concatenate([freq, [m // 2]])

        def make(order):
            def f(t):
                t = np.asarray(t, dtype=float)
                e = np.exp(1j * np.multiply.outer(t, freq)) * (1j * freq) ** order
                return np.real(e @ c)
            return f

        return cls(name, make(0), make(1), make(2))

    @classmethod
    def from_file(cls, path: str | Path) -> "BoundaryCurve":
        """Plain-text table of ``t x1 x2`` rows with uniform ``t`` over one period."""
        data = np.loadtxt(path, comments="#", delimiter=None, ndmin=2)
        if data.shape[1] != 3:
            raise CurveError("curve file must have three columns: t, x1, x2")
        t = data[:, 0]
        dt = np.diff(t)
        if not np.allclose(dt, TWO_PI / len(t), rtol=1e-6, atol=1e-9):
            raise CurveError("t samples must be uniform with spacing 2 pi / count")
        return cls.from_samples(data[:, 1:], name=f"file:{path}")

    @classmethod
    def parse(cls, spec: str) -> "BoundaryCurve":
        """``circle``, ``ellipse:a,b``, ``kite`` or ``file:PATH``."""
        if spec == "circle":
            return cls.circle()
        if spec == "kite":
            return cls.kite()
        if spec.startswith("ellipse:"):
            try:
                a, b = (float(v) for v in spec[8:].split(","))
            except ValueError as exc:
                raise CurveError(f"bad ellipse spec {spec!r}") from exc
            return cls.ellipse(a, b)
        if spec.startswith("file:"):
            return cls.from_file(spec[5:])
        raise CurveError(f"unknown curve {spec!r}")


def _signed_area(xy: np.ndarray) -> float:
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _self_intersects(xy: np.ndarray) -> bool:
    p, q = xy, np.roll(xy, -1, axis=0)
    d = q - p

    def cross(a, b):
        return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]

    # orientation tests for every pair of non-adjacent edges
    o1 = cross(d[:, None], p[None, :] - p[:, None])
    o2 = cross(d[:, None], q[None, :] - p[:, None])
    o3 = cross(d[None, :], p[:, None] - p[None, :])
    o4 = cross(d[None, :], q[:, None] - p[None, :])
    hit = (o1 * o2 < 0) & (o3 * o4 < 0)
    n = len(xy)
    i, j = np.indices((n, n))
    adjacent = (np.abs(i - j) <= 1) | (np.abs(i - j) == n - 1)
    return bool(np.any(hit & ~adjacent))


@lru_cache(maxsize=32)
def _nodes(curve: BoundaryCurve, n: int, check: bool) -> CurveNodes:
    t = TWO_PI * np.arange(n) / n
    nd = CurveNodes(t, curve.x(t), curve.dx(t), curve.ddx(t))
    if check:
        if np.any(nd.speed < 1e-12):
            raise CurveError("curve parametrization is singular")
        if _signed_area(nd.x) <= 0:
            raise CurveError("curve must be counterclockwise")
        if _self_intersects(nd.x):
            raise CurveError(f"curve {curve.name} self-intersects at n = {n}")
    return nd


# ---------------------------------------------------------------------------
# quadrature weights
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16)
def log_weights(n: int) -> np.ndarray:
    """``R[i, j]`` integrating ``log(4 sin^2((t_i - s)/2)) phi(s)`` against nodal values."""
    N = n // 2
    d = TWO_PI * np.arange(n) / n
    m = np.arange(1, N)
    r = -(TWO_PI / N) * (np.cos(np.outer(d, m)) / m).sum(1) - (math.pi / N**2) * np.cos(N * d)
    return sla.circulant(r)


@lru_cache(maxsize=16)
def cauchy_weights(n: int) -> np.ndarray:
    """``W[i, j]`` for the principal value of ``(1/2) cot((s - t_i)/2) phi(s)``."""
    N = n // 2
    d = TWO_PI * np.arange(n) / n
    m = np.arange(1, N)
    w = -(TWO_PI / n) * np.sin(np.outer(d, m)).sum(1)
    return sla.circulant(w)


@lru_cache(maxsize=16)
def _log_sin(n: int) -> np.ndarray:
    d = TWO_PI * np.subtract.outer(np.arange(n), np.arange(n)) / n
    with np.errstate(divide="ignore"):
        out = np.log(4 * np.sin(d / 2) ** 2)
    np.fill_diagonal(out, 0.0)
    return out


@dataclass(frozen=True)
class _Geometry:
    rvec: np.ndarray    # x_i - y_j, (n, n, 2)
    rho: np.ndarray     # |x_i - y_j| with ones on the diagonal
    rhat: np.ndarray    # unit vector, tangent on the diagonal
    nu: np.ndarray      # normal at the target, (n, 1, 2)
    rn: np.ndarray      # (x - y) . nu_x
    speed_y: np.ndarray  # (1, n)


@lru_cache(maxsize=8)
def _geometry(nodes: CurveNodes) -> _Geometry:
    r = nodes.x[:, None, :] - nodes.x[None, :, :]
    rho = np.hypot(r[..., 0], r[..., 1])
    np.fill_diagonal(rho, 1.0)
    rhat = r / rho[..., None]
    idx = np.arange(nodes.n)
    rhat[idx, idx] = nodes.tangent
    nu = nodes.normal[:, None, :]
    rn = np.einsum("ijk,ijk->ij", r, np.broadcast_to(nu, r.shape))
    return _Geometry(r, rho, rhat, nu, rn, nodes.speed[None, :])


def _diag(a: np.ndarray, vals) -> np.ndarray:
    idx = np.arange(a.shape[0])
    a[idx, idx] = vals
    return a


def _curvature_term(nodes: CurveNodes) -> np.ndarray:
    """Diagonal limit of ``(x - y) . nu_x / |x - y|^2``."""
    return -np.einsum("ij,ij->i", nodes.normal, nodes.d2) / (2 * nodes.speed**2)


# ---------------------------------------------------------------------------
# Helmholtz kernels and operators
# ---------------------------------------------------------------------------

def _rho(x, y) -> float:
    r = float(np.linalg.norm(np.asarray(x, float) - np.asarray(y, float)))
    if r == 0.0:
        raise ValueError("kernel is singular at coincident points")
    return r


def helmholtz_kernel(k: float, x, y) -> complex:
    """``G^k(x - y)``; ``k = 0`` gives ``log|x - y| / (2 pi)``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    rho = _rho(x, y)
    if k == 0:
        return complex(math.log(rho) / TWO_PI)
    return complex(-0.25j * sp.hankel1(0, k * rho))


def single_layer(nodes: CurveNodes, k: float) -> np.ndarray:
    n = nodes.n
    g = _geometry(nodes)
    sy, s = g.speed_y, nodes.speed
    if k == 0:
        M1 = np.broadcast_to(sy / (2 * TWO_PI), (n, n))
        M = np.log(g.rho) / TWO_PI * sy
        diag = np.log(s) / TWO_PI * s
    else:
        H0 = _hankel_on_nodes(nodes, k)[0]
        M1 = H0.real / (2 * TWO_PI) * sy
        M = -0.25j * H0 * sy
        diag = (-0.25j + (math.log(k / 2) + EULER_GAMMA) / TWO_PI + np.log(s) / TWO_PI) * s
        _diag(M1, s / (2 * TWO_PI))
    M2 = _diag(M - M1 * _log_sin(n), diag)
    return log_weights(n) * M1 + (TWO_PI / n) * M2


def np_adjoint(nodes: CurveNodes, k: float) -> np.ndarray:
    """``K^{k,*}``: kernel ``grad_x G^k(x - y) . nu_x``."""
    n = nodes.n
    g = _geometry(nodes)
    sy = g.speed_y
    diag = _curvature_term(nodes) * nodes.speed / TWO_PI
    if k == 0:
        M = _diag(g.rn / g.rho**2 / TWO_PI * sy, diag)
        return (TWO_PI / n) * M
    H1 = _hankel_on_nodes(nodes, k)[1]
    M = 0.25j * k * H1 * g.rn / g.rho * sy
    M1 = _diag(-k / (2 * TWO_PI) * H1.real * g.rn / g.rho * sy, 0.0)
    M2 = _diag(M - M1 * _log_sin(n), diag)
    return log_weights(n) * M1 + (TWO_PI / n) * M2


# ---------------------------------------------------------------------------
# Lamé kernels
# ---------------------------------------------------------------------------

_PSI = np.array([sp.digamma(j + 1) + sp.digamma(j + 3) for j in range(20)])
_FAC = np.array([math.factorial(j) * math.factorial(j + 2) for j in range(20)], dtype=float)


def _h2(z: np.ndarray, H0: np.ndarray, H1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``h2 = H_2^(1)(z) + 4i/(pi z^2)`` and its derivative, finite at ``z -> 0``.

    ``H0``, ``H1`` are the Hankel values at ``z``; ``H_2`` follows by recurrence
    for ``z >= 1`` and a power series is used below that.
    """
    z = np.asarray(z, dtype=float)
    h = 2 * H1 / z - H0 + 4j / (math.pi * z**2)
    dh = H1 - 2 * h / z
    small = z < 1.0
    if np.any(small):
        zs = z[small]
        j2 = sp.jv(2, zs)
        dj2 = sp.jvp(2, zs)
        q = (zs / 2) ** 2
        ser = np.zeros_like(zs)
        dser = np.zeros_like(zs)
        for j in range(20):
            c = _PSI[j] * (-1) ** j / _FAC[j]
            ser += c * q ** (j + 1)
            dser += c * (j + 1) * q**j * (zs / 2)
        lg = np.log(zs / 2)
        y = -1 / math.pi + 2 / math.pi * lg * j2 - ser / math.pi
        dy = 2 / math.pi * (j2 / zs + lg * dj2) - dser / math.pi
        h[small] = j2 + 1j * y
        dh[small] = dj2 + 1j * dy
    return h, dh


def _hankel01(z: np.ndarray, symmetric: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """``H_0^(1)(z), H_1^(1)(z)``; a symmetric square ``z`` is evaluated on one triangle."""
    if not symmetric:
        return sp.hankel1(0, z), sp.hankel1(1, z)
    iu = np.triu_indices(z.shape[0])
    out = []
    for order in (0, 1):
        h = np.empty(z.shape, complex)
        h[iu] = sp.hankel1(order, z[iu])
        h.T[iu] = h[iu]
        out.append(h)
    return out[0], out[1]


def _lame_consts(p: NondimParams):
    l2 = p.lam + 2 * p.mu
    g1 = 0.5 * (1 / p.mu + 1 / l2)
    g2 = 0.5 * (1 / p.mu - 1 / l2)
    return l2, g1, g2


def _lame_AB(omega: float, rho: np.ndarray, p: NondimParams, symmetric: bool = False):
    """Coefficients of ``Gamma = A I + B rhat rhat^T`` and their ``rho`` derivatives,
    plus the matching ``log(4 sin^2)`` coefficients (Bessel-J parts)."""
    l2, _, _ = _lame_consts(p)
    kp = omega / math.sqrt(l2)
    ks = omega / math.sqrt(p.mu)
    zs, zp = ks * rho, kp * rho
    H0s, H1s = _hankel01(zs, symmetric)
    H0p, H1p = _hankel01(zp, symmetric)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        h2s, dh2s = _h2(zs, H0s, H1s)
        h2p, dh2p = _h2(zp, H0p, H1p)
    im, il = 1 / p.mu, 1 / l2
    A = -0.125j * (im * (H0s - h2s) + il * (H0p + h2p))
    dA = -0.125j * (im * (-ks * H1s - ks * dh2s) + il * (-kp * H1p + kp * dh2p))
    B = -0.25j * (im * h2s - il * h2p)
    dB = -0.25j * (im * ks * dh2s - il * kp * dh2p)
    # Bessel J parts: Re of H for real argument
    J0s, J1s, J2s = H0s.real, H1s.real, h2s.real
    J0p, J1p, J2p = H0p.real, H1p.real, h2p.real
    dJ2s, dJ2p = dh2s.real, dh2p.real
    c = 1 / (8 * math.pi)
    AJ = c * (im * (J0s - J2s) + il * (J0p + J2p))
    dAJ = c * (im * (-ks * J1s - ks * dJ2s) + il * (-kp * J1p + kp * dJ2p))
    BJ = 2 * c * (im * J2s - il * J2p)
    dBJ = 2 * c * (im * ks * dJ2s - il * kp * dJ2p)
    return (A, dA, B, dB), (AJ, dAJ, BJ, dBJ), (kp, ks)


def elastic_kernel(k: float, x, y, p: NondimParams) -> np.ndarray:
    """Lamé fundamental solution ``Gamma^k(x - y)`` (2x2) at frequency ``k``, unit density.

    ``k = 0`` gives ``(g1/2pi) log|x| I - (g2/2pi) x x^T/|x|^2``.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    r = np.asarray(x, float) - np.asarray(y, float)
    rho = _rho(x, y)
    rh = r / rho
    if k == 0:
        _, g1, g2 = _lame_consts(p)
        return (g1 / TWO_PI * math.log(rho) * np.eye(2) - g2 / TWO_PI * np.outer(rh, rh)).astype(complex)
    (A, _, B, _), _, _ = _lame_AB(k, np.array([rho]), p)
    return A[0] * np.eye(2) + B[0] * np.outer(rh, rh)


@lru_cache(maxsize=4)
def _lame_on_nodes(nodes: CurveNodes, omega: float, p: NondimParams):
    return _lame_AB(omega, _geometry(nodes).rho, p, symmetric=True)


@lru_cache(maxsize=4)
def _hankel_on_nodes(nodes: CurveNodes, k: float):
    return _hankel01(k * _geometry(nodes).rho, symmetric=True)


def _outer_mat(A, B, rhat):
    """``A I + B rhat rhat^T`` as ``(n, n, 2, 2)``."""
    out = B[..., None, None] * rhat[..., :, None] * rhat[..., None, :]
    out[..., 0, 0] += A
    out[..., 1, 1] += A
    return out


def _to_block(T: np.ndarray) -> np.ndarray:
    n = T.shape[0]
    return T.transpose(2, 0, 3, 1).reshape(2 * n, 2 * n)


def _traction(A, dA, B, dB, rhat, nu, rho, p: NondimParams) -> np.ndarray:
    """Traction (at x, normal nu_x) of the columns of ``A I + B rhat rhat^T``."""
    lam, mu = p.lam, p.mu
    nu = np.broadcast_to(nu, rhat.shape)
    rn = np.einsum("...k,...k->...", rhat, nu)
    Bq = B / rho
    eye = np.eye(2)
    nr = nu[..., :, None] * rhat[..., None, :]      # nu_i rhat_j
    rn_ = rhat[..., :, None] * nu[..., None, :]     # rhat_i nu_j
    rr = rhat[..., :, None] * rhat[..., None, :]
    T = (lam * (dA + dB + Bq))[..., None, None] * nr
    T = T + mu * (
        (dA * rn)[..., None, None] * eye
        + dA[..., None, None] * rn_
        + (2 * dB * rn)[..., None, None] * rr
        + Bq[..., None, None] * (2 * nr + rn_ + rn[..., None, None] * eye - 4 * rn[..., None, None] * rr)
    )
    return T


def elastic_single_layer(nodes: CurveNodes, omega: float, p: NondimParams) -> np.ndarray:
    n = nodes.n
    g = _geometry(nodes)
    s = nodes.speed
    sy = g.speed_y[..., None, None]
    _, g1, g2 = _lame_consts(p)
    tt = nodes.tangent[:, :, None] * nodes.tangent[:, None, :]
    idx = np.arange(n)
    if omega == 0:
        A = g1 / TWO_PI * np.log(g.rho)
        M = _outer_mat(A, np.full((n, n), -g2 / TWO_PI), g.rhat) * sy
        M1 = _outer_mat(np.full((n, n), g1 / (2 * TWO_PI)), np.zeros((n, n)), g.rhat) * sy
        dA0 = g1 / TWO_PI * np.log(s)
        dB0 = -g2 / TWO_PI
    else:
        (A, _, B, _), (AJ, _, BJ, _), (kp, ks) = _lame_on_nodes(nodes, omega, p)
        AJ, BJ = AJ.copy(), BJ.copy()
        M = _outer_mat(A, B, g.rhat) * sy
        AJ[idx, idx] = g1 / (2 * TWO_PI)
        BJ[idx, idx] = 0.0
        M1 = _outer_mat(AJ, BJ, g.rhat) * sy
        l2 = p.lam + 2 * p.mu
        a0 = -0.125j * (
            (1 / p.mu) * (1 + 2j / math.pi * (math.log(ks / 2) + EULER_GAMMA) + 1j / math.pi)
            + (1 / l2) * (1 + 2j / math.pi * (math.log(kp / 2) + EULER_GAMMA) - 1j / math.pi)
        )
        dA0 = a0 + g1 / TWO_PI * np.log(s)
        dB0 = -g2 / TWO_PI
    M2 = M - M1 * _log_sin(n)[..., None, None]
    M2[idx, idx] = (dA0 * np.ones(n))[:, None, None] * np.eye(2) + dB0 * tt
    M2[idx, idx] *= s[:, None, None]
    return _to_block(log_weights(n)[..., None, None] * M1 + (TWO_PI / n) * M2)


def _static_traction_parts(nodes: CurveNodes, p: NondimParams) -> np.ndarray:
    n = nodes.n
    g = _geometry(nodes)
    l2, _, g2 = _lame_consts(p)
    mu = p.mu
    idx = np.arange(n)
    s = nodes.speed
    # Cauchy part: (mu / (2 pi l2)) (r x nu)/rho^2 [[0, 1], [-1, 0]]
    rxn = g.rvec[..., 0] * g.nu[..., 1] - g.rvec[..., 1] * g.nu[..., 0]
    c = rxn / g.rho**2 * g.speed_y
    d = TWO_PI * np.subtract.outer(idx, idx) / n
    with np.errstate(divide="ignore", invalid="ignore"):
        c_s = c - 0.5 / np.tan(-d / 2)
    c_s[idx, idx] = np.einsum("ij,ij->i", nodes.d1, nodes.d2) / (2 * s**2)
    P = cauchy_weights(n) + (TWO_PI / n) * c_s
    coef = mu / (TWO_PI * l2)
    out = np.zeros((2 * n, 2 * n))
    out[:n, n:] = coef * P
    out[n:, :n] = -coef * P
    # bounded part: (r . nu)/rho^2 [coef I + (2 mu g2 / pi) rhat rhat^T]
    q = g.rn / g.rho**2
    q[idx, idx] = _curvature_term(nodes)
    Bm = _outer_mat(np.full((n, n), coef), np.full((n, n), 2 * mu * g2 / math.pi), g.rhat)
    out += _to_block((TWO_PI / n) * (q * g.speed_y)[..., None, None] * Bm)
    return out


def elastic_np_adjoint(nodes: CurveNodes, omega: float, p: NondimParams) -> np.ndarray:
    """``K_el^{omega,*}``: traction of the Lamé single layer at the boundary."""
    n = nodes.n
    K0 = _static_traction_parts(nodes, p)
    if omega == 0:
        return K0.astype(complex)
    g = _geometry(nodes)
    _, g1, g2 = _lame_consts(p)
    (A, dA, B, dB), (AJ, dAJ, BJ, dBJ), _ = _lame_on_nodes(nodes, omega, p)
    Ad = A - g1 / TWO_PI * np.log(g.rho)
    dAd = dA - g1 / (TWO_PI * g.rho)
    Bd = B + g2 / TWO_PI
    sy = g.speed_y[..., None, None]
    M = _traction(Ad, dAd, Bd, dB, g.rhat, g.nu, g.rho, p) * sy
    M1 = _traction(AJ - g1 / (2 * TWO_PI), dAJ, BJ, dBJ, g.rhat, g.nu, g.rho, p) * sy
    idx = np.arange(n)
    M1[idx, idx] = 0.0
    M2 = M - M1 * _log_sin(n)[..., None, None]
    M2[idx, idx] = 0.0
    return K0 + _to_block(log_weights(n)[..., None, None] * M1 + (TWO_PI / n) * M2)


# ---------------------------------------------------------------------------
# block operator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BlockOperator:
    matrix: np.ndarray
    k: float
    n: int
    params: NondimParams

    def apply(self, density: np.ndarray) -> np.ndarray:
        return self.matrix @ density


def _as_nodes(curve: BoundaryCurve | CurveNodes, n: int | None) -> CurveNodes:
    if isinstance(curve, CurveNodes):
        return curve
    if n is None:
        raise ValueError("n is required when passing a BoundaryCurve")
    return curve.nodes(n)


def assemble_block(curve: BoundaryCurve | CurveNodes, k: float, p: NondimParams, n: int | None = None) -> BlockOperator:
    if not k > 0:
        raise ValueError("k must be positive")
    nodes = _as_nodes(curve, n)
    n = nodes.n
    omega = k * p.tau
    Sk = single_layer(nodes, k)
    Kk = np_adjoint(nodes, k)
    Se = elastic_single_layer(nodes, omega, p)
    Ke = elastic_np_adjoint(nodes, omega, p)
    nu1, nu2 = nodes.normal[:, 0], nodes.normal[:, 1]
    A = np.empty((3 * n, 3 * n), complex)
    A[:n, :n] = Kk - 0.5 * np.eye(n)
    A[:n, n:] = -k * k * (nu1[:, None] * Se[:n] + nu2[:, None] * Se[n:])
    c = p.delta * p.tau**2
    A[n:2 * n, :n] = c * nu1[:, None] * Sk
    A[2 * n:, :n] = c * nu2[:, None] * Sk
    A[n:, n:] = Ke - 0.5 * np.eye(2 * n)
    return BlockOperator(A, k, n, p)


def static_acoustic(curve: BoundaryCurve | CurveNodes, n: int | None = None) -> np.ndarray:
    """``-I/2 + K^{0,*}``."""
    nodes = _as_nodes(curve, n)
    return np_adjoint(nodes, 0.0) - 0.5 * np.eye(nodes.n)


def static_elastic(curve: BoundaryCurve | CurveNodes, p: NondimParams, n: int | None = None) -> np.ndarray:
    """``-I/2 + K_el^{0,*}``."""
    nodes = _as_nodes(curve, n)
    return elastic_np_adjoint(nodes, 0.0, p) - 0.5 * np.eye(2 * nodes.n)


# ---------------------------------------------------------------------------
# smallest singular value and scan
# ---------------------------------------------------------------------------

def sigma_max(A: np.ndarray) -> float:
    return float(svds(A, k=1, return_singular_vectors=False, random_state=0)[0])


def sigma_min(A: np.ndarray, method: str = "inverse", block: int = 4, tol: float = 1e-10, maxiter: int = 60) -> float:
    """Smallest singular value.

    ``"svd"`` uses the full decomposition; ``"inverse"`` runs block inverse
    iteration on ``(A^H A)^{-1}`` from one LU factorization.
    """
    if method == "svd":
        return float(sla.svdvals(A)[-1])
    if method != "inverse":
        raise ValueError(f"unknown method {method!r}")
    lu = sla.lu_factor(A, check_finite=False)
    rng = np.random.default_rng(12345)
    X = rng.standard_normal((A.shape[0], block)) + 1j * rng.standard_normal((A.shape[0], block))
    X, _ = np.linalg.qr(X)
    prev = None
    for _ in range(maxiter):
        Z = sla.lu_solve(lu, X, check_finite=False)
        est = 1.0 / float(np.linalg.svd(Z, compute_uv=False)[0])
        if prev is not None and abs(est - prev) <= tol * est:
            return est
        prev = est
        X, _ = np.linalg.qr(sla.lu_solve(lu, Z, trans=2, check_finite=False))
    return est


def null_vector(A: np.ndarray) -> tuple[float, np.ndarray, float]:
    """``(sigma_min, right singular vector, sigma_max)`` from a full SVD."""
    _, s, vh = sla.svd(A)
    return float(s[-1]), vh[-1].conj(), float(s[0])


@dataclass(frozen=True)
class Minimum:
    k: float
    sigma_min: float
    sigma_max: float
    window: tuple[float, float]
    flagged: bool = True

    @property
    def relative(self) -> float:
        return self.sigma_min / self.sigma_max


@dataclass
class ScanResult:
    ks: np.ndarray
    sigma: np.ndarray
    minima: list[Minimum] = field(default_factory=list)
    n: int = 0

    def rows(self) -> list[dict]:
        return [
            {"k": m.k, "sigma_min": m.sigma_min, "sigma_max": m.sigma_max, "relative": m.relative,
             "lo": m.window[0], "hi": m.window[1]}
            for m in self.minima
        ]


def _candidates(sig: np.ndarray, window: int = 21, factor: float = 0.2) -> list[int]:
    out = []
    h = window // 2
    for i in range(1, len(sig) - 1):
        if sig[i] < sig[i - 1] and sig[i] <= sig[i + 1]:
            lo, hi = max(0, i - h), min(len(sig), i + h + 1)
            if sig[i] < factor * np.median(sig[lo:hi]):
                out.append(i)
    return out


def golden_min(f: Callable[[float], float], a: float, b: float, xtol: Callable[[float], float]) -> tuple[float, float]:
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol(0.5 * (a + b)):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def sigma_min_scan(
    curve: BoundaryCurve,
    p: NondimParams,
    k_range: tuple[float, float],
    steps: int,
    n: int = 256,
    *,
    method: str = "inverse",
    refine: bool = True,
    rel_tol: float = 1e-6,
    workers: int = 1,
    scale: float = 1.0,
) -> ScanResult:
    """Grid scan of ``sigma_min(A(k))`` with golden-section refinement of prominent minima.

    A grid point is a candidate when it is a local minimum lying below 0.2 times
    the median over a 21-point window. ``scale`` multiplies the operator.
    """
    lo, hi = k_range
    if not (0 < lo < hi) or steps < 2:
        raise ValueError("need 0 < lo < hi and steps >= 2")
    nodes = curve.nodes(n)

    def smin(k):
        return abs(scale) * sigma_min(assemble_block(nodes, k, p).matrix, method)

    ks = np.linspace(lo, hi, steps)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            sig = np.array(list(ex.map(smin, ks)))
    else:
        sig = np.array([smin(k) for k in ks])
    res = ScanResult(ks, sig, n=n)
    for i in _candidates(sig):
        window = (float(ks[i - 1]), float(ks[i + 1]))
        if refine:
            res.minima.append(refine_minimum(nodes, p, window, rel_tol=rel_tol, method=method, scale=scale))
        else:
            smax = abs(scale) * sigma_max(assemble_block(nodes, ks[i], p).matrix)
            res.minima.append(Minimum(float(ks[i]), float(sig[i]), smax, window, flagged=False))
    return res


def refine_minimum(
    nodes: CurveNodes, p: NondimParams, window: tuple[float, float], *,
    rel_tol: float = 1e-6, method: str = "inverse", scale: float = 1.0,
) -> Minimum:
    """Golden-section search for the minimum of ``sigma_min`` to ``dk <= rel_tol * k``."""

    def smin(k):
        return abs(scale) * sigma_min(assemble_block(nodes, k, p).matrix, method)

    k, s = golden_min(smin, window[0], window[1], lambda x: rel_tol * x)
    smax = abs(scale) * sigma_max(assemble_block(nodes, k, p).matrix)
    log.info("minimum at k=%.8f sigma_min=%.3e (rel %.3e)", k, s, s / smax)
    return Minimum(float(k), float(s), smax, (float(window[0]), float(window[1])))


# ---------------------------------------------------------------------------
# off-surface evaluation
# ---------------------------------------------------------------------------

def upsample(values: np.ndarray, m: int) -> np.ndarray:
    """Trigonometric interpolation of periodic nodal values (last axis) to ``m`` nodes."""
    n = values.shape[-1]
    if m == n:
        return values
    c = np.fft.fft(values, axis=-1)
    out = np.zeros(values.shape[:-1] + (m,), complex)
    h = n // 2
    out[..., :h] = c[..., :h]
    out[..., m - h + 1:] = c[..., h + 1:]
    # split the Nyquist coefficient between +h and -h
    out[..., h] += 0.5 * c[..., h]
    out[..., m - h] += 0.5 * c[..., h]
    return np.fft.ifft(out, axis=-1) * (m / n)


@dataclass(frozen=True)
class FieldSample:
    points: np.ndarray
    v: np.ndarray | None
    u: np.ndarray | None
    near_boundary: np.ndarray


def _eval_v(pts, y, w, k):
    r = np.hypot(pts[:, None, 0] - y[None, :, 0], pts[:, None, 1] - y[None, :, 1])
    return (-0.25j * sp.hankel1(0, k * r)) @ w


def _eval_u(pts, y, w, omega, p):
    r = pts[:, None, :] - y[None, :, :]
    rho = np.hypot(r[..., 0], r[..., 1])
    rh = r / rho[..., None]
    (A, _, B, _), _, _ = _lame_AB(omega, rho, p)
    rw = np.einsum("pjc,cj->pj", rh, w)
    return np.stack([A @ w[0] + (B * rh[..., 0] * rw).sum(1), A @ w[1] + (B * rh[..., 1] * rw).sum(1)], -1)


def reconstruct_fields(
    curve: BoundaryCurve,
    k: float,
    p: NondimParams,
    density: np.ndarray,
    points: np.ndarray,
    *,
    which: str = "both",
    max_nodes: int = 16384,
    chunk: int = 2048,
) -> FieldSample:
    """``v = S^k[phi_b]`` and ``u = S_el^{k tau}[phi_e]`` at interior points.

    The density is trigonometrically upsampled per point so that the node
    spacing stays a few times smaller than the distance to the curve. Points
    within two original node spacings of the curve are flagged with a warning.
    """
    density = np.asarray(density)
    n = density.size // 3
    if density.shape != (3 * n,):
        raise ValueError("density must have length 3n")
    pts = np.atleast_2d(np.asarray(points, float))
    nodes = curve.nodes(n, check=False)
    fine = curve.nodes(max_nodes, check=False)
    dist = np.full(len(pts), np.inf)
    for s in range(0, len(pts), chunk):
        d = np.hypot(pts[s:s + chunk, None, 0] - fine.x[None, ::4, 0], pts[s:s + chunk, None, 1] - fine.x[None, ::4, 1])
        dist[s:s + chunk] = d.min(1)
    near = dist < 2 * nodes.spacing
    if np.any(near):
        warnings.warn(f"{int(near.sum())} points within two node spacings of the curve", NearBoundaryWarning, stacklevel=2)
    length = float(np.max(fine.speed)) * TWO_PI
    need = np.maximum(n, 2 ** np.ceil(np.log2(np.maximum(6 * length / np.maximum(dist, 1e-12), 1)))).astype(int)
    need = np.minimum(need, max_nodes)
    v = np.zeros(len(pts), complex) if which in ("v", "both") else None
    u = np.zeros((len(pts), 2), complex) if which in ("u", "both") else None
    for m in np.unique(need):
        sel = np.nonzero(need == m)[0]
        nd = curve.nodes(int(m), check=False)
        dens = upsample(density.reshape(3, n), int(m)) * (nd.speed * TWO_PI / m)
        for s in range(0, len(sel), max(1, chunk * 1024 // int(m))):
            idx = sel[s:s + max(1, chunk * 1024 // int(m))]
            if v is not None:
                v[idx] = _eval_v(pts[idx], nd.x, dens[0], k)
            if u is not None:
                u[idx] = _eval_u(pts[idx], nd.x, dens[1:], k * p.tau, p)
    return FieldSample(pts, v, u, near)


# ---------------------------------------------------------------------------
# general-domain localization
# ---------------------------------------------------------------------------

def centroid(curve: BoundaryCurve, n: int = 4096) -> np.ndarray:
    nd = curve.nodes(n, check=False)
    x, d = nd.x, nd.d1
    cr = x[:, 0] * d[:, 1] - x[:, 1] * d[:, 0]
    area = 0.5 * cr.mean() * TWO_PI
    cx = (x[:, 0] * cr).mean() * TWO_PI / 3 / area
    cy = (x[:, 1] * cr).mean() * TWO_PI / 3 / area
    return np.array([cx, cy])


@dataclass(frozen=True)
class PolarGrid:
    """Quadrature on ``c + rho (x(t) - c)``: Gauss-Legendre in ``rho`` split at ``eps``,
    trapezoid in ``t``."""

    curve: BoundaryCurve
    eps: float
    points: np.ndarray
    weights: np.ndarray
    inner: np.ndarray
    center: np.ndarray

    @classmethod
    def build(cls, curve: BoundaryCurve, eps: float, n_t: int = 128, n_rho: int = 12) -> "PolarGrid":
        if not 0 < eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        c = centroid(curve)
        check = curve.nodes(2048, check=False)
        rel = check.x - c
        if np.any(rel[:, 0] * check.d1[:, 1] - rel[:, 1] * check.d1[:, 0] <= 0):
            raise NotStarShaped(f"{curve.name} is not star-shaped about its centroid")
        xg, wg = np.polynomial.legendre.leggauss(n_rho)
        r_in, w_in = eps * (xg + 1) / 2, eps * wg / 2
        r_out, w_out = eps + (1 - eps) * (xg + 1) / 2, (1 - eps) * wg / 2
        rho = np.concatenate([r_in, r_out])
        wr = np.concatenate([w_in, w_out])
        nd = curve.nodes(n_t, check=False)
        rel = nd.x - c
        jac = rel[:, 0] * nd.d1[:, 1] - rel[:, 1] * nd.d1[:, 0]
        pts = c + rho[:, None, None] * rel[None]
        w = (wr * rho)[:, None] * jac[None, :] * (TWO_PI / n_t)
        inner = np.broadcast_to((rho < eps)[:, None], w.shape)
        return cls(curve, eps, pts.reshape(-1, 2), w.ravel(), inner.ravel().copy(), c)


def localization_ratio_general(values: np.ndarray, grid: PolarGrid) -> float:
    """``||f||_{L2(eps Omega)} / ||f||_{L2(Omega)}`` for samples on ``grid.points``."""
    v = np.asarray(values)
    e = np.abs(v) ** 2
    if e.ndim == 2:
        e = e.sum(1)
    tot = float(np.dot(grid.weights, e))
    if tot <= 0:
        raise ValueError("field vanishes on the grid")
    return math.sqrt(float(np.dot(grid.weights[grid.inner], e[grid.inner])) / tot)
