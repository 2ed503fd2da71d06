import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sp

from aetrans.eigfun import (
    DegenerateCoupling,
    Field,
    build_eigenpair,
    eval_fields,
    l2_norms,
    localization_ratio,
    radial_integrands,
)
from aetrans.params import NondimParams
from aetrans.radial import EigRecord, ModeIndex, find_eigenvalue
from aetrans.specfun import assoc_legendre, bessel_zero, phi

P = NondimParams.from_tau_mu(0.5, 1 / 3, 0.1)


def pair(dim, m, alpha=1.0, l=0):
    return build_eigenpair(find_eigenvalue(ModeIndex(dim, m), P), alpha=alpha, l=l)


def simpson(f, a, b, n=100_000):
    x = np.linspace(a, b, n + 1)
    y = f(x)
    h = (b - a) / n
    return h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())


def test_beta_against_mpmath():
    pr = pair(2, 50)
    with mp.workdps(40):
        k = mp.mpf(pr.k)
        kp = k * mp.mpf(P.tau)
        ref = kp * k * mp.besselj(50, kp, derivative=1) / mp.besselj(50, k, derivative=1)
    assert pr.beta.real == pytest.approx(float(ref), rel=1e-10)


def test_beta_at_unit_contrast():
    p1 = NondimParams.from_tau_mu(1.0, 1 / 3, 0.1)
    rec = EigRecord(ModeIndex(2, 5), 9.3, (0, 0), 0, 0, p1)
    assert build_eigenpair(rec, alpha=1.0).beta == pytest.approx(9.3**2, rel=1e-13)


def test_beta_linear_in_alpha():
    rec = find_eigenvalue(ModeIndex(3, 30), P)
    a = build_eigenpair(rec, alpha=1 - 2j, l=4)
    b = build_eigenpair(rec, alpha=2 * (1 - 2j), l=4)
    assert b.beta == pytest.approx(2 * a.beta, rel=1e-15)


def test_build_errors():
    rec = find_eigenvalue(ModeIndex(3, 10), P)
    with pytest.raises(ValueError):
        build_eigenpair(rec, alpha=0)
    with pytest.raises(ValueError):
        build_eigenpair(rec, l=11)
    k = bessel_zero(5, "jp", 1)
    with pytest.raises(DegenerateCoupling):
        build_eigenpair(EigRecord(ModeIndex(2, 5), k, (0, 0), 0, 0, P))


def test_origin_and_domain():
    pr = pair(2, 20)
    u, v = eval_fields(pr, [0.0, 0.0])
    assert v == 0 and np.all(u == 0)
    with pytest.raises(ValueError):
        eval_fields(pr, [0.9, 0.5])
    with pytest.raises(ValueError):
        eval_fields(pr, [0.1, 0.1, 0.1])


def test_rotation_equivariance():
    pr = pair(2, 20)
    r, th, ph = 0.8, 0.37, 0.9
    _, v0 = eval_fields(pr, [r * math.cos(th), r * math.sin(th)])
    _, v1 = eval_fields(pr, [r * math.cos(th + ph), r * math.sin(th + ph)])
    assert v1 == pytest.approx(cmath.exp(1j * 20 * ph) * v0, rel=1e-12)


def _laplacian(f, x, h):
    x = np.asarray(x, float)
    c = f(x)
    acc = -2 * len(x) * c
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        acc = acc + f(x + e) + f(x - e)
    return acc / (h * h), c


@pytest.mark.parametrize("dim,m", [(2, 20), (2, 50), (3, 15)])
def test_helmholtz_residual(dim, m):
    pr = pair(dim, m, l=3 if dim == 3 else 0)
    rng = np.random.default_rng(1)
    for _ in range(5):
        x = rng.normal(size=dim)
        x *= rng.uniform(0.75, 0.95) / np.linalg.norm(x)
        lap, v = _laplacian(lambda y: eval_fields(pr, y)[1], x, 1e-4)
        assert abs(lap + pr.k**2 * v) <= 1e-4 * pr.k**2 * abs(v)


@pytest.mark.parametrize("dim,m", [(2, 20), (3, 12)])
def test_elastic_residual(dim, m):
    # u is a pure gradient, so L u + k^2 tau^2 u reduces to Laplace(u) + k_p^2 u
    pr = pair(dim, m, l=2 if dim == 3 else 0)
    rng = np.random.default_rng(2)
    for _ in range(5):
        x = rng.normal(size=dim)
        x *= rng.uniform(0.8, 0.95) / np.linalg.norm(x)
        lap, u = _laplacian(lambda y: eval_fields(pr, y)[0], x, 1e-4)
        assert np.linalg.norm(lap + pr.k_p**2 * u) <= 1e-4 * pr.k_p**2 * np.linalg.norm(u)


def test_3d_field_is_gradient_of_potential():
    pr = pair(3, 9, alpha=0.7, l=4)
    m, l, kp = 9, 4, pr.k_p

    def psi(x):
        r = np.linalg.norm(x)
        th = math.acos(x[2] / r)
        ph = math.atan2(x[1], x[0])
        return pr.alpha * sp.spherical_jn(m, kp * r) * assoc_legendre(m, l, math.cos(th))[0] * cmath.exp(1j * l * ph) / kp

    x = np.array([0.3, -0.5, 0.55])
    h = 1e-6
    grad = np.array([(psi(x + h * e) - psi(x - h * e)) / (2 * h) for e in np.eye(3)])
    u, _ = eval_fields(pr, x)
    assert np.allclose(u, grad, rtol=1e-6, atol=1e-8 * np.linalg.norm(grad))


@pytest.mark.parametrize("dim", [2, 3])
def test_normal_displacement_condition(dim):
    pr = pair(dim, 25, l=1 if dim == 3 else 0)
    x = np.ones(dim) / math.sqrt(dim)
    u, _ = eval_fields(pr, x)
    h = 1e-5
    f0, f1, f2 = (eval_fields(pr, x * (1 - j * h))[1] for j in range(3))
    dr = (3 * f0 - 4 * f1 + f2) / (2 * h)
    assert np.dot(u, x) == pytest.approx(dr / pr.k**2, rel=1e-5)


@pytest.mark.parametrize("dim,m", [(2, 50), (3, 30)])
def test_norms_against_simpson(dim, m):
    pr = pair(dim, m, alpha=1.3, l=2 if dim == 3 else 0)
    gv, gu = radial_integrands(pr)
    nv, nu = l2_norms(pr, 0.5)
    assert nv == pytest.approx(simpson(gv, 0, 0.5), rel=1e-6)
    assert nu == pytest.approx(simpson(gu, 1e-12, 0.5), rel=1e-6)


def test_integrand_matches_pointwise_fields():
    # angular average of |v|^2 and |u|^2 on a circle equals the radial density / r
    pr = pair(2, 20)
    gv, gu = radial_integrands(pr)
    r = 0.9
    th = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    fv = fu = 0.0
    for t in th:
        u, v = eval_fields(pr, [r * math.cos(t), r * math.sin(t)])
        fv += abs(v) ** 2
        fu += np.vdot(u, u).real
    assert 2 * np.pi * r * fv / 64 == pytest.approx(gv(r), rel=1e-12)
    assert 2 * np.pi * r * fu / 64 == pytest.approx(gu(r), rel=1e-12)


@pytest.mark.parametrize("dim", [2, 3])
def test_norm_additivity(dim):
    pr = pair(dim, 40)
    a = l2_norms(pr, 0.5)
    b = l2_norms(pr, 1.0, lo=0.5)
    c = l2_norms(pr, 1.0)
    for i in range(2):
        assert a[i] + b[i] == pytest.approx(c[i], rel=1e-8)
    with pytest.raises(ValueError):
        l2_norms(pr, 1.5)


def test_ratio_against_dense_oracle():
    pr = pair(2, 50)
    gv, _ = radial_integrands(pr)
    ref = math.sqrt(simpson(gv, 0, 0.5) / simpson(gv, 0, 1))
    assert localization_ratio(pr, 0.5, "acoustic").ratio == pytest.approx(ref, rel=1e-6)


@pytest.mark.parametrize("dim", [2, 3])
def test_ratio_tends_to_one(dim):
    pr = pair(dim, 40)
    for f in Field:
        assert localization_ratio(pr, 1 - 1e-6, f).ratio == pytest.approx(1, abs=1e-2)
    assert localization_ratio(pr, 0.999, Field.ACOUSTIC).ratio == pytest.approx(1, abs=1e-2)
    with pytest.raises(ValueError):
        localization_ratio(pr, 1.0, "acoustic")


def test_elastic_boundary_layer_at_0999():
    # the elastic field piles up within ~1/m of the boundary, so eps = 0.999 still
    # leaves a few percent of its energy outside
    r = [localization_ratio(pair(2, m), 0.999, Field.ELASTIC).ratio for m in (20, 40, 80)]
    assert all(0.9 < x < 1 for x in r) and r[0] > r[1] > r[2]


@pytest.mark.parametrize("dim", [2, 3])
@pytest.mark.parametrize("field", list(Field))
def test_monotone_decay_and_localization(dim, field):
    ratios = [localization_ratio(pair(dim, m), 0.5, field).ratio for m in range(20, 101, 10)]
    assert all(0 <= r <= 1 for r in ratios)
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] < 1e-6


def test_3d_ratio_independent_of_l():
    rec = find_eigenvalue(ModeIndex(3, 20), P)
    r0 = localization_ratio(build_eigenpair(rec, l=0), 0.6, "elastic").ratio
    r7 = localization_ratio(build_eigenpair(rec, l=7), 0.6, "elastic").ratio
    assert r7 == pytest.approx(r0, rel=1e-10)


def test_acoustic_log_slope_against_phi():
    # per-order decay of ratio^2 lies between 2 log phi(eps) and 2 log phi(eps k_m / m)
    eps = 0.5
    ms = (20, 40, 80, 160)
    recs = {m: find_eigenvalue(ModeIndex(2, m), P) for m in ms}
    lr = {m: 2 * math.log(localization_ratio(build_eigenpair(r), eps, "acoustic").ratio) for m, r in recs.items()}
    slopes = []
    for a, b in zip(ms, ms[1:]):
        slope = (lr[b] - lr[a]) / (b - a)
        assert 2 * math.log(phi(eps)) < slope <= 2 * math.log(phi(eps * recs[a].k / a))
        slopes.append(slope)
    assert all(x > y for x, y in zip(slopes, slopes[1:]))


@settings(max_examples=20, deadline=None)
@given(
    re=st.floats(-10, 10).filter(lambda x: abs(x) > 1e-3),
    im=st.floats(-10, 10),
    eps=st.floats(0.05, 0.95),
)
def test_amplitude_invariance(re, im, eps):
    rec = find_eigenvalue(ModeIndex(2, 30), P)
    a = localization_ratio(build_eigenpair(rec, alpha=1.0), eps, "elastic").ratio
    b = localization_ratio(build_eigenpair(rec, alpha=complex(re, im)), eps, "elastic").ratio
    assert b == pytest.approx(a, rel=1e-9)


@settings(max_examples=20, deadline=None)
@given(e1=st.floats(0.05, 0.95), e2=st.floats(0.05, 0.95), field=st.sampled_from(list(Field)))
def test_ratio_nondecreasing_in_eps(e1, e2, field):
    pr = pair(2, 30)
    lo, hi = sorted((e1, e2))
    assert localization_ratio(pr, lo, field).ratio <= localization_ratio(pr, hi, field).ratio * (1 + 1e-10)
