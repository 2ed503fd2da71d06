import json
import math
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aetrans.params import NondimParams, ParameterError, PhysicalMedium, nondimensionalize, wavenumbers


def _quiet(m):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return nondimensionalize(m)


def test_unit_medium():
    p = _quiet(PhysicalMedium(1, 1, 1, 1, 1))
    assert p.delta == 1 and p.lam == pytest.approx(1 / 3) and p.mu == pytest.approx(1 / 3)
    assert p.tau == pytest.approx(1 / math.sqrt(3))


def test_dense_fluid_medium():
    p = nondimensionalize(PhysicalMedium(rho_b=20, rho_e=1, kappa=1, lambda_t=1, mu_t=1))
    assert p.delta == 20
    assert p.tau == pytest.approx(math.sqrt(1 / 20) / math.sqrt(3), rel=1e-15)


def test_negative_lambda_in_3d():
    p = _quiet(PhysicalMedium(1, 1, 1, lambda_t=-0.4, mu_t=1, dim=3))
    assert p.lam == pytest.approx(-0.25) and p.mu == pytest.approx(0.625)


@pytest.mark.parametrize(
    "kw",
    [
        dict(rho_b=0, rho_e=1, kappa=1, lambda_t=1, mu_t=1),
        dict(rho_b=1, rho_e=-1, kappa=1, lambda_t=1, mu_t=1),
        dict(rho_b=1, rho_e=1, kappa=1, lambda_t=1, mu_t=0),
        dict(rho_b=1, rho_e=1, kappa=1, lambda_t=-1, mu_t=1, dim=2),
        dict(rho_b=1, rho_e=1, kappa=1, lambda_t=-0.7, mu_t=1, dim=3),
        dict(rho_b=1, rho_e=1, kappa=1, lambda_t=1, mu_t=1, l_omega=0),
    ],
)
def test_invalid_media(kw):
    with pytest.raises(ParameterError):
        PhysicalMedium(**kw)


def test_tau_above_one_is_flagged():
    with pytest.warns(UserWarning):
        p = nondimensionalize(PhysicalMedium(rho_b=1, rho_e=10, kappa=1, lambda_t=1, mu_t=1))
    assert p.tau > 1 and not p.in_localization_regime


def test_nondim_constraint():
    with pytest.raises(ParameterError):
        NondimParams(delta=0.1, tau=0.5, lam=0.5, mu=0.5)
    p = NondimParams.from_tau_mu(0.5, 1 / 3, 0.1)
    assert p.lam + 2 * p.mu == pytest.approx(1, abs=1e-15)


def test_json_roundtrip(tmp_path):
    f = tmp_path / "m.json"
    f.write_text(json.dumps(dict(rho_b=2, rho_e=3, kappa=4, lambda_t=5, mu_t=6)))
    assert PhysicalMedium.from_json(f).mu_t == 6


def test_wavenumbers():
    w = wavenumbers(1.0, NondimParams(0.1, 0.5, 0.5, 0.25))
    assert (w.k_p, w.k_s) == (0.5, 1.0)
    w = wavenumbers(10.0, NondimParams.from_tau_mu(1 / math.sqrt(3), 1 / 3, 1.0))
    assert w.k_p == pytest.approx(10 / math.sqrt(3)) and w.k_s == pytest.approx(10)
    with pytest.raises(ValueError):
        wavenumbers(0.0, NondimParams.from_tau_mu(0.5, 0.3, 0.1))


media = st.builds(
    PhysicalMedium,
    rho_b=st.floats(1e-3, 1e3),
    rho_e=st.floats(1e-3, 1e3),
    kappa=st.floats(1e-3, 1e3),
    lambda_t=st.floats(0, 1e3),
    mu_t=st.floats(1e-3, 1e3),
)


@settings(max_examples=100, deadline=None)
@given(m=media, c=st.floats(1e-3, 1e3))
def test_scaling_invariance(m, c):
    p = _quiet(m)
    q = _quiet(PhysicalMedium(c * m.rho_b, c * m.rho_e, c * m.kappa, c * m.lambda_t, c * m.mu_t))
    for a, b in zip((p.delta, p.tau, p.lam, p.mu), (q.delta, q.tau, q.lam, q.mu)):
        assert a == pytest.approx(b, rel=1e-12, abs=1e-15)
    assert p.lam + 2 * p.mu == pytest.approx(1, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(tau=st.floats(0.01, 0.99), mu=st.floats(0.01, 0.5), k=st.floats(1e-3, 1e3))
def test_compressional_below_acoustic(tau, mu, k):
    w = wavenumbers(k, NondimParams.from_tau_mu(tau, mu, 1.0))
    assert w.k_p < k
    assert w.k_s == pytest.approx(w.k_p / math.sqrt(mu))
