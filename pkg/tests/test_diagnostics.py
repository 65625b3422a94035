import numpy as np
import pytest
from scipy.integrate import quad

from wavepatterns.composite import build_composite, eval_composite
from wavepatterns.diagnostics import (
    HeatKernelWeight,
    NormTracker,
    apriori_ratio,
    decay_fit,
    eventually_nonincreasing,
    norms,
    perturbation,
    phi_function,
    quadratic_entropy,
    relative_entropy,
    weight_eval,
    weighted_norms,
)
from wavepatterns.errors import DiagnosticError
from wavepatterns.gas import GasParams, ThermoState
from wavepatterns.riemann import build_forward, decompose
from wavepatterns.solver import FieldState

P = GasParams()
ZL = ThermoState(1.0, 0.0, 1.0)


@pytest.fixture(scope="module")
def wave():
    zr = build_forward(P, ZL, 1.01, 1.08, 1.1).z_plus
    return build_composite(P, decompose(P, ZL, zr))


def composite_state(wave, t=3.0, dx=0.2, L=100.0):
    x = np.arange(-L, L + dx / 2, dx)
    f = eval_composite(wave, P, x, t)
    return FieldState(t, x, f.V.copy(), f.U.copy(), f.Theta.copy())


def test_zero_perturbation(wave):
    st = composite_state(wave)
    snap = perturbation(st, wave, P)
    nv = norms(snap)
    assert nv.L2 == nv.H2 == nv.sup == nv.dissipation == 0.0
    assert relative_entropy(st, wave, P) == 0.0


def test_bump_in_velocity_only(wave):
    st = composite_state(wave)
    bump = 0.01 * np.exp(-st.x ** 2)
    st.u = st.u + bump
    snap = perturbation(st, wave, P)
    assert np.allclose(snap.psi, bump, rtol=0, atol=1e-16)
    assert np.all(snap.phi == 0) and np.all(snap.xi == 0)


def test_gaussian_l2_closed_form(wave):
    st = composite_state(wave)
    st.v = st.v + np.exp(-(st.x / 2.0) ** 2)
    exact = (np.pi / 2) ** 0.25 * np.sqrt(2.0)
    assert norms(perturbation(st, wave, P)).L2 == pytest.approx(exact, rel=5e-3)


def test_h1_of_sine(wave):
    k, dx = 0.5, 0.2
    L = 40 * np.pi                       # whole periods of sin(0.5 x)
    x = np.arange(-L, L + dx / 2, dx)
    st = composite_state(wave, dx=dx, L=L)
    st.theta = st.theta + 0.01 * np.sin(k * x)
    nv = norms(perturbation(st, wave, P))
    assert nv.H1 ** 2 == pytest.approx((1 + k * k) * nv.L2 ** 2, rel=1e-2)


def test_sup_is_grid_max(wave):
    st = composite_state(wave)
    rng = np.random.default_rng(1)
    d = 1e-3 * rng.standard_normal(st.x.size)
    st.theta = st.theta + d
    assert norms(perturbation(st, wave, P)).sup == pytest.approx(np.max(np.abs(d)), rel=1e-9)


def test_grid_mismatch(wave):
    st = composite_state(wave)
    st.v = st.v[:-1]
    with pytest.raises(DiagnosticError):
        perturbation(st, wave, P)


def test_phi_function():
    assert phi_function(1.0) == 0.0
    s = np.array([0.2, 0.9, 1 + 1e-9, 3.0])
    assert np.all(phi_function(s) > 0)
    assert phi_function(1 + 1e-6) == pytest.approx(0.5e-12, rel=1e-5)


@pytest.mark.parametrize("eps", [1e-2, 1e-3])
def test_entropy_quadratic_equivalence(wave, eps):
    st = composite_state(wave)
    g = np.exp(-(st.x / 3) ** 2)
    st.v, st.u, st.theta = st.v + eps * g, st.u - eps * g, st.theta + 0.5 * eps * g
    snap = perturbation(st, wave, P)
    ratio = relative_entropy(st, wave, P) / quadratic_entropy(snap, P)
    assert 0.1 <= ratio <= 10


def test_entropy_positive_for_volume_only(wave):
    st = composite_state(wave)
    st.v = st.v * (1 + 1e-4 * np.exp(-st.x ** 2))
    assert relative_entropy(st, wave, P) > 0


def test_heat_kernel_sup_printed():
    for alpha in (1.0, 0.5, 3.0):
        w = HeatKernelWeight(alpha)
        for t in (0.0, 5.0, 100.0):
            _, g = weight_eval(w, 1e6, t)
            assert g == pytest.approx(np.sqrt(np.pi / alpha), rel=1e-10)
    _, g = weight_eval(HeatKernelWeight(1.0), 1e6, 3.0)
    assert g == pytest.approx(1.7724538509055159, rel=1e-12)


def test_heat_kernel_sup_raw():
    _, g = weight_eval(HeatKernelWeight(1.0, "raw"), 1e6, 3.0)
    assert g == pytest.approx(np.sqrt(np.pi * 4.0), rel=1e-10)


def test_heat_kernel_identity():
    x, t = np.meshgrid(np.linspace(-6, 6, 200), np.linspace(0.5, 20, 10), indexing="ij")
    h = 2e-4
    for alpha in (1.0, 0.7):
        for norm, ok in (("printed", True), ("raw", False)):
            w = HeatKernelWeight(alpha, norm)
            g_t = (weight_eval(w, x, t + h)[1] - weight_eval(w, x, t - h)[1]) / (2 * h)
            g_xx = (weight_eval(w, x + h, t)[1] - 2 * weight_eval(w, x, t)[1]
                    + weight_eval(w, x - h, t)[1]) / h ** 2
            err = np.max(np.abs(4 * alpha * g_t - g_xx))
            assert (err < 1e-7) == ok


def test_omega_at_origin():
    for t in (0.0, 1.0, 37.0):
        om, _ = weight_eval(HeatKernelWeight(2.0), 0.0, t)
        assert om * np.sqrt(1 + t) == pytest.approx(1.0, rel=1e-15)


def test_g_is_primitive_of_omega():
    w = HeatKernelWeight(1.3)
    om = lambda y: weight_eval(w, y, 4.0)[0]
    for x in (-2.0, 0.0, 1.5):
        assert weight_eval(w, x, 4.0)[1] == pytest.approx(quad(om, -np.inf, x, epsabs=1e-13)[0], rel=1e-10)


def test_weighted_norms(wave):
    st = composite_state(wave, t=0.0, dx=0.01, L=30.0)
    snap = perturbation(st, wave, P)
    assert weighted_norms(snap, HeatKernelWeight(), P) == (0.0, 0.0, 0.0)
    gauss = np.exp(-snap.x ** 2 / 4)
    snap.phi = gauss.copy()
    snap.xi = gauss.copy()
    w1, w2, _ = weighted_norms(snap, HeatKernelWeight(1.0), GasParams(R=1.0), P=np.ones_like(snap.x))
    assert w2 == 0.0
    snap.xi = np.zeros_like(gauss)
    w1, _, _ = weighted_norms(snap, HeatKernelWeight(1.0), P)
    ref = quad(lambda y: np.exp(-2 * y * y) * np.exp(-y * y / 2), -np.inf, np.inf, epsabs=1e-14)[0]
    assert w1 == pytest.approx(ref, abs=1e-6)


def test_tracker_and_ratio(wave):
    tracker = NormTracker(delta=0.1)
    for k, t in enumerate((0.0, 1.0, 2.0, 3.0)):
        st = composite_state(wave, t=t)
        st.u = st.u + 0.01 * np.exp(-(st.x - k) ** 2) * (1 + 0.3 * k)
        tracker.update(st, wave, P)
    recs = tracker.records
    r0 = recs[0]
    assert r0.ratio == pytest.approx(r0.H2 ** 2 / (r0.H2 ** 2 + 0.1)) and r0.ratio < 1
    ratios = apriori_ratio(recs, 0.1)
    assert all(b >= a for a, b in zip(ratios, ratios[1:]))
    assert all(b.N >= a.N for a, b in zip(recs, recs[1:]))
    for r in recs:
        vals = [r.L2, r.H1, r.H2, r.sup, r.dissipation, r.dissipation_integral, r.N, r.entropy,
                *r.weighted, *r.weighted_integrals]
        assert all(np.isfinite(v) and v >= 0 for v in vals)


def test_ratio_undefined_for_zero_denominator(wave):
    tracker = NormTracker(delta=0.0)
    tracker.update(composite_state(wave), wave, P)
    assert tracker.records[0].ratio is None
    assert apriori_ratio(tracker.records, 0.0) == [None]


def test_decay_fit_examples():
    t = np.linspace(0, 200, 41)
    assert decay_fit(t, (1 + t) ** -1.0).exponent == pytest.approx(-1.0, abs=1e-10)
    assert decay_fit(t, np.full_like(t, 3.0)).exponent == 0.0
    y = (1 + t) ** -0.875 * (2 + np.sin(t)) / 2
    assert decay_fit(t, y, window=(50, 200)).exponent == pytest.approx(-0.875, abs=0.1)


def test_decay_fit_errors():
    with pytest.raises(DiagnosticError):
        decay_fit(np.arange(5.0), np.ones(5))
    with pytest.raises(DiagnosticError):
        decay_fit(np.arange(10.0), np.r_[np.ones(9), 0.0])


def test_eventually_nonincreasing():
    assert eventually_nonincreasing([5, 1, 1.0, 0.9, 0.92, 0.9])
    assert not eventually_nonincreasing([1, 1, 1, 1.0, 1.2, 1.3])
