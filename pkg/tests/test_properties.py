"""Invariance and soundness properties on randomized state families."""

import math

import numpy as np
import pytest

from wignermoments import moments, oracle, soundness, states, wigner
from wignermoments.quadrature import QuadratureSpec

PI = math.pi


def test_no_false_certification_on_random_positive_states():
    # a light draw here; the acceptance suite runs the full 200-state batch
    specs = soundness.positive_state_specs(11, gaussians_1=24, gaussians_2=12, mixtures=24)
    assert len(specs) == 60
    for label, spec in specs:
        report = moments.analyze(spec)
        assert report.verdict == "Inconclusive", (label, report.delta)
        # positivity also forces the moment chain w2^2 <= w3 with slack
        assert report.moments[2] ** 2 <= report.moments[3] + 1e-9, label


def test_holder_inequalities_on_random_states():
    specs = soundness.positive_state_specs(5, gaussians_1=6, gaussians_2=3, mixtures=6)
    for label, spec in specs:
        field, _ = moments.field_for(spec, None)
        res = moments.holder_chain_check(field)
        assert res["holder_ok"], label
        assert res["interpolation_ok"], label
        # positive states have total variation ||W||_1 = 1
        assert res["norm_1"] == pytest.approx(1.0, abs=5e-3), label


def test_random_gaussian_closed_form_vs_quadrature():
    rng = np.random.default_rng(42)
    for i in range(50):
        k = 1 if i % 2 == 0 else 2
        spec = soundness.random_gaussian_spec(rng, k)
        state = states.state_from_spec(spec)
        f = wigner.wigner_gaussian(state)
        for m in (2, 3):
            closed = moments.moment_gaussian_closed_form(state, m)
            quad = moments.moment(f, m)
            assert quad == pytest.approx(closed, rel=1e-10), (i, k, m)


def test_purity_identity_fock_states():
    # w2 (2 pi)^k = Tr[rho^2]
    rng = np.random.default_rng(3)
    for i in range(10):
        spec = soundness.random_coherent_mixture_spec(rng)
        state = states.state_from_spec(spec)
        f = wigner.wigner_fock_synthesis(state)
        w2 = moments.moment(f, 2)
        assert w2 * (2.0 * PI) == pytest.approx(
            oracle.trace_power(state, 2), abs=1e-9
        ), i


def test_dilation_preserves_verdict_and_scales_delta():
    rng = np.random.default_rng(17)
    cases = [
        wigner.wigner_analytic(states.Fock(1)),
        wigner.wigner_analytic(states.Fock(3)),
        wigner.wigner_analytic(states.Noon(2, 0.0)),
        wigner.wigner_analytic(states.Spssv(0.5, 1)),
        wigner.wigner_analytic(states.MixedFock01(0.2)),
        wigner.wigner_analytic(states.MixedFock01(0.4)),
        wigner.wigner_analytic(states.Tmsv(0.6)),
        wigner.wigner_analytic(states.Fock(0)),
    ]
    for i in range(12):
        k = 1 if i % 2 == 0 else 2
        spec = soundness.random_gaussian_spec(rng, k)
        cases.append(wigner.wigner_gaussian(states.state_from_spec(spec)))
    for field in cases:
        w2 = moments.moment(field, 2)
        w3 = moments.moment(field, 3)
        delta = w2 * w2 - w3
        base = moments.criterion(w2, w3)
        for c in (0.5, 2.0):
            scaled = wigner.dilate(field, c)
            w2c = moments.moment(scaled, 2)
            w3c = moments.moment(scaled, 3)
            k = field.modes
            # w_m -> c^{2k(m-1)} w_m, so delta -> c^{4k} delta
            assert w2c == pytest.approx(c ** (2 * k) * w2, rel=1e-9), field.label
            assert w3c == pytest.approx(c ** (4 * k) * w3, rel=1e-9, abs=1e-14), field.label
            assert (w2c * w2c - w3c) == pytest.approx(
                c ** (4 * k) * delta, rel=1e-8, abs=1e-13
            ), field.label
            assert moments.criterion(w2c, w3c) == base, (field.label, c)


def test_exactness_order_doubling_is_stable():
    # once past the exactness order, doubling the rule must not move w_m
    for spec in [states.Fock(2), states.Noon(2, 0.0), states.MixedFock01(0.3)]:
        field = wigner.wigner_analytic(spec)
        for m in (2, 3):
            order = moments.exactness_order(field, m)
            a = moments.moment(field, m, QuadratureSpec(order=order))
            b = moments.moment(field, m, QuadratureSpec(order=2 * order))
            assert abs(a - b) < 1e-12 * max(1.0, abs(a)), (spec, m)


def test_generators_are_reproducible():
    a = soundness.positive_state_specs(123, gaussians_1=4, gaussians_2=2, mixtures=4)
    b = soundness.positive_state_specs(123, gaussians_1=4, gaussians_2=2, mixtures=4)
    assert [label for label, _ in a] == [label for label, _ in b]
    for (_, sa), (_, sb) in zip(a, b):
        fa, _ = moments.field_for(sa, None)
        fb, _ = moments.field_for(sb, None)
        pts = np.full((3, 2 * fa.modes), 0.37)
        assert np.array_equal(fa(pts), fb(pts))


def test_mixture_states_are_valid_density_matrices():
    rng = np.random.default_rng(8)
    for _ in range(5):
        spec = soundness.random_coherent_mixture_spec(rng)
        state = states.state_from_spec(spec)
        mat = state.matrix
        assert np.trace(mat).real == pytest.approx(1.0, abs=1e-10)
        assert np.min(np.linalg.eigvalsh(mat)) > -1e-10
