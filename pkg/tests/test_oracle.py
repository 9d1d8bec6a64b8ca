"""Tests for the integrate-the-flow oracle.

These check the oracle's internal consistency (closure at zero strength,
return times, section independence, fit recovery on synthetic data) and its
agreement with the closed-form first-order coefficient on a random draw.
The heavier closed-form comparisons live in the acceptance suite.
"""

import math

import numpy as np
import pytest

from duffing_melnikov.abelian import orbit_period, period_vector
from duffing_melnikov.geometry import Annulus, hamiltonian
from duffing_melnikov.melnikov import PerturbationParams, m1_form, m_eval
from duffing_melnikov.oracle import (
    DEFAULT_EPS_LIST,
    DisplacementSample,
    EscapeError,
    _fit_core,
    displacement,
    displacement_sign,
    flow,
    melnikov_fit,
    oval_section,
    sample_table,
)


@pytest.mark.parametrize("annulus,h", [
    (Annulus.INTERIOR_RIGHT, -0.125),
    (Annulus.EXTERIOR, 1.0),
])
def test_unperturbed_orbit_closes(annulus, h):
    params = PerturbationParams.zero()
    s = displacement(h, 0.0, params, annulus)
    assert abs(s.d) < 1e-11
    assert s.return_time == pytest.approx(orbit_period(h, annulus), rel=1e-9)


def test_section_anchor_is_on_level_set():
    sec = oval_section(-0.1, Annulus.INTERIOR_RIGHT, phase=0.37)
    x, y = sec.point
    assert hamiltonian(x, y) == pytest.approx(-0.1, abs=1e-10)
    assert math.hypot(*sec.normal) == pytest.approx(1.0)


def test_orientation_calibration():
    # the measured displacement orientation must match the loop integrals
    assert displacement_sign() == 1


def test_fit_matches_closed_form_first_order(rng):
    params = PerturbationParams.random(rng, scale=0.5)
    h, annulus = -0.125, Annulus.INTERIOR_RIGHT
    fit = melnikov_fit(h, params, annulus)
    closed = float(np.real(m_eval(m1_form(params, annulus),
                                  h, period_vector(h, annulus))))
    tol = max(2e-5 * abs(closed), 3.0 * fit.m1_err)
    assert abs(fit.m1 - closed) < tol
    assert fit.sign == 1
    assert fit.condition < 1e12
    assert len(fit.samples) == len(DEFAULT_EPS_LIST)


def test_fit_is_section_independent(rng):
    params = PerturbationParams.random(rng, scale=0.5)
    h, annulus = 0.8, Annulus.EXTERIOR
    f0 = melnikov_fit(h, params, annulus)
    f1 = melnikov_fit(h, params, annulus, phase=0.3)
    tol = max(2e-5 * abs(f0.m1), 3.0 * (f0.m1_err + f1.m1_err))
    assert abs(f0.m1 - f1.m1) < tol


def test_residual_scales_linearly_in_eps(rng):
    # d/eps - M1 should shrink like eps (the order-2 term dominates), so the
    # log-log slope of the residual against eps is close to one.
    params = PerturbationParams.random(rng, scale=0.5)
    h, annulus = -0.125, Annulus.INTERIOR_RIGHT
    fit = melnikov_fit(h, params, annulus)
    closed = float(np.real(m_eval(m1_form(params, annulus),
                                  h, period_vector(h, annulus))))
    eps = np.array([s.epsilon for s in fit.samples])
    resid = np.abs(np.array([s.d for s in fit.samples]) / eps - closed)
    slope = np.polyfit(np.log(eps), np.log(resid), 1)[0]
    assert 0.8 <= slope <= 1.2


def test_fit_requires_four_strengths():
    with pytest.raises(ValueError):
        melnikov_fit(-0.125, PerturbationParams.zero(), Annulus.INTERIOR_RIGHT,
                     eps_list=(1e-2, 5e-3))


def test_flow_raises_when_no_return_in_window():
    h, annulus = -0.125, Annulus.INTERIOR_RIGHT
    sec = oval_section(h, annulus)
    with pytest.raises(EscapeError):
        flow(sec.point, PerturbationParams.zero(), 0.0, sec,
             t_min=0.2, t_max=0.3)


def test_fit_core_recovers_synthetic_cubic():
    a1, a2, a3 = 0.37, -1.42, 5.0
    samples = [
        DisplacementSample(h=-0.1, epsilon=e, d=a1 * e + a2 * e ** 2 + a3 * e ** 3,
                           integration_tol=1e-12, return_time=7.0)
        for e in DEFAULT_EPS_LIST
    ]
    coef, err, cond = _fit_core(samples)
    assert coef[0] == pytest.approx(a1, rel=1e-12)
    assert coef[1] == pytest.approx(a2, rel=1e-12)
    assert coef[2] == pytest.approx(a3, rel=1e-10)
    assert np.all(err < 1e-8)
    assert cond < 1e12


def test_sample_table_format():
    samples = [
        DisplacementSample(h=-0.125, epsilon=1e-2, d=3.25e-3,
                           integration_tol=1e-12, return_time=6.9),
        DisplacementSample(h=-0.125, epsilon=5e-3, d=1.6e-3,
                           integration_tol=1e-12, return_time=6.9),
    ]
    text = sample_table(samples)
    lines = text.strip().splitlines()
    assert lines[0].split("\t") == ["h", "epsilon", "d", "return_time"]
    assert len(lines) == 3
    fields = lines[1].split("\t")
    assert float(fields[1]) == 1e-2
    assert float(fields[2]) == 3.25e-3
