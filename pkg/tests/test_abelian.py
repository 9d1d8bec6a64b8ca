"""Tests for the oval integrals, their linear relations, and continuation.

Everything here is cross-checked against direct quadrature: the period
system, the moment reductions, the transported complex values, the
boundary values on the cuts, and the asymptotic constants all have an
independent numerical route, and the tests compare the two.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from duffing_melnikov.abelian import (
    BASE_POINTS,
    MIN_CLEARANCE,
    SADDLE_LOG_I0,
    SADDLE_LOG_I2,
    PathError,
    PoleError,
    RealPeriodTable,
    _check_path,
    _set_pf_tweak,
    asymptotics_check,
    continue_complex,
    cut_values,
    derivative_pair,
    exterior_slope,
    i1_slope,
    monodromy_around_saddle,
    nonvanishing_grid,
    orbit_period,
    oval_integral,
    oval_integral_dh,
    period_vector,
    pf_matrix,
    reduce_moment,
    reduce_y_cubed,
    saddle_constants,
    saddle_log_fit,
    transport_table,
    wronskian_cut,
)
from duffing_melnikov.geometry import Annulus, DomainError

INTERIOR_LEVELS = (-0.23, -0.18, -0.125, -0.07, -0.02)
EXTERIOR_LEVELS = (0.02, 0.2, 1.0, 3.0, 9.0)


def _levels(annulus):
    return EXTERIOR_LEVELS if annulus is Annulus.EXTERIOR else INTERIOR_LEVELS


# ---------------------------------------------------------------------------
# real-annulus basics
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("annulus", list(Annulus))
def test_area_and_period_positive(annulus):
    for h in _levels(annulus):
        assert oval_integral(0, h, annulus) > 0.0
        assert orbit_period(h, annulus) > 0.0


def test_interior_lobes_mirror():
    # x -> -x maps one lobe onto the other: even moments agree, odd flip sign.
    for h in INTERIOR_LEVELS:
        right = period_vector(h, Annulus.INTERIOR_RIGHT)
        left = period_vector(h, Annulus.INTERIOR_LEFT)
        assert right.i0 == pytest.approx(left.i0, rel=1e-12)
        assert right.i2 == pytest.approx(left.i2, rel=1e-12)
        assert right.i1 == pytest.approx(-left.i1, rel=1e-12)


def test_first_moment_is_exactly_linear():
    # On an interior lobe I_1(h) = c (4h + 1) with c = +-sqrt(2) pi / 4.
    slope = i1_slope(Annulus.INTERIOR_RIGHT)
    assert slope == pytest.approx(math.sqrt(2.0) * math.pi / 4.0, rel=1e-11)
    assert i1_slope(Annulus.INTERIOR_LEFT) == pytest.approx(-slope, rel=1e-11)
    for h in INTERIOR_LEVELS:
        i1 = oval_integral(1, h, Annulus.INTERIOR_RIGHT)
        assert i1 == pytest.approx(slope * (4.0 * h + 1.0), rel=1e-11, abs=1e-13)


def test_first_moment_vanishes_on_exterior():
    assert i1_slope(Annulus.EXTERIOR) == 0.0
    for h in EXTERIOR_LEVELS:
        assert abs(oval_integral(1, h, Annulus.EXTERIOR)) < 1e-13


# ---------------------------------------------------------------------------
# the period system and moment reductions
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("annulus", list(Annulus))
def test_period_system_matches_quadrature_derivatives(annulus):
    # derivative_pair reconstructs I_0', I_2' from (I_0, I_2) alone; both
    # derivatives are also directly computable as integrals of x^k / y.
    for h in _levels(annulus):
        pv = period_vector(h, annulus)
        d0, d2 = derivative_pair(h, pv.i0, pv.i2)
        assert complex(d0).imag == 0.0
        assert d0.real == pytest.approx(oval_integral_dh(0, h, annulus), rel=1e-10)
        assert d2.real == pytest.approx(oval_integral_dh(2, h, annulus), rel=1e-10)


@pytest.mark.parametrize("annulus", list(Annulus))
def test_period_system_matches_finite_differences(annulus):
    h = -0.11 if annulus is not Annulus.EXTERIOR else 0.9
    delta = 1e-5
    pv = period_vector(h, annulus)
    d0, d2 = derivative_pair(h, pv.i0, pv.i2)
    fd0 = (oval_integral(0, h + delta, annulus) - oval_integral(0, h - delta, annulus)) / (2 * delta)
    fd2 = (oval_integral(2, h + delta, annulus) - oval_integral(2, h - delta, annulus)) / (2 * delta)
    assert d0.real == pytest.approx(fd0, rel=1e-6)
    assert d2.real == pytest.approx(fd2, rel=1e-6)


@pytest.mark.parametrize("annulus", list(Annulus))
@pytest.mark.parametrize("k", [3, 4, 6])
def test_moment_reductions(annulus, k):
    for h in _levels(annulus)[::2]:
        pv = period_vector(h, annulus)
        direct = oval_integral(k, h, annulus)
        assert complex(reduce_moment(k, h, pv)).real == pytest.approx(
            direct, rel=1e-10, abs=1e-12)


def test_moment_reduction_unknown_k():
    pv = period_vector(-0.125, Annulus.INTERIOR_RIGHT)
    with pytest.raises(ValueError):
        reduce_moment(5, -0.125, pv)


@pytest.mark.parametrize("annulus", [Annulus.INTERIOR_RIGHT, Annulus.EXTERIOR])
def test_y_cubed_reduction(annulus):
    # contour integral of y^3 dx by quadrature: y^3 dx = y^2 * y dx, and
    # y^2 = 2(h + x^2/2 - x^4/4) on the level set, so it reduces to moments.
    for h in _levels(annulus)[1::2]:
        pv = period_vector(h, annulus)
        direct = (2.0 * h * oval_integral(0, h, annulus)
                  + oval_integral(2, h, annulus)
                  - 0.5 * oval_integral(4, h, annulus))
        assert complex(reduce_y_cubed(h, pv)).real == pytest.approx(direct, rel=1e-10)


@settings(max_examples=10)
@given(h=st.floats(-0.24, -0.01))
def test_moment_reduction_property_interior(h):
    pv = period_vector(h, Annulus.INTERIOR_RIGHT)
    direct = oval_integral(4, h, Annulus.INTERIOR_RIGHT)
    assert complex(reduce_moment(4, h, pv)).real == pytest.approx(direct, rel=1e-9)


# ---------------------------------------------------------------------------
# poles and path validation
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("h", [0.0, -0.25])
def test_system_matrix_pole(h):
    with pytest.raises(PoleError):
        pf_matrix(h)


def test_system_matrix_entries():
    m = pf_matrix(1.0)
    assert m.a.shape == (2, 2)
    assert m.a[0, 0] == pytest.approx((12.0 + 4.0) / 20.0)
    assert m.a[1, 1] == pytest.approx(1.0)


def test_path_through_pole_rejected():
    with pytest.raises(PathError):
        _check_path([complex(-0.125), complex(0.5)])
    with pytest.raises(PathError):
        _check_path([complex(-0.25, 0.3), complex(-0.25, -0.3)])


def test_path_at_exact_clearance_allowed():
    # A segment passing at exactly the minimum clearance must not raise:
    # the comparison has a one-sided tolerance for this boundary case.
    _check_path([complex(-0.125, MIN_CLEARANCE), complex(0.5, MIN_CLEARANCE)])


def test_transport_needs_real_start_inside_annulus():
    with pytest.raises(PathError):
        transport_table([0.5 + 0.1j, 1.0], Annulus.EXTERIOR)
    with pytest.raises(PathError):
        transport_table([-0.125, 1.0 + 1.0j], Annulus.EXTERIOR)  # wrong annulus interval


def test_transport_needs_two_vertices():
    with pytest.raises(ValueError):
        transport_table([1.0], Annulus.EXTERIOR)


# ---------------------------------------------------------------------------
# complex continuation
# ---------------------------------------------------------------------------


def test_continuation_at_base_point_is_quadrature():
    base = BASE_POINTS[Annulus.EXTERIOR]
    pv = continue_complex(base, annulus=Annulus.EXTERIOR)
    ref = period_vector(base, Annulus.EXTERIOR)
    assert pv.i0 == pytest.approx(ref.i0, rel=1e-12)
    assert pv.i2 == pytest.approx(ref.i2, rel=1e-12)


def test_continuation_reaches_real_levels():
    # Transporting along the real axis must agree with direct quadrature.
    for h in (0.3, 2.0, 8.0):
        pv = continue_complex(h, annulus=Annulus.EXTERIOR)
        ref = period_vector(h, Annulus.EXTERIOR)
        assert abs(pv.i0 - ref.i0) < 1e-9 * abs(ref.i0)
        assert abs(pv.i2 - ref.i2) < 1e-9 * abs(ref.i2)
    for h in (-0.2, -0.05):
        pv = continue_complex(h, annulus=Annulus.INTERIOR_RIGHT)
        ref = period_vector(h, Annulus.INTERIOR_RIGHT)
        assert abs(pv.i0 - ref.i0) < 1e-9 * abs(ref.i0)


def test_continuation_is_path_independent():
    target = 2.0 + 1.0j
    direct = continue_complex(target, annulus=Annulus.EXTERIOR)
    detour = continue_complex(
        target, path=[1.0, 3.0, 3.0 + 2.0j, target], annulus=Annulus.EXTERIOR)
    assert abs(direct.i0 - detour.i0) < 1e-9 * abs(direct.i0)
    assert abs(direct.i2 - detour.i2) < 1e-9 * abs(direct.i2)


def test_continuation_round_trip_without_poles():
    # A closed loop that encloses neither singular level is trivial.
    base = BASE_POINTS[Annulus.EXTERIOR]
    loop = [base, 2.0 + 0.5j, 3.0, 2.0 - 0.5j, base]
    table = transport_table(loop, Annulus.EXTERIOR)
    h_end, i0, _, i2 = table.end_values()
    ref = period_vector(base, Annulus.EXTERIOR)
    assert abs(h_end - base) < 1e-14
    assert abs(i0 - ref.i0) < 1e-9 * abs(ref.i0)
    assert abs(i2 - ref.i2) < 1e-9 * abs(ref.i2)


def test_continuation_path_must_end_at_target():
    with pytest.raises(ValueError):
        continue_complex(2.0, path=[1.0, 3.0], annulus=Annulus.EXTERIOR)


def test_transport_table_dense_values():
    table = transport_table([1.0, 2.0 + 1.0j], Annulus.EXTERIOR)
    h, i0, i1, i2 = table.values_at([0.0, 0.5, 1.0])
    assert h[0] == pytest.approx(1.0)
    assert h[-1] == pytest.approx(2.0 + 1.0j)
    assert np.all(i1 == 0.0)  # exterior first moment
    end = continue_complex(2.0 + 1.0j, annulus=Annulus.EXTERIOR)
    assert abs(i0[-1] - end.i0) < 1e-10 * abs(end.i0)
    assert abs(i2[-1] - end.i2) < 1e-10 * abs(end.i2)


def test_corruption_hook_is_reversible():
    target = 2.0 + 1.0j
    clean = continue_complex(target, annulus=Annulus.EXTERIOR)
    try:
        _set_pf_tweak(1e-3)
        bad = continue_complex(target, annulus=Annulus.EXTERIOR)
    finally:
        _set_pf_tweak(0.0)
    assert abs(bad.i0 - clean.i0) > 1e-6
    again = continue_complex(target, annulus=Annulus.EXTERIOR)
    assert abs(again.i0 - clean.i0) < 1e-12 * abs(clean.i0)


# ---------------------------------------------------------------------------
# monodromy and cut structure
# ---------------------------------------------------------------------------


def test_saddle_monodromy_matches_log_series():
    radius = 0.02
    d0, d2 = monodromy_around_saddle(radius=radius)
    h = -radius

    def series(coeffs):
        return sum(c * h ** k for k, c in enumerate(coeffs))

    assert d0.real == pytest.approx(series(SADDLE_LOG_I0), abs=3e-9)
    # the stored I_2 series is shorter, so its truncation dominates here
    assert d2.real == pytest.approx(series(SADDLE_LOG_I2), abs=5e-6)
    assert abs(d0.imag) < 1e-9
    assert abs(d2.imag) < 1e-9


@pytest.mark.parametrize("annulus,h", [
    (Annulus.INTERIOR_RIGHT, 0.5),
    (Annulus.EXTERIOR, -0.6),
])
def test_cut_boundary_values_are_conjugate(annulus, h):
    # Real coefficients force the two boundary values to be conjugates;
    # both sides are computed independently, so this is a real check.
    plus, minus = cut_values(h, annulus)
    assert abs(plus.i0 - np.conj(minus.i0)) < 1e-8 * abs(plus.i0)
    assert abs(plus.i2 - np.conj(minus.i2)) < 1e-8 * max(abs(plus.i2), 1.0)


def test_cut_values_reject_off_cut_levels():
    with pytest.raises(DomainError):
        cut_values(-0.5, Annulus.INTERIOR_RIGHT)
    with pytest.raises(DomainError):
        cut_values(0.5, Annulus.EXTERIOR)


def test_wronskian_is_constant_multiple_on_each_interval():
    # W / (h (4h+1)) is locally constant on the exterior cut and purely
    # imaginary; crossing h = -1/4 doubles it.
    def scaled(h):
        return wronskian_cut(h) / (h * (4.0 * h + 1.0))

    outer = [scaled(h) for h in (-1.5, -0.8, -0.4)]
    inner = [scaled(h) for h in (-0.2, -0.1, -0.06)]
    for w in outer + inner:
        assert abs(w.real) < 1e-6 * abs(w)
    assert abs(outer[0] - outer[-1]) < 1e-6 * abs(outer[0])
    assert abs(inner[0] - inner[-1]) < 1e-6 * abs(inner[0])
    ratio = inner[0].imag / outer[0].imag
    assert ratio == pytest.approx(2.0, abs=1e-6)


# ---------------------------------------------------------------------------
# dense real tables
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("annulus", [Annulus.INTERIOR_RIGHT, Annulus.EXTERIOR])
def test_real_table_matches_quadrature(annulus):
    table = RealPeriodTable(annulus)
    for h in _levels(annulus):
        i0, i1, i2 = (float(v[0]) for v in table.values(h))
        pv = period_vector(h, annulus)
        assert i0 == pytest.approx(float(pv.i0.real), rel=1e-9)
        assert i1 == pytest.approx(float(pv.i1.real), rel=1e-9, abs=1e-12)
        assert i2 == pytest.approx(float(pv.i2.real), rel=1e-9)


def test_real_table_rejects_outside_range():
    table = RealPeriodTable(Annulus.EXTERIOR, h_min=0.5, h_max=2.0)
    with pytest.raises(DomainError):
        table.values(3.0)
    with pytest.raises(ValueError):
        RealPeriodTable(Annulus.EXTERIOR, h_min=2.0, h_max=3.0)  # excludes base point


# ---------------------------------------------------------------------------
# asymptotics
# ---------------------------------------------------------------------------


def test_saddle_constants():
    i0c, i2c = saddle_constants()
    assert i0c == pytest.approx(4.0 / 3.0, abs=1e-6)
    assert i2c == pytest.approx(16.0 / 15.0, abs=1e-6)


def test_saddle_log_coefficients():
    a1, a2 = saddle_log_fit()
    assert a1 == pytest.approx(-1.0, abs=1e-6)
    assert a2 == pytest.approx(0.375, abs=1e-4)


def test_exterior_growth_exponent():
    slope, amp = exterior_slope()
    assert slope == pytest.approx(0.75, abs=1e-3)
    assert amp > 0.0
    naive, _ = exterior_slope(corrected=False)
    # the corrected fit must actually improve on the plain log-log slope
    assert abs(slope - 0.75) < abs(naive - 0.75)


def test_asymptotics_report_clean():
    report = asymptotics_check()
    assert report.failures() == []
    assert report.failures(const_tol=1e-12)  # unattainable tolerance trips it


def test_nonvanishing_survey():
    min_i0, min_d0, rows = nonvanishing_grid(R=4.0, n_radial=6, n_angular=8)
    assert min_i0 > 1e-6
    assert min_d0 > 1e-6
    assert len(rows) == 6 * 8
