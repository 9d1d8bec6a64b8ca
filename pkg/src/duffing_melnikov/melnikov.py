"""First- and second-order Melnikov functions of the perturbed oscillator.

The perturbation is

    x' = y + eps f(x, y),   y' = x - x^3 + eps g(x, y),

where f and g are cubic polynomials over the monomial basis MONOMIALS and
each coefficient is itself linear in eps (a first and a second tier, forty
real parameters in total).  The displacement of the return map on a section
through the annulus expands as d(h, eps) = M1(h) eps + M2(h) eps^2 + ...

Both orders reduce to combinations of the oval integrals I_0, I_1, I_2 with
polynomial (in h) coefficients:

  * order one, on any annulus, directly from integrating the perturbation
    one-form around the oval;
  * order two, under the hypothesis that M1 vanishes identically on the
    annulus, via the Iliev two-step averaging formula.  On the exterior
    annulus the reduced coefficients acquire a 1/(4h+1) factor from the
    inverted period relations.

m2_form carries closed-form coefficients.  Its default tables were derived
symbolically from the Iliev formula and cross-checked against direct
quadrature of that formula and against an independent integrate-the-flow
oracle; source="legacy" selects an alternative coefficient table in
circulation that disagrees in several slots (see m2_deviation_report), kept
for comparison only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import polynomial as npoly

from .abelian import PeriodVector, PoleError
from .geometry import Annulus, branch_points, oval_smooth_factor
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_endpoint_sqrt

__all__ = [
    "MONOMIALS",
    "PerturbationParams",
    "ConstraintError",
    "MelnikovForm",
    "m1_form",
    "m2_form",
    "m1_vanishing_residuals",
    "enforce_m1_zero",
    "m_eval",
    "pole_cleared_eval",
    "m1_quadrature",
    "m2_iliev_quadrature",
    "m2_deviation_report",
]

#: exponent pairs (i, j) meaning x^i y^j, in coefficient order
MONOMIALS = ((0, 0), (1, 0), (0, 1), (1, 1), (2, 0),
             (0, 2), (2, 1), (1, 2), (3, 0), (0, 3))


class ConstraintError(ValueError):
    """A computation that presumes M1 = 0 was handed parameters violating it."""


def _as_coeff_tuple(values, name: str) -> tuple[float, ...]:
    vals = tuple(float(v) for v in values)
    if len(vals) != len(MONOMIALS):
        raise ValueError(f"{name} needs {len(MONOMIALS)} coefficients, got {len(vals)}")
    return vals


@dataclass(frozen=True)
class PerturbationParams:
    """Coefficient tables of the perturbation.

    lambda1/gamma1 are the eps^1 parts of the coefficients of f and g over
    MONOMIALS; lambda2/gamma2 the eps^2 parts.  So for example
    f(x, y) = sum_k (lambda1[k] + eps*lambda2[k]) * x^i y^j.
    """

    lambda1: tuple[float, ...]
    gamma1: tuple[float, ...]
    lambda2: tuple[float, ...]
    gamma2: tuple[float, ...]

    def __post_init__(self):
        for name in ("lambda1", "gamma1", "lambda2", "gamma2"):
            object.__setattr__(self, name, _as_coeff_tuple(getattr(self, name), name))

    @classmethod
    def zero(cls) -> "PerturbationParams":
        z = (0.0,) * len(MONOMIALS)
        return cls(z, z, z, z)

    @classmethod
    def random(cls, rng: np.random.Generator, scale: float = 1.0) -> "PerturbationParams":
        draw = lambda: tuple(scale * rng.standard_normal(len(MONOMIALS)))
        return cls(draw(), draw(), draw(), draw())

    @classmethod
    def uniform(cls, rng: np.random.Generator, scale: float = 1.0) -> "PerturbationParams":
        draw = lambda: tuple(scale * rng.uniform(-1.0, 1.0, len(MONOMIALS)))
        return cls(draw(), draw(), draw(), draw())

    @classmethod
    def from_dict(cls, data: dict) -> "PerturbationParams":
        known = {"lambda1", "gamma1", "lambda2", "gamma2"}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown parameter keys: {sorted(extra)}")
        z = (0.0,) * len(MONOMIALS)
        return cls(*(tuple(data.get(k, z)) for k in ("lambda1", "gamma1", "lambda2", "gamma2")))

    def to_dict(self) -> dict:
        return {"lambda1": list(self.lambda1), "gamma1": list(self.gamma1),
                "lambda2": list(self.lambda2), "gamma2": list(self.gamma2)}

    @classmethod
    def from_json(cls, text: str) -> "PerturbationParams":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("parameter file must hold a JSON object")
        return cls.from_dict(data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def coeff_grid(self, which: str) -> np.ndarray:
        """4x4 array c with c[i, j] the coefficient of x^i y^j."""
        c = np.zeros((4, 4))
        for (i, j), v in zip(MONOMIALS, getattr(self, which)):
            c[i, j] = v
        return c


@dataclass(frozen=True)
class MelnikovForm:
    """A Melnikov function as polynomial-in-h combinations of I_0, I_1, I_2.

    M(h) = (p0(h) I_0 + p1(h) I_1 + p2(h) I_2) / (4h+1 if pole else 1),
    with each p stored low-to-high.  An empty tuple means that period does
    not enter on this annulus.
    """

    order: int
    annulus: Annulus
    poly0: tuple[float, ...]
    poly1: tuple[float, ...]
    poly2: tuple[float, ...]
    pole: bool = False

    def coeff_arrays(self):
        return (np.asarray(self.poly0, dtype=float) if self.poly0 else np.zeros(1),
                np.asarray(self.poly1, dtype=float) if self.poly1 else np.zeros(1),
                np.asarray(self.poly2, dtype=float) if self.poly2 else np.zeros(1))


# ---------------------------------------------------------------------------
# order one
# ---------------------------------------------------------------------------


def m1_form(params: PerturbationParams, annulus: Annulus) -> MelnikovForm:
    """Closed form of M1 = contour integral of g dx - f dy (first tier).

    M1 = [ (l1+g2) + (4/7)(l7+3 g9) h ] I_0 + (2 l4 + g3) I_1
         + [ g6 + 3 l8 + l7/7 + 3 g9/7 ] I_2,

    writing l/g for lambda1/gamma1 entries.  On the exterior annulus the odd
    moment I_1 vanishes identically and the middle term is dropped.
    """
    l, g = params.lambda1, params.gamma1
    poly0 = (l[1] + g[2], (4.0 / 7.0) * (l[7] + 3.0 * g[9]))
    poly1 = (2.0 * l[4] + g[3],)
    poly2 = (g[6] + 3.0 * l[8] + l[7] / 7.0 + 3.0 * g[9] / 7.0,)
    if annulus is Annulus.EXTERIOR:
        poly1 = ()
    return MelnikovForm(order=1, annulus=annulus, poly0=poly0, poly1=poly1, poly2=poly2)


def m1_vanishing_residuals(params: PerturbationParams, annulus: Annulus) -> dict[str, float]:
    """Linear combinations of first-tier parameters that must vanish for M1 = 0.

    The four coefficient functions I_0, h I_0, I_1, I_2 are linearly
    independent on an interior lobe, so M1 = 0 there is equivalent to four
    scalar conditions; on the exterior annulus I_1 drops out and only three
    remain.
    """
    l, g = params.lambda1, params.gamma1
    res = {
        "i0-const": l[1] + g[2],
        "i0-slope": l[7] + 3.0 * g[9],
        "i1": 2.0 * l[4] + g[3],
        "i2": g[6] + 3.0 * l[8],
    }
    if annulus is Annulus.EXTERIOR:
        del res["i1"]
    return res


def enforce_m1_zero(params: PerturbationParams, annulus: Annulus) -> PerturbationParams:
    """Project onto M1 = 0 by solving the residuals for gamma1 entries.

    Sets g2 = -l1, g9 = -l7/3, g6 = -3 l8 and, on interior lobes only,
    g3 = -2 l4.  Idempotent; leaves every other entry untouched.
    """
    l = params.lambda1
    g = list(params.gamma1)
    g[2] = -l[1]
    g[9] = -l[7] / 3.0
    g[6] = -3.0 * l[8]
    if annulus is not Annulus.EXTERIOR:
        g[3] = -2.0 * l[4]
    return replace(params, gamma1=tuple(g))


# ---------------------------------------------------------------------------
# order two
# ---------------------------------------------------------------------------

_RESIDUAL_TOL = 1e-12


def _require_m1_zero(params: PerturbationParams, annulus: Annulus) -> None:
    res = m1_vanishing_residuals(params, annulus)
    bad = {k: v for k, v in res.items() if abs(v) > _RESIDUAL_TOL}
    if bad:
        raise ConstraintError(
            f"second-order form needs M1 = 0 on {annulus.value}; nonzero residuals: {bad}")


def _m2_interior_coeffs(params: PerturbationParams):
    """Derived interior table: ((a0, a1), (b0, b1), (r0, r1))."""
    l, g = params.lambda1, params.gamma1
    m, n = params.lambda2, params.gamma2
    c = l[3] + 2.0 * g[5]
    d = 2.0 * (l[6] + g[7])
    a0 = -c * l[0] + m[1] + n[2]
    a1 = (-(4.0 / 7.0) * (c * l[5] + d * l[8]) - (4.0 / 63.0) * d * l[7]
          + (4.0 / 7.0) * (m[7] + 3.0 * n[9]))
    b0 = (-c * (l[1] + l[8]) - d * (l[0] + l[4]) - (c * l[7] + d * l[5]) / 8.0
          + 2.0 * m[4] + n[3])
    b1 = -(c * l[7] + d * l[5]) / 2.0
    r0 = (-c * l[4] - d * l[1] - c * l[5] / 7.0 - (8.0 / 7.0) * d * l[8]
          - (8.0 / 63.0) * d * l[7]
          + n[6] + 3.0 * m[8] + m[7] / 7.0 + (3.0 / 7.0) * n[9])
    r1 = -(4.0 / 9.0) * d * l[7]
    return (a0, a1), (b0, b1), (r0, r1)


def _m2_exterior_coeffs(params: PerturbationParams):
    """Derived exterior table ((p00, p01, p02), (p20, p21, p22)); overall 1/(4h+1).

    Obtained from the interior-style reduction plus the extra pieces that
    survive only on the exterior annulus (where 2 l4 + g3 need not vanish),
    folded through the inverted period relations.
    """
    l, g = params.lambda1, params.gamma1
    (a0, a1), _, (r0, r1) = _m2_interior_coeffs(params)
    c = l[3] + 2.0 * g[5]
    e = g[3] + 2.0 * l[4]
    p00 = a0 - e * g[0]
    p01 = 4.0 * a0 + a1 + (4.0 / 3.0) * e * g[4] - (8.0 / 15.0) * e * c
    p02 = 4.0 * a1
    q0 = r0 - e * l[3] / 2.0
    p20 = q0 + 5.0 * e * g[0] + (5.0 / 3.0) * e * g[4] - (17.0 / 30.0) * e * c
    p21 = 4.0 * q0 + r1 + (2.0 / 5.0) * e * c
    p22 = 4.0 * r1
    return (p00, p01, p02), (p20, p21, p22)


def _m2_interior_coeffs_legacy(params: PerturbationParams):
    l, g = params.lambda1, params.gamma1
    m, n = params.lambda2, params.gamma2
    c = l[3] + 2.0 * g[5]
    w = l[6] + g[7]
    a0 = -l[0] * c + m[1] + n[2]
    a1h = 4.0 * c * (-l[8] / 7.0 - l[5])
    b0 = -c * (l[1] - l[7] / 8.0) + 2.0 * w * (l[0] + 2.0 * l[4] - 2.0 * l[7]) + 2.0 * m[4] + n[3]
    b1h = 4.0 * (-0.5 * l[7] * c + 3.0 * l[7] * w)
    rho = (c * (l[4] - l[5] / 7.0 - (8.0 / 7.0) * l[8]) - 2.0 * l[1] * w
           + n[6] + 3.0 * m[8] + m[7] / 7.0 + (3.0 / 7.0) * n[9])
    return (a0, a1h), (b0, b1h), (rho,)


def _m2_exterior_coeffs_legacy(params: PerturbationParams):
    l, g = params.lambda1, params.gamma1
    m, n = params.lambda2, params.gamma2
    c = l[3] + 2.0 * g[5]
    w = l[6] + g[7]
    e = g[3] + 2.0 * l[4]
    half_c = g[5] + l[3] / 2.0
    tier2_0 = m[1] + n[2]
    tier2_2 = n[6] + 3.0 * m[8] + m[7] / 7.0 + (3.0 / 7.0) * n[9]
    a0 = -l[0] * c + tier2_0 - g[0] * e
    a1 = (-l[0] * c + tier2_0 - (4.0 / 7.0) * l[5] * c
          + (4.0 / 7.0) * (m[7] + 3.0 * n[9]) - (8.0 / 7.0) * l[8] * w
          + (g[4] / 3.0) * e + (8.0 / 15.0) * e * half_c)
    a2 = (-(4.0 / 7.0) * l[5] * c + (4.0 / 7.0) * (m[7] + 3.0 * n[9])
          - (8.0 / 7.0) * l[8] * w)
    head = (2.0 * l[4] * l[3] + l[3] * g[3] / 2.0 + 2.0 * l[4] * g[5]
            + 2.0 * l[1] * l[6] + 2.0 * l[1] * g[7] - tier2_2
            + (l[5] / 7.0) * c + (16.0 / 7.0) * l[8] * w)
    b0 = -(head - 5.0 * e * (g[4] / 3.0 + g[0]) + (17.0 / 15.0) * e * half_c)
    b1 = -(head - (1.0 / 5.0) * e * half_c)
    return (a0, 4.0 * a1, a2), (b0, 4.0 * b1)


def m2_form(params: PerturbationParams, annulus: Annulus,
            source: str = "derived") -> MelnikovForm:
    """Closed form of the second-order Melnikov function (requires M1 = 0).

    Raises ConstraintError unless the first-order residuals of the annulus
    vanish to 1e-12.  source="derived" (default) uses the symbolically
    re-derived coefficient tables validated against quadrature of the Iliev
    formula and an integrate-the-flow oracle; source="legacy" reproduces an
    older published table that differs in several entries and is retained
    only for side-by-side comparison.
    """
    _require_m1_zero(params, annulus)
    if source == "derived":
        if annulus is Annulus.EXTERIOR:
            p0, p2 = _m2_exterior_coeffs(params)
            return MelnikovForm(2, annulus, p0, (), p2, pole=True)
        (a0, a1), (b0, b1), (r0, r1) = _m2_interior_coeffs(params)
        return MelnikovForm(2, annulus, (a0, a1), (b0, b1), (r0, r1))
    if source == "legacy":
        if annulus is Annulus.EXTERIOR:
            p0, p2 = _m2_exterior_coeffs_legacy(params)
            return MelnikovForm(2, annulus, p0, (), p2, pole=True)
        p0, p1, p2 = _m2_interior_coeffs_legacy(params)
        return MelnikovForm(2, annulus, p0, p1, p2)
    raise ValueError(f"unknown source {source!r}; expected 'derived' or 'legacy'")


def m2_deviation_report(params: PerturbationParams, annulus: Annulus) -> dict:
    """Slot-by-slot difference between the derived and legacy order-2 tables.

    Returns {"annulus", "slots": {name: {"derived", "legacy", "delta"}},
    "max_abs_delta"}; slot names are <period>-h<power>.
    """
    derived = m2_form(params, annulus, source="derived")
    legacy = m2_form(params, annulus, source="legacy")
    slots: dict[str, dict[str, float]] = {}
    for label, dv, lv in (("i0", derived.poly0, legacy.poly0),
                          ("i1", derived.poly1, legacy.poly1),
                          ("i2", derived.poly2, legacy.poly2)):
        width = max(len(dv), len(lv))
        for k in range(width):
            a = dv[k] if k < len(dv) else 0.0
            b = lv[k] if k < len(lv) else 0.0
            slots[f"{label}-h{k}"] = {"derived": a, "legacy": b, "delta": a - b}
    return {
        "annulus": annulus.value,
        "slots": slots,
        "max_abs_delta": max(abs(s["delta"]) for s in slots.values()),
    }


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def m_eval(form: MelnikovForm, h, periods):
    """Evaluate a form at levels h given the matching period values.

    periods is either a PeriodVector or a 3-tuple of arrays (I_0, I_1, I_2)
    aligned with h.  Works for real or complex h; raises PoleError on the
    exterior order-2 pole at h = -1/4 (use pole_cleared_eval there).
    """
    if isinstance(periods, PeriodVector):
        i0, i1, i2 = periods.i0, periods.i1, periods.i2
    else:
        i0, i1, i2 = periods
    value = pole_cleared_eval(form, h, (i0, i1, i2))
    if not form.pole:
        return value
    den = 4.0 * np.asarray(h) + 1.0
    if np.any(np.abs(den) < 1e-13):
        raise PoleError(
            "form has a simple pole at h = -1/4; evaluate pole_cleared_eval "
            "(the combination (4h+1) M) instead")
    return value / den


def pole_cleared_eval(form: MelnikovForm, h, periods):
    """The polynomial-coefficient combination p0 I_0 + p1 I_1 + p2 I_2.

    For pole-free forms this equals m_eval; for the exterior order-2 form it
    is (4h+1) M(h), analytic across h = -1/4 and the right object for
    argument-variation counts.
    """
    if isinstance(periods, PeriodVector):
        i0, i1, i2 = periods.i0, periods.i1, periods.i2
    else:
        i0, i1, i2 = periods
    h = np.asarray(h)
    c0, c1, c2 = form.coeff_arrays()
    return (npoly.polyval(h, c0) * i0 + npoly.polyval(h, c1) * i1
            + npoly.polyval(h, c2) * i2)


# ---------------------------------------------------------------------------
# independent quadrature oracles
# ---------------------------------------------------------------------------


def _both_branch_integral(phi, h: float, annulus: Annulus,
                          spec: QuadratureSpec) -> float:
    """Contour integral of phi(x, y) dx, flow orientation.

    Evaluates phi on the upper branch minus phi on the lower branch and
    integrates in x; phi may carry a 1/y factor (integrable at the branch
    points).  y is reconstructed from the stable endpoint product of the
    quadrature rule, so 1/y integrands do not see endpoint cancellation.
    """
    geom = branch_points(h, annulus)

    def integrand(x, t):
        y = np.sqrt(t * oval_smooth_factor(x, h, annulus))
        y = np.maximum(y, 1e-300)
        return phi(x, y) - phi(x, -y)

    value, _ = integrate_endpoint_sqrt(integrand, geom.x_lo, geom.x_hi, spec,
                                       with_product=True)
    return value


def m1_quadrature(params: PerturbationParams, h: float, annulus: Annulus,
                  spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """M1 by direct quadrature: contour integral of g dx - f dy (first tier).

    On the oval dy = (x - x^3)/y dx, so the integrand is g - f (x - x^3)/y.
    Entirely independent of the closed-form coefficient tables.
    """
    cf = params.coeff_grid("lambda1")
    cg = params.coeff_grid("gamma1")

    def phi(x, y):
        return npoly.polyval2d(x, y, cg) - npoly.polyval2d(x, y, cf) * (x - x ** 3) / y

    return _both_branch_integral(phi, h, annulus, spec)


def _iliev_pieces(params: PerturbationParams):
    """Coefficient grids entering the second-order averaging formula.

    Returns (F, divergence, p1 coefficients (A, B, C, D), p2 coefficients
    (E, W)) where F(x, y) = int_0^y f1(x, s) ds - int_0^x g1(s, 0) ds,
    divergence = f1_x + g1_y, the odd generator is G1 = y (A + B x + C x^2
    + D y^2) and the even one G2 = y^2 (E + W x).
    """
    cf = params.coeff_grid("lambda1")
    cg = params.coeff_grid("gamma1")
    f_int_y = npoly.polyint(cf, axis=1)
    g_on_axis = np.zeros_like(cg)
    g_on_axis[:, 0] = cg[:, 0]
    g_int_x = npoly.polyint(g_on_axis, axis=0)
    size = max(f_int_y.shape[0], g_int_x.shape[0], f_int_y.shape[1], g_int_x.shape[1])
    F = np.zeros((size, size))
    F[:f_int_y.shape[0], :f_int_y.shape[1]] += f_int_y
    F[:g_int_x.shape[0], :g_int_x.shape[1]] -= g_int_x
    div = np.zeros((4, 4))
    dfx = npoly.polyder(cf, axis=0)
    dgy = npoly.polyder(cg, axis=1)
    div[:dfx.shape[0], :dfx.shape[1]] += dfx
    div[:dgy.shape[0], :dgy.shape[1]] += dgy
    l, g = params.lambda1, params.gamma1
    p1 = (l[1] + g[2], g[3] + 2.0 * l[4], g[6] + 3.0 * l[8], g[9] + l[7] / 3.0)
    p2 = (g[5] + l[3] / 2.0, g[7] + l[6])
    return F, div, p1, p2


def m2_iliev_quadrature(params: PerturbationParams, h: float, annulus: Annulus,
                        spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """M2 by direct quadrature of the two-step averaging formula.

    M2 = contour[ G1h P2 - G1 P2h ] dx - contour[ (F/y)(f1_x + g1_y) ] dx
         + contour[ g2 dx - f2 dy ],

    with F the mixed primitive of the first tier, G = g1 + F_x split into
    odd/even parts G1 = y p1(x, y^2), G2 = p2(x, y^2), and P2(x, h) the
    x-primitive of p2 along the oval.  Requires the first-order residuals of
    the annulus to vanish.  Independent of the closed-form tables (shares
    only the quadrature kernel).
    """
    _require_m1_zero(params, annulus)
    F, div, (A, B, C, D), (E, W) = _iliev_pieces(params)

    def P2(x):
        return (E * (2.0 * h * x + x ** 3 / 3.0 - x ** 5 / 10.0)
                + W * (h * x * x + x ** 4 / 4.0 - x ** 6 / 12.0))

    def P2h(x):
        return 2.0 * E * x + W * x * x

    def phi_g1(x, y):
        g1y = A + B * x + C * x * x + 3.0 * D * y * y
        g1 = y * (A + B * x + C * x * x + D * y * y)
        return g1y * P2(x) / y - g1 * P2h(x)

    def phi_div(x, y):
        return -npoly.polyval2d(x, y, F) / y * npoly.polyval2d(x, y, div)

    cf2 = params.coeff_grid("lambda2")
    cg2 = params.coeff_grid("gamma2")

    def phi_tier2(x, y):
        return npoly.polyval2d(x, y, cg2) - npoly.polyval2d(x, y, cf2) * (x - x ** 3) / y

    total = 0.0
    for phi in (phi_g1, phi_div, phi_tier2):
        total += _both_branch_integral(phi, h, annulus, spec)
    return total
