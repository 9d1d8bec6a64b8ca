"""Real root isolation and complex zero-count certificates.

The number of zeros of an analytic function inside the cut disc

    D_R = {|h| < R}  minus  (branch-cut neighborhood + puncture at h = 0)

equals, by the argument principle, the winding of the function's argument
around the boundary of D_R.  This module builds that boundary as a keyhole
polyline (big circle, two cut sides at height eta, small polygon around the
puncture), transports the period basis along it once, and then counts zeros
of any bifurcation form by sampling its phase with adaptive refinement.
The transport is parameter independent, so a single cached contour table
serves every parameter draw in a census.

Counting normalizations.  Interior forms are counted as they stand.  On the
exterior annulus the first-order form is divided by I_0 and the second-order
form is evaluated pole-cleared, (4h+1) M_2, and divided by I_0: the
prefactor removes the simple pole at h = -1/4 (which lies on the cut, not
in D_R) and the division by the nonvanishing I_0 subtracts no zeros while
taming the growth along the circle.  Either way the winding equals the zero
count of the form itself on D_R.

Every interior form vanishes at h = -1/4, where the whole period basis
shrinks with the oval; certificates on the interior lobes therefore report
winding >= 1 for generic parameters, and the stated bounds include that
forced zero.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .abelian import (
    BASE_POINTS,
    MIN_CLEARANCE,
    PathTable,
    RealPeriodTable,
    cut_values,
    transport_table,
)
from .geometry import Annulus
from .melnikov import (
    MelnikovForm,
    PerturbationParams,
    enforce_m1_zero,
    m1_form,
    m2_form,
    m_eval,
    pole_cleared_eval,
)

__all__ = [
    "BOUNDS",
    "Status",
    "DegenerateFormError",
    "ZeroCertificate",
    "real_zeros",
    "winding_count",
    "imaginary_part_on_cut",
    "certify",
    "bound_census",
    "circle_argument",
]

# Zero-count ceilings per (order, annulus) for the one-parameter cubic
# deformation, as certified by the winding computation below.
BOUNDS = {
    (1, Annulus.INTERIOR_LEFT): 3,
    (1, Annulus.INTERIOR_RIGHT): 3,
    (1, Annulus.EXTERIOR): 2,
    (2, Annulus.INTERIOR_LEFT): 4,
    (2, Annulus.INTERIOR_RIGHT): 4,
    (2, Annulus.EXTERIOR): 4,
}

_N_CIRCLE = 256          # polygon edges on the big circle
_N_PUNCT = 64            # polygon edges around the puncture
_N_SLIT = 160            # log-spaced samples per cut side
_INTEGRALITY_TOL = 0.1   # max deviation of the phase sum from an integer turn
_CLOSURE_TOL = 1e-8      # relative mismatch of the transported loop endpoints
_MAX_REFINE = 40
_MAX_SAMPLES = 300_000
_DEGENERATE_TOL = 1e-14


class Status(enum.Enum):
    WITHIN_BOUND = "within-bound"
    BOUND_VIOLATED = "bound-violated"
    INCONCLUSIVE = "inconclusive"
    DEGENERATE = "degenerate"


class DegenerateFormError(ValueError):
    """The counting function is numerically identically zero."""


@dataclass(frozen=True)
class ZeroCertificate:
    """Outcome of one argument-principle zero count plus a real-root scan.

    real_roots holds (location, bracket width) pairs from sign changes on
    the physical interval; suspect_roots are near-tangencies flagged by the
    local-minimum heuristic but not counted.  winding is the certified
    complex zero count in D_R, to be compared against bound.
    """

    annulus: Annulus
    order: int
    real_roots: tuple
    suspect_roots: tuple
    winding: int
    bound: int
    contour: tuple
    status: Status
    phase_defect: float
    closure_error: float
    n_samples: int

    def as_record(self) -> dict:
        return {
            "annulus": self.annulus.value,
            "order": self.order,
            "real_roots": [[float(r), float(w)] for r, w in self.real_roots],
            "suspect_roots": [float(r) for r in self.suspect_roots],
            "winding": self.winding,
            "bound": self.bound,
            "contour": {"R": self.contour[0], "eta": self.contour[1],
                        "rho": self.contour[2]},
            "status": self.status.value,
            "phase_defect": self.phase_defect,
            "closure_error": self.closure_error,
            "n_samples": self.n_samples,
            "tolerances": {"integrality": _INTEGRALITY_TOL,
                           "closure": _CLOSURE_TOL},
        }

    def to_json(self) -> str:
        return json.dumps(self.as_record(), sort_keys=True)

    @classmethod
    def from_record(cls, rec: dict) -> "ZeroCertificate":
        return cls(
            annulus=Annulus.from_label(rec["annulus"]),
            order=int(rec["order"]),
            real_roots=tuple((float(r), float(w)) for r, w in rec["real_roots"]),
            suspect_roots=tuple(float(r) for r in rec["suspect_roots"]),
            winding=int(rec["winding"]),
            bound=int(rec["bound"]),
            contour=(rec["contour"]["R"], rec["contour"]["eta"],
                     rec["contour"]["rho"]),
            status=Status(rec["status"]),
            phase_defect=float(rec["phase_defect"]),
            closure_error=float(rec["closure_error"]),
            n_samples=int(rec["n_samples"]),
        )


# ---------------------------------------------------------------------------
# keyhole contour construction and caching
# ---------------------------------------------------------------------------


@dataclass
class ContourTable:
    """One transported keyhole boundary, reusable across parameter draws."""

    annulus: Annulus
    R: float
    eta: float
    rho: float
    rho_arc: float
    table: PathTable
    s_loop: tuple        # parameter range of the closed boundary
    s_circle: tuple      # parameter sub-range of the big-circle portion
    s_init: np.ndarray   # initial sample parameters over s_loop


def _validate_contour(R: float, eta: float, rho: float) -> None:
    if not R > 1.0:
        raise ValueError("contour radius R must exceed 1")
    if not (MIN_CLEARANCE <= rho <= 1e-2):
        raise ValueError(f"puncture radius rho must lie in [{MIN_CLEARANCE}, 1e-2]")
    if not (MIN_CLEARANCE <= eta <= 1e-2):
        raise ValueError(f"cut offset eta must lie in [{MIN_CLEARANCE}, 1e-2]")
    if eta > rho:
        raise ValueError("cut offset eta must not exceed the puncture radius rho")


def keyhole_vertices(annulus: Annulus, R: float = 10.0, eta: float = 1e-3,
                     rho: float = 1e-3):
    """Entry polyline and closed keyhole boundary for the cut disc.

    Returns (entry, loop): entry leads from the annulus base point to the
    loop's start vertex without approaching the singular levels; loop lists
    the boundary vertices counterclockwise around D_R, first == last.  The
    puncture polygon is circumscribed (vertex radius rho/cos(pi/n)), so its
    chords keep distance >= rho from the origin.
    """
    _validate_contour(R, eta, rho)
    rho_arc = rho / math.cos(math.pi / _N_PUNCT)
    x_rho = math.sqrt(rho_arc ** 2 - eta ** 2)
    x_R = math.sqrt(R ** 2 - eta ** 2)
    th0 = math.asin(eta / rho_arc)
    thR = math.asin(eta / R)
    base = BASE_POINTS[annulus]
    if annulus is Annulus.EXTERIOR:
        # cut along (-inf, 0]; boundary starts just below the cut near 0
        start = complex(-x_rho, -eta)
        entry = [complex(base), complex(-x_rho, -3.0 * eta), start]
        circle = np.linspace(-math.pi + thR, math.pi - thR, _N_CIRCLE + 1)
        punct = np.linspace(math.pi - th0, th0 - math.pi, _N_PUNCT + 1)
        loop = [start, complex(-x_R, -eta)]
        loop += [R * complex(math.cos(t), math.sin(t)) for t in circle[1:]]
        loop += [complex(-x_rho, eta)]
        loop += [rho_arc * complex(math.cos(t), math.sin(t)) for t in punct[1:]]
    else:
        # cut along [0, inf); boundary starts just above the cut near 0
        start = complex(x_rho, eta)
        entry = [complex(base), complex(x_rho, 3.0 * eta), start]
        circle = np.linspace(thR, 2.0 * math.pi - thR, _N_CIRCLE + 1)
        punct = np.linspace(-th0, th0 - 2.0 * math.pi, _N_PUNCT + 1)
        loop = [start, complex(x_R, eta)]
        loop += [R * complex(math.cos(t), math.sin(t)) for t in circle[1:]]
        loop += [complex(x_rho, -eta)]
        loop += [rho_arc * complex(math.cos(t), math.sin(t)) for t in punct[1:]]
    loop[-1] = start
    return entry, loop


def _initial_samples(n_entry: int, loop) -> np.ndarray:
    """Vertex + midpoint samples, densified log-toward-origin on the cut sides."""
    s0 = float(n_entry)
    n_loop = len(loop) - 1
    samples = [s0 + np.arange(n_loop + 1, dtype=float),
               s0 + np.arange(n_loop) + 0.5]
    for k in (0, 1 + _N_CIRCLE):  # the two cut-side segments
        a, b = loop[k].real, loop[k + 1].real
        x = np.geomspace(abs(a), abs(b), _N_SLIT) * math.copysign(1.0, a)
        t = np.clip((x - a) / (b - a), 0.0, 1.0)
        samples.append(s0 + k + t)
    return np.unique(np.concatenate(samples))


_CONTOUR_CACHE: dict = {}


def contour_table(annulus: Annulus, R: float = 10.0, eta: float = 1e-3,
                  rho: float = 1e-3) -> ContourTable:
    """Transport the period basis along the keyhole boundary (cached)."""
    key = (annulus, float(R), float(eta), float(rho))
    hit = _CONTOUR_CACHE.get(key)
    if hit is not None:
        return hit
    entry, loop = keyhole_vertices(annulus, R, eta, rho)
    vertices = entry + loop[1:]
    table = transport_table(vertices, annulus)
    n_entry = len(entry) - 1
    s_loop = (float(n_entry), float(len(vertices) - 1))
    s_circle = (s_loop[0] + 1.0, s_loop[0] + 1.0 + _N_CIRCLE)
    ct = ContourTable(annulus=annulus, R=float(R), eta=float(eta),
                      rho=float(rho),
                      rho_arc=rho / math.cos(math.pi / _N_PUNCT),
                      table=table, s_loop=s_loop, s_circle=s_circle,
                      s_init=_initial_samples(n_entry, loop))
    _CONTOUR_CACHE[key] = ct
    return ct


# ---------------------------------------------------------------------------
# counting function evaluation and phase accumulation
# ---------------------------------------------------------------------------


def _counting_values(form: MelnikovForm, h, i0, i1, i2):
    """Normalized counting function: same zeros as the form on D_R."""
    v = pole_cleared_eval(form, h, (i0, i1, i2))
    if form.annulus is Annulus.EXTERIOR:
        v = v / i0
    return v


def _refined_phase(ct: ContourTable, form: MelnikovForm, s: np.ndarray):
    """Sample the counting function on s, bisecting until phase steps < pi/2.

    Returns (s, values, converged).  Non-convergence signals a zero on or
    numerically touching the contour.
    """
    h, i0, i1, i2 = ct.table.values_at(s)
    v = _counting_values(form, h, i0, i1, i2)
    scale = float(np.max(np.abs(v)))
    if scale < _DEGENERATE_TOL * (1.0 + float(np.max(np.abs(i0)))):
        raise DegenerateFormError(
            f"counting function is identically zero on the contour "
            f"(max |value| {scale:.3g} over {s.size} samples)")
    converged = False
    for _ in range(_MAX_REFINE):
        with np.errstate(divide="ignore", invalid="ignore"):
            steps = np.angle(v[1:] / v[:-1])
        bad = np.abs(steps) >= 0.5 * math.pi
        bad |= np.abs(v[1:]) < 1e-13 * scale
        bad |= np.abs(v[:-1]) < 1e-13 * scale
        idx = np.flatnonzero(bad)
        if idx.size == 0:
            converged = True
            break
        if s.size + idx.size > _MAX_SAMPLES:
            break
        s_new = 0.5 * (s[idx] + s[idx + 1])
        h, i0, i1, i2 = ct.table.values_at(s_new)
        v_new = _counting_values(form, h, i0, i1, i2)
        pos = np.searchsorted(s, s_new)
        s = np.insert(s, pos, s_new)
        v = np.insert(v, pos, v_new)
    return s, v, converged


def winding_count(form: MelnikovForm, R: float = 10.0, eta: float = 1e-3,
                  rho: float = 1e-3) -> ZeroCertificate:
    """Argument-principle zero count of a form over the keyhole boundary.

    The certificate's real_roots field is left empty here; certify fills it.
    Raises DegenerateFormError for a numerically zero counting function.
    """
    ct = contour_table(form.annulus, R, eta, rho)
    s, v, converged = _refined_phase(ct, form, ct.s_init.copy())
    total = float(np.sum(np.angle(v[1:] / v[:-1])))
    raw = total / (2.0 * math.pi)
    winding = int(round(raw))
    defect = abs(raw - winding)
    closure = float(np.abs(v[-1] - v[0]) / np.max(np.abs(v)))
    bound = BOUNDS[(form.order, form.annulus)]
    if not converged or defect >= _INTEGRALITY_TOL or closure > _CLOSURE_TOL \
            or winding < 0:
        status = Status.INCONCLUSIVE
    elif winding <= bound:
        status = Status.WITHIN_BOUND
    else:
        status = Status.BOUND_VIOLATED
    return ZeroCertificate(annulus=form.annulus, order=form.order,
                           real_roots=(), suspect_roots=(), winding=winding,
                           bound=bound, contour=(float(R), float(eta), float(rho)),
                           status=status, phase_defect=defect,
                           closure_error=closure, n_samples=int(s.size))


def circle_argument(form: MelnikovForm, R: float = 10.0, eta: float = 1e-3,
                    rho: float = 1e-3) -> float:
    """Argument increase (radians) of the form along the big circle |h| = R.

    Growth diagnostic: a form dominated by h^p times the leading period
    growth accumulates about 2 pi (p + growth exponent) here.  Interior
    forms are measured raw, exterior ones with the same normalization the
    winding uses.
    """
    ct = contour_table(form.annulus, R, eta, rho)
    lo, hi = ct.s_circle
    s = ct.s_init
    s = s[(s >= lo) & (s <= hi)]
    s, v, converged = _refined_phase(ct, form, s)
    if not converged:
        raise DegenerateFormError("phase refinement failed on the circle")
    return float(np.sum(np.angle(v[1:] / v[:-1])))


# ---------------------------------------------------------------------------
# real-axis root isolation
# ---------------------------------------------------------------------------


def real_zeros(fn, interval, n_scan: int = 512, xtol: float = 1e-12):
    """Bracketing root scan on a real interval.

    fn must accept a float ndarray and return values; sign changes of the
    real part are polished by bisection to width xtol and returned as
    (location, width) pairs.  Local minima of |fn| below 1e-6 of the scan
    scale without a sign change are returned separately as suspects (the
    even-multiplicity heuristic); they are flagged, never counted.
    """
    a, b = float(interval[0]), float(interval[1])
    if not b > a:
        raise ValueError(f"empty scan interval ({a}, {b})")
    h = np.linspace(a, b, n_scan)
    v = np.real(np.asarray(fn(h)))
    scale = float(np.max(np.abs(v)))
    if scale == 0.0:
        return [], []
    # densify 4x around small-magnitude samples to catch close root pairs
    small = np.flatnonzero(np.abs(v) < 0.05 * scale)
    if small.size:
        extra = []
        for i in small:
            lo = h[max(i - 1, 0)]
            hi = h[min(i + 1, n_scan - 1)]
            extra.append(np.linspace(lo, hi, 9))
        h = np.unique(np.concatenate([h] + extra))
        v = np.real(np.asarray(fn(h)))

    def scalar(x):
        return float(np.real(np.asarray(fn(np.array([x]))))[0])

    roots = []
    sign = np.sign(v)
    for i in np.flatnonzero(sign[:-1] * sign[1:] < 0):
        r = brentq(scalar, h[i], h[i + 1], xtol=xtol)
        roots.append((float(r), xtol))
    for i in np.flatnonzero(sign == 0):
        roots.append((float(h[i]), 0.0))
    suspects = []
    mag = np.abs(v)
    for i in range(1, len(h) - 1):
        if (mag[i] < 1e-6 * scale and mag[i] <= mag[i - 1] and mag[i] <= mag[i + 1]
                and sign[i - 1] == sign[i + 1] and sign[i] == sign[i - 1]):
            suspects.append(float(h[i]))
    return roots, suspects


@lru_cache(maxsize=None)
def _real_table(annulus: Annulus) -> RealPeriodTable:
    return RealPeriodTable(annulus)


# ---------------------------------------------------------------------------
# cut diagnostics
# ---------------------------------------------------------------------------


def imaginary_part_on_cut(form: MelnikovForm, h: float, eta: float = 1e-3,
                          levels: int = 3):
    """(value+ - value-) / (2i) across the branch cut at a real level h.

    The two one-sided limits come from shrinking-offset extrapolation of the
    transported periods.  For a form with real coefficients the result is
    real (the two boundary values are complex conjugates); the imaginary
    residue of the returned number is a numerical-quality indicator.
    """
    plus, minus = cut_values(h, form.annulus, eta=eta, levels=levels)
    return (m_eval(form, h, plus) - m_eval(form, h, minus)) / 2j


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------


def _degenerate_certificate(form: MelnikovForm, R, eta, rho) -> ZeroCertificate:
    return ZeroCertificate(annulus=form.annulus, order=form.order,
                           real_roots=(), suspect_roots=(), winding=0,
                           bound=BOUNDS[(form.order, form.annulus)],
                           contour=(float(R), float(eta), float(rho)),
                           status=Status.DEGENERATE, phase_defect=0.0,
                           closure_error=0.0, n_samples=0)


def certify(params: PerturbationParams, order: int, annulus: Annulus,
            R: float = 10.0, eta: float = 1e-3, rho: float = 1e-3,
            source: str = "derived") -> ZeroCertificate:
    """Full zero-count certificate for one parameter draw.

    Combines the keyhole winding with a real-root scan over the physical
    interval clipped to D_R (endpoints offset from the critical levels and
    the puncture).  An identically-zero form yields a degenerate-status
    certificate rather than an error.
    """
    if order == 1:
        form = m1_form(params, annulus)
    elif order == 2:
        form = m2_form(params, annulus, source=source)
    else:
        raise ValueError(f"order must be 1 or 2, got {order}")
    try:
        cert = winding_count(form, R, eta, rho)
    except DegenerateFormError:
        return _degenerate_certificate(form, R, eta, rho)
    table = _real_table(annulus)
    rho_arc = rho / math.cos(math.pi / _N_PUNCT)
    if annulus is Annulus.EXTERIOR:
        interval = (1.01 * rho_arc, min(R, table.h_max) * (1.0 - 1e-9))
    else:
        interval = (-0.25 + 1e-6, -1.01 * rho_arc)

    def fn(arr):
        i0, i1, i2 = table.values(arr)
        return _counting_values(form, arr, i0, i1, i2)

    roots, suspects = real_zeros(fn, interval)
    status = cert.status
    if status is Status.WITHIN_BOUND and len(roots) > cert.winding:
        status = Status.INCONCLUSIVE
    return dataclasses.replace(cert, real_roots=tuple(roots),
                               suspect_roots=tuple(suspects), status=status)


def bound_census(order: int, annulus: Annulus, n_draws: int = 200,
                 seed: int = 0, scale: float = 0.5, R: float = 10.0,
                 eta: float = 1e-3, rho: float = 1e-3,
                 source: str = "derived", dist: str = "normal"):
    """Certify a batch of seeded random draws; returns (certificates, summary).

    dist selects the coefficient distribution: "normal" (standard normal
    times scale) or "uniform" (uniform on [-scale, scale]).  Second-order
    draws pass through the first-order vanishing constraints before
    certification, mirroring how the second-order function becomes the
    leading displacement term.
    """
    rng = np.random.default_rng(seed)
    if dist == "normal":
        draw = PerturbationParams.random
    elif dist == "uniform":
        draw = PerturbationParams.uniform
    else:
        raise ValueError(f"unknown draw distribution {dist!r}")
    certs = []
    for _ in range(n_draws):
        p = draw(rng, scale)
        if order == 2:
            p = enforce_m1_zero(p, annulus)
        certs.append(certify(p, order, annulus, R, eta, rho, source))
    windings = [c.winding for c in certs if c.status is not Status.DEGENERATE]
    summary = {
        "order": order,
        "annulus": annulus.value,
        "draws": n_draws,
        "seed": seed,
        "scale": scale,
        "dist": dist,
        "bound": BOUNDS[(order, annulus)],
        "contour": {"R": R, "eta": eta, "rho": rho},
        "max_winding": max(windings, default=0),
        "max_real_roots": max((len(c.real_roots) for c in certs), default=0),
        "status_counts": {s.value: sum(1 for c in certs if c.status is s)
                          for s in Status},
        "violations": [i for i, c in enumerate(certs)
                       if c.status is Status.BOUND_VIOLATED],
    }
    return certs, summary
