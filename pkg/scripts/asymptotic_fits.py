#!/usr/bin/env python3
"""Asymptotic structure of the period integrals, measured from quadrature.

Three experiments:
  1. the saddle-side limits of I_0 and I_2 (exact values 4/3 and 16/15),
     extracted with the logarithmic part of the expansion modeled out;
  2. the coefficients of the h log h series of I_0 near the saddle,
     fitted from levels spread over two decades;
  3. the large-h growth exponent of the exterior I_0 (exact 3/4), from a
     log-log fit with and without the h^(-1/2) correction column.
"""

import argparse
import math
import sys

import numpy as np

from duffing_melnikov.abelian import (
    SADDLE_LOG_I0,
    exterior_slope,
    oval_integral,
    saddle_constants,
    saddle_log_fit,
)
from duffing_melnikov.geometry import Annulus


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.parse_args()

    i0c, i2c = saddle_constants()
    print("saddle-side limits (interior lobe, h -> 0-):")
    print(f"  I_0 -> {i0c:.12f}   error vs 4/3   {i0c - 4.0 / 3.0:+.3e}")
    print(f"  I_2 -> {i2c:.12f}   error vs 16/15 {i2c - 16.0 / 15.0:+.3e}")

    a1, a2 = saddle_log_fit()
    print("\nlog-series coefficients of I_0 (fit over h in [-2e-2, -1e-4]):")
    print(f"  h   log h coefficient: {a1:+.9f}   table {SADDLE_LOG_I0[1]:+.9f}")
    print(f"  h^2 log h coefficient: {a2:+.9f}   table {SADDLE_LOG_I0[2]:+.9f}")

    print("\nexterior growth of I_0 over h in [1e2, 1e6]:")
    for corrected in (False, True):
        slope, amp = exterior_slope(corrected=corrected)
        tag = "with h^-1/2 column" if corrected else "plain log-log fit "
        print(f"  {tag}: slope {slope:.8f} (error {slope - 0.75:+.2e}), "
              f"amplitude {amp:.8f}")

    # a feel for how fast the exterior period grows in absolute terms
    print("\n  h        I_0(h)")
    for h in (1e2, 1e4, 1e6):
        print(f"  {h:8.0e} {oval_integral(0, h, Annulus.EXTERIOR):14.6e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
