"""Frozen constants from the one-time spectral calibration run.

Regenerate with ``python scripts/calibrate.py``; the grid was
T in {2..64, 96, 128, 192, 256} x mu in {0.05, 0.10, ..., 0.95}.
Measured envelopes: lambda0*T^2/(1-epsilon) in [0.3388, 1.8829] and
k0*T/sqrt(mu) in [0.5822, 1.3722].  The bands below round the measured
envelopes outward and are frozen; tests assert against them, they are
never recalibrated on the fly.
"""

from fractions import Fraction

# lambda0 * T^2 / (1 - epsilon) stays inside this band on the grid
GAP_RATIO_BAND = (0.30, 1.90)

# k0 * T / sqrt(mu) stays inside this band on the grid
K0_SCALED_BAND = (0.55, 1.40)

# Upper constant for ground energies of the penalised walk, used by the
# per-square energy model: measured envelope high of 1.883 rounded up
# past the large-T, mu -> 1 limit pi^2/4 ~ 2.467.
COMP_UPPER_K = Fraction(3)
