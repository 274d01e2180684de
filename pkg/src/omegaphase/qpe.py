"""Exact simulation of the n-bit phase-estimation output distribution,
its tail bound, the round-then-truncate success probability, and the
gate-synthesis error model.

Phases are handled as exact rationals; the only floating point is the
final sine evaluation, so every window and grid comparison below is
decided exactly.  All probability claims are computed by exhaustive
summation over the 2^n outcomes, never by sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from .dyadic import Dyadic, round_up_mth, truncate

__all__ = [
    "PhaseDistribution",
    "ErrorBudget",
    "qpe_distribution",
    "tail_probability",
    "rounded_success_probability",
    "sk_error_bound",
    "sk_delta",
]

MAX_PRECISION_BITS = 20

PhaseLike = Union[Fraction, Dyadic, int, float, str]


def as_phase(phi: PhaseLike) -> Fraction:
    """Coerce to an exact rational in [0, 1).

    Floats are taken at their exact binary value; strings may be "p/q"
    or decimal literals.
    """
    if isinstance(phi, Dyadic):
        value = phi.as_fraction()
    elif isinstance(phi, str):
        value = Fraction(phi)
    else:
        value = Fraction(phi)
    if not 0 <= value < 1:
        raise ValueError(f"phase must lie in [0, 1), got {phi}")
    return value


@dataclass(frozen=True)
class PhaseDistribution:
    """The 2^n-outcome distribution of n-bit phase estimation on phi."""

    n: int
    phi: Fraction
    probabilities: np.ndarray = field(repr=False)
    exact: bool

    def __post_init__(self) -> None:
        self.probabilities.setflags(write=False)

    @property
    def outcomes(self) -> np.ndarray:
        return np.arange(1 << self.n)


def _signed_offsets(phi: Fraction, n: int) -> tuple[np.ndarray, Fraction]:
    """Integer parts t(z) and fractional part a of 2^n*delta(z) = t + a.

    delta(z) = phi - z/2^n reduced mod 1 so that |delta| <= 1/2; with
    a = frac(2^n phi) in (0, 1) fixed, t(z) runs over the integers in
    [-2^(n-1), 2^(n-1) - 1].
    """
    size = 1 << n
    scaled = phi * size
    base = math.floor(scaled)
    a = scaled - base
    t = (base - np.arange(size)) % size
    t = np.where(t >= size // 2, t - size, t)
    return t, a


def qpe_distribution(phi: PhaseLike, n: int) -> PhaseDistribution:
    """Exact output distribution of n-bit phase estimation.

    A phase on the 2^n grid gives unit mass on its own outcome; otherwise
    Pr[z] = sin^2(pi 2^n delta(z)) / (2^(2n) sin^2(pi delta(z))) with
    delta(z) the mod-1 deviation reduced to |delta| <= 1/2, normalised.
    """
    if not 1 <= n <= MAX_PRECISION_BITS:
        raise ValueError(f"precision n must be in [1, {MAX_PRECISION_BITS}], got {n}")
    value = as_phase(phi)
    size = 1 << n
    scaled = value * size
    if scaled.denominator == 1:
        probs = np.zeros(size)
        probs[int(scaled) % size] = 1.0
        return PhaseDistribution(n, value, probs, exact=True)
    t, a = _signed_offsets(value, n)
    af = float(a)
    # numerator sin^2(pi * 2^n * delta) = sin^2(pi * a) for every outcome
    amp = np.sin(math.pi * af) / (size * np.sin(math.pi * (t + af) / size))
    probs = amp * amp
    probs /= probs.sum()
    return PhaseDistribution(n, value, probs, exact=False)


def tail_probability(phi: PhaseLike, n: int, m: int) -> float:
    """Probability that the n-bit estimate deviates by at least 2^-(m+1).

    Deviation is measured mod 1; the summation window is decided exactly
    on the integer grid.  Bounded above by 2^-(n-m).
    """
    if not 0 < m < n:
        raise ValueError(f"need 0 < m < n, got m={m}, n={n}")
    dist = qpe_distribution(phi, n)
    if dist.exact:
        return 0.0
    t, _ = _signed_offsets(dist.phi, n)
    # |t + a| >= 2^(n-m-1) with a in (0,1) <=> t >= B or t <= -B - 1
    bound = 1 << (n - m - 1)
    mask = (t >= bound) | (t <= -bound - 1)
    return float(dist.probabilities[mask].sum())


def _rounded_outcomes(n: int, m: int) -> np.ndarray:
    """Integer image of every n-bit outcome under round-up-then-truncate.

    Mirrors the dyadic pipeline on the scaled grid: outcome z is the
    fraction z/2^n; add 2^-m when bit m+1 is set (mod 1), keep m bits.
    """
    z = np.arange(1 << n, dtype=np.int64)
    if m == n:
        return z
    bit = (z >> (n - m - 1)) & 1
    rounded = (z + (bit << (n - m))) & ((1 << n) - 1)
    return rounded >> (n - m)


def rounded_success_probability(phi: PhaseLike, n: int, m: int) -> float:
    """Probability that rounding the estimate to m bits hits a best
    m-bit approximation of phi (mod-1 wraparound included).

    Bounded below by 1 - 2^-(n-m).
    """
    if not 0 < m <= n:
        raise ValueError(f"need 0 < m <= n, got m={m}, n={n}")
    dist = qpe_distribution(phi, n)
    scaled = dist.phi * (1 << m)
    lo = math.floor(scaled) % (1 << m)
    if scaled.denominator == 1:
        targets = {lo}
    else:
        targets = {lo, (lo + 1) % (1 << m)}
    outcome_images = _rounded_outcomes(n, m)
    mask = np.isin(outcome_images, np.array(sorted(targets), dtype=np.int64))
    return float(dist.probabilities[mask].sum())


def rounded_value_dyadic(z: int, n: int, m: int) -> Dyadic:
    """Reference path for a single outcome via the exact dyadic ops."""
    estimate = Dyadic(z, n)
    if m < n:
        estimate = round_up_mth(estimate, m, n_bits=n)
    return truncate(estimate, m)


def best_approximations(phi: PhaseLike, m: int) -> tuple[Dyadic, ...]:
    """The m-bit targets as exact dyadics (floor/ceil of 2^m phi, mod 1)."""
    value = as_phase(phi)
    scaled = value * (1 << m)
    lo = Dyadic(math.floor(scaled), m)
    if scaled.denominator == 1:
        return (lo,)
    hi = (lo + Dyadic(1, m)).mod1()
    return (hi, lo) if hi < lo else (lo, hi)


@dataclass(frozen=True)
class ErrorBudget:
    """Parameters of the fixed-gate-set synthesis error model.

    delta_n = (n^2 / 2) * 2^(-c2 * n^(1/c1)) with 3 < c1 < 4 and c2 >= 1:
    n^2/2 approximated rotation gates, each synthesised to the precision
    reachable in the available workspace.
    """

    n: int
    m: int
    c1: float
    c2: float

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not 0 < self.m <= self.n:
            raise ValueError(f"need 0 < m <= n, got m={self.m}")
        if not 3 < self.c1 < 4:
            raise ValueError(f"c1 must lie in (3, 4), got {self.c1}")
        if self.c2 < 1:
            raise ValueError(f"c2 must be >= 1, got {self.c2}")

    @property
    def delta_n(self) -> float:
        return sk_delta(self.n, self.c1, self.c2)


def sk_delta(n: int, c1: float, c2: float) -> float:
    return (n * n / 2.0) * 2.0 ** (-c2 * n ** (1.0 / c1))


def sk_error_bound(budget: ErrorBudget) -> float:
    """The modelled synthesis error delta(n); decreasing in n past a
    computable threshold for fixed constants."""
    return budget.delta_n


def success_and_tail_grid(
    phi: PhaseLike, n: int, ms: list[int]
) -> tuple[dict[int, float], dict[int, float]]:
    """Tail and success probabilities for one (phi, n) across many m.

    Shares the single 2^n distribution across the m values; used by the
    exhaustive acceptance grids.
    """
    dist = qpe_distribution(phi, n)
    tails: dict[int, float] = {}
    successes: dict[int, float] = {}
    t = a = None
    if not dist.exact:
        t, a = _signed_offsets(dist.phi, n)
    for m in ms:
        if not 0 < m <= n:
            raise ValueError(f"need 0 < m <= n, got m={m}, n={n}")
        if m < n:
            if dist.exact:
                tails[m] = 0.0
            else:
                bound = 1 << (n - m - 1)
                mask = (t >= bound) | (t <= -bound - 1)
                tails[m] = float(dist.probabilities[mask].sum())
        scaled = dist.phi * (1 << m)
        lo = math.floor(scaled) % (1 << m)
        targets = {lo} if scaled.denominator == 1 else {lo, (lo + 1) % (1 << m)}
        images = _rounded_outcomes(n, m)
        mask = np.isin(images, np.array(sorted(targets), dtype=np.int64))
        successes[m] = float(dist.probabilities[mask].sum())
    return tails, successes
