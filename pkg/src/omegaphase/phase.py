"""Per-square energy model and the finite-budget phase classification.

The model instantiates the asymptotic energy bounds with concrete
constants: a square of side s hosts a T(s)-step computation whose
ground energy is positive unless the finite-precision witness halts,
plus a marker bonus of magnitude 4^-(C(s + ceil(s^(1/8)))).  Everything
is exact rational arithmetic; the duration T(s) = s^d * xi^s cancels out
of the separation predicate, so scanning for the separation scale s' is
cheap even when the energies themselves are astronomically small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .calibration import COMP_UPPER_K
from .chaitin import witness_wprime
from .dyadic import BitString, Dyadic, interval_Im
from .tm import MachineSpec

__all__ = [
    "SquareEnergyModel",
    "EnergyInterval",
    "SweepResult",
    "SeparationError",
    "choose_m",
    "schedule_constraint_ok",
    "square_energy",
    "find_s_prime",
    "sweep",
    "XYChainSpectrum",
    "xy_chain_spectrum",
    "ComposedSpectrum",
    "compose_total_spectrum",
    "order_parameter",
]

S_MIN_SQUARE = 3  # smallest meaningful square
S_MIN_SCHEDULE = 7  # smallest square with a precision schedule (n = s - 5 >= 2)
REGIMES = ("halting", "nonhalting", "mixed")


class SeparationError(RuntimeError):
    """The marker interval fails to separate the two energy regimes
    within the checked range: model constants too loose."""


def _floor_root(value: int, k: int) -> int:
    """Largest r with r**k <= value (value >= 1)."""
    r = max(1, int(round(value ** (1.0 / k))))
    while r**k > value:
        r -= 1
    while (r + 1) ** k <= value:
        r += 1
    return r


def _ceil_root(value: int, k: int) -> int:
    r = _floor_root(value, k)
    return r if r**k == value else r + 1


def choose_m(n: int) -> int:
    """Rounding precision for an n-bit estimate: max(1, floor(n - n^(1/4))).

    Integer-exact (no float fourth roots), non-decreasing in n, diverges
    with n, and always leaves slack 2*log2(n) under the schedule bound
    n - (n^(1/4) - 2 log2 n).
    """
    if n < 2:
        raise ValueError(f"precision n must be >= 2, got {n}")
    return max(1, n - _ceil_root(n, 4))


def schedule_constraint_ok(n: int, m: int) -> bool:
    return m < n - (n ** 0.25 - 2.0 * math.log2(n))


def _delta_exponent(n: int, c1: float, c2: float) -> int:
    return math.floor(c2 * n ** (1.0 / c1))


@dataclass(frozen=True)
class SquareEnergyModel:
    """Concrete constants for the per-square energy bounds.

    xi is the duration base (a power of two, so C = log2(xi) is the
    integer marker constant); c1, c2 parameterise the gate-synthesis
    error; comp_upper_k is the frozen envelope constant bounding the
    penalised-walk ground energy from above; T(s) = s^poly_degree * xi^s.
    """

    xi: int = 2
    c1: float = 3.5
    c2: float = 16.0
    comp_upper_k: Fraction = COMP_UPPER_K
    poly_degree: int = 0
    s_max_checked: int = 131_072

    def __post_init__(self) -> None:
        if self.xi < 2 or self.xi & (self.xi - 1):
            raise ValueError(
                f"xi must be a power of two >= 2 (C = log2 xi breaks otherwise), got {self.xi}"
            )
        if not 3 < self.c1 < 4:
            raise ValueError(f"c1 must lie in (3, 4), got {self.c1}")
        if self.c2 < 1:
            raise ValueError(f"c2 must be >= 1, got {self.c2}")
        if self.poly_degree < 0:
            raise ValueError("poly_degree must be >= 0")
        if self.s_max_checked < S_MIN_SCHEDULE:
            raise ValueError("s_max_checked too small to ever separate")
        if not isinstance(self.comp_upper_k, Fraction) or self.comp_upper_k <= 0:
            raise ValueError("comp_upper_k must be a positive Fraction")

    @property
    def C(self) -> int:
        return self.xi.bit_length() - 1

    def n_of(self, s: int) -> int:
        if s < S_MIN_SCHEDULE:
            raise ValueError(f"square side must be >= {S_MIN_SCHEDULE}, got {s}")
        return s - 5

    def m_of(self, s: int) -> int:
        return choose_m(self.n_of(s))

    def marker_exponent(self, s: int) -> int:
        return self.C * (s + _ceil_root(s, 8))

    def t_squared(self, s: int) -> Fraction:
        return Fraction(s ** (2 * self.poly_degree) * self.xi ** (2 * s))

    def tail(self, s: int) -> Fraction:
        n = self.n_of(s)
        return Fraction(1, 1 << (n - self.m_of(s)))

    def delta_hat(self, s: int) -> Fraction:
        """Dyadic upper bound on the synthesis error: flooring the
        exponent can only increase the value."""
        n = self.n_of(s)
        return Fraction(n * n, 1 << (_delta_exponent(n, self.c1, self.c2) + 1))

    def marker_interval(self, s: int) -> tuple[Fraction, Fraction]:
        unit = Fraction(1, 4 ** self.marker_exponent(s))
        return (-3 * unit, -unit)

    def comp_interval(self, s: int, regime: str) -> tuple[Fraction, Fraction]:
        if regime not in REGIMES:
            raise ValueError(f"regime must be one of {REGIMES}, got {regime!r}")
        t_sq = self.t_squared(s)
        upper = self.comp_upper_k / t_sq
        if regime == "halting":
            return (Fraction(0), self.comp_upper_k * (self.tail(s) + self.delta_hat(s)) / t_sq)
        if regime == "nonhalting":
            return ((1 - self.tail(s) - self.delta_hat(s)) / t_sq, upper)
        return (Fraction(0), upper)

    def separation_holds(self, s: int) -> bool:
        """Exact check that the marker bonus sits strictly between the
        halting and non-halting computation energies at side s.

        xi^(2s) cancels between T^2 and the bonus, leaving small-integer
        comparisons: no astronomical numbers are materialised.
        """
        n = s - 5
        if n < 2:
            return False
        g = n - choose_m(n)
        b1 = _delta_exponent(n, self.c1, self.c2) + 1
        shift = max(g, b1)
        small = (1 << (shift - g)) + n * n * (1 << (shift - b1))  # 2^shift*(tail+delta)
        two_ct = 2 * self.C * _ceil_root(s, 8)
        poly = s ** (2 * self.poly_degree)
        p, q = self.comp_upper_k.numerator, self.comp_upper_k.denominator
        # upper(halting comp) < -upper(marker):
        #   K*(tail+delta)/T^2 < 4^-X  <=>  p*small*2^(2Ct) < q*s^(2d)*2^shift
        cond1 = p * small << two_ct < q * poly << shift
        # -lower(marker) < lower(nonhalting comp):
        #   3*4^-X < (1-tail-delta)/T^2  <=>  3*s^(2d)*2^shift < (2^shift-small)*2^(2Ct)
        cond2 = 3 * poly << shift < ((1 << shift) - small) << two_ct
        return bool(cond1 and cond2)


@lru_cache(maxsize=64)
def find_s_prime(model: SquareEnergyModel) -> int:
    """Smallest s such that the regime separation holds for every square
    side up to the model's checked range.

    Deterministic exhaustive scan; raises SeparationError when the range
    ends in a violation (constants too loose to ever separate).
    """
    last_bad = S_MIN_SCHEDULE - 1
    for s in range(S_MIN_SCHEDULE, model.s_max_checked + 1):
        if not model.separation_holds(s):
            last_bad = s
    if last_bad >= model.s_max_checked:
        raise SeparationError(
            f"no separation persisting to s_max_checked={model.s_max_checked}"
        )
    return last_bad + 1


@dataclass(frozen=True)
class EnergyInterval:
    """Signed enclosure of one square's ground energy."""

    s: int
    regime: str
    lo: Fraction
    hi: Fraction
    marker_active: bool

    @property
    def sign(self) -> str:
        if self.hi < 0:
            return "negative"
        if self.lo > 0:
            return "positive"
        if self.lo >= 0:
            return "nonnegative"
        return "ambiguous"


def square_energy(s: int, regime: str, model: SquareEnergyModel) -> EnergyInterval:
    """Energy enclosure for a side-s square under the given regime.

    Below the separation scale the marker is positive semidefinite by
    design, so the enclosure is the bare (non-negative) computation
    interval.  At and above it, the summed interval is strictly negative
    in the halting regime and strictly positive in the non-halting one;
    a straddling interval there means the model constants are broken and
    raises rather than classifying.
    """
    if regime not in REGIMES:
        raise ValueError(f"regime must be one of {REGIMES}, got {regime!r}")
    if s < S_MIN_SQUARE:
        raise ValueError(f"square side must be >= {S_MIN_SQUARE}, got {s}")
    if s < S_MIN_SCHEDULE:
        return EnergyInterval(
            s, regime, Fraction(0), model.comp_upper_k / model.t_squared(s), False
        )
    s_prime = find_s_prime(model)
    comp_lo, comp_hi = model.comp_interval(s, regime)
    if s < s_prime:
        return EnergyInterval(s, regime, comp_lo, comp_hi, False)
    mark_lo, mark_hi = model.marker_interval(s)
    interval = EnergyInterval(s, regime, comp_lo + mark_lo, comp_hi + mark_hi, True)
    if regime == "halting" and not interval.hi < 0:
        raise SeparationError(f"halting interval not negative at s={s}")
    if regime == "nonhalting" and not interval.lo > 0:
        raise SeparationError(f"non-halting interval not positive at s={s}")
    return interval


@dataclass(frozen=True)
class SweepResult:
    """Classification of one grid phase under a finite square budget."""

    phi: Dyadic
    gapless: bool
    witness_scale: int | None
    s_budget: int
    energy: EnergyInterval
    trace: tuple[tuple[int, EnergyInterval], ...] = field(repr=False)

    @property
    def classification(self) -> str:
        if self.gapless:
            return f"gapless_evidence({self.witness_scale})"
        return f"no_evidence({self.s_budget})"

    @property
    def first_negative_s(self) -> int | None:
        for s, interval in self.trace:
            if interval.sign == "negative":
                return s
        return None


def sweep(
    phi_grid: list[Dyadic],
    machine: MachineSpec,
    s_budget: int,
    model: SquareEnergyModel,
) -> list[SweepResult]:
    """Classify each grid phase by searching square sides s' <= s <= budget
    for finite-precision witness halting on every best approximation.

    Evidence is only ever emitted together with the reproducible witness
    trace and its strictly negative energy certificate; running out of
    budget is a value (no_evidence), not an error.  The boundary phase
    equal to a machine's exact halting probability never halts, and the
    phase 1 reduces to the all-zero word which loops by convention.
    """
    s_prime = find_s_prime(model)
    if s_budget < s_prime:
        raise ValueError(f"s_budget={s_budget} below separation scale {s_prime}")
    results: list[SweepResult] = []
    for phi in phi_grid:
        if not 0 < phi <= 1:
            raise ValueError(f"grid phases must lie in (0, 1], got {phi}")
        reduced = phi.mod1()
        trace: list[tuple[int, EnergyInterval]] = []
        hit: int | None = None
        for s in range(s_prime, s_budget + 1):
            m = model.m_of(s)
            members = interval_Im(reduced, m)
            verdicts = [
                witness_wprime(machine, BitString.from_dyadic(v, m), m)
                for v in members
            ]
            if all(verdicts):
                regime = "halting"
            elif not any(verdicts):
                regime = "nonhalting"
            else:
                regime = "mixed"
            interval = square_energy(s, regime, model)
            trace.append((s, interval))
            if regime == "halting":
                hit = s
                break
        final = trace[-1][1]
        results.append(
            SweepResult(phi, hit is not None, hit, s_budget, final, tuple(trace))
        )
    return results


# -- reference spectra --------------------------------------------------


@dataclass(frozen=True)
class XYChainSpectrum:
    """Free-fermion solution of the open isotropic XY chain.

    Convention: H = sum_i (X_i X_{i+1} + Y_i Y_{i+1}), open boundaries,
    no field; the hopping matrix has off-diagonal 2, so the modes are
    4 cos(pi j / (L+1)).  Many-body levels are subset sums of the modes.
    """

    L: int
    single_particle: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        self.single_particle.setflags(write=False)

    @property
    def ground_energy(self) -> float:
        return float(self.single_particle[self.single_particle < 0].sum())

    @property
    def gap(self) -> float:
        return float(np.abs(self.single_particle).min())

    def many_body(self, max_levels: int | None = None) -> np.ndarray:
        """Full sorted 2^L spectrum (L <= 16), or the lowest levels via
        a lazy smallest-excitation heap for longer chains."""
        if max_levels is None:
            if self.L > 16:
                raise ValueError("full spectrum only materialised for L <= 16")
            levels = np.zeros(1)
            for eps in self.single_particle:
                levels = np.concatenate([levels, levels + eps])
            return np.sort(levels)
        import heapq

        excitations = np.sort(np.abs(self.single_particle))
        base = self.ground_energy
        # lowest levels = base + k smallest subset sums of the excitations;
        # subsets are grown in index order so each is enumerated once
        heap: list[tuple[float, int]] = [(0.0, 0)]
        out: list[float] = []
        while heap and len(out) < max_levels:
            total, idx = heapq.heappop(heap)
            out.append(base + total)
            for j in range(idx, len(excitations)):
                heapq.heappush(heap, (total + float(excitations[j]), j + 1))
        return np.array(out[:max_levels])


def xy_chain_spectrum(L: int) -> XYChainSpectrum:
    """Diagonalise the open XY chain through its quadratic-fermion form."""
    if L < 2:
        raise ValueError(f"chain length must be >= 2, got {L}")
    hop = np.zeros((L, L))
    idx = np.arange(L - 1)
    hop[idx, idx + 1] = 2.0
    hop[idx + 1, idx] = 2.0
    modes = np.linalg.eigvalsh(hop)
    return XYChainSpectrum(L, modes)


@dataclass(frozen=True)
class ComposedSpectrum:
    """Union spectrum of the coupled (uu x dense) + trivial sectors."""

    beta: Fraction | float
    entries: tuple[tuple[float, str], ...]
    ground_origin: str

    @property
    def lambda0(self):
        return self.entries[0][0]

    @property
    def lambda1(self):
        return self.entries[1][0]

    @property
    def gap(self):
        return self.lambda1 - self.lambda0


def compose_total_spectrum(
    uu_energies, dense_energies, trivial_energies, beta
) -> ComposedSpectrum:
    """Spectrum of the composed model: beta * (pairwise sums of the uu
    and dense sectors) union the trivial sector, each point tagged with
    its origin.

    The ground state lives in the uu x dense sector exactly when
    beta*(min uu + min dense) undercuts the trivial minimum.  Exact
    (Fraction) inputs stay exact, so crossover points can be compared
    algebraically.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if not uu_energies or not dense_energies or not trivial_energies:
        raise ValueError("all three energy lists must be non-empty")
    entries = [
        (beta * (a + b), "uu_dense") for a in uu_energies for b in dense_energies
    ]
    entries += [(t, "trivial") for t in trivial_energies]
    entries.sort(key=lambda e: (e[0], e[1]))
    coupled_min = beta * (min(uu_energies) + min(dense_energies))
    origin = "uu_dense" if coupled_min < min(trivial_energies) else "trivial"
    return ComposedSpectrum(beta, tuple(entries), origin)


def order_parameter(phase_label: str) -> int:
    """Site-averaged diagonal observable: vanishes on the gapless
    sector's ground state, equals one on the trivial product state."""
    values = {"gapless_sector": 0, "trivial_sector": 1}
    if phase_label not in values:
        raise ValueError(
            f"phase label must be one of {sorted(values)}, got {phase_label!r}"
        )
    return values[phase_label]
