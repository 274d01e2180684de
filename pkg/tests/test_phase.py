"""Precision schedule, per-square energy model, phase sweep, and the
reference spectra used for the composed model."""

from fractions import Fraction

import numpy as np
import pytest

from omegaphase.dyadic import Dyadic
from omegaphase.phase import (
    SeparationError,
    SquareEnergyModel,
    choose_m,
    compose_total_spectrum,
    find_s_prime,
    order_parameter,
    schedule_constraint_ok,
    square_energy,
    sweep,
    xy_chain_spectrum,
)
from omegaphase.qpe import sk_delta
from omegaphase.zoo import ZOO, zoo_machine

DEFAULT = SquareEnergyModel()
S_PRIME_DEFAULT = 6567  # derived once by the exhaustive scan, frozen


def test_choose_m_examples():
    assert choose_m(2) == 1
    assert choose_m(16) == 14
    assert choose_m(81) == 78
    with pytest.raises(ValueError):
        choose_m(1)


def test_choose_m_constraint_and_monotone_sample():
    values = [choose_m(n) for n in range(2, 2001)]
    assert all(a <= b for a, b in zip(values, values[1:]))
    for n, m in zip(range(2, 2001), values):
        assert schedule_constraint_ok(n, m)
    # diverges
    assert choose_m(10**6) > 10**5


def test_model_validation():
    with pytest.raises(ValueError):
        SquareEnergyModel(xi=1)
    with pytest.raises(ValueError):
        SquareEnergyModel(xi=6)
    with pytest.raises(ValueError):
        SquareEnergyModel(c1=4.5)
    with pytest.raises(ValueError):
        SquareEnergyModel(c2=0.5)
    with pytest.raises(ValueError):
        SquareEnergyModel(comp_upper_k=Fraction(-1))
    assert SquareEnergyModel(xi=4).C == 2


def test_delta_hat_upper_bounds_model_error():
    for s in (10, 50, 200, 1000):
        exact = sk_delta(DEFAULT.n_of(s), DEFAULT.c1, DEFAULT.c2)
        assert float(DEFAULT.delta_hat(s)) >= exact
        assert float(DEFAULT.delta_hat(s)) <= 2.0 * exact + 1e-300


def test_find_s_prime_default_frozen():
    sp = find_s_prime(DEFAULT)
    assert sp == S_PRIME_DEFAULT
    assert DEFAULT.separation_holds(sp)
    assert not DEFAULT.separation_holds(sp - 1)


def test_s_prime_monotone_in_marker_constant():
    # tripling the marker exponent constant (xi 2 -> 8, so C 1 -> 3)
    # shrinks the bonus; separation moves out of the checked range,
    # i.e. s' weakly increases (treated as infinite here)
    try:
        tripled = find_s_prime(SquareEnergyModel(xi=8))
    except SeparationError:
        tripled = float("inf")
    assert tripled >= find_s_prime(DEFAULT)


def test_find_s_prime_rejects_loose_constants():
    with pytest.raises(SeparationError):
        find_s_prime(SquareEnergyModel(comp_upper_k=Fraction(2**200), s_max_checked=4096))


def test_square_energy_signs():
    sp = find_s_prime(DEFAULT)
    halting = square_energy(sp, "halting", DEFAULT)
    assert halting.sign == "negative" and halting.marker_active
    nonhalting = square_energy(sp, "nonhalting", DEFAULT)
    assert nonhalting.sign == "positive"
    mixed = square_energy(sp, "mixed", DEFAULT)
    assert mixed.lo == -3 * Fraction(1, 4 ** DEFAULT.marker_exponent(sp))
    below = square_energy(sp - 1, "halting", DEFAULT)
    assert not below.marker_active and below.lo >= 0
    tiny = square_energy(3, "halting", DEFAULT)
    assert tiny.lo >= 0
    with pytest.raises(ValueError):
        square_energy(2, "halting", DEFAULT)
    with pytest.raises(ValueError):
        square_energy(10, "sideways", DEFAULT)


def test_marker_interval_formula():
    s = 100
    x = DEFAULT.marker_exponent(s)
    assert x == DEFAULT.C * (s + 2)  # ceil(100^(1/8)) = 2
    lo, hi = DEFAULT.marker_interval(s)
    assert lo == Fraction(-3, 4**x) and hi == Fraction(-1, 4**x)


def test_sweep_classification_omega34():
    o34 = zoo_machine("omega34")
    sp = find_s_prime(DEFAULT)
    grid = [Dyadic(1, 1), Dyadic(5, 3), Dyadic(3, 2), Dyadic(7, 3), Dyadic(1)]
    results = sweep(grid, o34, sp + 1, DEFAULT)
    gapless = [r.gapless for r in results]
    assert gapless == [True, True, False, False, False]
    hit = results[0]
    assert hit.witness_scale == sp
    assert hit.first_negative_s == sp
    assert hit.energy.sign == "negative"
    assert hit.classification == f"gapless_evidence({sp})"
    miss = results[2]  # the exact halting probability: gapped side
    assert miss.classification == f"no_evidence({sp + 1})"
    assert miss.energy.sign == "positive"
    assert miss.witness_scale is None and miss.first_negative_s is None


def test_sweep_rejects_bad_budget_and_grid():
    o34 = zoo_machine("omega34")
    sp = find_s_prime(DEFAULT)
    with pytest.raises(ValueError):
        sweep([Dyadic(1, 1)], o34, sp - 1, DEFAULT)
    with pytest.raises(ValueError):
        sweep([Dyadic(0)], o34, sp, DEFAULT)
    assert sweep([], o34, sp, DEFAULT) == []


def test_sweep_never_misclassifies_zoo():
    sp = find_s_prime(DEFAULT)
    grid = [Dyadic(k, 4) for k in range(1, 17)]
    for name, entry in ZOO.items():
        if not entry.prefix_free:
            continue
        spec = zoo_machine(name)
        for result in sweep(grid, spec, sp + 1, DEFAULT):
            expected = result.phi.mod1() < entry.omega and result.phi != Dyadic(1)
            assert result.gapless == expected, (name, str(result.phi))


def xy_dense_oracle(L):
    """Brute-force 2^L matrix for H = sum XX + YY, open chain."""
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    dim = 2**L
    ham = np.zeros((dim, dim), dtype=complex)
    for i in range(L - 1):
        for op in (sx, sy):
            term = np.eye(1, dtype=complex)
            for site in range(L):
                factor = op if site in (i, i + 1) else np.eye(2, dtype=complex)
                term = np.kron(term, factor)
            ham += term
    return ham


def test_xy_matches_dense_oracle():
    for L in (2, 3, 4, 6):
        spectrum = xy_chain_spectrum(L)
        dense = np.linalg.eigvalsh(xy_dense_oracle(L))
        free = spectrum.many_body()
        assert len(free) == 2**L
        assert np.max(np.abs(np.sort(dense) - free)) < 1e-9


def test_xy_gap_decay():
    gaps = [xy_chain_spectrum(L).gap for L in (4, 8, 16, 32, 64)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.1
    # ~1/L decay: L*gap stays in a narrow band
    products = [L * g for L, g in zip((4, 8, 16, 32, 64), gaps)]
    assert max(products) / min(products) < 1.5


def test_xy_low_levels_match_full():
    spec = xy_chain_spectrum(8)
    assert np.allclose(spec.many_body(max_levels=12), spec.many_body()[:12])
    with pytest.raises(ValueError):
        xy_chain_spectrum(1)


def test_xy_low_levels_beyond_full_materialisation():
    spec = xy_chain_spectrum(32)
    low = spec.many_body(max_levels=4)
    assert abs(low[0] - spec.ground_energy) < 1e-12
    assert abs(low[1] - (spec.ground_energy + spec.gap)) < 1e-12
    assert all(a <= b + 1e-12 for a, b in zip(low, low[1:]))
    with pytest.raises(ValueError):
        spec.many_body()  # 2^32 levels will not be materialised


def test_compose_gap_one_branch():
    # non-negative coupled sector: ground is the trivial product state,
    # spectral gap exactly 1 regardless of beta
    for beta in (Fraction(1, 7), Fraction(1), Fraction(5)):
        composed = compose_total_spectrum(
            [Fraction(0), Fraction(2)],
            [Fraction(0), Fraction(1)],
            [Fraction(-8), Fraction(-7), Fraction(0)],
            beta,
        )
        assert composed.ground_origin == "trivial"
        assert composed.lambda0 == -8 and composed.gap == 1


def test_compose_coupled_branch_and_crossover():
    uu = [Fraction(-1), Fraction(1)]
    dense = [Fraction(0), Fraction(1, 2)]
    trivial = [Fraction(-4), Fraction(-3)]
    # crossover exactly at beta = 4: below it the trivial sector wins
    below = compose_total_spectrum(uu, dense, trivial, Fraction(4) - Fraction(1, 100))
    above = compose_total_spectrum(uu, dense, trivial, Fraction(4) + Fraction(1, 100))
    assert below.ground_origin == "trivial"
    assert above.ground_origin == "uu_dense"
    boundary = compose_total_spectrum(uu, dense, trivial, Fraction(4))
    assert boundary.ground_origin == "trivial"  # ties stay trivial
    assert above.lambda0 == (Fraction(4) + Fraction(1, 100)) * Fraction(-1)


def test_compose_tags_and_validation():
    composed = compose_total_spectrum([0.0], [1.0], [5.0], 2.0)
    assert composed.entries == ((2.0, "uu_dense"), (5.0, "trivial"))
    with pytest.raises(ValueError):
        compose_total_spectrum([0.0], [1.0], [5.0], 0.0)
    with pytest.raises(ValueError):
        compose_total_spectrum([], [1.0], [5.0], 1.0)


def test_order_parameter():
    assert order_parameter("gapless_sector") == 0
    assert order_parameter("trivial_sector") == 1
    with pytest.raises(ValueError):
        order_parameter("critical")
