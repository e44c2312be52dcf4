import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from inclusionlab.errors import DomainError, InputError
from inclusionlab.linalg import SystemSpec, co_norm, operator_norm, word_product
from inclusionlab.lyapunov import (
    Cursor,
    default_windows,
    exponent_vs_jsr_bounds,
    explicit_law,
    partial_exponents,
    random_switching_exponent,
    sample_trial,
    simulate,
)
from inclusionlab.spectral import cojsr_bounds, jsr_bounds
from inclusionlab.symbolic import EventuallyPeriodic, constant_law, geometric_law
from inclusionlab.synth import synthesize_zero_exponent
from systems import diag_pair, golden_rotation_system, rot, scalar_half_two

LOG2 = math.log(2)


def test_simulate_scalar_constant():
    rec = simulate(scalar_half_two(), constant_law(1), [1.0], 4)
    assert (rec.log_norms / LOG2).tolist() == pytest.approx([-1, -2, -3, -4], abs=1e-14)


def test_simulate_diagonal_alternating():
    rec = simulate(diag_pair(), EventuallyPeriodic((), (1, 2)), [1.0, 0.0], 4)
    assert np.exp(rec.log_norms).tolist() == pytest.approx([2, 6, 12, 36], rel=1e-14)


def test_simulate_eigenvector_decay():
    rec = simulate(golden_rotation_system(), constant_law(3), [0.0, 1.0], 10)
    assert rec.log_norms.tolist() == pytest.approx([-n * LOG2 for n in range(1, 11)], abs=1e-12)


def test_simulate_rejects_zero_and_wrong_shape():
    with pytest.raises(DomainError):
        simulate(diag_pair(), constant_law(1), [0.0, 0.0], 3)
    with pytest.raises(InputError):
        simulate(diag_pair(), constant_law(1), [1.0], 3)


def test_checkpoints_hold_unit_states():
    S = golden_rotation_system()
    w = (1, 2, 3, 1, 1, 2, 3, 3)
    rec = simulate(S, explicit_law(w), [1.0, 2.0], 8, checkpoints=[3, 8])
    for c, u in zip(rec.checkpoints, rec.renorm_states):
        x = word_product(S, w[:c]) @ np.array([1.0, 2.0])
        assert np.allclose(u, x / np.linalg.norm(x), atol=1e-12)


def test_renormalised_matches_direct_short_horizon():
    S = golden_rotation_system()
    rng = np.random.default_rng(5)
    w = tuple(int(s) for s in rng.integers(1, 4, 30))
    x0 = np.array([0.3, -0.7])
    rec = simulate(S, explicit_law(w), x0, 30)
    for n in range(1, 31):
        direct = np.linalg.norm(word_product(S, w[:n]) @ x0)
        assert math.exp(rec.log_norms[n - 1]) == pytest.approx(direct, rel=1e-8)


def test_cursor_incremental_is_bit_identical():
    S = golden_rotation_system()
    law = geometric_law((1, 2, 3))
    sym = law.take(500)
    full = Cursor(S, [1.0, 1.0])
    a, _ = full.advance(sym)
    part = Cursor(S, [1.0, 1.0])
    pieces = [part.advance(sym[i:j])[0] for i, j in ((0, 7), (7, 200), (200, 201), (201, 500))]
    assert np.array_equal(a, np.concatenate(pieces))
    assert np.array_equal(full.u, part.u) and full.s == part.s


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=1, max_size=25),
       st.tuples(st.floats(-5, 5), st.floats(-5, 5)), st.tuples(st.floats(-5, 5), st.floats(-5, 5)))
def test_linearity_of_trajectories(w, x, y):
    x, y = np.array(x), np.array(y)
    if np.linalg.norm(x) < 1e-3 or np.linalg.norm(y) < 1e-3 or np.linalg.norm(x - y) < 1e-3:
        return
    S = golden_rotation_system()
    P = word_product(S, w)
    law = explicit_law(w)
    n = len(w)

    def state(v):
        rec = simulate(S, law, v, n, checkpoints=[n])
        return math.exp(rec.log_norms[-1]) * rec.renorm_states[-1]

    scale = operator_norm(P) * (np.linalg.norm(x) + np.linalg.norm(y))
    assert np.allclose(state(x - y), state(x) - state(y), atol=1e-9 * scale)
    assert np.allclose(state(x), P @ x, atol=1e-9 * scale)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=1, max_size=25), st.floats(0, 2 * math.pi))
def test_norm_bracket(w, angle):
    S = golden_rotation_system()
    x0 = np.array([math.cos(angle), math.sin(angle)])
    rec = simulate(S, explicit_law(w), x0, len(w))
    for n in range(1, len(w) + 1):
        P = word_product(S, w[:n])
        v = math.exp(rec.log_norms[n - 1])
        assert co_norm(P) * (1 - 1e-9) <= v <= operator_norm(P) * (1 + 1e-9)


# -- partial exponents -----------------------------------------------------


def test_partial_exponents_constant():
    rec = simulate(scalar_half_two(), constant_law(1), [1.0], 1000)
    summ = partial_exponents(rec)
    assert summ.liminf_est == pytest.approx(-LOG2) and summ.limsup_est == pytest.approx(-LOG2)
    assert not summ.irregular


def test_partial_exponents_geometric_law_is_irregular():
    N = 2**14
    summ = partial_exponents(simulate(scalar_half_two(), geometric_law(), [1.0], N))
    assert summ.liminf_est <= -LOG2 / 3 + 1e-12
    assert summ.limsup_est >= LOG2 / 3 - 1e-12
    assert summ.irregular


def test_partial_exponents_block_boundary_values():
    N = 2**14
    rec = simulate(scalar_half_two(), geometric_law(), [1.0], N)
    lam = rec.partial_exponents
    for J in range(2, 13):
        n = 2 ** (J + 1) - 2
        if J % 2:
            expected = -(2**J + 1) / (3 * (2**J - 1)) * LOG2
        else:
            expected = LOG2 / 3
        assert lam[n - 1] == pytest.approx(expected, rel=1e-12)


def test_partial_exponents_zero_exponent_law():
    N = 10_000
    S = scalar_half_two()
    res = synthesize_zero_exponent(S, (1,), (2,), [1.0], (0.25, 4.0), N)
    rec = simulate(S, res.law, [1.0], N)
    summ = partial_exponents(rec)
    n_min = min(lo for lo, _ in summ.windows)
    C = res.excursion_bound.C
    assert abs(summ.liminf_est) <= C / n_min and abs(summ.limsup_est) <= C / n_min
    assert not summ.irregular


def test_window_validation():
    rec = simulate(scalar_half_two(), constant_law(1), [1.0], 10)
    with pytest.raises(DomainError):
        partial_exponents(rec, [(0, 5)])
    assert default_windows(100) == [(25, 50), (50, 100)]


# -- Monte Carlo -----------------------------------------------------------


def test_monte_carlo_rotation_is_zero():
    mc = random_switching_exponent(SystemSpec.of(rot(0.3), rot(1.2)), None, 4, 1000, seed=1)
    assert np.all(np.abs(mc.estimates) < 1e-12)


def test_monte_carlo_degenerate_weights():
    mc = random_switching_exponent(scalar_half_two(), [1.0, 0.0], 3, 500, seed=2)
    assert mc.mean == pytest.approx(-LOG2, rel=1e-12)


def test_monte_carlo_reproducible_and_thread_independent():
    S = golden_rotation_system()
    a = random_switching_exponent(S, None, 130, 300, seed=11, keep_laws=True, threads=1)
    b = random_switching_exponent(S, None, 130, 300, seed=11, keep_laws=True, threads=8)
    assert np.array_equal(a.estimates, b.estimates)
    assert all(np.array_equal(x, y) for x, y in zip(a.laws, b.laws))
    c = random_switching_exponent(S, None, 130, 300, seed=12)
    assert not np.array_equal(a.estimates, c.estimates)


def test_monte_carlo_matches_sequential_simulation():
    S = golden_rotation_system()
    mc = random_switching_exponent(S, [0.5, 0.25, 0.25], 3, 400, seed=4, keep_laws=True)
    for t in range(3):
        x0, sym = sample_trial(S.K, S.dim, np.array([0.5, 0.25, 0.25]), 400, 4, t)
        assert np.array_equal(sym, mc.laws[t]) and np.array_equal(x0, mc.x0s[t])
        rec = simulate(S, explicit_law(sym), x0, 400)
        assert mc.estimates[t] == pytest.approx(rec.log_norms[-1] / 400, rel=1e-10, abs=1e-12)


def test_monte_carlo_weight_validation():
    with pytest.raises(InputError):
        random_switching_exponent(scalar_half_two(), [0.7, 0.7], 2, 10, seed=0)


# -- consistency with JSR bounds ------------------------------------------


@pytest.mark.parametrize("S", [diag_pair(), scalar_half_two(), SystemSpec.of(rot(0.5), rot(1.5)), golden_rotation_system()])
def test_exponents_respect_jsr_bounds(S):
    bt, ct = jsr_bounds(S, 6), cojsr_bounds(S, 6)
    mc = random_switching_exponent(S, None, 20, 2000, seed=3, keep_laws=True)
    recs = [simulate(S, explicit_law(l), x0, 2000) for l, x0 in zip(mc.laws, mc.x0s)]
    recs.append(simulate(S, geometric_law((1, S.K)), [1.0] * S.dim, 2000))
    rep = exponent_vs_jsr_bounds(S, recs, bt, ct)
    assert rep.consistent, rep.violations


def test_rotation_exponents_are_zero_within_bounds():
    S = SystemSpec.of(rot(0.5), rot(1.5))
    rep = exponent_vs_jsr_bounds(S, [simulate(S, constant_law(1), [1.0, 0.0], 100)], jsr_bounds(S, 3), cojsr_bounds(S, 3))
    assert rep.log_upper == pytest.approx(0.0, abs=1e-12) and rep.log_lower == pytest.approx(0.0, abs=1e-12)
    assert rep.checks[0].exponent == pytest.approx(0.0, abs=1e-14)
