import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msefield import (
    DecodingPath,
    MacChannel,
    NonMonotoneSnrError,
    SicStepDec,
    StraightLineDec,
    TabulatedDec,
    dec_apply,
    ese_snr,
    ese_snr_bounds,
    make_sic_path,
    make_straight_line,
    random_monotone_path,
    synthesize_matching_dec,
)


def test_ese_full_interference(two_user):
    assert np.allclose(ese_snr(two_user, [1, 1]), [0.5, 0.5])


def test_ese_no_interference(two_user):
    assert np.allclose(ese_snr(two_user, [0, 0]), [1, 1])


def test_ese_single_user_ignores_v():
    ch = MacChannel.from_gains([2.0])
    assert np.allclose(ese_snr(ch, [[0.0], [0.3], [1.0]]), 2.0)


@pytest.mark.parametrize(
    "gains, lo, hi",
    [([1, 1], [0.5, 0.5], [1, 1]), ([3], [3], [3]), ([2, 1], [1, 1 / 3], [2, 1])],
)
def test_bounds(gains, lo, hi):
    rho_min, rho_max = ese_snr_bounds(MacChannel.from_gains(gains))
    assert np.allclose(rho_min, lo) and np.allclose(rho_max, hi)


def test_ese_rejects_out_of_cube(two_user):
    with pytest.raises(ValueError):
        ese_snr(two_user, [1.2, 0.0])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_ese_within_bounds_and_decreasing_in_interference(k, seed):
    rng = np.random.default_rng(seed)
    ch = MacChannel.from_gains(rng.uniform(0.01, 10, k), rng.uniform(0.1, 3))
    v = rng.uniform(size=k)
    rho = ese_snr(ch, v)
    lo, hi = ese_snr_bounds(ch)
    assert np.all(lo <= rho * (1 + 1e-12)) and np.all(rho <= hi * (1 + 1e-12))
    bigger = np.minimum(v + rng.uniform(0, 0.5, k), 1.0)
    assert np.all(ese_snr(ch, bigger) <= rho * (1 + 1e-12))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_ese_permutation_equivariant(k, seed):
    rng = np.random.default_rng(seed)
    ch = MacChannel.from_gains(rng.uniform(0.1, 5, k))
    v = rng.uniform(size=k)
    perm = rng.permutation(k)
    assert np.allclose(ese_snr(ch.permuted(perm), v[perm]), ese_snr(ch, v)[perm])


def test_straight_line_dec_points(two_user):
    dec = synthesize_matching_dec(two_user, make_straight_line(2), 0)
    assert isinstance(dec, StraightLineDec)
    assert dec(0.5) == pytest.approx(1.0)
    assert dec(1.0) == pytest.approx(0.0)
    assert dec(2 / 3) == pytest.approx(0.5)
    assert dec(0.25) == 1.0 and dec(5.0) == 0.0


def test_straight_line_dec_unequal_gains():
    ch = MacChannel.from_gains([2.0, 1.0])
    dec = synthesize_matching_dec(ch, make_straight_line(2), 0)
    assert dec(1.0) == pytest.approx(1.0) and dec(2.0) == pytest.approx(0.0)


def test_sic_dec_is_step(two_user):
    dec = synthesize_matching_dec(two_user, make_sic_path([0, 1]), 0)
    assert isinstance(dec, SicStepDec)
    assert dec.threshold == pytest.approx(0.5)
    assert dec(0.5) == 0.0 and dec(0.4999) == 1.0
    last = synthesize_matching_dec(two_user, make_sic_path([0, 1]), 1)
    assert last.threshold == pytest.approx(1.0)


def test_straight_line_table_matches_generic_synthesis():
    # a straight line described by waypoints goes through the tabulated route
    ch = MacChannel.from_gains([2.0, 1.0, 0.5])
    closed = synthesize_matching_dec(ch, make_straight_line(3), 1)
    generic = synthesize_matching_dec(
        ch, DecodingPath(np.array([[1, 1, 1], [0.5, 0.5, 0.5], [0, 0, 0]])), 1, grid_size=2000
    )
    assert isinstance(generic, TabulatedDec)
    rho = np.linspace(closed.rho_min, closed.rho_max, 300)
    assert np.max(np.abs(generic(rho) - closed(rho))) < 1e-6


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_matched_dec_round_trip(k, n_way, seed):
    rng = np.random.default_rng(seed)
    ch = MacChannel.from_gains(rng.uniform(0.2, 4.0, k))
    p = random_monotone_path(k, n_way, rng)
    user = int(rng.integers(k))
    dec = synthesize_matching_dec(ch, p, user, grid_size=1000)
    t = np.sort(rng.uniform(size=200))
    v = p(t)
    rho = ese_snr(ch, v)[:, user]
    got = dec(rho)
    # the curve never sits above the path, and matches it wherever rho moves
    assert np.all(got <= v[:, user] + 1e-6)
    eps = 1e-7
    moving = ese_snr(ch, p(np.clip(t + eps, 0, 1)))[:, user] - ese_snr(ch, p(np.clip(t - eps, 0, 1)))[:, user]
    strict = np.abs(moving) > 1e-12
    assert np.all(np.abs(got[strict] - v[strict, user]) <= 1e-6)


def test_non_monotone_snr_detected(two_user):
    # user 1's MSE climbs, so user 0's SNR falls on that stretch
    bad = DecodingPath(np.array([[1.0, 1.0], [1.0, 0.2], [0.8, 0.6], [0.0, 0.0]]))
    with pytest.raises(NonMonotoneSnrError) as info:
        synthesize_matching_dec(two_user, bad, 0)
    t0, t1 = info.value.t_interval
    assert bad.knots[1] <= t0 < t1 <= bad.knots[2] + 1e-9


def test_tabulated_drop_takes_lower_value():
    dec = TabulatedDec(0, [0.5, 1.0, 1.0, 2.0], [1.0, 0.6, 0.2, 0.0])
    assert dec(1.0) == pytest.approx(0.2)
    # linear in 1/rho between the first two points
    assert dec(0.75) == pytest.approx(0.6 + 0.4 * (1 / 0.75 - 1) / (1 / 0.5 - 1))
    assert dec(0.1) == 1.0 and dec(3.0) == 0.0


def test_tabulated_rejects_increasing_v():
    with pytest.raises(ValueError):
        TabulatedDec(0, [0.0, 1.0], [0.2, 0.5])


def test_shift_moves_curve_right(two_user):
    dec = synthesize_matching_dec(two_user, make_straight_line(2), 0)
    shifted = dec.shifted(0.1)
    rho = np.linspace(0.6, 0.95, 20)
    assert np.all(shifted(rho + 0.1) == pytest.approx(dec(rho), abs=1e-6))
    assert np.all(shifted(rho) >= dec(rho))


def test_csv_export(two_user):
    text = synthesize_matching_dec(two_user, make_straight_line(2), 0).to_csv(5)
    rows = text.strip().splitlines()
    assert rows[0] == "rho,v"
    assert rows[1] == "0.5,1" and rows[-1] == "1,0"


def test_dec_apply_rejects_negative(two_user):
    dec = synthesize_matching_dec(two_user, make_straight_line(2), 0)
    with pytest.raises(ValueError):
        dec_apply(dec, -1.0)
