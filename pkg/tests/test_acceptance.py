"""Acceptance checks, one test per criterion.

Each test records its measured figure of merit; the terminal summary prints
one PASS/FAIL line per criterion.
"""
import itertools
import math
import time

import numpy as np
import pytest

from msefield import (
    GAUSSIAN,
    MacChannel,
    MimoMacChannel,
    enumerate_constraints,
    evolve,
    is_feasible,
    jacobi_gradient_check,
    make_sic_path,
    make_straight_line,
    matched_decs,
    mimo_rates_along_path,
    mimo_sum_rate,
    monte_carlo_ese,
    per_user_bounds,
    random_monotone_path,
    rate_general_alphabet,
    rates_gaussian,
    sum_rate_closed_form,
    synthesize_matching_dec,
)


def _note(request, text):
    request.node.criterion_note = text


@pytest.mark.criterion(1, "path independence on g=[1,1]")
def test_path_independence(request, two_user):
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    paths = [make_straight_line(2), make_sic_path([0, 1]), make_sic_path([1, 0])]
    paths += [random_monotone_path(2, int(rng.integers(1, 6)), rng) for _ in range(10)]
    sums = np.array([rates_gaussian(two_user, p).sum for p in paths])
    elapsed = time.perf_counter() - start
    worst = float(np.max(np.abs(sums - math.log(3)) / math.log(3)))
    _note(request, f"max rel dev {worst:.1e}, {elapsed:.2f} s")
    assert worst <= 1e-6
    assert elapsed < 1.0


@pytest.mark.criterion(2, "straight-line split proportional to gains")
def test_straight_line_split(request):
    start = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for i in range(20):
        k = (2, 3, 5)[i % 3]
        ch = MacChannel.from_gains(rng.uniform(0.1, 10.0, k), noise_var=rng.uniform(0.2, 3.0))
        got = rates_gaussian(ch, make_straight_line(k)).per_user
        g = ch.gains
        want = g / g.sum() * math.log1p(g.sum() / ch.noise_var)
        worst = max(worst, float(np.max(np.abs(got - want))))
    elapsed = time.perf_counter() - start
    _note(request, f"max abs dev {worst:.1e}, {elapsed:.2f} s")
    assert worst <= 1e-8
    assert elapsed < 5.0


@pytest.mark.criterion(3, "SIC paths land on region vertices")
def test_sic_corners(request):
    rng = np.random.default_rng(3)
    ch = MacChannel.from_gains(rng.uniform(0.2, 5.0, 3), noise_var=1.0)
    bounds = {c.subset: c.bound for c in enumerate_constraints(ch)}
    worst = 0.0
    for order in itertools.permutations(range(3)):
        r = rates_gaussian(ch, make_sic_path(order)).per_user
        # users decoded last see least interference: every tail of the order is tight
        for i in range(3):
            tail = tuple(sorted(order[i:]))
            worst = max(worst, abs(r[list(tail)].sum() - bounds[tail]))
        assert is_feasible(ch, r, slack=1e-9)
    _note(request, f"max tight gap {worst:.1e}")
    assert worst <= 1e-9


@pytest.mark.criterion(4, "general-alphabet route equals Gaussian integrand route")
def test_general_alphabet_equivalence(request):
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(20):
        k = int(rng.integers(2, 5))
        ch = MacChannel.from_gains(rng.uniform(0.1, 5.0, k), noise_var=rng.uniform(0.5, 2.0))
        p = random_monotone_path(k, int(rng.integers(0, 4)), rng)
        a = rate_general_alphabet(ch, p, GAUSSIAN).per_user
        b = rates_gaussian(ch, p).per_user
        worst = max(worst, float(np.max(np.abs(a - b))))
    _note(request, f"max abs dev {worst:.1e}")
    assert worst <= 1e-8


def _brute_force_feasible(g, s2, r, slack=1e-9):
    k = len(g)
    for mask in range(1, 2**k):
        idx = [i for i in range(k) if mask >> i & 1]
        if sum(r[i] for i in idx) > math.log(1 + sum(g[i] for i in idx) / s2) + slack:
            return False
    return True


@pytest.mark.criterion(5, "region feasibility and per-user bounds")
def test_region_feasibility(request):
    rng = np.random.default_rng(5)
    ch = MacChannel.from_gains(rng.uniform(0.3, 4.0, 4), noise_var=1.0)
    g = ch.gains.tolist()
    cap = sum_rate_closed_form(ch)
    n_feasible = 0
    for _ in range(100):
        r = rng.uniform(0, cap / 2.5, 4)
        verdict = is_feasible(ch, r).feasible
        assert verdict == _brute_force_feasible(g, 1.0, r.tolist())
        n_feasible += verdict
    lo, hi = per_user_bounds(ch)
    for _ in range(50):
        r = rates_gaussian(ch, random_monotone_path(4, int(rng.integers(0, 5)), rng)).per_user
        assert np.all(r >= lo - 1e-9) and np.all(r <= hi + 1e-9)
    _note(request, f"{n_feasible}/100 feasible, verdicts agree")
    # both verdicts must actually occur for the comparison to mean anything
    assert 0 < n_feasible < 100


def _random_mimo(rng, n_r, n_ts):
    chans = [
        (rng.standard_normal((n_r, nt)) + 1j * rng.standard_normal((n_r, nt))) / math.sqrt(2)
        for nt in n_ts
    ]
    return MimoMacChannel(tuple(chans), rng.uniform(0.5, 2.0, len(n_ts)), rng.uniform(0.3, 2.0))


@pytest.mark.criterion(6, "Jacobi identity for the LMMSE gradient")
def test_jacobi(request):
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(20):
        n_r = int(rng.integers(1, 5))
        k = int(rng.integers(1, 4))
        n_ts = [1] * k
        for _ in range(int(rng.integers(0, 7 - k))):
            n_ts[int(rng.integers(k))] += 1
        ch = _random_mimo(rng, n_r, n_ts)
        worst = max(worst, jacobi_gradient_check(ch, rng.uniform(0.05, 0.95, k)))
    _note(request, f"max dev {worst:.1e}")
    assert worst < 1e-6


@pytest.mark.criterion(7, "MIMO reduces to scalar and is path independent")
def test_mimo_consistency(request):
    rng = np.random.default_rng(7)
    worst_scalar = 0.0
    for _ in range(10):
        k = int(rng.integers(1, 5))
        fading = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        ch = MacChannel(rng.uniform(0.2, 3.0, k), fading, noise_var=rng.uniform(0.5, 2.0))
        worst_scalar = max(
            worst_scalar,
            abs(mimo_sum_rate(MimoMacChannel.from_scalar(ch)) - sum_rate_closed_form(ch)),
        )
    ch = _random_mimo(rng, 3, [2, 1, 1])
    paths = [make_straight_line(3), make_sic_path([2, 0, 1]), random_monotone_path(3, 3, rng)]
    sums = np.array([mimo_rates_along_path(ch, p).sum for p in paths])
    worst_path = float(np.max(np.abs(sums - mimo_sum_rate(ch))))
    _note(request, f"scalar dev {worst_scalar:.1e}, path dev {worst_path:.1e}")
    assert worst_scalar <= 1e-10
    assert worst_path <= 1e-6


@pytest.mark.criterion(8, "Monte Carlo SINR matches the ESE prediction")
def test_monte_carlo(request, two_user):
    start = time.perf_counter()
    worst = 0.0
    for v in ([1.0, 1.0], [0.5, 0.5], [0.0, 0.0]):
        rep = monte_carlo_ese(two_user, v, n_samples=1_000_000, seed=8)
        worst = max(worst, float(np.max(np.abs(rep.z_scores()))))
    elapsed = time.perf_counter() - start
    _note(request, f"max |z| {worst:.2f}, {elapsed:.1f} s")
    assert worst <= 3.0
    assert elapsed < 30.0


@pytest.mark.criterion(9, "matched DECs converge, degraded DECs stall")
def test_convergence(request, two_user):
    decs = matched_decs(two_user, make_straight_line(2))
    good = evolve(two_user, decs, slack=1e-3)
    assert good.converged and np.all(good.v[-1] < 1e-8)
    degraded = [d.shifted(0.02) for d in decs]
    bad = evolve(two_user, degraded, slack=1e-3)
    final = bad.v[-1]
    _note(request, f"converged in {good.iterations_used} it; degraded stalls at v={final[0]:.3g}")
    assert not bad.converged
    assert np.all((final > 0) & (final < 1))


@pytest.mark.criterion(10, "code-design BER results (excluded at desk scale)")
def test_dec_export_for_code_design(request, two_user):
    # the coded BER experiments are out of scope; check the DEC export a code designer would use
    dec = synthesize_matching_dec(two_user, make_straight_line(2), 0)
    lines = dec.to_csv(11).splitlines()
    assert lines[0] == "rho,v"
    _note(request, "excluded; DEC-curve export checked instead")
    pytest.skip("coded BER reproduction needs external LDPC constructions")
