"""Exit criteria, one test per criterion, each at its stated tolerance."""

import math
from fractions import Fraction

import numpy as np

from oracles import random_density, random_step_function, riemann_integral
from pillrisk.catastrophic import (
    AgentKind,
    CatastropheRanking,
    classify_agent,
    lambda_threshold,
    lebesgue_part,
    limit_at_zero,
    modify_near_zero,
    pill_density,
    pill_step_lottery,
    rank_value,
    w_lambda,
)
from pillrisk.lottery import DiscreteLottery, certainty_equivalent, mean
from pillrisk.pill import (
    PillDeal,
    acceptance_probability_threshold,
    calibrate_gamma,
    deal_value,
    implied_life,
)
from pillrisk.population import PopulationSpec, simulate, summarize
from pillrisk.utility import CaraExp, Linear, PowerNeg

R = 220_000.0
P = 1e-9
COIN = DiscreteLottery(((100.0, 0.5), (200.0, 0.5)))


def test_criterion_01_coin_flip_certainty_equivalents(criterion):
    c = criterion(1, "coin-flip certainty equivalents")
    lin = certainty_equivalent(Linear(), COIN)
    c.check(lin == 150.0, f"linear CE {lin!r} != 150")
    cara = certainty_equivalent(CaraExp(1e-5), COIN)
    c.check(abs(cara - 149.98) <= 0.005, f"CARA gamma=1e-5 CE {cara:.6f} vs 149.98 +/- 0.005")
    power = certainty_equivalent(PowerNeg(7.0), COIN)
    c.check(abs(power - 110.3) <= 0.05, f"power gamma=7 CE {power:.6f} vs 110.3 +/- 0.05")
    c.finish()


def test_criterion_02_pill_deal_values(criterion):
    c = criterion(2, "CARA pill-deal values within 1%")
    for exponent, p, published in ((-5.0, 1e-9, 2.18e6), (-4.9, 1e-10, 2.04e6), (-4.8, 1e-13, 2.10e6)):
        v = deal_value(CaraExp(10.0**exponent), PillDeal(2e6, R, p))
        c.check(abs(v - published) <= 0.01 * published, f"gamma=10^{exponent}, p={p:g}: {v:.6g} vs {published:.3g}")
    c.finish()


def test_criterion_03_life_values_and_calibration(criterion):
    c = criterion(3, "implied life values and gamma calibration")
    lin = implied_life(Linear(), R, P)
    c.check(lin == R / P and math.isclose(lin, 2.2e14, rel_tol=1e-15), f"linear implied life {lin!r}")
    for u, published in (
        (CaraExp(10**-5.53), 7.0e6),
        (CaraExp(10**-4.86), 1.7e6),
        (PowerNeg(5.3), 7.0e6),
        (PowerNeg(10.0), 1.7e6),
    ):
        l = implied_life(u, R, P)
        c.check(abs(l - published) <= 0.05 * published, f"{u}: implied life {l:.6g} vs {published:.2g} +/- 5% (off {l / published - 1:+.2%})")
    for target, exponent in ((7.0e6, -5.53), (1.7e6, -4.86)):
        e = math.log10(calibrate_gamma("cara", target, R, P))
        c.check(abs(e - exponent) <= 0.05, f"CARA calibration for l={target:.2g}: log10 gamma {e:.4f} vs {exponent}")
    for target, gamma in ((7.0e6, 5.3), (1.7e6, 10.0)):
        g = calibrate_gamma("power", target, R, P)
        c.check(abs(g - gamma) <= 0.10 * gamma, f"power calibration for l={target:.2g}: gamma {g:.4f} vs {gamma}")
    c.finish()


def test_criterion_04_lambda_threshold(criterion):
    c = criterion(4, "lambda threshold for l=3e6, r=2.2e5")
    lam0 = lambda_threshold(3e6, R)
    exact = Fraction(3_000_000 - 220_000, 3_000_000)
    c.check(abs(lam0 - float(exact)) <= 1e-6, f"{lam0!r} vs exact {exact}")
    c.check(abs(lam0 - 0.926667) <= 1e-6, f"{lam0!r} vs 0.926667")
    c.check(abs(lam0 - 0.926) <= 0.001, f"{lam0!r} vs rounded 0.926")
    c.finish()


def _random_eu_case(rng):
    # parameter ranges keep the acceptance threshold above the 1e-18 search floor
    kind = rng.integers(3)
    l = float(10 ** rng.uniform(5, 7))
    if kind == 0:
        return Linear(), l, float(l * 10 ** rng.uniform(-3, -0.3))
    if kind == 1:
        gamma = float(10 ** rng.uniform(-7.0, -5.5))
        return CaraExp(gamma), l, float(l * 10 ** rng.uniform(-3, -0.3))
    return PowerNeg(float(rng.uniform(0.5, 8.0))), l, float(l / rng.uniform(2.0, 50.0))


def test_criterion_05_no_eu_never_takers(criterion):
    c = criterion(5, "every EU agent accepts at some small enough p")
    rng = np.random.default_rng(505)
    for _ in range(50):
        u, l, r = _random_eu_case(rng)
        try:
            p_star = acceptance_probability_threshold(u, l, r)
        except Exception as exc:  # reported as a failed check
            c.check(False, f"{u}, l={l:.4g}, r={r:.4g}: {type(exc).__name__}: {exc}")
            continue
        v = deal_value(u, PillDeal(l, r, p_star / 10))
        c.check(0 < p_star < 1 and v > l, f"{u}, l={l:.4g}, r={r:.4g}: p*={p_star:.3g}, value at p*/10 {v:.6g}")
    c.finish()


def test_criterion_06_never_takers_under_catastrophic_ranking(criterion):
    c = criterion(6, "never-takers below lambda0, exact p* above it")
    rng = np.random.default_rng(606)
    grid = [10.0**-k for k in range(1, 19)]
    for _ in range(50):
        l = float(10 ** rng.uniform(5, 8))
        r = float(l * 10 ** rng.uniform(-3, -0.1))
        lam0 = lambda_threshold(l, r)
        lam = float(rng.uniform(0, lam0))
        worst = max(w_lambda(l, r, p, lam) for p in grid)
        c.check(worst < l, f"lam={lam:.4f} < lam0={lam0:.4f}: max W {worst:.6g} vs l={l:.6g}")
        lam = float(rng.uniform(lam0, 1.0))
        cls = classify_agent(l, r, lam)
        if cls.kind is not AgentKind.ACCEPTS_BELOW:
            c.check(False, f"lam={lam} > lam0={lam0} classified {cls.kind}")
            continue
        gap = abs(w_lambda(l, r, cls.p_star, lam) - l)
        c.check(gap <= 1e-12 * l, f"lam={lam:.6f}: |W(p*) - l| = {gap:.3g}, l={l:.6g}")
    c.finish()


def test_criterion_07_representation_equality(criterion):
    c = criterion(7, "closed-form W_lambda equals the integral ranking")
    rng = np.random.default_rng(707)
    for _ in range(100):
        l = float(10 ** rng.uniform(3, 8))
        r = float(10 ** rng.uniform(2, 7))
        p = float(10 ** rng.uniform(-12, -0.01))
        lam = float(rng.uniform(0, 1))
        closed = w_lambda(l, r, p, lam)
        integral = rank_value(CatastropheRanking(lam, pill_density(p)), pill_step_lottery(l, r))
        c.check(abs(closed - integral) <= 1e-12 * abs(integral), f"l={l:.4g} r={r:.4g} p={p:.3g} lam={lam:.3f}: {closed!r} vs {integral!r}")
    c.finish()


def test_criterion_08_sensitivity_to_rare_events(criterion):
    c = criterion(8, "patch near zero moves W by (1-lam)*delta; pure EU barely moves")
    l, r, catastrophe = 3e6, R, 0.0
    f = pill_step_lottery(l, r)
    delta = catastrophe - limit_at_zero(f)
    for p in (1e-9, 1e-3):
        density = pill_density(p)
        bound_unit = 2 * density.max_value * abs(delta)
        for eps in (1e-3, 1e-6, 1e-9):
            g = modify_near_zero(f, catastrophe, eps)
            for lam in (0.9, 1.0):
                ranking = CatastropheRanking(lam, density)
                wf, wg = rank_value(ranking, f), rank_value(ranking, g)
                # a few ulps of W for the rounding in two evaluations of W
                slack = 4 * math.ulp(max(abs(wf), abs(wg)))
                excess = abs((wg - wf) - (1 - lam) * delta)
                bound = lam * eps * bound_unit
                c.check(excess <= bound + slack, f"p={p:g} eps={eps:g} lam={lam}: excess {excess:.3g} > bound {bound:.3g}")
                if lam == 0.9:
                    c.check(abs(wg - wf) >= 0.9 * (1 - lam) * abs(delta), f"p={p:g} eps={eps:g}: shift {wg - wf:.6g} vanished")
    c.finish()


def test_criterion_09_jensen(criterion):
    c = criterion(9, "certainty equivalent below the mean for concave utilities")
    rng = np.random.default_rng(909)
    for i in range(1000):
        n = int(rng.integers(2, 11))
        wealth = rng.uniform(1.0, 1e5, n)
        probs = rng.uniform(0.05, 1.0, n)
        probs /= probs.sum()
        lot = DiscreteLottery(tuple(zip(wealth.tolist(), probs.tolist())))
        m = mean(lot)
        for u in (CaraExp(float(10 ** rng.uniform(-6, -4))), PowerNeg(float(rng.uniform(0.5, 8.0)))):
            ce = certainty_equivalent(u, lot)
            c.check(ce < m, f"case {i} {u}: CE {ce!r} not below mean {m!r}")
        lin = certainty_equivalent(Linear(), lot)
        c.check(abs(lin - m) <= 1e-12 * abs(m), f"case {i} linear CE {lin!r} vs mean {m!r}")
    c.finish()


def test_criterion_10_exact_integral_vs_riemann(criterion):
    c = criterion(10, "piecewise-exact integral matches a 1e6-panel Riemann sum")
    rng = np.random.default_rng(1010)
    for i in range(20):
        lo, width = float(rng.uniform(-5, 5)), float(10 ** rng.uniform(-1, 3))
        density = random_density(rng, lo, lo + width, int(rng.integers(0, 4)))
        f = random_step_function(rng, lo - 0.1 * width, lo + 1.1 * width, int(rng.integers(1, 5)))
        exact = lebesgue_part(f, density)
        brute = riemann_integral(f, density, panels=1_000_000)
        c.check(abs(exact - brute) <= 1e-6 * abs(exact), f"pair {i}: {exact!r} vs {brute!r}")
    c.finish()


def test_criterion_11_population_split(criterion):
    c = criterion(11, "default population: mixed accept/refuse with never-takers, deterministic")
    spec = PopulationSpec()
    deal = PillDeal(spec.l_min, R, P)
    out = simulate(spec, deal)
    s = summarize(out)
    c.check(0.2 < s["accept_fraction"] < 0.8, f"accept fraction {s['accept_fraction']}")
    c.check(out.never_count > 0, "no never-takers")
    c.check(simulate(spec, deal) == out, "rerun with the same seed differs")
    c.finish()
