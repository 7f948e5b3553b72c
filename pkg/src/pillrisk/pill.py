"""The pill deal under expected utility.

A subject with life value ``l`` is paid ``r`` to swallow one pill out of a
pile in which a fraction ``p`` is deadly.  Surviving leaves wealth ``l + r``,
dying leaves ``r``; refusing keeps ``l``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from .errors import NoSignChangeError, NoSolutionError
from .lottery import DiscreteLottery
from .numeric import Bracket, find_root, log_sum_exp
from .utility import CaraExp, Linear, PowerNeg, UtilityFamily

# Smallest deadly-pill probability searched for acceptance thresholds.
P_FLOOR_LOG10 = -18.0
P_CEIL_LOG10 = -1e-4

CARA_LOG10_GAMMA_BRACKET = (-12.0, 3.0)
POWER_GAMMA_BRACKET = (0.01, 100.0)

_EXP_MAX = 700.0


@dataclass(frozen=True)
class PillDeal:
    l: float
    r: float
    p: float

    def __post_init__(self) -> None:
        if not (self.l > 0 and math.isfinite(self.l)):
            raise ValueError(f"life value must be positive and finite, got {self.l}")
        if not (self.r > 0 and math.isfinite(self.r)):
            raise ValueError(f"reward must be positive and finite, got {self.r}")
        if not 0 < self.p < 1:
            raise ValueError(f"probability must lie in (0, 1), got {self.p}")

    def with_l(self, l: float) -> PillDeal:
        return replace(self, l=l)

    def with_p(self, p: float) -> PillDeal:
        return replace(self, p=p)


def as_lottery(deal: PillDeal) -> DiscreteLottery:
    return DiscreteLottery(((deal.r, deal.p), (deal.l + deal.r, 1.0 - deal.p)))


def mean_gain(deal: PillDeal) -> float:
    # (l + r) - p l avoids rounding 1 - p, which matters once p < 1e-16
    return (deal.l + deal.r) - deal.p * deal.l


def _deal_log_disutility(u: UtilityFamily, deal: PillDeal) -> float:
    """``log(-EU)`` of the deal for the concave families.

    Written as ``k(l+r) + log1p(p * expm1(k(r) - k(l+r)))`` so the survival
    weight ``1 - p`` is never rounded.
    """
    k_live = u.log_disutility(deal.l + deal.r)
    k_die = u.log_disutility(deal.r)
    d = k_die - k_live
    if d > _EXP_MAX:
        return log_sum_exp(((deal.p, k_die), (1.0 - deal.p, k_live)))
    return k_live + math.log1p(deal.p * math.expm1(d))


def _deal_expected_utility(u: UtilityFamily, deal: PillDeal) -> float:
    if u.log_domain:
        return -math.exp(_deal_log_disutility(u, deal))
    live = u.eval(deal.l + deal.r)
    return live - deal.p * (live - u.eval(deal.r))


def naive_life_bound(r: float, p: float) -> float:
    """Life value above which a risk-neutral subject refuses: ``r / p``."""
    return r / p


def indifference_residual(u: UtilityFamily, deal: PillDeal) -> float:
    """``p u(r) + (1 - p) u(l + r) - u(l)``; positive means the deal is taken."""
    if u.log_domain:
        k_l = u.log_disutility(deal.l)
        k_eu = _deal_log_disutility(u, deal)
        if k_eu - k_l > _EXP_MAX:
            return -math.exp(k_eu)
        return -math.exp(k_l) * math.expm1(k_eu - k_l)
    return _deal_expected_utility(u, deal) - u.eval(deal.l)


def _scaled_residual(u: UtilityFamily, deal: PillDeal) -> float:
    # Same sign as indifference_residual, divided by -u(l) so it stays O(1).
    k_l = u.log_disutility(deal.l)
    d = _deal_log_disutility(u, deal) - k_l
    return -math.expm1(min(d, _EXP_MAX))


def implied_life(u: UtilityFamily, r: float, p: float) -> float:
    """Life value at which the subject is exactly indifferent to the deal.

    Raises:
        NoSolutionError: the residual keeps its sign up to ``1000 * r / p``.
    """
    anchor = naive_life_bound(r, p)
    if isinstance(u, Linear):
        return anchor
    lo = max(r, 1.0)

    def g(l: float) -> float:
        return _scaled_residual(u, PillDeal(l, r, p))

    if g(lo) <= 0:
        raise NoSolutionError(f"deal already refused at the lower bracket end l={lo}")
    hi = 10.0 * anchor
    while g(hi) > 0:
        if hi >= 1e3 * anchor:
            raise NoSolutionError(f"no indifference point below l={hi:.6g} for {u}")
        hi *= 10.0
    return find_root(g, Bracket(lo, hi))


def calibrate_gamma(kind: type[UtilityFamily] | str, l_target: float, r: float, p: float) -> float:
    """Risk-aversion parameter whose implied life value equals ``l_target``.

    CARA is searched over ``log10(gamma)`` in ``[-12, 3]``; the power family
    over ``gamma`` in ``[0.01, 100]``.
    """
    if isinstance(kind, str):
        kind = {"cara": CaraExp, "power": PowerNeg}.get(kind.lower())  # type: ignore[assignment]
    if not l_target > r:
        raise ValueError("target life value must exceed the reward")
    deal = PillDeal(l_target, r, p)
    # Higher gamma makes the subject refuse at l_target, flipping the sign.
    try:
        if kind is CaraExp:
            e = find_root(
                lambda e: _scaled_residual(CaraExp(10.0**e), deal),
                Bracket(*CARA_LOG10_GAMMA_BRACKET),
            )
            return 10.0**e
        if kind is PowerNeg:
            return find_root(
                lambda g: _scaled_residual(PowerNeg(g), deal),
                Bracket(*POWER_GAMMA_BRACKET),
            )
    except NoSignChangeError as exc:
        raise NoSolutionError(f"cannot calibrate gamma for l={l_target}: {exc}") from exc
    raise ValueError(f"calibration is defined for CARA and power utility, not {kind!r}")


def deal_value(u: UtilityFamily, deal: PillDeal) -> float:
    """Certainty equivalent of taking the pill.

    Equal to ``certainty_equivalent(u, as_lottery(deal))`` but evaluated
    without forming ``1 - p``.
    """
    if u.log_domain:
        return u.from_log_disutility(_deal_log_disutility(u, deal))
    return u.inverse(_deal_expected_utility(u, deal))


def is_acceptable(u: UtilityFamily, deal: PillDeal) -> bool:
    return deal_value(u, deal) > deal.l


def acceptance_probability_threshold(u: UtilityFamily, l: float, r: float) -> float:
    """Largest deadly-pill probability at which the deal is still worth ``l``.

    The deal is acceptable for every ``p`` below the returned value.

    Raises:
        NoSolutionError: the deal is refused even at ``p = 1e-18``.
    """
    if isinstance(u, Linear):
        return r / l

    def g(q: float) -> float:
        return deal_value(u, PillDeal(l, r, 10.0**q)) - l

    if g(P_FLOOR_LOG10) <= 0:
        raise NoSolutionError(
            f"deal worth {g(P_FLOOR_LOG10) + l:.6g} <= l={l:.6g} even at p=1e{P_FLOOR_LOG10:g}"
        )
    if g(P_CEIL_LOG10) > 0:
        raise NoSolutionError(f"deal still acceptable at p=10^{P_CEIL_LOG10}")
    return 10.0 ** find_root(g, Bracket(P_FLOOR_LOG10, P_CEIL_LOG10))


def sweep_deal_value(
    u: UtilityFamily, l: float, r: float, inv_p_grid: Sequence[float]
) -> list[tuple[float, float]]:
    """``(1/p, deal_value)`` pairs along a grid of pile sizes."""
    out = []
    for inv_p in inv_p_grid:
        if not inv_p > 1:
            raise ValueError(f"grid entries must exceed 1, got {inv_p}")
        out.append((inv_p, deal_value(u, PillDeal(l, r, 1.0 / inv_p))))
    return out
