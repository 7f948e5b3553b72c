"""Finite lotteries over wealth, expected utility and certainty equivalents."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Iterable

from .numeric import log_sum_exp
from .utility import UtilityFamily

PROB_TOL = 1e-12
INDIFFERENCE_BAND = 1e-12


@dataclass(frozen=True)
class DiscreteLottery:
    """Finite list of ``(wealth, prob)`` outcomes.

    Probabilities must already sum to one within ``PROB_TOL``; nothing is
    renormalised.
    """

    outcomes: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        outcomes = tuple((float(w), float(q)) for w, q in self.outcomes)
        object.__setattr__(self, "outcomes", outcomes)
        if not outcomes:
            raise ValueError("a lottery needs at least one outcome")
        for w, q in outcomes:
            if not math.isfinite(w):
                raise ValueError(f"wealth must be finite, got {w}")
            if not (q >= 0 and math.isfinite(q)):
                raise ValueError(f"probabilities must be finite and non-negative, got {q}")
        total = math.fsum(q for _, q in outcomes)
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> DiscreteLottery:
        return cls(tuple(pairs))

    @classmethod
    def sure(cls, wealth: float) -> DiscreteLottery:
        return cls(((wealth, 1.0),))

    @classmethod
    def parse(cls, text: str) -> DiscreteLottery:
        """Parse inline ``"wealth:prob,wealth:prob"`` syntax."""
        pairs = []
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            try:
                w, q = item.split(":")
                pairs.append((float(w), float(q)))
            except ValueError:
                raise ValueError(f"bad lottery outcome {item!r}; expected wealth:prob") from None
        return cls(tuple(pairs))

    @classmethod
    def from_json(cls, text: str) -> DiscreteLottery:
        return cls(tuple((d["wealth"], d["prob"]) for d in json.loads(text)))

    def to_json(self) -> str:
        return json.dumps([{"wealth": w, "prob": q} for w, q in self.outcomes])

    @property
    def wealths(self) -> tuple[float, ...]:
        return tuple(w for w, _ in self.outcomes)

    @property
    def is_degenerate(self) -> bool:
        """True when all probability mass sits on a single wealth level."""
        return len({w for w, q in self.outcomes if q > 0}) == 1


class Preference(enum.Enum):
    LOTTERY = "lottery_preferred"
    INDIFFERENT = "indifferent"
    SURE = "sure_preferred"


def mean(lot: DiscreteLottery) -> float:
    return math.fsum(q * w for w, q in lot.outcomes)


def log_disutility_of_lottery(u: UtilityFamily, lot: DiscreteLottery) -> float:
    """``log(-EU)`` for the concave families, accumulated in log space."""
    return log_sum_exp((q, u.log_disutility(w)) for w, q in lot.outcomes)


def expected_utility(u: UtilityFamily, lot: DiscreteLottery) -> float:
    """Probability-weighted utility of the outcomes.

    For CARA and power utility the sum is taken in log space, so the result
    may underflow to ``-0.0`` only at the very last step.
    """
    if u.log_domain:
        return -math.exp(log_disutility_of_lottery(u, lot))
    return math.fsum(q * u.eval(w) for w, q in lot.outcomes)


def certainty_equivalent(u: UtilityFamily, lot: DiscreteLottery) -> float:
    """Sure wealth with the same utility as the lottery."""
    if u.log_domain:
        return u.from_log_disutility(log_disutility_of_lottery(u, lot))
    return u.inverse(expected_utility(u, lot))


def prefers(u: UtilityFamily, lot: DiscreteLottery, sure: float) -> Preference:
    """Compare a lottery with a sure amount under ``u``.

    Utilities closer than ``INDIFFERENCE_BAND`` relative to the utility scale
    count as indifferent.
    """
    if u.log_domain:
        # EU > u(s) iff k_eu < k_s; expm1 gives the relative gap on the utility scale
        gap = math.expm1(u.log_disutility(sure) - log_disutility_of_lottery(u, lot))
        if abs(gap) <= INDIFFERENCE_BAND:
            return Preference.INDIFFERENT
        return Preference.LOTTERY if gap > 0 else Preference.SURE
    eu = expected_utility(u, lot)
    us = u.eval(sure)
    if abs(eu - us) <= INDIFFERENCE_BAND * max(abs(eu), abs(us)):
        return Preference.INDIFFERENT
    return Preference.LOTTERY if eu > us else Preference.SURE
