"""Ranking of step-function lotteries with a weight on the outcome at zero.

A lottery ``f`` assigns a wealth (or utility) to every point of the real
line; outcomes near zero stand for the rare catastrophe.  The ranking is

    W(f) = lam * integral(f * density) + (1 - lam) * lim_{x -> 0} f(x)

The first term is ordinary expected value against a piecewise-constant
density.  The second puts fixed weight on the behaviour of ``f`` in every
neighbourhood of zero, however little density mass sits there, so a patch
of catastrophe near zero keeps moving ``W`` as the patch shrinks.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidEpsError, InvalidThresholdError, NoLimitError

DENSITY_TOL = 1e-12


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function on the real line.

    ``values[i]`` holds on ``[breakpoints[i-1], breakpoints[i])`` with
    ``breakpoints[-1] = -inf`` and ``breakpoints[k] = +inf``; a breakpoint
    belongs to the piece on its right.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        bps = tuple(float(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)
        if len(vals) != len(bps) + 1:
            raise ValueError(f"need {len(bps) + 1} values for {len(bps)} breakpoints, got {len(vals)}")
        if not all(math.isfinite(b) for b in bps):
            raise ValueError("breakpoints must be finite")
        if any(b1 >= b2 for b1, b2 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("values must be finite")

    @classmethod
    def constant(cls, c: float) -> StepFunction:
        return cls((), (c,))

    def __call__(self, x: float) -> float:
        return self.values[bisect.bisect_right(self.breakpoints, x)]

    @property
    def sup_norm(self) -> float:
        return max(abs(v) for v in self.values)

    def pieces(self) -> list[tuple[float, float, float]]:
        """``(left, right, value)`` triples covering the line, infinite ends included."""
        edges = (-math.inf, *self.breakpoints, math.inf)
        return [(edges[i], edges[i + 1], v) for i, v in enumerate(self.values)]

    def refine(self, extra: Sequence[float]) -> StepFunction:
        """Same function over the union of its breakpoints and ``extra``."""
        bps = sorted(set(self.breakpoints).union(float(b) for b in extra))
        return StepFunction(tuple(bps), self._values_on(bps))

    def _values_on(self, bps: Sequence[float]) -> tuple[float, ...]:
        # value on each piece of the refined partition, sampled at its left end
        if not bps:
            return self.values
        return (self.values[0], *(self(b) for b in bps))

    def combine(self, other: StepFunction, alpha: float = 1.0, beta: float = 1.0) -> StepFunction:
        """Pointwise ``alpha * self + beta * other``."""
        bps = sorted(set(self.breakpoints) | set(other.breakpoints))
        mine, theirs = self._values_on(bps), other._values_on(bps)
        return StepFunction(tuple(bps), tuple(alpha * a + beta * b for a, b in zip(mine, theirs)))

    def __add__(self, other: StepFunction) -> StepFunction:
        return self.combine(other)

    def __mul__(self, c: float) -> StepFunction:
        return StepFunction(self.breakpoints, tuple(c * v for v in self.values))

    __rmul__ = __mul__


@dataclass(frozen=True)
class StepDensity:
    """Probability density that is piecewise constant with bounded support."""

    step: StepFunction

    def __post_init__(self) -> None:
        vals = self.step.values
        if any(v < 0 for v in vals):
            raise ValueError("density values must be non-negative")
        if vals[0] != 0 or vals[-1] != 0:
            raise ValueError("density support must be bounded")
        total = self.total_mass()
        if abs(total - 1.0) > DENSITY_TOL:
            raise ValueError(f"density integrates to {total!r}, not 1")

    @classmethod
    def uniform(cls, lo: float, hi: float) -> StepDensity:
        return cls(StepFunction((lo, hi), (0.0, 1.0 / (hi - lo), 0.0)))

    def total_mass(self) -> float:
        return math.fsum(v * (b - a) for a, b, v in self.step.pieces() if v != 0)

    @property
    def support(self) -> tuple[float, float]:
        return self.step.breakpoints[0], self.step.breakpoints[-1]

    @property
    def max_value(self) -> float:
        return max(self.step.values)


def lebesgue_part(f: StepFunction, phi1: StepDensity) -> float:
    """Exact integral of ``f`` against the density over the common refinement."""
    merged = f.refine(phi1.step.breakpoints)
    dens = phi1.step.refine(f.breakpoints)
    terms = []
    for (a, b, fv), (_, _, dv) in zip(merged.pieces(), dens.pieces()):
        if dv != 0:
            terms.append(fv * dv * (b - a))
    return math.fsum(terms)


def limit_at_zero(f: StepFunction) -> float:
    """Two-sided limit of ``f`` at zero.

    Raises:
        NoLimitError: zero is a breakpoint where the adjacent values differ.
    """
    i = bisect.bisect_left(f.breakpoints, 0.0)
    if i < len(f.breakpoints) and f.breakpoints[i] == 0.0:
        left, right = f.values[i], f.values[i + 1]
        if left != right:
            raise NoLimitError(f"f jumps at 0 from {left} to {right}")
        return right
    return f.values[i]


@dataclass(frozen=True)
class CatastropheRanking:
    """Weight ``lam`` on expected value, ``1 - lam`` on the limit at zero.

    ``lam`` may sit at either end of ``[0, 1]``: ``lam = 1`` is plain expected
    value and ``lam = 0`` looks only at the outcome near zero.
    """

    lam: float
    density: StepDensity

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must lie in [0, 1], got {self.lam}")

    def rank_value(self, f: StepFunction) -> float:
        return rank_value(self, f)


def rank_value(ranking: CatastropheRanking, f: StepFunction) -> float:
    tail = limit_at_zero(f)
    lam = ranking.lam
    return lam * lebesgue_part(f, ranking.density) + (1.0 - lam) * tail


def pill_density(p: float) -> StepDensity:
    """Uniform density on ``[0, 1/p]``; ``[0, 1)`` then carries mass ``p``."""
    if not 0 < p < 1:
        raise ValueError(f"probability must lie in (0, 1), got {p}")
    return StepDensity(StepFunction((0.0, 1.0 / p), (0.0, p, 0.0)))


def pill_step_lottery(l: float, r: float) -> StepFunction:
    """Wealth ``r`` on ``x < 1`` (the deadly pill), ``l + r`` on ``x >= 1``."""
    if not (l > 0 and r > 0):
        raise ValueError("life value and reward must be positive")
    return StepFunction((1.0,), (r, l + r))


def w_lambda(l: float, r: float, p: float, lam: float) -> float:
    """Closed-form rank of the pill deal: ``lam * m(p) + (1 - lam) * r``."""
    if not 0 < p < 1:
        raise ValueError(f"probability must lie in (0, 1), got {p}")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    return lam * (p * r + (1.0 - p) * (l + r)) + (1.0 - lam) * r


def w_lambda_limit(l: float, r: float, lam: float) -> float:
    """Value of the pill deal as ``p -> 0``: ``lam * l + r``."""
    return lam * l + r


def lambda_threshold(l: float, r: float) -> float:
    """Smallest weight on expected value for which the deal can ever be taken."""
    if not r > 0:
        raise ValueError("reward must be positive")
    if r >= l:
        raise InvalidThresholdError(f"threshold undefined: reward {r} is not below life value {l}")
    return (l - r) / l


class AgentKind(enum.Enum):
    NEVER_ACCEPTS = "never"
    ACCEPTS_BELOW = "accepts_below"


@dataclass(frozen=True)
class AgentClass:
    kind: AgentKind
    p_star: float | None = None


def classify_agent(l: float, r: float, lam: float) -> AgentClass:
    """Decide whether some pile size makes the deal worth taking.

    Agents whose limit value ``lam * l + r`` does not exceed ``l`` refuse at
    every ``p``; the rest accept exactly when ``p < p_star``.
    """
    if not l > r > 0:
        raise ValueError("classification requires l > r > 0")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    if lam <= lambda_threshold(l, r):
        return AgentClass(AgentKind.NEVER_ACCEPTS)
    return AgentClass(AgentKind.ACCEPTS_BELOW, ((lam - 1.0) * l + r) / (lam * l))


def modify_near_zero(f: StepFunction, new_value: float, eps: float) -> StepFunction:
    """Copy of ``f`` with value ``new_value`` on ``[-eps, eps)``.

    Raises:
        InvalidEpsError: the patch would reach an existing breakpoint, or zero
            is itself a breakpoint.
    """
    if not eps > 0:
        raise InvalidEpsError(f"eps must be positive, got {eps}")
    if any(abs(b) <= eps for b in f.breakpoints):
        raise InvalidEpsError(f"eps={eps} reaches a breakpoint of f")
    i = bisect.bisect_right(f.breakpoints, 0.0)
    bps = (*f.breakpoints[:i], -eps, eps, *f.breakpoints[i:])
    base = f.values[i]
    vals = (*f.values[:i], base, new_value, base, *f.values[i + 1 :])
    return StepFunction(bps, vals)


def sweep_w_lambda(l: float, r: float, lam: float, inv_p_grid: Sequence[float]) -> list[tuple[float, float]]:
    """``(1/p, W_lambda(p))`` pairs along a grid of pile sizes."""
    out = []
    for inv_p in inv_p_grid:
        if not inv_p > 1:
            raise ValueError(f"grid entries must exceed 1, got {inv_p}")
        out.append((inv_p, w_lambda(l, r, 1.0 / inv_p, lam)))
    return out
