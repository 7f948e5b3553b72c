"""Shared numerical kernels: bracketed root finding and log-domain sums."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

from .errors import EmptyInputError, MaxIterationsError, NoSignChangeError

DEFAULT_REL_TOL = 1e-12
DEFAULT_MAX_ITER = 200


@dataclass(frozen=True)
class Bracket:
    """Closed search interval ``[lo, hi]`` for :func:`find_root`."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"bracket ends must be finite, got [{self.lo}, {self.hi}]")
        if not self.lo < self.hi:
            raise ValueError(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")


def _sign(v: float) -> int:
    return (v > 0) - (v < 0)


def find_root(
    f: Callable[[float], float],
    bracket: Bracket,
    rel_tol: float = DEFAULT_REL_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> float:
    """Locate a sign change of ``f`` inside ``bracket``.

    Safeguarded secant iteration: a secant step is taken when it lands inside
    the current bracket and the previous step at least halved the bracket;
    otherwise the bracket is bisected. Iteration stops once the bracket is no
    wider than ``rel_tol * max(1, |x|)`` and the bracket midpoint is returned,
    so ``f`` changes sign across ``x +/- rel_tol * max(1, |x|)``.

    Args:
        f: Function of one variable, monotone on the bracket.
        bracket: Interval whose ends give ``f`` values of opposite sign.
        rel_tol: Relative width at which the bracket counts as converged.
        max_iter: Upper bound on function evaluations after the end points.

    Returns:
        Approximate root.

    Raises:
        NoSignChangeError: ``f(lo)`` and ``f(hi)`` share a sign (or are NaN).
        MaxIterationsError: convergence was not reached in ``max_iter`` steps.
    """
    if not rel_tol > 0:
        raise ValueError("rel_tol must be positive")
    a, b = bracket.lo, bracket.hi
    fa, fb = f(a), f(b)
    if math.isnan(fa) or math.isnan(fb):
        raise NoSignChangeError(f"f is NaN at a bracket end: f({a})={fa}, f({b})={fb}")
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if _sign(fa) == _sign(fb):
        raise NoSignChangeError(f"no sign change on [{a}, {b}]: f(lo)={fa}, f(hi)={fb}")

    prev_width = b - a
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        width = b - a
        if width <= rel_tol * max(1.0, abs(mid)) or mid in (a, b):
            return mid

        x = mid
        if width <= 0.5 * prev_width and math.isfinite(fa) and math.isfinite(fb):
            s = b - fb * (b - a) / (fb - fa)
            if a < s < b:
                x = s
        prev_width = width

        fx = f(x)
        if math.isnan(fx):
            raise NoSignChangeError(f"f returned NaN at {x}")
        if fx == 0.0:
            return x
        if _sign(fx) == _sign(fa):
            a, fa = x, fx
        else:
            b, fb = x, fx
    raise MaxIterationsError(f"no convergence after {max_iter} iterations on [{a}, {b}]")


def log_sum_exp(terms: Iterable[tuple[float, float]]) -> float:
    """Return ``log(sum(w * exp(e)))`` over ``(w, e)`` pairs without overflow.

    Terms with zero weight are dropped. The largest exponent among the
    remaining terms is factored out before exponentiating.

    Raises:
        EmptyInputError: no term has positive weight.
    """
    kept = []
    for w, e in terms:
        if w < 0 or not math.isfinite(w) or not math.isfinite(e):
            raise ValueError(f"invalid term (weight={w}, exponent={e})")
        if w > 0:
            kept.append((w, e))
    if not kept:
        raise EmptyInputError("log_sum_exp needs at least one positive weight")
    shift = max(math.log(w) + e for w, e in kept)
    total = math.fsum(math.exp(math.log(w) + e - shift) for w, e in kept)
    return shift + math.log(total)
