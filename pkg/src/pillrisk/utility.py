"""Parametric utility families: linear, CARA exponential and negative power.

The two concave families are written as ``u(x) = -exp(k(x))`` with
``k(x) = -gamma * x`` (CARA) or ``k(x) = -gamma * log(x)`` (power).  ``k`` is
exposed as :meth:`UtilityFamily.log_disutility` so expected utilities and
certainty equivalents can be formed without leaving log space.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Any, ClassVar

from .errors import DomainError, RangeError


class UtilityFamily:
    """Common interface of the three families.

    Subclasses are immutable dataclasses. ``log_domain`` tells callers whether
    :meth:`log_disutility` and :meth:`from_log_disutility` are available.
    """

    kind: ClassVar[str]
    log_domain: ClassVar[bool] = False

    def eval(self, x: float) -> float:
        raise NotImplementedError

    def __call__(self, x: float) -> float:
        return self.eval(x)

    def inverse(self, v: float) -> float:
        raise NotImplementedError

    def ara(self, x: float) -> float:
        raise NotImplementedError

    def derivative(self, x: float, order: int = 1) -> float:
        raise NotImplementedError

    def check_domain(self, x: float) -> None:
        if not math.isfinite(x):
            raise DomainError(f"wealth must be finite, got {x}")

    def log_disutility(self, x: float) -> float:
        """Return ``log(-u(x))``; only defined for the concave families."""
        raise NotImplementedError(f"{self.kind} utility has no log-domain form")

    def from_log_disutility(self, k: float) -> float:
        """Return the wealth ``x`` with ``log(-u(x)) == k``."""
        raise NotImplementedError(f"{self.kind} utility has no log-domain form")

    def to_dict(self) -> dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class Linear(UtilityFamily):
    """Affine utility ``a * x + b``; risk neutral."""

    a: float = 1.0
    b: float = 0.0

    kind: ClassVar[str] = "linear"

    def __post_init__(self) -> None:
        if not (self.a > 0 and math.isfinite(self.a)) or not math.isfinite(self.b):
            raise ValueError(f"linear utility needs finite a > 0 and finite b, got a={self.a}, b={self.b}")

    def eval(self, x: float) -> float:
        self.check_domain(x)
        return self.a * x + self.b

    def inverse(self, v: float) -> float:
        if not math.isfinite(v):
            raise RangeError(f"utility value must be finite, got {v}")
        return (v - self.b) / self.a

    def ara(self, x: float) -> float:
        self.check_domain(x)
        return 0.0

    def derivative(self, x: float, order: int = 1) -> float:
        self.check_domain(x)
        if order == 0:
            return self.eval(x)
        return self.a if order == 1 else 0.0

    def to_dict(self) -> dict[str, Any]:
        return {"family": self.kind, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class CaraExp(UtilityFamily):
    """Constant absolute risk aversion, ``u(x) = -exp(-gamma * x)``.

    Direct evaluation underflows to ``-0.0`` once ``gamma * x`` exceeds about
    745; the log-domain methods stay exact there.
    """

    gamma: float

    kind: ClassVar[str] = "cara"
    log_domain: ClassVar[bool] = True

    def __post_init__(self) -> None:
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be finite and positive, got {self.gamma}")

    def eval(self, x: float) -> float:
        self.check_domain(x)
        try:
            return -math.exp(-self.gamma * x)
        except OverflowError:
            return -math.inf

    def inverse(self, v: float) -> float:
        if not v < 0 or math.isinf(v):
            raise RangeError(f"CARA utility takes values in (-inf, 0), got {v}")
        return self.from_log_disutility(math.log(-v))

    def ara(self, x: float) -> float:
        self.check_domain(x)
        return self.gamma

    def derivative(self, x: float, order: int = 1) -> float:
        self.check_domain(x)
        # d^n/dx^n of -exp(-g x) is -(-g)^n exp(-g x)
        return -((-self.gamma) ** order) * math.exp(-self.gamma * x)

    def log_disutility(self, x: float) -> float:
        self.check_domain(x)
        return -self.gamma * x

    def from_log_disutility(self, k: float) -> float:
        return -k / self.gamma

    def to_dict(self) -> dict[str, Any]:
        return {"family": self.kind, "gamma": self.gamma}


@dataclass(frozen=True)
class PowerNeg(UtilityFamily):
    """Negative power utility ``u(x) = -x ** -gamma`` on ``x > 0``.

    Absolute risk aversion falls with wealth as ``(1 + gamma) / x``.
    """

    gamma: float

    kind: ClassVar[str] = "power"
    log_domain: ClassVar[bool] = True

    def __post_init__(self) -> None:
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be finite and positive, got {self.gamma}")

    def check_domain(self, x: float) -> None:
        super().check_domain(x)
        if x <= 0:
            raise DomainError(f"power utility needs positive wealth, got {x}")

    def eval(self, x: float) -> float:
        self.check_domain(x)
        try:
            return -(x ** -self.gamma)
        except OverflowError:
            return -math.inf

    def inverse(self, v: float) -> float:
        if not v < 0 or math.isinf(v):
            raise RangeError(f"power utility takes values in (-inf, 0), got {v}")
        return self.from_log_disutility(math.log(-v))

    def ara(self, x: float) -> float:
        self.check_domain(x)
        return (1.0 + self.gamma) / x

    def derivative(self, x: float, order: int = 1) -> float:
        self.check_domain(x)
        # falling factorial of -gamma gives the n-th derivative of x**-gamma
        coef = 1.0
        for i in range(order):
            coef *= -self.gamma - i
        return -coef * x ** (-self.gamma - order)

    def log_disutility(self, x: float) -> float:
        self.check_domain(x)
        return -self.gamma * math.log(x)

    def from_log_disutility(self, k: float) -> float:
        return math.exp(-k / self.gamma)

    def to_dict(self) -> dict[str, Any]:
        return {"family": self.kind, "gamma": self.gamma}


FAMILIES: dict[str, type[UtilityFamily]] = {
    "linear": Linear,
    "cara": CaraExp,
    "power": PowerNeg,
}

_EXP10 = re.compile(r"^\s*10\s*\^\s*\(?\s*([+-]?\d+(?:\.\d*)?|[+-]?\.\d+)\s*\)?\s*$")
_MANTISSA_EXP = re.compile(r"^\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+))[eE]([+-]?\d*\.\d+)\s*$")


def parse_gamma(text: str | float) -> float:
    """Parse a risk-aversion parameter.

    Accepts ordinary floats (``"1e-5"``), power-of-ten syntax (``"10^-5.53"``)
    and scientific notation with a fractional exponent (``"1e-5.53"``), the
    last two meaning ``10 ** -5.53``.

    >>> parse_gamma("10^-2")
    0.01
    """
    if isinstance(text, (int, float)):
        return float(text)
    m = _EXP10.match(text)
    if m:
        return 10.0 ** float(m.group(1))
    m = _MANTISSA_EXP.match(text)
    if m:
        return float(m.group(1)) * 10.0 ** float(m.group(2))
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"cannot parse gamma value {text!r}") from None


def make_family(kind: str, gamma: float | str | None = None, a: float = 1.0, b: float = 0.0) -> UtilityFamily:
    """Build a family by name (``linear``, ``cara`` or ``power``)."""
    kind = kind.lower()
    if kind not in FAMILIES:
        raise ValueError(f"unknown utility family {kind!r}; expected one of {sorted(FAMILIES)}")
    if kind == "linear":
        return Linear(a=a, b=b)
    if gamma is None:
        raise ValueError(f"{kind} utility requires gamma")
    return FAMILIES[kind](parse_gamma(gamma))


def family_from_dict(data: dict[str, Any]) -> UtilityFamily:
    """Inverse of ``UtilityFamily.to_dict``; gamma may be a string."""
    return make_family(
        data["family"],
        gamma=data.get("gamma"),
        a=float(data.get("a", 1.0)),
        b=float(data.get("b", 0.0)),
    )
