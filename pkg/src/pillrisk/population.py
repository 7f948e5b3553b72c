"""Monte Carlo population of respondents facing the pill deal.

Each respondent is either an expected-utility agent (CARA utility with a
random risk-aversion exponent) or a catastrophic-ranking agent (random
weight ``lam`` on expected value), and compares the deal with their own
randomly drawn life value.  None of the distribution defaults are estimated
from survey data: life values span the usual value-of-statistical-life band
of $1.7M to $7M, CARA exponents span the calibrated range for that band and
the ``lam`` range straddles the acceptance threshold.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np

from .catastrophic import AgentKind, classify_agent, w_lambda
from .pill import PillDeal, deal_value
from .utility import CaraExp

EU = "eu"
CATASTROPHIC = "cat"

ACCEPT = "accept"
REJECT = "reject"
NEVER = "never"

QUANTILES = (0.1, 0.5, 0.9)


@dataclass(frozen=True)
class PopulationSpec:
    n_agents: int = 1000
    eu_fraction: float = 0.5
    l_min: float = 1.7e6
    l_max: float = 7.0e6
    g_lo: float = -5.53
    g_hi: float = -4.86
    lam_lo: float = 0.85
    lam_hi: float = 0.99
    seed: int = 20130101

    def __post_init__(self) -> None:
        if not self.n_agents > 0:
            raise ValueError("n_agents must be positive")
        if not 0.0 <= self.eu_fraction <= 1.0:
            raise ValueError("eu_fraction must lie in [0, 1]")
        if not 0 < self.l_min <= self.l_max:
            raise ValueError("need 0 < l_min <= l_max")
        if not self.g_lo <= self.g_hi:
            raise ValueError("need g_lo <= g_hi")
        if not 0.0 <= self.lam_lo <= self.lam_hi <= 1.0:
            raise ValueError("need 0 <= lam_lo <= lam_hi <= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @classmethod
    def from_mapping(cls, data: dict[str, Any]) -> PopulationSpec:
        types = {f.name: f.type for f in fields(cls)}
        unknown = set(data) - set(types)
        if unknown:
            raise ValueError(f"unknown population keys: {sorted(unknown)}")
        kwargs: dict[str, Any] = {}
        for key, raw in data.items():
            kwargs[key] = int(raw) if types[key] in ("int", int) else float(raw)
        return cls(**kwargs)

    @classmethod
    def from_config(cls, path: str | Path) -> PopulationSpec:
        """Read flat ``key = value`` lines; ``#`` starts a comment."""
        data: dict[str, str] = {}
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            data[key] = value
        return cls.from_mapping(data)


@dataclass(frozen=True)
class AgentRecord:
    agent: int
    kind: str
    l: float
    param: float  # CARA exponent log10(gamma) for EU agents, lambda otherwise
    decision: str
    never_taker: bool

    @property
    def accepted(self) -> bool:
        return self.decision == ACCEPT


@dataclass(frozen=True)
class ExperimentOutcome:
    """Tally of one simulated experiment.

    The three counts are disjoint: ``reject_count`` holds agents who refuse
    at this ``p`` but would accept a smaller one, ``never_count`` those who
    refuse at every ``p``.
    """

    accept_count: int
    reject_count: int
    never_count: int
    records: tuple[AgentRecord, ...] = field(repr=False)

    @property
    def n_agents(self) -> int:
        return len(self.records)


def agent_rng(seed: int, agent: int) -> np.random.Generator:
    # Philox keyed by the seed; each agent owns a disjoint counter block.
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, agent, 0]))


def _simulate_agent(spec: PopulationSpec, deal: PillDeal, i: int) -> AgentRecord:
    u_kind, u_life, u_param = agent_rng(spec.seed, i).random(3)
    l = math.exp(math.log(spec.l_min) + u_life * (math.log(spec.l_max) - math.log(spec.l_min)))
    if u_kind < spec.eu_fraction:
        exponent = spec.g_lo + u_param * (spec.g_hi - spec.g_lo)
        accepted = deal_value(CaraExp(10.0**exponent), deal.with_l(l)) > l
        return AgentRecord(i, EU, l, exponent, ACCEPT if accepted else REJECT, False)
    lam = spec.lam_lo + u_param * (spec.lam_hi - spec.lam_lo)
    never = classify_agent(l, deal.r, lam).kind is AgentKind.NEVER_ACCEPTS
    accepted = w_lambda(l, deal.r, deal.p, lam) > l
    decision = ACCEPT if accepted else (NEVER if never else REJECT)
    return AgentRecord(i, CATASTROPHIC, l, lam, decision, never)


def simulate(spec: PopulationSpec, deal: PillDeal) -> ExperimentOutcome:
    """Offer ``deal`` to every agent, with ``deal.l`` replaced by the agent's own life value."""
    records = tuple(_simulate_agent(spec, deal, i) for i in range(spec.n_agents))
    counts = {ACCEPT: 0, REJECT: 0, NEVER: 0}
    for rec in records:
        counts[rec.decision] += 1
    return ExperimentOutcome(counts[ACCEPT], counts[REJECT], counts[NEVER], records)


def nearest_rank(values: list[float], q: float) -> float:
    """Nearest-rank quantile: the ``ceil(q * n)``-th smallest value."""
    if not values:
        return math.nan
    ordered = sorted(values)
    k = max(1, math.ceil(q * len(ordered)))
    return ordered[k - 1]


def summarize(outcome: ExperimentOutcome) -> dict[str, Any]:
    n = outcome.accept_count + outcome.reject_count + outcome.never_count
    summary: dict[str, Any] = {
        "n_agents": n,
        "accept_count": outcome.accept_count,
        "reject_count": outcome.reject_count,
        "never_count": outcome.never_count,
        "accept_fraction": outcome.accept_count / n,
        "reject_fraction": outcome.reject_count / n,
        "never_fraction": outcome.never_count / n,
        "quantiles": {},
    }
    for decision in (ACCEPT, REJECT, NEVER):
        group = [rec for rec in outcome.records if rec.decision == decision]
        entry: dict[str, Any] = {"count": len(group)}
        columns = {
            "l": [rec.l for rec in group],
            "gamma_exponent": [rec.param for rec in group if rec.kind == EU],
            "lambda": [rec.param for rec in group if rec.kind == CATASTROPHIC],
        }
        for name, values in columns.items():
            entry[name] = {str(q): nearest_rank(values, q) for q in QUANTILES} if values else None
        summary["quantiles"][decision] = entry
    return summary


AGENT_CSV_HEADER = "agent,kind,l,gamma_or_lambda,decision,never_taker"


def agents_csv(outcome: ExperimentOutcome) -> str:
    lines = [AGENT_CSV_HEADER]
    for rec in outcome.records:
        lines.append(
            f"{rec.agent},{rec.kind},{rec.l!r},{rec.param!r},{rec.decision},{str(rec.never_taker).lower()}"
        )
    return "\n".join(lines) + "\n"


def spec_dict(spec: PopulationSpec) -> dict[str, Any]:
    return asdict(spec)
