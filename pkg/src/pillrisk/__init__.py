"""Expected utility, risk aversion and catastrophic-risk rankings for the pill deal."""

from .catastrophic import (
    AgentClass,
    AgentKind,
    CatastropheRanking,
    StepDensity,
    StepFunction,
    classify_agent,
    lambda_threshold,
    lebesgue_part,
    limit_at_zero,
    modify_near_zero,
    pill_density,
    pill_step_lottery,
    rank_value,
    w_lambda,
    w_lambda_limit,
)
from .errors import (
    DomainError,
    EmptyInputError,
    InvalidEpsError,
    InvalidThresholdError,
    MaxIterationsError,
    NoLimitError,
    NoSignChangeError,
    NoSolutionError,
    PillRiskError,
    RangeError,
)
from .lottery import DiscreteLottery, Preference, certainty_equivalent, expected_utility, mean, prefers
from .numeric import Bracket, find_root, log_sum_exp
from .pill import (
    PillDeal,
    acceptance_probability_threshold,
    as_lottery,
    calibrate_gamma,
    deal_value,
    implied_life,
    indifference_residual,
    mean_gain,
    naive_life_bound,
    sweep_deal_value,
)
from .utility import CaraExp, Linear, PowerNeg, UtilityFamily, make_family, parse_gamma

__version__ = "0.1.0"
