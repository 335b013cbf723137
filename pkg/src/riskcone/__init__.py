"""Exact polyhedral coherent risk measures on finite filtered spaces."""

from .cones import PolyCone, contains, dd_convert, equal, polar
from .errors import (
    BudgetExhausted,
    InputError,
    NoCPPError,
    RepresentationUnavailable,
    RiskconeError,
    SchemaError,
)
from .market import (
    BidAskProcess,
    augment,
    consistent_price_cone,
    is_arbitrage_free,
    lambda_decomposition,
    verify_acceptance_equality,
)
from .portfolio import (
    PortfolioSpec,
    b_eta,
    decomposed_cone,
    is_represented,
    polar_portfolio_identity,
    portfolio_cone,
    representation_report,
    t_cone_profile,
)
from .risk import RiskMeasure, acceptance_cone, check_equivalent, is_numeraire, lambda_t, rho_t, rho_t_v
from .space import FilteredSpace, Measure, RandomVec, TestSet, cond_exp, make_space
from .stability import (
    PastingWitness,
    check_stopping_time_pasting,
    falsify_m_stability,
    finite_strong_assets,
    is_m_stable,
    verify_witness,
)

__version__ = "0.1.0"

__all__ = [
    "BidAskProcess", "BudgetExhausted", "FilteredSpace", "InputError", "Measure", "NoCPPError",
    "PastingWitness", "PolyCone", "PortfolioSpec", "RandomVec", "RepresentationUnavailable",
    "RiskMeasure", "RiskconeError", "SchemaError", "TestSet", "acceptance_cone", "augment", "b_eta",
    "check_equivalent", "check_stopping_time_pasting", "cond_exp", "consistent_price_cone",
    "contains", "dd_convert", "decomposed_cone", "equal", "falsify_m_stability",
    "finite_strong_assets", "is_arbitrage_free", "is_m_stable", "is_numeraire", "is_represented",
    "lambda_decomposition", "lambda_t", "make_space", "polar", "polar_portfolio_identity",
    "portfolio_cone", "representation_report", "rho_t", "rho_t_v", "t_cone_profile",
    "verify_acceptance_equality", "verify_witness",
]
