"""Shared parameter sets, random-draw helpers, and hypothesis strategies."""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from replicator_lab import AdjustmentCosts, ModelParams, Params1D, State

# ---------------------------------------------------------------------------
# Reference parameter sets (figure-calibrated; beta = 1 throughout).
# Argument order: pi_gg, pi_gb, pi_bg, pi_bb, c_g, c_b, beta.
# ---------------------------------------------------------------------------

SCENARIO_SETS: dict[str, ModelParams] = {
    "S1": ModelParams.from_values(2.75, 2.3, 2.5, 2.2, 0.3, 0.4, 1.0),
    "S2": ModelParams.from_values(2.75, 2.2, 2.5, 2.4, 0.3, 0.1, 1.0),
    "S3": ModelParams.from_values(2.75, 2.05, 2.5, 2.2, 0.2, 0.1, 1.0),
    "S4": ModelParams.from_values(2.0, 2.3, 2.5, 2.2, 0.3, 0.4, 1.0),
    "S5": ModelParams.from_values(1.0, 1.0, 2.5, 2.0, 0.5, 0.4, 1.0),
    "S6": ModelParams.from_values(2.75, 2.2, 2.5, 2.2, 0.2, 0.1, 1.0),
    "S7": ModelParams.from_values(2.4, 2.3, 2.5, 1.9, 0.3, 0.4, 1.0),
    "S8": ModelParams.from_values(2.3, 2.3, 2.5, 2.1, 0.1, 0.1, 1.0),
    "S9": ModelParams.from_values(2.75, 2.3, 2.5, 2.0, 0.2, 0.4, 1.0),
}

#: The symmetric-threshold set whose basin split is exactly even (same as S3).
EQUAL_BASIN_SET = SCENARIO_SETS["S3"]

# Multi-equilibrium showcases at higher choice intensity.
MULTI_INNER_SET = ModelParams.from_values(2.75, 1.7, 2.5, 1.9, 0.3, 0.4, 5.0)
MULTI_DIAGONAL_SET = ModelParams.from_values(5.3, 1.95, 5.1, 1.0, 1.2, 0.01, 4.0)
CYCLE_SET = ModelParams.from_values(4.0, 1.95, 5.1, 0.8, 0.1, 0.01, 4.0)

# One-population staircase sets: same green profit and costs, three brown
# profit levels spanning the no-interior / interior / interior regimes.
ONE_POP_HIGH_BROWN = Params1D.from_values(0.95, 1.3, 0.3, 0.3, 4.0)
ONE_POP_MID_BROWN = Params1D.from_values(0.95, 1.0, 0.3, 0.3, 4.0)
ONE_POP_LOW_BROWN = Params1D.from_values(0.95, 0.6, 0.3, 0.3, 4.0)


# ---------------------------------------------------------------------------
# Seeded random draws (numpy Generator) for the large count-based checks.
# ---------------------------------------------------------------------------

def random_model_params(
    rng: np.random.Generator,
    *,
    payoff_range: tuple[float, float] = (0.5, 3.0),
    cost_range: tuple[float, float] = (0.0, 1.0),
    beta_range: tuple[float, float] = (0.2, 5.0),
) -> ModelParams:
    """One uniformly drawn valid parameter set."""
    pi = rng.uniform(*payoff_range, size=4)
    c_g, c_b = rng.uniform(*cost_range, size=2)
    if c_g + c_b == 0.0:  # measure-zero corner of the draw box
        c_b = 0.5 * (cost_range[0] + cost_range[1]) or 0.5
    beta = rng.uniform(*beta_range)
    return ModelParams.from_values(pi[0], pi[1], pi[2], pi[3], c_g, c_b, beta)


def random_interior_state(rng: np.random.Generator, margin: float = 1e-3) -> State:
    """A state bounded away from the box edges by ``margin``."""
    x, y = rng.uniform(margin, 1.0 - margin, size=2)
    return State(x, y)


# ---------------------------------------------------------------------------
# Hypothesis strategies.
# ---------------------------------------------------------------------------

payoffs_st = st.floats(min_value=0.5, max_value=3.0, allow_nan=False)
costs_st = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
beta_st = st.floats(min_value=0.1, max_value=6.0, allow_nan=False)
unit_open_st = st.floats(min_value=1e-6, max_value=1.0 - 1e-6, allow_nan=False)
unit_closed_st = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@st.composite
def model_params_st(draw) -> ModelParams:
    pi_gg = draw(payoffs_st)
    pi_gb = draw(payoffs_st)
    pi_bg = draw(payoffs_st)
    pi_bb = draw(payoffs_st)
    c_g = draw(costs_st)
    c_b = draw(st.floats(min_value=1e-3, max_value=1.0, allow_nan=False))
    beta = draw(beta_st)
    return ModelParams.from_values(pi_gg, pi_gb, pi_bg, pi_bb, c_g, c_b, beta)


@st.composite
def params_1d_st(draw) -> Params1D:
    pi_g = draw(payoffs_st)
    pi_b = draw(payoffs_st)
    c_g = draw(costs_st)
    c_b = draw(costs_st)
    beta = draw(beta_st)
    return Params1D(pi_g, pi_b, AdjustmentCosts(c_g, c_b), beta)


@st.composite
def state_st(draw) -> State:
    return State(draw(unit_closed_st), draw(unit_closed_st))
