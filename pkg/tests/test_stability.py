"""Unit and property tests for Jacobians, classifications, and scenarios."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings

from replicator_lab import (
    BifurcationDirection,
    Classification,
    EquilibriumKind,
    InternalError,
    ModelParams,
    NotAnEquilibriumError,
    ScenarioId,
    State,
    UndefinedDirectionError,
    classify_scenario,
    diagonal_eigenvalues,
    discriminants,
    edge_equilibria,
    edge_eigenvalues,
    find_diagonal_equilibria,
    jacobian,
    jacobian_fd,
    vertex_eigenvalues,
)
from replicator_lab.stability import SCENARIO_VERTEX_CLASSES

from conftest import (
    EQUAL_BASIN_SET,
    SCENARIO_SETS,
    model_params_st,
    random_interior_state,
    random_model_params,
    state_st,
)

VERTEX_ORDER = (
    EquilibriumKind.VERTEX_00,
    EquilibriumKind.VERTEX_10,
    EquilibriumKind.VERTEX_01,
    EquilibriumKind.VERTEX_11,
)


# ---------------------------------------------------------------------------
# Jacobian closed form
# ---------------------------------------------------------------------------

def test_jacobian_diagonal_at_corner_vertices():
    s1 = SCENARIO_SETS["S1"]
    a = 2.5 - 2.75 - 2.2 + 2.3
    b = 2.2 - 2.3
    j00 = jacobian(s1, State(0.0, 0.0))
    expected00 = math.exp(-1.0 * (b + 0.3))
    assert j00[0, 0] == pytest.approx(expected00, abs=1e-14)
    assert j00[1, 1] == pytest.approx(expected00, abs=1e-14)
    assert j00[0, 1] == 0.0 and j00[1, 0] == 0.0
    j11 = jacobian(s1, State(1.0, 1.0))
    expected11 = math.exp(1.0 * (a + b - 0.4))
    assert j11[0, 0] == pytest.approx(expected11, abs=1e-14)
    assert j11[1, 1] == pytest.approx(expected11, abs=1e-14)
    assert j11[0, 1] == 0.0 and j11[1, 0] == 0.0


def test_jacobian_matches_finite_differences_bulk():
    rng = np.random.default_rng(20240814)
    worst = 0.0
    for _ in range(1000):
        params = random_model_params(rng)
        s = random_interior_state(rng)
        diff = np.max(np.abs(jacobian(params, s) - jacobian_fd(params, s)))
        worst = max(worst, float(diff))
    assert worst < 1e-5


@settings(max_examples=150)
@given(params=model_params_st(), s=state_st())
def test_jacobian_swap_symmetry(params, s):
    j = jacobian(params, s)
    j_swapped = jacobian(params, s.swapped())
    assert j_swapped[1, 0] == pytest.approx(j[0, 1], abs=1e-13)
    assert j_swapped[1, 1] == pytest.approx(j[0, 0], abs=1e-13)
    assert j_swapped[0, 1] == pytest.approx(j[1, 0], abs=1e-13)
    assert j_swapped[0, 0] == pytest.approx(j[1, 1], abs=1e-13)


def test_jacobian_rejects_states_outside_box():
    with pytest.raises(Exception):
        jacobian(SCENARIO_SETS["S1"], State(1.5, 0.5))


# ---------------------------------------------------------------------------
# Vertex eigenvalue reports
# ---------------------------------------------------------------------------

def test_vertex_eigenvalues_closed_forms_s1():
    reports = vertex_eigenvalues(SCENARIO_SETS["S1"])
    assert reports[EquilibriumKind.VERTEX_00].eigenvalues == pytest.approx(
        (0.8187307530779816, 0.8187307530779816), abs=1e-14
    )
    assert reports[EquilibriumKind.VERTEX_10].eigenvalues == pytest.approx(
        (0.60653065971263365, 0.95122942450071402), abs=1e-14
    )
    assert reports[EquilibriumKind.VERTEX_11].eigenvalues == pytest.approx(
        (0.52204577676101604, 0.52204577676101604), abs=1e-14
    )
    assert all(r.classification is Classification.ATTRACTOR for r in reports.values())


def test_vertex_eigenvalues_match_jacobian_at_vertices():
    rng = np.random.default_rng(31)
    corners = {
        EquilibriumKind.VERTEX_00: State(0.0, 0.0),
        EquilibriumKind.VERTEX_10: State(1.0, 0.0),
        EquilibriumKind.VERTEX_01: State(0.0, 1.0),
        EquilibriumKind.VERTEX_11: State(1.0, 1.0),
    }
    for _ in range(300):
        params = random_model_params(rng)
        reports = vertex_eigenvalues(params)
        for kind, corner in corners.items():
            j = jacobian(params, corner)
            eig = sorted(np.linalg.eigvals(j).real)
            assert sorted(reports[kind].eigenvalues) == pytest.approx(eig, rel=1e-10)


def test_double_eigenvalues_at_symmetric_vertices():
    # (0,0) and (1,1) always carry a repeated eigenvalue: no saddle
    # sign-split is possible there.
    rng = np.random.default_rng(32)
    for _ in range(500):
        reports = vertex_eigenvalues(random_model_params(rng))
        for kind in (EquilibriumKind.VERTEX_00, EquilibriumKind.VERTEX_11):
            lam1, lam2 = reports[kind].eigenvalues
            assert lam1 == lam2
            assert reports[kind].classification is not Classification.SADDLE


def test_mixed_vertices_share_classification():
    rng = np.random.default_rng(33)
    for _ in range(500):
        reports = vertex_eigenvalues(random_model_params(rng))
        assert (
            reports[EquilibriumKind.VERTEX_10].classification
            is reports[EquilibriumKind.VERTEX_01].classification
        )
        lam10 = reports[EquilibriumKind.VERTEX_10].eigenvalues
        lam01 = reports[EquilibriumKind.VERTEX_01].eigenvalues
        assert lam01 == (lam10[1], lam10[0])


def test_non_hyperbolic_vertex_on_exact_threshold():
    # b + c_g == 0 puts the (0,0) eigenvalue exactly at 1 (payoffs chosen
    # so the cancellation is exact in binary floating point).
    params = ModelParams.from_values(2.75, 2.25, 2.5, 2.0, 0.25, 0.4, 1.0)
    report = vertex_eigenvalues(params)[EquilibriumKind.VERTEX_00]
    assert report.eigenvalues[0] == 1.0
    assert report.classification is Classification.NON_HYPERBOLIC


def test_vertex_classes_match_scenario_table_for_all_nine_sets():
    for name, params in SCENARIO_SETS.items():
        scenario = classify_scenario(params)
        assert scenario.value == name
        reports = vertex_eigenvalues(params)
        observed = tuple(reports[kind].classification for kind in VERTEX_ORDER)
        assert observed == SCENARIO_VERTEX_CLASSES[scenario], name


# ---------------------------------------------------------------------------
# Edge eigenvalue reports
# ---------------------------------------------------------------------------

def test_edge_eigenvalues_reference_s1():
    report = edge_eigenvalues(SCENARIO_SETS["S1"], EquilibriumKind.EDGE_BROWN)
    assert report.eigenvalues[0] == pytest.approx(0.850583621239133, abs=1e-13)
    assert report.eigenvalues[1] == pytest.approx(1.1216069154601083, abs=1e-13)
    assert report.classification is Classification.SADDLE
    green = edge_eigenvalues(SCENARIO_SETS["S1"], EquilibriumKind.EDGE_GREEN)
    assert green.classification is Classification.SADDLE


def test_edge_eigenvalues_swap_twin_shares_report():
    s1 = SCENARIO_SETS["S1"]
    for base, twin in (
        (EquilibriumKind.EDGE_BROWN, EquilibriumKind.EDGE_BROWN_SYM),
        (EquilibriumKind.EDGE_GREEN, EquilibriumKind.EDGE_GREEN_SYM),
    ):
        assert edge_eigenvalues(s1, base) == edge_eigenvalues(s1, twin)


def test_edge_eigenvalues_raise_when_family_absent():
    with pytest.raises(NotAnEquilibriumError):
        edge_eigenvalues(SCENARIO_SETS["S5"], EquilibriumKind.EDGE_BROWN)
    with pytest.raises(NotAnEquilibriumError):
        edge_eigenvalues(SCENARIO_SETS["S5"], EquilibriumKind.EDGE_GREEN)


def test_edge_equilibria_never_attracting_over_draws():
    rng = np.random.default_rng(20240815)
    seen = 0
    for _ in range(3000):
        params = random_model_params(rng)
        for eq in edge_equilibria(params):
            report = edge_eigenvalues(params, eq.kind)
            assert report.classification in (
                Classification.SADDLE,
                Classification.REPELLOR,
            )
            seen += 1
    assert seen > 1000


def test_edge_eigenvalues_match_jacobian():
    rng = np.random.default_rng(77)
    seen = 0
    while seen < 300:
        params = random_model_params(rng)
        for eq in edge_equilibria(params):
            j = jacobian(params, eq.location)
            report = edge_eigenvalues(params, eq.kind)
            assert sorted(report.eigenvalues) == pytest.approx(
                sorted(np.linalg.eigvals(j).real), rel=1e-9, abs=1e-12
            )
            seen += 1


# ---------------------------------------------------------------------------
# Diagonal eigenvalue reports
# ---------------------------------------------------------------------------

def test_diagonal_eigenvalues_reference_midpoint():
    result = diagonal_eigenvalues(EQUAL_BASIN_SET, 0.5)
    lam_along, lam_transverse = result.report.eigenvalues
    assert lam_along == pytest.approx(1.1686953200686885, abs=1e-12)
    assert lam_transverse == pytest.approx(0.9698161147266539, abs=1e-12)
    assert result.report.classification is Classification.SADDLE
    assert result.direction is BifurcationDirection.ALONG_DIAGONAL


def test_diagonal_eigenvalues_match_finite_differences():
    eta = find_diagonal_equilibria(EQUAL_BASIN_SET)[0].location.eta1
    result = diagonal_eigenvalues(EQUAL_BASIN_SET, eta)
    fd = np.sort(np.linalg.eigvals(jacobian_fd(EQUAL_BASIN_SET, State(eta, eta))).real)
    assert np.sort(result.report.eigenvalues) == pytest.approx(fd, abs=1e-6)


def test_diagonal_eigenvalues_real_distinct_and_direction_over_draws():
    rng = np.random.default_rng(20240816)
    seen = 0
    while seen < 200:
        params = random_model_params(rng)
        a = (
            params.payoffs.pi_bg - params.payoffs.pi_gg
            - params.payoffs.pi_bb + params.payoffs.pi_gb
        )
        if abs(a) < 1e-6:
            continue
        for eq in find_diagonal_equilibria(params):
            result = diagonal_eigenvalues(params, eq.location.eta1)
            lam_along, lam_transverse = result.report.eigenvalues
            assert lam_along != lam_transverse
            if a > 0.0:
                assert result.direction is BifurcationDirection.TRANSVERSE_TO_DIAGONAL
                if 0.0 < eq.location.eta1 < 1.0:
                    assert lam_transverse > abs(lam_along)
            else:
                assert result.direction is BifurcationDirection.ALONG_DIAGONAL
            seen += 1


def test_diagonal_eigenvalues_reject_non_equilibrium():
    with pytest.raises(NotAnEquilibriumError):
        diagonal_eigenvalues(SCENARIO_SETS["S1"], 0.9)


def test_diagonal_eigenvalues_undefined_direction_when_decoupled():
    params = ModelParams.from_values(2.0, 2.0, 2.1, 2.1, 0.3, 0.3, 1.0)
    # With zero interaction each coordinate has the same 1D interior root,
    # so the diagonal point is a genuine equilibrium.
    eta = find_diagonal_equilibria(params)[0].location.eta1
    with pytest.raises(UndefinedDirectionError):
        diagonal_eigenvalues(params, eta)


# ---------------------------------------------------------------------------
# Scenario classification
# ---------------------------------------------------------------------------

def test_discriminants_reference_s1():
    d1, d2, d3, d4 = discriminants(SCENARIO_SETS["S1"])
    assert d1 == pytest.approx(2.2 - 2.3 + 0.3, abs=1e-12)
    assert d2 == pytest.approx(2.75 - 2.5 + 0.4, abs=1e-12)
    assert d3 == pytest.approx(2.5 - 2.75 + 0.3, abs=1e-12)
    assert d4 == pytest.approx(2.3 - 2.2 + 0.4, abs=1e-12)


def test_discriminant_sum_identity():
    # d1 + d4 and d2 + d3 both equal c_g + c_b, which is why seven of the
    # sixteen sign patterns can never occur.
    rng = np.random.default_rng(51)
    for _ in range(500):
        params = random_model_params(rng)
        d1, d2, d3, d4 = discriminants(params)
        total = params.costs.c_g + params.costs.c_b
        assert d1 + d4 == pytest.approx(total, abs=1e-12)
        assert d2 + d3 == pytest.approx(total, abs=1e-12)


def test_classify_scenario_all_nine_reference_sets():
    for name, params in SCENARIO_SETS.items():
        assert classify_scenario(params) is ScenarioId[name]


def test_classify_scenario_degenerate_band():
    # S6 set has d1 exactly 0 after exact decimal cancellation? No: use a
    # constructed tie d1 = pi_bb - pi_gb + c_g = 0.
    params = ModelParams.from_values(2.75, 2.3, 2.5, 2.2, 0.1, 0.4, 1.0)
    assert classify_scenario(params) is ScenarioId.DEGENERATE
    # Well-separated discriminants are never degenerate at default tolerance.
    assert classify_scenario(SCENARIO_SETS["S1"]) is not ScenarioId.DEGENERATE


def test_classify_scenario_exhaustive_over_draws():
    rng = np.random.default_rng(20240817)
    non_degenerate = 0
    for _ in range(100_000):
        params = random_model_params(rng)
        scenario = classify_scenario(params)  # must never raise InternalError
        if all(abs(d) > 1e-6 for d in discriminants(params)):
            assert scenario is not ScenarioId.DEGENERATE
            non_degenerate += 1
    assert non_degenerate > 90_000
