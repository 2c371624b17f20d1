"""Jacobians, eigenvalue reports, and the nine-scenario classification.

The full two-firm map has a closed-form Jacobian; this module evaluates it,
turns eigenvalues into Attractor / Saddle / Repellor / NonHyperbolic
verdicts, provides the dedicated closed forms for vertices, edge equilibria
and diagonal equilibria, and classifies a parameter set into one of the
nine structural scenarios determined by the four vertex discriminants.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .equilibria import EquilibriumKind, edge_eta_plus, edge_eta_star
from .errors import (
    DomainError,
    InternalError,
    NotAnEquilibriumError,
    UndefinedDirectionError,
)
from .model_core import (
    EXP_CLAMP,
    ModelParams,
    State,
    _bounded_exp,
    derived_coefficients,
    step_full,
)

#: Eigenvalue magnitudes within this distance of 1 are non-hyperbolic.
HYPERBOLICITY_TOL = 1e-9

#: A point must have a one-step defect at most this large to be accepted
#: as an equilibrium by the stability queries.
EQUILIBRIUM_TOL = 1e-8


class Classification(Enum):
    ATTRACTOR = "Attractor"
    SADDLE = "Saddle"
    REPELLOR = "Repellor"
    NON_HYPERBOLIC = "NonHyperbolic"


class BifurcationDirection(Enum):
    """Direction in which a diagonal equilibrium first loses stability."""

    ALONG_DIAGONAL = "AlongDiagonal"
    TRANSVERSE_TO_DIAGONAL = "TransverseToDiagonal"


@dataclass(frozen=True)
class StabilityReport:
    """Eigenvalues of the Jacobian at a fixed point and their verdict."""

    eigenvalues: tuple[complex, complex]
    magnitudes: tuple[float, float]
    classification: Classification


@dataclass(frozen=True)
class DiagonalStability:
    """Stability of a diagonal equilibrium split by symmetry direction.

    ``report.eigenvalues`` are ordered (along, transverse): the first
    eigenvalue acts along the diagonal (eigenvector (1, 1)), the second
    transverse to it (eigenvector (-1, 1)). ``direction`` names the
    direction whose eigenvalue dominates in magnitude and therefore drives
    the first loss of stability.
    """

    report: StabilityReport
    direction: BifurcationDirection


class ScenarioId(Enum):
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"
    S4 = "S4"
    S5 = "S5"
    S6 = "S6"
    S7 = "S7"
    S8 = "S8"
    S9 = "S9"
    DEGENERATE = "Degenerate"


def _classify(magnitudes: tuple[float, float], tol: float = HYPERBOLICITY_TOL) -> Classification:
    m1, m2 = magnitudes
    if abs(m1 - 1.0) <= tol or abs(m2 - 1.0) <= tol:
        return Classification.NON_HYPERBOLIC
    below = (m1 < 1.0) + (m2 < 1.0)
    if below == 2:
        return Classification.ATTRACTOR
    if below == 0:
        return Classification.REPELLOR
    return Classification.SADDLE


def _report_from_matrix(j: np.ndarray) -> StabilityReport:
    """Eigenvalues of a 2x2 matrix via the characteristic polynomial."""
    tr = j[0, 0] + j[1, 1]
    det = j[0, 0] * j[1, 1] - j[0, 1] * j[1, 0]
    disc = tr * tr - 4.0 * det
    if disc >= 0.0:
        root = math.sqrt(disc)
        lams: tuple[complex, complex] = ((tr + root) / 2.0, (tr - root) / 2.0)
    else:
        root = cmath.sqrt(disc)
        lams = ((tr + root) / 2.0, (tr - root) / 2.0)
    mags = (abs(lams[0]), abs(lams[1]))
    return StabilityReport(lams, mags, _classify(mags))


def jacobian(params: ModelParams, s: State) -> np.ndarray:
    """Closed-form Jacobian of the full map at an arbitrary state.

    Row i holds the partial derivatives of the updated eta_i. Each
    coordinate's update depends on its own value and, through the profit
    gap ``a*eta_other + b``, on the opponent's value.
    """
    a, b = derived_coefficients(params)
    c_g, c_b, beta = params.costs.c_g, params.costs.c_b, params.beta

    def row(x: float, y: float) -> tuple[float, float]:
        u = a * y + b
        e1 = _bounded_exp(beta * (u - c_b))
        e2 = _bounded_exp(beta * (u + c_g))
        d1 = x + (1.0 - x) * e1
        d2 = x + (1.0 - x) * e2
        own = (x * x + 2.0 * x * e1 - x * x * e1) / (d1 * d1) + (
            (1.0 - x) * (1.0 - x) * e2 - x * x
        ) / (d2 * d2)
        cross = -beta * a * (
            x * x * (1.0 - x) * e1 / (d1 * d1) + x * (1.0 - x) * (1.0 - x) * e2 / (d2 * d2)
        )
        return (own, cross)

    j11, j12 = row(s.eta1, s.eta2)
    j22, j21 = row(s.eta2, s.eta1)
    return np.array([[j11, j12], [j21, j22]])


def jacobian_fd(params: ModelParams, s: State, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian, for verifying the closed form.

    Steps are shrunk at the boundary so sample points stay inside the unit
    square (the closed form is smooth there, so one-sided shrinking is
    harmless at the stated accuracy).
    """
    base = np.array([s.eta1, s.eta2])
    j = np.empty((2, 2))
    for k in range(2):
        lo = max(base[k] - h, 0.0)
        hi = min(base[k] + h, 1.0)
        p_lo, p_hi = base.copy(), base.copy()
        p_lo[k] = lo
        p_hi[k] = hi
        f_lo = step_full(params, State(*p_lo)).as_tuple()
        f_hi = step_full(params, State(*p_hi)).as_tuple()
        j[0, k] = (f_hi[0] - f_lo[0]) / (hi - lo)
        j[1, k] = (f_hi[1] - f_lo[1]) / (hi - lo)
    return j


def stability_at(params: ModelParams, s: State) -> StabilityReport:
    """Eigenvalue report at an arbitrary fixed point of the full map.

    Raises NotAnEquilibriumError if the one-step defect at ``s`` exceeds
    EQUILIBRIUM_TOL.
    """
    nxt = step_full(params, s)
    defect = max(abs(nxt.eta1 - s.eta1), abs(nxt.eta2 - s.eta2))
    if defect > EQUILIBRIUM_TOL:
        raise NotAnEquilibriumError(
            f"state ({s.eta1!r}, {s.eta2!r}) has one-step defect {defect:.3g}"
        )
    return _report_from_matrix(jacobian(params, s))


def vertex_eigenvalues(params: ModelParams) -> dict[EquilibriumKind, StabilityReport]:
    """Closed-form eigenvalue reports for the four vertices.

    At each vertex the Jacobian is diagonal; the eigenvalues are::

        (0,0): exp(-beta*(b + c_g))        twice
        (1,1): exp(beta*(a + b - c_b))     twice
        (1,0): (exp(beta*(b - c_b)), exp(-beta*(a + b + c_g)))
        (0,1): the (1,0) pair swapped

    so (0,0) and (1,1) each have a double eigenvalue and the two mixed
    vertices share their classification.
    """
    a, b = derived_coefficients(params)
    c_g, c_b, beta = params.costs.c_g, params.costs.c_b, params.beta

    def report(lams: tuple[float, float]) -> StabilityReport:
        mags = (abs(lams[0]), abs(lams[1]))
        return StabilityReport((lams[0], lams[1]), mags, _classify(mags))

    lam00 = _bounded_exp(-beta * (b + c_g))
    lam11 = _bounded_exp(beta * (a + b - c_b))
    lam10_own = _bounded_exp(beta * (b - c_b))
    lam10_other = _bounded_exp(-beta * (a + b + c_g))
    return {
        EquilibriumKind.VERTEX_00: report((lam00, lam00)),
        EquilibriumKind.VERTEX_10: report((lam10_own, lam10_other)),
        EquilibriumKind.VERTEX_01: report((lam10_other, lam10_own)),
        EquilibriumKind.VERTEX_11: report((lam11, lam11)),
    }


def edge_eigenvalues(params: ModelParams, which: EquilibriumKind) -> StabilityReport:
    """Eigenvalue report for an edge equilibrium family.

    ``which`` selects the family through eta* (EDGE_BROWN or its swap twin
    EDGE_BROWN_SYM) or through eta+ (EDGE_GREEN / EDGE_GREEN_SYM); both
    members of a pair share eigenvalues and classification, so the swap
    twins map to the same report. Eigenvalues are ordered (transverse,
    along): the
    transverse eigenvalue moves the locked firm off its pure technology and
    has the closed form ``exp(-beta*(a*eta* + b + c_g))`` on the brown edge
    and ``exp(beta*(a*eta+ + b - c_b))`` on the green edge; the along-edge
    eigenvalue comes from the Jacobian of the mixed coordinate. Raises
    NotAnEquilibriumError when the requested family does not exist.
    """
    a, b = derived_coefficients(params)
    beta = params.beta
    if which in (EquilibriumKind.EDGE_BROWN, EquilibriumKind.EDGE_BROWN_SYM):
        eta = edge_eta_star(params)
        if eta is None:
            raise NotAnEquilibriumError(
                "brown-edge equilibrium does not exist for these parameters"
            )
        point = State(0.0, eta)
        transverse = _bounded_exp(-beta * (a * eta + b + params.costs.c_g))
    elif which in (EquilibriumKind.EDGE_GREEN, EquilibriumKind.EDGE_GREEN_SYM):
        eta = edge_eta_plus(params)
        if eta is None:
            raise NotAnEquilibriumError(
                "green-edge equilibrium does not exist for these parameters"
            )
        point = State(1.0, eta)
        transverse = _bounded_exp(beta * (a * eta + b - params.costs.c_b))
    else:
        raise DomainError(f"which must select an edge family, got {which}")
    # The Jacobian at (0, eta*) / (1, eta+) is triangular: the locked
    # coordinate decouples, so the diagonal entries are the eigenvalues.
    j = jacobian(params, point)
    along = float(j[1, 1])
    mags = (abs(transverse), abs(along))
    return StabilityReport((transverse, along), mags, _classify(mags))


def diagonal_eigenvalues(params: ModelParams, eta_bar: float) -> DiagonalStability:
    """Closed-form eigenvalues at a diagonal equilibrium (eta_bar, eta_bar).

    By swap symmetry the Jacobian there has equal diagonal entries A and
    equal off-diagonal entries B, so the eigenvalues are real::

        lambda_along      = A + B   (eigenvector (1, 1))
        lambda_transverse = A - B   (eigenvector (-1, 1))

    When the interaction coefficient ``a`` is positive, B < 0 and the
    transverse eigenvalue dominates, so stability is first lost transverse
    to the diagonal; when ``a`` is negative it is lost along the diagonal.
    Raises NotAnEquilibriumError if (eta_bar, eta_bar) is not fixed and
    UndefinedDirectionError when ``a == 0`` (the firms decouple and no
    direction dominates).
    """
    eta = float(eta_bar)
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta_bar must lie in [0, 1], got {eta_bar!r}")
    point = State(eta, eta)
    nxt = step_full(params, point)
    defect = max(abs(nxt.eta1 - eta), abs(nxt.eta2 - eta))
    if defect > EQUILIBRIUM_TOL:
        raise NotAnEquilibriumError(
            f"({eta!r}, {eta!r}) has one-step defect {defect:.3g}"
        )
    a, _ = derived_coefficients(params)
    if a == 0.0:
        raise UndefinedDirectionError(
            "bifurcation direction undefined: interaction coefficient a == 0"
        )
    j = jacobian(params, point)
    lam_along = float(j[0, 0] + j[0, 1])
    lam_transverse = float(j[0, 0] - j[0, 1])
    mags = (abs(lam_along), abs(lam_transverse))
    report = StabilityReport((lam_along, lam_transverse), mags, _classify(mags))
    direction = (
        BifurcationDirection.TRANSVERSE_TO_DIAGONAL
        if a > 0.0
        else BifurcationDirection.ALONG_DIAGONAL
    )
    return DiagonalStability(report, direction)


def discriminants(params: ModelParams) -> tuple[float, float, float, float]:
    """The four vertex discriminants driving the scenario classification.

    Each compares staying at a vertex against deviating, net of the
    deviator's switching cost::

        d1 = pi_bb - (pi_gb - c_g)   # stay brown at (0,0)
        d2 = pi_gg - (pi_bg - c_b)   # stay green at (1,1)
        d3 = pi_bg - (pi_gg - c_g)   # brown firm stays at a mixed vertex
        d4 = pi_gb - (pi_bb - c_b)   # green firm stays at a mixed vertex
    """
    p, c = params.payoffs, params.costs
    d1 = p.pi_bb - (p.pi_gb - c.c_g)
    d2 = p.pi_gg - (p.pi_bg - c.c_b)
    d3 = p.pi_bg - (p.pi_gg - c.c_g)
    d4 = p.pi_gb - (p.pi_bb - c.c_b)
    return (d1, d2, d3, d4)


#: Sign pattern of (d1, d2, d3, d4) -> scenario. True means positive.
_SIGN_TO_SCENARIO = {
    (True, True, True, True): ScenarioId.S1,
    (True, True, True, False): ScenarioId.S2,
    (True, True, False, False): ScenarioId.S3,
    (True, False, True, True): ScenarioId.S4,
    (True, False, True, False): ScenarioId.S5,
    (True, True, False, True): ScenarioId.S6,
    (False, True, True, True): ScenarioId.S7,
    (False, False, True, True): ScenarioId.S8,
    (False, True, False, True): ScenarioId.S9,
}

#: Vertex classifications implied by each scenario, in the order
#: (0,0), (1,0), (0,1), (1,1). A = Attractor, S = Saddle, R = Repellor.
SCENARIO_VERTEX_CLASSES: dict[ScenarioId, tuple[Classification, ...]] = {
    ScenarioId.S1: tuple([Classification.ATTRACTOR] * 4),
    ScenarioId.S2: (
        Classification.ATTRACTOR,
        Classification.SADDLE,
        Classification.SADDLE,
        Classification.ATTRACTOR,
    ),
    ScenarioId.S3: (
        Classification.ATTRACTOR,
        Classification.REPELLOR,
        Classification.REPELLOR,
        Classification.ATTRACTOR,
    ),
    ScenarioId.S4: (
        Classification.ATTRACTOR,
        Classification.ATTRACTOR,
        Classification.ATTRACTOR,
        Classification.REPELLOR,
    ),
    ScenarioId.S5: (
        Classification.ATTRACTOR,
        Classification.SADDLE,
        Classification.SADDLE,
        Classification.REPELLOR,
    ),
    ScenarioId.S6: (
        Classification.ATTRACTOR,
        Classification.SADDLE,
        Classification.SADDLE,
        Classification.ATTRACTOR,
    ),
    ScenarioId.S7: (
        Classification.REPELLOR,
        Classification.ATTRACTOR,
        Classification.ATTRACTOR,
        Classification.ATTRACTOR,
    ),
    ScenarioId.S8: (
        Classification.REPELLOR,
        Classification.ATTRACTOR,
        Classification.ATTRACTOR,
        Classification.REPELLOR,
    ),
    ScenarioId.S9: (
        Classification.REPELLOR,
        Classification.SADDLE,
        Classification.SADDLE,
        Classification.ATTRACTOR,
    ),
}


def classify_scenario(params: ModelParams, tolerance: float = 1e-9) -> ScenarioId:
    """Classify a parameter set into one of the nine scenarios.

    The scenario is the sign pattern of the four vertex discriminants
    (strictly positive versus strictly negative). Any discriminant within
    ``tolerance`` of zero makes the parameters Degenerate. The patterns
    with d1 and d4 both negative, or d2 and d3 both negative, are
    structurally impossible; hitting one raises InternalError.
    """
    ds = discriminants(params)
    if any(abs(d) < tolerance for d in ds):
        return ScenarioId.DEGENERATE
    signs = tuple(d > 0.0 for d in ds)
    scenario = _SIGN_TO_SCENARIO.get(signs)
    if scenario is None:
        raise InternalError(
            f"discriminant sign pattern {signs} should be unreachable "
            f"(d = {ds!r})"
        )
    return scenario
