"""Trajectory simulation, basin-of-attraction rasters, and staircase data.

``simulate`` follows a single trajectory of the full two-firm map until it
enters an eps-ball around one of the four vertices. ``compute_basins``
classifies a whole grid of starting points with a vectorized kernel that
iterates all not-yet-converged cells at once, optionally split into row
bands across worker threads (the per-cell arithmetic is elementwise, so
the raster is identical for any thread count). ``staircase`` tabulates
(eta_t, eta_{t+1}) pairs for the one-population maps.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum, IntEnum

import numpy as np

from .errors import DomainError, ValidationError
from .model_core import (
    EXP_CLAMP,
    ModelParams,
    Params1D,
    State,
    derived_coefficients,
    step_adjusted_1d,
    step_classic_1d,
    step_full,
)

#: Environment variable capping worker threads for basin rasters (0 = auto).
THREADS_ENV_VAR = "REPLICATOR_LAB_THREADS"


class OutcomeCode(IntEnum):
    """Asymptotic fate of a trajectory; values are the raster cell codes."""

    TO_GG = 0
    TO_BB = 1
    TO_GB = 2
    TO_BG = 3
    NON_CONVERGENT = 4

    @property
    def label(self) -> str:
        return _OUTCOME_LABELS[self]


_OUTCOME_LABELS = {
    OutcomeCode.TO_GG: "ToGG",
    OutcomeCode.TO_BB: "ToBB",
    OutcomeCode.TO_GB: "ToGB",
    OutcomeCode.TO_BG: "ToBG",
    OutcomeCode.NON_CONVERGENT: "NonConvergent",
}

#: Vertex targeted by each convergent outcome, as (eta1, eta2).
OUTCOME_VERTICES = {
    OutcomeCode.TO_GG: (1.0, 1.0),
    OutcomeCode.TO_BB: (0.0, 0.0),
    OutcomeCode.TO_GB: (1.0, 0.0),
    OutcomeCode.TO_BG: (0.0, 1.0),
}


@dataclass(frozen=True)
class Outcome:
    """Final classification of one trajectory and the steps it took."""

    code: OutcomeCode
    iterations_used: int


@dataclass(eq=False)
class BasinRaster:
    """Grid of outcome codes over the unit square of starting states.

    ``cells[i, j]`` holds the OutcomeCode value for the start
    ``((i + 0.5) / resolution, (j + 0.5) / resolution)``, i.e. the first
    index runs over eta1 and the second over eta2.
    """

    resolution: int
    cells: np.ndarray
    params_used: ModelParams
    eps: float
    max_iter: int


def _check_solver_args(eps: float, max_iter: int) -> None:
    if not 0.0 < eps < 0.5:
        raise ValidationError(f"eps must be in (0, 0.5), got {eps!r}")
    if max_iter < 1:
        raise ValidationError(f"max_iter must be >= 1, got {max_iter!r}")


def simulate(
    params: ModelParams,
    s0: State,
    max_iter: int = 5000,
    eps: float = 1e-6,
    record_trajectory: bool = False,
) -> tuple[Outcome, list[State] | None]:
    """Iterate the full map from ``s0`` until a vertex eps-ball is entered.

    Returns the outcome (NON_CONVERGENT with ``iterations_used == max_iter``
    if no vertex is approached in time) and, when requested, the visited
    states including both endpoints. Convergence is checked in the max
    norm, starting with the initial state itself.
    """
    _check_solver_args(eps, max_iter)
    trajectory: list[State] | None = [s0] if record_trajectory else None
    s = s0
    for t in range(max_iter + 1):
        for code, (vx, vy) in OUTCOME_VERTICES.items():
            if max(abs(s.eta1 - vx), abs(s.eta2 - vy)) < eps:
                return (Outcome(code, t), trajectory)
        if t == max_iter:
            break
        s = step_full(params, s)
        if trajectory is not None:
            trajectory.append(s)
    return (Outcome(OutcomeCode.NON_CONVERGENT, max_iter), trajectory)


def _iterate_grid(
    params: ModelParams, x0: np.ndarray, y0: np.ndarray, eps: float, max_iter: int
) -> np.ndarray:
    """Vectorized outcome codes for a batch of starting points.

    Keeps an active set of unconverged cells and applies the map to the
    whole set each iteration, so converged cells stop costing work.
    """
    a, b = derived_coefficients(params)
    c_g, c_b, beta = params.costs.c_g, params.costs.c_b, params.beta

    n = x0.size
    codes = np.full(n, OutcomeCode.NON_CONVERGENT.value, dtype=np.uint8)
    x = x0.astype(np.float64).ravel().copy()
    y = y0.astype(np.float64).ravel().copy()
    alive = np.arange(n)

    def coordinate_step(s: np.ndarray, gap: np.ndarray) -> np.ndarray:
        e1 = np.exp(np.clip(beta * (gap - c_b), -EXP_CLAMP, EXP_CLAMP))
        e2 = np.exp(np.clip(beta * (gap + c_g), -EXP_CLAMP, EXP_CLAMP))
        comp = 1.0 - s
        return s * s / (s + comp * e1) + s * comp / (s + comp * e2)

    for t in range(max_iter + 1):
        near_1x = x > 1.0 - eps
        near_0x = x < eps
        near_1y = y > 1.0 - eps
        near_0y = y < eps
        done = (near_1x | near_0x) & (near_1y | near_0y)
        if done.any():
            hit = np.where(done)[0]
            cell_codes = np.where(
                near_1x[hit],
                np.where(near_1y[hit], OutcomeCode.TO_GG.value, OutcomeCode.TO_GB.value),
                np.where(near_1y[hit], OutcomeCode.TO_BG.value, OutcomeCode.TO_BB.value),
            )
            codes[alive[hit]] = cell_codes.astype(np.uint8)
            keep = ~done
            x, y, alive = x[keep], y[keep], alive[keep]
        if t == max_iter or alive.size == 0:
            break
        gap_x = a * y + b
        gap_y = a * x + b
        x, y = coordinate_step(x, gap_x), coordinate_step(y, gap_y)
    return codes


def resolve_thread_count() -> int:
    """Worker count for basin rasters, from the environment (0 = auto)."""
    raw = os.environ.get(THREADS_ENV_VAR, "0").strip() or "0"
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValidationError(
            f"{THREADS_ENV_VAR} must be a nonnegative integer, got {raw!r}"
        ) from exc
    if value < 0:
        raise ValidationError(
            f"{THREADS_ENV_VAR} must be a nonnegative integer, got {raw!r}"
        )
    if value == 0:
        return os.cpu_count() or 1
    return value


def compute_basins(
    params: ModelParams,
    resolution: int = 400,
    eps: float = 1e-6,
    max_iter: int = 5000,
) -> BasinRaster:
    """Classify every cell of a resolution x resolution grid of starts.

    Cell (i, j) starts at the cell center ((i+0.5)/res, (j+0.5)/res). Rows
    are split into contiguous bands processed by a thread pool sized by the
    REPLICATOR_LAB_THREADS environment variable; cells are independent, so
    the result does not depend on the banding.
    """
    if resolution < 16:
        raise ValidationError(f"resolution must be >= 16, got {resolution!r}")
    _check_solver_args(eps, max_iter)

    centers = (np.arange(resolution) + 0.5) / resolution
    cells = np.empty((resolution, resolution), dtype=np.uint8)

    threads = min(resolve_thread_count(), resolution)
    bounds = np.linspace(0, resolution, threads + 1).astype(int)
    bands = [(bounds[k], bounds[k + 1]) for k in range(threads) if bounds[k] < bounds[k + 1]]

    def run_band(lo: int, hi: int) -> tuple[int, int, np.ndarray]:
        x = np.repeat(centers[lo:hi], resolution)
        y = np.tile(centers, hi - lo)
        codes = _iterate_grid(params, x, y, eps, max_iter)
        return (lo, hi, codes.reshape(hi - lo, resolution))

    if len(bands) <= 1:
        lo, hi, block = run_band(0, resolution)
        cells[lo:hi] = block
    else:
        with ThreadPoolExecutor(max_workers=len(bands)) as pool:
            for lo, hi, block in pool.map(lambda br: run_band(*br), bands):
                cells[lo:hi] = block

    return BasinRaster(
        resolution=resolution,
        cells=cells,
        params_used=params,
        eps=eps,
        max_iter=max_iter,
    )


def basin_areas(raster: BasinRaster) -> dict[OutcomeCode, float]:
    """Fraction of grid cells per outcome, for the outcomes that occur.

    Fractions are counts over resolution**2 and sum to 1 up to float
    round-off.
    """
    counts = np.bincount(raster.cells.ravel(), minlength=5)
    total = raster.resolution * raster.resolution
    return {
        OutcomeCode(code): int(counts[code]) / total
        for code in range(5)
        if counts[code] > 0
    }


class MapKind(Enum):
    """Which one-population map a staircase should iterate."""

    CLASSIC = "classic"
    ADJUSTED = "adjusted"


def staircase(
    p: Params1D, model: MapKind, s0: float, n_steps: int
) -> list[tuple[float, float]]:
    """(eta_t, eta_{t+1}) pairs along a one-population trajectory.

    Returns ``n_steps`` pairs chaining consecutively: the second entry of
    each pair is the first entry of the next.
    """
    if n_steps < 1:
        raise ValidationError(f"n_steps must be >= 1, got {n_steps!r}")
    if not isinstance(model, MapKind):
        raise DomainError(f"model must be a MapKind, got {model!r}")
    step = step_classic_1d if model == MapKind.CLASSIC else step_adjusted_1d
    pairs: list[tuple[float, float]] = []
    eta = s0
    for _ in range(n_steps):
        nxt = step(p, eta)
        pairs.append((eta, nxt))
        eta = nxt
    return pairs
