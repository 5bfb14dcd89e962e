"""Monte Carlo sweeps over sample sizes: draw, estimate, summarize.

A :class:`SimulationPlan` names a population, a list of sample sizes,
the coefficients to estimate, and a replication count.  Each (size,
coefficient) cell yields a :class:`SummaryStats` row.  Replication r of
cell c draws from the stream path (cell, r), so results are identical
no matter how cells or replications are scheduled.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError, InputError
from .estimators import KINDS, kendall_rows, pearson_rows, spearman_rows
from .randgen import PopulationSpec, RngStream, _latent_pair, _transform

__all__ = [
    "SimulationPlan",
    "SummaryStats",
    "logspace_sizes",
    "run_cell",
    "run_plan",
    "SUMMARY_COLUMNS",
]

REDRAW_CAP_PER_SAMPLE = 1000
MAX_REDRAW_RATE = 0.5
_BLOCK_VALUES = 4 * 10 ** 6  # replication block size chosen to bound memory

SUMMARY_COLUMNS = ("condition", "kind", "n", "mean", "sd", "p5", "p95",
                   "bias", "rmse", "redraw_count")


def logspace_sizes(lo: int, hi: int, k: int) -> tuple[int, ...]:
    """k integer sample sizes spaced evenly on a log scale from lo to hi.

    Rounded values are nudged apart so the result is strictly increasing
    with first = lo and last = hi exactly.
    """
    if lo < 2 or hi <= lo:
        raise InputError(f"need 2 <= lo < hi, got lo={lo} hi={hi}")
    if k < 2:
        raise InputError(f"need at least 2 sizes, got k={k}")
    if k > hi - lo + 1:
        raise InputError(f"cannot fit {k} distinct sizes between {lo} and {hi}")
    raw = np.geomspace(lo, hi, k)
    sizes = np.rint(raw).astype(int)
    sizes[0], sizes[-1] = lo, hi
    for i in range(1, k):
        if sizes[i] <= sizes[i - 1]:
            sizes[i] = sizes[i - 1] + 1
    for i in range(k - 2, -1, -1):
        if sizes[i] >= sizes[i + 1]:
            sizes[i] = sizes[i + 1] - 1
    return tuple(int(s) for s in sizes)


@dataclass(frozen=True)
class SimulationPlan:
    population: PopulationSpec
    sample_sizes: tuple[int, ...]
    replications: int = 20000
    coefficients: tuple[str, ...] = ("pearson", "spearman")
    master_seed: int = 0

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sample_sizes)
        if not sizes or any(s < 2 for s in sizes):
            raise InputError("sample sizes must be a nonempty list of integers >= 2")
        object.__setattr__(self, "sample_sizes", sizes)
        if self.replications < 1:
            raise InputError("need at least one replication")
        kinds = tuple(self.coefficients)
        if not kinds or any(c not in KINDS for c in kinds):
            raise InputError(f"coefficients must be drawn from {KINDS}")
        object.__setattr__(self, "coefficients", kinds)

    @property
    def condition(self) -> str:
        return self.population.label


@dataclass(frozen=True)
class SummaryStats:
    """Per-cell Monte Carlo summary of one coefficient's sampling distribution."""

    condition: str
    kind: str
    n: int
    mean: float
    sd: float | None  # absent (not zero) when only one replication ran
    p5: float
    p95: float
    bias: float
    rmse: float
    population_value: float
    redraw_count: int = 0

    def row(self) -> tuple:
        sd = "" if self.sd is None else self.sd
        return (self.condition, self.kind, self.n, self.mean, sd, self.p5,
                self.p95, self.bias, self.rmse, self.redraw_count)


def _draw_block(population: PopulationSpec, n: int, cell_stream: RngStream,
                rep_indices: range):
    """Draw one block of replications, redrawing degenerate samples.

    Returns (x, y, redraws); each replication owns stream path
    (cell..., rep) and consumes further draws from the same generator
    on redraw, so results do not depend on block boundaries.
    """
    rho = population.latent_rho
    b = len(rep_indices)
    x = np.empty((b, n))
    y = np.empty((b, n))
    redraws = 0
    for row, rep in enumerate(rep_indices):
        rng = cell_stream.child(rep).generator()
        for attempt in range(REDRAW_CAP_PER_SAMPLE + 1):
            z1, z2 = _latent_pair(rho, n, rng)
            xv = _transform(population.marginal_x, z1)
            yv = _transform(population.marginal_y, z2)
            if xv.min() < xv.max() and yv.min() < yv.max():
                break
            redraws += 1
        else:
            raise InfeasibleError(
                f"replication {rep} at n={n} exceeded {REDRAW_CAP_PER_SAMPLE} redraws")
        x[row] = xv
        y[row] = yv
    return x, y, redraws


def _summarize(condition: str, kind: str, n: int, values: np.ndarray,
               population_value: float, redraws: int) -> SummaryStats:
    reps = values.size
    mean = float(values.mean())
    sd = float(values.std(ddof=1)) if reps > 1 else None
    p5, p95 = np.percentile(values, [5.0, 95.0])  # type-7 linear interpolation
    bias = mean - population_value
    rmse = float(np.sqrt(np.mean((values - population_value) ** 2)))
    return SummaryStats(condition=condition, kind=kind, n=n, mean=mean, sd=sd,
                        p5=float(p5), p95=float(p95), bias=bias, rmse=rmse,
                        population_value=population_value, redraw_count=redraws)


def run_cell(plan: SimulationPlan, n: int, cell_stream: RngStream) -> list[SummaryStats]:
    """All requested coefficient summaries for one sample size."""
    reps = plan.replications
    values = {kind: np.empty(reps) for kind in plan.coefficients}
    block = max(1, min(reps, _BLOCK_VALUES // n))
    total_redraws = 0
    done = 0
    while done < reps:
        take = min(block, reps - done)
        x, y, redraws = _draw_block(plan.population, n, cell_stream,
                                    range(done, done + take))
        total_redraws += redraws
        sl = slice(done, done + take)
        if "pearson" in values:
            values["pearson"][sl] = pearson_rows(x, y)
        if "spearman" in values:
            values["spearman"][sl] = spearman_rows(x, y)
        if "kendall" in values:
            values["kendall"][sl] = kendall_rows(x, y)
        done += take
    if total_redraws > MAX_REDRAW_RATE * (reps + total_redraws):
        raise InfeasibleError(
            f"more than half of all draws at n={n} were degenerate "
            f"({total_redraws} redraws for {reps} replications)")
    return [_summarize(plan.condition, kind, n, values[kind],
                       plan.population.population_value(kind), total_redraws)
            for kind in plan.coefficients]


def run_plan(plan: SimulationPlan, threads: int = 1,
             stream: RngStream | None = None) -> list[SummaryStats]:
    """Run every cell of the plan; one row per (size, coefficient).

    Cells are independent streams, so the result is identical for any
    thread count; rows come back sorted by (n, kind).  ``stream`` lets a
    caller running several conditions give each its own root path.
    """
    root = RngStream(plan.master_seed) if stream is None else stream
    cells = [(i, n) for i, n in enumerate(plan.sample_sizes)]

    def one(args):
        index, n = args
        return run_cell(plan, n, root.child(index))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            nested = list(pool.map(one, cells))
    else:
        nested = [one(c) for c in cells]
    rows = [row for cell_rows in nested for row in cell_rows]
    rows.sort(key=lambda r: (r.n, r.kind))
    return rows
