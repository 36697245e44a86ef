"""Parameter sweeps and convergence ladders over the reduced model."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .combinatorics import ProblemParams
from .reduced import (
    MODE_EXACT,
    asymptotic_success,
    nearest_int,
    principal_phase,
    probability_series,
    step_parameters,
    success_probability,
)


@dataclass(frozen=True)
class SweepT2Row:
    t2: int
    p_max: float
    t1_argmax: int


def sweep_t2(
    params: ProblemParams,
    t2_values=None,
    t1_max: int | None = None,
) -> tuple[list[SweepT2Row], int]:
    """Best achievable probability per t2, optimizing t1 at every point.

    Defaults: t2 in [1, 3*t2_closed], t1 in [1, 4*t1_closed].  Returns the
    rows and the argmax t2.
    """
    t1_c, t2_c = step_parameters(params)
    if t2_values is None:
        t2_values = range(1, 3 * t2_c + 1)
    if t1_max is None:
        t1_max = 4 * t1_c
    rows = []
    for t2 in t2_values:
        series = probability_series(params, t2, t1_max)
        best = int(series.argmax())
        rows.append(SweepT2Row(t2=t2, p_max=float(series[best]), t1_argmax=best + 1))
    argmax_t2 = max(rows, key=lambda row: row.p_max).t2
    return rows, argmax_t2


@dataclass(frozen=True)
class SweepT1Row:
    t1: int
    p: float


def sweep_t1(
    params: ProblemParams, t2: int | None = None, t1_values=None
) -> tuple[list[SweepT1Row], int, int]:
    """Probability as a function of t1 at fixed t2.

    Defaults: t2 from the exact closed form, t1 in [1, 2*t1_closed] (one
    full arch of the sinusoidal profile).  Returns rows, the argmax t1,
    and the spectral prediction round(pi / (2 lam)) at this t2.
    """
    t1_c, _ = step_parameters(params)
    if t2 is None:
        _, t2 = step_parameters(params, MODE_EXACT)
    if t1_values is None:
        t1_values = range(1, 2 * t1_c + 1)
    t1_values = list(t1_values)
    t_max = max(t1_values)
    series = probability_series(params, t2, t_max)
    rows = [SweepT1Row(t1=t, p=float(series[t - 1])) for t in t1_values]
    best = max(rows, key=lambda row: row.p).t1
    lam, _ = principal_phase(params, t2)
    predicted = nearest_int(math.pi / (2 * lam))
    return rows, best, predicted


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    r: int
    t1: int
    t2: int
    p_exact: float
    p_asymptotic: float
    scaled_gap: float


def convergence_ladder(
    k: int, n_values, mode: str = MODE_EXACT
) -> tuple[list[ConvergenceRow], float]:
    """Exact success probability along an n ladder.

    scaled_gap = (1 - p_exact) * r^(1/k) should level off at
    gap_constant(k); the second return value is that gap at the largest n.
    """
    rows = []
    for n in n_values:
        params = ProblemParams(n, k)
        t1, t2 = step_parameters(params, mode)
        p = success_probability(params, t1, t2)
        rows.append(
            ConvergenceRow(
                n=n,
                r=params.r,
                t1=t1,
                t2=t2,
                p_exact=p,
                p_asymptotic=asymptotic_success(params),
                scaled_gap=(1.0 - p) * params.r ** (1.0 / k),
            )
        )
    fitted = rows[-1].scaled_gap if rows else float("nan")
    return rows, fitted


def prior_parameter_comparison(params: ProblemParams) -> dict:
    """Best probability at the historical t2 = pi sqrt(r) / (3 sqrt(k))
    versus at the optimal t2 = pi sqrt(r) / (2 sqrt(k)), t1 optimized."""
    t1_c, t2_opt = step_parameters(params)
    t2_prior = nearest_int(
        math.pi * math.sqrt(params.r) / (3 * math.sqrt(params.k))
    )
    t1_max = 4 * t1_c
    p_prior = float(probability_series(params, t2_prior, t1_max).max())
    p_opt = float(probability_series(params, t2_opt, t1_max).max())
    return {
        "t2_prior": t2_prior,
        "p_prior": p_prior,
        "t2_optimal": t2_opt,
        "p_optimal": p_opt,
        "gain": p_opt - p_prior,
    }
