"""Named consistency checks tying the closed forms to the simulators.

Each check compares an independently computed quantity against the
implementation under a fixed tolerance and reports the measured residual.
The CLI's verify command runs them all and fails loudly on the first
regression; the acceptance tests reuse the same functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .combinatorics import (
    ProblemParams,
    canonical_instance,
    class_basis,
    class_size,
    vertex_count,
)
from .fullwalk import (
    build_walk_space,
    reduced_full_deviation,
    run_full_algorithm,
    tessellations_cover_edges,
)
from .microsim import TwoRegisterSim
from .reduced import (
    build_reduced_walk,
    completeness_sum,
    evolve_reduced,
    initial_reduced_state,
    marked_class_overlaps,
    numeric_eigenphase_multiset,
    numeric_marked_overlaps,
    predicted_eigenphase_multiset,
    step_parameters,
)

DIAGRAM_CASES = [(5, 2), (6, 2), (7, 2), (8, 2), (8, 3)]


def _valid_strict(n: int, k: int) -> bool:
    try:
        return ProblemParams(n, k).strict_regime
    except ValueError:
        return False


def spectral_cases() -> list[tuple[int, int]]:
    return [(n, k) for n in (8, 20, 50, 200) for k in (2, 3, 4) if _valid_strict(n, k)]


@dataclass
class CheckResult:
    name: str
    tags: tuple[str, ...]
    passed: bool
    measured: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"[{status}] {self.name:<24} measured={self.measured:.3e} "
            f"tol={self.tolerance:.1e} {self.detail}"
        )


def check_involutions(tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for n, k in [(8, 2), (20, 3), (50, 4), (200, 2)]:
        params = ProblemParams(n, k)
        walk = build_reduced_walk(params)
        eye = np.eye(2 * k + 1)
        for mat in (walk.u_alpha, walk.u_beta, walk.r_matrix):
            worst = max(worst, float(np.max(np.abs(mat @ mat - eye))))
    return CheckResult("involutions", ("reduced",), worst <= tol, worst, tol)


def check_partition_identity(tol: float = 0.0) -> CheckResult:
    worst = 0
    tested = 0
    for n in range(5, 41):
        for k in (2, 3, 4):
            try:
                params = ProblemParams(n, k)
            except ValueError:
                continue
            tested += 1
            total = sum(class_size(params, c) for c in class_basis(k))
            worst = max(worst, abs(total - vertex_count(params)))
    return CheckResult(
        "partition-identity",
        ("reduced",),
        worst <= tol,
        float(worst),
        tol,
        detail=f"({tested} parameter sets, exact integers)",
    )


def check_eigenphases(tol: float = 1e-10) -> CheckResult:
    worst = 0.0
    for n, k in spectral_cases():
        params = ProblemParams(n, k)
        dev = np.max(
            np.abs(
                numeric_eigenphase_multiset(params)
                - predicted_eigenphase_multiset(params)
            )
        )
        worst = max(worst, float(dev))
    return CheckResult("spectral-eigenphases", ("reduced", "spectral"), worst <= tol, worst, tol)


def check_overlaps(tol: float = 1e-9) -> CheckResult:
    worst = 0.0
    for n, k in spectral_cases():
        params = ProblemParams(n, k)
        dev = np.max(
            np.abs(numeric_marked_overlaps(params) - marked_class_overlaps(params))
        )
        worst = max(worst, float(dev))
    return CheckResult("spectral-overlaps", ("reduced", "spectral"), worst <= tol, worst, tol)


def check_completeness(tol: float = 1e-10) -> CheckResult:
    worst = 0.0
    for n, k in spectral_cases():
        worst = max(worst, abs(completeness_sum(ProblemParams(n, k)) - 1.0))
    return CheckResult("completeness-sum", ("reduced", "spectral"), worst <= tol, worst, tol)


def check_norm_conservation(tol: float = 1e-12) -> CheckResult:
    worst = 0.0
    for n, k in [(8, 2), (200, 3)]:
        params = ProblemParams(n, k)
        walk = build_reduced_walk(params)
        t1, t2 = step_parameters(params)
        state = evolve_reduced(walk, initial_reduced_state(params), t1, t2)
        worst = max(worst, abs(float(np.linalg.norm(state)) - 1.0))
    return CheckResult("norm-conservation", ("reduced",), worst <= tol, worst, tol)


def check_reduced_full_diagram(tol: float = 1e-10, cap: int = 10**7) -> CheckResult:
    worst = 0.0
    for n, k in DIAGRAM_CASES:
        params = ProblemParams(n, k)
        space = build_walk_space(params, cap)
        instance = canonical_instance(n, k)
        t1, t2 = step_parameters(params)
        worst = max(worst, reduced_full_deviation(space, instance, t1, t2))
    return CheckResult("reduced-full-diagram", ("full",), worst <= tol, worst, tol)


def check_tessellation_cover(tol: float = 0.0) -> CheckResult:
    ok = all(
        tessellations_cover_edges(build_walk_space(ProblemParams(n, 2)))
        for n in (5, 6, 7)
    )
    measured = 0.0 if ok else 1.0
    return CheckResult("tessellation-cover", ("full",), measured <= tol, measured, tol)


def check_microsim_marginal(tol: float = 1e-10, cap: int = 10**7) -> CheckResult:
    params = ProblemParams(5, 2, m=4)
    instance = canonical_instance(5, 2)
    sim = TwoRegisterSim(params, instance, cap)
    worst = 0.0
    for t1, t2 in [(1, 1), (1, 2)]:
        micro = sim.run(t1, t2)
        full = run_full_algorithm(sim.space, instance, t1, t2)
        dev = float(np.max(np.abs(micro.marginal - np.abs(full.state) ** 2)))
        worst = max(worst, dev, micro.max_off_support)
    return CheckResult("microsim-marginal", ("full", "microsim"), worst <= tol, worst, tol)


ALL_CHECKS = (
    ("involutions", ("reduced",), check_involutions),
    ("partition-identity", ("reduced",), check_partition_identity),
    ("spectral-eigenphases", ("reduced", "spectral"), check_eigenphases),
    ("spectral-overlaps", ("reduced", "spectral"), check_overlaps),
    ("completeness-sum", ("reduced", "spectral"), check_completeness),
    ("norm-conservation", ("reduced",), check_norm_conservation),
    ("reduced-full-diagram", ("full",), check_reduced_full_diagram),
    ("tessellation-cover", ("full",), check_tessellation_cover),
    ("microsim-marginal", ("full", "microsim"), check_microsim_marginal),
)

_CAPPED = {"reduced-full-diagram", "microsim-marginal"}


def run_checks(
    skip: tuple[str, ...] = (), tolerance: float | None = None, cap: int = 10**7
) -> list[CheckResult]:
    """Run the suite, optionally skipping by name or tag ("full" skips
    everything that needs the dense simulator)."""
    results = []
    for name, tags, fn in ALL_CHECKS:
        if any(tok == name or tok in tags for tok in skip):
            continue
        kwargs = {}
        if tolerance is not None:
            kwargs["tol"] = tolerance
        if name in _CAPPED:
            kwargs["cap"] = cap
        results.append(fn(**kwargs))
    return results
