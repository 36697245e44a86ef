"""Command-line experiment harness.

Subcommands: params, simulate-reduced, simulate-full, sweep-t2, sweep-t1,
convergence, verify, sample, microsim.  Flags override values from an
optional JSON config file (--config).  Exit codes: 0 success, 1 check
failure, 2 invalid configuration or parameter regime.  Output is plain
text; table commands write CSV/JSON via --out and render a companion PNG
next to it unless --no-fig is given.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import figures
from ._version import __version__
from .combinatorics import (
    KDistinctnessInstance,
    ProblemParams,
    canonical_instance,
    make_instance,
)
from .fullwalk import (
    build_walk_space,
    dump_state,
    query_accounting,
    run_full_algorithm,
    sample_success_count,
)
from .microsim import TwoRegisterSim
from .reduced import (
    MODE_CLOSED,
    MODE_EXACT,
    asymptotic_success,
    compute_spectral_data,
    gap_constant,
    principal_phase,
    probability_series,
    step_parameters,
    success_probability,
)
from .reports import ExperimentConfig, RunReport, write_csv, write_json
from .sweeps import convergence_ladder, sweep_t1, sweep_t2
from .verify import run_checks

DEFAULT_LADDER = (1_000, 10_000, 100_000, 1_000_000)


def _int_list(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(tok) for tok in text.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kdwalk",
        description="staggered-walk simulation and parameter verification "
        "for element k-distinctness",
    )
    parser.add_argument("--version", action="version", version=f"kdwalk {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, needs_n: bool = True) -> None:
        p.add_argument("--config", help="JSON config file; flags override it")
        if needs_n:
            p.add_argument("--n", type=int, help="list length")
            p.add_argument("--k", type=int, help="collision multiplicity")
            p.add_argument("--r", type=int, help="subset size override")
            p.add_argument("--m", type=int, help="value bound (two-register runs)")
        p.add_argument("--t1", type=int, help="main-block repetitions override")
        p.add_argument("--t2", type=int, help="walk steps per block override")
        p.add_argument("--mode", choices=[MODE_CLOSED, MODE_EXACT])
        p.add_argument("--seed", type=int, help="RNG seed")
        p.add_argument("--samples", type=int, help="number of measurements")
        p.add_argument("--values", type=_int_list, help="list values, comma separated")
        p.add_argument("--tolerance", type=float, help="tolerance override")
        p.add_argument("--cap", type=int, help="dense state size cap")
        p.add_argument("--out", help="output file path")
        p.add_argument("--format", choices=["csv", "json"], help="output format")
        p.add_argument("--fig", help="figure path (default: alongside --out)")
        p.add_argument(
            "--no-fig", action="store_const", const=True, help="disable figure output"
        )

    p = sub.add_parser("params", help="parameter and prediction report")
    common(p)

    p = sub.add_parser("simulate-reduced", help="exact reduced-model run")
    common(p)

    p = sub.add_parser("simulate-full", help="dense full-graph run (small n)")
    common(p)
    p.add_argument("--dump-state", help="write final state as JSON")

    p = sub.add_parser("sweep-t2", help="optimize t1 for every t2 in a range")
    common(p)
    p.add_argument("--t2-min", type=int)
    p.add_argument("--t2-max", type=int)
    p.add_argument("--t1-max", type=int)

    p = sub.add_parser("sweep-t1", help="probability versus t1 at fixed t2")
    common(p)
    p.add_argument("--t1-min", type=int)
    p.add_argument("--t1-max", type=int)

    p = sub.add_parser("convergence", help="success probability along an n ladder")
    common(p)
    p.add_argument("--ladder", type=_int_list, help="n values, comma separated")

    p = sub.add_parser("verify", help="run the consistency check suite")
    common(p, needs_n=False)
    p.add_argument(
        "--skip",
        action="append",
        default=None,
        help="skip checks by name or tag (full, microsim, spectral, reduced)",
    )

    p = sub.add_parser("sample", help="seeded measurement statistics (small n)")
    common(p)

    p = sub.add_parser("microsim", help="two-register run against the dense walk")
    common(p)

    return parser


def merge_config(args: argparse.Namespace) -> ExperimentConfig:
    file_values: dict = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            file_values = json.load(fh)
        file_values.pop("command", None)
    flag_values = {
        key: val
        for key, val in vars(args).items()
        if key not in ("config", "command") and val is not None
    }
    merged = {**file_values, **flag_values, "command": args.command}
    if "skip" in merged and merged["skip"] is not None:
        merged["skip"] = tuple(merged["skip"])
    return ExperimentConfig.from_dict(merged)


def _require(config: ExperimentConfig, *names: str) -> None:
    missing = [name for name in names if getattr(config, name) is None]
    if missing:
        raise ValueError(f"{config.command} needs --" + ", --".join(missing))


def _params_from(config: ExperimentConfig) -> ProblemParams:
    _require(config, "n", "k")
    return ProblemParams(config.n, config.k, r=config.r, m=config.m)


def _instance_from(config: ExperimentConfig, params: ProblemParams) -> KDistinctnessInstance:
    if config.values is not None:
        if len(config.values) != params.n:
            raise ValueError(
                f"--values has {len(config.values)} entries, expected n={params.n}"
            )
        return make_instance(config.values, params.k)
    return canonical_instance(params.n, params.k)


def _steps_from(config: ExperimentConfig, params: ProblemParams) -> tuple[int, int]:
    t1, t2 = step_parameters(params, config.mode or MODE_CLOSED)
    if config.t1 is not None:
        t1 = config.t1
    if config.t2 is not None:
        t2 = config.t2
    return t1, t2


def _figure_target(config: ExperimentConfig) -> str | None:
    if config.no_fig:
        return None
    if config.fig:
        return config.fig
    if config.out:
        return figures.figure_path_for(config.out)
    return None


def _emit_kv(config: ExperimentConfig, rows, payload: dict) -> None:
    if not config.out:
        return
    if config.format == "json":
        write_json(config.out, payload, config)
    else:
        write_csv(config.out, ("key", "value"), rows, config)


def cmd_params(config: ExperimentConfig) -> int:
    started = time.perf_counter()
    params = _params_from(config)
    sd = compute_spectral_data(params)
    p_closed = success_probability(params, sd.t1_closed, sd.t2_closed)
    p_exact = success_probability(params, sd.t1_exact, sd.t2_exact)
    quantum, classical = query_accounting(params, sd.t1_closed, sd.t2_closed)
    report = RunReport(
        n=params.n,
        k=params.k,
        r=params.r,
        m=params.m,
        t1_closed=sd.t1_closed,
        t2_closed=sd.t2_closed,
        t1_exact=sd.t1_exact,
        t2_exact=sd.t2_exact,
        p_exact_closed=p_closed,
        p_exact_exact=p_exact,
        p_asymptotic=asymptotic_success(params),
        p_succ_predicted=sd.p_succ_predicted,
        lambda_ratio=sd.lambda_ratio,
        spectral_table=[
            (m + 1, float(sd.phis[m]), float(sd.overlaps[m + 1]))
            for m in range(params.k)
        ],
        quantum_queries=quantum,
        classical_queries=classical,
        flags={
            "regime_strict": bool(params.strict_regime),
            "lambda_ratio_ok": bool(sd.lambda_ratio < 0.2),
            "asymptotic_gate": bool(params.r >= 100),
        },
        config_hash=config.config_hash(),
        elapsed_s=time.perf_counter() - started,
    )
    for key, val in report.key_value_rows():
        print(f"{key} = {val}")
    print(f"elapsed_s = {report.elapsed_s:.4f}", file=sys.stderr)
    _emit_kv(config, report.key_value_rows(), report.as_dict())
    return 0


def cmd_simulate_reduced(config: ExperimentConfig) -> int:
    params = _params_from(config)
    t1, t2 = _steps_from(config, params)
    series = probability_series(params, t2, max(t1, 1))
    p_final = float(series[t1 - 1]) if t1 >= 1 else success_probability(params, 0, t2)
    try:
        lam, b = principal_phase(params, t2)
        profile = np.sin(lam * np.arange(1, len(series) + 1)) ** 2 / (4 * b)
    except ValueError:
        lam, profile = None, None
    print(f"n = {params.n}  k = {params.k}  r = {params.r}")
    print(f"t1 = {t1}  t2 = {t2}  p = {p_final:.12g}")
    if lam is not None:
        print(f"sinusoidal peak 1/(4b) = {1 / (4 * b):.12g} at t ~ {math.pi / (2 * lam):.2f}")
    rows = []
    for t in range(1, len(series) + 1):
        row = [t, float(series[t - 1])]
        if profile is not None:
            row.append(float(profile[t - 1]))
        rows.append(tuple(row))
    header = ("t", "p") + (("p_profile",) if profile is not None else ())
    if config.out:
        if config.format == "json":
            write_json(
                config.out,
                {"rows": [dict(zip(header, row)) for row in rows], "p_final": p_final},
                config,
            )
        else:
            write_csv(config.out, header, rows, config)
    target = _figure_target(config)
    if target:
        figures.fig_reduced_trajectory(
            [row[0] for row in rows],
            [row[1] for row in rows],
            None if profile is None else list(profile),
            t1,
            target,
        )
        print(f"figure: {target}")
    return 0


def cmd_simulate_full(config: ExperimentConfig) -> int:
    params = _params_from(config)
    instance = _instance_from(config, params)
    t1, t2 = _steps_from(config, params)
    space = build_walk_space(params, config.cap)
    result = run_full_algorithm(space, instance, t1, t2)
    p_reduced = success_probability(params, t1, t2)
    print(f"n = {params.n}  k = {params.k}  r = {params.r}  vertices = {space.n_vertices}")
    print(f"t1 = {t1}  t2 = {t2}")
    print(f"marked_probability = {result.marked_probability:.12g}")
    print(f"reduced_model_p = {p_reduced:.12g}")
    print(f"deviation = {abs(result.marked_probability - p_reduced):.3e}")
    if config.dump_state:
        dump_state(config.dump_state, space, result.state)
        print(f"state dump: {config.dump_state}")
    rows = [
        ("n", params.n),
        ("k", params.k),
        ("r", params.r),
        ("t1", t1),
        ("t2", t2),
        ("marked_probability", result.marked_probability),
        ("reduced_model_p", p_reduced),
    ]
    _emit_kv(config, rows, {key: val for key, val in rows})
    return 0


def cmd_sweep_t2(config: ExperimentConfig) -> int:
    params = _params_from(config)
    t1_c, t2_c = step_parameters(params)
    lo = config.t2_min if config.t2_min is not None else 1
    hi = config.t2_max if config.t2_max is not None else 3 * t2_c
    t1_max = config.t1_max if config.t1_max is not None else 4 * t1_c
    rows, argmax_t2 = sweep_t2(params, range(lo, hi + 1), t1_max)
    sd = compute_spectral_data(params)
    predicted = sd.t2_exact
    best = max(rows, key=lambda row: row.p_max)
    print(f"n = {params.n}  k = {params.k}  r = {params.r}")
    print(f"sweep t2 in [{lo}, {hi}], t1 in [1, {t1_max}]")
    print(f"argmax_t2 = {argmax_t2}  p_max = {best.p_max:.12g} (t1 = {best.t1_argmax})")
    print(f"predicted_t2 = {predicted}  (closed form {t2_c})")
    table = [(row.t2, row.p_max, row.t1_argmax) for row in rows]
    if config.out:
        if config.format == "json":
            write_json(
                config.out,
                {
                    "rows": [
                        {"t2": a, "p_max": b, "t1_argmax": c} for a, b, c in table
                    ],
                    "argmax_t2": argmax_t2,
                    "predicted_t2": predicted,
                },
                config,
            )
        else:
            write_csv(config.out, ("t2", "p_max", "t1_argmax"), table, config)
    target = _figure_target(config)
    if target:
        figures.fig_sweep_t2(rows, argmax_t2, predicted, target)
        print(f"figure: {target}")
    return 0


def cmd_sweep_t1(config: ExperimentConfig) -> int:
    params = _params_from(config)
    t1_c, _ = step_parameters(params)
    lo = config.t1_min if config.t1_min is not None else 1
    hi = config.t1_max if config.t1_max is not None else 2 * t1_c
    rows, argmax_t1, predicted = sweep_t1(params, config.t2, range(lo, hi + 1))
    t2 = config.t2 if config.t2 is not None else step_parameters(params, MODE_EXACT)[1]
    print(f"n = {params.n}  k = {params.k}  r = {params.r}  t2 = {t2}")
    print(f"argmax_t1 = {argmax_t1}  predicted_t1 = {predicted}")
    table = [(row.t1, row.p) for row in rows]
    if config.out:
        if config.format == "json":
            write_json(
                config.out,
                {
                    "rows": [{"t1": a, "p": b} for a, b in table],
                    "argmax_t1": argmax_t1,
                    "predicted_t1": predicted,
                },
                config,
            )
        else:
            write_csv(config.out, ("t1", "p"), table, config)
    target = _figure_target(config)
    if target:
        figures.fig_sweep_t1(rows, argmax_t1, predicted, t2, target)
        print(f"figure: {target}")
    return 0


def cmd_convergence(config: ExperimentConfig) -> int:
    _require(config, "k")
    ladder = config.ladder if config.ladder is not None else DEFAULT_LADDER
    mode = config.mode or MODE_EXACT
    rows, fitted = convergence_ladder(config.k, ladder, mode)
    constant = gap_constant(config.k)
    print(f"k = {config.k}  mode = {mode}  ladder = {list(ladder)}")
    for row in rows:
        print(
            f"n = {row.n:>9}  r = {row.r:>6}  p_exact = {row.p_exact:.6f}  "
            f"scaled_gap = {row.scaled_gap:.5f}"
        )
    print(f"fitted_constant = {fitted:.6g}  limit_constant = {constant:.6g}")
    table = [
        (row.n, row.r, row.t1, row.t2, row.p_exact, row.p_asymptotic, row.scaled_gap)
        for row in rows
    ]
    if config.out:
        header = ("n", "r", "t1", "t2", "p_exact", "p_asymptotic", "scaled_gap")
        if config.format == "json":
            write_json(
                config.out,
                {
                    "rows": [dict(zip(header, row)) for row in table],
                    "fitted_constant": fitted,
                    "limit_constant": constant,
                },
                config,
            )
        else:
            write_csv(config.out, header, table, config)
    target = _figure_target(config)
    if target and rows:
        figures.fig_convergence(rows, constant, target)
        print(f"figure: {target}")
    return 0


def cmd_verify(config: ExperimentConfig) -> int:
    results = run_checks(config.skip, config.tolerance, config.cap)
    for result in results:
        print(result.line())
    failures = [r for r in results if not r.passed]
    print(f"{len(results) - len(failures)}/{len(results)} checks passed")
    if config.out:
        payload = {
            "results": [
                {
                    "name": r.name,
                    "passed": r.passed,
                    "measured": r.measured,
                    "tolerance": r.tolerance,
                }
                for r in results
            ]
        }
        write_json(config.out, payload, config)
    if failures:
        print(
            "failed: " + ", ".join(r.name for r in failures),
            file=sys.stderr,
        )
        return 1
    return 0


def cmd_sample(config: ExperimentConfig) -> int:
    params = _params_from(config)
    instance = _instance_from(config, params)
    t1, t2 = _steps_from(config, params)
    space = build_walk_space(params, config.cap)
    result = run_full_algorithm(space, instance, t1, t2)
    exact_p = result.marked_probability
    n_samples = config.samples
    rows: list[tuple[str, object]] = [
        ("n", params.n),
        ("k", params.k),
        ("r", params.r),
        ("t1", t1),
        ("t2", t2),
        ("seed", config.seed),
        ("samples", n_samples),
        ("exact_probability", exact_p),
    ]
    if n_samples > 0:
        successes = sample_success_count(space, result.state, instance, config.seed, n_samples)
        empirical = successes / n_samples
        sigma = math.sqrt(exact_p * (1 - exact_p) / n_samples)
        rows += [
            ("successes", successes),
            ("empirical_rate", empirical),
            ("binomial_sigma", sigma),
            ("ci_low", empirical - 3 * sigma),
            ("ci_high", empirical + 3 * sigma),
            ("within_3_sigma", abs(empirical - exact_p) <= 3 * sigma),
        ]
    for key, val in rows:
        print(f"{key} = {val}")
    _emit_kv(config, rows, {key: val for key, val in rows})
    return 0


def cmd_microsim(config: ExperimentConfig) -> int:
    params = _params_from(config)
    instance = _instance_from(config, params)
    if params.m is None:
        params = ProblemParams(params.n, params.k, r=params.r, m=instance.max_value())
    t1, t2 = _steps_from(config, params)
    sim = TwoRegisterSim(params, instance, config.cap)
    micro = sim.run(t1, t2)
    full = run_full_algorithm(sim.space, instance, t1, t2)
    dev = float(np.max(np.abs(micro.marginal - np.abs(full.state) ** 2)))
    marked_p = float(np.sum(micro.marginal[sim.marked_rows]))
    print(f"n = {params.n}  k = {params.k}  r = {params.r}  m = {params.m}")
    print(f"t1 = {t1}  t2 = {t2}  joint dimension = {sim.space.n_vertices * sim.dim2}")
    print(f"marked_probability = {marked_p:.12g}")
    print(f"marginal_deviation = {dev:.3e}")
    print(f"max_off_support = {micro.max_off_support:.3e}")
    rows = [
        ("n", params.n),
        ("k", params.k),
        ("r", params.r),
        ("m", params.m),
        ("t1", t1),
        ("t2", t2),
        ("marked_probability", marked_p),
        ("marginal_deviation", dev),
        ("max_off_support", micro.max_off_support),
    ]
    _emit_kv(config, rows, {key: val for key, val in rows})
    tol = config.tolerance if config.tolerance is not None else 1e-10
    return 0 if dev <= tol and micro.max_off_support <= tol else 1


COMMANDS = {
    "params": cmd_params,
    "simulate-reduced": cmd_simulate_reduced,
    "simulate-full": cmd_simulate_full,
    "sweep-t2": cmd_sweep_t2,
    "sweep-t1": cmd_sweep_t1,
    "convergence": cmd_convergence,
    "verify": cmd_verify,
    "sample": cmd_sample,
    "microsim": cmd_microsim,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = merge_config(args)
        return COMMANDS[args.command](config)
    except (ValueError, MemoryError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
