"""
Trial runners, parameter sweeps and the α calibration pilot.

A trial is one solver run on one NoiseSource child: trial t of seed s always
draws from NoiseSource(s).spawn(t), whether it runs alone (`solve-*`) or inside
a sweep, so any CSV row can be reproduced by re-running its command.
"""

import itertools
import logging
import math
import os
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

from core.errors import DPCoverError, InfeasibleError, RegimeError
from core.set_system import coverage_count
from cover.greedy import partial_set_cover_greedy
from cover.maxcov import partial_cover_via_maxcov
from data.csv import BENCH_HEADER, ResultCsv
from facility.client_cover import ClientCoverParams, dp_client_cover
from harness.config import DEFAULT_RHO, worker_count
from oracle.baseline import greedy_partial_cover, nonprivate_client_cover
from oracle.exact import exact_partial_cover
from oracle.generators import gen_random_set_system
from privacy.budget import PrivacyBudget, PrivacyLedger
from privacy.noise import RANDOM, ZERO_NOISE, NoiseSource

logger = logging.getLogger(__name__)

CALIBRATE_HEADER = ["schema", "seed", "trial", "n", "m", "rho", "eps", "delta", "opt", "size", "unit_bound", "ratio"]


def resolve_for_instance(config, instance):
    """
    Fill in the parameters left open on the command line: a vacc instance
    supplies its own k and rho, a set system falls back to DEFAULT_RHO.
    """
    if hasattr(instance, "n_people"):
        return replace(
            config,
            k=instance.k if config.k is None else config.k,
            rho=instance.rho.rho if config.rho is None else config.rho,
        )
    return replace(config, rho=DEFAULT_RHO if config.rho is None else config.rho)


def trial_noise(config, trial: int) -> NoiseSource:
    return NoiseSource(config.seed, ZERO_NOISE if config.zero_noise else RANDOM).spawn(trial)


def _instance_name(config) -> str:
    return os.path.basename(config.input) if config.input else ""


def _base_row(config, trial: int) -> dict:
    return {
        "command": config.command,
        "algo": config.algo,
        "instance": _instance_name(config),
        "seed": config.seed,
        "trial": trial,
        "rho": config.rho,
        "eps": config.eps,
        "delta": config.delta,
        "gamma": config.gamma,
        "k": config.k,
        "alpha_mode": config.alpha_mode,
        "alpha_constant": config.alpha_constant,
    }


def _ledger_cells(ledger) -> dict:
    if ledger is None or not len(ledger):
        return {"ledger_eps": 0.0, "ledger_delta": 0.0}
    total = ledger.total()
    return {"ledger_eps": total.epsilon, "ledger_delta": total.delta}


def run_psc_trial(system, config, trial: int) -> dict:
    """
    One Partial Set Cover run; returns a RUN_HEADER row.

    RegimeError propagates (it holds for every trial); other package errors are
    recorded in the row's status and message.
    """
    row = _base_row(config, trial)
    row.update(n=system.n, m=system.m)
    budget = PrivacyBudget(config.eps, config.delta)
    noise = trial_noise(config, trial)
    ledger = None
    started = time.perf_counter()
    try:
        if config.algo == "greedy":
            solution = partial_set_cover_greedy(system, config.rho, budget, noise)
            chosen, ledger = solution.chosen, solution.ledger
            row.update(exhausted=solution.exhausted, message="; ".join(solution.warnings))
        elif config.algo == "maxcov":
            ledger = PrivacyLedger()
            chosen = partial_cover_via_maxcov(system, config.rho, budget, noise, upper=config.opt_upper,
                                              ledger=ledger)
        else:
            chosen = greedy_partial_cover(system, config.rho)
    except RegimeError:
        raise
    except DPCoverError as exc:
        row.update(status=_status(exc), message=str(exc), wall_time=time.perf_counter() - started)
        return row
    coverage = coverage_count(system, chosen)
    row.update(
        status="ok",
        solution_size=len(chosen),
        solution=chosen,
        coverage=coverage,
        objective=coverage / system.n if system.n else 0.0,
        wall_time=time.perf_counter() - started,
        **_ledger_cells(ledger),
    )
    return row


def run_vacc_trial(instance, config, trial: int) -> dict:
    """
    One client-cover run; returns a RUN_HEADER row.

    An infeasible run keeps the best round (fewest facilities) as its
    diagnostics row with status "infeasible".
    """
    instance = instance.with_params(k=config.k, rho=config.rho)
    row = _base_row(config, trial)
    row.update(n=instance.n_people, m=instance.n_locations, k=instance.k)
    started = time.perf_counter()
    try:
        if config.algo == "baseline":
            solution = nonprivate_client_cover(instance, config.gamma)
        else:
            params = ClientCoverParams(config.gamma, PrivacyBudget(config.eps, config.delta),
                                       config.alpha_mode, config.alpha_constant)
            solution = dp_client_cover(instance, params, trial_noise(config, trial))
    except InfeasibleError as exc:
        best = exc.diagnostics
        row.update(status="infeasible", message=str(exc), wall_time=time.perf_counter() - started)
        if best is not None:
            row.update(solution_size=len(best.facilities), solution=_labels(instance, best.facilities),
                       radius=best.radius, exhausted=best.exhausted)
        if config.algo != "baseline":
            row.update(ledger_eps=2 * config.eps, ledger_delta=config.delta)
        return row
    except DPCoverError as exc:
        row.update(status=_status(exc), message=str(exc), wall_time=time.perf_counter() - started)
        return row
    row.update(
        status="ok",
        solution_size=len(solution.facilities),
        solution=_labels(instance, solution.facilities),
        objective=solution.achieved_radius,
        objective_original=instance.metric.to_original(solution.achieved_radius),
        radius=solution.radius,
        budget_multiplier=solution.budget_multiplier_used,
        rounds=len(solution.rounds),
        exhausted=any(t.exhausted for t in solution.rounds if t.radius == solution.radius),
        wall_time=time.perf_counter() - started,
        **_ledger_cells(solution.ledger),
    )
    return row


def _labels(instance, facilities):
    return [instance.location_labels[j] for j in facilities]


def _status(exc) -> str:
    if isinstance(exc, InfeasibleError):
        return "infeasible"
    if isinstance(exc, RegimeError):
        return "regime"
    return "error"


def run_trials(runner, instance, config) -> list:
    """
    Run trials first_trial .. first_trial + trials - 1 on a worker pool.

    Rows come back in trial order whatever the completion order.
    """
    trials = range(config.first_trial, config.first_trial + config.trials)
    workers = min(worker_count(), config.trials)
    if workers == 1:
        return [runner(instance, config, t) for t in trials]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: runner(instance, config, t), trials))


def _summary(values):
    if not values:
        return "", "", ""
    std = statistics.pstdev(values) if len(values) > 1 else 0.0
    return statistics.fmean(values), statistics.median(values), std


def bench_cells(config):
    """Grid cells (k, eps) for vacc sweeps or (rho, eps) for psc sweeps, row-major."""
    eps_values = config.eps_grid or [config.eps]
    if config.problem == "vacc":
        first = config.k_grid or [config.k]
        return [replace(config, k=k, eps=eps) for k, eps in itertools.product(first, eps_values)]
    first = config.rho_grid or [config.rho]
    return [replace(config, rho=rho, eps=eps) for rho, eps in itertools.product(first, eps_values)]


def _baseline(problem, instance, cell):
    """Non-private reference of a cell: (objective, size) or ('', '') with a note."""
    try:
        if problem == "vacc":
            solution = nonprivate_client_cover(instance.with_params(k=cell.k, rho=cell.rho), cell.gamma)
            return solution.achieved_radius, len(solution.facilities), ""
        chosen = greedy_partial_cover(instance, cell.rho)
        return coverage_count(instance, chosen) / instance.n, len(chosen), ""
    except DPCoverError as exc:
        return "", "", f"baseline: {exc}"


def run_bench(instance, config) -> ResultCsv:
    """
    Sweep the grid; one BENCH_HEADER row per cell.

    Each cell runs `trials` seeded trials; failed trials are counted in
    `failures` and the sweep carries on. size_ratio is the mean private solution
    size over the non-private baseline size.
    """
    config = resolve_for_instance(config, instance)
    runner = run_vacc_trial if config.problem == "vacc" else run_psc_trial
    table = ResultCsv(BENCH_HEADER)
    for cell in bench_cells(config):
        cell = replace(cell, command="bench")
        try:
            rows = run_trials(runner, instance, cell)
        except RegimeError as exc:
            logger.warning("bench cell rho=%s eps=%s k=%s: %s", cell.rho, cell.eps, cell.k, exc)
            rows = [{"status": "regime", "message": str(exc)}] * cell.trials
        ok = [r for r in rows if r.get("status") == "ok"]
        objective = _summary([float(r["objective"]) for r in ok])
        size = _summary([float(r["solution_size"]) for r in ok])
        base_objective, base_size, note = _baseline(config.problem, instance, cell)
        ratio = size[0] / base_size if ok and base_size else ""
        messages = sorted({r["message"] for r in rows if r.get("status") != "ok" and r.get("message")})
        if note:
            messages.append(note)
        ledger = _ledger_cells(None) if not ok else {"ledger_eps": ok[0]["ledger_eps"],
                                                     "ledger_delta": ok[0]["ledger_delta"]}
        table.add_row({
            "problem": config.problem,
            "instance": _instance_name(config),
            "seed": cell.seed,
            "trials": cell.trials,
            "failures": len(rows) - len(ok),
            "rho": cell.rho,
            "eps": cell.eps,
            "delta": cell.delta,
            "gamma": cell.gamma,
            "k": cell.k if config.problem == "vacc" else "",
            "alpha_mode": cell.alpha_mode,
            "alpha_constant": cell.alpha_constant,
            "objective_mean": objective[0],
            "objective_median": objective[1],
            "objective_std": objective[2],
            "size_mean": size[0],
            "size_median": size[1],
            "size_std": size[2],
            "baseline_objective": base_objective,
            "baseline_size": base_size,
            "size_ratio": ratio,
            "message": " | ".join(messages),
            **ledger,
        })
        logger.info("bench cell rho=%s eps=%s k=%s: %d/%d ok", cell.rho, cell.eps, cell.k, len(ok), len(rows))
    return table


def unit_bound(m: int, rho: float, epsilon: float, delta: float) -> float:
    """ln(m)²·ln(1/δ)/(ε(1 - ρ)): the greedy size bound per unit of OPT with B = 1."""
    return math.log(m) ** 2 * math.log(1 / delta) / (epsilon * (1 - rho))


def run_calibration(config, n: int = 60, m: int = 12, density: float = 0.2):
    """
    Pilot for the α constant B.

    On `trials` random (n, m) instances, compares the private greedy solution size
    with unit_bound · OPT (OPT from the exact oracle). The largest ratio is the
    smallest B consistent with the pilot; returns (table, max ratio, median ratio).
    """
    config = replace(config, rho=DEFAULT_RHO if config.rho is None else config.rho)
    table = ResultCsv(CALIBRATE_HEADER)
    budget = PrivacyBudget(config.eps, config.delta)
    ratios = []
    for trial in range(config.first_trial, config.first_trial + config.trials):
        system = gen_random_set_system(n, m, density, seed=config.seed + trial)
        opt = exact_partial_cover(system, config.rho).opt_value
        solution = partial_set_cover_greedy(system, config.rho, budget, trial_noise(config, trial))
        bound = unit_bound(m, config.rho, config.eps, config.delta)
        ratio = solution.k / (bound * opt)
        ratios.append(ratio)
        table.add_row({
            "seed": config.seed, "trial": trial, "n": n, "m": m, "rho": config.rho, "eps": config.eps,
            "delta": config.delta, "opt": opt, "size": solution.k, "unit_bound": bound, "ratio": ratio,
        })
    return table, max(ratios), statistics.median(ratios)
