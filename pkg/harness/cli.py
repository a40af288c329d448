"""
Command-line front end.

    python -m harness solve-psc  --algo greedy --rho 0.8 --eps 1 --in sys.txt --out run.csv
    python -m harness solve-vacc --k 2 --gamma 0.001 --eps 4 --in city.vacc
    python -m harness bench      --problem vacc --k-grid 4 8 --eps-grid 0.5 1 2 --trials 20 --in city.vacc
    python -m harness gen star   --n 10
    python -m harness demo-star  --n 10
    python -m harness calibrate  --trials 30 --eps 2

Exit status: 0 success, 1 usage or invalid input, 2 parameter regime,
3 infeasible.
"""

import argparse
import logging
import sys
from dataclasses import fields

from core.errors import DPCoverError, InfeasibleError, RegimeError
from data.csv import ResultCsv
from data.formats import dump_set_system, dump_vacc_instance, load_set_system, load_vacc_instance
from harness.bench import resolve_for_instance, run_bench, run_calibration, run_psc_trial, run_trials, run_vacc_trial
from harness.config import ALGOS, DEFAULT_RHO, GEN_KINDS, PROBLEMS, RunConfig, load_overrides
from oracle.generators import gen_psc_to_vacc, gen_star_lower_bound, gen_synthetic_mobility, lower_bound_demo

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_REGIME = 2
EXIT_INFEASIBLE = 3

DEMO_EXTRA_EDGES = 3


class HarnessArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--algo", choices=ALGOS, default=argparse.SUPPRESS)
    common.add_argument("--rho", type=float, default=argparse.SUPPRESS, help="covering requirement in (0, 1)")
    common.add_argument("--eps", type=float, default=argparse.SUPPRESS, help="privacy parameter epsilon")
    common.add_argument("--delta", type=float, default=argparse.SUPPRESS, help="privacy parameter delta")
    common.add_argument("--gamma", type=float, default=argparse.SUPPRESS, help="additive radius error")
    common.add_argument("--k", type=int, default=argparse.SUPPRESS, help="facility budget")
    common.add_argument("--alpha-mode", dest="alpha_mode", choices=("heuristic", "theoretical"),
                        default=argparse.SUPPRESS)
    common.add_argument("--alpha-constant", dest="alpha_constant", type=float, default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--trials", type=int, default=argparse.SUPPRESS)
    common.add_argument("--first-trial", dest="first_trial", type=int, default=argparse.SUPPRESS)
    common.add_argument("--zero-noise", dest="zero_noise", action="store_true", default=argparse.SUPPRESS,
                        help="deterministic run without noise (testing only, not private)")
    common.add_argument("--in", dest="input", default=argparse.SUPPRESS, help="instance file")
    common.add_argument("--out", dest="output", default=argparse.SUPPRESS, help="output file (default stdout)")
    common.add_argument("--opt-upper", dest="opt_upper", type=int, default=argparse.SUPPRESS,
                        help="largest OPT guess of the maxcov search")
    common.add_argument("--config", dest="config_file", default=None, help="JSON file overriding any option")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    parser = HarnessArgumentParser(prog="harness", description="Differentially private partial set cover")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=HarnessArgumentParser)
    commands.add_parser("solve-psc", parents=[common], help="solve a Partial Set Cover instance")
    commands.add_parser("solve-vacc", parents=[common], help="solve a MobileVaccClinic instance")
    bench = commands.add_parser("bench", parents=[common], help="parameter sweep")
    bench.add_argument("--problem", choices=PROBLEMS, default=argparse.SUPPRESS)
    bench.add_argument("--k-grid", dest="k_grid", type=int, nargs="+", default=argparse.SUPPRESS)
    bench.add_argument("--eps-grid", dest="eps_grid", type=float, nargs="+", default=argparse.SUPPRESS)
    bench.add_argument("--rho-grid", dest="rho_grid", type=float, nargs="+", default=argparse.SUPPRESS)
    gen = commands.add_parser("gen", parents=[common], help="generate an instance")
    gen.add_argument("kind", choices=GEN_KINDS)
    _add_instance_size_flags(gen)
    demo = commands.add_parser("demo-star", parents=[common], help="exact solver on the star lower bound")
    _add_instance_size_flags(demo)
    commands.add_parser("calibrate", parents=[common], help="pilot estimate of the alpha constant")
    return parser


def _add_instance_size_flags(parser):
    parser.add_argument("--n", type=int, default=argparse.SUPPRESS)
    parser.add_argument("--extra-edges", dest="extra_edges", type=int, default=argparse.SUPPRESS)
    parser.add_argument("--people", type=int, default=argparse.SUPPRESS)
    parser.add_argument("--locations", type=int, default=argparse.SUPPRESS)
    parser.add_argument("--clusters", type=int, default=argparse.SUPPRESS)
    parser.add_argument("--spread", type=float, default=argparse.SUPPRESS)


def config_from_args(args) -> RunConfig:
    values = vars(args).copy()
    config_file = values.pop("config_file", None)
    known = {f.name for f in fields(RunConfig)}
    config = RunConfig(**{key: value for key, value in values.items() if key in known})
    if config_file:
        config = config.apply_overrides(load_overrides(config_file))
    return config.validate()


def _emit(text: str, output) -> None:
    if output:
        with open(output, "w", newline="", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _run_status(rows) -> int:
    statuses = {row.get("status") for row in rows}
    if "infeasible" in statuses:
        return EXIT_INFEASIBLE
    if "error" in statuses:
        return EXIT_USAGE
    return EXIT_OK


def _write_rows(rows, config) -> int:
    table = ResultCsv()
    for row in rows:
        table.add_row(row)
        if row.get("status") != "ok":
            logger.error("trial %s: %s", row["trial"], row.get("message", ""))
        elif row.get("message"):
            logger.warning("trial %s: %s", row["trial"], row["message"])
    _emit(table.to_text(), config.output)
    return _run_status(rows)


def cmd_solve_psc(config) -> int:
    system = load_set_system(config.input)
    config = resolve_for_instance(config, system)
    return _write_rows(run_trials(run_psc_trial, system, config), config)


def cmd_solve_vacc(config) -> int:
    instance = load_vacc_instance(config.input)
    config = resolve_for_instance(config, instance)
    return _write_rows(run_trials(run_vacc_trial, instance, config), config)


def cmd_bench(config) -> int:
    if config.problem == "vacc":
        instance = load_vacc_instance(config.input)
    else:
        instance = load_set_system(config.input)
    _emit(run_bench(instance, config).to_text(), config.output)
    return EXIT_OK


def cmd_gen(config) -> int:
    rho = DEFAULT_RHO if config.rho is None else config.rho
    k = 1 if config.k is None else config.k
    if config.kind == "star":
        system = gen_star_lower_bound(config.n, config.extra_edges)
        text = dump_set_system(system, comments=[f"star lower bound n={config.n} extra_edges={config.extra_edges}"])
    elif config.kind == "mobility":
        instance = gen_synthetic_mobility(config.people, config.locations, config.clusters, config.spread,
                                          seed=config.seed, k=k, rho=rho)
        text = dump_vacc_instance(instance, comments=[
            f"synthetic mobility people={config.people} locations={config.locations} "
            f"clusters={config.clusters} spread={config.spread} seed={config.seed}"
        ])
    else:
        instance = gen_psc_to_vacc(load_set_system(config.input), rho).with_params(k=k)
        text = dump_vacc_instance(instance, comments=["reduced from a Partial Set Cover instance"])
    _emit(text, config.output)
    return EXIT_OK


def cmd_demo_star(config) -> int:
    extra = config.extra_edges or DEMO_EXTRA_EDGES
    demo = lower_bound_demo(config.n, extra)
    lines = [
        f"star instance n={demo.n}: opt={demo.base.opt_value} witness={list(demo.base.witness)}",
        f"with {demo.extra_edges} extra edges: opt={demo.neighbour.opt_value} witness={list(demo.neighbour.witness)}",
        "exact witness changes between neighbours" if demo.flipped else "exact witness unchanged",
    ]
    _emit("\n".join(lines) + "\n", config.output)
    return EXIT_OK


def cmd_calibrate(config) -> int:
    table, worst, median = run_calibration(config)
    _emit(table.to_text(), config.output)
    print(f"alpha constant estimate: max ratio {worst:.6g}, median ratio {median:.6g}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "solve-psc": cmd_solve_psc,
    "solve-vacc": cmd_solve_vacc,
    "bench": cmd_bench,
    "gen": cmd_gen,
    "demo-star": cmd_demo_star,
    "calibrate": cmd_calibrate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        config = config_from_args(args)
        return COMMANDS[config.command](config)
    except RegimeError as exc:
        logger.error("%s", exc)
        return EXIT_REGIME
    except InfeasibleError as exc:
        logger.error("%s", exc)
        return EXIT_INFEASIBLE
    except (DPCoverError, ValueError, OSError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
