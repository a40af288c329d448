import json
import math
import os
from dataclasses import dataclass, field, fields, replace

from core.errors import ValidationError
from facility.client_cover import ALPHA_MODES, DEFAULT_ALPHA_CONSTANT, HEURISTIC

ALGOS = ("greedy", "maxcov", "baseline")
PROBLEMS = ("vacc", "psc")
GEN_KINDS = ("star", "mobility", "reduce-psc")

THREADS_ENV = "DPPC_THREADS"
DEFAULT_RHO = 0.8


@dataclass
class RunConfig:
    """
    Flat configuration of one harness command.

    Built from the command-line flags; `--config file.json` overrides any field
    (keys are the field names). `validate()` re-checks the constraints of the
    modules the command drives so that bad input fails before any work starts.
    """

    command: str = "solve-psc"
    algo: str = "greedy"
    problem: str = "vacc"
    rho: float = None
    eps: float = 1.0
    delta: float = 1e-6
    gamma: float = 2 ** -10
    k: int = None
    alpha_mode: str = HEURISTIC
    alpha_constant: float = DEFAULT_ALPHA_CONSTANT
    seed: int = 0
    trials: int = 1
    first_trial: int = 0
    zero_noise: bool = False
    input: str = None
    output: str = None
    opt_upper: int = None
    # bench grid; empty means "the single value above"
    k_grid: list = field(default_factory=list)
    eps_grid: list = field(default_factory=list)
    rho_grid: list = field(default_factory=list)
    # gen
    kind: str = None
    n: int = 10
    extra_edges: int = 0
    people: int = 200
    locations: int = 20
    clusters: int = 3
    spread: float = 0.05
    verbose: bool = False

    def validate(self):
        """
        Raises:
            ValidationError: with a message naming the offending flag.
        """
        if not self.eps > 0 or not math.isfinite(self.eps):
            raise ValidationError("--eps must be a positive number")
        if not 0 < self.delta < 1 / math.e:
            raise ValidationError("--delta must be in (0, 1/e)")
        if self.rho is not None and not 0 < self.rho < 1:
            raise ValidationError("--rho must be in (0, 1)")
        if not 0 < self.gamma < 1:
            raise ValidationError("--gamma must be in (0, 1)")
        if self.k is not None and self.k < 1:
            raise ValidationError("--k must be a positive integer")
        if self.algo not in ALGOS:
            raise ValidationError(f"--algo must be one of {', '.join(ALGOS)}")
        if self.problem not in PROBLEMS:
            raise ValidationError(f"--problem must be one of {', '.join(PROBLEMS)}")
        if self.alpha_mode not in ALPHA_MODES:
            raise ValidationError(f"--alpha-mode must be one of {', '.join(ALPHA_MODES)}")
        if not self.alpha_constant > 0:
            raise ValidationError("--alpha-constant must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError("--seed must be a 64-bit unsigned integer")
        if self.trials < 1:
            raise ValidationError("--trials must be at least 1")
        if self.first_trial < 0:
            raise ValidationError("--first-trial must be non-negative")
        if self.opt_upper is not None and self.opt_upper < 1:
            raise ValidationError("--opt-upper must be at least 1")
        if any(k < 1 for k in self.k_grid):
            raise ValidationError("--k-grid values must be positive integers")
        if any(not e > 0 for e in self.eps_grid):
            raise ValidationError("--eps-grid values must be positive")
        if any(not 0 < r < 1 for r in self.rho_grid):
            raise ValidationError("--rho-grid values must be in (0, 1)")
        if self.command in ("solve-psc", "solve-vacc", "bench") and not self.input:
            raise ValidationError(f"{self.command} needs an instance file (--in)")
        vacc = self.command == "solve-vacc" or (self.command == "bench" and self.problem == "vacc")
        if vacc and self.algo == "maxcov":
            raise ValidationError("--algo maxcov solves set systems only; use greedy or baseline for vacc instances")
        if self.command == "gen" and self.kind not in GEN_KINDS:
            raise ValidationError(f"gen needs one of {', '.join(GEN_KINDS)}")
        if self.command == "gen" and self.kind == "reduce-psc" and not self.input:
            raise ValidationError("gen reduce-psc needs a set-system file (--in)")
        return self

    def apply_overrides(self, overrides: dict):
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return replace(self, **overrides)


def load_overrides(path: str) -> dict:
    """
    Read a JSON object of RunConfig overrides.

    Raises:
        ValidationError: unreadable file, invalid JSON or not an object.
    """
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config file {path} is not valid JSON: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(data, dict):
        raise ValidationError(f"config file {path} must hold a JSON object")
    return {key.replace("-", "_"): value for key, value in data.items()}


def worker_count() -> int:
    """Size of the trial worker pool: DPPC_THREADS if set, else the CPU count."""
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValidationError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
        if value < 1:
            raise ValidationError(f"{THREADS_ENV} must be at least 1")
        return value
    return os.cpu_count() or 1
