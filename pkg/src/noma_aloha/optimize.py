"""Throughput maximisation over the two transmit probabilities.

The objective ``average_throughput(s, (tau1, tau2))`` is a polynomial mixture
over the decodable count regions and can be multimodal, so the search is
derivative-free: alternating 1-D maximisations (coarse grid scan plus bracket
refinement) until the improvement drops below a tolerance.  An exhaustive
simplex grid search doubles as a validation oracle.
"""

from dataclasses import dataclass

from .model import PowerProfile, Scenario, average_throughput

__all__ = [
    "AscentConfig",
    "OptimizationResult",
    "maximize_over_tau1",
    "maximize_over_tau2",
    "coordinate_ascent",
    "grid_search_oracle",
]


@dataclass(frozen=True)
class AscentConfig:
    """Knobs for the alternating maximisation.

    epsilon: minimum throughput improvement for an update to be accepted.
    max_outer_iterations: cap on full tau2+tau1 update rounds.
    grid_step: coarse step of each inner 1-D scan.
    refine_rounds: bracket refinements around the incumbent, 10x finer each.
    initial_tau1: starting point of the reference sweep.
    dual_start: also run the sweep with the coordinate order mirrored
        (tau1 maximised first from tau2 = 0) and keep the better endpoint; a
        single fixed order can stall on the simplex boundary when its first
        1-D pass saturates the budget of the other coordinate.
    """

    epsilon: float = 1e-5
    max_outer_iterations: int = 100
    grid_step: float = 1e-3
    refine_rounds: int = 2
    initial_tau1: float = 0.0
    dual_start: bool = True

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive")
        if not 0.0 < self.grid_step < 1.0:
            raise ValueError("grid_step must lie in (0, 1)")
        if self.max_outer_iterations < 1:
            raise ValueError("max_outer_iterations must be at least 1")
        if self.refine_rounds < 0:
            raise ValueError("refine_rounds must be nonnegative")
        if not 0.0 <= self.initial_tau1 <= 1.0:
            raise ValueError("initial_tau1 must lie in [0, 1]")


@dataclass(frozen=True)
class OptimizationResult:
    """Optimised profile, attained throughput and convergence bookkeeping.

    ``trace`` records one (iteration, tau1, tau2, throughput) tuple per
    accepted update, starting from the initial state; its throughputs are
    nondecreasing.
    """

    tau1_star: float
    tau2_star: float
    th_star: float
    outer_iterations: int
    converged: bool
    trace: tuple[tuple[int, float, float, float], ...]


def _scan(f, lo, hi, step):
    """Maximise f on [lo, hi] sampled at lo + k*step plus the hi endpoint.

    Ties keep the first (smallest) argument, so results are deterministic.
    """
    best_x, best_f = lo, f(lo)
    k = 1
    while (x := lo + k * step) < hi:
        fx = f(x)
        if fx > best_f:
            best_x, best_f = x, fx
        k += 1
    if hi > lo:
        fx = f(hi)
        if fx > best_f:
            best_x, best_f = hi, fx
    return best_x, best_f


def _maximize_1d(f, hi, cfg: AscentConfig):
    x, fx = _scan(f, 0.0, hi, cfg.grid_step)
    width = cfg.grid_step
    for _ in range(cfg.refine_rounds):
        lo_r = max(0.0, x - width)
        hi_r = min(hi, x + width)
        width /= 10.0
        x2, f2 = _scan(f, lo_r, hi_r, width)
        if f2 > fx:
            x, fx = x2, f2
    return x, fx


def maximize_over_tau2(s: Scenario, tau1: float, cfg: AscentConfig | None = None):
    """Best tau2 in [0, 1 - tau1] for fixed tau1, with the attained throughput."""
    cfg = cfg or AscentConfig()
    if not 0.0 <= tau1 <= 1.0:
        raise ValueError("tau1 must lie in [0, 1]")
    return _maximize_1d(
        lambda t2: average_throughput(s, PowerProfile(tau1, t2)), 1.0 - tau1, cfg
    )


def maximize_over_tau1(s: Scenario, tau2: float, cfg: AscentConfig | None = None):
    """Best tau1 in [0, 1 - tau2] for fixed tau2, with the attained throughput."""
    cfg = cfg or AscentConfig()
    if not 0.0 <= tau2 <= 1.0:
        raise ValueError("tau2 must lie in [0, 1]")
    return _maximize_1d(
        lambda t1: average_throughput(s, PowerProfile(t1, tau2)), 1.0 - tau2, cfg
    )


def _alternating_sweep(s: Scenario, cfg: AscentConfig, low_first: bool) -> OptimizationResult:
    """One alternating maximisation run.

    ``low_first`` maximises tau2 first from tau1 = cfg.initial_tau1 (the
    reference order); otherwise tau1 is maximised first from tau2 = 0.  An
    update is accepted only when it improves the incumbent throughput by more
    than epsilon; the first rejected update stops the run (converged).
    """
    tau1 = cfg.initial_tau1 if low_first else 0.0
    tau2 = 0.0
    best = 0.0
    trace = [(0, tau1, tau2, best)]
    converged = False
    outer = 0
    order = ("tau2", "tau1") if low_first else ("tau1", "tau2")
    while outer < cfg.max_outer_iterations and not converged:
        outer += 1
        for which in order:
            if which == "tau2":
                cand, th = maximize_over_tau2(s, tau1, cfg)
            else:
                cand, th = maximize_over_tau1(s, tau2, cfg)
            if th - best > cfg.epsilon:
                if which == "tau2":
                    tau2 = cand
                else:
                    tau1 = cand
                best = th
                trace.append((outer, tau1, tau2, best))
            else:
                converged = True
                break
    return OptimizationResult(tau1, tau2, best, outer, converged, tuple(trace))


def coordinate_ascent(s: Scenario, cfg: AscentConfig | None = None) -> OptimizationResult:
    """Alternating 1-D throughput maximisation over (tau1, tau2).

    Runs the reference sweep (tau2 first, tau1 starting at
    ``cfg.initial_tau1``) and, when ``cfg.dual_start`` is set, the mirrored
    sweep as well, returning the endpoint with the higher throughput (the
    reference sweep wins ties).
    """
    cfg = cfg or AscentConfig()
    result = _alternating_sweep(s, cfg, low_first=True)
    if cfg.dual_start:
        mirrored = _alternating_sweep(s, cfg, low_first=False)
        if mirrored.th_star > result.th_star:
            result = mirrored
    return result


def grid_search_oracle(s: Scenario, step: float) -> OptimizationResult:
    """Exhaustive throughput maximisation on the (tau1, tau2) simplex grid.

    Evaluates every (i*step, j*step) with sum at most 1 and returns the
    argmax; ties resolve to the lexicographically smallest point.  The scan
    order is fixed, so parallel and serial evaluation would reduce to the
    same result bit for bit.
    """
    if not 0.0 < step <= 0.1:
        raise ValueError("step must lie in (0, 0.1]")
    best_th = -1.0
    best = (0.0, 0.0)
    i = 0
    while (tau1 := i * step) <= 1.0:
        j = 0
        while tau1 + (tau2 := j * step) <= 1.0:
            th = average_throughput(s, PowerProfile(tau1, tau2))
            if th > best_th:
                best_th, best = th, (tau1, tau2)
            j += 1
        i += 1
    tau1, tau2 = best
    return OptimizationResult(
        tau1, tau2, best_th, 0, True, ((0, tau1, tau2, best_th),)
    )
