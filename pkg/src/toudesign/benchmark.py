"""Complete-information social planner benchmark and audit tools.

The planner picks per-user storage capacities and daily dispatch to minimize
investment plus expected supply cost. For any capacities the per-outcome
dispatch problem only depends on the aggregate charge, whose optimum has a
closed form: equalize the average power of the two periods, clamped to the
available charging headroom. That reduces the planner problem to a convex
piecewise-quadratic program in the capacities alone, solved here by cyclic
coordinate descent with exact one-dimensional minimization. The marginal
value of aggregate headroom is continuous, so coordinate-wise optimality is
global optimality for this objective.

Also provided: the zero-cost closed form, ratio reports against the pricing
schemes, investment-structure validators and a brute-force grid oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .costs import (
    SocialCostBreakdown,
    SupplyCostParams,
    social_cost,
    supply_cost_period,
)
from .demand import PeriodStructure, ScenarioSet
from .errors import ConvergenceError, InputError, OrderingViolationError
from .response import ResponseProfile, StorageSpec

ORDERING_TOL = 1e-9


@dataclass(frozen=True)
class SolverSettings:
    tolerance: float = 1e-11
    max_iterations: int = 10_000
    capacity_grid_step: float | None = None

    def __post_init__(self):
        if not self.tolerance > 0:
            raise InputError("tolerance must be > 0")
        if self.max_iterations < 1:
            raise InputError("max_iterations must be >= 1")


@dataclass
class SocialPlan:
    """Planner solution: per-user capacities, per-outcome charges, cost."""

    capacities: dict[str, float]
    charges: dict[str, np.ndarray]
    social_cost: SocialCostBreakdown
    iterations: int = 0

    def to_json_dict(self) -> dict:
        return {
            "capacities": {k: float(v) for k, v in self.capacities.items()},
            "charges": {k: [float(x) for x in v] for k, v in self.charges.items()},
            "social_cost": self.social_cost.to_json_dict(),
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class RatioReport:
    sc_pt: float
    sc_pi: float
    sc_so: float
    sc_no: float
    kappa_pt: float
    kappa_pi: float
    kappa_no: float

    def to_json_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "sc_pt", "sc_pi", "sc_so", "sc_no", "kappa_pt", "kappa_pi", "kappa_no"
        )}


@dataclass
class StructureReport:
    ok: bool
    violations: list[str] = field(default_factory=list)


def _lossless_specs(thetas: Mapping[str, float]) -> dict[str, StorageSpec]:
    return {e: StorageSpec(theta=t) for e, t in thetas.items()}


def _shift_targets(scenarios: ScenarioSet, periods: PeriodStructure) -> np.ndarray:
    """Unconstrained cost-minimizing aggregate charge per outcome."""
    return (
        periods.h_offpeak * scenarios.aggregate_peak()
        - periods.h_peak * scenarios.aggregate_offpeak()
    ) / (periods.h_peak + periods.h_offpeak)


def _greedy_charges(
    capacities: np.ndarray, peak: np.ndarray, total_shift: np.ndarray
) -> np.ndarray:
    """Split each outcome's aggregate charge among users in index order.

    Any feasible split yields the same supply cost because only the sum
    enters it.
    """
    n_out, n_users = peak.shape
    charges = np.zeros((n_out, n_users))
    for w in range(n_out):
        remaining = total_shift[w]
        for i in range(n_users):
            take = min(remaining, capacities[i], peak[w, i])
            charges[w, i] = take
            remaining -= take
    return charges


def _plan_from_capacities(
    scenarios: ScenarioSet,
    thetas: Mapping[str, float],
    periods: PeriodStructure,
    supply: SupplyCostParams,
    capacities: np.ndarray,
    iterations: int,
) -> SocialPlan:
    targets = _shift_targets(scenarios, periods)
    headroom = np.minimum(capacities[None, :], scenarios.peak).sum(axis=1)
    total_shift = np.clip(targets, 0.0, headroom)
    charges = _greedy_charges(capacities, scenarios.peak, total_shift)
    specs = _lossless_specs(thetas)
    responses = {
        e: ResponseProfile(
            capacity=float(capacities[j]),
            charge=charges[:, j],
            shifted=np.zeros(scenarios.n_outcomes),
        )
        for j, e in enumerate(scenarios.entities)
    }
    breakdown = social_cost(
        scenarios, specs, responses, periods, supply, check_feasibility=False
    )
    return SocialPlan(
        capacities={e: float(capacities[j]) for j, e in enumerate(scenarios.entities)},
        charges={e: charges[:, j] for j, e in enumerate(scenarios.entities)},
        social_cost=breakdown,
        iterations=iterations,
    )


def _objective(scenarios, thetas_arr, periods, supply, capacities) -> float:
    targets = _shift_targets(scenarios, periods)
    headroom = np.minimum(capacities[None, :], scenarios.peak).sum(axis=1)
    shift = np.clip(targets, 0.0, headroom)
    per_outcome = supply_cost_period(
        scenarios.aggregate_peak() - shift, periods.h_peak, supply
    ) + supply_cost_period(
        scenarios.aggregate_offpeak() + shift, periods.h_offpeak, supply
    )
    return float(thetas_arr @ capacities + scenarios.probs @ per_outcome)


def _coordinate_minimum(
    theta_i: float,
    demand_i: np.ndarray,
    rest: np.ndarray,
    probs: np.ndarray,
    slope0: np.ndarray,
    curvature: float,
    targets: np.ndarray,
) -> float:
    """Exact minimizer of the planner objective along one capacity.

    The right derivative at t is theta_i plus the probability-weighted
    marginal supply saving of the outcomes where extra capacity still binds
    (demand above t and aggregate headroom below the shift target). It is
    non-decreasing and piecewise linear, so walk its breakpoints and solve
    the linear piece that crosses zero.
    """
    caps = np.minimum(demand_i, targets - rest)
    t = 0.0
    while True:
        active = caps > t
        g = theta_i + float(
            np.sum(probs[active] * (slope0[active] + curvature * (rest[active] + t)))
        )
        if g >= 0.0:
            return t
        step = curvature * float(probs[active].sum())
        nxt = float(caps[active].min())
        if step > 0:
            root = t - g / step
            if root <= nxt:
                return root
        t = nxt


def solve_so(
    scenarios: ScenarioSet,
    thetas: Mapping[str, float],
    periods: PeriodStructure,
    supply: SupplyCostParams,
    settings: SolverSettings | None = None,
) -> SocialPlan:
    """Minimize investment plus expected supply cost over per-user capacities.

    Cyclic exact coordinate descent on the capacity vector; the per-outcome
    aggregate charge is always the closed-form clamped optimum. Raises
    ConvergenceError carrying the best incumbent if the objective has not
    stalled within max_iterations sweeps.
    """
    settings = settings or SolverSettings()
    missing = [e for e in scenarios.entities if e not in thetas]
    if missing:
        raise InputError(f"missing storage costs for {missing}")
    thetas_arr = np.array([float(thetas[e]) for e in scenarios.entities])
    if np.any(thetas_arr <= 0):
        raise InputError("storage costs must be > 0")
    peak = scenarios.peak
    probs = scenarios.probs
    targets = _shift_targets(scenarios, periods)
    # Marginal supply saving of one extra MWh of aggregate charge at S:
    # d/dS [g_p(Ap - S) + g_o(Ao + S)] = slope0 + curvature * S.
    curvature = 2.0 * supply.alpha * (1.0 / periods.h_peak + 1.0 / periods.h_offpeak)
    slope0 = 2.0 * supply.alpha * (
        scenarios.aggregate_offpeak() / periods.h_offpeak
        - scenarios.aggregate_peak() / periods.h_peak
    )
    n_users = scenarios.n_entities
    capacities = np.zeros(n_users)
    bound = np.minimum(capacities[None, :], peak)
    obj = _objective(scenarios, thetas_arr, periods, supply, capacities)
    converged = False
    sweeps = 0
    for sweeps in range(1, settings.max_iterations + 1):
        moved = 0.0
        for i in range(n_users):
            rest = bound.sum(axis=1) - bound[:, i]
            new_c = _coordinate_minimum(
                thetas_arr[i], peak[:, i], rest, probs, slope0, curvature, targets
            )
            moved = max(moved, abs(new_c - capacities[i]))
            capacities[i] = new_c
            bound[:, i] = np.minimum(new_c, peak[:, i])
        new_obj = _objective(scenarios, thetas_arr, periods, supply, capacities)
        stalled = abs(obj - new_obj) <= settings.tolerance * max(1.0, abs(new_obj))
        obj = new_obj
        if moved == 0.0 or stalled:
            converged = True
            break
    plan = _plan_from_capacities(
        scenarios, thetas, periods, supply, capacities, sweeps
    )
    if not converged:
        raise ConvergenceError(
            f"planner did not converge within {settings.max_iterations} sweeps",
            best=plan,
        )
    return plan


def brute_force_so(
    scenarios: ScenarioSet,
    thetas: Mapping[str, float],
    periods: PeriodStructure,
    supply: SupplyCostParams,
    grid_step: float,
) -> SocialPlan:
    """Exhaustive capacity-grid oracle for tiny planner instances.

    Searches every combination of per-user capacities on a uniform grid from
    zero to the user's maximum peak demand, augmented with the user's outcome
    demand values where the objective has kinks (refining the step therefore
    never worsens the result). The closed-form clamped aggregate charge is
    used inside. Rejects instances with more than 3 users or 4 outcomes.
    """
    if grid_step <= 0:
        raise InputError("grid_step must be > 0")
    if scenarios.n_entities > 3 or scenarios.n_outcomes > 4:
        raise InputError("brute force is limited to 3 users and 4 outcomes")
    thetas_arr = np.array([float(thetas[e]) for e in scenarios.entities])
    grids = []
    for j in range(scenarios.n_entities):
        hi = float(scenarios.peak[:, j].max())
        grid = np.arange(0.0, hi + grid_step, grid_step)
        grids.append(np.unique(np.concatenate((grid, scenarios.peak[:, j], [hi]))))
    total = int(np.prod([g.size for g in grids]))
    if total > 20_000_000:
        raise InputError(f"instance too large: {total} capacity combinations")
    mesh = np.meshgrid(*grids, indexing="ij")
    combos = np.stack([m.ravel() for m in mesh], axis=1)
    targets = _shift_targets(scenarios, periods)
    cost = combos @ thetas_arr
    expected = np.zeros(len(combos))
    for w in range(scenarios.n_outcomes):
        headroom = np.minimum(combos, scenarios.peak[w][None, :]).sum(axis=1)
        shift = np.clip(targets[w], 0.0, headroom)
        per = supply_cost_period(
            scenarios.aggregate_peak()[w] - shift, periods.h_peak, supply
        ) + supply_cost_period(
            scenarios.aggregate_offpeak()[w] + shift, periods.h_offpeak, supply
        )
        expected += scenarios.probs[w] * per
    cost = cost + expected
    best = int(np.argmin(cost))
    return _plan_from_capacities(
        scenarios, thetas, periods, supply, combos[best], iterations=0
    )


def so_zero_cost(
    scenarios: ScenarioSet, periods: PeriodStructure, supply: SupplyCostParams
) -> tuple[np.ndarray, float]:
    """Closed-form planner outcome when capacity is free.

    The aggregate charge flattens average power across the two periods,
    clamped at zero if the off-peak period is already the busier one.
    Returns the per-outcome aggregate shift and the expected supply cost.
    """
    shift = np.maximum(_shift_targets(scenarios, periods), 0.0)
    per_outcome = supply_cost_period(
        scenarios.aggregate_peak() - shift, periods.h_peak, supply
    ) + supply_cost_period(
        scenarios.aggregate_offpeak() + shift, periods.h_offpeak, supply
    )
    return shift, float(scenarios.probs @ per_outcome)


def compute_ratios(
    sc_pt: float, sc_pi: float, sc_so: float, sc_no: float
) -> RatioReport:
    """Cost ratios of each scheme against the planner optimum.

    The type-based cost must dominate the individual-based cost, which must
    dominate the planner cost; a violation beyond tolerance is raised as a
    bug rather than reported.
    """
    if not sc_so > 0:
        raise InputError("planner cost must be > 0")
    tol = ORDERING_TOL * max(1.0, abs(sc_so))
    if sc_pt < sc_pi - tol or sc_pi < sc_so - tol or sc_no < sc_so - tol:
        raise OrderingViolationError(
            f"cost ordering violated: pt={sc_pt!r} pi={sc_pi!r} so={sc_so!r} no={sc_no!r}"
        )
    return RatioReport(
        sc_pt=sc_pt,
        sc_pi=sc_pi,
        sc_so=sc_so,
        sc_no=sc_no,
        kappa_pt=sc_pt / sc_so,
        kappa_pi=sc_pi / sc_so,
        kappa_no=sc_no / sc_so,
    )


def _support_atol(scenarios: ScenarioSet) -> float:
    return 1e-7 * max(1.0, float(scenarios.peak.max()))


def _prefix_violations(
    invested: dict[str, bool],
    thetas: Mapping[str, float],
    exempt: set[str],
) -> list[str]:
    investor_costs = sorted({thetas[e] for e, inv in invested.items() if inv})
    if not investor_costs:
        return []
    boundary = investor_costs[-1]
    violations = []
    for cost in sorted({thetas[e] for e in invested}):
        if cost >= boundary or cost in investor_costs:
            continue
        users = [e for e in invested if thetas[e] == cost and e not in exempt]
        if users:
            violations.append(
                f"cost level {cost} below invested level {boundary} has no investor "
                f"(users {users})"
            )
    return violations


def validate_structure_so(
    plan: SocialPlan,
    thetas: Mapping[str, float],
    scenarios: ScenarioSet,
    atol: float | None = None,
) -> StructureReport:
    """Check a planner solution against the three-class investment structure.

    Investors must hold the lowest distinct storage costs; investors below
    the boundary cost must size within their peak-demand support; users above
    the boundary cost must hold nothing. Users whose lower peak support is
    zero are exempt from the prefix requirement since extra capacity can be
    worthless to them regardless of cost.
    """
    atol = _support_atol(scenarios) if atol is None else atol
    violations = []
    invested = {}
    exempt = set()
    for e in scenarios.entities:
        c = plan.capacities[e]
        lo, hi = scenarios.peak_support(e)
        invested[e] = c > atol
        if lo <= atol:
            exempt.add(e)
        if c > hi + atol:
            violations.append(f"user {e}: capacity {c} above max peak support {hi}")
    violations.extend(_prefix_violations(invested, thetas, exempt))
    investor_costs = sorted({thetas[e] for e, inv in invested.items() if inv})
    if investor_costs:
        boundary = investor_costs[-1]
        for e in scenarios.entities:
            c = plan.capacities[e]
            lo, hi = scenarios.peak_support(e)
            if thetas[e] < boundary and e not in exempt and c < lo - atol:
                violations.append(
                    f"user {e}: non-boundary investor capacity {c} below "
                    f"min peak support {lo}"
                )
            if thetas[e] > boundary and c > atol:
                violations.append(
                    f"user {e}: cost {thetas[e]} above boundary {boundary} "
                    f"but capacity {c} > 0"
                )
    return StructureReport(ok=not violations, violations=violations)


def validate_structure_pricing(
    responses: Mapping[str, ResponseProfile],
    thetas: Mapping[str, float],
    scenarios: ScenarioSet,
    atol: float | None = None,
) -> StructureReport:
    """Check tariff-induced investments for the two-class structure.

    Same cost-prefix requirement as the planner check, but with no boundary
    class: every user at an invested cost level must size within its peak
    support (users with zero lower support exempt from the lower bound).
    """
    atol = _support_atol(scenarios) if atol is None else atol
    violations = []
    invested = {}
    exempt = set()
    for e in scenarios.entities:
        c = responses[e].capacity
        lo, hi = scenarios.peak_support(e)
        invested[e] = c > atol
        if lo <= atol:
            exempt.add(e)
        if c > hi + atol:
            violations.append(f"user {e}: capacity {c} above max peak support {hi}")
    violations.extend(_prefix_violations(invested, thetas, exempt))
    investor_costs = sorted({thetas[e] for e, inv in invested.items() if inv})
    if investor_costs:
        boundary = investor_costs[-1]
        for e in scenarios.entities:
            c = responses[e].capacity
            lo, hi = scenarios.peak_support(e)
            if thetas[e] <= boundary and e not in exempt and c < lo - atol:
                violations.append(
                    f"user {e}: invested cost level {thetas[e]} but capacity {c} "
                    f"below min peak support {lo}"
                )
    return StructureReport(ok=not violations, violations=violations)


def tightness_instance(
    n_types: int,
    d: float,
    periods: PeriodStructure,
    theta: float | None = None,
    alpha: float = 1.0,
) -> tuple[ScenarioSet, dict[str, StorageSpec], SupplyCostParams]:
    """Worst-case instance for the zero-cost performance bound.

    One single-user type per outcome carries peak demand d while all others
    are idle, off-peak demand is zero, the supply cost is purely quadratic
    and capacity is almost free. On this instance the tariff either shifts
    everything or nothing, while the planner splits the load across both
    periods.
    """
    if n_types < 1:
        raise InputError("n_types must be >= 1")
    if d <= 0:
        raise InputError("d must be > 0")
    if theta is None:
        # negligible against the supply cost yet far above the threshold-merge
        # tolerance of the price scan
        theta = 1e-7 * alpha * d
    entities = tuple(f"type{k:02d}" for k in range(n_types))
    peak = np.zeros((n_types, n_types))
    np.fill_diagonal(peak, d)
    probs = np.full(n_types, 1.0 / n_types)
    scenarios = ScenarioSet(entities, probs, peak, np.zeros_like(peak))
    specs = {e: StorageSpec(theta=theta) for e in entities}
    return scenarios, specs, SupplyCostParams(alpha=alpha, beta=0.0, gamma=0.0)
