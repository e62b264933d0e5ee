"""Monetary primitives: annuitized storage cost, quadratic supply cost and
the social-cost evaluator.

All costs are in dollars per day and all energies in MWh. The supply model
approximates each period by constant power, so the cost of serving load L
over H hours is H * g(L / H) with g the hourly quadratic generation cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

import numpy as np

from .demand import HourlyLoadTable, PeriodStructure, ScenarioSet
from .errors import InfeasibleResponseError, InputError

if TYPE_CHECKING:  # pragma: no cover
    from .response import ResponseProfile, StorageSpec

BREAKDOWN_TOL = 1e-9


@dataclass(frozen=True)
class AnnuityParams:
    """Annual interest rate, horizon in years and days counted per year."""

    rate: float
    years: float
    days_per_year: float = 365.0

    def __post_init__(self):
        if self.rate < 0 or not math.isfinite(self.rate):
            raise InputError("interest rate must be finite and >= 0")
        if self.years < 1 or self.days_per_year < 1:
            raise InputError("horizon must span at least one year and one day per year")


@dataclass(frozen=True)
class SupplyCostParams:
    """Hourly generation cost g(p) = alpha p^2 + beta p + gamma."""

    alpha: float
    beta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if self.alpha <= 0:
            raise InputError("alpha must be > 0")
        if self.beta < 0 or self.gamma < 0:
            raise InputError("beta and gamma must be >= 0")


@dataclass(frozen=True)
class SocialCostBreakdown:
    """Daily social cost split into its components.

    shift_cost is the inconvenience cost of moved elastic demand; it is zero
    in the plain inelastic model.
    """

    investment_cost: float
    degradation_cost: float
    shift_cost: float
    expected_supply_cost: float
    total: float

    def __post_init__(self):
        parts = (
            self.investment_cost
            + self.degradation_cost
            + self.shift_cost
            + self.expected_supply_cost
        )
        if abs(parts - self.total) > BREAKDOWN_TOL * max(1.0, abs(parts)):
            raise InputError(
                f"breakdown total {self.total} does not match sum of parts {parts}"
            )

    @classmethod
    def from_parts(
        cls,
        investment: float,
        degradation: float = 0.0,
        shift: float = 0.0,
        supply: float = 0.0,
    ) -> "SocialCostBreakdown":
        return cls(
            investment_cost=investment,
            degradation_cost=degradation,
            shift_cost=shift,
            expected_supply_cost=supply,
            total=investment + degradation + shift + supply,
        )

    def to_json_dict(self) -> dict:
        return {
            "investment_cost": self.investment_cost,
            "degradation_cost": self.degradation_cost,
            "shift_cost": self.shift_cost,
            "expected_supply_cost": self.expected_supply_cost,
            "total": self.total,
        }


def daily_cost_factor(p: AnnuityParams) -> float:
    """Factor converting a one-time capital cost into an equivalent daily cost.

    Annuitizes the capital over `years` at the given rate and spreads each
    annual payment evenly over the days of the year. At zero interest this
    is simply 1 / (years * days_per_year).
    """
    if p.rate == 0:
        return 1.0 / (p.years * p.days_per_year)
    growth = (1.0 + p.rate) ** p.years
    return p.rate * growth / (growth - 1.0) / p.days_per_year


def supply_cost_period(load, hours: float, params: SupplyCostParams):
    """Total supply cost of serving `load` MWh spread evenly over `hours`."""
    if hours < 1:
        raise InputError("a period must contain at least one hour")
    load = np.asarray(load, dtype=float)
    cost = (params.alpha / hours) * load**2 + params.beta * load + params.gamma * hours
    return float(cost) if cost.ndim == 0 else cost


def _response_arrays(
    scenarios: ScenarioSet,
    specs: Mapping[str, "StorageSpec"],
    responses: Mapping[str, "ResponseProfile"],
):
    n = scenarios.n_outcomes
    caps = np.zeros(scenarios.n_entities)
    charge = np.zeros((n, scenarios.n_entities))
    shifted = np.zeros_like(charge)
    for j, entity in enumerate(scenarios.entities):
        if entity not in specs:
            raise InputError(f"no storage spec for entity {entity!r}")
        if entity not in responses:
            raise InputError(f"no response for entity {entity!r}")
        profile = responses[entity]
        s = np.asarray(profile.charge, dtype=float)
        q = np.asarray(profile.shifted, dtype=float)
        if s.shape != (n,) or q.shape != (n,):
            raise InputError(
                f"response for entity {entity!r} must cover all {n} outcomes"
            )
        caps[j] = profile.capacity
        charge[:, j] = s
        shifted[:, j] = q
    return caps, charge, shifted


def _check_feasible(scenarios, specs, caps, charge, shifted):
    scale = max(1.0, float(scenarios.peak.max()), float(caps.max(initial=0.0)))
    tol = 1e-9 * scale
    for j, entity in enumerate(scenarios.entities):
        spec = specs[entity]
        loss = spec.eta_c * spec.eta_d
        for w in range(scenarios.n_outcomes):
            s, q, d = charge[w, j], shifted[w, j], scenarios.peak[w, j]
            if s < -tol:
                raise InfeasibleResponseError(entity, w, f"negative charge {s}")
            if q < -tol:
                raise InfeasibleResponseError(entity, w, f"negative shift {q}")
            if spec.e_shift is None and q > tol:
                raise InfeasibleResponseError(
                    entity, w, "shifted demand without an elastic-shift cost"
                )
            if q > d + tol:
                raise InfeasibleResponseError(
                    entity, w, f"shift {q} exceeds peak demand {d}"
                )
            if spec.eta_c * s > caps[j] + tol:
                raise InfeasibleResponseError(
                    entity, w, f"stored energy {spec.eta_c * s} exceeds capacity {caps[j]}"
                )
            if loss * s > d - q + tol:
                raise InfeasibleResponseError(
                    entity, w, f"discharge {loss * s} exceeds residual peak demand {d - q}"
                )


def social_cost(
    scenarios: ScenarioSet,
    specs: Mapping[str, "StorageSpec"],
    responses: Mapping[str, "ResponseProfile"],
    periods: PeriodStructure,
    supply: SupplyCostParams,
    check_feasibility: bool = True,
) -> SocialCostBreakdown:
    """Daily social cost of a set of storage responses.

    Sums the investment cost of installed capacity, the expected degradation
    cost of cycling, the expected inconvenience cost of shifted elastic
    demand and the expected supply cost of the resulting system load. The
    supply cost only depends on charges through their entity sum.
    """
    caps, charge, shifted = _response_arrays(scenarios, specs, responses)
    if check_feasibility:
        _check_feasible(scenarios, specs, caps, charge, shifted)
    thetas = np.array([specs[e].theta for e in scenarios.entities])
    losses = np.array(
        [specs[e].eta_c * specs[e].eta_d for e in scenarios.entities]
    )
    taus = np.array([specs[e].tau for e in scenarios.entities])
    shift_prices = np.array(
        [specs[e].e_shift or 0.0 for e in scenarios.entities]
    )
    peak_load = (scenarios.peak - shifted - losses * charge).sum(axis=1)
    off_load = (scenarios.offpeak + shifted + charge).sum(axis=1)
    per_outcome = supply_cost_period(
        peak_load, periods.h_peak, supply
    ) + supply_cost_period(off_load, periods.h_offpeak, supply)
    expected_supply = float(scenarios.probs @ per_outcome)
    investment = float(thetas @ caps)
    degradation = float(scenarios.probs @ (charge @ (taus * (1.0 + losses))))
    shift_cost = float(scenarios.probs @ (shifted @ shift_prices))
    return SocialCostBreakdown.from_parts(
        investment, degradation, shift_cost, expected_supply
    )


def no_storage_cost(
    scenarios: ScenarioSet, periods: PeriodStructure, supply: SupplyCostParams
) -> SocialCostBreakdown:
    """Social cost with no storage and no demand shifting at all."""
    per_outcome = supply_cost_period(
        scenarios.aggregate_peak(), periods.h_peak, supply
    ) + supply_cost_period(scenarios.aggregate_offpeak(), periods.h_offpeak, supply)
    return SocialCostBreakdown.from_parts(
        0.0, 0.0, 0.0, float(scenarios.probs @ per_outcome)
    )


def approximation_gap(
    table: HourlyLoadTable,
    periods: PeriodStructure | Sequence[Iterable[int]],
    supply: SupplyCostParams,
) -> float:
    """Relative supply-cost error of the constant-power period approximation.

    Compares the expected daily supply cost computed from the hourly load
    profile against the cost computed from period totals served at constant
    power. `periods` may be a PeriodStructure or any partition of the 24
    hours into disjoint windows (e.g. three periods).
    """
    if isinstance(periods, PeriodStructure):
        windows = [sorted(periods.peak_hours), sorted(periods.offpeak_hours)]
    else:
        windows = [sorted(int(h) for h in w) for w in periods]
        flat = [h for w in windows for h in w]
        if sorted(flat) != list(range(24)) or not all(windows):
            raise InputError("period windows must be non-empty and partition hours 0..23")
    days = table.days
    entities = table.entities
    by_key = {(r.day, r.entity): r for r in table.rows}
    hourly_total = 0.0
    period_total = 0.0
    for day in days:
        profile = np.zeros(24)
        for entity in entities:
            row = by_key.get((day, entity))
            if row is None:
                raise InputError(f"missing load row for day={day!r}, entity={entity!r}")
            profile += row.net()
        hourly_total += float(
            np.sum(supply.alpha * profile**2 + supply.beta * profile + supply.gamma)
        )
        for window in windows:
            period_total += supply_cost_period(
                float(profile[window].sum()), len(window), supply
            )
    hourly_total /= len(days)
    period_total /= len(days)
    if hourly_total == 0:
        raise InputError("hourly supply cost is zero; the gap is undefined")
    return abs(period_total - hourly_total) / hourly_total
