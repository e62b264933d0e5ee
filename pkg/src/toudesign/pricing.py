"""Utility-side tariff optimization by threshold search.

The social cost induced by storage best responses is piecewise constant in
the peak/off-peak price difference, jumping only where some entity's optimal
capacity jumps. The optimizer therefore collects every entity's candidate
thresholds, evaluates the social cost a hair above each one and keeps the
cheapest, which is exact for discrete demand distributions. Pricing can be
driven by per-type aggregates (the realistic information set) or by per-user
data; in the type-based scheme the reported cost always re-evaluates each
individual user's response to the chosen tariff.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .costs import SocialCostBreakdown, SupplyCostParams, social_cost, supply_cost_period
from .demand import PeriodStructure, ScenarioSet
from .errors import InputError
from .response import (
    ResponseProfile,
    StorageSpec,
    _tail_masses,
    equivalent_transform,
    respond,
    threshold_set_extended,
)

DEFAULT_EPSILON = 1e-6


@dataclass(frozen=True)
class TouPrice:
    """Peak and off-peak energy prices in $/MWh."""

    p_peak: float
    p_offpeak: float = 0.0

    def __post_init__(self):
        if not self.p_peak >= self.p_offpeak >= 0:
            raise InputError("prices must satisfy p_peak >= p_offpeak >= 0")

    @property
    def p_delta(self) -> float:
        return self.p_peak - self.p_offpeak


@dataclass
class PricingResult:
    """Outcome of a tariff search.

    responses holds each individual user's profile at the chosen tariff and
    social_cost is their re-evaluated cost; trace records every evaluated
    candidate as (p_offpeak, p_delta, total cost) in evaluation order.
    """

    best_price: TouPrice
    scheme: str
    social_cost: SocialCostBreakdown
    responses: dict[str, ResponseProfile]
    trace: list[tuple[float, float, float]]
    scan_cost: float
    n_candidates: int
    n_evaluations: int
    epsilon: float


def _entity_candidates(
    spec: StorageSpec,
    probs: np.ndarray,
    peak: np.ndarray,
    elastic_fraction: float,
    p_o: float,
) -> set[float]:
    # Capacity steps only occur above the elastic-shift cost, so tail masses
    # are taken on the post-shift residual demand ordering.
    elastic = elastic_fraction * peak
    residual = peak - elastic
    order = np.argsort(residual, kind="stable")
    values = set(
        threshold_set_extended(spec, residual[order], probs[order], p_o).values
    )
    if spec.e_shift is not None:
        values.add(float(spec.e_shift))
    values.add(0.0)
    return values


def _auto_epsilon(candidates: np.ndarray) -> float:
    if candidates.size < 2:
        return DEFAULT_EPSILON
    gap = float(np.diff(candidates).min())
    return min(DEFAULT_EPSILON, gap / 2.0)


def _scan(
    scenarios: ScenarioSet,
    specs: Mapping[str, StorageSpec],
    periods: PeriodStructure,
    supply: SupplyCostParams,
    p_o: float,
    elastic_fraction: float,
    eps: float | None,
):
    union: set[float] = set()
    for j, entity in enumerate(scenarios.entities):
        union |= _entity_candidates(
            specs[entity], scenarios.probs, scenarios.peak[:, j], elastic_fraction, p_o
        )
    candidates = np.array(sorted(union)) if union else np.array([0.0])
    if candidates.size > 1:
        # Mathematically equal thresholds of different entities can differ by
        # float noise (same tail masses summed in another order); merge them
        # so the auto-epsilon cannot collapse below representable spacing.
        keep = [float(candidates[0])]
        for value in candidates[1:]:
            if value - keep[-1] > 1e-9 * max(1.0, abs(value)):
                keep.append(float(value))
        candidates = np.array(keep)
    eps_used = _auto_epsilon(candidates) if eps is None else float(eps)
    if eps_used <= 0:
        raise InputError("epsilon must be > 0")
    best = None
    trace = []
    for cand in candidates:
        p_delta = float(cand) + eps_used
        price = TouPrice(p_o + p_delta, p_o)
        responses = {
            entity: respond(
                specs[entity],
                price,
                scenarios.probs,
                scenarios.peak[:, j],
                elastic_fraction * scenarios.peak[:, j],
            )
            for j, entity in enumerate(scenarios.entities)
        }
        sc = social_cost(
            scenarios, specs, responses, periods, supply, check_feasibility=False
        )
        trace.append((p_o, p_delta, sc.total))
        if best is None or sc.total < best[1]:
            best = (p_delta, sc.total, responses)
    return best, trace, len(candidates), eps_used


def _user_realization(
    price: TouPrice,
    user_scenarios: ScenarioSet,
    user_specs: Mapping[str, StorageSpec],
    periods: PeriodStructure,
    supply: SupplyCostParams,
    elastic_fraction: float,
):
    responses = {
        entity: respond(
            user_specs[entity],
            price,
            user_scenarios.probs,
            user_scenarios.peak[:, j],
            elastic_fraction * user_scenarios.peak[:, j],
        )
        for j, entity in enumerate(user_scenarios.entities)
    }
    sc = social_cost(
        user_scenarios, user_specs, responses, periods, supply, check_feasibility=False
    )
    return responses, sc


def user_specs_from_grouping(
    pricing_specs: Mapping[str, StorageSpec],
    user_scenarios: ScenarioSet,
    grouping: Mapping[str, str],
) -> dict[str, StorageSpec]:
    """Each user adopts the storage spec of its type."""
    specs = {}
    for entity in user_scenarios.entities:
        if entity not in grouping:
            raise InputError(f"grouping is missing user {entity!r}")
        t = grouping[entity]
        if t not in pricing_specs:
            raise InputError(f"no spec for type {t!r} of user {entity!r}")
        specs[entity] = pricing_specs[t]
    return specs


def optimize_price_difference(
    pricing_scenarios: ScenarioSet,
    pricing_specs: Mapping[str, StorageSpec],
    user_scenarios: ScenarioSet | None,
    grouping: Mapping[str, str] | None,
    periods: PeriodStructure,
    supply: SupplyCostParams,
    eps: float | None = None,
    *,
    p_offpeak: float = 0.0,
    elastic_fraction: float = 0.0,
) -> PricingResult:
    """Threshold scan for the optimal price difference at a fixed off-peak price.

    When user_scenarios and grouping are given the scan runs on the pricing
    entities (types) while the reported social cost re-evaluates individual
    users' responses at the chosen tariff; otherwise pricing entities are the
    users themselves and the result is the individual-information scheme.

    Ties between equally cheap candidates resolve to the smaller price
    difference.
    """
    best, trace, n_candidates, eps_used = _scan(
        pricing_scenarios, pricing_specs, periods, supply, p_offpeak, elastic_fraction, eps
    )
    p_delta, scan_cost, scan_responses = best
    price = TouPrice(p_offpeak + p_delta, p_offpeak)
    if user_scenarios is None:
        scheme = "pi"
        sc = social_cost(
            pricing_scenarios,
            pricing_specs,
            scan_responses,
            periods,
            supply,
            check_feasibility=False,
        )
        responses = scan_responses
    else:
        if grouping is None:
            raise InputError("a grouping is required with user scenarios")
        scheme = "pt"
        user_specs = user_specs_from_grouping(pricing_specs, user_scenarios, grouping)
        responses, sc = _user_realization(
            price, user_scenarios, user_specs, periods, supply, elastic_fraction
        )
    return PricingResult(
        best_price=price,
        scheme=scheme,
        social_cost=sc,
        responses=responses,
        trace=trace,
        scan_cost=scan_cost,
        n_candidates=n_candidates,
        n_evaluations=len(trace),
        epsilon=eps_used,
    )


def optimize_prices_extended(
    pricing_scenarios: ScenarioSet,
    pricing_specs: Mapping[str, StorageSpec],
    user_scenarios: ScenarioSet | None,
    grouping: Mapping[str, str] | None,
    periods: PeriodStructure,
    supply: SupplyCostParams,
    p_o_range: tuple[float, float],
    p_o_steps: int,
    eps: float | None = None,
    *,
    elastic_fraction: float = 0.0,
) -> PricingResult:
    """Grid search over the off-peak price with a threshold scan per grid point.

    With imperfect efficiency the off-peak price enters each entity's
    investment decision, so the tariff search is two dimensional. Ties
    resolve to the lowest (off-peak price, price difference) pair.
    """
    lo, hi = float(p_o_range[0]), float(p_o_range[1])
    if lo < 0 or hi < lo:
        raise InputError("off-peak price range must satisfy 0 <= lo <= hi")
    if p_o_steps < 1:
        raise InputError("p_o_steps must be >= 1")
    grid = np.linspace(lo, hi, int(p_o_steps))
    best = None
    trace: list[tuple[float, float, float]] = []
    n_candidates = 0
    for p_o in grid:
        (p_delta, cost, responses), scan_trace, n_cand, eps_used = _scan(
            pricing_scenarios,
            pricing_specs,
            periods,
            supply,
            float(p_o),
            elastic_fraction,
            eps,
        )
        trace.extend(scan_trace)
        if best is None or cost < best[2]:
            best = (float(p_o), p_delta, cost, responses, n_cand, eps_used)
    p_o, p_delta, scan_cost, scan_responses, n_candidates, eps_used = best
    price = TouPrice(p_o + p_delta, p_o)
    if user_scenarios is None:
        scheme = "pi"
        sc = social_cost(
            pricing_scenarios,
            pricing_specs,
            scan_responses,
            periods,
            supply,
            check_feasibility=False,
        )
        responses = scan_responses
    else:
        if grouping is None:
            raise InputError("a grouping is required with user scenarios")
        scheme = "pt"
        user_specs = user_specs_from_grouping(pricing_specs, user_scenarios, grouping)
        responses, sc = _user_realization(
            price, user_scenarios, user_specs, periods, supply, elastic_fraction
        )
    return PricingResult(
        best_price=price,
        scheme=scheme,
        social_cost=sc,
        responses=responses,
        trace=trace,
        scan_cost=scan_cost,
        n_candidates=n_candidates,
        n_evaluations=len(trace),
        epsilon=eps_used,
    )


def social_cost_curve(
    scenarios: ScenarioSet,
    specs: Mapping[str, StorageSpec],
    periods: PeriodStructure,
    supply: SupplyCostParams,
    p_deltas,
    p_offpeak: float = 0.0,
    elastic_fraction: float = 0.0,
) -> np.ndarray:
    """Vectorized total social cost over an array of price differences.

    Evaluates the same best responses as `respond` for every grid point at
    once; used for dense sweeps, ratio maps and grid cross-checks.
    """
    pds = np.asarray(p_deltas, dtype=float)
    n_grid = pds.shape[0]
    peak_load = np.repeat(scenarios.aggregate_peak()[None, :], n_grid, axis=0)
    off_load = np.repeat(scenarios.aggregate_offpeak()[None, :], n_grid, axis=0)
    investment = np.zeros(n_grid)
    degradation = np.zeros(n_grid)
    shift_cost = np.zeros(n_grid)
    probs = scenarios.probs
    for j, entity in enumerate(scenarios.entities):
        spec = specs[entity]
        peak = scenarios.peak[:, j]
        elastic = elastic_fraction * peak
        loss = spec.eta_c * spec.eta_d
        tr = equivalent_transform(spec, p_offpeak, 0.0)
        pdd = pds * loss - p_offpeak * (1.0 - loss) - spec.tau * (1.0 + loss)
        variants = {}
        for shifted_state in (False, True):
            q = elastic if shifted_state else np.zeros_like(elastic)
            dag = (peak - q) * tr.peak_scale
            order = np.argsort(dag, kind="stable")
            thresholds = tr.theta / _tail_masses(probs[order])
            steps = np.concatenate(([0.0], dag[order]))
            cap_dag = steps[np.searchsorted(thresholds, pdd, side="left")]
            charge = np.minimum(cap_dag[:, None], dag[None, :])
            variants[shifted_state] = (q, cap_dag, charge)
        if spec.e_shift is None:
            q_sel = np.zeros((n_grid, scenarios.n_outcomes))
            cap_sel, charge_sel = variants[False][1], variants[False][2]
        else:
            mask = pds > spec.e_shift
            q_sel = np.where(mask[:, None], variants[True][0][None, :], 0.0)
            cap_sel = np.where(mask, variants[True][1], variants[False][1])
            charge_sel = np.where(mask[:, None], variants[True][2], variants[False][2])
            shift_cost += spec.e_shift * (q_sel @ probs)
        peak_load -= q_sel + loss * charge_sel
        off_load += q_sel + charge_sel
        investment += spec.theta * spec.eta_c * cap_sel
        degradation += spec.tau * (1.0 + loss) * (charge_sel @ probs)
    per_outcome = supply_cost_period(
        peak_load, periods.h_peak, supply
    ) + supply_cost_period(off_load, periods.h_offpeak, supply)
    return investment + degradation + shift_cost + per_outcome @ probs


def evaluate_lambda(
    p_delta_grid,
    theta_bar_grid,
    scenarios: ScenarioSet,
    specs: Mapping[str, StorageSpec],
    periods: PeriodStructure,
    supply: SupplyCostParams,
    p_offpeak: float = 0.0,
) -> np.ndarray:
    """Social cost relative to the no-storage cost over a price/cost grid.

    Entry [i, j] is the cost ratio at price difference p_delta_grid[i] with
    every entity's storage costs rescaled so their mean is theta_bar_grid[j].
    The no-storage denominator is computed once.
    """
    pds = np.asarray(p_delta_grid, dtype=float)
    tbs = np.asarray(theta_bar_grid, dtype=float)
    if pds.size == 0 or tbs.size == 0:
        raise InputError("grids must be non-empty")
    if np.any(tbs <= 0):
        raise InputError("mean storage costs must be > 0")
    base_mean = float(np.mean([specs[e].theta for e in scenarios.entities]))
    out = np.empty((pds.size, tbs.size))
    denom = None
    for jj, tb in enumerate(tbs):
        scale = tb / base_mean
        scaled = {
            e: replace(
                specs[e],
                theta=specs[e].theta * scale,
                e_shift=None if specs[e].e_shift is None else specs[e].e_shift * scale,
            )
            for e in scenarios.entities
        }
        # Evaluating the no-shift point through the same vectorized call keeps
        # the denominator bit-identical to the zero-response numerator.
        totals = social_cost_curve(
            scenarios, scaled, periods, supply, np.concatenate(([0.0], pds)), p_offpeak
        )
        if denom is None:
            denom = float(totals[0])
            if denom <= 0:
                raise InputError("no-storage cost is zero; lambda is undefined")
        out[:, jj] = totals[1:]
    return out / denom
