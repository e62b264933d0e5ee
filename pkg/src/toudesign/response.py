"""Closed-form best response of a storage owner to a two-period tariff.

Given a price difference between the peak and off-peak periods, the owner
first shifts any elastic demand whose shift cost the price difference
exceeds, then sizes storage by a newsvendor rule on the (residual) peak
demand distribution, and finally charges up to the smaller of capacity and
realized peak demand each day. Imperfect charge/discharge efficiency and a
linear degradation cost are folded in through an equivalent reparametrization
so the same newsvendor rule applies.

Charges are kept in purchased (grid-side) MWh; the energy delivered to the
peak period is eta_c * eta_d times the purchase.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class StorageSpec:
    """Storage economics of one user or type.

    theta is the daily capacity cost in $/MWh/day, eta_c and eta_d the
    charge and discharge efficiencies, tau a degradation cost in $/MWh of
    energy moved. e_shift, when present, is the cost of shifting one MWh of
    elastic demand and must be below theta.
    """

    theta: float
    eta_c: float = 1.0
    eta_d: float = 1.0
    tau: float = 0.0
    e_shift: float | None = None

    def __post_init__(self):
        if not self.theta > 0:
            raise InputError("theta must be > 0")
        for name, eta in (("eta_c", self.eta_c), ("eta_d", self.eta_d)):
            if not 0 < eta <= 1:
                raise InputError(f"{name} must be in (0, 1]")
        if self.tau < 0:
            raise InputError("tau must be >= 0")
        if self.e_shift is not None:
            if self.e_shift < 0:
                raise InputError("e_shift must be >= 0")
            if not self.e_shift < self.theta:
                raise InputError("e_shift must be below theta")


@dataclass(frozen=True)
class ResponseProfile:
    """Result of one entity's storage decision under a tariff.

    capacity is the installed MWh, charge the purchased charging energy per
    outcome, shifted the moved elastic demand per outcome.
    """

    capacity: float
    charge: np.ndarray
    shifted: np.ndarray

    def __post_init__(self):
        charge = np.asarray(self.charge, dtype=float)
        shifted = np.asarray(self.shifted, dtype=float)
        if charge.shape != shifted.shape or charge.ndim != 1:
            raise InputError("charge and shifted must be 1-d arrays of equal length")
        if self.capacity < 0:
            raise InputError("capacity must be >= 0")
        charge.setflags(write=False)
        shifted.setflags(write=False)
        object.__setattr__(self, "charge", charge)
        object.__setattr__(self, "shifted", shifted)


@dataclass(frozen=True)
class ThresholdSet:
    """Sorted price differences at which an entity's optimal capacity jumps."""

    values: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not values:
            raise InputError("threshold set must not be empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise InputError("thresholds must be strictly increasing")
        object.__setattr__(self, "values", values)


class EquivalentTransform(NamedTuple):
    """Reparametrization mapping a lossy storage problem onto the lossless one.

    activation_price is the smallest price difference at which charging can
    break even at all; it plays the role of zero in the transformed problem.
    """

    p_delta: float
    theta: float
    peak_scale: float
    activation_price: float


def _tail_masses(probs: np.ndarray) -> np.ndarray:
    return np.cumsum(probs[::-1])[::-1]


def _validate_discrete(peak_outcomes, probs):
    peak_outcomes = np.asarray(peak_outcomes, dtype=float)
    probs = np.asarray(probs, dtype=float)
    if peak_outcomes.shape != probs.shape or peak_outcomes.ndim != 1 or not len(probs):
        raise InputError("outcomes and probabilities must be matching 1-d arrays")
    if np.any(np.diff(peak_outcomes) < 0):
        raise InputError("peak outcomes must be sorted ascending")
    if np.any(probs <= 0) or abs(probs.sum() - 1.0) > 1e-9:
        raise InputError("probabilities must be positive and sum to 1")
    return peak_outcomes, probs


def optimal_capacity_continuous(
    inverse_cdf: Callable[[float], float], theta: float, p_delta: float
) -> float:
    """Newsvendor capacity under a continuous peak-demand distribution.

    The optimal capacity sits at the critical fractile (p_delta - theta) /
    p_delta of peak demand; below (or at) the capacity cost theta no storage
    pays off.
    """
    if p_delta < 0:
        raise InputError("p_delta must be >= 0")
    if p_delta <= theta:
        return 0.0
    return float(inverse_cdf((p_delta - theta) / p_delta))


def optimal_capacity_discrete(
    peak_outcomes: Sequence[float],
    probs: Sequence[float],
    theta: float,
    p_delta: float,
) -> float:
    """Step-wise optimal capacity under a discrete peak-demand distribution.

    Capacity is the largest outcome value whose price threshold theta / (tail
    probability) lies strictly below p_delta; at an exact tie the lower step
    is returned, so no storage is bought at p_delta == theta.
    """
    peak_outcomes, probs = _validate_discrete(peak_outcomes, probs)
    thresholds = theta / _tail_masses(probs)
    m_hat = int(np.searchsorted(thresholds, p_delta, side="left"))
    if m_hat == 0:
        return 0.0
    return float(peak_outcomes[m_hat - 1])


def capacity_curve(
    peak_outcomes: Sequence[float],
    probs: Sequence[float],
    theta: float,
    p_deltas: np.ndarray,
) -> np.ndarray:
    """Vectorized optimal capacity over an array of price differences."""
    peak_outcomes, probs = _validate_discrete(peak_outcomes, probs)
    thresholds = theta / _tail_masses(probs)
    steps = np.concatenate(([0.0], peak_outcomes))
    idx = np.searchsorted(thresholds, np.asarray(p_deltas, dtype=float), side="left")
    return steps[idx]


def optimal_charge(capacity: float, peak_demand: float) -> float:
    """Daily charge: fill storage up to realized peak demand."""
    if capacity < 0:
        raise InputError("capacity must be >= 0")
    return min(capacity, peak_demand)


def threshold_set(
    peak_outcomes: Sequence[float], probs: Sequence[float], theta: float
) -> ThresholdSet:
    """Price differences where the step-wise capacity can jump, plus zero.

    One threshold per sorted outcome position, theta divided by the tail
    probability mass from that position up. Duplicate outcome values still
    contribute their own tail-mass threshold.
    """
    _, probs = _validate_discrete(peak_outcomes, probs)
    values = theta / _tail_masses(probs)
    uniq = sorted(set([0.0] + [float(v) for v in values]))
    return ThresholdSet(tuple(uniq))


def respond_elastic(
    spec: StorageSpec,
    peak: Sequence[float],
    elastic: Sequence[float],
    p_delta: float,
) -> tuple[np.ndarray, np.ndarray]:
    """All-or-nothing elastic shift: move everything once p_delta exceeds the
    shift cost, nothing otherwise. Returns (shifted, residual peak demand)."""
    peak = np.asarray(peak, dtype=float)
    elastic = np.asarray(elastic, dtype=float)
    if elastic.shape != peak.shape:
        raise InputError("elastic demand must cover every outcome")
    if np.any(elastic < 0) or np.any(elastic > peak + 1e-12 * max(1.0, peak.max(initial=0.0))):
        raise InputError("elastic demand must lie within [0, peak demand]")
    if spec.e_shift is not None and p_delta > spec.e_shift:
        shifted = elastic.copy()
    else:
        shifted = np.zeros_like(elastic)
    return shifted, np.maximum(peak - shifted, 0.0)


def equivalent_transform(
    spec: StorageSpec, p_o: float, p_delta: float
) -> EquivalentTransform:
    """Map the lossy/degrading storage problem onto the lossless newsvendor.

    The transformed price difference discounts for round-trip losses, the
    extra off-peak energy bought to cover them and the degradation cost per
    cycle; the transformed capacity cost and peak demand rescale by the
    charge and round-trip efficiencies.
    """
    loss = spec.eta_d * spec.eta_c
    p_delta_dag = p_delta * loss - p_o * (1.0 - loss) - spec.tau * (1.0 + loss)
    theta_dag = spec.eta_c * spec.theta
    peak_scale = 1.0 / (spec.eta_c * spec.eta_d)
    activation = (spec.tau * (1.0 + loss) + p_o * (1.0 - loss)) / loss
    return EquivalentTransform(p_delta_dag, theta_dag, peak_scale, activation)


def threshold_set_extended(
    spec: StorageSpec,
    peak_outcomes: Sequence[float],
    probs: Sequence[float],
    p_o: float,
) -> ThresholdSet:
    """Capacity-jump price differences for the lossy/degrading model.

    Thresholds of the transformed problem mapped back to grid prices: the
    activation price plus theta / eta_d over each tail mass.
    """
    _, probs = _validate_discrete(peak_outcomes, probs)
    base = equivalent_transform(spec, p_o, 0.0).activation_price
    values = spec.theta / spec.eta_d / _tail_masses(probs) + base
    uniq = sorted(set([float(base)] + [float(v) for v in values]))
    return ThresholdSet(tuple(uniq))


def respond(
    spec: StorageSpec,
    prices,
    probs: Sequence[float],
    peak: Sequence[float],
    elastic: Sequence[float] | None = None,
) -> ResponseProfile:
    """Full best response of one entity to a tariff.

    Applies the elastic shift, the equivalent transform and the discrete
    capacity rule, then the per-outcome charge rule. Charges are returned in
    purchased MWh.
    """
    probs = np.asarray(probs, dtype=float)
    peak = np.asarray(peak, dtype=float)
    if peak.shape != probs.shape:
        raise InputError("peak demand must cover every outcome")
    p_delta = prices.p_delta
    if elastic is None:
        elastic = np.zeros_like(peak)
    shifted, residual = respond_elastic(spec, peak, elastic, p_delta)
    tr = equivalent_transform(spec, prices.p_offpeak, p_delta)
    demand_dag = residual * tr.peak_scale
    order = np.argsort(demand_dag, kind="stable")
    cap_dag = optimal_capacity_discrete(
        demand_dag[order], probs[order], tr.theta, tr.p_delta
    )
    charge = np.minimum(cap_dag, demand_dag)
    return ResponseProfile(
        capacity=spec.eta_c * cap_dag, charge=charge, shifted=shifted
    )
