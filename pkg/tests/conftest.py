import numpy as np
import pytest

from toudesign import PeriodStructure, ScenarioSet, StorageSpec, SupplyCostParams

HALF_DAY = PeriodStructure(frozenset(range(12)))


@pytest.fixture
def half_day():
    return HALF_DAY


@pytest.fixture
def quadratic_supply():
    return SupplyCostParams(alpha=2.0, beta=0.0, gamma=0.0)


def random_scenarios(
    rng,
    n_entities,
    n_outcomes,
    peak_range=(0.5, 8.0),
    off_range=(0.0, 4.0),
    equiprob=False,
    names=None,
):
    peak = rng.uniform(*peak_range, size=(n_outcomes, n_entities))
    offpeak = rng.uniform(*off_range, size=(n_outcomes, n_entities))
    if equiprob:
        probs = np.full(n_outcomes, 1.0 / n_outcomes)
    else:
        probs = rng.uniform(0.2, 1.0, n_outcomes)
        probs /= probs.sum()
    if names is None:
        names = tuple(f"u{i}" for i in range(n_entities))
    return ScenarioSet(tuple(names), probs, peak, offpeak)


def random_specs(rng, entities, theta_range=(0.05, 4.0), **kwargs):
    thetas = np.sort(rng.uniform(*theta_range, len(entities)))
    return {e: StorageSpec(theta=float(t), **kwargs) for e, t in zip(entities, thetas)}
