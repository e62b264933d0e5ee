"""Experiment configuration: one YAML file, everything explicit.

Every field has a default and the full resolved configuration is written
into the run artifact so no value stays implicit. Storage costs for K types
spread around a mean cost theta_bar by the diversity coefficient delta_s;
with four types the levels are theta_bar * (1 -+ 1.5 delta_s, 1 -+ 0.5
delta_s).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from typing import Any, Mapping

import numpy as np
import yaml

from .costs import AnnuityParams, SupplyCostParams, daily_cost_factor
from .demand import (
    HourlyLoadTable,
    PeriodStructure,
    ScenarioSet,
    generate_synthetic,
    ingest_hourly_loads,
    reduce_scenarios,
)
from .errors import InputError
from .response import StorageSpec

# Default peak window 18:00 through the midnight hour (7 hours).
DEFAULT_PEAK_HOURS = (18, 19, 20, 21, 22, 23, 0)


def _build(cls, data: Mapping[str, Any] | None, where: str):
    data = dict(data or {})
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise InputError(f"unknown {where} keys: {unknown}")
    return cls(**data)


@dataclass(frozen=True)
class DataCfg:
    loads_csv: str | None = None
    units: str = "mwh"
    solar_scale: float = 1.0
    reduce_to: int | None = None


@dataclass(frozen=True)
class SyntheticCfg:
    n_types: int = 4
    users_per_type: int = 4
    n_outcomes: int = 7
    peak_range_mwh: float = 10.0


@dataclass(frozen=True)
class SupplyCfg:
    alpha: float = 2.0
    beta: float = 0.0
    gamma: float = 0.0


@dataclass(frozen=True)
class AnnuityCfg:
    rate: float = 0.05
    years: float = 10.0
    days_per_year: float = 365.0


@dataclass(frozen=True)
class StorageCfg:
    theta_bar: float | None = 10.0
    capital_cost_per_mwh: float | None = None
    delta_s: float = 1.0 / 3.0
    n_types: int = 4
    eta_c: float = 1.0
    eta_d: float = 1.0
    tau: float = 0.0
    elastic_cost: float | None = None
    elastic_fraction: float = 0.0


@dataclass(frozen=True)
class PricingCfg:
    p_offpeak: float = 0.0
    epsilon: float | None = None
    mode: str = "auto"  # auto | plain | extended
    p_o_range: tuple[float, float] | None = None
    p_o_steps: int = 1


@dataclass(frozen=True)
class GroupingCfg:
    mode: str = "fixed"  # fixed | random
    seeds: tuple[int, ...] = (0,)


@dataclass(frozen=True)
class SweepsCfg:
    theta_bar: tuple[float, ...] = ()
    delta_s: tuple[float, ...] = ()
    delta_d: tuple[float, ...] = ()
    p_delta: tuple[float, ...] = ()
    tau: tuple[float, ...] = ()
    eta: tuple[float, ...] = ()
    elastic_fraction: tuple[float, ...] = ()


@dataclass(frozen=True)
class SolverCfg:
    tolerance: float = 1e-11
    max_iterations: int = 10_000


@dataclass(frozen=True)
class ExperimentConfig:
    data: DataCfg = field(default_factory=DataCfg)
    synthetic: SyntheticCfg = field(default_factory=SyntheticCfg)
    peak_hours: tuple[int, ...] = DEFAULT_PEAK_HOURS
    supply: SupplyCfg = field(default_factory=SupplyCfg)
    annuity: AnnuityCfg = field(default_factory=AnnuityCfg)
    storage: StorageCfg = field(default_factory=StorageCfg)
    pricing: PricingCfg = field(default_factory=PricingCfg)
    grouping: GroupingCfg = field(default_factory=GroupingCfg)
    sweeps: SweepsCfg = field(default_factory=SweepsCfg)
    solver: SolverCfg = field(default_factory=SolverCfg)
    seed: int = 0

    def __post_init__(self):
        if self.data.units not in ("mwh", "kwh"):
            raise InputError("data.units must be 'mwh' or 'kwh'")
        if not 0 <= self.storage.delta_s < 2.0 / 3.0:
            raise InputError("storage.delta_s must lie in [0, 2/3)")
        if self.pricing.mode not in ("auto", "plain", "extended"):
            raise InputError("pricing.mode must be auto, plain or extended")
        if self.grouping.mode not in ("fixed", "random"):
            raise InputError("grouping.mode must be fixed or random")
        if not self.grouping.seeds:
            raise InputError("grouping.seeds must be non-empty")
        if self.theta_bar_value() <= 0:
            raise InputError("mean storage cost must be > 0")
        stray = [t for t in self.type_thetas() if t <= 0]
        if stray:
            raise InputError(f"storage-cost spread produces non-positive costs {stray}")

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "ExperimentConfig":
        raw = dict(raw or {})
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise InputError(f"unknown config keys: {unknown}")
        kwargs: dict[str, Any] = {}
        for name, sub in (
            ("data", DataCfg),
            ("synthetic", SyntheticCfg),
            ("supply", SupplyCfg),
            ("annuity", AnnuityCfg),
            ("storage", StorageCfg),
            ("pricing", PricingCfg),
            ("grouping", GroupingCfg),
            ("sweeps", SweepsCfg),
            ("solver", SolverCfg),
        ):
            if name in raw:
                kwargs[name] = _build(sub, raw[name], name)
        if "peak_hours" in raw:
            kwargs["peak_hours"] = tuple(int(h) for h in raw["peak_hours"])
        if "seed" in raw:
            kwargs["seed"] = int(raw["seed"])
        return cls(**kwargs)

    @classmethod
    def from_yaml(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            raw = yaml.safe_load(fh) or {}
        if not isinstance(raw, Mapping):
            raise InputError("config file must contain a mapping")
        return cls.from_dict(raw)

    def snapshot(self) -> dict:
        """Fully resolved configuration, defaults included."""
        return asdict(self)

    def periods(self) -> PeriodStructure:
        return PeriodStructure(frozenset(self.peak_hours))

    def supply_params(self) -> SupplyCostParams:
        return SupplyCostParams(self.supply.alpha, self.supply.beta, self.supply.gamma)

    def annuity_params(self) -> AnnuityParams:
        return AnnuityParams(
            self.annuity.rate, self.annuity.years, self.annuity.days_per_year
        )

    def theta_bar_value(self) -> float:
        if self.storage.theta_bar is not None:
            return float(self.storage.theta_bar)
        if self.storage.capital_cost_per_mwh is None:
            raise InputError("either theta_bar or capital_cost_per_mwh is required")
        return daily_cost_factor(self.annuity_params()) * self.storage.capital_cost_per_mwh

    def type_thetas(
        self, theta_bar: float | None = None, delta_s: float | None = None
    ) -> list[float]:
        k = self.storage.n_types
        tb = self.theta_bar_value() if theta_bar is None else float(theta_bar)
        ds = self.storage.delta_s if delta_s is None else float(delta_s)
        centre = (k + 1) / 2.0
        return [tb * (1.0 + (i - centre) * ds) for i in range(1, k + 1)]

    def build_specs(
        self,
        type_ids,
        theta_bar: float | None = None,
        delta_s: float | None = None,
        eta: float | None = None,
        tau: float | None = None,
        elastic_cost: float | None | str = "config",
    ) -> dict[str, StorageSpec]:
        """Storage specs for the given type ids, cheapest type first."""
        thetas = self.type_thetas(theta_bar, delta_s)
        if len(type_ids) != len(thetas):
            raise InputError(
                f"{len(type_ids)} type ids but {len(thetas)} cost levels configured"
            )
        eta_c = self.storage.eta_c if eta is None else float(eta)
        eta_d = self.storage.eta_d if eta is None else float(eta)
        tau = self.storage.tau if tau is None else float(tau)
        e_shift = self.storage.elastic_cost if elastic_cost == "config" else elastic_cost
        return {
            t: StorageSpec(theta=theta, eta_c=eta_c, eta_d=eta_d, tau=tau, e_shift=e_shift)
            for t, theta in zip(type_ids, sorted(thetas))
        }

    def load_user_scenarios(self, seed: int | None = None) -> ScenarioSet:
        if self.data.loads_csv:
            table = HourlyLoadTable.from_csv(
                self.data.loads_csv, units=self.data.units, solar_scale=self.data.solar_scale
            )
            scenarios = ingest_hourly_loads(table, self.periods())
        else:
            scenarios = generate_synthetic(
                self.synthetic.n_types,
                self.synthetic.users_per_type,
                self.synthetic.n_outcomes,
                self.synthetic.peak_range_mwh,
                self.seed if seed is None else seed,
            )
        if self.data.reduce_to is not None:
            scenarios = reduce_scenarios(scenarios, self.data.reduce_to)
        return scenarios

    def type_ids(self) -> list[str]:
        return [f"type{k:02d}" for k in range(self.storage.n_types)]

    def groupings(self, entities) -> list[dict[str, str]]:
        """User-to-type groupings: one fixed block partition, or one random
        equal-size partition per grouping seed."""
        entities = list(entities)
        k = self.storage.n_types
        if len(entities) < k:
            raise InputError(f"{len(entities)} users cannot fill {k} types")
        ids = self.type_ids()
        if self.grouping.mode == "fixed":
            orders = [np.arange(len(entities))]
        else:
            orders = [
                np.random.default_rng(s).permutation(len(entities))
                for s in self.grouping.seeds
            ]
        out = []
        for order in orders:
            sizes = np.full(k, len(entities) // k)
            sizes[: len(entities) % k] += 1
            grouping = {}
            pos = 0
            for t, size in zip(ids, sizes):
                for idx in order[pos : pos + size]:
                    grouping[entities[idx]] = t
                pos += size
            out.append(grouping)
        return out
