import datetime as dt
import os

import numpy as np
import pytest

from ventalloc.instance import Horizon, PlanningInstance, Region, validate_instance
from ventalloc.scenario import CaseSpec, DemandScenario, ScenarioSet
from ventalloc.solver import SolveLimits

FIXTURES = os.path.join(os.path.dirname(__file__), os.pardir, "fixtures")

START = dt.date(2020, 3, 23)


def make_instance(Y, I, Q, gamma, tau, rho, region_ids=None, start=START):
    """Instance literal with scalar-or-vector rates, validated."""
    n = len(Y)
    ids = region_ids or [f"R{i + 1}" for i in range(n)]
    as_vec = lambda v: tuple(v) if hasattr(v, "__len__") else tuple(float(v) for _ in range(n))
    return validate_instance(PlanningInstance(
        regions=tuple(Region(i) for i in ids),
        horizon=Horizon(start, len(Q)),
        initial_region_inventory=tuple(int(y) for y in Y),
        central_initial=int(I),
        production=tuple(int(q) for q in Q),
        gamma=as_vec(gamma),
        tau=as_vec(tau),
        rho=as_vec(rho),
    ))


def make_scenario_set(region_ids, demands, probabilities=None, seed=0):
    """Scenario set from explicit (regions x periods) demand grids."""
    scenarios = []
    for d in demands:
        arr = np.asarray(d, dtype=float)
        arr.setflags(write=False)
        scenarios.append(DemandScenario(demand=arr, raw_weight=1.0,
                                        tail="right", partition_index=0))
    k = len(scenarios)
    p = tuple(probabilities) if probabilities else tuple(1.0 / k for _ in range(k))
    return ScenarioSet(
        region_ids=tuple(region_ids),
        num_periods=scenarios[0].demand.shape[1],
        scenarios=tuple(scenarios),
        probabilities=p,
        case=CaseSpec(0.5, 1.0, 1.0, scenario_count=k),
        seed=seed,
    )


@pytest.fixture
def tight_limits():
    """Gap-free limits so tiny models solve to proven optimality."""
    return SolveLimits(time_limit=120.0, relative_gap=1e-9, absolute_gap=1e-12)


@pytest.fixture
def fixture_instance_path():
    return os.path.join(FIXTURES, "instance.json")


@pytest.fixture
def fixture_forecast_path():
    return os.path.join(FIXTURES, "forecast.csv")
