"""Acceptance gate: one test per criterion, one printed line each.

Run `pytest tests/test_acceptance.py -v -s` to see the PASS/FAIL lines.
Tolerances are pinned here and nowhere else; the randomized generators
are seeded so every run checks the identical instance families.

The randomized-instance family keeps the model's derived constants
integral (usable inventories, shared fractions, safety stocks, and the
deactivation constants), because only then is an integer-flow
enumeration a valid optimum oracle for the mixed-binary program: with
fractional constants the LP optimum can sit at fractional flows.
"""

import contextlib
import datetime as dt
import os
import time

import numpy as np
import pytest

from ventalloc.instance import Horizon, load_instance
from ventalloc.model import (
    build_extensive_form, conservation_residuals, extract_plan,
    single_scenario_model,
)
from ventalloc.scenario import CaseSpec, generate_scenarios, load_forecast
from ventalloc.solver import INFEASIBLE, OPTIMAL, SolveLimits, branch_and_bound

from conftest import make_instance, make_scenario_set
from oracle import min_shortage

EXACT = SolveLimits(time_limit=300.0, relative_gap=1e-9, absolute_gap=1e-12)

conservation_checks = {"count": 0}


@contextlib.contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE {name}: FAIL")
        raise
    print(f"\nACCEPTANCE {name}: PASS")


def solve_verified(instance, model, limits=EXACT):
    """Solve and check unit conservation on every incumbent returned."""
    res = branch_and_bound(model, limits)
    if res.incumbent is not None:
        omegas = model.directory.omegas
        for w in omegas:
            plan = extract_plan(model, res.incumbent, w)
            residual = conservation_residuals(instance, plan).max()
            assert residual < 1e-6, f"conservation broken by {residual:.3e}"
            conservation_checks["count"] += 1
    return res


def draw_integral_instance(rng, max_regions=2, max_periods=3):
    """Random tiny instance whose derived model constants are integers."""
    n = int(rng.integers(1, max_regions + 1))
    T = int(rng.integers(1, max_periods + 1))
    Y, gamma, tau, rho = [], [], [], []
    for _ in range(n):
        g = float(rng.choice([0.0, 0.5, 1.0]))
        y_raw = int(rng.integers(0, 9))
        if g == 0.5 and y_raw % 2:
            y_raw += 1
        y0 = (1 - g) * y_raw
        t_choices = [0.0, 1.0] if int(y0) % 2 else [0.0, 0.5, 1.0]
        Y.append(y_raw)
        gamma.append(g)
        tau.append(float(rng.choice(t_choices)))
        rho.append(float(rng.choice([0.0, 0.0, 1.0, 2.0])))
    I = int(rng.integers(0, 6))
    Q = [int(rng.integers(0, 3)) for _ in range(T)]
    demand = [
        [[float(rng.integers(0, 11)) for _ in range(T)] for _ in range(n)]
        for _ in range(2)
    ]
    return make_instance(Y, I, Q, gamma, tau, rho), demand


def test_oracle_equivalence():
    """Branch and bound equals integer-flow enumeration, exactly (1e-6)."""
    with criterion("oracle-equivalence (>=200 instances, <60s)"):
        rng = np.random.default_rng(7777)
        started = time.perf_counter()
        compared = 0
        attempts = 0
        while compared < 200 and attempts < 2000:
            attempts += 1
            inst, demands = draw_integral_instance(rng)
            ids = inst.region_ids
            if attempts % 3 == 0:
                # a two-scenario extensive form against the weighted oracle
                ss = make_scenario_set(ids, demands, probabilities=[0.75, 0.25])
                oracles = [min_shortage(inst, d) for d in demands]
                res = solve_verified(inst, build_extensive_form(inst, ss))
                if any(o is None for o in oracles):
                    assert res.status == INFEASIBLE
                    continue
                want = 0.75 * oracles[0] + 0.25 * oracles[1]
            else:
                ss = make_scenario_set(ids, [demands[0]])
                want = min_shortage(inst, demands[0])
                res = solve_verified(inst, single_scenario_model(inst, ss, 0))
                if want is None:
                    assert res.status == INFEASIBLE
                    continue
            assert res.status == OPTIMAL
            assert abs(res.objective - want) <= 1e-6, (
                f"objective {res.objective} vs oracle {want}"
            )
            compared += 1
        elapsed = time.perf_counter() - started
        assert compared >= 200, f"only {compared} feasible comparisons"
        assert elapsed < 60.0, f"took {elapsed:.1f}s"


def test_separability():
    """Extensive-form optimum = probability-weighted per-scenario optima."""
    with criterion("separability (>=50 instances, |Omega| in 2..4)"):
        rng = np.random.default_rng(4242)
        done = 0
        attempts = 0
        while done < 50 and attempts < 600:
            attempts += 1
            k = int(rng.choice([2, 3, 4]))
            n = int(rng.integers(1, 3))
            T = int(rng.integers(1, 3))
            inst = make_instance(
                [int(rng.integers(0, 7)) for _ in range(n)],
                int(rng.integers(0, 5)),
                [int(rng.integers(0, 3)) for _ in range(T)],
                gamma=[float(rng.uniform(0, 0.8)) for _ in range(n)],
                tau=[float(rng.uniform(0, 1)) for _ in range(n)],
                rho=[float(rng.choice([0.0, 0.5, 1.0])) for _ in range(n)],
            )
            demands = [
                [[float(rng.integers(0, 7)) for _ in range(T)] for _ in range(n)]
                for _ in range(k)
            ]
            weights = rng.integers(1, 5, size=k).astype(float)
            ss = make_scenario_set(inst.region_ids, demands,
                                   probabilities=list(weights / weights.sum()))
            parts = [
                solve_verified(inst, single_scenario_model(inst, ss, w))
                for w in range(k)
            ]
            whole = solve_verified(inst, build_extensive_form(inst, ss))
            if any(p.status == INFEASIBLE for p in parts):
                assert whole.status == INFEASIBLE
                continue
            assert whole.status == OPTIMAL
            want = sum(p * r.objective for p, r in zip(ss.probabilities, parts))
            assert abs(whole.objective - want) <= 1e-6
            done += 1
        assert done >= 50, f"only {done} feasible separability checks"


def test_conservation():
    """Every incumbent satisfies the unit-conservation identity (1e-6)."""
    with criterion("conservation (all incumbents)"):
        rng = np.random.default_rng(99)
        for _ in range(25):
            inst, demands = draw_integral_instance(rng)
            ss = make_scenario_set(inst.region_ids, demands)
            solve_verified(inst, build_extensive_form(inst, ss))
        # plus everything verified by the other criteria in this session
        assert conservation_checks["count"] > 25


MONO_Y = [24, 4, 2]
MONO_Q = [0, 1, 1, 0, 0]
MONO_D1 = [[1, 2, 3, 2, 1], [0, 2, 7, 9, 3], [0, 1, 2, 6, 7]]
MONO_D2 = [[2, 3, 4, 3, 2], [1, 3, 8, 11, 4], [1, 1, 3, 7, 8]]


def _mono_objective(gamma, tau, central):
    inst = make_instance(MONO_Y, central, MONO_Q, gamma=gamma, tau=tau, rho=0.0)
    ss = make_scenario_set(["R1", "R2", "R3"], [MONO_D1, MONO_D2],
                           probabilities=[0.5, 0.5])
    value = 0.0
    for w in range(2):
        res = solve_verified(inst, single_scenario_model(inst, ss, w))
        assert res.status == OPTIMAL
        value += ss.probabilities[w] * res.objective
    return value


def test_monotonicity_grid():
    """Shortage moves the right way as tau, I, and gamma sweep."""
    with criterion("monotonicity grid (3 regions, 5 days, 2 scenarios)"):
        tau_sweep = [_mono_objective(0.6, t, 5) for t in (0.0, 0.25, 0.5)]
        assert all(a >= b - 1e-9 for a, b in zip(tau_sweep, tau_sweep[1:])), tau_sweep

        i_sweep = [_mono_objective(0.6, 0.25, i) for i in (0, 5, 10)]
        assert all(a >= b - 1e-9 for a, b in zip(i_sweep, i_sweep[1:])), i_sweep

        gamma_sweep = [_mono_objective(g, 0.25, 5) for g in (0.5, 0.6, 0.75)]
        assert all(a <= b + 1e-9 for a, b in zip(gamma_sweep, gamma_sweep[1:])), gamma_sweep

        # the fixture must exercise the pattern, not just tie everywhere
        assert tau_sweep[0] > tau_sweep[-1] + 1e-6
        assert i_sweep[0] > i_sweep[-1] + 1e-6
        assert gamma_sweep[0] < gamma_sweep[-1] - 1e-6


def test_sufficient_supply_zero():
    """Full sharing plus enough units anywhere means zero shortage (1e-9)."""
    with criterion("sufficient-supply zero (tau=1, rho=0)"):
        inst = make_instance([6, 0, 0], 2, [0, 0, 0, 0],
                             gamma=0.0, tau=1.0, rho=0.0)
        demands = [
            [[0, 0, 0, 0], [0, 5, 5, 5], [0, 3, 3, 3]],
            [[0, 2, 2, 0], [0, 0, 5, 5], [0, 0, 0, 1]],
        ]
        supply = sum(inst.usable_initial_vector()) + inst.central_initial
        for d in demands:
            need = sum(max(row) for row in d)
            assert supply >= need     # the criterion's supply condition
        ss = make_scenario_set(inst.region_ids, demands, probabilities=[0.5, 0.5])
        for w in range(2):
            res = solve_verified(inst, single_scenario_model(inst, ss, w))
            assert res.status == OPTIMAL
            assert abs(res.objective) <= 1e-9
        whole = solve_verified(inst, build_extensive_form(inst, ss))
        assert whole.status == OPTIMAL
        assert abs(whole.objective) <= 1e-9


def test_scenario_statistics():
    """Right-tail frequency within 3 sigma of 0.75; samples inside the CIs."""
    with criterion("scenario statistics (10,000 draws, 0.75 +/- 0.013)"):
        lines = ["region,date,mean,lower,upper"]
        for day, (lo, mid, up) in enumerate([(2, 5, 9), (1, 4, 10)]):
            date = f"2020-03-2{3 + day}"
            lines.append(f"a,{date},{mid},{lo},{up}")
            lines.append(f"b,{date},{mid + 1},{lo + 1},{up + 1}")
        horizon = Horizon(dt.date(2020, 3, 23), 2)
        forecasts = load_forecast("\n".join(lines) + "\n", horizon, ["a", "b"])
        spec = CaseSpec(right_tail_prob=0.75, right_tail_weight=0.75,
                        left_tail_weight=0.25, scenario_count=10_000)
        ss = generate_scenarios(forecasts, spec, seed=20200323)
        right = sum(1 for s in ss.scenarios if s.tail == "right")
        frac = right / 10_000
        assert abs(frac - 0.75) <= 0.013, f"right-tail fraction {frac}"
        for s in ss.scenarios:
            for n, rid in enumerate(ss.region_ids):
                for t, rec in enumerate(forecasts[rid].records):
                    assert rec.lower - 1e-12 <= s.demand[n, t] <= rec.upper + 1e-12


FULLSCALE_ENV = "VENTALLOC_FULLSCALE_DIR"


def test_full_scale_replication_best_effort():
    """Non-gating: order-of-magnitude match to the published severe case.

    Needs externally supplied inputs (the forecast snapshot is not
    redistributable) and an external MIP solver: point VENTALLOC_FULLSCALE_DIR
    at a directory holding instance.json, forecast.csv, scenarios.json and
    solutions/scenario_%03d.sol produced from the exported models.
    """
    root = os.environ.get(FULLSCALE_ENV)
    if not root:
        print(f"\nACCEPTANCE full-scale replication: SKIPPED (set {FULLSCALE_ENV})")
        pytest.skip(f"{FULLSCALE_ENV} not set; documented as best-effort")
    with criterion("full-scale replication (non-gating)"):
        from ventalloc.pipeline import report_from_solutions
        from ventalloc.scenario import load_scenario_set
        instance = load_instance(os.path.join(root, "instance.json"))
        scenarios = load_scenario_set(os.path.join(root, "scenarios.json"))
        bundle = report_from_solutions(instance, scenarios,
                                       os.path.join(root, "solutions"))
        published_total = 28529.72
        assert published_total / 10 <= bundle.total <= published_total * 10
        worst = np.datetime64(bundle.worst_day_date)
        target = np.datetime64("2020-04-12")
        assert abs((worst - target).astype(int)) <= 3
