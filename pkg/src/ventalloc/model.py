"""Extensive-form mixed-binary program for stockpile allocation.

One copy of the deterministic allocation program is emitted per demand
scenario, weighted by scenario probability; scenarios share no variables
or constraints.  Per scenario and period the rows are:

  balance       y[n,t-1] + x[n,t] - z[n,t] = y[n,t]            (per region)
  cbalance      s[t-1] + Q[t] + sum_n z[n,t] - sum_n x[n,t] = s[t]
  safety        y[n,t-1] - (1-tau_n) y[n,0] - rho_n d[n,t] >= M (g[n,t]-1)
  send_cap      z[n,t] <= y[n,t-1] - (1-tau_n) y[n,0] - rho_n d[n,t]
                                                      + M (1 - g[n,t])
  send_switch   z[n,t] <= M g[n,t]
  center_cap    sum_n x[n,t] <= s[t-1] + Q[t] + sum_n z[n,t]
  shortage      e[n,t] >= d[n,t] - y[n,t]

plus the initial conditions y[n,0] = (1-gamma_n) Y_n and s[0] = I.  The
objective minimizes the probability-weighted total shortage sum of e.

The indicator triple linearizes z <= (inventory - safety stock)^+ with a
binary g per (region, period): g = 0 pins z to zero, g = 1 allows sending
down to the safety level.  Relocation executes at the start of a period,
so the sendable amount is measured against the inventory then in hand,
y[n,t-1]; d is the same-day demand.  M is the constant
I + tau_n * y[n,0] + cumulative production through t.

All flow variables are continuous and nonnegative; only g is binary.
Models are immutable once built and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import PlanningInstance, cumulative_production
from .scenario import ScenarioSet

KINDS = ("x", "z", "y", "s", "e", "g")

LE, GE, EQ = "<=", ">=", "="


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class VariableKey:
    kind: str
    region: str | None
    t: int
    omega: int

    def name(self) -> str:
        """Stable token usable as an LP/MPS variable name."""
        if self.kind == "s":
            return f"s.t{self.t}.w{self.omega}"
        return f"{self.kind}.{self.region}.t{self.t}.w{self.omega}"

    @staticmethod
    def parse(name: str) -> "VariableKey":
        parts = name.split(".")
        try:
            kind = parts[0]
            if kind == "s":
                region = None
                t_part, w_part = parts[1], parts[2]
            else:
                region = ".".join(parts[1:-2])
                t_part, w_part = parts[-2], parts[-1]
            if kind not in KINDS or not t_part.startswith("t") or not w_part.startswith("w"):
                raise ValueError(name)
            return VariableKey(kind=kind, region=region, t=int(t_part[1:]), omega=int(w_part[1:]))
        except (IndexError, ValueError):
            raise ModelError(f"not a variable token: {name!r}") from None


class VariableDirectory:
    """Total bijection between the declared variable grid and columns."""

    def __init__(self, region_ids, num_periods: int, omegas):
        self.region_ids = tuple(region_ids)
        self.num_periods = int(num_periods)
        self.omegas = tuple(omegas)
        self._key_to_col: dict[VariableKey, int] = {}
        self._col_to_key: list[VariableKey] = []
        for w in self.omegas:
            for n in self.region_ids:
                self._add(VariableKey("y", n, 0, w))
            self._add(VariableKey("s", None, 0, w))
            for t in range(1, self.num_periods + 1):
                for kind in ("x", "z", "y", "e", "g"):
                    for n in self.region_ids:
                        self._add(VariableKey(kind, n, t, w))
                self._add(VariableKey("s", None, t, w))

    def _add(self, key: VariableKey) -> None:
        self._key_to_col[key] = len(self._col_to_key)
        self._col_to_key.append(key)

    def __len__(self) -> int:
        return len(self._col_to_key)

    def lookup(self, key: VariableKey) -> int:
        self._check_shape(key)
        try:
            return self._key_to_col[key]
        except KeyError:
            raise ModelError(f"key outside declared grid: {key}") from None

    def key_of(self, col: int) -> VariableKey:
        if not 0 <= col < len(self._col_to_key):
            raise ModelError(f"column {col} outside directory")
        return self._col_to_key[col]

    def _check_shape(self, key: VariableKey) -> None:
        if key.kind not in KINDS:
            raise ModelError(f"unknown variable kind {key.kind!r}")
        if key.kind == "s":
            if key.region is not None:
                raise ModelError(f"'s' keys carry no region, got {key}")
        else:
            if key.region is None:
                raise ModelError(f"{key.kind!r} keys require a region")
        lo_t = 0 if key.kind in ("y", "s") else 1
        if not lo_t <= key.t <= self.num_periods:
            raise ModelError(f"period {key.t} outside {lo_t}..{self.num_periods} for kind {key.kind!r}")

    def keys(self):
        return tuple(self._col_to_key)


@dataclass(frozen=True)
class Row:
    name: str
    coeffs: tuple[tuple[int, float], ...]
    sense: str
    rhs: float


@dataclass
class MilpModel:
    name: str
    col_names: list[str]
    col_lower: np.ndarray
    col_upper: np.ndarray
    is_binary: np.ndarray
    objective: np.ndarray
    rows: list[Row]
    directory: VariableDirectory | None = None

    @property
    def num_cols(self) -> int:
        return len(self.col_names)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    @property
    def binary_columns(self) -> list[int]:
        return [j for j, b in enumerate(self.is_binary) if b]

    def column_by_name(self, name: str) -> int:
        try:
            return self.col_names.index(name)
        except ValueError:
            raise ModelError(f"no column named {name!r}") from None

    def value_of(self, values: np.ndarray, key: VariableKey) -> float:
        if self.directory is None:
            raise ModelError("model has no variable directory")
        return float(values[self.directory.lookup(key)])


class _Builder:
    def __init__(self, name: str):
        self.name = name
        self.col_names: list[str] = []
        self.lower: list[float] = []
        self.upper: list[float] = []
        self.binary: list[bool] = []
        self.obj: dict[int, float] = {}
        self.rows: list[Row] = []

    def add_col(self, name, lower=0.0, upper=np.inf, binary=False) -> int:
        self.col_names.append(name)
        self.lower.append(lower)
        self.upper.append(upper)
        self.binary.append(binary)
        return len(self.col_names) - 1

    def set_obj(self, col: int, coef: float) -> None:
        self.obj[col] = self.obj.get(col, 0.0) + coef

    def add_row(self, name, terms, sense, rhs) -> None:
        merged: dict[int, float] = {}
        for col, coef in terms:
            merged[col] = merged.get(col, 0.0) + coef
        coeffs = tuple((c, v) for c, v in merged.items() if v != 0.0)
        self.rows.append(Row(name=name, coeffs=coeffs, sense=sense, rhs=float(rhs)))

    def build(self, directory=None) -> MilpModel:
        objective = np.zeros(len(self.col_names))
        for col, coef in self.obj.items():
            objective[col] = coef
        return MilpModel(
            name=self.name,
            col_names=self.col_names,
            col_lower=np.array(self.lower, dtype=float),
            col_upper=np.array(self.upper, dtype=float),
            is_binary=np.array(self.binary, dtype=bool),
            objective=objective,
            rows=self.rows,
            directory=directory,
        )


def compute_big_m(instance: PlanningInstance, n: int, t: int) -> float:
    """Deactivation constant I + tau_n * (1-gamma_n) Y_n + sum_{t'<=t} Q_t'."""
    return (
        float(instance.central_initial)
        + instance.tau[n] * instance.usable_initial(n)
        + cumulative_production(instance.production, t)
    )


def grid_counts(num_regions: int, num_periods: int, num_scenarios: int) -> dict[str, int]:
    """Closed-form column/row/binary counts of the extensive form."""
    n, t, w = num_regions, num_periods, num_scenarios
    return {
        "columns": w * (5 * n * t + n + t + 1),
        "rows": w * (n + 1 + t * (5 * n + 2)),
        "binaries": w * n * t,
    }


def _check_alignment(instance: PlanningInstance, scenarios: ScenarioSet) -> list[int]:
    """Map instance region order onto the scenario set's demand rows."""
    if set(scenarios.region_ids) != set(instance.region_ids):
        raise ModelError(
            f"scenario set covers regions {sorted(scenarios.region_ids)} "
            f"but instance has {sorted(instance.region_ids)}"
        )
    if scenarios.num_periods != instance.num_periods:
        raise ModelError(
            f"scenario set spans {scenarios.num_periods} periods, "
            f"instance horizon has {instance.num_periods}"
        )
    return [scenarios.region_ids.index(r) for r in instance.region_ids]


def _emit_scenario(b: _Builder, directory: VariableDirectory,
                   instance: PlanningInstance, demand_row, omega: int,
                   obj_weight: float, tighten_switch_cap: bool) -> None:
    """Emit the rows, bounds, and objective terms of one scenario copy."""
    T = instance.num_periods
    regions = instance.region_ids
    col = lambda kind, n, t: directory.lookup(VariableKey(kind, n, t, omega))
    scol = lambda t: directory.lookup(VariableKey("s", None, t, omega))

    for n in regions:
        b.add_col(VariableKey("y", n, 0, omega).name())
    b.add_col(VariableKey("s", None, 0, omega).name())
    for t in range(1, T + 1):
        for kind in ("x", "z", "y", "e"):
            for n in regions:
                b.add_col(VariableKey(kind, n, t, omega).name())
        for n in regions:
            b.add_col(VariableKey("g", n, t, omega).name(), lower=0.0, upper=1.0, binary=True)
        b.add_col(VariableKey("s", None, t, omega).name())

    for ni, n in enumerate(regions):
        b.add_row(f"init.{n}.w{omega}", [(col("y", n, 0), 1.0)], EQ, instance.usable_initial(ni))
    b.add_row(f"cinit.w{omega}", [(scol(0), 1.0)], EQ, float(instance.central_initial))

    total_usable = sum(instance.usable_initial_vector())
    for t in range(1, T + 1):
        q_t = float(instance.production[t - 1])
        for ni, n in enumerate(regions):
            b.add_row(
                f"bal.{n}.t{t}.w{omega}",
                [(col("y", n, t - 1), 1.0), (col("x", n, t), 1.0),
                 (col("z", n, t), -1.0), (col("y", n, t), -1.0)],
                EQ, 0.0,
            )
        b.add_row(
            f"cbal.t{t}.w{omega}",
            [(scol(t - 1), 1.0)]
            + [(col("z", n, t), 1.0) for n in regions]
            + [(col("x", n, t), -1.0) for n in regions]
            + [(scol(t), -1.0)],
            EQ, -q_t,
        )
        for ni, n in enumerate(regions):
            big_m = compute_big_m(instance, ni, t)
            keep = 1.0 - instance.tau[ni]           # fraction of y0 never shared
            safety = instance.rho[ni] * float(demand_row[ni, t - 1])
            b.add_row(
                f"safe.{n}.t{t}.w{omega}",
                [(col("y", n, t - 1), 1.0), (col("y", n, 0), -keep), (col("g", n, t), -big_m)],
                GE, safety - big_m,
            )
            b.add_row(
                f"cap.{n}.t{t}.w{omega}",
                [(col("z", n, t), 1.0), (col("y", n, t - 1), -1.0),
                 (col("y", n, 0), keep), (col("g", n, t), big_m)],
                LE, big_m - safety,
            )
            # only the pure z-switch row may use a tighter constant safely:
            # z[n,t] <= y[n,t-1] <= total units in the system before t
            m_switch = big_m
            if tighten_switch_cap:
                units_before = total_usable + instance.central_initial + (
                    cumulative_production(instance.production, t - 1) if t > 1 else 0.0
                )
                m_switch = min(big_m, units_before)
            b.add_row(
                f"sw.{n}.t{t}.w{omega}",
                [(col("z", n, t), 1.0), (col("g", n, t), -m_switch)],
                LE, 0.0,
            )
        b.add_row(
            f"ccap.t{t}.w{omega}",
            [(col("x", n, t), 1.0) for n in regions]
            + [(scol(t - 1), -1.0)]
            + [(col("z", n, t), -1.0) for n in regions],
            LE, q_t,
        )
        for ni, n in enumerate(regions):
            b.add_row(
                f"short.{n}.t{t}.w{omega}",
                [(col("e", n, t), 1.0), (col("y", n, t), 1.0)],
                GE, float(demand_row[ni, t - 1]),
            )

    for t in range(1, T + 1):
        for n in regions:
            b.set_obj(col("e", n, t), obj_weight)


def build_extensive_form(instance: PlanningInstance, scenarios: ScenarioSet,
                         tighten_switch_cap: bool = False) -> MilpModel:
    """All scenario copies in one program, shortage weighted by probability."""
    mapping = _check_alignment(instance, scenarios)
    omegas = list(range(scenarios.num_scenarios))
    directory = VariableDirectory(instance.region_ids, instance.num_periods, omegas)
    b = _Builder(name="alloc_extensive")
    for w in omegas:
        demand = scenarios.scenarios[w].demand[mapping, :]
        _emit_scenario(b, directory, instance, demand, w,
                       obj_weight=scenarios.probabilities[w],
                       tighten_switch_cap=tighten_switch_cap)
    model = b.build(directory)
    counts = grid_counts(instance.num_regions, instance.num_periods, scenarios.num_scenarios)
    assert model.num_cols == counts["columns"] and model.num_rows == counts["rows"]
    return model


def single_scenario_model(instance: PlanningInstance, scenarios: ScenarioSet,
                          omega: int, tighten_switch_cap: bool = False) -> MilpModel:
    """One scenario's copy alone, objective the unweighted shortage sum."""
    mapping = _check_alignment(instance, scenarios)
    if not 0 <= omega < scenarios.num_scenarios:
        raise ModelError(f"scenario index {omega} outside 0..{scenarios.num_scenarios - 1}")
    directory = VariableDirectory(instance.region_ids, instance.num_periods, [omega])
    b = _Builder(name=f"alloc_w{omega}")
    demand = scenarios.scenarios[omega].demand[mapping, :]
    _emit_scenario(b, directory, instance, demand, omega,
                   obj_weight=1.0, tighten_switch_cap=tighten_switch_cap)
    return b.build(directory)


ROW_FAMILIES = ("init", "cinit", "bal", "cbal", "safe", "cap", "sw", "ccap", "short")


def parse_row_name(name: str):
    """Split a builder row name into (family, region, t, omega).

    Region and t are None for the rows that do not carry them.  Returns
    None for names not produced by this builder (e.g. re-imported files).
    """
    parts = name.split(".")
    family = parts[0]
    if family not in ROW_FAMILIES:
        return None
    try:
        w = int(parts[-1][1:]) if parts[-1].startswith("w") else None
        if family in ("cbal", "ccap"):
            return family, None, int(parts[1][1:]), w
        if family == "cinit":
            return family, None, None, w
        if family == "init":
            return family, ".".join(parts[1:-1]), None, w
        region = ".".join(parts[1:-2])
        return family, region, int(parts[-2][1:]), w
    except (IndexError, ValueError):
        return None


# --- solution views ----------------------------------------------------------

@dataclass(frozen=True)
class ScenarioPlan:
    """Dense per-scenario view of an incumbent, indexed [region, period]."""
    omega: int
    region_ids: tuple[str, ...]
    x: np.ndarray          # (n, T)
    z: np.ndarray          # (n, T)
    e: np.ndarray          # (n, T)
    g: np.ndarray          # (n, T)
    y: np.ndarray          # (n, T+1), column 0 = initial
    s: np.ndarray          # (T+1,)

    @property
    def shortage(self) -> float:
        return float(self.e.sum())


def extract_plan(model: MilpModel, values: np.ndarray, omega: int) -> ScenarioPlan:
    d = model.directory
    if d is None:
        raise ModelError("model has no variable directory")
    regions, T = d.region_ids, d.num_periods
    pick = lambda kind, n, t: values[d.lookup(VariableKey(kind, n, t, omega))]
    shape = (len(regions), T)
    x, z, e, g = (np.zeros(shape) for _ in range(4))
    y = np.zeros((len(regions), T + 1))
    s = np.zeros(T + 1)
    for ni, n in enumerate(regions):
        y[ni, 0] = pick("y", n, 0)
        for t in range(1, T + 1):
            x[ni, t - 1] = pick("x", n, t)
            z[ni, t - 1] = pick("z", n, t)
            e[ni, t - 1] = pick("e", n, t)
            g[ni, t - 1] = pick("g", n, t)
            y[ni, t] = pick("y", n, t)
    for t in range(T + 1):
        s[t] = values[d.lookup(VariableKey("s", None, t, omega))]
    return ScenarioPlan(omega=omega, region_ids=regions, x=x, z=z, e=e, g=g, y=y, s=s)


def conservation_residuals(instance: PlanningInstance, plan: ScenarioPlan) -> np.ndarray:
    """Per-period |sum_n y[n,t] + s[t] - (sum_n y0 + I + cum Q)|; zero when
    the balance rows hold."""
    base = sum(instance.usable_initial_vector()) + instance.central_initial
    res = np.zeros(instance.num_periods + 1)
    cum_q = 0.0
    res[0] = abs(plan.y[:, 0].sum() + plan.s[0] - base)
    for t in range(1, instance.num_periods + 1):
        cum_q += instance.production[t - 1]
        res[t] = abs(plan.y[:, t].sum() + plan.s[t] - (base + cum_q))
    return res
