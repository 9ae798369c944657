"""Demand-scenario generation from forecast confidence intervals.

A forecast gives, per region and day, a (lower, mean, upper) interval that
is taken as the support of the demand distribution.  One scenario is one
demand trajectory over all regions and days, drawn as follows:

  1. pick a tail: right (above the mean) with probability q, left below,
  2. pick one of K equal-width partitions of that tail (uniformly),
  3. for every (region, day) cell, sample uniformly inside that same
     partition of that same tail of the cell's own interval.

The tail and partition index are shared by all cells of a scenario; only
the per-cell uniform draw is fresh.  Each scenario carries a raw weight
determined by its tail (right_tail_weight / left_tail_weight); weights are
normalized into probabilities at the end.  The four named cases:

  case   P(right tail)   right weight   left weight
  I          0.50            1              1        (uniform scenarios)
  II         0.25            0.25           0.75
  III        0.50            0.50           0.50
  IV         0.75            0.75           0.25

Generation is a pure function of (forecasts, case, seed); the RNG is
numpy's PCG64 so scenario sets reproduce bit-for-bit across platforms.
Demands stay fractional: no rounding to whole patients is applied.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
from dataclasses import dataclass, asdict

import numpy as np

from .instance import Horizon

SCHEMA_VERSION = 1

RIGHT = "right"
LEFT = "left"


class ForecastError(ValueError):
    pass


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class ForecastRecord:
    date: dt.date
    mean: float
    lower: float
    upper: float


@dataclass(frozen=True)
class ForecastSeries:
    region_id: str
    records: tuple[ForecastRecord, ...]   # one per horizon day, in order


@dataclass(frozen=True)
class CaseSpec:
    right_tail_prob: float
    right_tail_weight: float
    left_tail_weight: float
    partitions: int = 50
    scenario_count: int = 24
    label: str = "custom"

    def __post_init__(self):
        if not 0.0 <= self.right_tail_prob <= 1.0:
            raise ScenarioError(f"right_tail_prob {self.right_tail_prob} outside [0, 1]")
        if self.right_tail_weight <= 0 or self.left_tail_weight <= 0:
            raise ScenarioError("tail weights must be positive")
        if self.partitions < 1:
            raise ScenarioError("partitions must be >= 1")
        if self.scenario_count < 1:
            raise ScenarioError("scenario_count must be >= 1")


CASE_PRESETS: dict[str, CaseSpec] = {
    "I": CaseSpec(right_tail_prob=0.50, right_tail_weight=1.0, left_tail_weight=1.0, label="I"),
    "II": CaseSpec(right_tail_prob=0.25, right_tail_weight=0.25, left_tail_weight=0.75, label="II"),
    "III": CaseSpec(right_tail_prob=0.50, right_tail_weight=0.50, left_tail_weight=0.50, label="III"),
    "IV": CaseSpec(right_tail_prob=0.75, right_tail_weight=0.75, left_tail_weight=0.25, label="IV"),
}


def case_spec(case, scenario_count: int | None = None, partitions: int | None = None) -> CaseSpec:
    """Resolve a case label or pass through a CaseSpec, applying overrides."""
    if isinstance(case, str):
        try:
            spec = CASE_PRESETS[case.upper()]
        except KeyError:
            raise ScenarioError(f"unknown case label {case!r} (expected I..IV)") from None
    else:
        spec = case
    if scenario_count is not None or partitions is not None:
        spec = CaseSpec(
            right_tail_prob=spec.right_tail_prob,
            right_tail_weight=spec.right_tail_weight,
            left_tail_weight=spec.left_tail_weight,
            partitions=spec.partitions if partitions is None else partitions,
            scenario_count=spec.scenario_count if scenario_count is None else scenario_count,
            label=spec.label,
        )
    return spec


@dataclass(frozen=True)
class DemandScenario:
    demand: np.ndarray          # shape (num_regions, num_periods), d[n, t-1]
    raw_weight: float
    tail: str                   # "left" | "right"
    partition_index: int

    def total(self) -> float:
        return float(self.demand.sum())


@dataclass(frozen=True)
class ScenarioSet:
    region_ids: tuple[str, ...]
    num_periods: int
    scenarios: tuple[DemandScenario, ...]
    probabilities: tuple[float, ...]
    case: CaseSpec
    seed: int

    def __post_init__(self):
        if len(self.scenarios) != len(self.probabilities):
            raise ScenarioError("probability/scenario count mismatch")
        if abs(sum(self.probabilities) - 1.0) > 1e-12:
            raise ScenarioError(f"probabilities sum to {sum(self.probabilities)}, not 1")

    @property
    def num_scenarios(self) -> int:
        return len(self.scenarios)

    def demand(self, omega: int, n: int, t: int) -> float:
        return float(self.scenarios[omega].demand[n, t - 1])


# --- forecast CSV ingestion --------------------------------------------------

FORECAST_HEADER = ("region", "date", "mean", "lower", "upper")


def load_forecast(source, horizon: Horizon, region_ids) -> dict[str, ForecastSeries]:
    """Parse the `region,date,mean,lower,upper` CSV into per-region series.

    Every requested region must cover every day of the horizon.  Rows for
    regions outside `region_ids` are ignored, which lets one master file
    serve subset experiments.
    """
    if isinstance(source, bytes):
        source = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str):
        source = io.StringIO(source)

    wanted = list(region_ids)
    wanted_set = set(wanted)
    dates = horizon.dates()
    date_set = set(dates)
    cells: dict[tuple[str, dt.date], ForecastRecord] = {}

    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise ForecastError("empty forecast file") from None
    if [h.strip().lower() for h in header] != list(FORECAST_HEADER):
        raise ForecastError(
            f"bad forecast header {header!r}, expected {','.join(FORECAST_HEADER)}"
        )

    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 5:
            raise ForecastError(f"row {lineno}: expected 5 fields, got {len(row)}")
        region = row[0].strip()
        try:
            date = dt.date.fromisoformat(row[1].strip())
            mean, lower, upper = (float(row[k]) for k in (2, 3, 4))
        except ValueError as exc:
            raise ForecastError(f"row {lineno}: unparseable value ({exc})") from None
        if region not in wanted_set or date not in date_set:
            continue
        if lower < 0:
            raise ForecastError(f"row {lineno}: negative lower bound {lower}")
        if not lower <= mean <= upper:
            raise ForecastError(
                f"row {lineno}: interval out of order for {region} {date}: "
                f"lower={lower} mean={mean} upper={upper}"
            )
        if (region, date) in cells:
            raise ForecastError(f"row {lineno}: duplicate cell for {region} {date}")
        cells[(region, date)] = ForecastRecord(date=date, mean=mean, lower=lower, upper=upper)

    missing = [(r, d) for r in wanted for d in dates if (r, d) not in cells]
    if missing:
        shown = ", ".join(f"{r} {d.isoformat()}" for r, d in missing[:5])
        more = f" (+{len(missing) - 5} more)" if len(missing) > 5 else ""
        raise ForecastError(f"missing forecast day(s): {shown}{more}")

    return {
        r: ForecastSeries(region_id=r, records=tuple(cells[(r, d)] for d in dates))
        for r in wanted
    }


def forecast_to_csv(series_by_region: dict[str, ForecastSeries]) -> str:
    out = io.StringIO()
    w = csv.writer(out)
    w.writerow(FORECAST_HEADER)
    for region, series in series_by_region.items():
        for rec in series.records:
            w.writerow([region, rec.date.isoformat(), rec.mean, rec.lower, rec.upper])
    return out.getvalue()


# --- sampling ----------------------------------------------------------------

def sample_tail_partition(interval, tail: str, partition_index: int, u: float,
                          partitions: int = 50) -> float:
    """Uniform draw from one equal-width partition of one tail of a CI.

    The left tail spans [lower, mean], the right tail [mean, upper]; a
    zero-width tail collapses to its single point.
    """
    lower, mean, upper = interval
    if tail == RIGHT:
        start, width = mean, upper - mean
    elif tail == LEFT:
        start, width = lower, mean - lower
    else:
        raise ScenarioError(f"tail must be 'left' or 'right', got {tail!r}")
    if not 0 <= partition_index < partitions:
        raise ScenarioError(f"partition index {partition_index} outside 0..{partitions - 1}")
    return start + (partition_index + u) * (width / partitions)


def generate_scenarios(forecasts: dict[str, ForecastSeries], case: CaseSpec,
                       seed: int) -> ScenarioSet:
    """Draw `case.scenario_count` weighted scenarios; deterministic per seed.

    Draw order per scenario: one uniform for the tail, one integer for the
    partition, then one uniform per (region, day) cell in region order.
    """
    region_ids = tuple(forecasts.keys())
    if not region_ids:
        raise ScenarioError("no forecast series given")
    num_periods = len(forecasts[region_ids[0]].records)
    for r in region_ids:
        if len(forecasts[r].records) != num_periods:
            raise ScenarioError(f"forecast for {r} has a different horizon length")

    rng = np.random.Generator(np.random.PCG64(seed))
    scenarios = []
    for _ in range(case.scenario_count):
        right = rng.random() < case.right_tail_prob
        tail = RIGHT if right else LEFT
        k = int(rng.integers(0, case.partitions))
        demand = np.empty((len(region_ids), num_periods), dtype=float)
        for n, r in enumerate(region_ids):
            for t, rec in enumerate(forecasts[r].records):
                u = rng.random()
                demand[n, t] = sample_tail_partition(
                    (rec.lower, rec.mean, rec.upper), tail, k, u, case.partitions
                )
        demand.setflags(write=False)
        scenarios.append(DemandScenario(
            demand=demand,
            raw_weight=case.right_tail_weight if right else case.left_tail_weight,
            tail=tail,
            partition_index=k,
        ))

    probabilities = normalize_weights([s.raw_weight for s in scenarios])
    return ScenarioSet(
        region_ids=region_ids,
        num_periods=num_periods,
        scenarios=tuple(scenarios),
        probabilities=tuple(probabilities),
        case=case,
        seed=int(seed),
    )


def normalize_weights(raw_weights) -> list[float]:
    weights = [float(w) for w in raw_weights]
    if not weights:
        raise ScenarioError("cannot normalize an empty weight list")
    if any(w <= 0 for w in weights):
        raise ScenarioError(f"weights must be positive, got {weights}")
    total = sum(weights)
    return [w / total for w in weights]


# --- JSON round trip ---------------------------------------------------------

def scenario_set_to_dict(ss: ScenarioSet) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": ss.seed,
        "case": asdict(ss.case),
        "region_ids": list(ss.region_ids),
        "num_periods": ss.num_periods,
        "probabilities": list(ss.probabilities),
        "scenarios": [
            {
                "raw_weight": s.raw_weight,
                "tail": s.tail,
                "partition_index": s.partition_index,
                "demand": [list(map(float, row)) for row in s.demand],
            }
            for s in ss.scenarios
        ],
    }


def scenario_set_from_dict(doc: dict) -> ScenarioSet:
    case = CaseSpec(**doc["case"])
    scenarios = []
    for s in doc["scenarios"]:
        demand = np.asarray(s["demand"], dtype=float)
        demand.setflags(write=False)
        scenarios.append(DemandScenario(
            demand=demand,
            raw_weight=float(s["raw_weight"]),
            tail=s["tail"],
            partition_index=int(s["partition_index"]),
        ))
    return ScenarioSet(
        region_ids=tuple(doc["region_ids"]),
        num_periods=int(doc["num_periods"]),
        scenarios=tuple(scenarios),
        probabilities=tuple(float(p) for p in doc["probabilities"]),
        case=case,
        seed=int(doc["seed"]),
    )


def load_scenario_set(path) -> ScenarioSet:
    with open(path, "r", encoding="utf-8") as fh:
        return scenario_set_from_dict(json.load(fh))


def save_scenario_set(ss: ScenarioSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_set_to_dict(ss), fh)
        fh.write("\n")
