"""Deterministic problem data for the allocation model.

A planning instance fixes everything that is known before demand is
revealed: the regions, the day grid, each region's initial ventilator
inventory, the central stockpile, the production schedule, and the three
behavioural rates

  gamma_n : fraction of a region's initial inventory reserved for other
            (non-crisis) patients and therefore unusable here,
  tau_n   : fraction of the usable initial inventory the region is willing
            to share through the central agency,
  rho_n   : safety-stock multiplier; a region refuses to send units while
            holding less than rho_n times its same-day demand.

Usable initial inventory is y0_n = (1 - gamma_n) * Y_n, kept exact (no
rounding).  Dates exist for reporting only; the optimization runs on
integer period indices t = 1..T, with t = 0 denoting the initial state.
"""

from __future__ import annotations

import datetime as dt
import json
import re
from dataclasses import dataclass

SCHEMA_VERSION = 1

# ids must survive verbatim inside LP/MPS variable names, so keep them to a
# conservative charset and reserve "." as the name-codec separator
_ID_PATTERN = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_-]*$")


class InstanceValidationError(ValueError):
    """Raised when an instance violates its invariants.

    Carries every violation found, not just the first.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__(
            "invalid planning instance:\n  " + "\n  ".join(self.violations)
        )


@dataclass(frozen=True)
class Region:
    id: str
    display_name: str = ""

    def __post_init__(self):
        if not self.display_name:
            object.__setattr__(self, "display_name", self.id)


@dataclass(frozen=True)
class Horizon:
    start_date: dt.date
    num_periods: int

    def dates(self) -> list[dt.date]:
        return [self.start_date + dt.timedelta(days=k) for k in range(self.num_periods)]

    def date_of(self, t: int) -> dt.date:
        """Calendar date of period t, with t=1 mapping to start_date."""
        if not 1 <= t <= self.num_periods:
            raise ValueError(f"period {t} outside 1..{self.num_periods}")
        return self.start_date + dt.timedelta(days=t - 1)


@dataclass(frozen=True)
class PlanningInstance:
    regions: tuple[Region, ...]
    horizon: Horizon
    initial_region_inventory: tuple[int, ...]   # Y_n, aligned with regions
    central_initial: int                        # I
    production: tuple[int, ...]                 # Q_t, one per period
    gamma: tuple[float, ...]
    tau: tuple[float, ...]
    rho: tuple[float, ...]

    @property
    def num_regions(self) -> int:
        return len(self.regions)

    @property
    def num_periods(self) -> int:
        return self.horizon.num_periods

    @property
    def region_ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.regions)

    def region_index(self, region_id: str) -> int:
        try:
            return self.region_ids.index(region_id)
        except ValueError:
            raise KeyError(f"unknown region id {region_id!r}") from None

    def usable_initial(self, n: int) -> float:
        """y0_n = (1 - gamma_n) * Y_n for region index n."""
        return usable_initial_inventory(self.initial_region_inventory[n], self.gamma[n])

    def usable_initial_vector(self) -> tuple[float, ...]:
        return tuple(self.usable_initial(n) for n in range(self.num_regions))

    def replace_rates(self, gamma=None, tau=None, rho=None,
                      central_initial=None, production=None) -> "PlanningInstance":
        """What-if variant with scalar or per-region overrides, re-validated."""
        def vec(value, current):
            if value is None:
                return current
            if isinstance(value, (int, float)):
                return tuple(float(value) for _ in self.regions)
            return tuple(float(v) for v in value)

        return validate_instance(PlanningInstance(
            regions=self.regions,
            horizon=self.horizon,
            initial_region_inventory=self.initial_region_inventory,
            central_initial=self.central_initial if central_initial is None else int(central_initial),
            production=self.production if production is None else tuple(int(q) for q in production),
            gamma=vec(gamma, self.gamma),
            tau=vec(tau, self.tau),
            rho=vec(rho, self.rho),
        ))


def usable_initial_inventory(initial: float, gamma: float) -> float:
    """Inventory usable for crisis patients: (1 - gamma) * Y."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma {gamma} outside [0, 1]")
    if initial < 0:
        raise ValueError(f"initial inventory {initial} negative")
    return (1.0 - gamma) * initial


def cumulative_production(production, t: int) -> float:
    """Units produced and deliverable by the start of period t (inclusive)."""
    if not 1 <= t <= len(production):
        raise ValueError(f"period {t} outside 1..{len(production)}")
    return float(sum(production[:t]))


def validate_instance(raw: PlanningInstance) -> PlanningInstance:
    """Check every instance invariant, reporting all violations at once."""
    errs: list[str] = []
    n_regions = len(raw.regions)

    if n_regions == 0:
        errs.append("instance has no regions")
    seen: set[str] = set()
    for r in raw.regions:
        if not r.id:
            errs.append("region with empty id")
        elif not _ID_PATTERN.match(r.id):
            errs.append(f"region id {r.id!r} not of form [A-Za-z0-9][A-Za-z0-9_-]*")
        if r.id in seen:
            errs.append(f"duplicate region id {r.id!r}")
        seen.add(r.id)

    if raw.horizon.num_periods < 1:
        errs.append(f"horizon must have at least 1 period, got {raw.horizon.num_periods}")

    def check_len(name, vec):
        if len(vec) != n_regions:
            errs.append(f"{name} has {len(vec)} entries for {n_regions} regions")
            return False
        return True

    if check_len("initial_region_inventory", raw.initial_region_inventory):
        for r, y in zip(raw.regions, raw.initial_region_inventory):
            if y < 0 or int(y) != y:
                errs.append(f"initial inventory for {r.id} must be a nonnegative integer, got {y}")
    if raw.central_initial < 0 or int(raw.central_initial) != raw.central_initial:
        errs.append(f"central stockpile must be a nonnegative integer, got {raw.central_initial}")
    if len(raw.production) != raw.horizon.num_periods:
        errs.append(
            f"production vector length mismatch: {len(raw.production)} entries "
            f"for {raw.horizon.num_periods} periods"
        )
    for t, q in enumerate(raw.production, start=1):
        if q < 0 or int(q) != q:
            errs.append(f"production for period {t} must be a nonnegative integer, got {q}")

    for name, vec, lo, hi in (
        ("gamma", raw.gamma, 0.0, 1.0),
        ("tau", raw.tau, 0.0, 1.0),
        ("rho", raw.rho, 0.0, None),
    ):
        if not check_len(name, vec):
            continue
        for r, v in zip(raw.regions, vec):
            if v < lo or (hi is not None and v > hi):
                bound = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
                errs.append(f"{name} out of {bound} for region {r.id}: {v}")

    if errs:
        raise InstanceValidationError(errs)
    return raw


# --- JSON config (schema documented in docs/schemas.md) ---------------------

def _rate_vector(value, regions: tuple[Region, ...], name: str):
    """Accept either a scalar (broadcast) or a {region_id: value} mapping."""
    if isinstance(value, (int, float)):
        return tuple(float(value) for _ in regions)
    if isinstance(value, dict):
        missing = [r.id for r in regions if r.id not in value]
        if missing:
            raise InstanceValidationError([f"{name} missing entry for region {m}" for m in missing])
        return tuple(float(value[r.id]) for r in regions)
    raise InstanceValidationError([f"{name} must be a number or a region map"])


def instance_from_dict(doc: dict) -> PlanningInstance:
    try:
        regions = tuple(
            Region(id=str(r["id"]), display_name=str(r.get("display_name", r["id"])))
            for r in doc["regions"]
        )
        horizon = Horizon(
            start_date=dt.date.fromisoformat(doc["horizon"]["start_date"]),
            num_periods=int(doc["horizon"]["num_periods"]),
        )
        inv = doc["initial_region_inventory"]
        if isinstance(inv, dict):
            initial = tuple(int(inv[r.id]) for r in regions)
        else:
            initial = tuple(int(v) for v in inv)
        raw = PlanningInstance(
            regions=regions,
            horizon=horizon,
            initial_region_inventory=initial,
            central_initial=int(doc["central_initial"]),
            production=tuple(int(q) for q in doc["production"]),
            gamma=_rate_vector(doc["gamma"], regions, "gamma"),
            tau=_rate_vector(doc["tau"], regions, "tau"),
            rho=_rate_vector(doc["rho"], regions, "rho"),
        )
    except InstanceValidationError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceValidationError([f"malformed instance document: {exc}"]) from exc
    return validate_instance(raw)


def instance_to_dict(inst: PlanningInstance) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "regions": [{"id": r.id, "display_name": r.display_name} for r in inst.regions],
        "horizon": {
            "start_date": inst.horizon.start_date.isoformat(),
            "num_periods": inst.horizon.num_periods,
        },
        "initial_region_inventory": {r.id: y for r, y in zip(inst.regions, inst.initial_region_inventory)},
        "central_initial": inst.central_initial,
        "production": list(inst.production),
        "gamma": {r.id: g for r, g in zip(inst.regions, inst.gamma)},
        "tau": {r.id: v for r, v in zip(inst.regions, inst.tau)},
        "rho": {r.id: v for r, v in zip(inst.regions, inst.rho)},
    }


def load_instance(path) -> PlanningInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))


def save_instance(inst: PlanningInstance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(inst), fh, indent=2, sort_keys=True)
        fh.write("\n")
