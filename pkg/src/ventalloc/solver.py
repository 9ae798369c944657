"""Branch and bound over the binary columns of a MilpModel.

The LP relaxation is the in-package bounded simplex; branching fixes one
binary to 0/1 per child.  Rules are fixed so runs are reproducible:

  node selection   best bound first, ties by creation order
  branching        most fractional binary, ties by lowest column index
  initial incumbent  root relaxation with binaries rounded, if feasible

Desk-scale programs (a few hundred columns) are the design point; the
54-region full-scale extensive form is meant for an external solver via
the exporters in `lpformats`.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass

import numpy as np

from . import simplex
from .model import MilpModel, VariableKey, parse_row_name
from .simplex import LpResult, solve_lp

OPTIMAL = "Optimal"
FEASIBLE_TIME_LIMIT = "FeasibleTimeLimit"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"

INTEGRALITY_TOL = 1e-6


@dataclass(frozen=True)
class SolveLimits:
    time_limit: float = 3600.0
    relative_gap: float = 1e-6
    absolute_gap: float = 1e-9
    node_limit: int | None = None

    def __post_init__(self):
        if self.time_limit <= 0 or self.relative_gap < 0 or self.absolute_gap < 0:
            raise ValueError("solve limits must be positive")
        if self.node_limit is not None and self.node_limit <= 0:
            raise ValueError("node_limit must be positive")


@dataclass
class SolveResult:
    status: str
    incumbent: np.ndarray | None
    objective: float | None
    best_bound: float
    node_count: int = 0
    simplex_iterations: int = 0
    wall_time: float = 0.0

    def require_incumbent(self) -> np.ndarray:
        if self.incumbent is None:
            raise RuntimeError(f"no incumbent available (status {self.status})")
        return self.incumbent


@dataclass(frozen=True)
class Violation:
    kind: str            # "row" | "bound" | "integrality"
    name: str
    amount: float
    key: VariableKey | None = None
    detail: str = ""

    def __str__(self):
        where = f" [{self.key}]" if self.key else ""
        return f"{self.kind} {self.name} violated by {self.amount:.3e}{where} {self.detail}"


def _dense_rows(model: MilpModel):
    """Rows as dense matrix + senses + rhs; constant rows checked up front."""
    m_rows = [r for r in model.rows if r.coeffs]
    for r in model.rows:
        if not r.coeffs:
            ok = (
                (r.sense == "<=" and 0.0 <= r.rhs + 1e-12)
                or (r.sense == ">=" and 0.0 >= r.rhs - 1e-12)
                or (r.sense == "=" and abs(r.rhs) <= 1e-12)
            )
            if not ok:
                return None
    A = np.zeros((len(m_rows), model.num_cols))
    b = np.empty(len(m_rows))
    senses = []
    for i, r in enumerate(m_rows):
        for col, coef in r.coeffs:
            A[i, col] = coef
        b[i] = r.rhs
        senses.append(r.sense)
    return A, senses, b


def solve_lp_relaxation(model: MilpModel) -> SolveResult:
    """Relax the binaries to [0,1] and solve the LP."""
    start = time.perf_counter()
    dense = _dense_rows(model)
    if dense is None:
        return SolveResult(INFEASIBLE, None, None, np.inf, wall_time=time.perf_counter() - start)
    A, senses, b = dense
    res = solve_lp(model.objective, A, senses, b, model.col_lower, model.col_upper)
    return _from_lp(res, start)


def _from_lp(res: LpResult, start: float) -> SolveResult:
    wall = time.perf_counter() - start
    if res.status == simplex.OPTIMAL:
        return SolveResult(OPTIMAL, res.x, res.objective, res.objective,
                           node_count=1, simplex_iterations=res.iterations, wall_time=wall)
    if res.status == simplex.INFEASIBLE:
        return SolveResult(INFEASIBLE, None, None, np.inf,
                           node_count=1, simplex_iterations=res.iterations, wall_time=wall)
    return SolveResult(UNBOUNDED, None, None, -np.inf,
                       node_count=1, simplex_iterations=res.iterations, wall_time=wall)


def branch_and_bound(model: MilpModel, limits: SolveLimits | None = None) -> SolveResult:
    limits = limits or SolveLimits()
    start = time.perf_counter()
    dense = _dense_rows(model)
    if dense is None:
        return SolveResult(INFEASIBLE, None, None, np.inf, wall_time=time.perf_counter() - start)
    A, senses, b = dense
    binaries = model.binary_columns

    lp_iters = 0
    node_count = 0

    def lp(lo, up) -> LpResult:
        nonlocal lp_iters, node_count
        res = solve_lp(model.objective, A, senses, b, lo, up)
        lp_iters += res.iterations
        node_count += 1
        return res

    root = lp(model.col_lower, model.col_upper)
    if root.status == simplex.INFEASIBLE:
        return SolveResult(INFEASIBLE, None, None, np.inf, node_count, lp_iters,
                           time.perf_counter() - start)
    if root.status == simplex.UNBOUNDED:
        return SolveResult(UNBOUNDED, None, None, -np.inf, node_count, lp_iters,
                           time.perf_counter() - start)

    incumbent = None
    incumbent_obj = np.inf

    def consider(res: LpResult) -> None:
        nonlocal incumbent, incumbent_obj
        if res.status == simplex.OPTIMAL and res.objective < incumbent_obj - 1e-12:
            incumbent, incumbent_obj = res.x.copy(), res.objective

    def fractional(x) -> list[int]:
        return [j for j in binaries if abs(x[j] - round(x[j])) > INTEGRALITY_TOL]

    if not fractional(root.x):
        consider(root)
        return SolveResult(OPTIMAL, incumbent, incumbent_obj, incumbent_obj,
                           node_count, lp_iters, time.perf_counter() - start)

    # initial incumbent: round the root's binaries and re-solve
    lo_r, up_r = model.col_lower.copy(), model.col_upper.copy()
    for j in binaries:
        v = float(round(root.x[j]))
        lo_r[j] = up_r[j] = v
    consider(lp(lo_r, up_r))

    def slack() -> float:
        if not np.isfinite(incumbent_obj):
            return 0.0
        return max(limits.absolute_gap, limits.relative_gap * abs(incumbent_obj))

    next_id = 0
    heap: list = []

    def push(bound, lo, up) -> None:
        nonlocal next_id
        heapq.heappush(heap, (bound, next_id, lo, up))
        next_id += 1

    push(root.objective, model.col_lower.copy(), model.col_upper.copy())
    hit_limit = False

    while heap:
        if time.perf_counter() - start > limits.time_limit:
            hit_limit = True
            break
        if limits.node_limit is not None and node_count >= limits.node_limit:
            hit_limit = True
            break
        bound, _, lo, up = heapq.heappop(heap)
        if bound >= incumbent_obj - slack():
            heap.append((bound, 0, lo, up))   # retain for best-bound reporting
            break
        res = lp(lo, up)
        if res.status != simplex.OPTIMAL or res.objective >= incumbent_obj - slack():
            continue
        frac = fractional(res.x)
        if not frac:
            consider(res)
            continue
        j = max(frac, key=lambda k: (0.5 - abs(res.x[k] - np.floor(res.x[k]) - 0.5), -k))
        lo0, up0 = lo.copy(), up.copy()
        up0[j] = 0.0
        push(res.objective, lo0, up0)
        lo1, up1 = lo.copy(), up.copy()
        lo1[j] = 1.0
        push(res.objective, lo1, up1)

    wall = time.perf_counter() - start
    open_bounds = [entry[0] for entry in heap]
    if incumbent is None:
        if hit_limit:
            return SolveResult(FEASIBLE_TIME_LIMIT, None, None,
                               min(open_bounds, default=np.inf), node_count, lp_iters, wall)
        return SolveResult(INFEASIBLE, None, None, np.inf, node_count, lp_iters, wall)
    best_bound = min(min(open_bounds, default=incumbent_obj), incumbent_obj)
    status = FEASIBLE_TIME_LIMIT if hit_limit else OPTIMAL
    return SolveResult(status, incumbent, incumbent_obj, best_bound,
                       node_count, lp_iters, wall)


def check_feasibility(model: MilpModel, assignment: np.ndarray, tol: float = 1e-6) -> list[Violation]:
    """Every violated row, bound, or integrality mark in the assignment."""
    x = np.asarray(assignment, dtype=float)
    if x.shape[0] != model.num_cols:
        raise ValueError(f"assignment covers {x.shape[0]} of {model.num_cols} columns")
    out: list[Violation] = []

    def key_for_row(name):
        parsed = parse_row_name(name)
        if parsed is None:
            return None
        family, region, t, w = parsed
        if region is None or t is None or w is None:
            return None
        kind = {"bal": "y", "safe": "y", "cap": "z", "sw": "z", "short": "e"}.get(family)
        return VariableKey(kind, region, t, w) if kind else None

    for row in model.rows:
        lhs = sum(coef * x[col] for col, coef in row.coeffs)
        gap = 0.0
        if row.sense == "<=":
            gap = lhs - row.rhs
        elif row.sense == ">=":
            gap = row.rhs - lhs
        else:
            gap = abs(lhs - row.rhs)
        if gap > tol:
            out.append(Violation("row", row.name, float(gap), key_for_row(row.name),
                                 detail=f"lhs={lhs:.6g} {row.sense} rhs={row.rhs:.6g}"))

    for j in range(model.num_cols):
        key = model.directory.key_of(j) if model.directory is not None else None
        below = model.col_lower[j] - x[j]
        above = x[j] - model.col_upper[j]
        if below > tol or above > tol:
            out.append(Violation("bound", model.col_names[j], float(max(below, above)), key))
        if model.is_binary[j] and abs(x[j] - round(x[j])) > tol:
            out.append(Violation("integrality", model.col_names[j],
                                 float(abs(x[j] - round(x[j]))), key))
    return out
