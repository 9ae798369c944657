"""Bounded-variable primal simplex with a two-phase start.

Solves   min c.x  s.t.  A x (<=, =, >=) b,  lo <= x <= up,
with infinite bounds allowed on either side.  Rows are turned into
equalities by one slack each (slack bounds encode the sense).  The crash
basis takes the slack wherever it can absorb the initial residual and a
costed artificial elsewhere; phase one drives those artificials to zero
and phase two continues from the resulting basis with the true costs.

The basis inverse is kept explicitly and updated by the product form,
with periodic refactorization; everything is dense numpy, which is the
right trade-off for the desk-scale programs this package solves itself
(full-scale instances go to an external solver through the LP/MPS
exporters).  Pricing is most-negative reduced cost with lowest-index
tie-breaking, falling back to Bland's rule after a run of degenerate
pivots so cycling cannot persist.  All choices are deterministic: the
same input always walks the same pivot sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_BASIC, _AT_LOWER, _AT_UPPER, _FREE = 0, 1, 2, 3

_REFACTOR_EVERY = 64
_DEGENERATE_STREAK = 40


class SimplexError(RuntimeError):
    """Numerical failure; the message carries the offending pivot context."""


@dataclass
class LpResult:
    status: str
    x: np.ndarray | None
    objective: float | None
    iterations: int


def _initial_value(lo: float, up: float) -> float:
    if np.isfinite(lo) and np.isfinite(up):
        return lo if abs(lo) <= abs(up) else up
    if np.isfinite(lo):
        return lo
    if np.isfinite(up):
        return up
    return 0.0


def _initial_status(lo: float, up: float) -> int:
    if np.isfinite(lo) and np.isfinite(up):
        return _AT_LOWER if abs(lo) <= abs(up) else _AT_UPPER
    if np.isfinite(lo):
        return _AT_LOWER
    if np.isfinite(up):
        return _AT_UPPER
    return _FREE


def solve_lp(c, A, senses, b, lo, up, *, feas_tol: float = 1e-7,
             opt_tol: float = 1e-7, maxiter: int | None = None) -> LpResult:
    """Solve a bounded LP; returns structural values only."""
    c = np.asarray(c, dtype=float)
    lo = np.asarray(lo, dtype=float)
    up = np.asarray(up, dtype=float)
    n = c.shape[0]

    if np.any(lo > up + feas_tol):
        return LpResult(INFEASIBLE, None, None, 0)

    A = np.asarray(A, dtype=float).reshape(len(senses), n) if len(senses) else np.zeros((0, n))
    b = np.asarray(b, dtype=float)
    m = A.shape[0]

    if m == 0:
        x = np.array([_initial_value(lo[j], up[j]) for j in range(n)])
        for j in range(n):
            if c[j] < -opt_tol:
                if not np.isfinite(up[j]):
                    return LpResult(UNBOUNDED, None, None, 0)
                x[j] = up[j]
            elif c[j] > opt_tol:
                if not np.isfinite(lo[j]):
                    return LpResult(UNBOUNDED, None, None, 0)
                x[j] = lo[j]
        return LpResult(OPTIMAL, x, float(c @ x), 0)

    # slacks: row sense becomes a bound on its slack variable
    slack_lo = np.zeros(m)
    slack_up = np.zeros(m)
    for i, s in enumerate(senses):
        if s == "<=":
            slack_lo[i], slack_up[i] = 0.0, np.inf
        elif s == ">=":
            slack_lo[i], slack_up[i] = -np.inf, 0.0
        elif s == "=":
            slack_lo[i], slack_up[i] = 0.0, 0.0
        else:
            raise ValueError(f"unknown row sense {s!r}")

    num_real = n + m
    total = num_real + m                      # + artificials
    lo_full = np.concatenate([lo, slack_lo, np.zeros(m)])
    up_full = np.concatenate([up, slack_up, np.full(m, np.inf)])

    status = np.empty(total, dtype=np.int8)
    for j in range(n):
        status[j] = _initial_status(lo[j], up[j])
    vals0 = np.array([_initial_value(lo[j], up[j]) for j in range(n)])
    resid = b - A @ vals0

    # crash basis: a row whose slack can absorb its residual starts feasible
    # with the slack basic; only the others get a costed artificial
    basis = np.empty(m, dtype=int)
    diag = np.ones(m)
    art_needed = np.zeros(m, dtype=bool)
    for i in range(m):
        slack_j = n + i
        if slack_lo[i] - feas_tol <= resid[i] <= slack_up[i] + feas_tol:
            basis[i] = slack_j
            status[slack_j] = _BASIC
            status[num_real + i] = _AT_LOWER
        else:
            basis[i] = num_real + i
            status[slack_j] = _initial_status(slack_lo[i], slack_up[i])
            status[num_real + i] = _BASIC
            art_needed[i] = True
            near = _initial_value(slack_lo[i], slack_up[i])
            diag[i] = 1.0 if resid[i] - near >= 0.0 else -1.0
    # artificials not needed by the crash basis are pinned so they can
    # never enter; the needed ones get pinned after the restoration phase
    up_full[num_real:][~art_needed] = 0.0
    A_full = np.column_stack([A, np.eye(m), np.diag(diag)])
    binv = np.diag(1.0 / diag)

    st = _State(A_full, b, lo_full, up_full, basis, status, binv,
                feas_tol=feas_tol, opt_tol=opt_tol,
                maxiter=maxiter or max(5000, 200 * (m + n)))

    cost1 = np.zeros(total)
    cost1[num_real:] = art_needed.astype(float)
    if art_needed.any():
        outcome = _run(st, cost1, allow_unbounded=False)
        if outcome != OPTIMAL:
            raise SimplexError("phase one terminated abnormally")
        if st.objective(cost1) > feas_tol * (1.0 + abs(b).max(initial=0.0)):
            return LpResult(INFEASIBLE, None, None, st.iterations)

    # pin artificials at zero so they can never re-enter with value
    st.lo[num_real:] = 0.0
    st.up[num_real:] = 0.0

    cost2 = np.zeros(total)
    cost2[:n] = c
    outcome = _run(st, cost2, allow_unbounded=True)
    if outcome == UNBOUNDED:
        return LpResult(UNBOUNDED, None, None, st.iterations)

    x_full = st.solution()
    x = x_full[:n]
    _verify_primal(A, senses, b, x, lo, up, feas_tol)
    return LpResult(OPTIMAL, x, float(c @ x), st.iterations)


class _State:
    def __init__(self, A, b, lo, up, basis, status, binv, *, feas_tol, opt_tol, maxiter):
        self.A = A
        self.b = b
        self.lo = lo
        self.up = up
        self.basis = basis
        self.status = status
        self.binv = binv
        self.feas_tol = feas_tol
        self.opt_tol = opt_tol
        self.maxiter = maxiter
        self.iterations = 0
        self.since_refactor = 0

    def nonbasic_values(self) -> np.ndarray:
        v = np.zeros(self.A.shape[1])
        at_lo = self.status == _AT_LOWER
        at_up = self.status == _AT_UPPER
        v[at_lo] = self.lo[at_lo]
        v[at_up] = self.up[at_up]
        return v

    def solution(self) -> np.ndarray:
        v = self.nonbasic_values()
        xb = self.binv @ (self.b - self.A @ v)
        v[self.basis] = xb
        return v

    def objective(self, cost) -> float:
        return float(cost @ self.solution())

    def refactor(self) -> None:
        try:
            self.binv = np.linalg.inv(self.A[:, self.basis])
        except np.linalg.LinAlgError as exc:
            raise SimplexError(
                f"singular basis at iteration {self.iterations}: {sorted(self.basis)}"
            ) from exc
        self.since_refactor = 0


def _run(st: _State, cost, allow_unbounded: bool) -> str:
    bland = False
    degenerate_streak = 0

    while True:
        if st.iterations >= st.maxiter:
            raise SimplexError(f"iteration limit {st.maxiter} exceeded")
        st.iterations += 1
        if st.since_refactor >= _REFACTOR_EVERY:
            st.refactor()

        v = st.nonbasic_values()
        xb = st.binv @ (st.b - st.A @ v)
        duals = cost[st.basis] @ st.binv
        reduced = cost - duals @ st.A

        q, direction = _choose_entering(st, reduced, bland)
        if q is None:
            return OPTIMAL

        w = st.binv @ st.A[:, q]
        step, leave_pos, flip = _ratio_test(st, xb, w, q, direction, bland)

        if step is None:
            if allow_unbounded:
                return UNBOUNDED
            raise SimplexError(
                f"unbounded ray in restoration phase, column {q}, direction {direction}"
            )

        if step <= st.feas_tol:
            degenerate_streak += 1
            if degenerate_streak >= _DEGENERATE_STREAK:
                bland = True
        else:
            degenerate_streak = 0
            bland = False

        if flip:
            st.status[q] = _AT_UPPER if st.status[q] == _AT_LOWER else _AT_LOWER
            continue

        pivot = w[leave_pos]
        if abs(pivot) < 1e-9:
            st.refactor()
            w = st.binv @ st.A[:, q]
            pivot = w[leave_pos]
            if abs(pivot) < 1e-9:
                raise SimplexError(
                    f"pivot {pivot:.3e} too small at iteration {st.iterations}, "
                    f"entering column {q}, leaving row {leave_pos}"
                )

        leaving = st.basis[leave_pos]
        rate = direction * w[leave_pos]
        st.status[leaving] = _AT_LOWER if rate > 0 else _AT_UPPER
        st.status[q] = _BASIC
        st.basis[leave_pos] = q

        row = st.binv[leave_pos, :] / pivot
        st.binv -= np.outer(w, row)
        st.binv[leave_pos, :] = row
        st.since_refactor += 1


def _choose_entering(st: _State, reduced, bland: bool):
    fixed = st.lo == st.up
    can_up = (st.status == _AT_LOWER) | (st.status == _FREE)
    can_dn = (st.status == _AT_UPPER) | (st.status == _FREE)
    improving_up = can_up & ~fixed & (reduced < -st.opt_tol)
    improving_dn = can_dn & ~fixed & (reduced > st.opt_tol)
    candidates = np.flatnonzero(improving_up | improving_dn)
    if candidates.size == 0:
        return None, 0
    if bland:
        q = int(candidates[0])
    else:
        q = int(candidates[np.argmax(np.abs(reduced[candidates]))])
    return q, (1 if improving_up[q] else -1)


def _ratio_test(st: _State, xb, w, q: int, direction: int, bland: bool):
    """Largest step for the entering column; returns (step, leaving_pos, flip)."""
    rates = direction * w                      # decrease rate of each basic var
    lo_b = st.lo[st.basis]
    up_b = st.up[st.basis]

    limits = np.full(xb.shape, np.inf)
    down = rates > 1e-10
    up_ = rates < -1e-10
    with np.errstate(invalid="ignore", divide="ignore"):
        lim_down = (xb - lo_b) / rates
        lim_up = (xb - up_b) / rates
    limits[down & np.isfinite(lo_b)] = lim_down[down & np.isfinite(lo_b)]
    limits[up_ & np.isfinite(up_b)] = lim_up[up_ & np.isfinite(up_b)]
    limits = np.maximum(limits, 0.0)           # tolerate tiny bound violations

    flip_limit = st.up[q] - st.lo[q]           # inf unless both bounds finite

    min_limit = limits.min(initial=np.inf)
    if not np.isfinite(min_limit) and not np.isfinite(flip_limit):
        return None, None, False
    if flip_limit <= min_limit:
        return float(flip_limit), None, True

    near = np.flatnonzero(limits <= min_limit + 1e-9 * (1.0 + min_limit))
    if bland:
        leave_pos = int(near[np.argmin(st.basis[near])])
    else:
        best = near[np.abs(w[near]) == np.abs(w[near]).max()]
        leave_pos = int(best[np.argmin(st.basis[best])])
    return float(limits[leave_pos]), leave_pos, False


def _verify_primal(A, senses, b, x, lo, up, feas_tol: float) -> None:
    scale = 1.0 + max(abs(b).max(initial=0.0), abs(x).max(initial=0.0))
    tol = feas_tol * scale * 10.0
    if np.any(x < lo - tol) or np.any(x > up + tol):
        j = int(np.argmax(np.maximum(lo - x, x - up)))
        raise SimplexError(f"column {j} outside bounds after optimization: {x[j]}")
    if A.shape[0]:
        lhs = A @ x
        for i, s in enumerate(senses):
            bad = (
                (s == "<=" and lhs[i] > b[i] + tol)
                or (s == ">=" and lhs[i] < b[i] - tol)
                or (s == "=" and abs(lhs[i] - b[i]) > tol)
            )
            if bad:
                raise SimplexError(f"row {i} violated after optimization: {lhs[i]} {s} {b[i]}")
