"""Exact offline-optimal schedules.

Three oracles, all hindsight-optimal for their stated instance class:

* :func:`optimal_basic` -- closed-form rule for 0/1 demand: everything from
  the grid when the premium mass ``sigma`` exceeds 1, everything local
  otherwise.
* :func:`optimal_general` -- integer (or fractional) demand with a capacity
  limit, by enumerating the peak cap over the demand-value breakpoints.
* :func:`optimal_with_ramp` -- integer demand under a ramp limit, by an
  exact dynamic program over integer generator output levels, nested in the
  peak-cap enumeration.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InfeasibleError
from .model import BillingParams, Schedule, Trace, check_pairing, cost_of, sigma


@dataclass(frozen=True)
class OracleResult:
    """An optimal schedule, its total cost, and the peak cap it was found at."""

    schedule: Schedule
    total: float
    peak_level: float


def _require_no_ramp(params: BillingParams, op: str) -> None:
    if params.ramp is not None:
        raise DomainError(f"{op} ignores ramp limits; use optimal_with_ramp for ramp-constrained instances")


def optimal_basic(trace: Trace, params: BillingParams) -> OracleResult:
    """Offline optimum for 0/1 demand without ramp constraints.

    If sigma > 1 the grid serves every slot; otherwise the generator does.
    The tie sigma = 1 resolves to all-local, matching the strict inequality
    in the grid rule.
    """
    _require_no_ramp(params, "optimal_basic")
    if not trace.has_binary_demands():
        raise DomainError("optimal_basic requires 0/1 demands; use optimal_general instead")
    check_pairing(trace, params)
    d = trace.demands
    if sigma(trace, params) > 1:
        schedule = Schedule(u=np.zeros_like(d), v=d)
        peak_level = trace.max_demand
    else:
        schedule = Schedule(u=d, v=np.zeros_like(d))
        peak_level = 0.0
    total = cost_of(schedule, trace, params).total
    return OracleResult(schedule=schedule, total=total, peak_level=peak_level)


def _peak_cap_schedule(trace: Trace, cap: float) -> Schedule:
    # Grid up to the cap, generator for the rest; optimal for a fixed cap
    # because the grid is never dearer than local generation.
    v = np.minimum(trace.demands, cap)
    return Schedule(u=trace.demands - v, v=v)


def optimal_general(trace: Trace, params: BillingParams) -> OracleResult:
    """Offline optimum for capacitated instances without ramp constraints.

    The cost under a peak cap ``m`` (grid serves ``min(d(t), m)`` per slot)
    is piecewise linear in ``m`` with breakpoints only at demand values, so
    scanning the distinct demand values plus the feasibility floor
    ``max(0, max d - C)`` finds the exact optimum.  Ties go to the smaller
    cap.
    """
    _require_no_ramp(params, "optimal_general")
    check_pairing(trace, params)
    floor = max(0.0, trace.max_demand - params.capacity)
    candidates = {floor, 0.0} | {float(x) for x in trace.demands}
    candidates = sorted(m for m in candidates if m >= floor)
    assert candidates, "feasibility floor always qualifies"
    best: tuple[float, float, Schedule] | None = None
    for m in candidates:
        schedule = _peak_cap_schedule(trace, m)
        total = cost_of(schedule, trace, params).total
        if best is None or (total, m) < (best[0], best[1]):
            best = (total, m, schedule)
    total, m, schedule = best
    return OracleResult(schedule=schedule, total=total, peak_level=m)


def _integer_valued(x: float) -> bool:
    return x == int(x)


def optimal_with_ramp(trace: Trace, params: BillingParams) -> OracleResult:
    """Offline optimum over integer schedules under a ramp limit.

    For each integer peak cap ``m`` the inner dynamic program scans integer
    output levels ``u(t)`` in ``[max(0, d(t) - m), C]`` with transitions
    bounded by the ramp limit and a pre-cycle level of 0.  Output above the
    slot demand is allowed: wasting generation in a valley can be the only
    way to reach a high output in time for the next spike, and is sometimes
    strictly cheaper than buying the spike from the grid.

    Cost per stage is ``p(t) max(0, d(t) - u) + p_g u``; the cap's peak
    charge is settled by re-costing the reconstructed schedule, and the best
    (total, cap) pair over all caps is returned.
    """
    if params.ramp is None:
        raise DomainError("optimal_with_ramp requires a ramp limit; use optimal_general otherwise")
    if not trace.has_integer_demands():
        raise DomainError("optimal_with_ramp requires integer demands")
    if not _integer_valued(params.capacity) or not _integer_valued(params.ramp):
        raise DomainError("optimal_with_ramp requires integer capacity and ramp values")
    check_pairing(trace, params)

    d = trace.demands.astype(int)
    p = trace.prices
    T = len(d)
    cap_max = int(params.capacity)
    ramp = int(params.ramp)
    max_d = int(d.max())
    floor = max(0, max_d - cap_max)

    best: tuple[float, int, Schedule] | None = None
    for m in range(floor, max_d + 1):
        lows = np.maximum(0, d - m)
        if np.any(lows > cap_max):
            continue  # cap unreachable within capacity at some slot
        # cost_to[s] = cheapest volume+local cost of reaching output s at the
        # current slot; parent[t][s] = chosen predecessor level.
        levels = cap_max + 1
        INF = float("inf")
        cost_to = [INF] * levels
        for s in range(lows[0], min(cap_max, ramp) + 1):
            cost_to[s] = p[0] * max(0, d[0] - s) + params.p_g * s
        parents: list[list[int]] = []
        for t in range(1, T):
            stage = [p[t] * max(0, d[t] - s) + params.p_g * s for s in range(levels)]
            nxt = [INF] * levels
            par = [-1] * levels
            for s in range(lows[t], levels):
                lo, hi = max(0, s - ramp), min(cap_max, s + ramp)
                for prev in range(lo, hi + 1):
                    c = cost_to[prev]
                    if c < nxt[s]:
                        nxt[s] = c
                        par[s] = prev
                if nxt[s] < INF:
                    nxt[s] += stage[s]
            cost_to = nxt
            parents.append(par)
        end = int(np.argmin(cost_to))
        if cost_to[end] == INF:
            continue  # no ramp-feasible path under this cap
        u = [0] * T
        u[T - 1] = end
        for t in range(T - 2, -1, -1):
            u[t] = parents[t][u[t + 1]]
        u_arr = np.array(u, dtype=float)
        v_arr = np.maximum(0.0, d - u_arr)
        schedule = Schedule(u=u_arr, v=v_arr)
        total = cost_of(schedule, trace, params).total
        if best is None or (total, m) < (best[0], best[1]):
            best = (total, m, schedule)
    if best is None:
        # Unreachable in practice: the all-zero output path is feasible at
        # the cap m = max d.  Kept as a guard for future state-space edits.
        raise InfeasibleError("no ramp-feasible schedule exists at any peak cap")
    total, m, schedule = best
    return OracleResult(schedule=schedule, total=total, peak_level=float(m))
