"""Core data model: billing cycles, schedules, and cost accounting.

A billing cycle is a horizon of ``T`` hourly slots.  Energy drawn from the
grid is billed by volume (spot price per unit, per slot) plus a peak charge
proportional to the single largest per-slot grid draw over the cycle.
Local generation costs a flat unit rate and is capped per slot by the
generator capacity; slow generators additionally carry a ramp limit on the
slot-to-slot change of their output.

Money amounts and ratios are plain floats; equality assertions throughout
the package use the absolute tolerance :data:`MONEY_TOL`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StructuralError, UndefinedRatioError, ValidationError

#: Absolute tolerance for money / ratio equality comparisons.
MONEY_TOL = 1e-9


def _readonly_vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise StructuralError(f"{name} must be a one-dimensional sequence")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Trace:
    """Per-slot grid prices and energy demands for one billing cycle.

    Prices must be strictly positive; demands non-negative.  Both vectors
    share the same length ``T >= 1``.  Instances are immutable and safe to
    share across threads.
    """

    prices: np.ndarray
    demands: np.ndarray

    def __post_init__(self):
        prices = _readonly_vector(self.prices, "prices")
        demands = _readonly_vector(self.demands, "demands")
        if len(prices) != len(demands):
            raise StructuralError(
                f"prices ({len(prices)} slots) and demands ({len(demands)} slots) differ in length"
            )
        if len(prices) == 0:
            raise ValidationError("empty trace: the peak charge needs at least one slot")
        bad = np.flatnonzero(prices <= 0)
        if bad.size:
            raise ValidationError(f"price at slot {bad[0]} is {prices[bad[0]]}; prices must be > 0")
        bad = np.flatnonzero(demands < 0)
        if bad.size:
            raise ValidationError(f"demand at slot {bad[0]} is {demands[bad[0]]}; demands must be >= 0")
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "demands", demands)

    def __len__(self) -> int:
        return len(self.prices)

    @property
    def horizon(self) -> int:
        return len(self.prices)

    @property
    def min_price(self) -> float:
        return float(self.prices.min())

    @property
    def max_price(self) -> float:
        return float(self.prices.max())

    @property
    def max_demand(self) -> float:
        return float(self.demands.max())

    def has_integer_demands(self) -> bool:
        return bool(np.all(self.demands == np.rint(self.demands)))

    def has_binary_demands(self) -> bool:
        return bool(np.all((self.demands == 0) | (self.demands == 1)))


@dataclass(frozen=True)
class BillingParams:
    """Billing and generator parameters paired with traces.

    ``p_g`` is the local generation unit cost, ``p_m`` the peak price,
    ``capacity`` the per-slot generator limit, and ``ramp`` the optional
    bound on ``|u(t) - u(t-1)|`` (with an implicit pre-cycle output of 0).

    ``p_g >= max price`` is a pairing-time assumption, checked by
    :func:`check_pairing` rather than here, because one parameter set is
    commonly swept against many traces.
    """

    p_g: float
    p_m: float
    capacity: float
    ramp: float | None = None

    def __post_init__(self):
        if self.p_g <= 0:
            raise ValidationError(f"generation cost p_g must be > 0, got {self.p_g}")
        if self.p_m <= 0:
            raise ValidationError(f"peak price p_m must be > 0, got {self.p_m}")
        if self.capacity < 1:
            raise ValidationError(f"capacity must be >= 1, got {self.capacity}")
        if self.ramp is not None and self.ramp < 0:
            raise ValidationError(f"ramp limit must be >= 0, got {self.ramp}")


def check_pairing(trace: Trace, params: BillingParams) -> None:
    """Validate the modeling assumption p_g >= p(t) for every slot."""
    if trace.max_price > params.p_g:
        raise ValidationError(
            f"max grid price {trace.max_price} exceeds generation cost {params.p_g}; "
            "pair this trace with a larger p_g"
        )


@dataclass(frozen=True, eq=False)
class Schedule:
    """Per-slot generator output ``u`` and grid purchase ``v``.

    Construction checks only non-negativity and shape; demand satisfaction,
    capacity, and ramp feasibility depend on a trace and parameters and are
    checked by :func:`validate_schedule` (invoked by :func:`cost_of`).
    """

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        u = _readonly_vector(self.u, "u")
        v = _readonly_vector(self.v, "v")
        if len(u) != len(v):
            raise StructuralError(f"u ({len(u)} slots) and v ({len(v)} slots) differ in length")
        bad = np.flatnonzero(u < 0)
        if bad.size:
            raise ValidationError(f"generator output at slot {bad[0]} is {u[bad[0]]}; must be >= 0")
        bad = np.flatnonzero(v < 0)
        if bad.size:
            raise ValidationError(f"grid purchase at slot {bad[0]} is {v[bad[0]]}; must be >= 0")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    def __len__(self) -> int:
        return len(self.u)


def validate_schedule(schedule: Schedule, trace: Trace, params: BillingParams) -> None:
    """Check demand satisfaction, capacity, and (when set) the ramp limit.

    Raises :class:`StructuralError` on length mismatch and
    :class:`ValidationError` naming the first offending slot otherwise.
    """
    if len(schedule) != len(trace):
        raise StructuralError(
            f"schedule has {len(schedule)} slots but trace has {len(trace)}"
        )
    u, v, d = schedule.u, schedule.v, trace.demands
    short = np.flatnonzero(u + v < d - MONEY_TOL)
    if short.size:
        t = short[0]
        raise ValidationError(
            f"demand not met at slot {t}: u+v = {u[t] + v[t]} < d = {d[t]}"
        )
    over = np.flatnonzero(u > params.capacity + MONEY_TOL)
    if over.size:
        t = over[0]
        raise ValidationError(
            f"generator output {u[t]} at slot {t} exceeds capacity {params.capacity}"
        )
    if params.ramp is not None:
        steps = np.abs(np.diff(np.concatenate(([0.0], u))))
        bad = np.flatnonzero(steps > params.ramp + MONEY_TOL)
        if bad.size:
            t = bad[0]
            raise ValidationError(
                f"ramp violation at slot {t}: output change {steps[t]} exceeds limit {params.ramp}"
            )


@dataclass(frozen=True)
class CostBreakdown:
    """Volume, peak, and local components of a schedule's cost."""

    volume: float
    peak: float
    local: float

    @property
    def total(self) -> float:
        return self.volume + self.peak + self.local


def cost_of(schedule: Schedule, trace: Trace, params: BillingParams) -> CostBreakdown:
    """Total operating cost of a schedule over the billing cycle.

    volume = sum_t p(t) v(t), peak = p_m * max_t v(t), local = sum_t p_g u(t).
    """
    validate_schedule(schedule, trace, params)
    volume = float(trace.prices @ schedule.v)
    peak = params.p_m * float(schedule.v.max())
    local = params.p_g * float(schedule.u.sum())
    return CostBreakdown(volume=volume, peak=peak, local=local)


def sigma(trace: Trace, params: BillingParams) -> float:
    """Critical peak-demand threshold of an instance.

    The total premium of serving all demand locally instead of from the
    grid, measured in units of the peak price:
    ``(1 / p_m) * sum_t (p_g - p(t)) d(t)``.  A value above 1 means the
    all-grid schedule is offline-optimal for binary demand.
    """
    check_pairing(trace, params)
    return float((params.p_g - trace.prices) @ trace.demands) / params.p_m


def beta(trace: Trace, params: BillingParams) -> float:
    """Ratio of the minimum grid price to the local generation cost, in (0, 1]."""
    check_pairing(trace, params)
    if trace.min_price <= 0:
        raise ValidationError(f"minimum price {trace.min_price} must be > 0")
    return trace.min_price / params.p_g


def cost_reduction(alg_total: float, trace: Trace, params: BillingParams) -> float:
    """Relative saving of a schedule against buying everything from the grid.

    The benchmark is the no-generator cost ``sum p(t) d(t) + p_m max d(t)``.
    Negative values mean the schedule cost more than not generating at all.
    """
    if alg_total < 0:
        raise ValidationError(f"algorithm cost must be >= 0, got {alg_total}")
    baseline = float(trace.prices @ trace.demands) + params.p_m * trace.max_demand
    if baseline == 0:
        raise UndefinedRatioError("all-zero demand: the no-generator baseline is 0")
    return 1.0 - alg_total / baseline
