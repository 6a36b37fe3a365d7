"""Shared fixtures: seeded instance generators and independent brute-force
oracles used to cross-check the package's fast paths."""
from __future__ import annotations

from itertools import product

import numpy as np
import pytest

import peaksched as ps


def make_binary_instance(
    rng: np.random.Generator,
    beta: float | None = None,
    sigma_target: float | None = None,
    horizon: int | None = None,
) -> tuple[ps.Trace, ps.BillingParams]:
    """Random 0/1-demand instance with exact hardness beta and a premium
    mass steered to sigma_target by choosing the peak price."""
    T = horizon if horizon is not None else int(rng.integers(6, 40))
    p_g = 1.0
    b = float(rng.uniform(0.05, 0.95)) if beta is None else beta
    prices = rng.uniform(b * p_g, p_g, T)
    prices[int(rng.integers(0, T))] = b * p_g
    demands = (rng.random(T) < 0.7).astype(float)
    if demands.max() == 0:
        demands[int(rng.integers(0, T))] = 1.0
    trace = ps.Trace(prices=prices, demands=demands)
    premium = float((p_g - prices) @ demands)
    if sigma_target is None:
        sigma_target = float(np.exp(rng.uniform(np.log(0.05), np.log(5.0))))
    p_m = premium / sigma_target if premium > 0 else 1.0
    params = ps.BillingParams(p_g=p_g, p_m=p_m, capacity=1)
    return trace, params


def make_integer_instance(
    rng: np.random.Generator,
    max_demand: int = 5,
    horizon: int | None = None,
    capacity: float | None = None,
    sigma_target: float | None = None,
) -> tuple[ps.Trace, ps.BillingParams]:
    T = horizon if horizon is not None else int(rng.integers(6, 30))
    demands = rng.integers(0, max_demand + 1, T).astype(float)
    if demands.max() == 0:
        demands[int(rng.integers(0, T))] = 1.0
    p_g = 1.0
    b = float(rng.uniform(0.05, 0.95))
    prices = rng.uniform(b * p_g, p_g, T)
    prices[int(rng.integers(0, T))] = b * p_g
    trace = ps.Trace(prices=prices, demands=demands)
    premium = float((p_g - prices) @ demands)
    if sigma_target is None:
        sigma_target = float(np.exp(rng.uniform(np.log(0.2), np.log(3.0))))
    p_m = premium / sigma_target if premium > 0 else 1.0
    if capacity is None:
        capacity = float(demands.max())
    params = ps.BillingParams(p_g=p_g, p_m=p_m, capacity=capacity)
    return trace, params


def schedule_cost(u, v, trace: ps.Trace, params: ps.BillingParams) -> float:
    """Cost formula written out independently of the package's accounting."""
    volume = sum(p * x for p, x in zip(trace.prices, v))
    peak = params.p_m * max(v)
    local = params.p_g * sum(u)
    return volume + peak + local


def brute_force_optimum(trace: ps.Trace, params: ps.BillingParams, ramp: bool = False) -> float:
    """Enumerate every integer output sequence in {0..C}^T (ramp-filtered
    when asked), serving residual demand from the grid."""
    d = trace.demands
    cap = int(params.capacity)
    best = float("inf")
    for u in product(range(cap + 1), repeat=len(d)):
        if ramp:
            prev = 0
            ok = True
            for x in u:
                if abs(x - prev) > params.ramp:
                    ok = False
                    break
                prev = x
            if not ok:
                continue
        v = [max(0.0, di - ui) for di, ui in zip(d, u)]
        cost = schedule_cost(u, v, trace, params)
        if cost < best:
            best = cost
    return best


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.line(line)
