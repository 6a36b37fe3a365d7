"""Layer decomposition of integer demand and ramp projection.

Integer demand splits into stacked 0/1 subproblems: layer ``i`` demands one
unit at slot ``t`` exactly when ``d(t) >= i``, so the layer demands sum back
to ``d``.  Each layer runs the binary online algorithm independently; layers
indexed above the generator capacity are forced onto the grid, which keeps
the combined output within capacity by construction.

Schedules produced without ramp awareness are made ramp-feasible afterwards
by a forward clamp that walks the cycle once.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import BillingParams, Schedule, Trace, sigma
from .online import Algorithm, RunRecord, run_algorithm
from .prediction import Prediction


@dataclass(frozen=True, eq=False)
class LayerStack:
    """Binary layers of an integer-demand trace, bottom (layer 1) first."""

    layers: tuple[Trace, ...]
    depth: int


def decompose(trace: Trace) -> LayerStack:
    """Split integer demand into 0/1 layers that sum back to the original."""
    if not trace.has_integer_demands():
        raise DomainError("layer decomposition requires integer demands")
    d = trace.demands.astype(int)
    depth = int(d.max())
    layers = tuple(
        Trace(prices=trace.prices, demands=(d >= i).astype(float)) for i in range(1, depth + 1)
    )
    return LayerStack(layers=layers, depth=depth)


def _layer_seed(seed: int, layer_index: int) -> int:
    # Layer 1 keeps the root seed so a single-layer run reproduces a plain
    # run_algorithm call; higher layers get independent derived streams.
    if layer_index == 1:
        return seed
    return int(np.random.SeedSequence([seed, layer_index]).generate_state(1)[0])


def _layer_sigma_hats(sigma_hats, depth: int) -> list[float | None]:
    if sigma_hats is None or isinstance(sigma_hats, (int, float)):
        return [sigma_hats] * depth
    values = list(sigma_hats)
    if len(values) != depth:
        raise DomainError(f"got {len(values)} per-layer sigma_hat values for {depth} layers")
    return values


def true_layer_sigma_hats(trace: Trace, params: BillingParams) -> list[float]:
    """Per-layer premium masses of the true trace (a perfect predictor)."""
    return [sigma(layer, params) for layer in decompose(trace).layers]


def flipped_layer_sigma_hats(trace: Trace, params: BillingParams) -> list[float]:
    """Per-layer predictions forced onto the wrong side of the switch test."""
    return [0.0 if s > 1 else 2.0 for s in true_layer_sigma_hats(trace, params)]


def predicted_layer_sigma_hats(prediction: Prediction, params: BillingParams, depth: int) -> list[float]:
    """Per-layer premium masses of a predicted trace.

    Layer ``i`` of the prediction demands one unit where the predicted
    demand reaches ``i``; its mass uses the predicted prices.
    """
    premium = params.p_g - prediction.prices
    return [
        float(premium @ (prediction.demands >= i)) / params.p_m for i in range(1, depth + 1)
    ]


def run_layered(
    trace: Trace,
    params: BillingParams,
    algorithm: Algorithm | str,
    lam: float | None = None,
    sigma_hats=None,
    seed: int | None = None,
) -> Schedule:
    """Run a binary algorithm on every capacity-eligible layer and sum.

    ``sigma_hats`` is a scalar applied to all layers or a sequence with one
    value per layer.  Layers indexed above the capacity buy from the grid
    outright.  Per-layer randomness uses seeds derived from ``(seed,
    layer index)`` so runs are reproducible and layers independent.
    """
    algorithm = Algorithm(algorithm)
    stack = decompose(trace)
    hats = _layer_sigma_hats(sigma_hats, stack.depth)
    u = np.zeros(len(trace))
    v = np.zeros(len(trace))
    for i, (layer, hat) in enumerate(zip(stack.layers, hats), start=1):
        if i > params.capacity:
            v += layer.demands
            continue
        layer_seed = None if seed is None else _layer_seed(seed, i)
        record: RunRecord = run_algorithm(
            layer, params, algorithm, lam=lam, sigma_hat=hat, seed=layer_seed
        )
        u += record.schedule.u
        v += record.schedule.v
    return Schedule(u=u, v=v)


def project_ramp(schedule: Schedule, trace: Trace, params: BillingParams) -> Schedule:
    """Project a schedule onto the ramp-feasible set by one forward pass.

    Each output is clamped into ``[max(0, prev - R), min(C, d(t), prev +
    R)]`` starting from a pre-cycle level of 0.  When demand falls faster
    than the generator may ramp down, that interval is empty and the output
    is pinned to its ramp-feasible minimum (briefly over-generating), which
    keeps the projection feasible and idempotent.  Grid purchases are then
    raised wherever the clamped output leaves demand uncovered.
    """
    if params.ramp is None:
        raise DomainError("project_ramp needs a ramp limit in the billing parameters")
    if len(schedule) != len(trace):
        raise DomainError("schedule and trace lengths differ")
    ramp = params.ramp
    cap = params.capacity
    d = trace.demands
    u = np.empty(len(trace))
    prev = 0.0
    for t in range(len(trace)):
        lo = max(0.0, prev - ramp)
        hi = min(cap, d[t], prev + ramp)
        u[t] = max(lo, min(schedule.u[t], hi))
        prev = u[t]
    v = np.maximum(schedule.v, d - u)
    return Schedule(u=u, v=v)
