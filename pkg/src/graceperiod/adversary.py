"""Adversarial transaction-length models.

A model describes how long the transaction on the losing side of a conflict
still has to run.  The named distributions model the *length* ``r`` of a
transaction and are calibrated so the length mean equals the configured
``mean`` exactly (discrete and truncated kinds solve for their underlying
parameter rather than accepting the bias).  The benchmark protocol then
interrupts a drawn transaction at a uniformly random point, so the hidden
remaining time is ``r - i`` with ``i`` uniform on ``[0, r)``; see
:func:`remaining_time`.

Point-mass models peg the remaining time itself (no interrupt draw), which
is how the worst-case adversary for the deterministic strategy is built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import Stream

KINDS = ("geometric", "normal_truncated", "uniform", "exponential", "poisson", "point_mass")
DISCRETE_KINDS = frozenset({"geometric", "poisson"})

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


def _phi(z: float) -> float:
    return math.exp(-0.5 * z * z) / _SQRT2PI


def _big_phi(z: float) -> float:
    return 0.5 * math.erfc(-z / _SQRT2)


def _inv_mills(a: float) -> float:
    # phi(a)/Phi(a); erfc keeps the direct form stable down to a ~ -30,
    # beyond that use the tail expansion -a + 1/(-a) - 2/(-a)^3.
    if a > -30.0:
        return _phi(a) / _big_phi(a)
    t = -a
    return t + 1.0 / t - 2.0 / t ** 3


def _solve_truncated_normal_loc(mean: float, sigma: float) -> float:
    # E[X | X > 0] for X ~ N(loc, sigma) is loc + sigma*inv_mills(loc/sigma);
    # increasing in loc, so bisect.
    def trunc_mean(loc):
        return loc + sigma * _inv_mills(loc / sigma)

    lo = min(mean - 45.0 * sigma, -2.0 * sigma * sigma / mean - 10.0 * sigma)
    hi = mean
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if trunc_mean(mid) < mean:
            lo = mid
        else:
            hi = mid
    loc = 0.5 * (lo + hi)
    if _big_phi(loc / sigma) < 1e-2:
        raise ValueError(
            f"normal_truncated with mean {mean} and sigma {sigma} leaves under 1% "
            f"of the mass above zero; pick a smaller sigma"
        )
    return loc


def _solve_zero_truncated_poisson_rate(mean: float) -> float:
    # E[N | N >= 1] = lam / (1 - exp(-lam)), increasing, range (1, inf).
    lo, hi = 1e-12, mean
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        trunc = mid / -math.expm1(-mid)
        if trunc < mean:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class AdversaryModel:
    """A calibrated length (or pegged remaining-time) distribution."""

    kind: str
    mean: float
    sigma: float | None = None  # normal_truncated; defaults to mean/4
    value: float | None = None  # point_mass

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown adversary kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "point_mass":
            v = self.value if self.value is not None else self.mean
            if not (v > 0.0 and math.isfinite(v)):
                raise ValueError(f"point mass must be positive, got {v}")
            object.__setattr__(self, "value", float(v))
            object.__setattr__(self, "mean", float(v))
            return
        if not (self.mean > 0.0 and math.isfinite(self.mean)):
            raise ValueError(f"mean must be positive, got {self.mean}")
        if self.kind == "geometric" and self.mean < 1.0:
            raise ValueError("geometric lengths live on {1,2,...}; mean must be >= 1")
        if self.kind == "poisson" and self.mean <= 1.0:
            raise ValueError("zero-truncated poisson needs mean > 1")
        if self.kind == "normal_truncated":
            sigma = self.sigma if self.sigma is not None else self.mean / 4.0
            if not (sigma > 0.0):
                raise ValueError(f"sigma must be positive, got {sigma}")
            object.__setattr__(self, "sigma", float(sigma))

    @property
    def is_point_mass(self) -> bool:
        return self.kind == "point_mass"


def worst_case_for_det(k: int, B: float) -> AdversaryModel:
    """Point mass at the deterministic threshold ``B/(k-1)``.

    Under the tie-aborts rule this forces the deterministic strategy into
    its worst case, realizing ratio ``2 + 1/(k-1)``.
    """
    if int(k) != k or k < 2:
        raise ValueError(f"chain size k must be an integer >= 2, got {k}")
    if not (B > 0.0 and math.isfinite(B)):
        raise ValueError(f"abort cost B must be positive, got {B}")
    return AdversaryModel(kind="point_mass", mean=B / (k - 1), value=B / (k - 1))


def _sample_normal_truncated(model: AdversaryModel, stream: Stream, n: int) -> np.ndarray:
    loc = _solve_truncated_normal_loc(model.mean, model.sigma)
    out = np.empty(n)
    pending = np.arange(n)
    while pending.size:
        u1 = stream.uniform_open_batch(pending.size)
        u2 = stream.uniform_open_batch(pending.size)
        z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)
        cand = loc + model.sigma * z
        ok = cand > 0.0
        out[pending[ok]] = cand[ok]
        pending = pending[~ok]
    return out


def _sample_poisson_raw(lam: float, stream: Stream, n: int) -> np.ndarray:
    # Count exponential arrivals inside a window of size lam.
    counts = np.zeros(n, dtype=np.int64)
    pending = np.arange(n)
    acc = np.zeros(n)
    while pending.size:
        u = stream.uniform_open_batch(pending.size)
        acc[pending] += -np.log(u)
        done = acc[pending] >= lam
        counts[pending[~done]] += 1
        pending = pending[~done]
    return counts


def _sample_poisson(model: AdversaryModel, stream: Stream, n: int) -> np.ndarray:
    lam = _solve_zero_truncated_poisson_rate(model.mean)
    counts = _sample_poisson_raw(lam, stream, n)
    # zero-rejection keeps every sample positive
    while True:
        zero = np.flatnonzero(counts == 0)
        if not zero.size:
            break
        counts[zero] = _sample_poisson_raw(lam, stream, zero.size)
    return counts.astype(float)


def sample_length(model: AdversaryModel, stream: Stream, n: int | None = None):
    """Transaction length draw(s); scalar when ``n`` is None."""
    count = 1 if n is None else int(n)
    kind = model.kind
    if kind == "point_mass":
        out = np.full(count, model.value)
    elif kind == "exponential":
        out = -model.mean * np.log(stream.uniform_open_batch(count))
    elif kind == "uniform":
        out = 2.0 * model.mean * stream.uniform_open_batch(count)
    elif kind == "geometric":
        p = 1.0 / model.mean
        u = stream.uniform_open_batch(count)
        out = np.floor(np.log(u) / math.log1p(-p)) + 1.0 if p < 1.0 else np.ones(count)
    elif kind == "normal_truncated":
        out = _sample_normal_truncated(model, stream, count)
    elif kind == "poisson":
        out = _sample_poisson(model, stream, count)
    else:  # pragma: no cover
        raise AssertionError(kind)
    return float(out[0]) if n is None else out


def remaining_time(model: AdversaryModel, stream: Stream, n: int | None = None):
    """Hidden remaining time(s) of an interrupted transaction.

    Draws a length ``r`` and a uniform interrupt point ``i`` in ``[0, r)``
    and returns ``r - i`` (integer-valued for the discrete kinds).  Point
    masses return their pegged value directly.
    """
    count = 1 if n is None else int(n)
    if model.is_point_mass:
        out = np.full(count, model.value)
        return float(out[0]) if n is None else out
    r = np.atleast_1d(sample_length(model, stream, count))
    u = stream.uniform_batch(count)
    if model.kind in DISCRETE_KINDS:
        out = r - np.floor(u * r)
    else:
        out = r * (1.0 - u)
    return float(out[0]) if n is None else out
