"""
Term sheets and classical payoff evaluation for autocallables and TARFs.

An autocallable is a strip of sequential binary options: the first strike
breach pays its coupon and knocks out everything after it, including the
short knock-in put that otherwise settles at the final date.  A TARF
(target accrual redemption forward) is a strip of conditional forwards
with a knock-out barrier and a cumulative-gain cap.

Payoffs are evaluated on observed paths: cumulative simple returns for
autocallables, prices at payment dates for TARFs.  Discounted payoffs are
mapped to [0, 1] through contract-level bounds (f_min, f_max) so the same
normalization the quantum estimators assume can be checked classically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PayoffBounds:
    """Range [f_min, f_max] containing every discounted payoff."""

    f_min: float
    f_max: float

    def __post_init__(self):
        if not self.f_max > self.f_min:
            raise ValueError("f_max must exceed f_min")

    @property
    def f_delta(self) -> float:
        return self.f_max - self.f_min


def normalize(f: float, bounds: PayoffBounds) -> float:
    """Map a discounted payoff to [0, 1] via (f - f_min) / f_delta."""
    if f < bounds.f_min - 1e-9 or f > bounds.f_max + 1e-9:
        raise ValueError(
            f"payoff {f} outside declared bounds [{bounds.f_min}, {bounds.f_max}]"
        )
    return (f - bounds.f_min) / bounds.f_delta


def denormalize(x: float, bounds: PayoffBounds) -> float:
    """Inverse of :func:`normalize`: f_delta * x + f_min."""
    return bounds.f_delta * x + bounds.f_min


def discount_and_sum(payoffs, r: float) -> float:
    """Present value sum(e^{-r t_i} f_i) of dated payoffs.

    Parameters
    ----------
    payoffs : iterable of (time, payoff)
    r : float
        Continuously compounded discount rate.
    """
    total = 0.0
    for t, f in payoffs:
        if t < 0:
            raise ValueError("payment times must be nonnegative")
        total += math.exp(-r * t) * f
    return total


@dataclass(frozen=True)
class AutocallableSpec:
    """Autocallable term sheet.

    Parameters
    ----------
    binaries : tuple of (strike_return, time, payout)
        Sequential binary options sorted by time; the first one whose
        cumulative return reaches its strike pays and ends the contract.
    k_put : float
        Put strike on cumulative return.
    barrier : float
        Knock-in barrier on cumulative return; the put is live only if
        some barrier-date observation falls below it.
    notional : float
        Multiplier on the put payoff k * (R_T - k_put).
    barrier_dates : tuple of float
        Observation times for the knock-in barrier; the last one is the
        contract horizon at which the put settles.
    basket : str
        For d > 1 underlyings: "worst_of" (default) or "best_of"
        reduction of per-asset cumulative returns before evaluation.
    """

    binaries: tuple[tuple[float, float, float], ...]
    k_put: float
    barrier: float
    notional: float
    barrier_dates: tuple[float, ...]
    basket: str = "worst_of"

    def __post_init__(self):
        object.__setattr__(
            self,
            "binaries",
            tuple((float(K), float(t), float(p)) for K, t, p in self.binaries),
        )
        object.__setattr__(
            self, "barrier_dates", tuple(float(t) for t in self.barrier_dates)
        )
        times = [t for _, t, _ in self.binaries]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise ValueError("binary payment times must be strictly increasing")
        if any(p < 0 for _, _, p in self.binaries):
            raise ValueError("binary payouts must be nonnegative")
        if any(K <= 0 for K, _, _ in self.binaries):
            raise ValueError("binary strikes must be positive")
        if not 0 < self.barrier <= self.k_put:
            raise ValueError("need 0 < barrier <= k_put")
        if self.notional <= 0:
            raise ValueError("notional must be positive")
        if not self.barrier_dates:
            raise ValueError("need at least one barrier date")
        bt = self.barrier_dates
        if any(t2 <= t1 for t1, t2 in zip(bt, bt[1:])):
            raise ValueError("barrier dates must be strictly increasing")
        if self.basket not in ("worst_of", "best_of"):
            raise ValueError("basket must be 'worst_of' or 'best_of'")

    @property
    def observation_dates(self) -> tuple[float, ...]:
        """Union of binary payment dates and barrier dates, sorted."""
        return tuple(sorted({t for _, t, _ in self.binaries} | set(self.barrier_dates)))

    @property
    def horizon(self) -> float:
        return max(self.barrier_dates[-1], self.binaries[-1][1])

    @classmethod
    def from_dict(cls, doc: dict) -> "AutocallableSpec":
        return cls(
            binaries=tuple(tuple(b) for b in doc["binaries"]),
            k_put=float(doc["k_put"]),
            barrier=float(doc["barrier"]),
            notional=float(doc["notional"]),
            barrier_dates=tuple(doc["barrier_dates"]),
            basket=doc.get("basket", "worst_of"),
        )


@dataclass(frozen=True)
class TARFSpec:
    """Target accrual redemption forward term sheet.

    Parameters
    ----------
    forward : float
        Forward price F.
    payment_times : tuple of float
        Settlement dates, strictly increasing.
    k_upper, k_lower : float
        No-payment band: dates with k_lower <= S <= k_upper pay zero;
        above the band pays S - F, below pays alpha * (S - F).
    barrier : float
        Knock-out price; an observation at or above it ends the contract
        with no payment for that date.
    alpha : float
        Loss multiplier applied below the band.
    cap : float
        Cumulative-gain cap C; the payment that would push the running
        total past C is clipped to hit C exactly and ends the contract.
    """

    forward: float
    payment_times: tuple[float, ...]
    k_upper: float
    k_lower: float
    barrier: float
    alpha: float
    cap: float

    def __post_init__(self):
        object.__setattr__(
            self, "payment_times", tuple(float(t) for t in self.payment_times)
        )
        if not self.payment_times:
            raise ValueError("need at least one payment date")
        ts = self.payment_times
        if any(t2 <= t1 for t1, t2 in zip(ts, ts[1:])):
            raise ValueError("payment times must be strictly increasing")
        if not (self.k_lower <= self.forward <= self.k_upper < self.barrier):
            raise ValueError("need k_lower <= forward <= k_upper < barrier")
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.cap <= 0:
            raise ValueError("cap must be positive")

    @property
    def n_dates(self) -> int:
        return len(self.payment_times)

    @classmethod
    def from_dict(cls, doc: dict) -> "TARFSpec":
        return cls(
            forward=float(doc["forward"]),
            payment_times=tuple(doc["payment_times"]),
            k_upper=float(doc["k_upper"]),
            k_lower=float(doc["k_lower"]),
            barrier=float(doc["barrier"]),
            alpha=float(doc["alpha"]),
            cap=float(doc["cap"]),
        )


@dataclass(frozen=True)
class EuropeanCallSpec:
    """Vanilla European call, used as an analytically priced sanity check."""

    strike: float
    expiry: float

    def __post_init__(self):
        if self.strike <= 0 or self.expiry <= 0:
            raise ValueError("strike and expiry must be positive")


def contract_from_dict(doc: dict):
    """Dispatch a contract JSON document on its "type" key."""
    kind = doc.get("type")
    if kind == "autocallable":
        return AutocallableSpec.from_dict(doc)
    if kind == "tarf":
        return TARFSpec.from_dict(doc)
    if kind == "european_call":
        return EuropeanCallSpec(strike=float(doc["strike"]), expiry=float(doc["expiry"]))
    raise ValueError(f"unknown contract type: {kind!r}")


def contract_from_json(text: str):
    return contract_from_dict(json.loads(text))


def _reduce_basket(values: np.ndarray, basket: str) -> np.ndarray:
    """Collapse a trailing asset axis to worst-of or best-of."""
    if values.ndim == 1:
        return values
    return values.min(axis=-1) if basket == "worst_of" else values.max(axis=-1)


def autocall_payoff(times, cum_returns, spec: AutocallableSpec):
    """Evaluate an autocallable on one observed cumulative-return path.

    Parameters
    ----------
    times : array_like, shape (m,)
        Observation dates; must cover all binary and barrier dates.
    cum_returns : array_like, shape (m,) or (m, d)
        Cumulative simple return R_c at each date (per asset when d > 1;
        reduced per ``spec.basket`` before evaluation).
    spec : AutocallableSpec

    Returns
    -------
    list of (time, undiscounted payoff)
        At most one entry: either a binary coupon or the put settlement
        (possibly negative).  Empty when nothing pays.
    """
    times = np.asarray(times, dtype=float)
    values = _reduce_basket(np.asarray(cum_returns, dtype=float), spec.basket)
    lookup = {}
    for t, v in zip(times, values):
        lookup[float(t)] = float(v)

    def at(t: float) -> float:
        if t not in lookup:
            raise ValueError(f"path is missing observation date {t}")
        return lookup[t]

    for strike, t, payout in spec.binaries:
        if at(t) >= strike:
            return [(t, payout)]

    knocked_in = any(at(t) < spec.barrier for t in spec.barrier_dates)
    final_t = spec.horizon
    final_r = at(final_t)
    if knocked_in and final_r < spec.k_put:
        return [(final_t, spec.notional * (final_r - spec.k_put))]
    return []


def tarf_payoff(prices, spec: TARFSpec):
    """Evaluate a TARF on prices observed at the payment dates.

    Returns
    -------
    list of (time, undiscounted payoff)
        One entry per settled date, in order; the list stops at a
        knock-out or once the cap is reached.
    """
    prices = np.asarray(prices, dtype=float)
    if prices.shape[0] != spec.n_dates:
        raise ValueError(
            f"expected {spec.n_dates} price observations, got {prices.shape[0]}"
        )
    out = []
    total = 0.0
    for t, s in zip(spec.payment_times, prices):
        s = float(s)
        if s >= spec.barrier:
            break
        if s > spec.k_upper:
            f = s - spec.forward
        elif s < spec.k_lower:
            f = spec.alpha * (s - spec.forward)
        else:
            f = 0.0
        if total + f >= spec.cap:
            out.append((t, spec.cap - total))
            break
        total += f
        out.append((t, f))
    return out


def payoff_bounds(spec, r: float) -> PayoffBounds:
    """Discounted payoff bounds (f_min, f_max) for a contract at rate r.

    Autocallable: the best outcome is the single largest discounted
    coupon; the worst is the put settling with the return at zero.

    TARF: the best outcome accrues gains at the per-date maximum
    (barrier - forward, approached from below) until the cap binds, with
    a fractional final payment; the worst pays the loss floor
    alpha * forward on every date (a loose but safe bound, since the
    contract cannot lose more than alpha * F per date).
    """
    if isinstance(spec, AutocallableSpec):
        f_max = max(math.exp(-r * t) * p for _, t, p in spec.binaries)
        f_min = -math.exp(-r * spec.horizon) * spec.notional * spec.k_put
        return PayoffBounds(f_min=f_min, f_max=f_max)
    if isinstance(spec, TARFSpec):
        gain_step = spec.barrier - spec.forward
        f_max = 0.0
        accrued = 0.0
        for t in spec.payment_times:
            step = min(gain_step, spec.cap - accrued)
            f_max += math.exp(-r * t) * step
            accrued += step
            if accrued >= spec.cap:
                break
        loss_step = spec.alpha * spec.forward
        f_min = -sum(math.exp(-r * t) * loss_step for t in spec.payment_times)
        return PayoffBounds(f_min=f_min, f_max=f_max)
    raise TypeError(f"no payoff bounds for contract type {type(spec).__name__}")


def autocall_payoff_batch(
    times, cum_returns: np.ndarray, spec: AutocallableSpec, r: float
) -> np.ndarray:
    """Discounted autocallable payoffs for a batch of paths.

    Parameters
    ----------
    times : array_like, shape (m,)
        Observation dates shared by all paths.
    cum_returns : np.ndarray, shape (batch, m) or (batch, m, d)
    r : float
        Discount rate.

    Returns
    -------
    np.ndarray, shape (batch,)
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(cum_returns, dtype=float)
    if values.ndim == 3:
        values = _reduce_basket(values, spec.basket)
    index = {float(t): i for i, t in enumerate(times)}

    def col(t: float) -> np.ndarray:
        if t not in index:
            raise ValueError(f"path is missing observation date {t}")
        return values[:, index[t]]

    batch = values.shape[0]
    payoff = np.zeros(batch)
    paid = np.zeros(batch, dtype=bool)
    for strike, t, payout in spec.binaries:
        hit = ~paid & (col(t) >= strike)
        payoff[hit] = math.exp(-r * t) * payout
        paid |= hit

    knocked_in = np.zeros(batch, dtype=bool)
    for t in spec.barrier_dates:
        knocked_in |= col(t) < spec.barrier
    final_t = spec.horizon
    final_r = col(final_t)
    put_live = ~paid & knocked_in & (final_r < spec.k_put)
    payoff[put_live] = (
        math.exp(-r * final_t) * spec.notional * (final_r[put_live] - spec.k_put)
    )
    return payoff


def tarf_payoff_batch(prices: np.ndarray, spec: TARFSpec, r: float) -> np.ndarray:
    """Discounted TARF payoffs for a batch of paths.

    Parameters
    ----------
    prices : np.ndarray, shape (batch, T)
        Prices at the payment dates.
    r : float
        Discount rate.

    Returns
    -------
    np.ndarray, shape (batch,)
    """
    prices = np.asarray(prices, dtype=float)
    if prices.shape[1] != spec.n_dates:
        raise ValueError(
            f"expected {spec.n_dates} price observations, got {prices.shape[1]}"
        )
    batch = prices.shape[0]
    total_paid = np.zeros(batch)
    running = np.zeros(batch)
    alive = np.ones(batch, dtype=bool)
    for i, t in enumerate(spec.payment_times):
        s = prices[:, i]
        knocked = alive & (s >= spec.barrier)
        alive &= ~knocked
        f = np.where(
            s > spec.k_upper,
            s - spec.forward,
            np.where(s < spec.k_lower, spec.alpha * (s - spec.forward), 0.0),
        )
        capped = alive & (running + f >= spec.cap)
        pay = np.where(capped, spec.cap - running, f)
        disc = math.exp(-r * t)
        total_paid[alive] += disc * pay[alive]
        running[alive & ~capped] += f[alive & ~capped]
        alive &= ~capped
        if not alive.any():
            break
    return total_paid
