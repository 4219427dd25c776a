"""Decaying step-size schedules of the power family c(k) = a / (k + k0)^gamma.

The schedule drives the averaging recursion and the error bounds need the
series sums of c(k)^2 and c(k)^3.  Those are computed as a partial sum plus
an integral-sandwich tail estimate with certified width, so callers get a
value accurate to a requested tolerance without summing astronomically many
terms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, Divergent

#: Default accuracy for the series sums.
DEFAULT_SERIES_TOL = 1e-10

_MAX_TERMS = 1 << 26


@dataclass(frozen=True)
class GainSchedule:
    """Power-family step size ``c(k) = a / (k + k0)**gamma``."""

    a: float
    k0: float
    gamma: float

    def __post_init__(self):
        if not (self.a > 0.0 and np.isfinite(self.a)):
            raise ConfigError("gain amplitude a must be positive and finite")
        if not (self.k0 >= 1.0 and np.isfinite(self.k0)):
            raise ConfigError("gain offset k0 must be at least 1")
        if not (0.0 < self.gamma <= 1.0):
            raise ConfigError("gain exponent gamma must lie in (0, 1]")


#: Default schedule used when a config does not specify one.
DEFAULT_GAIN = GainSchedule(a=1.0, k0=1.0, gamma=0.75)


@dataclass(frozen=True)
class GainFlags:
    """Which step-size assumptions a schedule satisfies.

    For the power family with gamma in (0, 1], the sum of c(k) always
    diverges, the steps always vanish, and c(k) is always comparable to
    c(k + h) for fixed h, so only square summability actually varies.
    """

    persistent: bool
    square_summable: bool
    vanishing: bool
    shift_comparable: bool

    @property
    def all_satisfied(self) -> bool:
        return (
            self.persistent
            and self.square_summable
            and self.vanishing
            and self.shift_comparable
        )


def gain_at(s: GainSchedule, k: int) -> float:
    """Step size at time ``k >= 0``."""
    if k < 0:
        raise ConfigError("time index must be nonnegative")
    return s.a / (k + s.k0) ** s.gamma


def gains(s: GainSchedule, horizon: int) -> np.ndarray:
    """Vector of step sizes c(0), ..., c(horizon - 1)."""
    if horizon < 0:
        raise ConfigError("horizon must be nonnegative")
    k = np.arange(horizon, dtype=float)
    return s.a * (k + s.k0) ** (-s.gamma)


def validate(s: GainSchedule) -> GainFlags:
    """Report which step-size assumptions ``s`` satisfies."""
    return GainFlags(
        persistent=True,
        square_summable=s.gamma > 0.5,
        vanishing=True,
        shift_comparable=True,
    )


def _tail_integral(s: GainSchedule, power: int, x: float) -> float:
    # Closed form of the tail integral of a^p (t + k0)^(-p*gamma) from x.
    exp = power * s.gamma
    return s.a**power * (x + s.k0) ** (1.0 - exp) / (exp - 1.0)


def _sum_power(s: GainSchedule, power: int, tol: float) -> float:
    """Sum of c(k)^power over all k >= 0, accurate within ``tol``.

    The term function f(k) = a^p (k + k0)^(-p*gamma) is positive, decreasing
    and convex, so the tail past a truncation K is sandwiched:

        integral(K, inf) + f(K)/2  <=  tail  <=  integral(K - 1/2, inf).

    K is grown until the sandwich is narrower than ``tol`` and the midpoint
    is used, so the result sits between the bare partial sum and the partial
    sum plus the coarse tail bound integral(K - 1, inf).
    """
    exp = power * s.gamma
    if exp <= 1.0:
        raise Divergent(
            f"sum of c(k)^{power} diverges for gamma = {s.gamma}"
        )
    if tol <= 0.0:
        raise ConfigError("series tolerance must be positive")

    # Sandwich width is about -f'(K)/8; solve for K then verify.
    guess = (exp * s.a**power / (8.0 * tol)) ** (1.0 / (exp + 1.0)) - s.k0
    k_trunc = max(64, int(np.ceil(guess)))

    def width(k: int) -> float:
        f_k = s.a**power * (k + s.k0) ** (-exp)
        lo = _tail_integral(s, power, float(k)) + 0.5 * f_k
        hi = _tail_integral(s, power, k - 0.5)
        return hi - lo

    while width(k_trunc) > tol:
        if k_trunc >= _MAX_TERMS:
            raise Divergent(
                f"series for c^{power} converges too slowly for tol={tol}"
            )
        k_trunc *= 2

    partial = 0.0
    chunk = 1 << 22
    for start in range(0, k_trunc, chunk):
        k = np.arange(start, min(start + chunk, k_trunc), dtype=float)
        partial += float(np.sum(s.a**power * (k + s.k0) ** (-exp)))

    f_k = s.a**power * (k_trunc + s.k0) ** (-exp)
    lo = _tail_integral(s, power, float(k_trunc)) + 0.5 * f_k
    hi = _tail_integral(s, power, k_trunc - 0.5)
    return partial + 0.5 * (lo + hi)


def sum_c_squared(s: GainSchedule, tol: float = DEFAULT_SERIES_TOL) -> float:
    """Sum of c(k)^2 over k >= 0; raises Divergent when gamma <= 1/2."""
    return _sum_power(s, 2, tol)


def sum_c_cubed(s: GainSchedule, tol: float = DEFAULT_SERIES_TOL) -> float:
    """Sum of c(k)^3 over k >= 0; raises Divergent when gamma <= 1/3."""
    return _sum_power(s, 3, tol)


# -- JSON interchange -------------------------------------------------------

def gain_to_dict(s: GainSchedule) -> dict:
    return {"a": s.a, "k0": s.k0, "gamma": s.gamma}


def gain_from_dict(d: dict) -> GainSchedule:
    try:
        return GainSchedule(
            a=float(d.get("a", DEFAULT_GAIN.a)),
            k0=float(d.get("k0", DEFAULT_GAIN.k0)),
            gamma=float(d.get("gamma", DEFAULT_GAIN.gamma)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed gain object: {exc}") from exc


def gain_from_json(s: str) -> GainSchedule:
    try:
        return gain_from_dict(json.loads(s))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid gain JSON: {exc}") from exc
