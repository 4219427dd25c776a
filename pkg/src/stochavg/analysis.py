"""A-priori variance bounds and empirical consensus metrics.

The bound pipeline turns a flow certificate plus noise envelopes and the
gain series into closed-form upper bounds on the steady-state variance of
the consensus value.  All bounds are computed a priori — nothing here
feeds simulation output back into a bound.  The empirical side extracts
the matching quantities (variance of the final centroid, running rate
functional) from completed trials so the two can be compared.

Field names ``var_bound_thm1`` and ``var_bound_thm4`` are part of the CSV
wire schema and are kept verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundOverflow,
    ConfigError,
    InsufficientTrials,
    MissingInput,
    NonFinite,
    StrideTooCoarse,
)
from .flows import FlowCertificate
from .gain import GainSchedule, gain_at, gains, sum_c_cubed, sum_c_squared

_EXP_ARG_LIMIT = 709.0  # exp() overflows float64 just above this


def _checked_exp(arg: float, label: str) -> float:
    if arg > _EXP_ARG_LIMIT:
        raise BoundOverflow(
            f"{label} exponent {arg:.6g} exceeds the representable range"
        )
    return math.exp(arg)


def _require_finite_nonneg(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise NonFinite(f"{name} must be finite, got {value!r}")
    if value < 0:
        raise ConfigError(f"{name} must be nonnegative, got {value!r}")
    return value


@dataclass(frozen=True)
class BoundInputs:
    """Scalar ingredients of the variance bounds.

    The four optional fields describe the one-shot distribution of an
    i.i.d. flow and are absent for other flow kinds.
    """

    sigma: float
    b: float
    beta: float
    rho0: float
    rho1: float
    rho2: float
    n: int
    v0: float
    x0_norm_sq: float
    c_sum: float
    c3_sum: float
    lambda2_mean: float | None = None
    l2_moment: float | None = None
    rho1_bar: float | None = None
    rho2_bar: float | None = None

    def __post_init__(self):
        for name in (
            "sigma", "b", "beta", "rho0", "rho1", "rho2",
            "v0", "x0_norm_sq", "c_sum", "c3_sum",
        ):
            object.__setattr__(
                self, name, _require_finite_nonneg(name, getattr(self, name))
            )
        object.__setattr__(self, "n", int(self.n))
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        optional = ("lambda2_mean", "l2_moment", "rho1_bar", "rho2_bar")
        present = [getattr(self, f) is not None for f in optional]
        if any(present) and not all(present):
            raise ConfigError(
                "lambda2_mean, l2_moment, rho1_bar, rho2_bar must be "
                "given together (they describe an i.i.d. flow)"
            )
        for name in optional:
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, _require_finite_nonneg(name, v))

    @property
    def has_iid_fields(self) -> bool:
        return self.rho1_bar is not None


@dataclass(frozen=True)
class BoundReport:
    """Bound decomposition; optional entries are None when not computable."""

    q_v: float
    q_x: float
    term_additive: float
    term_multiplicative: float
    term_unbalance: float
    var_bound_thm1: float
    var_bound_remark6: float | None = None
    var_bound_thm4: float | None = None
    small_gain_ok: bool | None = None
    c_tilde_bound: float | None = None


def growth_factors(inputs: BoundInputs) -> tuple[float, float]:
    """The two exponential-envelope constants (energy, then raw norm).

    The energy factor bounds the summed Lyapunov series; the raw-norm
    factor feeds the unbalance term.  The energy factor is computed first
    because the second depends on it.
    """
    c = inputs.c_sum
    beta = inputs.beta
    q_v = _checked_exp(
        c * (inputs.rho0**2 + 4.0 * inputs.rho1 * beta * inputs.sigma**2),
        "energy growth",
    ) * (inputs.v0 + 2.0 * c * beta * inputs.rho1 * inputs.b**2)
    q_x = _checked_exp(c * inputs.rho0**2, "norm growth") * (
        inputs.x0_norm_sq
        + 2.0 * c * beta * inputs.rho1 * (2.0 * inputs.sigma**2 * q_v + inputs.b**2)
    )
    for label, v in (("q_v", q_v), ("q_x", q_x)):
        if not math.isfinite(v):
            raise BoundOverflow(f"{label} overflowed to {v!r}")
    return q_v, q_x


def stationary_variance_bound(inputs: BoundInputs) -> BoundReport:
    """Three-term a-priori bound on Var(x*).

    The terms isolate, in order, the additive-noise, multiplicative-noise
    and instantaneous-unbalance contributions.  The summed-energy series
    is replaced by its certified envelope q_v * c_sum, keeping the bound
    computable without simulation.
    """
    q_v, q_x = growth_factors(inputs)
    c = inputs.c_sum
    beta = inputs.beta
    nsq = inputs.n**2
    c_tilde = q_v * c
    term_additive = 4.0 * c * beta * inputs.b**2 * inputs.rho1 / nsq
    term_multiplicative = 8.0 * c_tilde * beta * inputs.sigma**2 * inputs.rho1 / nsq
    term_unbalance = 2.0 * c * inputs.rho2 * q_x / inputs.n
    total = term_additive + term_multiplicative + term_unbalance
    if not math.isfinite(total):
        raise BoundOverflow("variance bound overflowed")
    return BoundReport(
        q_v=q_v,
        q_x=q_x,
        term_additive=term_additive,
        term_multiplicative=term_multiplicative,
        term_unbalance=term_unbalance,
        var_bound_thm1=total,
    )


def balanced_variance_bound(inputs: BoundInputs) -> float:
    """Two-term refinement for i.i.d. instantaneously balanced flows."""
    if inputs.rho1_bar is None:
        raise MissingInput(
            "one-shot mean edge load (rho1_bar) is required; "
            "it is only defined for i.i.d. flows"
        )
    q_v, _ = growth_factors(inputs)
    c = inputs.c_sum
    beta = inputs.beta
    nsq = inputs.n**2
    bound = (
        4.0 * c * beta * inputs.b**2 * inputs.rho1_bar / nsq
        + 8.0 * (q_v * c) * beta * inputs.sigma**2 * inputs.rho1_bar / nsq
    )
    if not math.isfinite(bound):
        raise BoundOverflow("variance bound overflowed")
    return bound


def small_gain_variance_bound(
    inputs: BoundInputs, c0: float
) -> tuple[bool, float | None, float | None]:
    """Sharper i.i.d. bound, valid only when the initial gain is small.

    Returns (small_gain_ok, energy series bound, variance bound); the last
    two are None when the initial gain is too large.
    """
    if not inputs.has_iid_fields:
        raise MissingInput(
            "lambda2_mean, l2_moment, rho1_bar, rho2_bar are required; "
            "they are only defined for i.i.d. flows"
        )
    c0 = _require_finite_nonneg("c0", c0)
    beta = inputs.beta
    load = inputs.l2_moment + 4.0 * inputs.sigma**2 * beta * inputs.rho1_bar
    if load <= 0.0:
        # no contraction pressure needed: only possible when the flow is
        # almost surely empty, in which case lambda2_mean is 0 as well
        small = inputs.lambda2_mean > 0.0
    else:
        small = c0 < 2.0 * inputs.lambda2_mean / load
    if not small:
        return False, None, None
    denom = 2.0 * inputs.lambda2_mean - load * c0
    c_tilde = (c0 * inputs.v0 + 2.0 * inputs.b**2 * beta * inputs.rho1_bar * inputs.c3_sum) / denom
    _, q_x = growth_factors(inputs)
    c = inputs.c_sum
    nsq = inputs.n**2
    bound = (
        4.0 * c * beta * inputs.b**2 * inputs.rho1_bar / nsq
        + 8.0 * c_tilde * beta * inputs.sigma**2 * inputs.rho1_bar / nsq
        + 2.0 * c * inputs.rho2_bar * q_x / inputs.n
    )
    if not math.isfinite(bound) or not math.isfinite(c_tilde):
        raise BoundOverflow("variance bound overflowed")
    return True, c_tilde, bound


def full_report(inputs: BoundInputs, c0: float | None = None) -> BoundReport:
    """All applicable bounds for one instance, in a single report."""
    report = stationary_variance_bound(inputs)
    remark6 = None
    thm4 = None
    small = None
    c_tilde = None
    if inputs.has_iid_fields:
        remark6 = balanced_variance_bound(inputs)
        if c0 is not None:
            small, c_tilde, thm4 = small_gain_variance_bound(inputs, c0)
    return BoundReport(
        q_v=report.q_v,
        q_x=report.q_x,
        term_additive=report.term_additive,
        term_multiplicative=report.term_multiplicative,
        term_unbalance=report.term_unbalance,
        var_bound_thm1=report.var_bound_thm1,
        var_bound_remark6=remark6,
        var_bound_thm4=thm4,
        small_gain_ok=small,
        c_tilde_bound=c_tilde,
    )


def bound_inputs(
    certificate: FlowCertificate,
    sigma: float,
    b: float,
    beta: float,
    x0,
    gain: GainSchedule,
) -> BoundInputs:
    """Assemble bound ingredients from a certificate and experiment data."""
    x0 = np.asarray(x0, dtype=float)
    if x0.ndim != 1 or x0.size == 0 or not np.all(np.isfinite(x0)):
        raise ConfigError("x0 must be a nonempty finite vector")
    dev = x0 - x0.mean()
    return BoundInputs(
        sigma=sigma,
        b=b,
        beta=beta,
        rho0=certificate.rho0,
        rho1=certificate.rho1,
        rho2=certificate.rho2,
        n=certificate.n,
        v0=float(dev @ dev),
        x0_norm_sq=float(x0 @ x0),
        c_sum=sum_c_squared(gain),
        c3_sum=sum_c_cubed(gain),
        lambda2_mean=certificate.lambda2_mean,
        l2_moment=certificate.l2_moment,
        rho1_bar=certificate.rho1_bar,
        rho2_bar=certificate.rho2_bar,
    )


def declared_envelope(intensities) -> tuple[float, float, bool]:
    """Channel-wise maxima of the declared envelope, plus certifiability.

    The flag is False when any channel uses a custom function: its
    declared envelope can be probed empirically but not proven.
    """
    fns = list(intensities)
    if not fns:
        raise ConfigError("need at least one intensity function")
    sigma = max(f.sigma for f in fns)
    b = max(f.b for f in fns)
    certifiable = all(f.is_affine_family for f in fns)
    return sigma, b, certifiable


# -- empirical side ---------------------------------------------------------

def _require_unit_stride(times: np.ndarray):
    times = np.asarray(times)
    if times.shape[0] < 2 or not np.array_equal(
        times, np.arange(times.shape[0], dtype=times.dtype)
    ):
        raise StrideTooCoarse(
            "this metric needs every step recorded (record_stride=1)"
        )


def rate_functional(trial, gain: GainSchedule) -> np.ndarray:
    """Normalized running consensus error r(n) for n = 1..horizon.

    r(n) = sqrt(c(n) * n) * (1/n) * sum_{k=0..n} ||x(k) - mean(x(k))||.
    Convergence of the protocol at the advertised rate shows up as
    r(n) -> 0; a stalled trajectory makes r(n) grow.
    """
    _require_unit_stride(trial.times)
    norms = np.sqrt(np.asarray(trial.spread, dtype=float))
    horizon = norms.shape[0] - 1
    n_vals = np.arange(1, horizon + 1, dtype=float)
    partial = np.cumsum(norms)[1:]  # sum_{k<=n} for n = 1..horizon
    c_vals = gains(gain, horizon + 1)[1:]
    return np.sqrt(c_vals * n_vals) * partial / n_vals


def empirical_c_tilde(stats, gain: GainSchedule) -> float:
    """Diagnostic: the simulated energy-weighted gain series.

    This is the quantity the certified bound replaces by q_v * c_sum; it
    is never used inside a bound, only for comparison plots.
    """
    _require_unit_stride(stats.times)
    mean_v = np.asarray(stats.mean_spread, dtype=float)
    c_vals = gains(gain, mean_v.shape[0])
    return float(np.sum(mean_v * c_vals**2))


@dataclass(frozen=True)
class XStarEstimate:
    """Sample consensus-value statistics with conservative intervals."""

    mean: float
    se_mean: float
    mean_halfwidth: float
    variance: float
    variance_halfwidth: float
    n_trials: int


def empirical_var_xstar(stats) -> XStarEstimate:
    """Mean/variance of the final centroid across trials, with 4-SE CIs."""
    finals = np.asarray(stats.final_centroids, dtype=float)
    m = finals.shape[0]
    if m < 2:
        raise InsufficientTrials(f"need at least 2 trials, got {m}")
    mean = float(finals.mean())
    se_mean = float(finals.std(ddof=1) / math.sqrt(m))
    dev_sq = (finals - mean) ** 2
    variance = float(finals.var(ddof=1))
    se_second = float(dev_sq.std(ddof=1) / math.sqrt(m))
    return XStarEstimate(
        mean=mean,
        se_mean=se_mean,
        mean_halfwidth=4.0 * se_mean,
        variance=variance,
        variance_halfwidth=4.0 * se_second,
        n_trials=m,
    )
