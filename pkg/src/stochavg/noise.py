"""Measurement-noise processes and noise-intensity envelopes.

Noise lives on n^2 directed channels, flattened receiver-major: channel
``i*n + j`` carries what agent ``i`` hears about agent ``j``.  Channels for
absent edges are generated anyway and masked at consumption inside the
engine, which keeps the noise process independent of the graph process.

Every built-in model is a martingale-difference sequence by construction
and carries a certified bound ``beta`` on the conditional second moment of
the stacked noise vector.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigError, DimensionMismatch, NonFinite
from .linalg import as_matrix, frobenius_norm

AFFINE = "affine"
ADDITIVE = "additive"
MULTIPLICATIVE = "multiplicative"
CUSTOM = "custom"

IID_GAUSSIAN = "iid_gaussian"
IID_UNIFORM = "iid_uniform"
TEMPORAL = "temporally_dependent"
SPATIAL = "spatially_correlated"

#: Half-width giving a unit-variance uniform, matching the Gaussian default.
UNIFORM_UNIT_HALF_WIDTH = math.sqrt(3.0)


# -- intensity functions ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class IntensityFunction:
    """Noise intensity f applied to the relative state x_j - x_i.

    The envelope (sigma, b) certifies |f(x)| <= sigma*|x| + b.  Built-in
    forms satisfy it with equality structure by construction; custom forms
    declare it and can be spot-checked with :func:`certify_envelope`.
    """

    form: str
    sigma: float
    b: float
    func: object = None

    def __post_init__(self):
        if self.form not in (AFFINE, ADDITIVE, MULTIPLICATIVE, CUSTOM):
            raise ConfigError(f"unknown intensity form {self.form!r}")
        for name, val in (("sigma", self.sigma), ("b", self.b)):
            if not (val >= 0.0 and np.isfinite(val)):
                raise ConfigError(f"intensity {name} must be finite and >= 0")
        if self.form == CUSTOM and not callable(self.func):
            raise ConfigError("custom intensity needs a callable")

    @property
    def is_affine_family(self) -> bool:
        """True for the three built-in forms evaluable as sigma*|x| + b."""
        return self.form != CUSTOM


def affine_intensity(sigma: float, b: float) -> IntensityFunction:
    return IntensityFunction(AFFINE, float(sigma), float(b))


def additive_intensity(b: float) -> IntensityFunction:
    """Constant intensity: the link adds noise independent of the states."""
    return IntensityFunction(ADDITIVE, 0.0, float(b))


def multiplicative_intensity(sigma: float) -> IntensityFunction:
    """Intensity proportional to the state gap; vanishes at consensus."""
    return IntensityFunction(MULTIPLICATIVE, float(sigma), 0.0)


def custom_intensity(func, sigma: float, b: float) -> IntensityFunction:
    """Caller-supplied scalar intensity with a declared envelope."""
    return IntensityFunction(CUSTOM, float(sigma), float(b), func)


def evaluate_intensity(f: IntensityFunction, x: float) -> float:
    """Evaluate f at a relative state.

    Built-in forms all evaluate as sigma*|x| + b (with the respective
    parameter pinned to zero), the exact expression the compiled simulation
    path uses, so both paths agree bitwise.
    """
    if not np.isfinite(x):
        raise NonFinite("intensity argument must be finite")
    if f.is_affine_family:
        return f.sigma * abs(x) + f.b
    val = float(f.func(x))
    if not np.isfinite(val):
        raise NonFinite("custom intensity returned a non-finite value")
    return val


def certify_envelope(
    f: IntensityFunction, probes: int, probe_range: float, rng
) -> tuple[float, float, bool]:
    """Spot-check |f(x)| <= sigma*|x| + b on a grid plus random probes.

    Returns the declared envelope and whether every probe respected it.
    This samples the envelope; it cannot prove it for custom forms.
    """
    if probes < 1:
        raise ConfigError("need at least one probe")
    xs = np.concatenate(
        [
            np.linspace(-probe_range, probe_range, max(probes, 3)),
            rng.uniform(-probe_range, probe_range, size=probes),
        ]
    )
    ok = True
    for x in xs:
        val = evaluate_intensity(f, float(x))
        if abs(val) > f.sigma * abs(x) + f.b + 1e-12:
            ok = False
            break
    return f.sigma, f.b, ok


# -- noise models -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class NoiseModel:
    """Martingale-difference noise on n^2 channels with certified beta."""

    kind: str
    n: int
    beta: float
    std: np.ndarray | None = None
    half_width: np.ndarray | None = None
    driver_std: float | None = None
    coupling: object = None
    g_max: float | None = None
    mixing: np.ndarray | None = None

    @property
    def channels(self) -> int:
        return self.n * self.n


def _per_channel(value, channels: int, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = np.full(channels, float(arr))
    if arr.shape != (channels,):
        raise DimensionMismatch(
            f"{name} must be scalar or length {channels}, got shape {arr.shape}"
        )
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
        raise ConfigError(f"{name} must be finite and nonnegative")
    arr.flags.writeable = False
    return arr


def iid_gaussian_noise(n: int, std=1.0) -> NoiseModel:
    """Independent Gaussian channels; beta is the sum of channel variances."""
    s = _per_channel(std, n * n, "std")
    return NoiseModel(IID_GAUSSIAN, n, beta=float(np.sum(s**2)), std=s)


def iid_uniform_noise(n: int, half_width=None) -> NoiseModel:
    """Independent uniform channels on [-w, w]; channel variance w^2/3."""
    if half_width is None:
        half_width = UNIFORM_UNIT_HALF_WIDTH
    w = _per_channel(half_width, n * n, "half_width")
    return NoiseModel(IID_UNIFORM, n, beta=float(np.sum(w**2) / 3.0), half_width=w)


def default_coupling(v):
    """sqrt(1 + min(v^2, 1)): bounded, even, and state-dependent."""
    vv = np.minimum(np.square(v), 1.0)
    return np.sqrt(1.0 + vv)


def temporally_dependent_noise(
    n: int, driver_std: float = 1.0, coupling=None, g_max: float | None = None
) -> NoiseModel:
    """xi(k) = eta(k) * g(xi(k-1)) per channel, eta i.i.d. zero mean.

    The driver is centered and independent of the past, so the product
    keeps conditional mean zero while the distribution depends on history.
    ``coupling`` must act elementwise on arrays; the default is
    :func:`default_coupling` with g_max = sqrt(2).
    """
    if not (driver_std >= 0.0 and np.isfinite(driver_std)):
        raise ConfigError("driver_std must be finite and nonnegative")
    if coupling is None:
        coupling = default_coupling
        g_max = math.sqrt(2.0)
    elif g_max is None:
        raise ConfigError("custom coupling needs a declared g_max")
    beta = n * n * driver_std**2 * g_max**2
    return NoiseModel(
        TEMPORAL,
        n,
        beta=float(beta),
        driver_std=float(driver_std),
        coupling=coupling,
        g_max=float(g_max),
    )


def spatially_correlated_noise(n: int, mixing, driver_std: float = 1.0) -> NoiseModel:
    """xi(k) = C @ eta(k) with i.i.d. drivers; channels correlate through C."""
    c = as_matrix(mixing, name="mixing")
    if c.shape != (n * n, n * n):
        raise DimensionMismatch(
            f"mixing must be {n * n}x{n * n}, got {c.shape}"
        )
    if not (driver_std >= 0.0 and np.isfinite(driver_std)):
        raise ConfigError("driver_std must be finite and nonnegative")
    c = c.copy()
    c.flags.writeable = False
    beta = driver_std**2 * frobenius_norm(c) ** 2
    return NoiseModel(
        SPATIAL, n, beta=float(beta), driver_std=float(driver_std), mixing=c
    )


def _uses_default_coupling(model: NoiseModel) -> bool:
    return model.coupling is default_coupling


def sample_noise(model: NoiseModel, k: int, state, rng):
    """One stacked noise vector for time ``k`` plus the updated state.

    Only the temporally dependent kind carries state (its previous output);
    the others return state unchanged.
    """
    c = model.channels
    if model.kind == IID_GAUSSIAN:
        return rng.standard_normal(c) * model.std, state
    if model.kind == IID_UNIFORM:
        return rng.uniform(-model.half_width, model.half_width, size=c), state
    if model.kind == TEMPORAL:
        driver = rng.standard_normal(c) * model.driver_std
        prev = np.zeros(c) if state is None else state
        out = driver * model.coupling(prev)
        return out, out
    driver = rng.standard_normal(c) * model.driver_std
    return model.mixing @ driver, state


def pregenerate_noise(model: NoiseModel, horizon: int, rng) -> np.ndarray:
    """All noise vectors for a trial at once, shape (horizon, n^2).

    Consumes the random stream exactly like ``horizon`` sequential calls of
    :func:`sample_noise` from a fresh state, so per-step and pregenerated
    simulations see identical noise.
    """
    c = model.channels
    if model.kind == IID_GAUSSIAN:
        return rng.standard_normal((horizon, c)) * model.std
    if model.kind == IID_UNIFORM:
        return rng.uniform(-model.half_width, model.half_width, size=(horizon, c))
    drivers = rng.standard_normal((horizon, c)) * model.driver_std
    if model.kind == SPATIAL:
        return drivers @ model.mixing.T
    out = np.empty_like(drivers)
    if _uses_default_coupling(model):
        _kernels.temporal_noise_recursion(drivers, out)
    else:
        prev = np.zeros(c)
        for t in range(horizon):
            prev = drivers[t] * model.coupling(prev)
            out[t] = prev
    return out


# -- empirical martingale check --------------------------------------------

@dataclass(frozen=True)
class BucketStat:
    """Conditional-mean estimate for one bucket of samples."""

    label: str
    count: int
    mean: float
    se: float

    @property
    def within_4se(self) -> bool:
        if self.count < 2:
            return True
        if self.se == 0.0:
            return self.mean == 0.0
        return abs(self.mean) <= 4.0 * self.se


@dataclass(frozen=True)
class MartingaleReport:
    """Outcome of the empirical martingale-difference check."""

    passes: bool
    beta: float
    max_second_moment: float
    buckets: tuple


def _bucket(label: str, values: np.ndarray) -> BucketStat:
    count = int(values.size)
    if count == 0:
        return BucketStat(label, 0, 0.0, 0.0)
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(count)) if count > 1 else 0.0
    return BucketStat(label, count, mean, se)


def _sample_block(model, horizon: int, trials: int, rng) -> np.ndarray:
    # (trials, horizon, channels) array of realized noise.
    if isinstance(model, NoiseModel):
        return np.stack(
            [pregenerate_noise(model, horizon, rng) for _ in range(trials)]
        )
    # Duck-typed custom process: needs .sample(k, state, rng) and .channels.
    c = int(model.channels)
    out = np.empty((trials, horizon, c))
    for t in range(trials):
        state = None
        for k in range(horizon):
            vec, state = model.sample(k, state, rng)
            out[t, k] = vec
    return out


def empirical_martingale_check(
    model, horizon: int, trials: int, rng
) -> MartingaleReport:
    """Monte-Carlo evidence that ``model`` is a martingale difference.

    Conditional means are estimated in time buckets (plus previous-value
    buckets for temporally dependent models) and must sit within 4 standard
    errors of zero; per-time second moments of the stacked vector must not
    exceed the declared beta beyond 4 relative standard errors.  This
    samples histories rather than proving the almost-sure bound.
    """
    if horizon < 1 or trials < 1:
        raise ConfigError("need horizon >= 1 and trials >= 1")
    xs = _sample_block(model, horizon, trials, rng)
    beta = float(model.beta)

    buckets = []
    n_time_buckets = min(10, horizon)
    edges = np.linspace(0, horizon, n_time_buckets + 1).astype(int)
    for b in range(n_time_buckets):
        lo, hi = edges[b], edges[b + 1]
        if hi <= lo:
            continue
        buckets.append(_bucket(f"time[{lo}:{hi})", xs[:, lo:hi, :].ravel()))

    kind = getattr(model, "kind", CUSTOM)
    if kind == TEMPORAL and horizon >= 2:
        prev = xs[:, :-1, :].ravel()
        cur = xs[:, 1:, :].ravel()
        if prev.size:
            qs = np.quantile(prev, [0.25, 0.5, 0.75])
            cuts = np.concatenate([[-np.inf], qs, [np.inf]])
            for b in range(4):
                sel = (prev >= cuts[b]) & (prev < cuts[b + 1])
                buckets.append(_bucket(f"prev_q{b + 1}", cur[sel]))

    sq = np.sum(xs**2, axis=2)  # ||xi(k)||^2 per (trial, time)
    m_k = sq.mean(axis=0)
    if trials > 1:
        se_k = sq.std(axis=0, ddof=1) / math.sqrt(trials)
    else:
        se_k = np.zeros_like(m_k)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(m_k > 0.0, se_k / np.where(m_k > 0.0, m_k, 1.0), 0.0)
    second_ok = bool(np.all(m_k <= beta * (1.0 + 4.0 * rel) + 1e-15))
    max_second = float(m_k.max())

    passes = second_ok and all(b.within_4se for b in buckets)
    return MartingaleReport(
        passes=passes,
        beta=beta,
        max_second_moment=max_second,
        buckets=tuple(buckets),
    )


# -- JSON interchange -------------------------------------------------------

def intensity_to_dict(f: IntensityFunction) -> dict:
    if f.form == CUSTOM:
        raise ConfigError("custom intensities have no JSON form")
    d: dict = {"form": f.form}
    if f.form in (AFFINE, MULTIPLICATIVE):
        d["sigma"] = f.sigma
    if f.form in (AFFINE, ADDITIVE):
        d["b"] = f.b
    return d


def intensity_from_dict(d: dict) -> IntensityFunction:
    try:
        form = d["form"]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed intensity object: {exc}") from exc
    if form == AFFINE:
        return affine_intensity(float(d.get("sigma", 0.0)), float(d.get("b", 0.0)))
    if form == ADDITIVE:
        return additive_intensity(float(d.get("b", 0.0)))
    if form == MULTIPLICATIVE:
        return multiplicative_intensity(float(d.get("sigma", 0.0)))
    raise ConfigError(f"unknown intensity form {form!r}")


def noise_to_dict(model: NoiseModel) -> dict:
    d: dict = {"kind": model.kind, "beta": model.beta}
    if model.kind == IID_GAUSSIAN:
        d["std"] = model.std.tolist()
    elif model.kind == IID_UNIFORM:
        d["half_width"] = model.half_width.tolist()
    elif model.kind == TEMPORAL:
        if not _uses_default_coupling(model):
            raise ConfigError("custom couplings have no JSON form")
        d["driver_std"] = model.driver_std
    else:
        d["driver_std"] = model.driver_std
        d["mixing"] = model.mixing.tolist()
    return d


def noise_from_dict(d: dict, n: int) -> NoiseModel:
    try:
        kind = d["kind"]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed noise object: {exc}") from exc
    if kind == IID_GAUSSIAN:
        return iid_gaussian_noise(n, d.get("std", 1.0))
    if kind == IID_UNIFORM:
        return iid_uniform_noise(n, d.get("half_width"))
    if kind == TEMPORAL:
        return temporally_dependent_noise(n, float(d.get("driver_std", 1.0)))
    if kind == SPATIAL:
        if "mixing" not in d:
            raise ConfigError("spatially correlated noise needs a mixing matrix")
        return spatially_correlated_noise(
            n, d["mixing"], float(d.get("driver_std", 1.0))
        )
    raise ConfigError(f"unknown noise kind {kind!r}")


def noise_from_json(s: str, n: int) -> NoiseModel:
    try:
        return noise_from_dict(json.loads(s), n)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid noise JSON: {exc}") from exc
