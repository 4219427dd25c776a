"""Closed-loop simulator: per-agent update, trials, and seeded ensembles.

The production update is the agent-wise loop (``step_agentwise`` and the
compiled equivalent in :mod:`stochavg._kernels`).  ``step_compact`` applies
the same map written as a matrix recursion; it exists purely as an
independent cross-check and must never replace the agent-wise path.

Reproducibility contract: trial ``t`` of a config draws from two
counter-based streams keyed ``(base_seed, (t, 0))`` for the graph process
and ``(base_seed, (t, 1))`` for the noise process.  Everything a trial
consumes is pregenerated from those streams, so results are bit-for-bit
identical regardless of thread count or scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    ConfigError,
    DimensionMismatch,
    DivergenceError,
    NonFinite,
)
from .flows import GraphFlow, flow_from_dict, flow_index_sequence, flow_to_dict
from .gain import DEFAULT_GAIN, GainSchedule, gain_from_dict, gain_to_dict, gains
from .graph import Digraph, laplacian
from .linalg import as_vector
from .noise import (
    IntensityFunction,
    NoiseModel,
    affine_intensity,
    evaluate_intensity,
    iid_gaussian_noise,
    intensity_from_dict,
    intensity_to_dict,
    noise_from_dict,
    noise_to_dict,
    pregenerate_noise,
)

DIVERGENCE_GUARD = 1e12
_THREADS_ENV = "STOCHAVG_THREADS"


def _normalize_intensities(n: int, intensities) -> tuple[IntensityFunction, ...]:
    if intensities is None:
        intensities = affine_intensity(0.0, 1.0)
    if isinstance(intensities, IntensityFunction):
        return (intensities,) * (n * n)
    out = tuple(intensities)
    if len(out) != n * n:
        raise DimensionMismatch(
            f"need {n * n} per-channel intensity functions, got {len(out)}"
        )
    for f in out:
        if not isinstance(f, IntensityFunction):
            raise ConfigError("intensities must be IntensityFunction instances")
    return out


@dataclass(frozen=True, eq=False)
class SimConfig:
    """Complete description of one Monte-Carlo experiment."""

    n: int
    x0: np.ndarray
    flow: GraphFlow
    noise: NoiseModel
    intensities: tuple[IntensityFunction, ...]
    gain: GainSchedule
    horizon: int
    record_stride: int = 1
    trials: int = 1
    base_seed: int = 0

    def __init__(
        self,
        n,
        x0,
        flow,
        noise=None,
        intensities=None,
        gain=None,
        horizon=1,
        record_stride=1,
        trials=1,
        base_seed=0,
    ):
        n = int(n)
        if n < 1:
            raise ConfigError("n must be >= 1")
        x0 = as_vector(x0, name="x0")
        if x0.shape[0] != n:
            raise DimensionMismatch(f"x0 has length {x0.shape[0]}, expected {n}")
        if not isinstance(flow, GraphFlow):
            raise ConfigError("flow must be a GraphFlow")
        if flow.n != n:
            raise DimensionMismatch(f"flow is over {flow.n} agents, config says {n}")
        if noise is None:
            noise = iid_gaussian_noise(n)
        if not isinstance(noise, NoiseModel):
            raise ConfigError("noise must be a NoiseModel")
        if noise.n != n:
            raise DimensionMismatch(f"noise is over {noise.n} agents, config says {n}")
        if gain is None:
            gain = DEFAULT_GAIN
        if not isinstance(gain, GainSchedule):
            raise ConfigError("gain must be a GainSchedule")
        horizon = int(horizon)
        if horizon < 0:
            raise ConfigError("horizon must be >= 0")
        record_stride = int(record_stride)
        if record_stride < 1:
            raise ConfigError("record_stride must be >= 1")
        trials = int(trials)
        if trials < 1:
            raise ConfigError("trials must be >= 1")
        base_seed = int(base_seed)
        if not 0 <= base_seed < 2**64:
            raise ConfigError("base_seed must fit in 64 bits")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "flow", flow)
        object.__setattr__(self, "noise", noise)
        object.__setattr__(
            self, "intensities", _normalize_intensities(n, intensities)
        )
        object.__setattr__(self, "gain", gain)
        object.__setattr__(self, "horizon", horizon)
        object.__setattr__(self, "record_stride", record_stride)
        object.__setattr__(self, "trials", trials)
        object.__setattr__(self, "base_seed", base_seed)


@dataclass(frozen=True, eq=False)
class TrialResult:
    """Trajectory samples of a single trial."""

    trial_index: int
    times: np.ndarray
    states: np.ndarray
    spread: np.ndarray
    centroid: np.ndarray
    final_x: np.ndarray
    final_centroid: float


@dataclass(frozen=True, eq=False)
class EnsembleStats:
    """Cross-trial aggregates over the sampled times."""

    times: np.ndarray
    mean_spread: np.ndarray
    se_spread: np.ndarray
    final_centroids: np.ndarray
    final_spread: np.ndarray
    mean_final_centroid: float
    var_final_centroid: float
    mean_final_spread: float
    max_final_spread: float
    n_trials: int
    trial_results: tuple[TrialResult, ...] | None = None


# -- single steps (reference + oracle forms) --------------------------------

def _check_step_inputs(x, g, noise_flat, intensities):
    x = as_vector(x, name="state")
    if not isinstance(g, Digraph):
        raise ConfigError("g must be a Digraph")
    n = g.n
    if x.shape[0] != n:
        raise DimensionMismatch(f"state has length {x.shape[0]}, graph has {n} nodes")
    noise_flat = as_vector(noise_flat, name="noise")
    if noise_flat.shape[0] != n * n:
        raise DimensionMismatch(
            f"noise vector has length {noise_flat.shape[0]}, expected {n * n}"
        )
    intensities = _normalize_intensities(n, intensities)
    return x, n, noise_flat, intensities


def step_agentwise(x, g, c, noise_flat, intensities=None, step=None):
    """One protocol step, agent by agent.

    ``noise_flat[i*n + j]`` is the perturbation on the link from ``j`` to
    receiver ``i``; entries for absent links are ignored.  Agents whose
    adjacency row is all zero keep their state.
    """
    x, n, noise_flat, intensities = _check_step_inputs(x, g, noise_flat, intensities)
    a = g.adjacency
    c = float(c)
    xn = np.empty(n)
    for i in range(n):
        acc = 0.0
        base = i * n
        for j in range(n):
            w = a[i, j]
            if w != 0.0:
                d = x[j] - x[i]
                f = evaluate_intensity(intensities[base + j], d)
                y = x[j] + f * noise_flat[base + j]
                acc += w * (y - x[i])
        xn[i] = x[i] + c * acc
    if not np.all(np.isfinite(xn)):
        where = f" at step {step}" if step is not None else ""
        raise NonFinite(f"state became non-finite{where}")
    return xn


def step_compact(x, g, c, noise_flat, intensities=None, step=None):
    """The same step written as a matrix recursion (cross-check only)."""
    x, n, noise_flat, intensities = _check_step_inputs(x, g, noise_flat, intensities)
    a = g.adjacency
    c = float(c)
    lap = laplacian(g).matrix
    yvals = np.empty(n * n)
    for i in range(n):
        for j in range(n):
            yvals[i * n + j] = evaluate_intensity(intensities[i * n + j], x[j] - x[i])
    injected = a * (yvals * noise_flat).reshape(n, n)
    xn = x - c * (lap @ x) + c * injected.sum(axis=1)
    if not np.all(np.isfinite(xn)):
        where = f" at step {step}" if step is not None else ""
        raise NonFinite(f"state became non-finite{where}")
    return xn


# -- trials -----------------------------------------------------------------

def trial_streams(base_seed: int, trial_index: int):
    """Independent (flow, noise) generators for one trial."""
    streams = []
    for substream in (0, 1):
        ss = np.random.SeedSequence(
            entropy=base_seed, spawn_key=(trial_index, substream)
        )
        streams.append(np.random.Generator(np.random.Philox(ss)))
    return streams[0], streams[1]


def record_times(horizon: int, stride: int) -> np.ndarray:
    """Times sampled by a trial: 0, every ``stride``, and the final step."""
    times = set(range(0, horizon + 1, stride))
    times.add(horizon)
    return np.array(sorted(times), dtype=np.int64)


def spread(states: np.ndarray) -> np.ndarray:
    """Squared deviation-from-mean energy for each recorded state."""
    states = np.asarray(states, dtype=float)
    if states.ndim == 1:
        states = states[None, :]
    dev = states - states.mean(axis=1, keepdims=True)
    return np.einsum("ij,ij->i", dev, dev)


def _affine_tables(cfg: SimConfig):
    if not all(f.is_affine_family for f in cfg.intensities):
        return None
    sigma_ch = np.array([f.sigma for f in cfg.intensities])
    b_ch = np.array([f.b for f in cfg.intensities])
    return sigma_ch, b_ch


def run_trial(cfg: SimConfig, trial_index: int) -> TrialResult:
    """Simulate one trial; bit-for-bit reproducible given (cfg, trial_index)."""
    trial_index = int(trial_index)
    if trial_index < 0:
        raise ConfigError("trial_index must be >= 0")
    flow_rng, noise_rng = trial_streams(cfg.base_seed, trial_index)
    horizon = cfg.horizon
    idx = flow_index_sequence(cfg.flow, horizon, flow_rng)
    noise_block = pregenerate_noise(cfg.noise, horizon, noise_rng)
    gain_values = gains(cfg.gain, horizon)
    times = record_times(horizon, cfg.record_stride)
    states = np.empty((times.shape[0], cfg.n))
    tables = _affine_tables(cfg)
    if tables is not None:
        adj_stack = np.stack([g.adjacency for g in cfg.flow.graphs])
        bad = _kernels.simulate_affine(
            cfg.x0,
            adj_stack,
            idx,
            gain_values,
            noise_block,
            tables[0],
            tables[1],
            np.int64(cfg.record_stride),
            DIVERGENCE_GUARD,
            states,
        )
        if bad >= 0:
            raise DivergenceError(trial_index, int(bad))
    else:
        x = cfg.x0.copy()
        states[0] = x
        rec = 1
        for k in range(horizon):
            g = cfg.flow.graphs[idx[k]]
            x = step_agentwise(
                x, g, gain_values[k], noise_block[k], cfg.intensities, step=k
            )
            if not np.all(np.abs(x) <= DIVERGENCE_GUARD):
                raise DivergenceError(trial_index, k + 1)
            t = k + 1
            if t % cfg.record_stride == 0 or t == horizon:
                states[rec] = x
                rec += 1
    v = spread(states)
    centroid = states.mean(axis=1)
    return TrialResult(
        trial_index=trial_index,
        times=times,
        states=states,
        spread=v,
        centroid=centroid,
        final_x=states[-1].copy(),
        final_centroid=float(centroid[-1]),
    )


def thread_count(trials: int) -> int:
    raw = os.environ.get(_THREADS_ENV, "").strip()
    if raw:
        try:
            cap = int(raw)
        except ValueError as exc:
            raise ConfigError(f"{_THREADS_ENV} must be an integer, got {raw!r}") from exc
        cap = max(1, cap)
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, trials))


def run_ensemble(cfg: SimConfig, keep_trials: bool = False) -> EnsembleStats:
    """Run all trials (possibly concurrently) and aggregate in trial order."""
    m = cfg.trials
    workers = thread_count(m)
    if workers == 1:
        results = [run_trial(cfg, t) for t in range(m)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda t: run_trial(cfg, t), range(m)))
    v = np.stack([r.spread for r in results])
    mean_v = v.mean(axis=0)
    if m > 1:
        se_v = v.std(axis=0, ddof=1) / np.sqrt(m)
    else:
        se_v = np.zeros_like(mean_v)
    finals = np.array([r.final_centroid for r in results])
    final_v = v[:, -1].copy()
    var_final = float(finals.var(ddof=1)) if m > 1 else 0.0
    return EnsembleStats(
        times=results[0].times,
        mean_spread=mean_v,
        se_spread=se_v,
        final_centroids=finals,
        final_spread=final_v,
        mean_final_centroid=float(finals.mean()),
        var_final_centroid=var_final,
        mean_final_spread=float(final_v.mean()),
        max_final_spread=float(final_v.max()),
        n_trials=m,
        trial_results=tuple(results) if keep_trials else None,
    )


# -- serialization ----------------------------------------------------------

def sim_config_to_dict(cfg: SimConfig) -> dict:
    shared = all(f == cfg.intensities[0] for f in cfg.intensities[1:])
    d = {
        "n": cfg.n,
        "x0": [float(v) for v in cfg.x0],
        "flow": flow_to_dict(cfg.flow),
        "noise": noise_to_dict(cfg.noise),
        "gain": gain_to_dict(cfg.gain),
        "horizon": cfg.horizon,
        "record_stride": cfg.record_stride,
        "trials": cfg.trials,
        "base_seed": cfg.base_seed,
    }
    if shared:
        d["intensity"] = intensity_to_dict(cfg.intensities[0])
    else:
        d["intensities"] = [intensity_to_dict(f) for f in cfg.intensities]
    return d


def sim_config_from_dict(d: dict) -> SimConfig:
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    for key in ("n", "x0", "flow"):
        if key not in d:
            raise ConfigError(f"config is missing required key {key!r}")
    known = {
        "n", "x0", "flow", "noise", "gain", "intensity", "intensities",
        "horizon", "record_stride", "trials", "base_seed",
    }
    for key in d:
        if key not in known:
            raise ConfigError(f"config has unknown key {key!r}")
    n = int(d["n"])
    x0_spec = d["x0"]
    if isinstance(x0_spec, dict):
        try:
            (lo, hi) = (float(v) for v in x0_spec["linspace"])
            extra = set(x0_spec) - {"linspace"}
        except (KeyError, TypeError, ValueError):
            raise ConfigError('x0 object form must be {"linspace": [lo, hi]}') from None
        if extra:
            raise ConfigError(f"x0 has unknown keys {sorted(extra)}")
        x0 = np.linspace(lo, hi, n)
    else:
        x0 = x0_spec
    if "intensity" in d and "intensities" in d:
        raise ConfigError("give either 'intensity' or 'intensities', not both")
    intensities = None
    if "intensity" in d:
        intensities = intensity_from_dict(d["intensity"])
    elif "intensities" in d:
        intensities = tuple(intensity_from_dict(e) for e in d["intensities"])
    noise = noise_from_dict(d["noise"], n) if "noise" in d else None
    gain = gain_from_dict(d["gain"]) if "gain" in d else None
    return SimConfig(
        n=n,
        x0=x0,
        flow=flow_from_dict(d["flow"]),
        noise=noise,
        intensities=intensities,
        gain=gain,
        horizon=d.get("horizon", 1),
        record_stride=d.get("record_stride", 1),
        trials=d.get("trials", 1),
        base_seed=d.get("base_seed", 0),
    )
