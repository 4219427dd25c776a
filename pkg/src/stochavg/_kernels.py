"""Compiled inner loops.

The simulation spends nearly all its time in three places: the per-step
agent update, the Markov index walk that pregenerates graph choices, and
the temporal-noise recursion.  Each is a tight scalar loop, so they are
compiled with numba when it is importable and fall back to equivalent pure
Python otherwise.  The arithmetic here must mirror the reference
implementations statement for statement (no fastmath), so both paths
produce identical floating-point results.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    NUMBA_OK = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_OK = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


@njit(cache=True, nogil=True)
def markov_index_walk(cum_rows: np.ndarray, cum_init: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Walk a finite chain given cumulative rows and one uniform per step.

    Index selection matches ``searchsorted(cum, u, side="right")`` clipped
    to the last state, which is also what the vectorized i.i.d. path uses.
    """
    steps = u.shape[0]
    n_states = cum_rows.shape[0]
    out = np.empty(steps, np.int64)
    if steps == 0:
        return out
    s = 0
    while s < n_states - 1 and u[0] >= cum_init[s]:
        s += 1
    out[0] = s
    for k in range(1, steps):
        row = cum_rows[s]
        s = 0
        while s < n_states - 1 and u[k] >= row[s]:
            s += 1
        out[k] = s
    return out


@njit(cache=True, nogil=True)
def temporal_noise_recursion(drivers: np.ndarray, out: np.ndarray) -> None:
    """Default temporally dependent noise: xi(k) = eta(k) * g(xi(k-1)).

    g(v) = sqrt(1 + min(v^2, 1)) per channel, starting from state 0.
    """
    steps, channels = drivers.shape
    for c in range(channels):
        prev = 0.0
        for k in range(steps):
            v = prev * prev
            if v > 1.0:
                v = 1.0
            prev = drivers[k, c] * np.sqrt(1.0 + v)
            out[k, c] = prev


@njit(cache=True, nogil=True)
def simulate_affine(
    x0: np.ndarray,
    adj_stack: np.ndarray,
    idx: np.ndarray,
    gain_values: np.ndarray,
    noise: np.ndarray,
    sigma_ch: np.ndarray,
    b_ch: np.ndarray,
    stride: np.int64,
    guard: float,
    out_states: np.ndarray,
) -> int:
    """Run the agent-wise update for all steps with affine intensities.

    Writes the state at time 0, at every multiple of ``stride`` and at the
    final step into ``out_states`` (preallocated, row-per-sample).  Returns
    -1 on success, otherwise the time index at which the state left the
    ``guard`` box (also catches NaN).
    """
    n = x0.shape[0]
    steps = idx.shape[0]
    x = x0.copy()
    xn = np.empty(n)
    out_states[0] = x
    rec = 1
    for k in range(steps):
        a = adj_stack[idx[k]]
        c = gain_values[k]
        for i in range(n):
            acc = 0.0
            base = i * n
            for j in range(n):
                w = a[i, j]
                if w != 0.0:
                    d = x[j] - x[i]
                    f = sigma_ch[base + j] * abs(d) + b_ch[base + j]
                    y = x[j] + f * noise[k, base + j]
                    acc += w * (y - x[i])
            xn[i] = x[i] + c * acc
        for i in range(n):
            v = xn[i]
            if not (-guard <= v <= guard):
                return k + 1
            x[i] = v
        t = k + 1
        if t % stride == 0 or t == steps:
            out_states[rec] = x
            rec += 1
    return -1
