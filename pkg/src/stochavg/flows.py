"""Random digraph flows and certification of their averaging hypotheses.

Three flow kinds are supported, all with finite support:

* ``deterministic`` -- a periodic list of digraphs, repeated forever;
* ``iid`` -- independent draws from a fixed distribution over a support set;
* ``markov`` -- a homogeneous finite-state chain over a support set.

Finite support makes every conditional expectation an exact finite sum, so
the hypotheses behind the error bounds (conditional balance, joint
connectivity over a window, moment constants) are decidable and are
assembled into a :class:`FlowCertificate`.

Conditioning conventions.  For i.i.d. flows the conditional law equals the
marginal.  For Markov flows conditioning is on the current support state,
i.e. on the rows of the transition matrix.  For deterministic flows the
"conditional mean" at a time is the graph scheduled there.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    ConfigError,
    DimensionMismatch,
    NoUniqueStationary,
    NotStochastic,
    StochAvgError,
)
from .graph import (
    Digraph,
    digraph_from_dict,
    digraph_to_dict,
    has_spanning_tree,
    is_balanced,
    laplacian,
    symmetrized_laplacian,
)
from .linalg import DEFAULT_TOL, as_matrix, as_vector, spectral_norm, sym_eigenvalues

_PROB_TOL = 1e-12

DETERMINISTIC = "deterministic"
IID = "iid"
MARKOV = "markov"

#: Certificate membership labels.
BALANCED_CONDITIONAL = "conditionally_balanced"
ERGODIC_MARKOV = "ergodic_markov"
INDEPENDENT = "independent"
IID_CLASS = "iid"


@dataclass(frozen=True, eq=False)
class GraphFlow:
    """A random (or periodic) digraph sequence with finite support.

    ``graphs`` is the support; ``probabilities`` (iid), ``transition`` and
    ``initial`` (markov) complete the law.  Use the module constructors
    rather than instantiating directly.
    """

    kind: str
    graphs: tuple
    probabilities: np.ndarray | None = None
    transition: np.ndarray | None = None
    initial: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.graphs[0].n

    @property
    def support_size(self) -> int:
        return len(self.graphs)


def _check_support(graphs) -> tuple:
    graphs = tuple(graphs)
    if not graphs:
        raise ConfigError("a flow needs at least one support graph")
    n = graphs[0].n
    for g in graphs:
        if not isinstance(g, Digraph):
            raise ConfigError("flow support must consist of Digraph values")
        if g.n != n:
            raise DimensionMismatch("all support graphs must share n")
    return graphs


def _check_probability_vector(p, size: int, what: str) -> np.ndarray:
    v = as_vector(p, name=what)
    if v.shape[0] != size:
        raise DimensionMismatch(
            f"{what} has length {v.shape[0]}, expected {size}"
        )
    if np.any(v < -_PROB_TOL):
        raise NotStochastic(f"{what} has negative entries")
    if abs(float(v.sum()) - 1.0) > _PROB_TOL:
        raise NotStochastic(f"{what} does not sum to 1")
    return np.clip(v, 0.0, None)


def deterministic_flow(graphs) -> GraphFlow:
    """Periodic flow cycling through ``graphs`` in order, forever."""
    return GraphFlow(DETERMINISTIC, _check_support(graphs))


def iid_flow(graphs, probabilities) -> GraphFlow:
    """Independent identically distributed draws over ``graphs``."""
    graphs = _check_support(graphs)
    p = _check_probability_vector(probabilities, len(graphs), "probabilities")
    p.flags.writeable = False
    return GraphFlow(IID, graphs, probabilities=p)


def markov_flow(graphs, transition, initial=None) -> GraphFlow:
    """Homogeneous Markov chain over ``graphs``.

    ``initial`` defaults to uniform over the support.
    """
    graphs = _check_support(graphs)
    t = as_matrix(transition, name="transition")
    s = len(graphs)
    if t.shape != (s, s):
        raise DimensionMismatch(
            f"transition shape {t.shape} does not match support size {s}"
        )
    for row in range(s):
        _check_probability_vector(t[row], s, f"transition row {row}")
    if initial is None:
        initial = np.full(s, 1.0 / s)
    init = _check_probability_vector(initial, s, "initial distribution")
    t = t.copy()
    t.flags.writeable = False
    init.flags.writeable = False
    return GraphFlow(MARKOV, graphs, transition=t, initial=init)


def bernoulli_edge_failure_flow(base: Digraph, p: float) -> GraphFlow:
    """I.i.d. flow where each undirected edge pair of ``base`` survives
    jointly with probability ``p`` each step.

    Dropping both directions of a pair together keeps every realization as
    balanced as the base graph, so a balanced base yields a conditionally
    balanced flow.  The support enumerates all pair subsets, so the number
    of paired edges must stay enumeration-sized.
    """
    if not (0.0 <= p <= 1.0):
        raise ConfigError("survival probability must lie in [0, 1]")
    a = base.adjacency
    n = base.n
    pairs = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if a[i, j] != 0.0 or a[j, i] != 0.0
    ]
    if len(pairs) > 20:
        raise ConfigError(
            f"{len(pairs)} edge pairs would need 2^{len(pairs)} support graphs"
        )
    graphs = []
    probs = []
    for mask in range(1 << len(pairs)):
        keep = a.copy()
        prob = 1.0
        for bit, (i, j) in enumerate(pairs):
            if mask >> bit & 1:
                prob *= p
            else:
                keep[i, j] = 0.0
                keep[j, i] = 0.0
                prob *= 1.0 - p
        graphs.append(Digraph(n, keep))
        probs.append(prob)
    return iid_flow(graphs, probs)


# -- sampling ---------------------------------------------------------------

def _cumulative(p: np.ndarray) -> np.ndarray:
    c = np.cumsum(p)
    c[-1] = 1.0  # kill accumulated rounding so the last state stays reachable
    return c


def _draw(cum: np.ndarray, u: float) -> int:
    return int(min(np.searchsorted(cum, u, side="right"), cum.shape[0] - 1))


def sample_graph(flow: GraphFlow, k: int, state, rng):
    """Draw the graph for time ``k`` and advance the sampler state.

    State conventions: deterministic flows track the next time index, iid
    and markov flows track the last support index (``None`` before the
    first draw).  Deterministic flows consume no randomness.
    """
    if flow.kind == DETERMINISTIC:
        idx = k % flow.support_size
        return flow.graphs[idx], k + 1
    if flow.kind == IID:
        idx = _draw(_cumulative(flow.probabilities), rng.random())
        return flow.graphs[idx], idx
    if state is None:
        idx = _draw(_cumulative(flow.initial), rng.random())
    else:
        idx = _draw(_cumulative(flow.transition[state]), rng.random())
    return flow.graphs[idx], idx


def flow_index_sequence(flow: GraphFlow, horizon: int, rng) -> np.ndarray:
    """Support indices for ``horizon`` consecutive steps, from one stream.

    Consumes the random stream exactly as ``horizon`` repeated calls of
    :func:`sample_graph` starting from a fresh state, which keeps per-step
    and pregenerated simulation paths bit-identical.
    """
    if flow.kind == DETERMINISTIC:
        return np.arange(horizon, dtype=np.int64) % flow.support_size
    u = rng.random(horizon)
    if flow.kind == IID:
        cum = _cumulative(flow.probabilities)
        idx = np.searchsorted(cum, u, side="right")
        return np.minimum(idx, flow.support_size - 1).astype(np.int64)
    cum_rows = np.vstack([_cumulative(row) for row in flow.transition])
    cum_init = _cumulative(flow.initial)
    return _kernels.markov_index_walk(cum_rows, cum_init, u)


# -- conditional structure --------------------------------------------------

def _mixture_adjacency(flow: GraphFlow, weights: np.ndarray) -> np.ndarray:
    n = flow.n
    mean = np.zeros((n, n))
    for w, g in zip(weights, flow.graphs):
        if w != 0.0:
            mean += w * g.adjacency
    return mean


def _conditioning_weights(flow: GraphFlow) -> list[np.ndarray]:
    # One weight vector over the support per conditioning state.
    s = flow.support_size
    if flow.kind == DETERMINISTIC:
        return [np.eye(s)[j] for j in range(s)]
    if flow.kind == IID:
        return [flow.probabilities]
    return [flow.transition[j] for j in range(s)]


def conditional_mean_adjacency(flow: GraphFlow, state) -> np.ndarray:
    """Expected adjacency of the next graph given the sampler state.

    Deterministic: the scheduled graph itself.  Iid: the support mean,
    whatever the state.  Markov: the row mixture for the current state, or
    the initial-distribution mixture when no state exists yet.
    """
    if flow.kind == DETERMINISTIC:
        idx = 0 if state is None else int(state) % flow.support_size
        return flow.graphs[idx].adjacency.copy()
    if flow.kind == IID:
        return _mixture_adjacency(flow, flow.probabilities)
    if state is None:
        return _mixture_adjacency(flow, flow.initial)
    return _mixture_adjacency(flow, flow.transition[int(state)])


def check_conditionally_balanced(flow: GraphFlow, tol: float = DEFAULT_TOL) -> bool:
    """True iff every conditional mean digraph is balanced with entries >= -tol.

    Per conditioning state: each listed graph for deterministic flows, the
    single mean graph for iid flows, each transition row for markov flows.
    """
    for w in _conditioning_weights(flow):
        mean = _mixture_adjacency(flow, w)
        if float(mean.min()) < -tol:
            return False
        if not is_balanced(Digraph(flow.n, _zero_diagonal(mean)), tol):
            return False
    return True


def _zero_diagonal(a: np.ndarray) -> np.ndarray:
    out = a.copy()
    np.fill_diagonal(out, 0.0)
    return out


def _lambda2(m: np.ndarray) -> float:
    if m.shape[0] < 2:
        return 0.0
    return float(sym_eigenvalues(m)[1])


def joint_connectivity_theta(flow: GraphFlow, h: int) -> float:
    """Worst-case connectivity of the expected symmetrized Laplacian summed
    over an h-step window, minimized over conditioning states.

    Iid: second-smallest eigenvalue of h times the mean symmetrized
    Laplacian.  Markov: for each support state s, sum the i-step transition
    mixtures for i = 1..h and take the worst second-smallest eigenvalue.
    Deterministic with period p: worst window sum over start residues.
    """
    if h < 1:
        raise ConfigError("window length h must be at least 1")
    sym = [symmetrized_laplacian(laplacian(g)) for g in flow.graphs]
    s = flow.support_size

    if flow.kind == IID:
        mean = sum(p * m for p, m in zip(flow.probabilities, sym))
        return _lambda2(h * mean)

    if flow.kind == DETERMINISTIC:
        best = np.inf
        for m in range(s):
            window = sum(sym[(m * h + i) % s] for i in range(h))
            best = min(best, _lambda2(window))
        return float(best)

    power = np.eye(s)
    weights = np.zeros((s, s))
    for _ in range(h):
        power = power @ flow.transition
        weights += power
    best = np.inf
    for state in range(s):
        window = sum(weights[state, j] * sym[j] for j in range(s))
        best = min(best, _lambda2(window))
    return float(best)


def moment_constants(flow: GraphFlow, h: int) -> tuple[float, float, float]:
    """Exact conditional-moment certificates (rho0, rho1, rho2).

    rho0: worst conditional power mean of the Laplacian spectral norm with
    exponent 2^max(h, 2).  rho1: worst conditional mean of (edge count
    times squared max weight).  rho2: worst conditional mean, per node, of
    the squared in/out weight imbalance.
    """
    if h < 1:
        raise ConfigError("window length h must be at least 1")
    exponent = 2 ** max(h, 2)
    norms = np.array([spectral_norm(laplacian(g).matrix) for g in flow.graphs])
    edge_load = np.array(
        [
            g.edge_count * float(np.max(g.adjacency**2)) if g.edge_count else 0.0
            for g in flow.graphs
        ]
    )
    imbalance_sq = np.stack(
        [(g.in_degrees() - g.out_degrees()) ** 2 for g in flow.graphs]
    )

    rho0 = 0.0
    rho1 = 0.0
    rho2 = 0.0
    for w in _conditioning_weights(flow):
        rho0 = max(rho0, float(np.dot(w, norms**exponent)) ** (1.0 / exponent))
        rho1 = max(rho1, float(np.dot(w, edge_load)))
        rho2 = max(rho2, float(np.max(w @ imbalance_sq)))
    return rho0, rho1, rho2


# -- Markov chain structure -------------------------------------------------

def _check_row_stochastic(p_matrix, tol: float) -> np.ndarray:
    p = as_matrix(p_matrix, name="transition")
    if p.shape[0] != p.shape[1]:
        raise DimensionMismatch("transition matrix must be square")
    if float(p.min()) < -max(tol, _PROB_TOL):
        raise NotStochastic("transition matrix has negative entries")
    if float(np.max(np.abs(p.sum(axis=1) - 1.0))) > max(tol, _PROB_TOL):
        raise NotStochastic("transition rows must sum to 1")
    return np.clip(p, 0.0, None)


def stationary_distribution(p_matrix, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Unique stationary distribution of a row-stochastic matrix.

    Found as the null vector of P^T - I; a null space of dimension above
    one (reducible chain) raises NoUniqueStationary.
    """
    p = _check_row_stochastic(p_matrix, tol)
    s = p.shape[0]
    if s == 1:
        return np.array([1.0])
    m = p.T - np.eye(s)
    _, sv, vt = np.linalg.svd(m)
    thresh = max(tol, s * np.finfo(float).eps * float(sv[0]))
    null_dim = int(np.sum(sv <= thresh))
    if null_dim != 1:
        raise NoUniqueStationary(
            f"chain has a {null_dim}-dimensional stationary space"
        )
    pi = vt[-1]
    if pi.sum() < 0.0:
        pi = -pi
    pi = np.clip(pi, 0.0, None)
    pi = pi / pi.sum()
    residual = float(np.linalg.norm(pi @ p - pi))
    if residual > max(tol, 1e-12):
        raise StochAvgError(
            f"stationary solve left residual {residual:g}"
        )
    return pi


def check_uniform_ergodicity(p_matrix, tol: float = DEFAULT_TOL) -> bool:
    """True iff the finite chain is irreducible and aperiodic.

    Checked by looking for a power of P with all entries strictly positive,
    up to exponent s^2 + 1, which is conclusive for finite chains.
    """
    p = _check_row_stochastic(p_matrix, tol)
    s = p.shape[0]
    q = p.copy()
    for _ in range(s * s + 1):
        if float(q.min()) > tol:
            return True
        q = q @ p
    return False


# -- certification ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FlowCertificate:
    """Everything the bound machinery needs to know about a flow.

    ``class_memberships`` uses the labels: ``conditionally_balanced``
    (conditional mean digraphs balanced and nonnegative), ``ergodic_markov``
    (uniformly ergodic chain with balanced conditional means),
    ``independent`` (graphs independent across time, balanced in mean) and
    ``iid`` (independent and identically distributed).  The i.i.d.-only
    fields (``lambda2_mean``, ``l2_moment``, ``rho1_bar``, ``rho2_bar``)
    are None for other flow kinds.
    """

    kind: str
    n: int
    h: int
    conditionally_balanced: bool
    theta: float
    rho0: float
    rho1: float
    rho2: float
    class_memberships: frozenset
    pi: np.ndarray | None
    uniformly_ergodic: bool | None
    mean_has_spanning_tree: bool | None
    sup_symmetrized_norm: float
    lambda2_mean: float | None
    l2_moment: float | None
    rho1_bar: float | None
    rho2_bar: float | None


def _all_graphs_equal(flow: GraphFlow) -> bool:
    first = flow.graphs[0].adjacency
    return all(np.array_equal(first, g.adjacency) for g in flow.graphs[1:])


def _rows_all_equal(t: np.ndarray) -> bool:
    return bool(np.all(np.abs(t - t[0]) <= _PROB_TOL))


def _mean_spanning_tree(flow: GraphFlow, pi: np.ndarray, tol: float):
    # Spanning tree of the stationary mean digraph; undecided (None) when
    # the mean has genuinely negative weights.
    mean = _mixture_adjacency(flow, pi)
    mean = _zero_diagonal(mean)
    if float(mean.min()) < -tol:
        return None
    mean = np.clip(mean, 0.0, None)
    mean[mean <= tol] = 0.0
    return has_spanning_tree(laplacian(Digraph(flow.n, mean)), tol)


def certify(flow: GraphFlow, h: int = 1, tol: float = DEFAULT_TOL) -> FlowCertificate:
    """Assemble the full hypothesis certificate for ``flow`` at window ``h``."""
    balanced = check_conditionally_balanced(flow, tol)
    theta = joint_connectivity_theta(flow, h)
    rho0, rho1, rho2 = moment_constants(flow, h)
    sup_sym = max(
        spectral_norm(symmetrized_laplacian(laplacian(g))) for g in flow.graphs
    )

    pi = None
    uniformly_ergodic: bool | None
    lambda2_mean = None
    l2_moment = None
    rho1_bar = None
    rho2_bar = None

    if flow.kind == DETERMINISTIC:
        constant = _all_graphs_equal(flow)
        uniformly_ergodic = constant
        independent = True
        identical = constant
        # Time averaging over one period plays the stationary role.
        pi = np.full(flow.support_size, 1.0 / flow.support_size)
    elif flow.kind == IID:
        uniformly_ergodic = True
        independent = True
        identical = True
        pi = flow.probabilities
        mean_sym = sum(
            p * symmetrized_laplacian(laplacian(g))
            for p, g in zip(flow.probabilities, flow.graphs)
        )
        lambda2_mean = _lambda2(mean_sym)
        l2_moment = float(
            np.dot(
                flow.probabilities,
                [spectral_norm(laplacian(g).matrix) ** 2 for g in flow.graphs],
            )
        )
        # Independence makes conditional and unconditional moments equal.
        rho1_bar = rho1
        rho2_bar = rho2
    else:
        uniformly_ergodic = check_uniform_ergodicity(flow.transition, tol)
        independent = _rows_all_equal(flow.transition)
        identical = independent and bool(
            np.all(np.abs(flow.initial - flow.transition[0]) <= _PROB_TOL)
        )
        try:
            pi = stationary_distribution(flow.transition, tol)
        except NoUniqueStationary:
            pi = None

    memberships = set()
    if balanced:
        memberships.add(BALANCED_CONDITIONAL)
        if uniformly_ergodic:
            memberships.add(ERGODIC_MARKOV)
        if independent:
            memberships.add(INDEPENDENT)
        if independent and identical:
            memberships.add(IID_CLASS)

    mean_tree = None if pi is None else _mean_spanning_tree(flow, pi, tol)

    return FlowCertificate(
        kind=flow.kind,
        n=flow.n,
        h=h,
        conditionally_balanced=balanced,
        theta=theta,
        rho0=rho0,
        rho1=rho1,
        rho2=rho2,
        class_memberships=frozenset(memberships),
        pi=pi,
        uniformly_ergodic=uniformly_ergodic,
        mean_has_spanning_tree=mean_tree,
        sup_symmetrized_norm=float(sup_sym),
        lambda2_mean=lambda2_mean,
        l2_moment=l2_moment,
        rho1_bar=rho1_bar,
        rho2_bar=rho2_bar,
    )


# -- JSON interchange -------------------------------------------------------

def flow_to_dict(flow: GraphFlow) -> dict:
    d: dict = {
        "kind": flow.kind,
        "graphs": [digraph_to_dict(g) for g in flow.graphs],
    }
    if flow.kind == IID:
        d["probabilities"] = flow.probabilities.tolist()
    elif flow.kind == MARKOV:
        d["transition"] = flow.transition.tolist()
        d["initial"] = flow.initial.tolist()
    return d


def flow_from_dict(d: dict) -> GraphFlow:
    try:
        kind = d["kind"]
        graphs = [digraph_from_dict(g) for g in d["graphs"]]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed flow object: {exc}") from exc
    if kind == DETERMINISTIC:
        return deterministic_flow(graphs)
    if kind == IID:
        if "probabilities" not in d:
            raise ConfigError("iid flow needs a probabilities vector")
        return iid_flow(graphs, d["probabilities"])
    if kind == MARKOV:
        if "transition" not in d:
            raise ConfigError("markov flow needs a transition matrix")
        return markov_flow(graphs, d["transition"], d.get("initial"))
    raise ConfigError(f"unknown flow kind {kind!r}")


def flow_from_json(s: str) -> GraphFlow:
    try:
        return flow_from_dict(json.loads(s))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid flow JSON: {exc}") from exc
