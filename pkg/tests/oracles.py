"""Independent brute-force oracles for the flow certification quantities.

These deliberately avoid the package's own eigensolver and accumulation
code: Laplacians are rebuilt from the definition, eigenvalues come from
numpy's LAPACK bindings, matrix powers from numpy.linalg.matrix_power, and
expectations are written as explicit loops over the enumerated support.
"""

import numpy as np


def _lap(adjacency):
    return np.diag(adjacency.sum(axis=1)) - adjacency


def _sym_lap(adjacency):
    l = _lap(adjacency)
    return 0.5 * (l + l.T)


def _lambda2(matrix):
    if matrix.shape[0] < 2:
        return 0.0
    return float(np.linalg.eigvalsh(matrix)[1])


def oracle_theta(flow, h):
    """Enumerate every conditioning state's h-step expected window."""
    sym = [_sym_lap(g.adjacency) for g in flow.graphs]
    s = len(flow.graphs)
    if flow.kind == "iid":
        mean = np.zeros_like(sym[0])
        for j in range(s):
            mean = mean + flow.probabilities[j] * sym[j]
        return _lambda2(h * mean)
    if flow.kind == "deterministic":
        values = []
        for m in range(s):
            window = np.zeros_like(sym[0])
            for i in range(h):
                window = window + sym[(m * h + i) % s]
            values.append(_lambda2(window))
        return min(values)
    values = []
    for state in range(s):
        window = np.zeros_like(sym[0])
        for i in range(1, h + 1):
            p_i = np.linalg.matrix_power(flow.transition, i)
            for j in range(s):
                window = window + p_i[state, j] * sym[j]
        values.append(_lambda2(window))
    return min(values)


def oracle_moments(flow, h):
    """Enumerate the conditional moment constants (rho0, rho1, rho2)."""
    e = 2 ** max(h, 2)
    n = flow.graphs[0].n
    s = len(flow.graphs)

    norms = [float(np.linalg.norm(_lap(g.adjacency), 2)) for g in flow.graphs]
    loads = []
    for g in flow.graphs:
        a = g.adjacency
        edges = int(np.count_nonzero(a))
        loads.append(edges * float(np.max(a * a)) if edges else 0.0)
    imbalance = []
    for g in flow.graphs:
        a = g.adjacency
        imbalance.append(
            [(float(a[i].sum()) - float(a[:, i].sum())) ** 2 for i in range(n)]
        )

    if flow.kind == "deterministic":
        weight_rows = [np.eye(s)[j] for j in range(s)]
    elif flow.kind == "iid":
        weight_rows = [np.array(flow.probabilities)]
    else:
        weight_rows = [np.array(flow.transition[j]) for j in range(s)]

    rho0 = rho1 = rho2 = 0.0
    for w in weight_rows:
        m0 = sum(w[j] * norms[j] ** e for j in range(s))
        rho0 = max(rho0, m0 ** (1.0 / e))
        rho1 = max(rho1, sum(w[j] * loads[j] for j in range(s)))
        for i in range(n):
            rho2 = max(rho2, sum(w[j] * imbalance[j][i] for j in range(s)))
    return rho0, rho1, rho2
