"""Oracles shared by several test modules."""
from fractions import Fraction

import numpy as np


def exact_reach_probability(product, targets):
    """Reachability probability of ``targets`` by Gaussian elimination over Fractions.

    States that cannot reach the targets are fixed to 0 first, which keeps the
    system nonsingular.
    """
    n = product.n_states
    targets = set(targets)
    pred = [[] for _ in range(n)]
    for s, row in enumerate(product.succ):
        for t in row:
            pred[t].append(s)
    alive = set(targets)
    todo = list(targets)
    while todo:
        t = todo.pop()
        for s in pred[t]:
            if s not in alive:
                alive.add(s)
                todo.append(s)
    unknown = sorted(alive - targets)
    pos = {s: k for k, s in enumerate(unknown)}
    m = len(unknown)
    a = [[Fraction(0)] * (m + 1) for _ in range(m)]
    for s in unknown:
        k = pos[s]
        a[k][k] += 1
        for t, p in zip(product.succ[s], product.probs[s]):
            p = Fraction(p)
            if t in targets:
                a[k][m] += p
            elif t in pos:
                a[k][pos[t]] -= p
    for col in range(m):
        piv = next(r for r in range(col, m) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        for r in range(m):
            if r != col and a[r][col] != 0:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    value = {t: Fraction(1) for t in targets}
    for s in unknown:
        k = pos[s]
        value[s] = a[k][m] / a[k][k]
    return sum(Fraction(mu) * value.get(s, Fraction(0)) for s, mu in enumerate(product.initial))


def brute_scc(succ):
    """SCCs by pairwise reachability (transitive closure), as a set of frozensets."""
    n = len(succ)
    reach = [{s} for s in range(n)]
    changed = True
    while changed:
        changed = False
        for s in range(n):
            new = set(reach[s])
            for t in reach[s]:
                new.update(succ[t])
            if new != reach[s]:
                reach[s] = new
                changed = True
    return {frozenset(t for t in range(n) if t in reach[s] and s in reach[t]) for s in range(n)}


def simulate_absorption(product, bottom_of, runs, rng):
    """Vectorized runs from the initial distribution until each enters a bottom SCC.

    ``bottom_of[s]`` is the BSCC index of ``s`` or -1.  Returns the BSCC index per run.
    """
    n = product.n_states
    width = max(len(r) for r in product.succ)
    succ = np.zeros((n, width), np.int64)
    cum = np.full((n, width), 2.0)
    for s, (row, probs) in enumerate(zip(product.succ, product.probs)):
        succ[s, :len(row)] = row
        cum[s, :len(row)] = np.cumsum(probs)
        cum[s, len(row) - 1] = 1.0
    bottom_of = np.asarray(bottom_of)
    init = np.asarray(product.initial)
    state = rng.choice(n, size=runs, p=init / init.sum())
    active = bottom_of[state] < 0
    while active.any():
        idx = np.flatnonzero(active)
        cur = state[idx]
        u = rng.random(len(idx))
        k = (u[:, None] >= cum[cur]).sum(axis=1)
        state[idx] = succ[cur, k]
        active[idx] = bottom_of[state[idx]] < 0
    return bottom_of[state]
