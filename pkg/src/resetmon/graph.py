"""Exact ground-truth computations on product chains.

Everything here knows the whole model, which the monitors never do; the
harness uses these functions to terminate trials and to check outcomes.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .core import ProductChain, Verdict, classify_scc
from .errors import ConfigurationError, PreconditionError

DENSE_LIMIT = 2000


@dataclass(frozen=True)
class SccDecomposition:
    components: tuple[tuple[int, ...], ...]
    is_bottom: tuple[bool, ...]
    component_of: tuple[int, ...]

    def bottoms(self) -> list[int]:
        return [c for c, b in enumerate(self.is_bottom) if b]

    def sizes(self) -> list[int]:
        return [len(c) for c in self.components]


def scc_of_graph(succ: Sequence[Sequence[int]]) -> SccDecomposition:
    """Iterative Tarjan over adjacency lists indexed ``0..n-1``."""
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    found: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            row = succ[v]
            if pos < len(row):
                work[-1] = (v, pos + 1)
                w = row[pos]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                found.append(sorted(comp))

    found.sort(key=lambda c: c[0])
    component_of = [0] * n
    for c, comp in enumerate(found):
        for v in comp:
            component_of[v] = c
    is_bottom = [True] * len(found)
    for v in range(n):
        for w in succ[v]:
            if component_of[w] != component_of[v]:
                is_bottom[component_of[v]] = False
    return SccDecomposition(tuple(tuple(c) for c in found), tuple(is_bottom), tuple(component_of))


def scc_decompose(product: ProductChain) -> SccDecomposition:
    if product.n_states == 0:
        raise PreconditionError("empty graph")
    return scc_of_graph(product.succ)


def good_bottoms(product: ProductChain, dec: SccDecomposition | None = None) -> list[int]:
    """Indices of the bottom components that satisfy some Rabin pair."""
    dec = dec or scc_decompose(product)
    return [c for c in dec.bottoms() if classify_scc(dec.components[c], product.pairs) is Verdict.GOOD]


def satisfaction_probability(product: ProductChain, dec: SccDecomposition | None = None) -> float:
    """Probability, from the initial distribution, of reaching a good BSCC."""
    dec = dec or scc_decompose(product)
    n = product.n_states
    target = np.zeros(n, dtype=bool)
    for c in good_bottoms(product, dec):
        target[list(dec.components[c])] = True
    if not target.any():
        return 0.0

    # backward reachability: states that cannot reach the target have value 0
    pred: list[list[int]] = [[] for _ in range(n)]
    for s, row in enumerate(product.succ):
        for t in row:
            pred[t].append(s)
    can_reach = target.copy()
    queue = deque(np.flatnonzero(target).tolist())
    while queue:
        t = queue.popleft()
        for s in pred[t]:
            if not can_reach[s]:
                can_reach[s] = True
                queue.append(s)

    unknown = np.flatnonzero(can_reach & ~target)
    x = target.astype(float)
    if len(unknown):
        pos = {s: k for k, s in enumerate(unknown.tolist())}
        m = len(unknown)
        rows, cols, vals = [], [], []
        b = np.zeros(m)
        for s in unknown.tolist():
            k = pos[s]
            for t, p in zip(product.succ[s], product.probs[s]):
                if target[t]:
                    b[k] += p
                elif t in pos:
                    rows.append(k)
                    cols.append(pos[t])
                    vals.append(p)
        a = sp.csr_matrix((vals, (rows, cols)), shape=(m, m))
        if m <= DENSE_LIMIT:
            y = np.linalg.solve(np.eye(m) - a.toarray(), b)
        else:
            y = _value_iteration(a, b)
        x[unknown] = y
    mu = np.asarray(product.initial)
    return float(min(1.0, max(0.0, mu @ x)))


def _value_iteration(a, b, tol=1e-12, max_iter=10_000_000):
    y = np.zeros_like(b)
    for _ in range(max_iter):
        nxt = a @ y + b
        if np.max(np.abs(nxt - y)) < tol:
            return nxt
        y = nxt
    raise RuntimeError("value iteration did not converge")


class StructuralParams(NamedTuple):
    n: int
    p_min: float
    mxsc: int


def structural_params(product: ProductChain, dec: SccDecomposition | None = None) -> StructuralParams:
    dec = dec or scc_decompose(product)
    pmin = min(p for row in product.probs for p in row)
    return StructuralParams(product.n_states, pmin, max(dec.sizes()))


def _bfs_path(product: ProductChain, sources, targets, first_step=False):
    """Shortest path from any of ``sources`` to any of ``targets``.

    Successors are explored in increasing state id, so ties go to the
    smallest id.  With ``first_step`` the path must contain at least one edge
    (a source may then be its own target).  Returns the list of states
    including both endpoints, or ``None``.
    """
    targets = set(targets)
    parent: dict = {}
    queue: deque[int] = deque()
    if first_step:
        for s in sorted(sources):
            for t in sorted(product.succ[s]):
                if t not in parent:
                    parent[t] = (s,)  # entered straight from a source
                    queue.append(t)
    else:
        for s in sorted(sources):
            parent[s] = None
            queue.append(s)
    while queue:
        v = queue.popleft()
        if v in targets:
            path = [v]
            link = parent[v]
            while link is not None:
                if isinstance(link, tuple):
                    path.append(link[0])
                    break
                path.append(link)
                link = parent[link]
            return path[::-1]
        for w in sorted(product.succ[v]):
            if w not in parent:
                parent[w] = v
                queue.append(w)
    return None


def witness_good_path(product: ProductChain, dec: SccDecomposition | None = None) -> list[int]:
    """A finite path whose every prefix has a good or undefined candidate and
    whose own candidate is a whole good BSCC.

    Built as a lasso into an accepting state of a good BSCC, then grown by
    shortest excursions to unexplored states of that BSCC and shortest returns
    to the current candidate.
    """
    dec = dec or scc_decompose(product)
    goods = set(good_bottoms(product, dec))
    if not goods:
        raise PreconditionError("the product has no good bottom SCC")

    # pick the first good BSCC reachable by BFS from the initial states
    inits = product.initial_states()
    hit = _bfs_path(product, inits, [v for c in goods for v in dec.components[c]])
    if hit is None:
        raise PreconditionError("no good bottom SCC is reachable")
    bscc = dec.components[dec.component_of[hit[-1]]]
    members = set(bscc)
    accepting = set()
    for e, f in product.pairs:
        if not (members & e):
            accepting |= members & f

    path = _bfs_path(product, inits, accepting)  # simple: BFS paths never repeat
    back = _bfs_path(product, [path[-1]], set(path), first_step=True)
    path += back[1:]
    candidate = _candidate_of(path)
    while candidate != members:
        out = _bfs_path(product, [path[-1]], members - candidate)
        path += out[1:]
        back = _bfs_path(product, [path[-1]], candidate, first_step=True)
        path += back[1:]
        candidate = _candidate_of(path)
    return path


def _candidate_of(path):
    """States of the SCC containing the last state in the graph of ``path``."""
    fwd: dict[int, set[int]] = {}
    rev: dict[int, set[int]] = {}
    for a, b in zip(path, path[1:]):
        fwd.setdefault(a, set()).add(b)
        rev.setdefault(b, set()).add(a)

    def reach(start, adj):
        seen = {start}
        todo = [start]
        while todo:
            v = todo.pop()
            for w in adj.get(v, ()):
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return seen
    last = path[-1]
    return reach(last, fwd) & reach(last, rev)


class Bounds(NamedTuple):
    expected_resets: float
    expected_steps_fixed: float | None
    expected_steps_general: float
    j_min: float


def theoretical_bounds(params: StructuralParams, p_phi: float, alpha: float | None,
                       epsilon: float) -> Bounds:
    """Upper bounds on E(R) and E(T) for the bold monitors (logarithms base 2).

    ``expected_steps_fixed`` is the bound for a fixed boldness ``alpha``
    (``None`` when ``alpha`` is ``None``); ``expected_steps_general`` is the
    bound for the linear schedule, using ``j_min <= 1/p_min``.
    """
    n, pmin, mxsc = params
    if not 0.0 < epsilon < 1.0:
        raise ConfigurationError(f"epsilon must lie in (0,1), got {epsilon}")
    if not 0.0 < p_phi <= 1.0:
        raise ConfigurationError(f"p_phi must lie in (0,1], got {p_phi}")
    if not 0.0 < pmin <= 1.0:
        raise ConfigurationError(f"p_min must lie in (0,1], got {pmin}")
    if n < 1 or mxsc < 1:
        raise ConfigurationError("n and mxsc must be positive")
    from .monitors import alpha0
    if alpha is not None and alpha < alpha0(pmin):
        raise ConfigurationError(f"alpha={alpha} is below alpha0={alpha0(pmin)}")

    success = p_phi * (1.0 - epsilon)
    per_step = 2 * n * (n - math.log2(epsilon)) * mxsc * (1.0 / pmin) ** mxsc
    fixed = None if alpha is None else per_step * alpha / success
    general = (1.0 / pmin ** 2 + 1.0 / (pmin * success) + 1.0 / success ** 2) * per_step
    return Bounds(1.0 / success, fixed, general, 1.0 / pmin)
