"""Compiled array version of the incremental tracker, plus a compiled walk sampler.

Same algorithm as ``tracker.IncrementalTracker``; states are dense ints and
every structure is a flat array indexed by state or discovery index.  It
processes a whole path at once and records, per step, the candidate size,
index, strength and verdict (``-1`` undefined, ``0`` bad, ``1`` good).
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
from numba import njit

from .core import ProductChain


@njit(cache=True)
def _less(kb, kv, a, b):
    if kb[a] != kb[b]:
        return kb[a] < kb[b]
    if kv[a] != kv[b]:
        return kv[a] < kv[b]
    return a < b


@njit(cache=True)
def _meld(a, b, kb, kv, child, sib, prev):
    if a < 0:
        return b
    if b < 0:
        return a
    if _less(kb, kv, b, a):
        a, b = b, a
    f = child[a]
    sib[b] = f
    prev[b] = a
    if f >= 0:
        prev[f] = b
    child[a] = b
    return a


@njit(cache=True)
def _merge_pairs(first, kb, kv, child, sib, prev, scratch):
    if first < 0:
        return -1
    m = 0
    node = first
    while node >= 0:
        a = node
        b = sib[a]
        node = sib[b] if b >= 0 else -1
        sib[a] = -1
        prev[a] = -1
        if b >= 0:
            sib[b] = -1
            prev[b] = -1
        scratch[m] = _meld(a, b, kb, kv, child, sib, prev)
        m += 1
    root = scratch[m - 1]
    for k in range(m - 2, -1, -1):
        root = _meld(scratch[k], root, kb, kv, child, sib, prev)
    return root


@njit(cache=True)
def _set_key(root, node, b, v, kb, kv, child, sib, prev, scratch):
    if node == root:
        rest = _merge_pairs(child[node], kb, kv, child, sib, prev, scratch)
    else:
        p = prev[node]
        nxt = sib[node]
        if child[p] == node:
            child[p] = nxt
        else:
            sib[p] = nxt
        if nxt >= 0:
            prev[nxt] = p
        sib[node] = -1
        prev[node] = -1
        rest = _meld(root, _merge_pairs(child[node], kb, kv, child, sib, prev, scratch),
                     kb, kv, child, sib, prev)
    child[node] = -1
    kb[node] = b
    kv[node] = v
    return _meld(rest, node, kb, kv, child, sib, prev)


@njit(cache=True)
def _good(ecnt, fcnt, r, npairs):
    for k in range(npairs):
        if ecnt[r, k] == 0 and fcnt[r, k] > 0:
            return 1
    return 0


@njit(cache=True)
def trace_kernel(path, n_states, pair_e, pair_f, npairs, out_size, out_index, out_strength, out_verdict):
    disc = np.zeros(n_states, np.int64)
    kb = np.full(n_states, -1, np.int64)
    kv = np.zeros(n_states, np.int64)
    child = np.full(n_states, -1, np.int64)
    sib = np.full(n_states, -1, np.int64)
    prev = np.full(n_states, -1, np.int64)
    scratch = np.empty(n_states // 2 + 2, np.int64)
    roots = np.empty(n_states + 1, np.int64)
    hroot = np.full(n_states + 2, -1, np.int64)
    width = max(npairs, 1)
    ecnt = np.zeros((n_states + 2, width), np.int64)
    fcnt = np.zeros((n_states + 2, width), np.int64)
    nroots = 0
    n = 0
    birthday = -1
    index = 0
    verdict = -1
    last = -1
    for t in range(path.shape[0]):
        s2 = path[t]
        d2 = disc[s2]
        if d2 == 0:
            n += 1
            disc[s2] = n
            roots[nroots] = n
            nroots += 1
            hroot[n] = s2
            for k in range(npairs):
                ecnt[n, k] = (pair_e[s2] >> k) & 1
                fcnt[n, k] = (pair_f[s2] >> k) & 1
            birthday = -1
            verdict = -1
        else:
            top = roots[nroots - 1]
            if disc[last] <= d2 or d2 >= top:
                if birthday < 0:
                    birthday = t + 1
                    index += 1
                    verdict = _good(ecnt, fcnt, top, npairs) if npairs > 0 else -1
                    hroot[top] = _set_key(hroot[top], s2, birthday, 0, kb, kv, child, sib, prev, scratch)
                else:
                    nv = kv[s2] + 1 if kb[s2] == birthday else 1
                    hroot[top] = _set_key(hroot[top], s2, birthday, nv, kb, kv, child, sib, prev, scratch)
            else:
                sigma = -1
                r = top
                while True:
                    nroots -= 1
                    r = roots[nroots]
                    sigma = _meld(sigma, hroot[r], kb, kv, child, sib, prev)
                    hroot[r] = -1
                    if r <= d2:
                        break
                    for k in range(npairs):
                        # fold counts down into the next root to be popped
                        ecnt[roots[nroots - 1], k] += ecnt[r, k]
                        fcnt[roots[nroots - 1], k] += fcnt[r, k]
                roots[nroots] = r
                nroots += 1
                birthday = t + 1
                index += 1
                verdict = _good(ecnt, fcnt, r, npairs) if npairs > 0 else -1
                hroot[r] = _set_key(sigma, s2, birthday, 0, kb, kv, child, sib, prev, scratch)
        last = s2
        if birthday < 0:
            out_size[t] = 0
            out_strength[t] = 0
            out_verdict[t] = -1
        else:
            top = roots[nroots - 1]
            h = hroot[top]
            out_size[t] = n - top + 1
            out_strength[t] = kv[h] if kb[h] == birthday else 0
            out_verdict[t] = verdict
        out_index[t] = index
    return n


@njit(cache=True)
def sample_walk(indptr, indices, cum, start, length, seed):
    """Random walk of ``length`` states from ``start`` using numba's own generator."""
    np.random.seed(seed)
    out = np.empty(length, np.int64)
    s = start
    out[0] = s
    for t in range(1, length):
        u = np.random.random()
        lo = indptr[s]
        hi = indptr[s + 1]
        k = lo + np.searchsorted(cum[lo:hi], u, side="right")
        if k >= hi:
            k = hi - 1
        s = indices[k]
        out[t] = s
    return out


class ProductArrays(NamedTuple):
    indptr: np.ndarray
    indices: np.ndarray
    cum: np.ndarray
    pair_e: np.ndarray
    pair_f: np.ndarray
    n_states: int
    n_pairs: int


def product_arrays(product: ProductChain) -> ProductArrays:
    """CSR layout of the product with per-row cumulative probabilities."""
    lengths = [len(row) for row in product.succ]
    indptr = np.zeros(product.n_states + 1, np.int64)
    np.cumsum(lengths, out=indptr[1:])
    indices = np.fromiter((t for row in product.succ for t in row), np.int64, indptr[-1])
    cum = np.empty(indptr[-1], np.float64)
    for s, row in enumerate(product.probs):
        c = np.cumsum(row)
        cum[indptr[s]:indptr[s + 1]] = c / c[-1]
    return ProductArrays(indptr, indices, cum, np.asarray(product.pair_e, np.int64),
                         np.asarray(product.pair_f, np.int64), product.n_states, product.n_pairs)


class FastTrace(NamedTuple):
    size: np.ndarray
    index: np.ndarray
    strength: np.ndarray
    verdict: np.ndarray
    discovered: int


def fast_trace(path, n_states: int, pair_e=None, pair_f=None, n_pairs: int = 0) -> FastTrace:
    """Run the compiled tracker over ``path`` (ints in ``0..n_states-1``)."""
    path = np.ascontiguousarray(path, dtype=np.int64)
    if path.size and (path.min() < 0 or path.max() >= n_states):
        raise ValueError("path mentions a state outside 0..n_states-1")
    if pair_e is None:
        pair_e = np.zeros(n_states, np.int64)
        pair_f = np.zeros(n_states, np.int64)
    m = path.shape[0]
    size = np.empty(m, np.int64)
    index = np.empty(m, np.int64)
    strength = np.empty(m, np.int64)
    verdict = np.empty(m, np.int64)
    n = trace_kernel(path, n_states, np.asarray(pair_e, np.int64), np.asarray(pair_f, np.int64),
                     n_pairs, size, index, strength, verdict)
    return FastTrace(size, index, strength, verdict, int(n))


def product_trace(arrays: ProductArrays, path) -> FastTrace:
    return fast_trace(path, arrays.n_states, arrays.pair_e, arrays.pair_f, arrays.n_pairs)


def product_walk(arrays: ProductArrays, start: int, length: int, seed: int) -> np.ndarray:
    return sample_walk(arrays.indptr, arrays.indices, arrays.cum, start, length, seed)
