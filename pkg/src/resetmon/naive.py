"""Reference candidate and strength, recomputed from scratch on a path.

These functions read the definitions literally and are deliberately slow.
They serve as the ground truth the incremental tracker is tested against.

Conventions:

* An SCC qualifies as a bottom SCC of the explored graph only if it carries
  at least one edge, so a path ending in a freshly discovered state has no
  candidate (``K(s0) = K(s0 s1) = undefined``).
* The strength of a candidate born at position ``b`` (``path = pre . s . kappa``
  with ``s = path[b]``) is the largest ``k`` such that every member occurs at
  least ``k`` times in ``s . kappa`` and ``s`` itself at least ``k + 1`` times.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

from .core import Verdict, classify_scc


@dataclass(frozen=True)
class Candidate:
    members: frozenset
    index: int
    strength: int
    verdict: Verdict | None = None


def _bottom_sccs(vertices, edges):
    """Nontrivial bottom SCCs of a graph, as (member frozenset, edge set) pairs."""
    local = {v: k for k, v in enumerate(vertices)}
    n = len(vertices)
    reach = [0] * n
    for a, b in edges:
        reach[local[a]] |= 1 << local[b]
    # transitive closure (Warshall on bitsets): reach[i] = vertices reachable in >= 1 step
    for k in range(n):
        bit = 1 << k
        rk = reach[k]
        for i in range(n):
            if reach[i] & bit:
                reach[i] |= rk
    out = []
    done = 0
    for i in range(n):
        if done >> i & 1 or not reach[i] >> i & 1:
            continue
        comp = 1 << i
        for j in range(n):
            if reach[i] >> j & 1 and reach[j] >> i & 1:
                comp |= 1 << j
        done |= comp
        if reach[i] & ~comp:
            continue  # an edge leaves the component
        members = frozenset(vertices[j] for j in range(n) if comp >> j & 1)
        out.append((members, {(a, b) for a, b in edges if a in members and b in members}))
    return out


def _match_suffix(path, end, bottoms):
    """Members of the bottom SCC equal to the graph of some suffix of ``path[:end]``."""
    last = path[end - 1]
    # bottom SCCs are disjoint: only the one holding the last state can match
    found = [b for b in bottoms if last in b[0]]
    if not found:
        return None
    members, comp_edges = found[0]
    support: set = set()
    suffix_edges: set = set()
    nxt = None
    for t in range(end - 1, -1, -1):
        v = path[t]
        if v not in members:
            break  # a longer suffix only adds vertices and edges
        support.add(v)
        if nxt is not None:
            suffix_edges.add((v, nxt))
        nxt = v
        # both are subsets of the component, so equal sizes mean equal sets
        if len(support) == len(members) and len(suffix_edges) == len(comp_edges):
            return members
    return None


def candidate_members(path: Sequence[Hashable]) -> frozenset | None:
    """Support of a suffix whose graph equals a bottom SCC of the explored graph."""
    if not path:
        raise ValueError("path must be nonempty")
    vertices = list(dict.fromkeys(path))
    bottoms = _bottom_sccs(vertices, set(zip(path, path[1:])))
    return _match_suffix(path, len(path), bottoms) if bottoms else None


def _strength_at(path, end, members, born):
    counts = {m: 0 for m in members}
    for t in range(born, end):
        v = path[t]
        if v in counts:
            counts[v] += 1
    k = min(counts.values())
    return min(k, counts[path[born]] - 1)


def naive_trace(path: Sequence[Hashable], pairs=None) -> list[Candidate | None]:
    """Candidate of every prefix ``path[:t]``, ``t = 1..len(path)``.

    Each prefix is matched against the bottom SCCs of its own explored graph;
    those are recomputed whenever the edge set grows.  The index counts
    defined candidates with consecutive repetitions removed and the birthday
    is the shortest prefix having the same candidate.
    """
    out: list[Candidate | None] = []
    vertices: dict = {}
    edges: set = set()
    bottoms: list = []
    index = 0
    last_members = None
    first_seen: dict = {}
    for t, v in enumerate(path):
        vertices.setdefault(v, None)
        if t and (path[t - 1], v) not in edges:
            edges.add((path[t - 1], v))
            bottoms = _bottom_sccs(list(vertices), edges)
        members = _match_suffix(path, t + 1, bottoms) if bottoms else None
        if members is None:
            out.append(None)
            continue
        if members != last_members:
            index += 1
            last_members = members
        born = first_seen.setdefault(members, t)
        verdict = classify_scc(members, pairs) if pairs is not None else None
        out.append(Candidate(members, index, _strength_at(path, t + 1, members, born), verdict))
    return out


def naive_candidate(path: Sequence[Hashable], pairs=None) -> Candidate | None:
    """Candidate of ``path`` with its index, strength and (given pairs) verdict."""
    if not path:
        raise ValueError("path must be nonempty")
    return naive_trace(path, pairs)[-1]


def naive_strength(path: Sequence[Hashable]) -> int:
    """Strength of the candidate of ``path``; 0 when it has none."""
    members = candidate_members(path)
    if members is None:
        return 0
    # birthday: shortest prefix with the same candidate
    born = next(t for t in range(1, len(path) + 1) if candidate_members(path[:t]) == members) - 1
    return _strength_at(path, len(path), members, born)
