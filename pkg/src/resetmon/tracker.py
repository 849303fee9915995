"""Incremental candidate and strength tracking along a growing path.

States get a discovery index the first time they are seen.  The SCCs of the
explored graph are contiguous ranges of discovery indices, each starting at
its *root*; ``roots`` keeps the root indices in ascending order, so the
candidate (when defined) is the range of the largest root.  Every root owns a
pairing heap of Visits keys; the minimum key of the top heap yields the
strength.

A Visits key is ``(birthday, visits)``: the birthday of the candidate that
was current when the state was last visited, and how many times the state
was visited after that birthday.  Keys written under an older candidate sort
first and read as zero visits.
"""
from __future__ import annotations

from bisect import bisect_right
from typing import NamedTuple

from . import heap
from .core import ProductChain, Verdict
from .errors import ProtocolError
from .naive import Candidate


class Observation(NamedTuple):
    """What a monitor sees after each step."""

    defined: bool
    verdict: Verdict | None
    index: int
    strength: int


class IncrementalTracker:
    def __init__(self, product: ProductChain | None = None):
        self.product = product
        self.n = 0
        self.disc: dict = {}
        self.order: list = []
        self.roots: list[int] = []
        self.heaps: dict[int, heap.Node] = {}
        self.nodes: dict = {}
        self.pair_counts: dict[int, list[int]] = {}
        self.birthday: int | None = None
        self.index = 0
        self.verdict: Verdict | None = None
        self.length = 0
        self.last = None
        self.ops = {"insert": 0, "extract_max": 0, "merge": 0, "increment": 0}
        self._npairs = product.n_pairs if product is not None else 0
        self._succ = product.succ_sets if product is not None else None

    # -- feeding -----------------------------------------------------------

    def feed(self, state) -> int:
        """Append ``state`` to the path; returns the update case (1, 2 or 3)."""
        return self.step(self.last, state)

    def step(self, s, s2) -> int:
        """Extend the path along the edge ``s -> s2`` (``s`` is ``None`` for the first state)."""
        if self.length == 0:
            if s is not None:
                raise ProtocolError("the first step has no source state")
        else:
            if s != self.last:
                raise ProtocolError(f"edge starts at {s!r} but the path ends at {self.last!r}")
            if self._succ is not None and s2 not in self._succ[s]:
                raise ProtocolError(f"{s2!r} is not a successor of {s!r}")
        self.length += 1
        self.last = s2

        d2 = self.disc.get(s2)
        if d2 is None:
            self._discover(s2)
            return 1
        if self.disc[s] <= d2:
            if self.birthday is None:
                # only a self-loop on the state just discovered gets here
                self._born()
                self._set_visits(s2, 0)
            else:
                self._visit(s2)
            return 2
        if d2 >= self.roots[-1]:
            # s2 already belongs to the candidate: nothing merges
            self._visit(s2)
            return 3
        self._collapse(d2)
        self._born()
        self._set_visits(s2, 0)
        return 3

    def _discover(self, s2):
        self.n += 1
        d = self.n
        self.disc[s2] = d
        self.order.append(s2)
        self.roots.append(d)
        node = heap.Node(s2)
        self.nodes[s2] = node
        self.heaps[d] = node
        if self._npairs:
            e = self.product.pair_e[s2]
            f = self.product.pair_f[s2]
            self.pair_counts[d] = ([e >> k & 1 for k in range(self._npairs)]
                                   + [f >> k & 1 for k in range(self._npairs)])
        self.ops["insert"] += 1
        self.birthday = None
        self.verdict = None

    def _collapse(self, d2):
        merged = None
        counts = [0] * (2 * self._npairs)
        while True:
            r = self.roots.pop()
            self.ops["extract_max"] += 1
            merged = heap.meld(merged, self.heaps.pop(r))
            self.ops["merge"] += 1
            if self._npairs:
                counts = [a + b for a, b in zip(counts, self.pair_counts.pop(r))]
            if r <= d2:
                break
        self.roots.append(r)
        self.ops["insert"] += 1
        self.heaps[r] = merged
        if self._npairs:
            self.pair_counts[r] = counts

    def _born(self):
        self.birthday = self.length
        self.index += 1
        if self.product is None:
            self.verdict = None
            return
        counts = self.pair_counts.get(self.roots[-1], ())
        k = self._npairs
        good = any(counts[i] == 0 and counts[k + i] > 0 for i in range(k))
        self.verdict = Verdict.GOOD if good else Verdict.BAD

    def _set_visits(self, state, visits):
        top = self.roots[-1]
        self.heaps[top] = heap.set_key(self.heaps[top], self.nodes[state], self.birthday, visits)
        self.ops["increment"] += 1

    def _visit(self, state):
        b, v, _ = self.nodes[state].key
        self._set_visits(state, v + 1 if b == self.birthday else 1)

    # -- queries -----------------------------------------------------------

    @property
    def has_candidate(self) -> bool:
        return self.birthday is not None

    @property
    def candidate_size(self) -> int:
        return self.n - self.roots[-1] + 1 if self.birthday is not None else 0

    def strength(self) -> int:
        if self.birthday is None:
            return 0
        b, v, _ = self.heaps[self.roots[-1]].key
        return v if b == self.birthday else 0

    def candidate(self) -> Candidate | None:
        if self.birthday is None:
            return None
        members = frozenset(self.order[self.roots[-1] - 1:])
        return Candidate(members, self.index, self.strength(), self.verdict)

    def observe(self) -> Observation:
        return Observation(self.birthday is not None, self.verdict, self.index, self.strength())

    def root_of(self, state) -> int:
        """Discovery index of the root of the SCC containing ``state``."""
        return self.roots[bisect_right(self.roots, self.disc[state]) - 1]

    def components(self) -> list[frozenset]:
        """SCCs of the explored graph, one per root in ascending order."""
        bounds = self.roots + [self.n + 1]
        return [frozenset(self.order[a - 1:b - 1]) for a, b in zip(bounds, bounds[1:])]

    def dump(self) -> str:
        lines = [f"N={self.n} length={self.length} birthday={self.birthday} index={self.index}"]
        bounds = self.roots + [self.n + 1]
        for a, b in zip(bounds, bounds[1:]):
            members = self.order[a - 1:b - 1]
            visits = " ".join(
                f"{m}:({'_' if self.nodes[m].key[0] < 0 else self.nodes[m].key[0]},{self.nodes[m].key[1]})"
                for m in members)
            lines.append(f"root {a}: {visits}")
        return "\n".join(lines)
