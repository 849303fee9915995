"""Labelled Markov chains, deterministic Rabin automata and their product.

Propositions are kept in an ordered tuple ``ap``; a *letter* (a subset of
``ap``) is an int bitset where bit ``k`` is set iff ``ap[k]`` holds.  Chain and
automaton states are dense ints; names are only kept for I/O.
"""
from __future__ import annotations

import enum
import functools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ConfigurationError

PROB_TOL = 1e-9


class Verdict(enum.Enum):
    GOOD = "good"
    BAD = "bad"


def letter_of(props: Iterable[str], ap: Sequence[str]) -> int:
    """Encode a set of proposition names as a bitset over ``ap``."""
    pos = {name: k for k, name in enumerate(ap)}
    letter = 0
    for name in props:
        if name not in pos:
            raise ConfigurationError(f"unknown atomic proposition {name!r}")
        letter |= 1 << pos[name]
    return letter


def props_of(letter: int, ap: Sequence[str]) -> frozenset[str]:
    return frozenset(name for k, name in enumerate(ap) if letter >> k & 1)


@dataclass(frozen=True, eq=False)
class MarkovChain:
    """A finite labelled Markov chain.

    ``transitions[s]`` lists ``(successor, probability)`` pairs; only positive
    probabilities are stored.  ``labels[s]`` is the letter of state ``s``.
    """

    states: tuple[str, ...]
    transitions: tuple[tuple[tuple[int, float], ...], ...]
    initial: tuple[float, ...]
    labels: tuple[int, ...]
    ap: tuple[str, ...]
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.states)
        if n == 0:
            raise ConfigurationError("a Markov chain needs at least one state")
        if len(set(self.states)) != n:
            raise ConfigurationError("duplicate state names")
        if len(self.transitions) != n or len(self.initial) != n or len(self.labels) != n:
            raise ConfigurationError("transitions, initial and labels must have one entry per state")
        if len(set(self.ap)) != len(self.ap):
            raise ConfigurationError("duplicate atomic propositions")
        full = (1 << len(self.ap)) - 1
        for s, row in enumerate(self.transitions):
            if not row:
                raise ConfigurationError(f"state {self.states[s]!r} has no outgoing transition")
            seen = set()
            total = 0.0
            for t, p in row:
                if not 0 <= t < n:
                    raise ConfigurationError(f"state {self.states[s]!r} has a transition to unknown state {t}")
                if t in seen:
                    raise ConfigurationError(f"duplicate transition {self.states[s]!r} -> {self.states[t]!r}")
                if not 0.0 < p <= 1.0 + PROB_TOL:
                    raise ConfigurationError(
                        f"transition {self.states[s]!r} -> {self.states[t]!r} has probability {p} outside (0,1]")
                seen.add(t)
                total += p
            if abs(total - 1.0) > PROB_TOL:
                raise ConfigurationError(f"outgoing probabilities of {self.states[s]!r} sum to {total}")
        if any(p < 0 for p in self.initial) or abs(sum(self.initial) - 1.0) > PROB_TOL:
            raise ConfigurationError(f"initial distribution sums to {sum(self.initial)}")
        if any(not 0 <= lab <= full for lab in self.labels):
            raise ConfigurationError("label outside the proposition alphabet")
        object.__setattr__(self, "index", {name: k for k, name in enumerate(self.states)})

    @classmethod
    def from_edges(cls, states, edges, initial, labels=None, ap=("p",)):
        """Build a chain from names.

        ``edges`` is an iterable of ``(src, dst, prob)``; ``initial`` is either a
        single state name or a mapping name -> probability; ``labels`` maps a
        state name to the set of propositions holding there.
        """
        states = tuple(states)
        idx = {name: k for k, name in enumerate(states)}
        rows = [[] for _ in states]
        for src, dst, prob in edges:
            rows[idx[src]].append((idx[dst], float(prob)))
        if isinstance(initial, str):
            initial = {initial: 1.0}
        init = [0.0] * len(states)
        for name, prob in initial.items():
            init[idx[name]] = float(prob)
        labels = labels or {}
        labs = tuple(letter_of(labels.get(name, ()), ap) for name in states)
        return cls(states, tuple(tuple(r) for r in rows), tuple(init), labs, tuple(ap))

    @property
    def n_states(self) -> int:
        return len(self.states)

    def label_set(self, s: int) -> frozenset[str]:
        return props_of(self.labels[s], self.ap)

    def prob(self, s: int, t: int) -> float:
        for u, p in self.transitions[s]:
            if u == t:
                return p
        return 0.0


@dataclass(frozen=True, eq=False)
class RabinAutomaton:
    """A complete deterministic Rabin automaton over the letters of ``ap``.

    ``delta[q][letter]`` is the successor of ``q``; ``pairs`` is a tuple of
    ``(E, F)`` frozensets of automaton states.
    """

    states: tuple[str, ...]
    ap: tuple[str, ...]
    delta: tuple[tuple[int, ...], ...]
    initial: int
    pairs: tuple[tuple[frozenset[int], frozenset[int]], ...]

    def __post_init__(self):
        n = len(self.states)
        n_letters = 1 << len(self.ap)
        if n == 0:
            raise ConfigurationError("a Rabin automaton needs at least one state")
        if len(self.delta) != n:
            raise ConfigurationError("delta must have one row per automaton state")
        for q, row in enumerate(self.delta):
            if len(row) != n_letters:
                raise ConfigurationError(f"delta is not total in state {self.states[q]!r}")
            if any(not 0 <= r < n for r in row):
                raise ConfigurationError(f"delta of {self.states[q]!r} leads to an unknown state")
        if not 0 <= self.initial < n:
            raise ConfigurationError("initial automaton state out of range")
        for e, f in self.pairs:
            if any(not 0 <= q < n for q in e | f):
                raise ConfigurationError("Rabin pair refers to an unknown state")

    @property
    def n_states(self) -> int:
        return len(self.states)

    def step(self, q: int, letter: int) -> int:
        return self.delta[q][letter]


@dataclass(frozen=True, eq=False)
class ProductChain:
    """Reachable fragment of the chain-automaton product.

    Product states are dense ints in BFS discovery order; ``states[i]`` is the
    ``(chain state, automaton state)`` pair.  ``pairs`` are the Rabin pairs
    lifted to sets of product-state ids.  ``pair_e``/``pair_f`` give, per
    product state, the bitmask of pairs whose E / F set contains it.
    """

    chain: MarkovChain
    dra: RabinAutomaton
    states: tuple[tuple[int, int], ...]
    succ: tuple[tuple[int, ...], ...]
    probs: tuple[tuple[float, ...], ...]
    initial: tuple[float, ...]
    pairs: tuple[tuple[frozenset[int], frozenset[int]], ...]
    pair_e: tuple[int, ...]
    pair_f: tuple[int, ...]

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)

    def name(self, i: int) -> str:
        s, q = self.states[i]
        return f"({self.chain.states[s]},{self.dra.states[q]})"

    @functools.cached_property
    def succ_sets(self) -> tuple[frozenset[int], ...]:
        return tuple(frozenset(row) for row in self.succ)

    def has_edge(self, s: int, t: int) -> bool:
        return t in self.succ_sets[s]

    def initial_states(self) -> list[int]:
        return [i for i, p in enumerate(self.initial) if p > 0]

    def classify(self, members: Iterable[int]) -> Verdict:
        return classify_scc(members, self.pairs)


def _letter_permutation(src_ap, dst_ap):
    """Map letters over ``src_ap`` to letters over ``dst_ap`` (same names)."""
    pos = [dst_ap.index(name) for name in src_ap]

    def remap(letter):
        out = 0
        for k, d in enumerate(pos):
            if letter >> k & 1:
                out |= 1 << d
        return out
    return remap


def build_product(chain: MarkovChain, dra: RabinAutomaton) -> ProductChain:
    """Reachable product of ``chain`` and ``dra`` in BFS order from the initial states."""
    if set(chain.ap) != set(dra.ap):
        only_chain = sorted(set(chain.ap) - set(dra.ap))
        only_dra = sorted(set(dra.ap) - set(chain.ap))
        raise ConfigurationError(
            f"atomic propositions differ: chain-only {only_chain}, automaton-only {only_dra}")
    if tuple(chain.ap) == tuple(dra.ap):
        labels = chain.labels
    else:
        remap = _letter_permutation(chain.ap, dra.ap)
        labels = tuple(remap(lab) for lab in chain.labels)

    ids: dict[tuple[int, int], int] = {}
    states: list[tuple[int, int]] = []
    queue: deque[int] = deque()

    def intern(pair):
        if pair not in ids:
            ids[pair] = len(states)
            states.append(pair)
            queue.append(ids[pair])
        return ids[pair]

    init_mass: dict[int, float] = {}
    for s, mu in enumerate(chain.initial):
        if mu > 0:
            i = intern((s, dra.step(dra.initial, labels[s])))
            init_mass[i] = init_mass.get(i, 0.0) + mu

    succ: list[tuple[int, ...]] = []
    probs: list[tuple[float, ...]] = []
    while queue:
        i = queue.popleft()
        s, q = states[i]
        row = sorted(chain.transitions[s])
        succ_row = []
        prob_row = []
        for t, p in row:
            succ_row.append(intern((t, dra.step(q, labels[t]))))
            prob_row.append(p)
        # ids are assigned in BFS order, so row i is appended at position i
        succ.append(tuple(succ_row))
        probs.append(tuple(prob_row))

    initial = tuple(init_mass.get(i, 0.0) for i in range(len(states)))
    pairs = []
    pair_e = [0] * len(states)
    pair_f = [0] * len(states)
    for k, (e, f) in enumerate(dra.pairs):
        lifted_e = frozenset(i for i, (_, q) in enumerate(states) if q in e)
        lifted_f = frozenset(i for i, (_, q) in enumerate(states) if q in f)
        pairs.append((lifted_e, lifted_f))
        for i in lifted_e:
            pair_e[i] |= 1 << k
        for i in lifted_f:
            pair_f[i] |= 1 << k
    return ProductChain(chain, dra, tuple(states), tuple(succ), tuple(probs), initial,
                        tuple(pairs), tuple(pair_e), tuple(pair_f))


def classify_scc(members: Iterable[int], pairs) -> Verdict:
    """GOOD iff some pair (E, F) has no E-state and at least one F-state in ``members``."""
    k = frozenset(members)
    if not k:
        raise ValueError("cannot classify an empty set of states")
    for e, f in pairs:
        if not (k & e) and (k & f):
            return Verdict.GOOD
    return Verdict.BAD


def p_min(chain: MarkovChain) -> float:
    """Smallest listed transition probability."""
    return min(p for row in chain.transitions for _, p in row)
