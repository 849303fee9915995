"""Benchmark chain families, random models and hand-built Rabin automata."""
from __future__ import annotations

import itertools
import math
from functools import lru_cache
from pathlib import Path

import numpy as np

from .core import MarkovChain, ProductChain, RabinAutomaton, build_product
from .errors import ConfigurationError, GenerationError

DEFAULT_PALETTE = (1.0, 0.5, 0.25)


def gen_fig1(n: int) -> MarkovChain:
    """Chain s0..sn where every si either advances or falls back to s0."""
    if n < 1:
        raise ConfigurationError("fig1 needs n >= 1")
    names = [f"s{i}" for i in range(n + 1)] + ["s_good", "s_bad"]
    edges = [("s0", "s0", 0.5), ("s0", "s1", 0.5)]
    for i in range(1, n):
        edges += [(f"s{i}", f"s{i + 1}", 0.5), (f"s{i}", "s0", 0.5)]
    edges += [(f"s{n}", "s_good", 0.5), (f"s{n}", "s_bad", 0.5),
              ("s_good", "s_good", 1.0), ("s_bad", "s_bad", 1.0)]
    return MarkovChain.from_edges(names, edges, "s0", {"s_good": {"p"}})


def gen_fig2(n: int) -> MarkovChain:
    """Chain of n self-looping states leading to an absorbing s_good."""
    if n < 1:
        raise ConfigurationError("fig2 needs n >= 1")
    names = [f"s{i}" for i in range(n)] + ["s_good"]
    edges = []
    for i in range(n):
        edges += [(names[i], names[i], 0.5), (names[i], names[i + 1], 0.5)]
    edges.append(("s_good", "s_good", 1.0))
    return MarkovChain.from_edges(names, edges, "s0", {"s_good": {"p"}})


@lru_cache(maxsize=64)
def _compositions(palette: tuple[float, ...], max_degree: int) -> tuple[tuple[float, ...], ...]:
    """Multisets of palette values summing to one."""
    out = []
    values = sorted(set(palette), reverse=True)
    for k in range(1, max_degree + 1):
        for combo in itertools.combinations_with_replacement(values, k):
            if abs(math.fsum(combo) - 1.0) <= 1e-12:
                out.append(combo)
    return tuple(out)


def gen_random(n: int, seed: int, palette=DEFAULT_PALETTE, max_degree: int = 4,
               ap: tuple[str, ...] = ("p",), label_prob: float = 0.5,
               absorbing: int = 0) -> MarkovChain:
    """Reproducible random chain whose rows are exact palette compositions.

    Each row picks a composition of 1 out of ``palette`` values (at most
    ``min(max_degree, n)`` terms) and distinct successors uniformly.  The
    last ``absorbing`` states get a probability-one self-loop instead, which
    makes several bottom SCCs likely.  Every proposition holds in a state
    independently with ``label_prob``.  The initial state is ``s0``.
    """
    if n < 1:
        raise ConfigurationError("random chains need n >= 1")
    if any(not 0.0 < p <= 1.0 for p in palette):
        raise GenerationError(f"palette entries must lie in (0,1]: {palette}")
    comps = _compositions(tuple(palette), min(max_degree, n))
    if not comps:
        raise GenerationError(f"no combination of palette {tuple(palette)} sums to 1 "
                              f"with at most {min(max_degree, n)} successors")
    rng = np.random.default_rng(seed)
    if not 0 <= absorbing <= n:
        raise ConfigurationError(f"absorbing must lie in 0..{n}")
    rows = []
    for s in range(n):
        combo = comps[rng.integers(len(comps))]
        succ = rng.choice(n, size=len(combo), replace=False)
        if s >= n - absorbing:
            rows.append(((s, 1.0),))
        else:
            rows.append(tuple(sorted(zip(succ.tolist(), combo))))
    labels = tuple(int(sum(1 << k for k in range(len(ap)) if rng.random() < label_prob))
                   for _ in range(n))
    init = (1.0,) + (0.0,) * (n - 1)
    return MarkovChain(tuple(f"s{i}" for i in range(n)), tuple(rows), init, labels, tuple(ap))


def gen_random_dra(n_states: int, seed: int, ap: tuple[str, ...] = ("p",),
                   n_pairs: int = 1) -> RabinAutomaton:
    """Random complete DRA; each state joins E or F of a pair with probability 1/3 each."""
    if n_states < 1:
        raise ConfigurationError("automata need at least one state")
    rng = np.random.default_rng(seed)
    n_letters = 1 << len(ap)
    delta = tuple(tuple(rng.integers(n_states, size=n_letters).tolist()) for _ in range(n_states))
    pairs = []
    for _ in range(n_pairs):
        role = rng.integers(3, size=n_states)
        pairs.append((frozenset(np.flatnonzero(role == 0).tolist()),
                      frozenset(np.flatnonzero(role == 1).tolist())))
    return RabinAutomaton(tuple(f"q{i}" for i in range(n_states)), tuple(ap), delta, 0, tuple(pairs))


def random_product(seed: int, max_states: int = 20, palette=DEFAULT_PALETTE) -> ProductChain:
    """A random product with at most ``max_states`` reachable states."""
    rng = np.random.default_rng(seed)
    n_dra = int(rng.integers(1, 3))
    n_chain = int(rng.integers(1, max_states // n_dra + 1))
    sinks = int(rng.integers(0, min(3, n_chain - 1) + 1))
    chain = gen_random(n_chain, int(rng.integers(2 ** 63)), palette, absorbing=sinks)
    dra = gen_random_dra(n_dra, int(rng.integers(2 ** 63)), n_pairs=int(rng.integers(1, 3)))
    return build_product(chain, dra)


def _dra(states, delta, pairs, names):
    ids = {name: k for k, name in enumerate(states)}
    rows = tuple(tuple(ids[delta[q][letter]] for letter in (0, 1)) for q in states)
    lifted = tuple((frozenset(ids[q] for q in e), frozenset(ids[q] for q in f)) for e, f in pairs)
    return RabinAutomaton(tuple(names or states), ("p",), rows, 0, lifted)


BUILTIN_PROPERTIES = ("Fp", "Gp", "GFp", "FGp", "GFimpliesFG")


def builtin_dra(name: str) -> RabinAutomaton:
    """Hand-built DRA over the single proposition ``p``.

    Each delta row maps ``(letter without p, letter with p)``.
    """
    if name == "Fp":
        return _dra(["wait", "seen"], {"wait": ("wait", "seen"), "seen": ("seen", "seen")},
                    [((), ("seen",))], None)
    if name == "Gp":
        return _dra(["ok", "broken"], {"ok": ("broken", "ok"), "broken": ("broken", "broken")},
                    [(("broken",), ("ok",))], None)
    if name == "GFp":
        return _dra(["np", "p"], {"np": ("np", "p"), "p": ("np", "p")}, [((), ("p",))], None)
    if name == "FGp":
        return _dra(["np", "p"], {"np": ("np", "p"), "p": ("np", "p")}, [(("np",), ("p",))], None)
    if name == "GFimpliesFG":
        # GF p -> FG p is FG !p or FG p
        row = ("np", "p")
        return _dra(["init", "np", "p"], {"init": row, "np": row, "p": row},
                    [(("p",), ("np",)), (("np",), ("p",))], None)
    raise ConfigurationError(f"unknown builtin property {name!r}; known: {', '.join(BUILTIN_PROPERTIES)}")


def accepts_lasso(dra: RabinAutomaton, u, v) -> bool:
    """Whether ``dra`` accepts the ultimately periodic word ``u . v^omega`` (letters as ints)."""
    if not v:
        raise ValueError("the periodic part must be nonempty")
    q = dra.initial
    for letter in u:
        q = dra.step(q, letter)
    seen = {}
    starts = []
    while q not in seen:
        seen[q] = len(starts)
        starts.append(q)
        for letter in v:
            q = dra.step(q, letter)
    # states visited infinitely often: those on the repeating loop of v-blocks
    inf = set()
    for q0 in starts[seen[q]:]:
        for letter in v:
            q0 = dra.step(q0, letter)
            inf.add(q0)
    return any(not (inf & e) and (inf & f) for e, f in dra.pairs)


def resolve_model(spec: str) -> MarkovChain:
    """``builtin:fig1:<n>``, ``builtin:fig2:<n>``, ``builtin:random:<n>:<seed>`` or a chain file."""
    if spec.startswith("builtin:"):
        parts = spec.split(":")
        try:
            if parts[1] in ("fig1", "fig2") and len(parts) == 3:
                n = int(parts[2])
                return gen_fig1(n) if parts[1] == "fig1" else gen_fig2(n)
            if parts[1] == "random" and len(parts) == 4:
                return gen_random(int(parts[2]), int(parts[3]))
        except ValueError as exc:
            raise ConfigurationError(f"bad builtin model {spec!r}: {exc}") from None
        raise ConfigurationError(f"unknown builtin model {spec!r}")
    from .chainfmt import parse_chain
    return parse_chain(_read(spec))


def resolve_property(spec: str) -> RabinAutomaton:
    """``prop:<name>`` for a builtin DRA, or an HOA file."""
    if spec.startswith("prop:"):
        return builtin_dra(spec[5:])
    from .hoa import parse_dra_hoa
    return parse_dra_hoa(_read(spec))


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc.strerror}") from None
