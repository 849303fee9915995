"""Explicit-state text format for labelled Markov chains.

    # comment
    mc 2 1
    ap p
    state a [0] init=1
    state b [1]
    a a 1/2
    a b 0.5
    b b 1

The label is a bit string over the ``ap`` line (first character = first
proposition) and may be omitted when no proposition holds.  ``init=`` is
optional and defaults to 0.  Probabilities are decimals or ``a/b``
rationals.  Diagnostics carry a code, a 1-based line and a column.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction

from .core import PROB_TOL, MarkovChain
from .errors import ConfigurationError, ParseError

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*$")


def _tokens(line: str):
    """Whitespace-separated tokens with their 1-based columns."""
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]


def _prob(text: str, line: int, col: int) -> float:
    try:
        value = float(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise ParseError("E_PROB", f"cannot read probability {text!r}", line, col) from None
    if not 0.0 <= value <= 1.0 + PROB_TOL:
        raise ParseError("E_PROB", f"probability {text} outside [0,1]", line, col)
    return value


def parse_chain(text: str) -> MarkovChain:
    header = None
    ap: list[str] | None = None
    names: list[str] = []
    where: dict[str, int] = {}
    labels: list[int] = []
    init: list[float] = []
    rows: list[list[tuple[int, float]]] = []
    seen_edges: set[tuple[int, int]] = set()
    last_line = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        word, col = toks[0]
        if header is None:
            if word != "mc" or len(toks) != 3:
                raise ParseError("E_HEADER", "expected 'mc <nstates> <nap>'", lineno, col)
            try:
                header = (int(toks[1][0]), int(toks[2][0]))
            except ValueError:
                raise ParseError("E_HEADER", "state and proposition counts must be integers",
                                 lineno, toks[1][1]) from None
            if header[0] < 1 or header[1] < 0:
                raise ParseError("E_HEADER", "need at least one state and a non-negative AP count",
                                 lineno, toks[1][1])
            continue
        if ap is None:
            if word != "ap":
                raise ParseError("E_SYNTAX", "expected the 'ap' line after the header", lineno, col)
            ap = [t for t, _ in toks[1:]]
            if len(ap) != header[1]:
                raise ParseError("E_AP", f"header declares {header[1]} propositions, found {len(ap)}",
                                 lineno, col)
            if len(set(ap)) != len(ap):
                raise ParseError("E_AP", "duplicate proposition", lineno, col)
            continue
        if word == "state":
            if rows and any(rows):
                raise ParseError("E_SYNTAX", "state declarations must precede transitions", lineno, col)
            if len(toks) < 2:
                raise ParseError("E_SYNTAX", "state needs a name", lineno, col)
            name, ncol = toks[1]
            if not _NAME.match(name):
                raise ParseError("E_SYNTAX", f"invalid state name {name!r}", lineno, ncol)
            if name in where:
                raise ParseError("E_DUP_STATE", f"state {name!r} declared twice", lineno, ncol)
            letter = 0
            mass = 0.0
            for tok, tcol in toks[2:]:
                if tok.startswith("[") and tok.endswith("]"):
                    bits = tok[1:-1]
                    if len(bits) != len(ap) or set(bits) - {"0", "1"}:
                        raise ParseError("E_LABEL", f"label must be {len(ap)} bits, got {tok!r}",
                                         lineno, tcol)
                    letter = sum(1 << k for k, b in enumerate(bits) if b == "1")
                elif tok.startswith("init="):
                    mass = _prob(tok[5:], lineno, tcol + 5)
                else:
                    raise ParseError("E_SYNTAX", f"unexpected {tok!r}", lineno, tcol)
            where[name] = len(names)
            names.append(name)
            labels.append(letter)
            init.append(mass)
            rows.append([])
            continue
        if len(toks) != 3:
            raise ParseError("E_SYNTAX", "expected '<src> <dst> <prob>'", lineno, col)
        (src, scol), (dst, dcol), (ptxt, pcol) = toks
        for ref, rcol in ((src, scol), (dst, dcol)):
            if ref not in where:
                raise ParseError("E_UNKNOWN_STATE", f"unknown state {ref!r}", lineno, rcol)
        s, t = where[src], where[dst]
        if (s, t) in seen_edges:
            raise ParseError("E_DUP_TRANSITION", f"transition {src} -> {dst} listed twice", lineno, scol)
        p = _prob(ptxt, lineno, pcol)
        if p == 0.0:
            raise ParseError("E_PROB", "transition probabilities must be positive", lineno, pcol)
        seen_edges.add((s, t))
        rows[s].append((t, p))

    if header is None:
        raise ParseError("E_HEADER", "empty input", 1, 1)
    if ap is None:
        raise ParseError("E_SYNTAX", "missing 'ap' line", last_line, 1)
    if len(names) != header[0]:
        raise ParseError("E_STATE_COUNT", f"header declares {header[0]} states, found {len(names)}",
                         last_line, 1)
    for s, row in enumerate(rows):
        total = math.fsum(p for _, p in row)
        if abs(total - 1.0) > PROB_TOL:
            raise ParseError("E_ROWSUM", f"outgoing probabilities of state {names[s]!r} sum to {total:.12g}")
    if abs(math.fsum(init) - 1.0) > PROB_TOL:
        raise ParseError("E_INIT", f"initial distribution sums to {math.fsum(init):.12g}")
    try:
        return MarkovChain(tuple(names), tuple(tuple(r) for r in rows), tuple(init), tuple(labels), tuple(ap))
    except ConfigurationError as exc:
        raise ParseError("E_INVALID", str(exc)) from None


def serialize_chain(chain: MarkovChain) -> str:
    """Text that ``parse_chain`` reads back to an identical chain."""
    out = [f"mc {chain.n_states} {len(chain.ap)}", "ap " + " ".join(chain.ap)]
    for s, name in enumerate(chain.states):
        bits = "".join("1" if chain.labels[s] >> k & 1 else "0" for k in range(len(chain.ap)))
        out.append(f"state {name} [{bits}] init={chain.initial[s]!r}")
    for s, row in enumerate(chain.transitions):
        for t, p in row:
            out.append(f"{chain.states[s]} {chain.states[t]} {p!r}")
    return "\n".join(out) + "\n"


def chains_equal(a: MarkovChain, b: MarkovChain) -> bool:
    return (a.states == b.states and a.transitions == b.transitions and a.initial == b.initial
            and a.labels == b.labels and a.ap == b.ap)
