"""Deterministic Rabin automata in a subset of the HOA v1 format.

Accepted subset: one initial state, state-based acceptance marks, an
acceptance condition that is a disjunction of ``Fin(i) & Inf(j)`` pairs,
and explicit edge labels (``t``, ``f``, AP indices, ``!``, ``&``, ``|`` and
parentheses).  Each state must have exactly one enabled edge per letter.
"""
from __future__ import annotations

import re
from typing import Callable

from .core import RabinAutomaton
from .errors import ParseError

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>/\*.*?\*/)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<header>[A-Za-z_][A-Za-z0-9_-]*:)
  | (?P<marker>--BODY--|--END--|--ABORT--)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_@][A-Za-z0-9_-]*)
  | (?P<punct>[\[\]{}()!&|])
""", re.VERBOSE | re.DOTALL)


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError("H_SYNTAX", f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, code, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(code, msg, tok.line, tok.col)

    def expect(self, kind, text=None, code="H_SYNTAX"):
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            self.fail(code, f"expected {text or kind}, found {t.text or 'end of input'!r}")
        return self.take()

    def integer(self) -> int:
        return int(self.expect("int").text)


def _label(p: _Parser, n_ap: int) -> Callable[[int], bool]:
    """Parse a boolean label expression up to the closing bracket."""

    def disj():
        terms = [conj()]
        while p.tok.text == "|":
            p.take()
            terms.append(conj())
        return terms[0] if len(terms) == 1 else (lambda x, ts=tuple(terms): any(t(x) for t in ts))

    def conj():
        terms = [atom()]
        while p.tok.text == "&":
            p.take()
            terms.append(atom())
        return terms[0] if len(terms) == 1 else (lambda x, ts=tuple(terms): all(t(x) for t in ts))

    def atom():
        t = p.tok
        if t.text == "!":
            p.take()
            inner = atom()
            return lambda x: not inner(x)
        if t.text == "(":
            p.take()
            inner = disj()
            p.expect("punct", ")")
            return inner
        if t.kind == "ident" and t.text in ("t", "f"):
            p.take()
            value = t.text == "t"
            return lambda x: value
        if t.kind == "int":
            k = int(p.take().text)
            if k >= n_ap:
                p.fail("H_UNDECLARED_AP", f"proposition {k} is not declared (AP count {n_ap})", t)
            return lambda x: bool(x >> k & 1)
        if t.kind == "ident" and t.text.startswith("@"):
            p.fail("H_SYNTAX", "aliases are not supported")
        p.fail("H_SYNTAX", f"unexpected {t.text or 'end of input'!r} in label")

    return disj()


def _acceptance(p: _Parser, n_sets: int) -> list[tuple[int, int]]:
    """``Fin(i) & Inf(j)`` terms joined by ``|`` (optionally parenthesised)."""
    start = p.tok
    pairs = []
    if start.kind == "ident" and start.text == "f":
        p.take()
        return pairs  # accepts nothing

    def cond():
        kind = p.expect("ident").text
        if kind not in ("Fin", "Inf"):
            p.fail("H_ACCEPTANCE", f"unsupported acceptance atom {kind!r}", start)
        p.expect("punct", "(")
        t = p.tok
        k = p.integer()
        if k >= n_sets:
            p.fail("H_ACCEPTANCE", f"acceptance set {k} out of range", t)
        p.expect("punct", ")")
        return kind, k

    while True:
        paren = p.tok.text == "("
        if paren:
            p.take()
        if p.tok.kind != "ident" or p.tok.text not in ("Fin", "Inf"):
            p.fail("H_ACCEPTANCE", "acceptance must be a disjunction of Fin(i) & Inf(j) pairs", start)
        first = cond()
        if p.tok.text != "&":
            p.fail("H_ACCEPTANCE", "acceptance must pair every Inf with a Fin (Rabin shape)", start)
        p.take()
        second = cond()
        if {first[0], second[0]} != {"Fin", "Inf"}:
            p.fail("H_ACCEPTANCE", "each disjunct must be Fin(i) & Inf(j)", start)
        fin = first[1] if first[0] == "Fin" else second[1]
        inf = first[1] if first[0] == "Inf" else second[1]
        pairs.append((fin, inf))
        if paren:
            p.expect("punct", ")")
        if p.tok.text != "|":
            return pairs
        p.take()


def parse_dra_hoa(text: str) -> RabinAutomaton:
    p = _Parser(text)
    first = p.tok
    if first.text != "HOA:":
        p.fail("H_SYNTAX", "input must start with 'HOA: v1'")
    p.take()
    if p.tok.text != "v1":
        p.fail("H_SYNTAX", f"unsupported HOA version {p.tok.text!r}")
    p.take()

    n_states = None
    start = None
    aps: list[str] | None = None
    pairs = None
    n_sets = None
    while p.tok.kind == "header":
        if p.tok.text == "State:":
            p.fail("H_MISSING_BODY", "state definitions must follow --BODY--")
        head = p.take()
        name = head.text[:-1]
        if name == "States":
            n_states = p.integer()
        elif name == "Start":
            if start is not None:
                p.fail("H_NONDET", "more than one initial state", head)
            start = p.integer()
            if p.tok.text == "&":
                p.fail("H_NONDET", "conjunctive initial states are not deterministic")
        elif name == "AP":
            count = p.integer()
            aps = []
            while p.tok.kind == "str":
                aps.append(p.take().text[1:-1])
            if len(aps) != count:
                p.fail("H_SYNTAX", f"AP declares {count} propositions but lists {len(aps)}", head)
        elif name == "Acceptance":
            n_sets = p.integer()
            pairs = _acceptance(p, n_sets)
        else:
            # name, tool, acc-name, properties, ...: skip the values
            while p.tok.kind in ("str", "int", "ident") or p.tok.text in ("!",):
                p.take()
    if p.tok.kind != "marker" or p.tok.text != "--BODY--":
        p.fail("H_MISSING_BODY", f"expected --BODY--, found {p.tok.text or 'end of input'!r}")
    p.take()
    if n_states is None or start is None or aps is None or pairs is None:
        missing = [k for k, v in (("States", n_states), ("Start", start), ("AP", aps),
                                  ("Acceptance", pairs)) if v is None]
        p.fail("H_SYNTAX", f"missing header item(s): {', '.join(missing)}", first)
    if not 0 <= start < n_states:
        p.fail("H_SYNTAX", f"initial state {start} out of range", first)

    n_letters = 1 << len(aps)
    delta: list[list[int | None]] = [[None] * n_letters for _ in range(n_states)]
    marks: list[set[int]] = [set() for _ in range(n_states)]
    declared = set()
    names = [str(q) for q in range(n_states)]
    while p.tok.text == "State:":
        head = p.take()
        st = p.tok
        q = p.integer()
        if not 0 <= q < n_states:
            p.fail("H_SYNTAX", f"state {q} out of range", st)
        if q in declared:
            p.fail("H_SYNTAX", f"state {q} defined twice", st)
        declared.add(q)
        if p.tok.kind == "str":
            names[q] = p.take().text[1:-1]
        if p.tok.text == "[" and p.tok.line == head.line:
            p.fail("H_SYNTAX", "state labels are not supported")
        if p.tok.text == "{":
            p.take()
            while p.tok.kind == "int":
                t = p.tok
                k = p.integer()
                if k >= n_sets:
                    p.fail("H_ACCEPTANCE", f"acceptance set {k} out of range", t)
                marks[q].add(k)
            p.expect("punct", "}")
        while p.tok.text == "[":
            lab_tok = p.take()
            label = _label(p, len(aps))
            p.expect("punct", "]")
            dst_tok = p.tok
            if dst_tok.kind != "int":
                p.fail("H_SYNTAX", "expected a successor state")
            dst = p.integer()
            if p.tok.text == "&":
                p.fail("H_NONDET", "universal branching is not deterministic")
            if not 0 <= dst < n_states:
                p.fail("H_SYNTAX", f"successor {dst} out of range", dst_tok)
            if p.tok.text == "{":
                p.fail("H_ACCEPTANCE", "transition-based acceptance is not supported")
            for letter in range(n_letters):
                if label(letter):
                    if delta[q][letter] is not None and delta[q][letter] != dst:
                        p.fail("H_NONDET", f"state {q} has two successors on one letter", lab_tok)
                    if delta[q][letter] is not None:
                        p.fail("H_NONDET", f"state {q} has overlapping edge labels", lab_tok)
                    delta[q][letter] = dst
        if p.tok.kind == "int":
            p.fail("H_SYNTAX", "implicit edge labels are not supported")
        if p.tok.text not in ("State:", "--END--"):
            p.fail("H_SYNTAX", f"unexpected {p.tok.text or 'end of input'!r} in body")
    if p.tok.text != "--END--":
        p.fail("H_SYNTAX", "expected --END--")
    p.take()
    if p.tok.kind != "eof":
        p.fail("H_SYNTAX", "trailing input after --END--")
    for q in range(n_states):
        for letter in range(n_letters):
            if delta[q][letter] is None:
                raise ParseError("H_INCOMPLETE", f"state {q} has no edge for letter {letter:0{len(aps)}b}")

    lifted = tuple((frozenset(q for q in range(n_states) if fin in marks[q]),
                    frozenset(q for q in range(n_states) if inf in marks[q])) for fin, inf in pairs)
    return RabinAutomaton(tuple(names), tuple(aps),
                          tuple(tuple(row) for row in delta), start, lifted)


def serialize_hoa(dra: RabinAutomaton) -> str:
    """HOA text with acceptance sets ``2k`` (E of pair k) and ``2k+1`` (F of pair k)."""
    k = len(dra.pairs)
    cond = " | ".join(f"(Fin({2 * i}) & Inf({2 * i + 1}))" for i in range(k)) or "f"
    out = ["HOA: v1", f"States: {dra.n_states}", f"Start: {dra.initial}",
           f"AP: {len(dra.ap)}" + "".join(f' "{a}"' for a in dra.ap),
           f"acc-name: Rabin {k}", f"Acceptance: {2 * k} {cond}", "--BODY--"]
    n_ap = len(dra.ap)
    for q in range(dra.n_states):
        sets = [2 * i for i, (e, _) in enumerate(dra.pairs) if q in e]
        sets += [2 * i + 1 for i, (_, f) in enumerate(dra.pairs) if q in f]
        out.append(f"State: {q}" + (" {" + " ".join(map(str, sorted(sets))) + "}" if sets else ""))
        for letter in range(1 << n_ap):
            cube = "&".join(("" if letter >> a & 1 else "!") + str(a) for a in range(n_ap)) or "t"
            out.append(f"[{cube}] {dra.delta[q][letter]}")
    out.append("--END--")
    return "\n".join(out) + "\n"
