import random

import pytest
from hypothesis import given, settings, strategies as st

from resetmon import heap
from resetmon.core import Verdict
from resetmon.errors import ProtocolError
from resetmon.models import random_product
from resetmon.naive import Candidate, candidate_members, naive_candidate, naive_strength, naive_trace
from resetmon.tracker import IncrementalTracker

from conftest import random_walk

# p0 = 0, p1 = 1 in the strength table; the other examples name states by index
TABLE = [0, 1, 1, 1, 0, 1, 0, 0, 1]
TABLE_STRENGTH = {2: 0, 3: 0, 4: 1, 5: 0, 6: 0, 7: 1, 9: 2}


def feed_all(path, product=None):
    t = IncrementalTracker(product)
    out = []
    for s in path:
        t.feed(s)
        out.append(t.candidate())
    return t, out


class TestNaive:
    def test_fig1_examples(self):
        assert naive_candidate([0]) is None
        assert naive_candidate([0, 1]) is None
        assert naive_candidate([0, 0, 1]) is None
        assert naive_candidate([0, 0]).members == {0}
        assert naive_candidate([0, 1, 0, 1]).members == {0, 1}

    def test_fig2_examples(self):
        assert naive_candidate([0, 1, 1]).members == {1}
        assert naive_candidate([0, 1, 1, 2]) is None
        assert naive_candidate([0, 1, 1, 2, 2]).members == {2}

    def test_single_visit(self):
        assert naive_candidate(["x"]) is None
        with pytest.raises(ValueError):
            naive_candidate([])

    @pytest.mark.parametrize("length,expected", sorted(TABLE_STRENGTH.items()))
    def test_strength_table(self, length, expected):
        assert naive_strength(TABLE[:length]) == expected

    def test_strength_table_candidates(self):
        members = [candidate_members(TABLE[:k]) for k in range(2, 10)]
        assert members[0] is None
        assert members[1:3] == [{1}, {1}]
        assert all(m == {0, 1} for m in members[3:])

    def test_trace_agrees_with_literal_strength(self):
        rng = random.Random(4)
        for _ in range(100):
            prod = random_product(rng.randrange(10 ** 6))
            path = random_walk(prod, rng.randint(1, 40), rng)
            trace = naive_trace(path)
            for k in range(1, len(path) + 1):
                cand = trace[k - 1]
                assert (cand.members if cand else None) == candidate_members(path[:k])
                assert (cand.strength if cand else 0) == naive_strength(path[:k])

    def test_index_counts_distinct_consecutive(self):
        # candidates {1}, {0,1}, then {2}
        trace = naive_trace([0, 1, 1, 1, 0, 1, 2, 2])
        assert [c.index if c else None for c in trace] == [None, None, 1, 1, 2, 2, None, 3]


class TestHeap:
    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 9), st.integers(0, 3)), max_size=200))
    def test_matches_sorted_reference(self, ops):
        nodes = [heap.Node(s) for s in range(10)]
        root = None
        for n in nodes:
            root = heap.meld(root, n)
        keys = {s: (-1, 0) for s in range(10)}
        for state, bump in ops:
            b, v = keys[state]
            new = (b + bump, 0) if bump else (b, v + 1)
            keys[state] = new
            root = heap.set_key(root, nodes[state], *new)
            assert root.key == min((b, v, s) for s, (b, v) in keys.items())
            assert sorted(n.state for n in heap.iter_nodes(root)) == list(range(10))

    def test_decrease_rejected(self):
        n = heap.Node(0, 5, 5)
        with pytest.raises(ValueError):
            heap.set_key(n, n, 5, 4)

    def test_delete_min_order(self):
        root = None
        for s, key in enumerate([(3, 1), (1, 2), (2, 0), (1, 1)]):
            root = heap.meld(root, heap.Node(s, *key))
        out = []
        while root is not None:
            out.append(root.state)
            root = heap.delete_min(root)
        assert out == [3, 1, 2, 0]


class TestTrackerExamples:
    def test_fresh(self):
        t = IncrementalTracker()
        assert t.n == 0 and t.candidate() is None and t.strength() == 0

    def test_independent_instances(self):
        a, b = IncrementalTracker(), IncrementalTracker()
        a.feed(0)
        a.feed(0)
        assert b.n == 0 and b.candidate() is None and not b.disc

    def test_first_visit(self):
        t = IncrementalTracker()
        assert t.step(None, 0) == 1
        assert t.n == 1 and t.candidate() is None

    def test_self_loop(self):
        t = IncrementalTracker()
        t.feed(0)
        assert t.feed(0) == 2
        assert t.candidate() == Candidate(frozenset({0}), 1, 0)
        t.feed(0)
        assert t.strength() == 1

    def test_two_cycle_merges(self):
        t = IncrementalTracker()
        t.feed(0)
        t.feed(1)
        assert t.step(1, 0) == 3
        assert t.candidate() == Candidate(frozenset({0, 1}), 1, 0)
        assert t.roots == [1]

    def test_elementary_circuit_extracts_all(self):
        k = 12
        t = IncrementalTracker()
        for s in range(k):
            t.feed(s)
        before = t.ops["extract_max"]
        t.feed(0)
        assert t.ops["extract_max"] - before == k
        assert t.candidate().members == frozenset(range(k))

    def test_strength_table(self):
        t = IncrementalTracker()
        got = {}
        for k, s in enumerate(TABLE, start=1):
            t.feed(s)
            got[k] = t.strength()
        assert {k: got[k] for k in TABLE_STRENGTH} == TABLE_STRENGTH
        assert t.candidate().members == {0, 1}

    def test_wrong_source(self):
        t = IncrementalTracker()
        t.feed(0)
        with pytest.raises(ProtocolError):
            t.step(1, 2)
        with pytest.raises(ProtocolError):
            IncrementalTracker().step(0, 1)

    def test_non_edge(self, fig2_fp):
        prod = fig2_fp[3]
        t = IncrementalTracker(prod)
        t.feed(0)
        with pytest.raises(ProtocolError, match="successor"):
            t.feed(2)

    def test_dump(self):
        t, _ = feed_all([0, 1, 1, 2])
        lines = t.dump().splitlines()
        assert lines[0].startswith("N=3")
        assert lines[1:] == ["root 1: 0:(_,0)", "root 2: 1:(3,0)", "root 3: 2:(_,0)"]


def _compare(prod, path):
    ref = naive_trace(path, prod.pairs)
    t = IncrementalTracker(prod)
    for k, s in enumerate(path):
        t.feed(s)
        assert t.candidate() == ref[k], f"step {k}\n{t.dump()}"


class TestDifferential:
    @settings(max_examples=150, deadline=None)
    @given(st.integers(0, 10 ** 6), st.integers(1, 120), st.integers(0, 10 ** 6))
    def test_random_products(self, prod_seed, length, walk_seed):
        prod = random_product(prod_seed)
        _compare(prod, random_walk(prod, length, random.Random(walk_seed)))

    @settings(max_examples=150, deadline=None)
    @given(st.lists(st.integers(0, 5), min_size=1, max_size=60))
    def test_arbitrary_sequences(self, path):
        # any sequence is a walk of the complete graph
        ref = naive_trace(path)
        t = IncrementalTracker()
        for k, s in enumerate(path):
            t.feed(s)
            assert t.candidate() == ref[k]


class TestDynamics:
    @pytest.mark.parametrize("seed", range(40))
    def test_strength_and_membership(self, seed):
        rng = random.Random(seed)
        prod = random_product(seed)
        path = random_walk(prod, 300, rng)
        t = IncrementalTracker(prod)
        prev = None
        for s in path:
            comps_before = t.components()
            case = t.feed(s)
            cand = t.candidate()
            if cand is not None:
                if prev is not None and cand.index == prev.index:
                    assert cand.members == prev.members
                    assert prev.strength <= cand.strength <= prev.strength + 1
                else:
                    assert cand.strength == 0
                if case == 3 and prev is not None and cand.index != prev.index:
                    absorbed = [c for c in comps_before if c <= cand.members]
                    assert cand.members > (frozenset().union(*absorbed) & prev.members)
            # the SCCs of the explored graph are the root ranges
            assert frozenset().union(*t.components()) == frozenset(t.disc)
            prev = cand
        assert sum(t.ops.values()) <= 4 * len(path)

    @pytest.mark.parametrize("seed", range(10))
    def test_final_candidate_is_bscc(self, seed):
        from resetmon.graph import scc_decompose
        prod = random_product(seed)
        dec = scc_decompose(prod)
        bottoms = {frozenset(dec.components[c]) for c in dec.bottoms()}
        t = IncrementalTracker(prod)
        for s in random_walk(prod, 3000, random.Random(seed)):
            t.feed(s)
        assert t.candidate().members in bottoms
        assert t.strength() >= 5
        verdict = prod.classify(t.candidate().members)
        assert t.verdict is verdict and verdict in (Verdict.GOOD, Verdict.BAD)
