import itertools
import math
from collections import Counter

import numpy as np
import pytest

from resetmon.chainfmt import chains_equal
from resetmon.core import build_product, p_min
from resetmon.errors import ConfigurationError, GenerationError
from resetmon.graph import scc_decompose
from resetmon.models import (BUILTIN_PROPERTIES, accepts_lasso, builtin_dra, gen_fig1, gen_fig2, gen_random,
                             gen_random_dra, resolve_model, resolve_property)


def edge_set(chain):
    return {(chain.states[s], chain.states[t], p) for s, row in enumerate(chain.transitions) for t, p in row}


FIG1_EXPECTED = {
    1: {("s0", "s0", .5), ("s0", "s1", .5), ("s1", "s_good", .5), ("s1", "s_bad", .5)},
    2: {("s0", "s0", .5), ("s0", "s1", .5), ("s1", "s2", .5), ("s1", "s0", .5),
        ("s2", "s_good", .5), ("s2", "s_bad", .5)},
    3: {("s0", "s0", .5), ("s0", "s1", .5), ("s1", "s2", .5), ("s1", "s0", .5), ("s2", "s3", .5),
        ("s2", "s0", .5), ("s3", "s_good", .5), ("s3", "s_bad", .5)},
    4: {("s0", "s0", .5), ("s0", "s1", .5), ("s1", "s2", .5), ("s1", "s0", .5), ("s2", "s3", .5),
        ("s2", "s0", .5), ("s3", "s4", .5), ("s3", "s0", .5), ("s4", "s_good", .5), ("s4", "s_bad", .5)},
}
SINKS = {("s_good", "s_good", 1.0), ("s_bad", "s_bad", 1.0)}

FIG2_EXPECTED = {
    1: {("s0", "s0", .5), ("s0", "s_good", .5)},
    2: {("s0", "s0", .5), ("s0", "s1", .5), ("s1", "s1", .5), ("s1", "s_good", .5)},
    3: {("s0", "s0", .5), ("s0", "s1", .5), ("s1", "s1", .5), ("s1", "s2", .5), ("s2", "s2", .5),
        ("s2", "s_good", .5)},
    4: {("s0", "s0", .5), ("s0", "s1", .5), ("s1", "s1", .5), ("s1", "s2", .5), ("s2", "s2", .5),
        ("s2", "s3", .5), ("s3", "s3", .5), ("s3", "s_good", .5)},
}


class TestFamilies:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_fig1_adjacency(self, n):
        chain = gen_fig1(n)
        assert edge_set(chain) == FIG1_EXPECTED[n] | SINKS
        assert chain.n_states == n + 3
        assert [chain.states[s] for s in range(chain.n_states) if chain.labels[s]] == ["s_good"]

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_fig2_adjacency(self, n):
        chain = gen_fig2(n)
        assert edge_set(chain) == FIG2_EXPECTED[n] | {("s_good", "s_good", 1.0)}
        assert chain.n_states == n + 1

    def test_fig1_two_bottoms(self):
        for n in range(1, 8):
            prod = build_product(gen_fig1(n), builtin_dra("Fp"))
            assert len(scc_decompose(prod).bottoms()) == 2
            assert p_min(gen_fig1(n)) == 0.5

    def test_fig2_direct_path(self):
        for n in range(1, 8):
            chain = gen_fig2(n)
            prob = math.prod(chain.prob(i, i + 1) for i in range(n))
            assert prob == 2.0 ** -n

    def test_bad_n(self):
        for gen in (gen_fig1, gen_fig2):
            with pytest.raises(ConfigurationError):
                gen(0)


class TestRandom:
    def test_deterministic(self):
        assert chains_equal(gen_random(5, 42, palette=(0.5,)), gen_random(5, 42, palette=(0.5,)))
        assert not chains_equal(gen_random(30, 1), gen_random(30, 2))

    def test_rows_exact(self):
        for seed in range(50):
            chain = gen_random(15, seed)
            for row in chain.transitions:
                assert sum(p for _, p in row) == 1.0
                assert {p for _, p in row} <= {1.0, 0.5, 0.25}

    def test_palette_tenths(self):
        chain = gen_random(10, 3, palette=(0.1, 0.9), max_degree=2)
        assert all(abs(math.fsum(p for _, p in row) - 1) <= 1e-12 for row in chain.transitions)

    def test_impossible_palette(self):
        with pytest.raises(GenerationError):
            gen_random(5, 0, palette=(0.3,))
        with pytest.raises(GenerationError):
            gen_random(1, 0, palette=(0.5,))

    def test_absorbing_sinks(self):
        chain = gen_random(10, 7, absorbing=3)
        assert [chain.transitions[s] for s in (7, 8, 9)] == [((7, 1.0),), ((8, 1.0),), ((9, 1.0),)]

    def test_edge_frequencies(self):
        chain = gen_random(12, 5)
        rng = np.random.default_rng(0)
        steps = 100_000
        s = 0
        visits, moves = Counter(), Counter()
        for u in rng.random(steps):
            row = chain.transitions[s]
            acc = 0.0
            for t, p in row:
                acc += p
                if u < acc:
                    break
            visits[s] += 1
            moves[s, t] += 1
            s = t
        for (a, b), k in moves.items():
            n = visits[a]
            p = chain.prob(a, b)
            sigma = math.sqrt(max(p * (1 - p), 1e-12) / n)
            assert abs(k / n - p) <= 3 * sigma + 1e-12

    def test_random_dra_complete(self):
        dra = gen_random_dra(4, 1, ap=("p", "q"), n_pairs=2)
        assert len(dra.delta) == 4 and all(len(row) == 4 for row in dra.delta)
        assert len(dra.pairs) == 2


SEMANTICS = {
    "Fp": lambda u, v: 1 in u or 1 in v,
    "Gp": lambda u, v: all(u) and all(v),
    "GFp": lambda u, v: 1 in v,
    "FGp": lambda u, v: all(v),
    "GFimpliesFG": lambda u, v: 1 not in v or all(v),
}


def words(max_len, min_len=0):
    for k in range(min_len, max_len + 1):
        yield from itertools.product((0, 1), repeat=k)


class TestBuiltinDra:
    @pytest.mark.parametrize("name", BUILTIN_PROPERTIES)
    def test_lasso_oracle(self, name):
        dra = builtin_dra(name)
        assert dra.n_states <= 4
        semantics = SEMANTICS[name]
        vs = list(words(6, 1))
        for u in words(6):
            for v in vs:
                assert accepts_lasso(dra, u, v) == semantics(u, v), (u, v)

    def test_examples(self):
        assert accepts_lasso(builtin_dra("Fp"), (), (1,))
        assert not accepts_lasso(builtin_dra("Fp"), (), (0,))
        assert accepts_lasso(builtin_dra("GFp"), (), (0, 1))
        assert not accepts_lasso(builtin_dra("GFp"), (), (0,))
        assert not accepts_lasso(builtin_dra("FGp"), (), (0, 1))

    def test_unknown(self):
        with pytest.raises(ConfigurationError, match="known"):
            builtin_dra("Xp")


class TestResolve:
    def test_builtins(self):
        assert chains_equal(resolve_model("builtin:fig1:3"), gen_fig1(3))
        assert chains_equal(resolve_model("builtin:fig2:5"), gen_fig2(5))
        assert chains_equal(resolve_model("builtin:random:6:9"), gen_random(6, 9))
        assert resolve_property("prop:GFp").delta == builtin_dra("GFp").delta

    @pytest.mark.parametrize("spec", ["builtin:fig3:2", "builtin:fig1:x", "builtin:fig1", "builtin:fig1:0",
                                      "/no/such/file"])
    def test_bad_model(self, spec):
        with pytest.raises(ConfigurationError):
            resolve_model(spec)

    def test_files(self, tmp_path):
        from resetmon.chainfmt import serialize_chain
        from resetmon.hoa import serialize_hoa
        (tmp_path / "m.mc").write_text(serialize_chain(gen_fig2(3)))
        (tmp_path / "p.hoa").write_text(serialize_hoa(builtin_dra("FGp")))
        assert chains_equal(resolve_model(str(tmp_path / "m.mc")), gen_fig2(3))
        assert resolve_property(str(tmp_path / "p.hoa")).delta == builtin_dra("FGp").delta
