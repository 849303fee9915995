import itertools

import pytest
from hypothesis import given, settings, strategies as st

from resetmon.chainfmt import chains_equal, parse_chain, serialize_chain
from resetmon.errors import ParseError
from resetmon.hoa import parse_dra_hoa, serialize_hoa
from resetmon.models import BUILTIN_PROPERTIES, accepts_lasso, builtin_dra, gen_fig1, gen_random

EXAMPLE = """\
# two states
mc 2 1
ap p
state a [0] init=1
state b [1]
a a 1/2
a b 0.5
b b 1
"""


def code_of(text, parser=parse_chain):
    with pytest.raises(ParseError) as info:
        parser(text)
    return info.value


class TestChainFormat:
    def test_example(self):
        chain = parse_chain(EXAMPLE)
        assert chain.states == ("a", "b")
        assert chain.transitions == (((0, 0.5), (1, 0.5)), ((1, 1.0),))
        assert chain.labels == (0, 1) and chain.initial == (1.0, 0.0)

    def test_multi_ap_label_order(self):
        chain = parse_chain("mc 1 2\nap p q\nstate a [01] init=1\na a 1\n")
        assert chain.label_set(0) == {"q"}

    @pytest.mark.parametrize("text,code,line", [
        ("mc 2\n", "E_HEADER", 1),
        ("ap p\n", "E_HEADER", 1),
        ("mc 1 1\nap p\nstate a init=1\na a 0.9\n", "E_ROWSUM", None),
        ("mc 1 1\nap p\nstate a init=1\na z 1\n", "E_UNKNOWN_STATE", 4),
        ("mc 2 1\nap p\nstate a init=1\nstate b\na b 1/2\na b 1/2\nb b 1\n", "E_DUP_TRANSITION", 6),
        ("mc 1 1\nap p\nstate a init=1\nstate a\n", "E_DUP_STATE", 4),
        ("mc 1 1\nap p\nstate a [11] init=1\na a 1\n", "E_LABEL", 3),
        ("mc 1 1\nap p\nstate a init=1\na a x\n", "E_PROB", 4),
        ("mc 1 1\nap p\nstate a init=1\na a 3/2\n", "E_PROB", 4),
        ("mc 2 1\nap p\nstate a init=1\na a 1\n", "E_STATE_COUNT", 4),
        ("mc 1 1\nap p\nstate a init=0.5\na a 1\n", "E_INIT", None),
        ("mc 1 1\nap p q\n", "E_AP", 2),
        ("mc 1 1\nap p\nstate a init=1\na a 1 extra\n", "E_SYNTAX", 4),
    ])
    def test_diagnostics(self, text, code, line):
        err = code_of(text)
        assert err.code == code
        assert err.line == line

    def test_rowsum_names_state(self):
        err = code_of("mc 1 1\nap p\nstate lonely init=1\nlonely lonely 0.9\n")
        assert "lonely" in str(err)

    def test_position_in_message(self):
        err = code_of("mc 1 1\nap p\nstate a init=1\na  zz 1\n")
        assert (err.line, err.col) == (4, 4)
        assert str(err).startswith("E_UNKNOWN_STATE at line 4, column 4")

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 25), st.integers(0, 10 ** 6), st.sampled_from([(1.0, 0.5, 0.25), (0.1, 0.9), (0.3, 0.7, 1.0)]))
    def test_round_trip(self, n, seed, palette):
        chain = gen_random(n, seed, palette=palette, ap=("p", "q"))
        again = parse_chain(serialize_chain(chain))
        assert chains_equal(chain, again)
        assert serialize_chain(again) == serialize_chain(chain)

    def test_round_trip_fig1(self):
        assert chains_equal(parse_chain(serialize_chain(gen_fig1(4))), gen_fig1(4))


FP_HOA = """\
HOA: v1
name: "F p"
States: 2
Start: 0
AP: 1 "p"
acc-name: Rabin 1
Acceptance: 2 Fin(0) & Inf(1)
--BODY--
State: 0 "wait"
[!0] 0
[0] 1
State: 1 "seen" {1}
[t] 1
--END--
"""


def lasso_equivalent(a, b, max_len=5):
    ws = [w for k in range(max_len + 1) for w in itertools.product((0, 1), repeat=k)]
    return all(accepts_lasso(a, u, v) == accepts_lasso(b, u, v) for u in ws for v in ws if v)


class TestHoa:
    def test_fp(self):
        dra = parse_dra_hoa(FP_HOA)
        ref = builtin_dra("Fp")
        assert dra.states == ("wait", "seen")
        assert dra.delta == ref.delta and dra.pairs == ref.pairs
        assert lasso_equivalent(dra, ref)

    @pytest.mark.parametrize("name", BUILTIN_PROPERTIES)
    def test_round_trip(self, name):
        ref = builtin_dra(name)
        dra = parse_dra_hoa(serialize_hoa(ref))
        assert dra.delta == ref.delta and dra.pairs == ref.pairs

    def test_missing_body(self):
        err = code_of(FP_HOA.replace("--BODY--\n", ""), parse_dra_hoa)
        assert err.code == "H_MISSING_BODY" and err.line == 8

    def test_buchi_rejected(self):
        text = FP_HOA.replace("Acceptance: 2 Fin(0) & Inf(1)", "Acceptance: 1 Inf(0)").replace("{1}", "{0}")
        assert code_of(text, parse_dra_hoa).code == "H_ACCEPTANCE"

    def test_nondeterministic(self):
        text = FP_HOA.replace("[!0] 0\n[0] 1", "[t] 0\n[0] 1")
        assert code_of(text, parse_dra_hoa).code == "H_NONDET"

    def test_undeclared_ap(self):
        text = FP_HOA.replace("[0] 1\nState", "[1] 1\nState")
        assert code_of(text, parse_dra_hoa).code == "H_UNDECLARED_AP"

    def test_incomplete(self):
        text = FP_HOA.replace("[!0] 0\n", "")
        assert code_of(text, parse_dra_hoa).code == "H_INCOMPLETE"

    def test_transition_acceptance(self):
        text = FP_HOA.replace("[t] 1", "[t] 1 {1}")
        assert code_of(text, parse_dra_hoa).code == "H_ACCEPTANCE"

    def test_two_pairs(self):
        text = (FP_HOA.replace("Acceptance: 2 Fin(0) & Inf(1)",
                               "Acceptance: 4 (Fin(0) & Inf(1)) | (Fin(2) & Inf(3))")
                .replace('"seen" {1}', '"seen" {1 2}'))
        dra = parse_dra_hoa(text)
        assert dra.pairs == ((frozenset(), frozenset({1})), (frozenset({1}), frozenset()))

    def test_not_hoa(self):
        err = code_of("hello", parse_dra_hoa)
        assert err.code == "H_SYNTAX" and err.line == 1
