import pytest
from hypothesis import given, strategies as st

from trie_smooth import Alphabet, AlphabetError, StringSpec, lcp
from trie_smooth.alphabet import common_prefix_length

ABC = Alphabet(("a", "b", "c"))


def test_alphabet_needs_two_distinct_symbols():
    with pytest.raises(AlphabetError):
        Alphabet(("0",))
    with pytest.raises(AlphabetError):
        Alphabet(("0", "0"))
    assert Alphabet.binary().size == 2
    assert ABC.index("c") == 2
    assert ABC.decode(ABC.encode("cab")) == "cab"


def test_symbol_at_periodic_and_finite():
    assert StringSpec.periodic(ABC, "ab", "c").symbol_at(5) == ABC.index("c")
    assert StringSpec.periodic(ABC, "", "ab").symbol_at(2) == ABC.index("b")
    s = StringSpec.finite(ABC, "ab")
    assert s.symbol_at(2) == ABC.index("b")
    with pytest.raises(IndexError):
        s.symbol_at(3)
    with pytest.raises(IndexError):
        s.symbol_at(0)


def test_period_must_be_nonempty_and_in_range():
    with pytest.raises(AlphabetError):
        StringSpec(ABC, (0,), ())
    with pytest.raises(AlphabetError):
        StringSpec(ABC, (3,), None)


def test_json_round_trip(binary):
    spec = StringSpec.from_json({"prefix": "01", "period": "10"}, binary)
    assert spec.to_json() == {"prefix": "01", "period": "10"}
    finite = StringSpec.from_json({"prefix": "0110"}, binary)
    assert not finite.is_infinite and len(finite) == 4


def test_lcp_examples(binary):
    s = StringSpec.periodic(binary, "", "0")
    t = StringSpec.periodic(binary, "00", "1")
    assert lcp(s, t, 64).value == 2
    assert lcp(StringSpec.periodic(binary, "", "0"), StringSpec.periodic(binary, "", "1"), 64).value == 0
    same = StringSpec.periodic(binary, "", "01")
    res = lcp(same, StringSpec.periodic(binary, "", "01"), 64)
    assert res.capped and res.value == "capped" and res.length == 64


def test_lcp_rejects_mixed_alphabets(binary):
    with pytest.raises(AlphabetError):
        lcp(StringSpec.periodic(binary, "", "0"), StringSpec.periodic(ABC, "", "a"), 8)


def test_finite_string_end_counts_as_mismatch(binary):
    short = StringSpec.finite(binary, "01")
    longer = StringSpec.finite(binary, "011")
    assert lcp(short, longer, 10).value == 2
    assert lcp(short, StringSpec.finite(binary, "01"), 10).capped


specs = st.builds(
    lambda pre, per: StringSpec(Alphabet.binary(), tuple(pre), tuple(per) if per else None),
    st.lists(st.integers(0, 1), max_size=6),
    st.lists(st.integers(0, 1), min_size=0, max_size=4),
)


def _brute(s, t, cap):
    k = 0
    while k < cap:
        try:
            x = s.symbol_at(k + 1)
        except IndexError:
            x = None
        try:
            y = t.symbol_at(k + 1)
        except IndexError:
            y = None
        if x is None and y is None:
            return "capped"  # equal finite strings
        if x != y:
            return k
        k += 1
    return "capped"


@given(specs, specs, st.integers(1, 40))
def test_lcp_symmetric_and_matches_brute_force(s, t, cap):
    got = lcp(s, t, cap)
    assert got.value == lcp(t, s, cap).value
    expected = _brute(s, t, cap)
    if expected == "capped":
        assert got.capped
    else:
        assert got.value == expected


@given(specs)
def test_infinite_string_against_itself_is_capped(s):
    if s.is_infinite:
        assert lcp(s, s, 17).capped


@given(specs, specs)
def test_window_bound_detects_every_true_mismatch(s, t):
    # two eventually periodic strings agreeing on this window agree everywhere
    span = lambda x: len(x.prefix) + len(x.period or ())
    cap = 2 * (span(s) + span(t)) + 1
    if lcp(s, t, cap).capped:
        assert _brute(s, t, 200) == "capped"


def test_common_prefix_length():
    assert common_prefix_length([0, 1, 1], [0, 1, 0]) == 2
    assert common_prefix_length([], [1]) == 0
