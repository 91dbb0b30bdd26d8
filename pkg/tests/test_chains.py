import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nrec.chains import (
    PeriodicBinarySequence,
    common_spike,
    common_spike_suite,
    divides_iff_shift,
    find_complete_chains,
    minimal_common_spike,
    set_period,
    verify_common_spike,
)
from nrec.construct import derive_params
from nrec.chains import attractor_chain_profile
from nrec.errors import NotCoprime


def seq(T, support):
    return PeriodicBinarySequence(T, frozenset(support))


def test_set_period_examples():
    assert set_period(seq(6, {0, 2, 4})) == 2
    assert set_period(seq(7, set())) == 1
    assert set_period(seq(22, {0, 11})) == 11
    assert set_period(seq(5, range(5))) == 1


def test_set_period_divides_T():
    for T in range(1, 30):
        for support in ({0}, {0, 1}, set(range(0, T, 3))):
            support = {x for x in support if x < T}
            assert T % set_period(seq(T, support)) == 0


def test_divides_iff_shift():
    s = seq(6, {0, 2, 4})
    assert divides_iff_shift(s, 4)
    assert divides_iff_shift(s, 6)
    assert not divides_iff_shift(seq(22, {0, 11}), 4)


def test_shift_characterizes_period_divisor():
    for T in (6, 12, 22):
        for support in ({0, T // 2}, {0, 1, 2}):
            s = seq(T, support)
            gamma = set_period(s)
            for k in range(1, T + 1):
                assert divides_iff_shift(s, k) == (k % gamma == 0)


def test_complete_chains():
    got = find_complete_chains(seq(22, {0, 11}), 11)
    assert [c.offset_t for c in got] == [0]
    assert find_complete_chains(seq(6, {0, 2}), 2) == []
    full = seq(4, {0, 1, 2, 3})
    assert len(find_complete_chains(full, 3)) == 1  # gcd(3,4)=1: one orbit
    assert len(find_complete_chains(full, 2)) == 2


def test_common_spike_examples():
    t, i0, j0 = common_spike(0, 2, 1, 3)
    assert t % 2 == 0 and t % 3 == 1 and i0 >= 0 and j0 >= 0
    assert minimal_common_spike(0, 2, 1, 3) == 4

    t, i0, j0 = common_spike(7, 5, 7, 4)
    assert (i0, j0) == (4, 5) and t == 7 + 20  # b - a = 0 degenerates to ell1*ell2

    t, _, _ = common_spike(3, 11, 5, 13)
    assert t % 11 == 3 and t % 13 == 5


def test_common_spike_not_coprime():
    with pytest.raises(NotCoprime):
        common_spike(0, 4, 1, 6)
    with pytest.raises(NotCoprime):
        minimal_common_spike(0, 4, 1, 6)


coprime_pairs = st.tuples(st.integers(1, 100), st.integers(1, 100)).filter(
    lambda p: math.gcd(*p) == 1
)


@given(coprime_pairs, st.integers(0, 1000), st.integers(0, 1000))
@settings(max_examples=300, deadline=None)
def test_common_spike_property(pair, a, b):
    ell1, ell2 = pair
    t, i0, j0 = common_spike(a, ell1, b, ell2)
    assert i0 >= 0 and j0 >= 0
    assert t == a + i0 * ell1 == b + j0 * ell2
    assert t % (ell1 * ell2) == minimal_common_spike(a % ell1, ell1, b % ell2, ell2)


def test_common_spike_suite():
    report = common_spike_suite(1000, "unit")
    assert report["pass"] and report["trials"] == 1000


def test_common_spike_full_support():
    t = verify_common_spike(seq(6, range(6)), 2, 3)
    assert t is not None


def test_verify_common_spike_constructed_support():
    T = 66
    support = {(0 + 2 * i) % T for i in range(T)} | {(1 + 3 * i) % T for i in range(T)}
    s = seq(T, support)
    t = verify_common_spike(s, 2, 3)
    assert t is not None
    assert s.value(t) == s.value(t + 2) == s.value(t + 3) == 1
    # oracle: some t below T works as well
    assert any(
        s.value(x) == s.value(x + 2) == s.value(x + 3) == 1 for x in range(T)
    )


def test_verify_common_spike_absent():
    assert verify_common_spike(seq(22, {0, 11}), 2, 11) is None


def test_attractor_chain_profile():
    params = derive_params(5, 12)
    word11 = [1] + [0] * 10
    prof = attractor_chain_profile(word11, params)
    assert not prof["violation"]
    assert prof["primes_with_chain"] == [11]
    assert sorted(prof["chains"]) == [11, 22]  # step multiples of 11 up to k=30

    word13 = [1] + [0] * 12
    prof = attractor_chain_profile(word13, params)
    assert prof["primes_with_chain"] == [13] and not prof["violation"]

    prof = attractor_chain_profile([0] * 11, params)
    assert prof["null"] and not prof["chains"] and not prof["violation"]

    # a fabricated word spiking every 2 steps carries stray chains
    prof = attractor_chain_profile([1, 0] * 11, params)
    assert prof["violation"]


def test_set_period_matches_embedded_attractor():
    # embedding q copies of a period-p word keeps set period p
    word = [1, 0, 0, 0, 0, 0, 0]  # p = 7
    for q in (1, 2, 3):
        s = PeriodicBinarySequence.from_word(word * q)
        assert set_period(s) == 7
