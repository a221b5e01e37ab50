from functools import lru_cache

import pytest
from hypothesis import given, settings, strategies as st

from sc6verify.binaryqf import loeschian_count
from sc6verify.qseries import (
    EtaQuotient,
    IntSeries,
    apply_eta_factor,
    c3_series,
    sc6_series,
    verify_eta_identities,
)


# --- brute-force partition oracles -----------------------------------------


def partitions(n, largest=None):
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def conjugate(lam):
    return tuple(sum(1 for part in lam if part > j) for j in range(lam[0])) if lam else ()


def hook_lengths(lam):
    conj = conjugate(lam)
    return [lam[i] - j + conj[j] - i - 1 for i in range(len(lam)) for j in range(lam[i])]


def is_core(lam, t):
    return all(h % t for h in hook_lengths(lam))


def self_conjugate_partitions(n):
    """Self-conjugate partitions of n, built from their diagonal hooks.

    A self-conjugate partition is determined by its diagonal hooks, which
    are distinct odd numbers summing to n.
    """

    def distinct_odd(m, largest):
        if m == 0:
            yield ()
            return
        top = largest if largest % 2 else largest - 1
        for h in range(min(top, m if m % 2 else m - 1), 0, -2):
            for rest in distinct_odd(m - h, h - 2):
                yield (h,) + rest

    for hooks in distinct_odd(n, n if n % 2 else n - 1):
        lam = [0] * len(hooks)
        cells = set()
        for i, h in enumerate(hooks):
            arm = (h - 1) // 2
            for j in range(i, i + arm + 1):
                cells.add((i, j))
                cells.add((j, i))
        rows = {}
        for i, j in cells:
            rows[i] = rows.get(i, 0) + 1
        lam = tuple(rows[i] for i in sorted(rows))
        if sum(lam) == n and lam == conjugate(lam) and all(a >= b for a, b in zip(lam, lam[1:])):
            yield lam


@lru_cache(maxsize=None)
def brute_sc6(n):
    return sum(1 for lam in self_conjugate_partitions(n) if is_core(lam, 6))


def brute_c3(n):
    return sum(1 for lam in partitions(n) if is_core(lam, 3))


def test_hook_lengths_of_4211():
    # the worked Ferrers diagram of (4, 2, 1, 1)
    assert sorted(hook_lengths((4, 2, 1, 1))) == sorted([7, 4, 2, 1, 4, 1, 2, 1])


def test_self_conjugate_generator_matches_filtering():
    for n in range(1, 16):
        direct = sorted(lam for lam in partitions(n) if lam == conjugate(lam))
        assert sorted(self_conjugate_partitions(n)) == direct


# --- IntSeries and eta factors ---------------------------------------------


def test_partition_numbers():
    s = apply_eta_factor(IntSeries.one(11), 1, -1)
    assert s.coefficients == [sum(1 for _ in partitions(n)) for n in range(11)]


def test_eta_factor_identity_and_polynomial():
    s = IntSeries([3, -1, 4, 1, 5], 5)
    assert apply_eta_factor(s, 7, 0) == s
    assert apply_eta_factor(IntSeries.one(5), 2, 1).coefficients == [1, 0, -1, 0, -1]


@settings(max_examples=50)
@given(
    st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=40),
    st.integers(1, 45),
    st.integers(1, 3),
)
def test_multiply_then_divide_is_identity(coeffs, m, e):
    s = IntSeries(coeffs)
    assert s.mul_one_minus(m, e).mul_one_minus(m, -e) == s
    assert s.mul_one_minus(m, -e).mul_one_minus(m, e) == s


def test_series_product_matches_factor_application():
    s = IntSeries.one(30)
    one_minus_q2 = IntSeries([1, 0, -1], 30)
    assert s.mul_one_minus(2) == s * one_minus_q2


def test_exact_beyond_int64():
    # p(400) has 20 digits; nothing may wrap
    p = apply_eta_factor(IntSeries.one(401), 1, -1)
    assert p[400] == 6727090051741041926


# --- sc6 and c3 -------------------------------------------------------------


def test_sc6_examples():
    s = sc6_series(80)
    assert s[0] == 1 and s[1] == 1
    assert [s[n] for n in (2, 12, 13, 73)] == [0, 0, 0, 0]


def test_sc6_matches_hook_length_enumeration():
    s = sc6_series(61)
    assert [s[n] for n in range(61)] == [brute_sc6(n) for n in range(61)]


def test_sc6_nonnegative():
    assert min(sc6_series(3000).coefficients) >= 0


def test_c3_examples_and_brute_force():
    c = c3_series(21)
    assert c[0] == 1 and c[1] == 1 and c[2] == 2
    assert [c[n] for n in range(21)] == [brute_c3(n) for n in range(21)]


def test_c3_han_ono():
    c = c3_series(1501)
    assert all(6 * c[n] == loeschian_count(3 * n + 1) for n in range(1501))


# --- eta identities ---------------------------------------------------------


def test_eta_prefactors():
    assert EtaQuotient(((48, 2), (24, -1))).offset() == 3
    assert EtaQuotient(((288, 3), (96, -1))).offset() == 32
    with pytest.raises(ValueError):
        EtaQuotient(((1, 1),)).offset()  # q^{1/24}


def test_eta_quotient_low_coefficients():
    first = EtaQuotient(((48, 2), (24, -1))).expand(200)
    assert first.get(3) == 1 and 1 not in first and 2 not in first
    second = EtaQuotient(((288, 3), (96, -1))).expand(1000)
    assert second[32] == 1 and second[128] == 1  # c3(0), c3(1)


def test_verify_eta_identities():
    checks = verify_eta_identities(20000)
    assert all(c.passed for c in checks), checks
    assert [c.details["prefactor"] for c in checks] == [3, 32]


def test_verify_eta_identities_reports_failure(monkeypatch):
    import sc6verify.qseries as qs

    monkeypatch.setattr(qs, "_odd_square_series", lambda p: {3: 1, 75: 2})
    check = qs.verify_eta_identities(200)[0]
    assert not check.passed and check.first_failure[0] == 27
