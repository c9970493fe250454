from math import gcd

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from lpa import numtheory as nt


# printed worked examples
@pytest.mark.parametrize("d,r,s,sigma,sigma1,sigma2,S1,S2", [
    (3, 2, 2, (1, 3, 2), (1,), (3, 2), {1}, {2, 3}),
    (3, 3, 1, (1, 2, 3), (1, 2), (3,), {1, 2}, {3}),
    (13, 9, 5, (1, 6, 11, 3, 8, 13, 5, 10, 2, 7, 12, 4, 9),
     (1, 6, 11, 3, 8), (13, 5, 10, 2, 7, 12, 4, 9),
     {1, 3, 6, 8, 11}, {2, 4, 5, 7, 9, 10, 12, 13}),
])
def test_printed_examples(d, r, s, sigma, sigma1, sigma2, S1, S2):
    p = nt.partition(d, r)
    assert p.s == s
    assert p.sigma == sigma
    assert p.sigma1 == sigma1 and p.sigma2 == sigma2
    assert p.S1 == S1 and p.S2 == S2


def valid_pairs(max_d):
    return [(d, r) for d in range(1, max_d + 1) for r in range(1, d + 1) if gcd(d, r - 1) == 1]


def oracle_partition(d, r):
    """Direct reading: walk 1, 1+s, ... mod d until the residue r-1 is hit."""
    s = d - (r - 1)
    seq = [((k * s) % d) + 1 for k in range(d)]
    seq = [x if x <= d else x - d for x in seq]
    i = next(k for k, x in enumerate(seq) if (x - (r - 1)) % d == 0) + 1
    return seq, i


def test_invariants_all_d_up_to_200():
    for d, r in valid_pairs(200):
        p = nt.partition(d, r)
        seq, i = oracle_partition(d, r)
        assert list(p.sigma) == seq
        assert p.i_r == i
        assert sorted(p.sigma) == list(range(1, d + 1))
        assert p.S1 | p.S2 == set(range(1, d + 1)) and not p.S1 & p.S2
        assert len(p.S1) == p.i_r and len(p.S2) == d - p.i_r
        assert 1 in p.S1
        if d > 1:
            assert p.sigma2[0] == d and d in p.S2
            assert (p.i_r * (r - 1)) % d == 1
            assert nt.i_r_inverse_check(d, r)


def test_count_is_totient():
    for d in range(2, 201):
        assert nt.count_achievable_partitions(d) == sympy.totient(d) == nt.euler_phi(d)


def test_distinct_r_give_distinct_partitions():
    for d in range(2, 60):
        parts = nt.achievable_partitions(d)
        assert len(set(parts.values())) == len(parts)


def test_forbidden_partition_absent_d3():
    parts = set(nt.achievable_partitions(3).values())
    assert ((1, 3), (2,)) not in parts
    assert parts == {((1,), (2, 3)), ((1, 2), (3,))}


def test_extension_n5_d3():
    assert nt.extend_partition(3, 5) == ((1, 4), (2, 3, 5))


@given(st.integers(2, 40), st.integers(1, 200))
def test_extension_respects_residues(d, n):
    r = (n - 1) % d + 1
    if gcd(d, r - 1) != 1:
        with pytest.raises(nt.PartitionError):
            nt.extend_partition(d, n)
        return
    s1, s2 = nt.extend_partition(d, n)
    p = nt.partition(d, r)
    assert sorted(s1 + s2) == list(range(1, n + 1))
    assert all(((k - 1) % d + 1) in p.S1 for k in s1)


@pytest.mark.parametrize("d,r", [(4, 3), (6, 4), (0, 1), (3, 4), (3, 0)])
def test_invalid_pairs(d, r):
    with pytest.raises(nt.PartitionError):
        nt.partition(d, r)


@given(st.integers(1, 5000))
def test_phi_matches_sympy(n):
    assert nt.euler_phi(n) == sympy.totient(n)
