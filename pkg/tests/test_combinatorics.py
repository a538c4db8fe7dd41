"""Tests for partitions, p-cores, tableau permutations and shuffles."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spf.combinatorics import (DIV, SYM, WEDGE, WORD, Partition, basis,
                               basis_size, compositions, conjugate,
                               p_core, partitions_of, perm_sign,
                               remove_rim_hook, shuffles, sigma_lambda)


def test_conjugate_examples():
    assert conjugate(Partition((3, 1))) == (2, 1, 1)
    assert conjugate(Partition([1] * 5)) == (5,)
    assert conjugate(Partition((2, 1))) == (2, 1)


def test_conjugate_involution():
    for d in range(9):
        for lam in partitions_of(d):
            assert conjugate(conjugate(lam)) == lam


def test_p_core_paper_values():
    assert p_core(Partition([1] * 5), 3) == (1, 1)
    assert p_core(Partition((5,)), 3) == (2,)
    assert p_core(Partition((2, 1)), 3) == ()


def rim_hook_core(parts, p):
    """Exhaustive rim-hook removal oracle; checks order independence."""
    cores = set()
    stack = [tuple(parts)]
    seen = set()
    while stack:
        cur = stack.pop()
        if cur in seen:
            continue
        seen.add(cur)
        nxt = remove_rim_hook(cur, p)
        if not nxt:
            cores.add(cur)
        else:
            stack.extend(nxt)
    assert len(cores) == 1, f"rim hook removal not order independent: {cores}"
    return Partition(cores.pop())


@pytest.mark.parametrize("p", [2, 3, 5])
def test_p_core_vs_rim_hook_oracle(p):
    for d in range(8):
        for lam in partitions_of(d):
            assert p_core(lam, p) == rim_hook_core(lam.parts, p)


def test_p_core_weight_congruence():
    for d in range(8):
        for lam in partitions_of(d):
            for p in (2, 3):
                assert p_core(lam, p).weight % p == lam.weight % p


def test_sigma_lambda():
    assert sigma_lambda(Partition((3,))) == (1, 2, 3)
    assert sigma_lambda(Partition((1, 1, 1))) == (1, 2, 3)
    assert sigma_lambda(Partition((2, 1))) == (1, 3, 2)


def test_shuffles_small():
    sh = shuffles(1, 1)
    assert [s for _, s in sh] == [1, -1]
    assert shuffles(0, 3) == [((1, 2, 3), 1)]
    assert len(shuffles(2, 1)) == 3


def test_shuffle_signs_are_perm_signs():
    for p, q in [(1, 2), (2, 2), (3, 1)]:
        for perm, sign in shuffles(p, q):
            assert sign == perm_sign(perm)


def test_basis_examples():
    assert basis(SYM, 2, 2) == [(0, 0), (0, 1), (1, 1)]
    assert basis(WEDGE, 2, 2) == [(0, 1)]
    assert basis(DIV, 3, 1) == [(0, 0, 0)]


def test_basis_sizes():
    from math import comb
    for d in range(6):
        for m in range(6):
            assert len(basis(SYM, d, m)) == basis_size(SYM, d, m) == comb(m + d - 1, d) if d else 1
            assert len(basis(WEDGE, d, m)) == comb(m, d)
            assert len(basis(WORD, d, m)) == m ** d


def test_compositions():
    assert compositions(2, 2) == [(0, 2), (1, 1), (2, 0)]
    assert len(compositions(3, 2)) == 4


def test_partition_parse_roundtrip():
    for d in range(7):
        for lam in partitions_of(d):
            assert Partition.parse(str(lam)) == lam
