"""Dold-Kan, chains, functor application, shuffle map."""

import pytest

from spf.exact_linalg import ChainComplexData, homology, homology_all
from spf.functor_engine import Const, Div, Sym, TensorPower
from spf.matrix import Matrix
from spf.rings import GF, ZZ
from spf.simplicial import (K_of, apply_functor, chains, check_shuffle_is_chain_map,
                            diagonal_product, dold_kan, shuffle_map_component,
                            tensor_modules)
from math import comb


def test_dold_kan_constant():
    C = ChainComplexData(ZZ, {0: 1})
    X = dold_kan(C, 4)
    assert X.ranks == [1, 1, 1, 1, 1]
    for q in range(1, 5):
        for i in range(q + 1):
            assert X.face(q, i) == Matrix.identity(ZZ, 1)


def test_K_n_ranks():
    for n in (1, 2, 3):
        X = K_of(ZZ, n, 6)
        for q in range(7):
            assert X.rank(q) == comb(q, n)


def test_dold_kan_normalized_roundtrip():
    C = ChainComplexData(ZZ, {0: 1, 1: 1}, {1: Matrix.from_rows(ZZ, [[2]])})
    X = dold_kan(C, 4)
    N = chains(X, normalized=True)
    assert N.rank(0) == 1 and N.rank(1) == 1
    assert N.rank(2) == 0 and N.rank(3) == 0
    d1 = N.differential(1)
    assert abs(d1[(0, 0)]) == 2


def test_homology_of_K_n():
    for n in (1, 2, 3):
        X = K_of(ZZ, n, n + 2)
        C = chains(X)
        for q in range(n + 2):
            expected = (1, ()) if q == n else (0, ())
            assert homology(C, q) == expected, (n, q)


def test_normalized_quasi_iso():
    # projection C -> N is a quasi-isomorphism on K(n) and products
    for X in [K_of(ZZ, 1, 5), K_of(ZZ, 2, 5), diagonal_product(ZZ, 1, 1, 5)]:
        C = chains(X)
        N = chains(X, normalized=True)
        for q in range(5):
            assert homology(C, q) == homology(N, q)


def test_apply_functor_identity():
    X = K_of(ZZ, 1, 4)
    Y = apply_functor(TensorPower(1), X, 2, 4)
    for q in range(5):
        assert Y.rank(q) == X.rank(q) * 2
    Y.check_identities()


def test_apply_functor_degree_zero():
    X = K_of(ZZ, 1, 3)
    Y = apply_functor(Const(), X, 1, 3)
    C = chains(Y)
    assert homology(C, 0) == (1, ())
    for q in (1, 2):
        assert homology(C, q) == (0, ())


def test_apply_functor_sym2_ranks():
    X = K_of(ZZ, 1, 4)
    Y = apply_functor(Sym(2), X, 1, 4)
    for q in range(5):
        assert Y.rank(q) == comb(q + 1, 2)
    Y.check_identities()


def test_simplicial_identities_of_applied():
    X = K_of(ZZ, 1, 3)
    for F in [Sym(2), Div(2)]:
        apply_functor(F, X, 2, 3).check_identities()


def test_diagonal_product_ranks_and_homology():
    X = diagonal_product(ZZ, 1, 1, 4)
    for q in range(5):
        assert X.rank(q) == q * q
    C = chains(X)
    gm = homology_all(C)
    # H_2 = Z concentrated (checked below top degree to avoid truncation edge)
    assert gm.get(2) == (1, ())
    assert gm.get(0) == (0, ()) and gm.get(1) == (0, ())
    assert gm.get(3) == (0, ())


def test_K_0_m_is_K_m():
    X = diagonal_product(ZZ, 0, 2, 4)
    Y = K_of(ZZ, 2, 4)
    assert X.ranks == Y.ranks
    C, D = chains(X), chains(Y)
    for q in range(4):
        assert homology(C, q) == homology(D, q)


def test_H3_of_K_1_2():
    X = diagonal_product(ZZ, 1, 2, 5)
    C = chains(X)
    assert homology(C, 3) == (1, ())
    for q in (0, 1, 2, 4):
        assert homology(C, q) == (0, ())


def test_shuffle_degree_zero_identity():
    X = K_of(ZZ, 1, 4)
    Y = K_of(ZZ, 1, 4)
    nab = shuffle_map_component(X, Y, 0, 0)
    assert nab == Matrix.identity(ZZ, X.rank(0) * Y.rank(0))


def test_shuffle_chain_map():
    X = K_of(ZZ, 1, 5)
    Y = K_of(ZZ, 1, 5)
    assert check_shuffle_is_chain_map(X, Y, 4)
    Z1 = K_of(ZZ, 2, 5)
    assert check_shuffle_is_chain_map(X, Z1, 4)


def test_shuffle_induces_homology_iso_K11():
    # nabla: (C K(1) (x) C K(1))_2 -> C K(1,1)_2 hits the H_2 generator
    X = K_of(ZZ, 1, 4)
    Y = K_of(ZZ, 1, 4)
    D = tensor_modules(X, Y, 4)
    CD = chains(D)
    # cycle in (CX (x) CY)_2: generator of H_1(CX) (x) H_1(CY)
    nab = shuffle_map_component(X, Y, 1, 1)
    v = Matrix.from_rows(ZZ, [[1]])  # X_1 and Y_1 are rank 1
    img = nab * v.kron(v)
    # img must be a cycle generating H_2(C K(1,1)) = Z
    d2 = CD.differential(2)
    assert (d2 * img).is_zero()
    from spf.exact_linalg import kernel_basis, solve_matrix, smith_normal_form
    K = kernel_basis(d2)
    coords = solve_matrix(K, img)
    assert coords is not None
    d3 = CD.differential(3)
    B = solve_matrix(K, d3)
    stacked = B.hstack(coords)
    # quotient class of img generates H_2 = Z: appending img to the image
    # basis must change the Smith form from (1,..,x2?) -- concretely the
    # quotient by B is Z and img maps to a generator.
    f_b, _, _ = smith_normal_form(B, transforms=False)
    f_all, _, _ = smith_normal_form(stacked, transforms=False)
    # H2 = Z means rank(K) - rank(B) = 1; adding img fills the free part
    assert len(f_all) == len(f_b) + 1
    assert all(f == 1 for f in f_all)
