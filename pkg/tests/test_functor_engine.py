"""Functor engine: dimensions, functoriality, duality, Schur/Weyl, actions."""

import random

import pytest

from spf.exact_linalg import (column_hermite, homology, kernel_basis, rank,
                              smith_normal_form)
from spf.functor_engine import (Compose, Const, Div, DividedHom, Dual, Param,
                                Schur, Sym, Tensor, TensorPower, Twist,
                                UnsupportedRing, Wedge, Weyl, abw_presentation,
                                canonicalize, compile_functor, degree,
                                dimension, divided_action, dual_eval,
                                eval_map, koszul_complex, parse_expr,
                                schur_generator, twist_eval)
from spf.combinatorics import Partition
from spf.matrix import Matrix
from spf.rings import GF, QQ, ZZ


def rand_matrix(rng, rows, cols, ring=ZZ, lo=-2, hi=2):
    return Matrix.from_rows(ring, [[rng.randint(lo, hi) for _ in range(cols)]
                                   for _ in range(rows)])


# --------------------------------------------------------------------------
# dimensions and degrees
# --------------------------------------------------------------------------

def test_dimension_examples():
    assert dimension(Sym(3), 2, ZZ) == 4
    assert dimension(Compose(Sym(2), Sym(2)), 2, ZZ) == 6
    assert dimension(Schur((2, 1)), 2, ZZ) == 2


def test_degree():
    assert degree(Sym(3)) == 3
    assert degree(Tensor(Sym(2), Wedge(1))) == 3
    assert degree(Compose(Sym(2), Div(3))) == 6
    assert degree(Twist(1), GF(3)) == 3
    with pytest.raises(UnsupportedRing):
        degree(Twist(1), ZZ)


def test_schur_dim_vs_generator_rank():
    # rank of d_lambda at m=2 equals the stored basis dimension
    for lam in [(2, 1), (2, 2), (3, 1)]:
        for m in (2, 3):
            d_lam = schur_generator(Partition(lam), m, ZZ)
            assert rank(d_lam.change_ring(QQ)) == dimension(Schur(lam), m, ZZ)


def test_schur_image_equals_kernel_lattice():
    # ABW: im(d_lambda) is exactly the kernel-presented Schur lattice
    for lam in [(2, 1), (2, 2), (3, 1)]:
        for m in (2, 3):
            d_lam = schur_generator(Partition(lam), m, ZZ)
            img = column_hermite(d_lam)
            K = compile_functor(Schur(lam), ZZ)._whole_basis(m)
            assert column_hermite(K) == img


def test_schur_basis_pure():
    # SNF of the embedding has all invariant factors 1
    for lam in [(2, 1), (3, 1), (2, 2)]:
        K = compile_functor(Schur(lam), ZZ)._whole_basis(2)
        if K.cols:
            factors, _, _ = smith_normal_form(K, transforms=False)
            assert all(f == 1 for f in factors)


def test_weyl_is_dual_of_schur_dims():
    for lam in [(2,), (1, 1), (2, 1), (3, 1)]:
        for m in (1, 2, 3):
            assert dimension(Weyl(lam), m, ZZ) == dimension(Schur(lam), m, ZZ)


def test_abw_cokernel():
    # coker([]_lambda at m=2) has the dimension of S_{lambda'}(k^2)
    lam = Partition((2, 1))
    M, mus = abw_presentation(lam, 2, ZZ)
    coker_dim = M.rows - rank(M.change_ring(QQ))
    assert coker_dim == dimension(Schur(lam.conjugate()), 2, ZZ)


# --------------------------------------------------------------------------
# eval_map
# --------------------------------------------------------------------------

def test_eval_tensorpower_is_kron():
    rng = random.Random(0)
    f = rand_matrix(rng, 2, 3)
    M = eval_map(TensorPower(2), f)
    assert M == f.kron(f)


def test_eval_sym_diag():
    f = Matrix.from_rows(ZZ, [[2, 0], [0, 3]])
    M = eval_map(Sym(2), f)
    assert M.to_rows() == [[4, 0, 0], [0, 6, 0], [0, 0, 9]]


def test_eval_div_column():
    # Div(2) on f: k -> k^2, f = (1,1)^t gives column (1,1,1)
    f = Matrix.from_rows(ZZ, [[1], [1]])
    M = eval_map(Div(2), f)
    assert M.to_rows() == [[1], [1], [1]]


def test_functoriality_random():
    rng = random.Random(1)
    exprs = [Sym(3), Wedge(2), Div(2), TensorPower(2),
             Tensor(Sym(1), Wedge(2)), Schur((2, 1)), Compose(Sym(2), Sym(2))]
    for F in exprs:
        for _ in range(3):
            f = rand_matrix(rng, 3, 3)
            g = rand_matrix(rng, 3, 3)
            assert eval_map(F, g * f) == eval_map(F, g) * eval_map(F, f)
        ident = Matrix.identity(ZZ, 3)
        assert eval_map(F, ident) == Matrix.identity(ZZ, dimension(F, 3, ZZ))


def test_dimension_matches_eval_identity():
    for F in [Sym(2), Div(3), Wedge(2), Schur((2, 1)), Tensor(Sym(1), Sym(1))]:
        n = dimension(F, 2, ZZ)
        assert eval_map(F, Matrix.identity(ZZ, 2)).shape == (n, n)


# --------------------------------------------------------------------------
# duality
# --------------------------------------------------------------------------

def test_dual_sym_is_div_entrywise():
    rng = random.Random(2)
    for d in (2, 3):
        for _ in range(4):
            f = rand_matrix(rng, 2, 2, lo=0, hi=1)
            assert dual_eval(Sym(d), f) == eval_map(Div(d), f)


def test_dual_dual_identity():
    rng = random.Random(3)
    f = rand_matrix(rng, 2, 2)
    F = Tensor(Sym(2), Wedge(1))
    assert dual_eval(Dual(F), f) == eval_map(F, f)


def test_dual_wedge_selfdual():
    rng = random.Random(4)
    for _ in range(4):
        f = rand_matrix(rng, 3, 3)
        assert dual_eval(Wedge(2), f) == eval_map(Wedge(2), f)


def test_canonicalize():
    assert canonicalize(Dual(Sym(2))) == Div(2)
    assert canonicalize(Dual(Schur((2, 1)))) == Weyl((2, 1))
    assert canonicalize(Dual(Tensor(Sym(1), Div(2)))) == Tensor(Div(1), Sym(2))
    assert canonicalize(Dual(Dual(Sym(2)))) == Sym(2)


# --------------------------------------------------------------------------
# twist
# --------------------------------------------------------------------------

def test_twist_zero_one_matrix():
    f = Matrix.from_rows(GF(2), [[1, 0], [1, 1]])
    assert twist_eval(1, f) == f


def test_twist_scalar_frobenius():
    for a in range(3):
        f = Matrix.from_rows(GF(3), [[a]])
        assert twist_eval(1, f) == f


def test_twist_degree():
    assert degree(Twist(1), GF(3)) == 3


def test_twist_additive():
    # I^(1)(f + g) = I^(1)(f) + I^(1)(g)
    rng = random.Random(5)
    R = GF(3)
    f = rand_matrix(rng, 2, 2, R, 0, 2)
    g = rand_matrix(rng, 2, 2, R, 0, 2)
    assert twist_eval(1, f + g) == twist_eval(1, f) + twist_eval(1, g)


# --------------------------------------------------------------------------
# Koszul complex exactness
# --------------------------------------------------------------------------

@pytest.mark.parametrize("d,m", [(2, 1), (2, 2), (3, 2), (3, 3), (4, 2), (4, 4)])
def test_koszul_exact(d, m):
    C = koszul_complex(d, m, ZZ)
    C.validate()
    for q in range(0, d + 1):
        assert homology(C, q) == (0, ()), f"H_{q} of Koszul d={d} m={m}"


# --------------------------------------------------------------------------
# divided actions
# --------------------------------------------------------------------------

def test_divided_action_extends_eval():
    # gamma_d(f) acts as F(f)
    rng = random.Random(6)
    for F in [Sym(2), Wedge(2), Div(2), TensorPower(2), Schur((2, 1)),
              Tensor(Sym(1), Sym(1))]:
        d = degree(F)
        f = rand_matrix(rng, 2, 2)
        pairs_pool = [(p, q) for p in range(2) for q in range(2)]
        # gamma_d of a rank-one elementary: compare with eval on that matrix
        for (p, q) in pairs_pool:
            xi = DividedHom.gamma([(p, q)] * d)
            E = Matrix.from_dict(ZZ, 2, 2, {(p, q): 1})
            assert divided_action(F, xi, 2, 2, ZZ) == eval_map(F, E)


def test_divided_action_linear_in_xi():
    xi1 = DividedHom.gamma([(0, 0), (0, 1)])
    xi2 = DividedHom.gamma([(1, 0), (1, 1)])
    both = xi1.add(xi2, ZZ)
    for F in [Sym(2), Div(2), Wedge(2)]:
        A = divided_action(F, xi1, 2, 2, ZZ)
        B = divided_action(F, xi2, 2, 2, ZZ)
        C = divided_action(F, both, 2, 2, ZZ)
        assert C == A + B


def test_divided_action_compose():
    # action respects algebra composition
    rng = random.Random(7)
    words = [(0, 0), (0, 1), (1, 1)]
    xi = DividedHom.gamma([(0, 1), (1, 0)])
    eta = DividedHom.gamma([(0, 0), (1, 1)])
    comp = xi.compose(eta, ZZ)
    for F in [Sym(2), Div(2), TensorPower(2), Wedge(2)]:
        A = divided_action(F, xi, 2, 2, ZZ)
        B = divided_action(F, eta, 2, 2, ZZ)
        C = divided_action(F, comp, 2, 2, ZZ)
        assert C == A * B


def test_divided_action_compose_functor():
    # polarized action through a composite functor stays consistent with
    # the pure-power case gamma_d(f)
    F = Compose(Sym(2), Sym(2))
    f = Matrix.from_rows(ZZ, [[1, 2], [0, 1]])
    xi = DividedHom.gamma([(0, 0)] * 4).compose(
        DividedHom.gamma([(0, 0)] * 4), ZZ)  # gamma_4(e00) twice
    E = Matrix.from_dict(ZZ, 2, 2, {(0, 0): 1})
    assert divided_action(F, DividedHom.gamma([(0, 0)] * 4), 2, 2, ZZ) == eval_map(F, E)


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def test_parser_atoms():
    assert parse_expr("S[2]") == Sym(2)
    assert parse_expr("W[3]") == Wedge(3)
    assert parse_expr("G[2]") == Div(2)
    assert parse_expr("T[4]") == TensorPower(4)
    assert parse_expr("Tw[1]") == Twist(1)
    assert parse_expr("Schur[2,1]") == Schur((2, 1))
    assert parse_expr("Weyl[2,1]") == Weyl((2, 1))


def test_parser_compound():
    assert parse_expr("S[2]*S[1]") == Tensor(Sym(2), Sym(1))
    assert parse_expr("S[2] o S[2]") == Compose(Sym(2), Sym(2))
    assert parse_expr("Dual(S[2])") == Dual(Sym(2))
    assert parse_expr("Param(S[2],3)") == Param(Sym(2), 3)
    assert parse_expr("S[1]*S[1]*S[1]") == Tensor(Sym(1), Sym(1), Sym(1))
    assert parse_expr("(S[2] o S[2])*W[1]") == Tensor(Compose(Sym(2), Sym(2)), Wedge(1))


def test_parser_roundtrip():
    for s in ["S[2]", "S[2]*W[1]", "S[2] o S[2]", "Schur[2,1]",
              "Param(G[2],2)", "Tw[1]"]:
        e = parse_expr(s)
        assert parse_expr(repr(e)) == e
