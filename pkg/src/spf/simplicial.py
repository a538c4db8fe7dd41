"""Simplicial free modules: Dold-Kan, chains, functor application, shuffles.

A SimplicialModule stores level ranks together with all face and degeneracy
matrices up to a truncation level q_max.  Constructors assert the simplicial
identities, so an object that exists is valid.
"""

from __future__ import annotations

from typing import Callable, Dict, List, Tuple

from .exact_linalg import ChainComplexData, column_hermite, kernel_basis, solve_matrix
from .functor_engine import FunctorExpr, compile_functor
from .matrix import Matrix
from .rings import Ring


class SimplicialModule:
    """Levels 0..q_max of a simplicial free module.

    faces[q][i] : level q -> level q-1   (0 <= i <= q, 1 <= q <= q_max)
    degeneracies[q][i] : level q -> level q+1   (0 <= i <= q, q < q_max)
    """

    def __init__(self, ring: Ring, ranks: List[int],
                 faces: Dict[int, List[Matrix]],
                 degeneracies: Dict[int, List[Matrix]],
                 check: bool = True):
        self.ring = ring
        self.ranks = list(ranks)
        self.q_max = len(ranks) - 1
        self.faces = faces
        self.degeneracies = degeneracies
        if check:
            self.check_identities()

    def rank(self, q: int) -> int:
        return self.ranks[q] if 0 <= q <= self.q_max else 0

    def face(self, q: int, i: int) -> Matrix:
        return self.faces[q][i]

    def degeneracy(self, q: int, i: int) -> Matrix:
        return self.degeneracies[q][i]

    def check_identities(self):
        """Assert the simplicial identities as matrix equations."""
        for q in range(2, self.q_max + 1):
            for j in range(q):
                for i in range(j):
                    # d_i d_j = d_{j-1} d_i  (i < j)
                    lhs = self.face(q - 1, i) * self.face(q, j)
                    rhs = self.face(q - 1, j - 1) * self.face(q, i)
                    if lhs != rhs:
                        raise ValueError(f"face identity fails at q={q}, i={i}, j={j}")
        for q in range(0, self.q_max - 1):
            for i in range(q + 1):
                for j in range(i, q + 1):
                    # s_i s_j = s_{j+1} s_i  (i <= j)
                    lhs = self.degeneracy(q + 1, i) * self.degeneracy(q, j)
                    rhs = self.degeneracy(q + 1, j + 1) * self.degeneracy(q, i)
                    if lhs != rhs:
                        raise ValueError(f"degeneracy identity fails q={q}, i={i}, j={j}")
        for q in range(1, self.q_max):
            for j in range(q):
                for i in range(q + 2):
                    # d_i s_j
                    ds = self.face(q + 1, i) * self.degeneracy(q, j)
                    if i < j:
                        rhs = self.degeneracy(q - 1, j - 1) * self.face(q, i)
                    elif i in (j, j + 1):
                        rhs = Matrix.identity(self.ring, self.rank(q))
                    else:
                        rhs = self.degeneracy(q - 1, j) * self.face(q, i - 1)
                    if ds != rhs:
                        raise ValueError(f"mixed identity fails q={q}, i={i}, j={j}")


# ---------------------------------------------------------------------------
# Dold-Kan
# ---------------------------------------------------------------------------

def _surjections(q: int, p: int) -> List[tuple]:
    """Monotone surjections [q] ->> [p] as value tuples of length q+1."""
    if p > q or p < 0:
        return []
    out = []

    def gen(pos, cur, acc):
        if pos == q + 1:
            if cur == p:
                out.append(tuple(acc))
            return
        # stay or step up; only step while p remains reachable
        if cur + (q - pos) >= p:
            gen(pos + 1, cur, acc + [cur])
        if cur + 1 <= p:
            gen(pos + 1, cur + 1, acc + [cur + 1])
    gen(1, 0, [0])
    return sorted(out)


def _epi_mono_factor(comp: tuple, p: int):
    """Factor a monotone map [r] -> [p] (as values) through its image.

    Returns (eta, missing) where eta is the surjection onto the image
    re-indexed to [s], and missing is the sorted tuple of values not hit.
    """
    image = sorted(set(comp))
    reindex = {v: i for i, v in enumerate(image)}
    eta = tuple(reindex[v] for v in comp)
    missing = tuple(v for v in range(p + 1) if v not in reindex)
    return eta, missing


def dold_kan(C: ChainComplexData, q_max: int) -> SimplicialModule:
    """The Dold-Kan simplicial module K(C) of a nonnegative chain complex.

    Level q is the direct sum over monotone surjections [q] ->> [p] of C_p.
    A simplicial operator alpha acts on the summand eta through the
    epi-mono factorization of eta o alpha: identity components for trivial
    mono part, the differential of C when exactly the bottom value 0 is
    missed, zero otherwise.  This puts C inside the normalized chains
    (the kernel of d_1..d_q) with d_0 inducing the differential.
    """
    ring = C.ring
    if any(q < 0 and r for q, r in C.ranks.items()):
        raise ValueError("dold_kan needs a nonnegative complex")
    top = max((q for q, r in C.ranks.items() if r), default=0)
    summands = {}   # q -> list of (eta, p)
    offsets = {}    # q -> {eta: offset}
    ranks = []
    for q in range(q_max + 1):
        ss = []
        for p in range(min(q, top) + 1):
            if C.rank(p) == 0:
                continue
            for eta in _surjections(q, p):
                ss.append((eta, p))
        ss.sort()
        summands[q] = ss
        offs = {}
        total = 0
        for eta, p in ss:
            offs[eta] = total
            total += C.rank(p)
        offsets[q] = offs
        ranks.append(total)

    def operator_matrix(q_src: int, q_tgt: int, alpha: List[int]) -> Matrix:
        # alpha: monotone map [q_tgt] -> [q_src] given by images
        data = {}
        for eta, p in summands[q_src]:
            comp = tuple(eta[a] for a in alpha)
            eta2, missing = _epi_mono_factor(comp, p)
            if len(missing) == 0:
                block = Matrix.identity(ring, C.rank(p))
                p2 = p
            elif missing == (0,):
                block = C.differential(p)
                p2 = p - 1
            else:
                continue
            if (eta2, p2) not in set(summands[q_tgt]):
                continue
            src_off = offsets[q_src][eta]
            tgt_off = offsets[q_tgt][eta2]
            for (i, j), x in block.data.items():
                key = (tgt_off + i, src_off + j)
                data[key] = ring.add(data.get(key, ring.zero()), x)
        return Matrix(ring, ranks[q_tgt] if q_tgt < len(ranks) else 0,
                      ranks[q_src], {k: v for k, v in data.items() if v != 0})

    faces = {}
    degeneracies = {}
    for q in range(1, q_max + 1):
        faces[q] = [operator_matrix(q, q - 1, [t for t in range(q + 1) if t != i])
                    for i in range(q + 1)]
    for q in range(0, q_max):
        degeneracies[q] = []
        for i in range(q + 1):
            alpha = []
            for t in range(q + 2):
                if t <= i:
                    alpha.append(t)
                else:
                    alpha.append(t - 1)
            degeneracies[q].append(operator_matrix(q, q + 1, alpha))
    return SimplicialModule(ring, ranks, faces, degeneracies)


def K_of(ring: Ring, n: int, q_max: int) -> SimplicialModule:
    """K(n): the Dold-Kan module of the ring concentrated in degree n."""
    C = ChainComplexData(ring, {n: 1})
    return dold_kan(C, q_max)


# ---------------------------------------------------------------------------
# Chains
# ---------------------------------------------------------------------------

def chains(X: SimplicialModule, normalized: bool = False) -> ChainComplexData:
    """C X with d = alternating face sum, or the normalized subcomplex N X.

    N is computed as the intersection of ker d_i for i >= 1 (a Hermite
    basis), with the differential induced by d_0.
    """
    ring = X.ring
    if not normalized:
        ranks = {q: X.rank(q) for q in range(X.q_max + 1)}
        diffs = {}
        for q in range(1, X.q_max + 1):
            d = Matrix(ring, X.rank(q - 1), X.rank(q))
            for i in range(q + 1):
                term = X.face(q, i)
                d = d + (term if i % 2 == 0 else -term)
            diffs[q] = d
        return ChainComplexData(ring, ranks, diffs)
    # normalized: kernel intersection
    bases = {}
    for q in range(X.q_max + 1):
        if q == 0:
            bases[0] = Matrix.identity(ring, X.rank(0))
            continue
        stacked = None
        for i in range(1, q + 1):
            stacked = X.face(q, i) if stacked is None else stacked.vstack(X.face(q, i))
        bases[q] = kernel_basis(stacked)
    ranks = {q: bases[q].cols for q in range(X.q_max + 1)}
    diffs = {}
    for q in range(1, X.q_max + 1):
        img = X.face(q, 0) * bases[q]
        sol = solve_matrix(bases[q - 1], img)
        if sol is None:
            raise ArithmeticError("d_0 does not preserve normalized chains")
        diffs[q] = sol
    return ChainComplexData(ring, ranks, diffs)


def apply_functor(F: FunctorExpr, X: SimplicialModule, m: int, q_max: int,
                  ring: Ring | None = None) -> SimplicialModule:
    """Levelwise F(X_q (x) k^m) with F applied to all structure maps."""
    ring = ring or X.ring
    ev = compile_functor(F, ring)
    if q_max > X.q_max:
        raise ValueError("underlying module truncated below requested q_max")
    ident = Matrix.identity(ring, m)
    ranks = [ev.dim(X.rank(q) * m) for q in range(q_max + 1)]
    faces = {}
    degeneracies = {}
    for q in range(1, q_max + 1):
        faces[q] = [ev.matrix(X.face(q, i).change_ring(ring).kron(ident))
                    for i in range(q + 1)]
    for q in range(0, q_max):
        degeneracies[q] = [ev.matrix(X.degeneracy(q, i).change_ring(ring).kron(ident))
                           for i in range(q + 1)]
    return SimplicialModule(ring, ranks, faces, degeneracies, check=False)


def tensor_modules(X: SimplicialModule, Y: SimplicialModule,
                   q_max: int) -> SimplicialModule:
    """Diagonal of the bisimplicial tensor product: levels X_q (x) Y_q."""
    ring = X.ring
    ranks = [X.rank(q) * Y.rank(q) for q in range(q_max + 1)]
    faces = {}
    degeneracies = {}
    for q in range(1, q_max + 1):
        faces[q] = [X.face(q, i).kron(Y.face(q, i)) for i in range(q + 1)]
    for q in range(0, q_max):
        degeneracies[q] = [X.degeneracy(q, i).kron(Y.degeneracy(q, i))
                           for i in range(q + 1)]
    return SimplicialModule(ring, ranks, faces, degeneracies, check=False)


def diagonal_product(ring: Ring, n: int, m: int, q_max: int) -> SimplicialModule:
    """K(n, m): the diagonal of K(n) |x| K(m)."""
    X = K_of(ring, n, q_max)
    Y = K_of(ring, m, q_max)
    return tensor_modules(X, Y, q_max)


# ---------------------------------------------------------------------------
# Shuffle map
# ---------------------------------------------------------------------------

def _iterated_degeneracy(X: SimplicialModule, q: int, indices: List[int]) -> Matrix:
    """s_{i_k} ... s_{i_1} from level q, applied left to right from the list."""
    M = Matrix.identity(X.ring, X.rank(q))
    cur = q
    for i in indices:
        M = X.degeneracy(cur, i) * M
        cur += 1
    return M


def shuffle_map_component(X: SimplicialModule, Y: SimplicialModule,
                          p: int, q: int) -> Matrix:
    """Component X_p (x) Y_q -> X_{p+q} (x) Y_{p+q} of the shuffle map.

    For each splitting of {0..p+q-1} into alpha (size p, for the X factor's
    complement) and beta (size q), the term is
    sign * (s_{beta_q}...s_{beta_1} x) (x) (s_{alpha_p}...s_{alpha_1} y).
    """
    from itertools import combinations
    ring = X.ring
    n = p + q
    total = Matrix(ring, X.rank(n) * Y.rank(n), X.rank(p) * Y.rank(q))
    for alpha in combinations(range(n), p):
        beta = tuple(t for t in range(n) if t not in alpha)
        sign = 1
        for a_i, a in enumerate(alpha):
            sign *= (-1) ** (a - a_i)
        sx = _iterated_degeneracy(X, p, list(beta))
        sy = _iterated_degeneracy(Y, q, list(alpha))
        term = sx.kron(sy)
        total = total + (term if sign > 0 else -term)
    return total


def shuffle_chain_map(X: SimplicialModule, Y: SimplicialModule,
                      q_max: int) -> Dict[Tuple[int, int], Matrix]:
    """All components (p, q) with p + q <= q_max of nabla."""
    out = {}
    for p in range(q_max + 1):
        for q in range(q_max + 1 - p):
            out[(p, q)] = shuffle_map_component(X, Y, p, q)
    return out


def check_shuffle_is_chain_map(X: SimplicialModule, Y: SimplicialModule,
                               n_max: int) -> bool:
    """d nabla = nabla d on the tensor-product complex up to degree n_max."""
    ring = X.ring
    CX = chains(X)
    CY = chains(Y)
    CXY = chains(tensor_modules(X, Y, X.q_max))
    for n in range(1, n_max + 1):
        for p in range(n + 1):
            q = n - p
            # source block X_p (x) Y_q of (CX (x) CY)_n
            nab = shuffle_map_component(X, Y, p, q)
            lhs = CXY.differential(n) * nab
            rhs = Matrix(ring, X.rank(n - 1) * Y.rank(n - 1),
                         X.rank(p) * Y.rank(q))
            if p > 0:
                nab_l = shuffle_map_component(X, Y, p - 1, q)
                rhs = rhs + nab_l * CX.differential(p).kron(Matrix.identity(ring, Y.rank(q)))
            if q > 0:
                nab_r = shuffle_map_component(X, Y, p, q - 1)
                term = nab_r * Matrix.identity(ring, X.rank(p)).kron(CY.differential(q))
                rhs = rhs + (term if p % 2 == 0 else -term)
            if lhs != rhs:
                return False
    return True
