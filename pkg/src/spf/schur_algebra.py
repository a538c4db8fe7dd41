"""The Schur algebra S(N, d) made computational.

The algebra is the invariant lattice Gamma^d(End(k^N)) with its divided-power
monomial basis; a functor becomes a module through the polarized action of
the basis elements.  Hom spaces are commutant solves, Ext groups come from
projective resolutions over the algebra, and blocks are p-cores.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .combinatorics import Partition, p_core, partitions_of
from .errors import BudgetExceeded
from .exact_linalg import (GradedModule, IncrementalSpan, kernel_basis, rank,
                           smith_normal_form)
from .functor_engine import (DividedHom, FunctorExpr, compile_functor, degree,
                             monomial_labels)
from .matrix import Matrix
from .rings import Ring


class SchurAlgebra:
    """S(N, d) = Gamma^d(End k^N) with its gamma-monomial basis."""

    def __init__(self, N: int, d: int, ring: Ring):
        # The algebra exists for any N; the module equivalence needs N >= d
        # and module_of enforces it.
        if N < 1:
            raise ValueError("need N >= 1")
        self.N = N
        self.d = d
        self.ring = ring
        pairs = [(p, q) for p in range(N) for q in range(N)]
        self.basis: List[tuple] = [tuple(sorted(lab))
                                   for lab in monomial_labels("Sym", d, pairs)]
        self.index = {b: i for i, b in enumerate(self.basis)}
        self._left_mult: Dict[int, Matrix] = {}
        self._mult_table: Dict[Tuple[int, int], dict] = {}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def element(self, i: int) -> DividedHom:
        return DividedHom.gamma(self.basis[i])

    def identity_coords(self) -> dict:
        xi = DividedHom.identity(self.N, self.d)
        return self.coords(xi)

    def coords(self, xi: DividedHom) -> dict:
        out = {}
        for w, c in xi.gamma_coordinates().items():
            out[self.index[w]] = c
        return out

    def multiply(self, i: int, j: int) -> dict:
        """Structure coordinates of basis[i] o basis[j] (cached)."""
        key = (i, j)
        if key not in self._mult_table:
            prod = self.element(i).compose(self.element(j), self.ring)
            self._mult_table[key] = self.coords(prod)
        return self._mult_table[key]

    def left_mult_matrix(self, i: int) -> Matrix:
        """Left regular representation of basis[i]."""
        if i not in self._left_mult:
            data = {}
            for j in range(self.dim):
                for r, c in self.multiply(i, j).items():
                    data[(r, j)] = c
            self._left_mult[i] = Matrix(self.ring, self.dim, self.dim, data)
        return self._left_mult[i]


def build_algebra(N: int, d: int, ring: Ring) -> SchurAlgebra:
    return SchurAlgebra(N, d, ring)


class SchurModule:
    """A module over S(N, d): an exact action matrix per basis element."""

    def __init__(self, algebra: SchurAlgebra, dim: int,
                 action: List[Matrix], label: str = ""):
        self.algebra = algebra
        self.dim = dim
        self.action = action
        self.label = label

    def verify(self, samples: int = 20, seed: int = 0):
        """Spot-check the multiplication table and the identity action."""
        import random
        rng = random.Random(seed)
        A = self.algebra
        ident = Matrix(A.ring, self.dim, self.dim)
        for i, c in A.identity_coords().items():
            ident = ident + self.action[i].scale(c)
        if ident != Matrix.identity(A.ring, self.dim):
            raise ValueError("identity does not act as identity")
        for _ in range(samples):
            i = rng.randrange(A.dim)
            j = rng.randrange(A.dim)
            lhs = self.action[i] * self.action[j]
            rhs = Matrix(A.ring, self.dim, self.dim)
            for r, c in A.multiply(i, j).items():
                rhs = rhs + self.action[r].scale(c)
            if lhs != rhs:
                raise ValueError(f"action violates multiplication at ({i},{j})")


def module_of(F: FunctorExpr, N: int, ring: Ring,
              algebra: SchurAlgebra | None = None) -> SchurModule:
    """F(k^N) with the polarized action of the algebra basis."""
    d = degree(F, ring)
    if N < d:
        raise ValueError(f"the evaluation equivalence needs N >= deg F"
                         f" (N={N}, d={d})")
    A = algebra or build_algebra(N, d, ring)
    if A.d != d or A.N != N:
        raise ValueError("algebra does not match the functor degree")
    ev = compile_functor(F, ring)
    dim = ev.dim(N)
    action = [ev.act(A.element(i), N, N) for i in range(A.dim)]
    return SchurModule(A, dim, action, label=repr(F))


def hom_space(M: SchurModule, N_: SchurModule) -> Matrix:
    """Basis of the equivariant maps M -> N_ (columns = vectorized maps).

    A map X (dim N_ x dim M) is flattened row-major: unknown (r, c) sits at
    r * dim M + c.  Over Z the result is a Hermite lattice basis.
    """
    A = M.algebra
    if N_.algebra is not A and (N_.algebra.N, N_.algebra.d) != (A.N, A.d):
        raise ValueError("modules over different algebras")
    ring = A.ring
    dm, dn = M.dim, N_.dim
    unknowns = dn * dm
    rows = {}
    nrows = 0
    entries = {}
    for t in range(A.dim):
        rho1 = M.action[t]
        rho2 = N_.action[t]
        # equation (r, c): sum_b X[r,b] rho1[b,c] - sum_b rho2[r,b] X[b,c] = 0
        by_col1: Dict[int, list] = {}
        for (b, c), x in rho1.data.items():
            by_col1.setdefault(c, []).append((b, x))
        by_row2: Dict[int, list] = {}
        for (r, b), x in rho2.data.items():
            by_row2.setdefault(r, []).append((b, x))
        for r in range(dn):
            for c in range(dm):
                row = {}
                for b, x in by_col1.get(c, ()):
                    key = r * dm + b
                    row[key] = ring.add(row.get(key, ring.zero()), x)
                for b, x in by_row2.get(r, ()):
                    key = b * dm + c
                    row[key] = ring.sub(row.get(key, ring.zero()), x)
                row = {k: v for k, v in row.items() if v != 0}
                if row:
                    for k, v in row.items():
                        entries[(nrows, k)] = v
                    nrows += 1
    system = Matrix(ring, nrows, unknowns, entries)
    return kernel_basis(system)


def hom_dim(M: SchurModule, N_: SchurModule) -> int:
    return hom_space(M, N_).cols


# ---------------------------------------------------------------------------
# Projective resolutions and Ext over a prime field
# ---------------------------------------------------------------------------

class FreeCover:
    """A map A^r -> M given by generator vectors, with its evaluation matrix."""

    def __init__(self, A: SchurAlgebra, gens: List[Matrix], target_dim: int,
                 apply_elem):
        self.A = A
        self.gens = gens
        self.r = len(gens)
        # columns indexed by (copy i, algebra basis t): e_i * xi_t |-> xi_t . g_i
        data = {}
        for i, g in enumerate(gens):
            for t in range(A.dim):
                col = apply_elem(t, g)
                jcol = i * A.dim + t
                for (rr, _), x in col.data.items():
                    data[(rr, jcol)] = x
        self.matrix = Matrix(A.ring, target_dim, self.r * A.dim, data)


def module_generators(A: SchurAlgebra, dim: int, apply_elem,
                      vectors: List[Matrix]) -> List[Matrix]:
    """Greedy small generating set: keep candidates outside the current span.

    The span of the kept generators is closed under the algebra (the orbit of
    each generator under the basis is inserted), so on exit it contains every
    candidate and hence the submodule they generate.
    """
    ring = A.ring
    span = IncrementalSpan(ring)
    gens = []
    for v in vectors:
        col = {i: x for (i, _), x in v.data.items()}
        if not col or span.contains(col):
            continue
        gens.append(v)
        for t in range(A.dim):
            w = apply_elem(t, v)
            span.add({i: x for (i, _), x in w.data.items()})
    return gens


def projective_resolution(M: SchurModule, length: int,
                          pad_first: int = 0) -> List[FreeCover]:
    """Free covers P_0 <- P_1 <- ... over the algebra (greedy generators).

    pad_first adds redundant generators to P_0, producing a deliberately
    non-minimal resolution for the independence cross-check.
    """
    A = M.algebra
    ring = A.ring

    def apply_on_module(t, vec):
        return M.action[t] * vec

    candidates = [Matrix(ring, M.dim, 1, {(i, 0): ring.one()})
                  for i in range(M.dim)]
    gens = module_generators(A, M.dim, apply_on_module, candidates)
    if pad_first and gens:
        gens = gens + gens[:pad_first]
    covers = [FreeCover(A, gens, M.dim, apply_on_module)]
    left = {}

    def apply_on_free(t, vec, r):
        # block-diagonal left multiplication on A^r
        if t not in left:
            left[t] = A.left_mult_matrix(t).columns()
        cols = left[t]
        data = {}
        for (i, _), x in vec.data.items():
            copy, idx = divmod(i, A.dim)
            for a, y in cols[idx].items():
                key = (copy * A.dim + a, 0)
                cur = data.get(key)
                v = ring.mul(y, x)
                data[key] = v if cur is None else ring.add(cur, v)
        return Matrix(ring, vec.rows, 1, {k: v for k, v in data.items() if v != 0})

    for step in range(length):
        prev = covers[-1]
        K = kernel_basis(prev.matrix)
        if K.cols == 0:
            break
        free_rank = prev.r * A.dim
        candidates = []
        for j in range(K.cols):
            candidates.append(Matrix(ring, free_rank, 1,
                                     {(i, 0): x for (i, jj), x in K.data.items()
                                      if jj == j}))
        gens = module_generators(A, free_rank, lambda t, v: apply_on_free(t, v, prev.r),
                                 candidates)
        covers.append(FreeCover(A, gens, free_rank,
                                lambda t, v: apply_on_free(t, v, prev.r)))
    return covers


def ext_groups(M: SchurModule, N_: SchurModule, top: int,
               pad_first: int = 0) -> GradedModule:
    """dim Ext^i_A(M, N_) for 0 <= i <= top, over a prime field."""
    A = M.algebra
    ring = A.ring
    if not ring.is_field:
        raise ValueError("ext_groups is supported over prime fields only")
    covers = projective_resolution(M, top + 1, pad_first=pad_first)
    # Hom_A(A^r, N) = N^r; the induced maps come from the generator vectors
    out = GradedModule(ring)
    hom_dims = [c.r * N_.dim for c in covers]

    def induced(step: int) -> Matrix:
        """Hom(P_{step-1}, N) -> Hom(P_step, N)."""
        prev = covers[step - 1]
        cur = covers[step]
        data = {}
        for j, g in enumerate(cur.gens):
            # g in A^{r_prev}: phi |-> sum over entries of rho_N(xi_t) phi_i
            for (idx, _), x in g.data.items():
                copy, t = divmod(idx, A.dim)
                rho = N_.action[t]
                for (a, b), y in rho.data.items():
                    # phi component (copy, b) feeds output (j, a)
                    key = (j * N_.dim + a, copy * N_.dim + b)
                    cur_v = data.get(key)
                    v = ring.mul(x, y)
                    data[key] = v if cur_v is None else ring.add(cur_v, v)
        return Matrix(ring, cur.r * N_.dim, prev.r * N_.dim,
                      {k: v for k, v in data.items() if v != 0})

    mats = [induced(s) for s in range(1, len(covers))]
    for i in range(top + 1):
        if i >= len(covers):
            out.set(i, 0)
            continue
        d_out = mats[i] if i < len(mats) else Matrix(ring, 0, hom_dims[i])
        d_in = mats[i - 1] if i >= 1 else Matrix(ring, hom_dims[0], 0)
        dim_ker = hom_dims[i] - rank(d_out)
        dim_im = rank(d_in)
        out.set(i, dim_ker - dim_im)
    return out


# ---------------------------------------------------------------------------
# Blocks
# ---------------------------------------------------------------------------

def blocks(d: int, p: int) -> Dict[Partition, List[Partition]]:
    """Partition the weight-d partitions by p-core (Nakayama rule)."""
    out: Dict[Partition, List[Partition]] = {}
    for lam in partitions_of(d):
        out.setdefault(p_core(lam, p), []).append(lam)
    return out


def block_disjoint(factors_hint: List[Partition], lam: Partition, p: int) -> bool:
    """No partition in the hint list shares lam's p-core."""
    core = p_core(lam, p)
    return all(p_core(mu, p) != core for mu in factors_hint)


def composition_pairing_surjective(N: int, d: int, a: int, b: int,
                                   ring: Ring) -> bool:
    """hom(k^a, k^N) (x) hom(k^N, k^b) ->> hom(k^a, k^b) in Gamma^d V_k.

    The appendix hypothesis for P = k^N; checked by Smith factors over Z,
    rank over a field.
    """
    pairs_ap = [(p, q) for p in range(N) for q in range(a)]
    pairs_pb = [(p, q) for p in range(b) for q in range(N)]
    pairs_ab = [(p, q) for p in range(b) for q in range(a)]
    basis_ap = monomial_labels("Sym", d, pairs_ap)
    basis_pb = monomial_labels("Sym", d, pairs_pb)
    idx_ab = {w: i for i, w in enumerate(monomial_labels("Sym", d, pairs_ab))}
    data = {}
    col = 0
    for w1 in basis_pb:
        xi1 = DividedHom.gamma(tuple(sorted(w1)))
        for w2 in basis_ap:
            xi2 = DividedHom.gamma(tuple(sorted(w2)))
            prod = xi1.compose(xi2, ring)
            for w, c in prod.gamma_coordinates().items():
                data[(idx_ab[tuple(sorted(w))], col)] = c
            col += 1
    Mx = Matrix(ring, len(idx_ab), col, data)
    if ring.is_field:
        return rank(Mx) == len(idx_ab)
    factors, _, _ = smith_normal_form(Mx, transforms=False)
    return len(factors) == len(idx_ab) and all(f == 1 for f in factors)
