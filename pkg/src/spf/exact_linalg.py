"""Exact linear algebra over Z, Q and F_p.

Smith and column-Hermite normal forms, integral kernels and solves, and
homology of bounded chain complexes reported as invariant factors.  Over Z
all arithmetic is arbitrary-precision; pivot selection is the smallest
nonzero absolute value with (row, col) tie-breaking so every routine is
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .matrix import DENSE_FALLBACK_DENSITY, Matrix
from .rings import Ring, ZZ


# ---------------------------------------------------------------------------
# Smith normal form over Z
# ---------------------------------------------------------------------------

def smith_normal_form(M: Matrix, transforms: bool = True):
    """Smith normal form of an integer matrix.

    Returns ``(factors, U, V)`` with ``U @ M @ V`` diagonal, ``U`` and ``V``
    unimodular, and ``factors`` the nonzero diagonal entries forming a
    divisibility chain.  With ``transforms=False`` the (possibly large)
    transformation matrices are skipped and ``(factors, None, None)`` is
    returned.
    """
    if M.ring != ZZ:
        raise ValueError("smith_normal_form requires an integer matrix")
    m, n = M.rows, M.cols
    A = [row[:] for row in M.to_rows()]
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)] if transforms else None
    V = [[1 if i == j else 0 for j in range(n)] for i in range(n)] if transforms else None

    def row_op(i, k, a, b, c, d):
        # (row_i, row_k) <- (a*row_i + b*row_k, c*row_i + d*row_k)
        for X in (A, U) if transforms else (A,):
            Ri, Rk = X[i], X[k]
            for j in range(len(Ri)):
                x, y = Ri[j], Rk[j]
                Ri[j] = a * x + b * y
                Rk[j] = c * x + d * y

    def col_op(j, l, a, b, c, d):
        for X in (A,):
            for row in X:
                x, y = row[j], row[l]
                row[j] = a * x + b * y
                row[l] = c * x + d * y
        if transforms:
            for row in V:
                x, y = row[j], row[l]
                row[j] = a * x + b * y
                row[l] = c * x + d * y

    def swap_rows(i, k):
        A[i], A[k] = A[k], A[i]
        if transforms:
            U[i], U[k] = U[k], U[i]

    def swap_cols(j, l):
        for row in A:
            row[j], row[l] = row[l], row[j]
        if transforms:
            for row in V:
                row[j], row[l] = row[l], row[j]

    def negate_row(i):
        A[i] = [-x for x in A[i]]
        if transforms:
            U[i] = [-x for x in U[i]]

    t = 0
    while True:
        # find pivot: smallest |nonzero| in A[t:, t:], ties by (row, col)
        piv = None
        for i in range(t, m):
            Ai = A[i]
            for j in range(t, n):
                x = Ai[j]
                if x:
                    if piv is None or abs(x) < abs(piv[2]):
                        piv = (i, j, x)
        if piv is None:
            break
        pi, pj, _ = piv
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        if A[t][t] < 0:
            negate_row(t)
        # clear row and column t
        dirty = True
        while dirty:
            dirty = False
            p = A[t][t]
            for i in range(t + 1, m):
                x = A[i][t]
                if x:
                    q = x // p
                    if x - q * p:
                        g, s, u = _xgcd(p, x)
                        row_op(t, i, s, u, -(x // g), p // g)
                        dirty = True
                    else:
                        row_op(t, i, 1, 0, -q, 1)
                    p = A[t][t]
            for j in range(t + 1, n):
                x = A[t][j]
                if x:
                    q = x // p
                    if x - q * p:
                        g, s, u = _xgcd(p, x)
                        col_op(t, j, s, u, -(x // g), p // g)
                        dirty = True
                    else:
                        col_op(t, j, 1, 0, -q, 1)
                    p = A[t][t]
            if A[t][t] < 0:
                negate_row(t)
        t += 1

    # enforce divisibility chain: replace adjacent (a, b) by (gcd, lcm)
    r = t
    changed = True
    while changed:
        changed = False
        for i in range(r - 1):
            a, b = A[i][i], A[i + 1][i + 1]
            if b % a:
                col_op(i, i + 1, 1, 0, 1, 1)           # block [[a,0],[b,b]]
                g, s, u = _xgcd(a, b)
                row_op(i, i + 1, s, u, -(b // g), a // g)  # [[g, u*b], [0, lcm]]
                fill = A[i][i + 1]
                col_op(i, i + 1, 1, 0, -(fill // g), 1)    # clear fill-in
                if A[i][i] < 0:
                    negate_row(i)
                if A[i + 1][i + 1] < 0:
                    negate_row(i + 1)
                changed = True

    factors = tuple(A[i][i] for i in range(r))
    if transforms:
        Um = Matrix.from_rows(ZZ, U) if m else Matrix(ZZ, 0, 0)
        Vm = Matrix.from_rows(ZZ, V) if n else Matrix(ZZ, 0, 0)
        return factors, Um, Vm
    return factors, None, None


def _xgcd(a: int, b: int) -> Tuple[int, int, int]:
    """g, s, t with s*a + t*b = g = gcd(a, b), g >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


# ---------------------------------------------------------------------------
# Column Hermite normal form, kernels, solves
# ---------------------------------------------------------------------------

def column_hermite(M: Matrix) -> Matrix:
    """Basis of the column span as a column Hermite normal form.

    Over Z: the unique HNF lattice basis (pivots positive, entries above a
    pivot reduced into [0, pivot)).  Over a field: reduced column echelon
    form with unit pivots.  Columns are ordered by pivot row.
    """
    cols = _hermite_cols(M)
    return _cols_to_matrix(M.ring, M.rows, cols)


def _hermite_cols(M: Matrix) -> List[dict]:
    """Column HNF as a list of sparse column dicts, pivot-row sorted."""
    R = M.ring
    if R.is_field:
        basis = _field_echelon_cols(M.ring, M.rows, M.columns())
        return basis
    return _z_hermite_cols(M.rows, M.columns())


def _z_hermite_cols(nrows: int, cols: List[dict]) -> List[dict]:
    cols = [dict(c) for c in cols if c]
    pivots: Dict[int, dict] = {}  # pivot row -> column
    work = list(cols)
    while work:
        col = work.pop(0)
        while col:
            r = min(col)
            if r not in pivots:
                if col[r] < 0:
                    col = {i: -x for i, x in col.items()}
                pivots[r] = col
                break
            piv = pivots[r]
            a, b = piv[r], col[r]
            q, rem = divmod(b, a)
            if rem == 0:
                col = _col_axpy(col, piv, -q)
            else:
                g, s, t = _xgcd(a, b)
                new_piv = _col_combine(piv, col, s, t)          # has entry g at r
                new_col = _col_combine(piv, col, -(b // g), a // g)  # zero at r
                pivots[r] = new_piv
                col = new_col
        # (col exhausted -> dependent column dropped)
    # reduce entries above pivots and sort
    rows_sorted = sorted(pivots)
    for idx, r in enumerate(rows_sorted):
        piv = pivots[r]
        # reduce every other pivot column's entry at row r into [0, piv[r])
        for r2 in rows_sorted[:idx]:
            c2 = pivots[r2]
            if r in c2:
                q = c2[r] // piv[r]
                if q:
                    pivots[r2] = _col_axpy(c2, piv, -q)
    return [pivots[r] for r in rows_sorted]


def _field_echelon_cols(ring: Ring, nrows: int, cols: List[dict]) -> List[dict]:
    pivots: Dict[int, dict] = {}
    for col in cols:
        col = dict(col)
        while col:
            r = min(col)
            if r not in pivots:
                inv = ring.inv(col[r])
                pivots[r] = {i: ring.mul(inv, x) for i, x in col.items()}
                break
            col = _col_axpy_ring(ring, col, pivots[r], ring.neg(col[r]))
        else:
            continue
    rows_sorted = sorted(pivots)
    for idx, r in enumerate(rows_sorted):
        piv = pivots[r]
        for r2 in rows_sorted[:idx]:
            c2 = pivots[r2]
            if r in c2:
                pivots[r2] = _col_axpy_ring(ring, c2, piv, ring.neg(c2[r]))
    return [pivots[r] for r in rows_sorted]


def _col_axpy(col: dict, other: dict, c: int) -> dict:
    if c == 0:
        return col
    out = dict(col)
    for i, x in other.items():
        v = out.get(i, 0) + c * x
        if v:
            out[i] = v
        elif i in out:
            del out[i]
    return out


def _col_axpy_ring(ring: Ring, col: dict, other: dict, c) -> dict:
    out = dict(col)
    for i, x in other.items():
        v = ring.add(out.get(i, ring.zero()), ring.mul(c, x))
        if v != 0:
            out[i] = v
        elif i in out:
            del out[i]
    return out


def _col_combine(c1: dict, c2: dict, a, b) -> dict:
    out = {}
    for i in set(c1) | set(c2):
        v = a * c1.get(i, 0) + b * c2.get(i, 0)
        if v:
            out[i] = v
    return out


def _cols_to_matrix(ring: Ring, nrows: int, cols: List[dict]) -> Matrix:
    data = {}
    for j, col in enumerate(cols):
        for i, x in col.items():
            data[(i, j)] = x
    return Matrix(ring, nrows, len(cols), data)


def image_basis(M: Matrix) -> Matrix:
    """Hermite-form basis of the column span (lattice basis over Z)."""
    return column_hermite(M)


def rank(M: Matrix) -> int:
    R = M.ring
    if R.kind == "Fp" and M.rows * M.cols and M.density() > DENSE_FALLBACK_DENSITY:
        return _numpy_rank_mod_p(M)
    return len(_hermite_cols(M))


def _numpy_rank_mod_p(M: Matrix) -> int:
    p = M.ring.p
    A = _to_numpy_mod_p(M)
    return _np_rank(A, p)


def _to_numpy_mod_p(M: Matrix):
    A = np.zeros((M.rows, M.cols), dtype=np.int64)
    for (i, j), x in M.data.items():
        A[i, j] = x % M.ring.p
    return A


def _np_rank(A, p: int) -> int:
    A = A % p
    m, n = A.shape
    r = 0
    for j in range(n):
        if r >= m:
            break
        nz = np.nonzero(A[r:, j])[0]
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, j]), p - 2, p)
        A[r] = (A[r] * inv) % p
        rows = np.nonzero(A[r + 1:, j])[0] + r + 1
        if rows.size:
            A[rows] = (A[rows] - np.outer(A[rows, j], A[r])) % p
        r += 1
    return r


def kernel_basis(M: Matrix) -> Matrix:
    """Basis of ker(M) as matrix columns.

    Over Z this is a Hermite-reduced lattice basis of the full integral
    kernel (saturated by construction).
    """
    R = M.ring
    n = M.cols
    if n == 0:
        return Matrix(R, 0, 0)
    if R.kind == "Fp" and M.rows * n and max(M.rows, n) > 40:
        return _kernel_mod_p(M)
    # column-reduce the stacked matrix [M; I]; kernel = I-part of columns
    # whose M-part vanished.
    stacked = M.vstack(Matrix.identity(R, n))
    cols = stacked.columns()
    if R.is_field:
        reduced = _field_eliminate_track(R, M.rows, cols)
    else:
        reduced = _z_eliminate_track(M.rows, cols)
    ker_cols = [{i - M.rows: x for i, x in c.items()} for c in reduced
                if all(i >= M.rows for i in c)]
    ker_cols = [c for c in ker_cols if c]
    if R.is_field:
        ker_cols = _field_echelon_cols(R, n, ker_cols)
    else:
        ker_cols = _z_hermite_cols(n, ker_cols)
    return _cols_to_matrix(R, n, ker_cols)


def _z_eliminate_track(top_rows: int, cols: List[dict]) -> List[dict]:
    """Column elimination on the top block only, carrying the tail along."""
    pivots: Dict[int, dict] = {}
    done: List[dict] = []
    for col in cols:
        col = dict(col)
        while True:
            top = [i for i in col if i < top_rows]
            if not top:
                done.append(col)
                break
            r = min(top)
            if r not in pivots:
                if col[r] < 0:
                    col = {i: -x for i, x in col.items()}
                pivots[r] = col
                break
            piv = pivots[r]
            a, b = piv[r], col[r]
            q, rem = divmod(b, a)
            if rem == 0:
                col = _col_axpy(col, piv, -q)
            else:
                g, s, t = _xgcd(a, b)
                new_piv = _col_combine(piv, col, s, t)
                col = _col_combine(piv, col, -(b // g), a // g)
                pivots[r] = new_piv
    return done


def _field_eliminate_track(ring: Ring, top_rows: int, cols: List[dict]) -> List[dict]:
    pivots: Dict[int, dict] = {}
    done: List[dict] = []
    for col in cols:
        col = dict(col)
        while True:
            top = [i for i in col if i < top_rows]
            if not top:
                done.append(col)
                break
            r = min(top)
            if r not in pivots:
                pivots[r] = col
                break
            piv = pivots[r]
            c = ring.neg(ring.exact_div(col[r], piv[r]))
            col = _col_axpy_ring(ring, col, piv, c)
    return done


def _kernel_mod_p(M: Matrix) -> Matrix:
    p = M.ring.p
    A = _to_numpy_mod_p(M)
    m, n = A.shape
    # row-reduce A, track pivot columns
    A = A.copy()
    pivcols = []
    r = 0
    for j in range(n):
        if r >= m:
            break
        nz = np.nonzero(A[r:, j])[0]
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, j]), p - 2, p)
        A[r] = (A[r] * inv) % p
        others = np.nonzero(A[:, j])[0]
        others = others[others != r]
        if others.size:
            A[others] = (A[others] - np.outer(A[others, j], A[r])) % p
        pivcols.append(j)
        r += 1
    free = [j for j in range(n) if j not in set(pivcols)]
    data = {}
    for k, j in enumerate(free):
        data[(j, k)] = 1
        for rr, pc in enumerate(pivcols):
            v = (-int(A[rr, j])) % p
            if v:
                data[(pc, k)] = v
    return Matrix(M.ring, n, len(free), data)


@dataclass
class SolveResult:
    """Outcome of an exact linear solve A x = b."""
    solution: Optional[Matrix]
    solvable: bool
    solvable_over_fractions: bool


def solve(A: Matrix, b: Matrix) -> SolveResult:
    """Solve A x = b exactly over the ring of A.

    Over Z an integral solution is returned when one exists; the result
    distinguishes unsolvable-over-Z from unsolvable-over-Q.
    """
    R = A.ring
    if b.rows != A.rows or b.cols != 1:
        raise ValueError("b must be a column of matching height")
    stacked = A.vstack(Matrix.identity(R, A.cols))
    allc = stacked.columns()
    if R.is_field:
        reduced_pivots = _field_solve(R, A.rows, allc, b.column_vector(0))
        if reduced_pivots is None:
            return SolveResult(None, False, False)
        return SolveResult(reduced_pivots, True, True)
    x = _z_solve(A.rows, A.cols, allc, b.column_vector(0))
    if x is not None:
        return SolveResult(x, True, True)
    # decide rational solvability via rank comparison
    rk = rank(A.change_ring(Ring("Q")))
    rk_aug = rank(A.hstack(b).change_ring(Ring("Q")))
    return SolveResult(None, False, rk == rk_aug)


def solve_matrix(A: Matrix, B: Matrix) -> Optional[Matrix]:
    """Solve A X = B columnwise; None if any column unsolvable over the ring."""
    R = A.ring
    if B.rows != A.rows:
        raise ValueError("height mismatch")
    solver = _make_solver(A)
    cols_out = []
    for j in range(B.cols):
        x = solver(B.column_vector(j))
        if x is None:
            return None
        cols_out.append(x)
    return _cols_to_matrix(R, A.cols, cols_out)


def _make_solver(A: Matrix):
    """Factor A once; return a function solving A x = b for sparse b dicts."""
    R = A.ring
    stacked = A.vstack(Matrix.identity(R, A.cols))
    cols = stacked.columns()
    if R.is_field:
        pivots: Dict[int, dict] = {}
        for col in cols:
            col = dict(col)
            while True:
                top = [i for i in col if i < A.rows]
                if not top:
                    break
                r = min(top)
                if r not in pivots:
                    pivots[r] = col
                    break
                c = R.neg(R.exact_div(col[r], pivots[r][r]))
                col = _col_axpy_ring(R, col, pivots[r], c)

        def solve_one(bvec: dict):
            col = {i: R.neg(x) for i, x in bvec.items()}
            while True:
                top = [i for i in col if i < A.rows]
                if not top:
                    break
                r = min(top)
                piv = pivots.get(r)
                if piv is None:
                    return None
                c = R.neg(R.exact_div(col[r], piv[r]))
                col = _col_axpy_ring(R, col, piv, c)
            return {i - A.rows: x for i, x in col.items() if i >= A.rows}
        return solve_one

    pivots: Dict[int, dict] = {}
    for col in cols:
        col = dict(col)
        while True:
            top = [i for i in col if i < A.rows]
            if not top:
                break
            r = min(top)
            if r not in pivots:
                if col[r] < 0:
                    col = {i: -x for i, x in col.items()}
                pivots[r] = col
                break
            piv = pivots[r]
            a, b = piv[r], col[r]
            q, rem = divmod(b, a)
            if rem == 0:
                col = _col_axpy(col, piv, -q)
            else:
                g, s, t = _xgcd(a, b)
                new_piv = _col_combine(piv, col, s, t)
                col = _col_combine(piv, col, -(b // g), a // g)
                pivots[r] = new_piv

    def solve_one_z(bvec: dict):
        col = {i: -x for i, x in bvec.items()}
        while True:
            top = [i for i in col if i < A.rows]
            if not top:
                break
            r = min(top)
            piv = pivots.get(r)
            if piv is None:
                return None
            a, b = piv[r], col[r]
            q, rem = divmod(b, a)
            if rem:
                return None
            col = _col_axpy(col, piv, -q)
        return {i - A.rows: x for i, x in col.items() if i >= A.rows}
    return solve_one_z


def _z_solve(m, n, stacked_cols, bvec):
    pivots: Dict[int, dict] = {}
    for col in stacked_cols:
        col = dict(col)
        while True:
            top = [i for i in col if i < m]
            if not top:
                break
            r = min(top)
            if r not in pivots:
                if col[r] < 0:
                    col = {i: -x for i, x in col.items()}
                pivots[r] = col
                break
            piv = pivots[r]
            a, b = piv[r], col[r]
            q, rem = divmod(b, a)
            if rem == 0:
                col = _col_axpy(col, piv, -q)
            else:
                g, s, t = _xgcd(a, b)
                new_piv = _col_combine(piv, col, s, t)
                col = _col_combine(piv, col, -(b // g), a // g)
                pivots[r] = new_piv
    col = {i: -x for i, x in bvec.items()}
    while True:
        top = [i for i in col if i < m]
        if not top:
            break
        r = min(top)
        piv = pivots.get(r)
        if piv is None:
            return None
        a, b = piv[r], col[r]
        q, rem = divmod(b, a)
        if rem:
            return None
        col = _col_axpy(col, piv, -q)
    x = {i - m: v for i, v in col.items() if i >= m}
    return _cols_to_matrix(ZZ, n, [x]) if x or n else Matrix(ZZ, n, 1)


def _field_solve(R, m, stacked_cols, bvec):
    pivots: Dict[int, dict] = {}
    n = None
    maxi = 0
    for col in stacked_cols:
        for i in col:
            maxi = max(maxi, i)
        col = dict(col)
        while True:
            top = [i for i in col if i < m]
            if not top:
                break
            r = min(top)
            if r not in pivots:
                pivots[r] = col
                break
            c = R.neg(R.exact_div(col[r], pivots[r][r]))
            col = _col_axpy_ring(R, col, pivots[r], c)
    n = maxi + 1 - m
    col = {i: R.neg(x) for i, x in bvec.items()}
    while True:
        top = [i for i in col if i < m]
        if not top:
            break
        r = min(top)
        piv = pivots.get(r)
        if piv is None:
            return None
        c = R.neg(R.exact_div(col[r], piv[r]))
        col = _col_axpy_ring(R, col, piv, c)
    x = {i - m: v for i, v in col.items() if i >= m}
    return _cols_to_matrix(R, max(n, 0), [x]) if x or n else Matrix(R, 0, 1)


class IncrementalSpan:
    """Incrementally built column span (Hermite-style over Z, echelon over
    fields) with membership tests."""

    def __init__(self, ring: Ring):
        self.ring = ring
        self.pivots: Dict[int, dict] = {}

    def reduce(self, col: dict) -> dict:
        ring = self.ring
        col = dict(col)
        while col:
            r = min(col)
            piv = self.pivots.get(r)
            if piv is None:
                return col
            if ring.is_field:
                c = ring.neg(ring.exact_div(col[r], piv[r]))
                col = _col_axpy_ring(ring, col, piv, c)
            else:
                q, rem = divmod(col[r], piv[r])
                if q:
                    col = _col_axpy(col, piv, -q)
                if rem:
                    return col
        return col

    def contains(self, col: dict) -> bool:
        return not self.reduce(col)

    def add(self, col: dict) -> bool:
        """Insert a column; returns True if the span grew."""
        ring = self.ring
        col = dict(col)
        grew = False
        while col:
            r = min(col)
            piv = self.pivots.get(r)
            if piv is None:
                if not ring.is_field and col[r] < 0:
                    col = {i: -x for i, x in col.items()}
                self.pivots[r] = col
                return True
            if ring.is_field:
                c = ring.neg(ring.exact_div(col[r], piv[r]))
                col = _col_axpy_ring(ring, col, piv, c)
            else:
                a, b = piv[r], col[r]
                q, rem = divmod(b, a)
                if rem == 0:
                    col = _col_axpy(col, piv, -q)
                else:
                    g, s, t = _xgcd(a, b)
                    new_piv = _col_combine(piv, col, s, t)
                    col = _col_combine(piv, col, -(b // g), a // g)
                    self.pivots[r] = new_piv
                    grew = True
        return grew


def lattice_contains(basis_cols: List[dict], vec: dict, ring: Ring) -> bool:
    """Membership of vec in the span (lattice over Z) of Hermite basis columns."""
    col = dict(vec)
    piv = {min(c): c for c in basis_cols if c}
    while col:
        r = min(col)
        c = piv.get(r)
        if c is None:
            return False
        if ring.is_field:
            f = ring.neg(ring.exact_div(col[r], c[r]))
            col = _col_axpy_ring(ring, col, c, f)
        else:
            q, rem = divmod(col[r], c[r])
            if rem:
                return False
            col = _col_axpy(col, c, -q)
    return True


# ---------------------------------------------------------------------------
# Chain complexes and homology
# ---------------------------------------------------------------------------

@dataclass
class ChainComplexData:
    """Bounded chain complex: homological convention, d_q : C_q -> C_{q-1}."""
    ring: Ring
    ranks: Dict[int, int]
    differentials: Dict[int, Matrix] = field(default_factory=dict)

    def rank(self, q: int) -> int:
        return self.ranks.get(q, 0)

    def differential(self, q: int) -> Matrix:
        d = self.differentials.get(q)
        if d is None:
            return Matrix(self.ring, self.rank(q - 1), self.rank(q))
        return d

    def validate(self):
        for q, d in self.differentials.items():
            if d.shape != (self.rank(q - 1), self.rank(q)):
                raise ValueError(f"differential {q} has shape {d.shape}, "
                                 f"expected {(self.rank(q - 1), self.rank(q))}")
        for q in sorted(self.ranks):
            if self.rank(q) and self.rank(q + 1):
                dd = self.differential(q) * self.differential(q + 1)
                if not dd.is_zero():
                    raise ValueError(f"d_{q} d_{q+1} != 0")

    def support(self):
        return sorted(q for q, r in self.ranks.items() if r)


@dataclass
class GradedModule:
    """Finitely generated graded module: per degree a free rank and the
    torsion invariant factors (divisibility chain, all > 1)."""
    ring: Ring
    degrees: Dict[int, Tuple[int, Tuple[int, ...]]] = field(default_factory=dict)

    def set(self, q: int, free_rank: int, torsion: Tuple[int, ...] = ()):
        if free_rank or torsion:
            self.degrees[q] = (free_rank, tuple(torsion))

    def get(self, q: int) -> Tuple[int, Tuple[int, ...]]:
        return self.degrees.get(q, (0, ()))

    def is_zero(self) -> bool:
        return not self.degrees

    def shifted(self, s: int) -> "GradedModule":
        out = GradedModule(self.ring)
        for q, v in self.degrees.items():
            out.degrees[q + s] = v
        return out

    def p_primary(self, p: int) -> "GradedModule":
        """The p-primary torsion part (free ranks dropped)."""
        out = GradedModule(self.ring)
        for q, (fr, tors) in self.degrees.items():
            pp = []
            for f in tors:
                pk = 1
                while f % p == 0:
                    pk *= p
                    f //= p
                if pk > 1:
                    pp.append(pk)
            if pp:
                out.degrees[q] = (0, tuple(sorted(pp)))
        return out

    def to_json_dict(self) -> dict:
        return {"degrees": {str(q): {"rank": fr, "torsion": list(t)}
                            for q, (fr, t) in sorted(self.degrees.items())}}

    def __eq__(self, other):
        return isinstance(other, GradedModule) and self.degrees == other.degrees

    def __repr__(self):
        parts = []
        for q in sorted(self.degrees):
            fr, t = self.degrees[q]
            s = []
            if fr:
                s.append(f"free^{fr}")
            s.extend(f"Z/{f}" if self.ring.kind == "Z" else f"t{f}" for f in t)
            parts.append(f"{q}: {'+'.join(s)}")
        return "GradedModule(" + ", ".join(parts) + ")"


def homology(C: ChainComplexData, q: int) -> Tuple[int, Tuple[int, ...]]:
    """H_q(C) = ker d_q / im d_{q+1} as (free rank, invariant factors)."""
    R = C.ring
    nq = C.rank(q)
    if nq == 0:
        return (0, ())
    d_q = C.differential(q)
    d_q1 = C.differential(q + 1)
    if R.is_field:
        k = nq - rank(d_q)
        r1 = rank(d_q1)
        return (k - r1, ())
    K = kernel_basis(d_q)  # nq x k
    if K.cols == 0:
        return (0, ())
    if d_q1.cols == 0 or d_q1.is_zero():
        return (K.cols, ())
    # express the image in kernel coordinates: K Y = d_{q+1}
    Y = solve_matrix(K, d_q1)
    if Y is None:
        raise ArithmeticError("image not contained in kernel: complex invalid")
    factors, _, _ = smith_normal_form(Y, transforms=False)
    tors = tuple(f for f in factors if f > 1)
    return (K.cols - len(factors), tors)


def homology_all(C: ChainComplexData) -> GradedModule:
    out = GradedModule(C.ring)
    degrees = set(C.ranks)
    for q in sorted(degrees):
        fr, t = homology(C, q)
        out.set(q, fr, t)
    return out


def prime_power_view(factors: Tuple[int, ...]) -> List[Tuple[int, int]]:
    """Invariant factors -> sorted list of prime powers (p, k)."""
    out = []
    for f in factors:
        n = f
        d = 2
        while d * d <= n:
            if n % d == 0:
                k = 0
                while n % d == 0:
                    n //= d
                    k += 1
                out.append((d, k))
            d += 1
        if n > 1:
            out.append((n, 1))
    return sorted(out)
