"""Exact matrices over Z, Q or F_p with sparse (dict-of-keys) storage.

Dense list-of-list and numpy views are produced on demand; elimination
routines in :mod:`spf.exact_linalg` switch to dense arrays above a density
threshold.
"""

from __future__ import annotations

from typing import Dict, Iterable, Tuple

from .rings import Ring

# density above which elimination code prefers dense working copies
DENSE_FALLBACK_DENSITY = 0.25


class Matrix:
    """Immutable-by-convention exact sparse matrix."""

    __slots__ = ("ring", "rows", "cols", "data", "_colcache")

    def __init__(self, ring: Ring, rows: int, cols: int,
                 data: Dict[Tuple[int, int], object] | None = None):
        self.ring = ring
        self.rows = rows
        self.cols = cols
        self.data = {} if data is None else data
        self._colcache = None

    # -- constructors ---------------------------------------------------
    @staticmethod
    def zero(ring: Ring, rows: int, cols: int) -> "Matrix":
        return Matrix(ring, rows, cols)

    @staticmethod
    def identity(ring: Ring, n: int) -> "Matrix":
        one = ring.one()
        return Matrix(ring, n, n, {(i, i): one for i in range(n)})

    @staticmethod
    def from_rows(ring: Ring, rows: Iterable[Iterable]) -> "Matrix":
        rows = [list(r) for r in rows]
        m = len(rows)
        n = len(rows[0]) if rows else 0
        data = {}
        for i, r in enumerate(rows):
            if len(r) != n:
                raise ValueError("ragged rows")
            for j, x in enumerate(r):
                x = ring.coerce(x)
                if x != 0:
                    data[(i, j)] = x
        return Matrix(ring, m, n, data)

    @staticmethod
    def from_dict(ring: Ring, rows: int, cols: int, entries: dict) -> "Matrix":
        data = {}
        for (i, j), x in entries.items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise ValueError(f"entry {(i, j)} out of range")
            x = ring.coerce(x)
            if x != 0:
                data[(i, j)] = x
        return Matrix(ring, rows, cols, data)

    @staticmethod
    def column(ring: Ring, values: Iterable) -> "Matrix":
        vals = list(values)
        return Matrix.from_rows(ring, [[v] for v in vals]) if vals else Matrix(ring, 0, 1)

    # -- basic access ----------------------------------------------------
    def __getitem__(self, ij):
        return self.data.get(ij, self.ring.zero())

    def density(self) -> float:
        size = self.rows * self.cols
        return len(self.data) / size if size else 0.0

    def is_zero(self) -> bool:
        return not self.data

    def to_rows(self):
        out = [[self.ring.zero()] * self.cols for _ in range(self.rows)]
        for (i, j), x in self.data.items():
            out[i][j] = x
        return out

    def column_vector(self, j: int) -> dict:
        return {i: x for (i, jj), x in self.data.items() if jj == j}

    def columns(self):
        if self._colcache is None:
            cols = [dict() for _ in range(self.cols)]
            for (i, j), x in self.data.items():
                cols[j][i] = x
            self._colcache = cols
        return self._colcache

    # -- arithmetic --------------------------------------------------------
    def _check_shape(self, other: "Matrix"):
        if self.shape != other.shape or self.ring != other.ring:
            raise ValueError(f"shape/ring mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_shape(other)
        R = self.ring
        data = dict(self.data)
        for k, x in other.data.items():
            s = R.add(data.get(k, 0), x) if k in data else x
            if k in data and s == 0:
                del data[k]
            elif s != 0:
                data[k] = s
        return Matrix(R, self.rows, self.cols, data)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + other.scale(self.ring.neg(self.ring.one()))

    def scale(self, c) -> "Matrix":
        R = self.ring
        c = R.coerce(c)
        if c == 0:
            return Matrix(R, self.rows, self.cols)
        return Matrix(R, self.rows, self.cols,
                      {k: R.mul(c, x) for k, x in self.data.items()})

    def __neg__(self) -> "Matrix":
        return self.scale(self.ring.neg(self.ring.one()))

    def __mul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} * {other.shape}")
        R = self.ring
        # group left entries by column for sparse product
        by_col: Dict[int, list] = {}
        for (i, k), x in self.data.items():
            by_col.setdefault(k, []).append((i, x))
        acc: Dict[Tuple[int, int], object] = {}
        for (k, j), y in other.data.items():
            for i, x in by_col.get(k, ()):
                key = (i, j)
                v = acc.get(key)
                acc[key] = x * y if v is None else v + x * y
        if R.kind == "Fp":
            p = R.p
            data = {k: v % p for k, v in acc.items() if v % p}
        else:
            data = {k: v for k, v in acc.items() if v != 0}
        return Matrix(R, self.rows, other.cols, data)

    def transpose(self) -> "Matrix":
        return Matrix(self.ring, self.cols, self.rows,
                      {(j, i): x for (i, j), x in self.data.items()})

    def kron(self, other: "Matrix") -> "Matrix":
        """Kronecker product, row-major index convention."""
        R = self.ring
        data = {}
        oc, orr = other.cols, other.rows
        for (i, j), x in self.data.items():
            for (k, l), y in other.data.items():
                data[(i * orr + k, j * oc + l)] = R.mul(x, y)
        return Matrix(R, self.rows * orr, self.cols * oc, data)

    # -- block operations ---------------------------------------------------
    @staticmethod
    def block(ring: Ring, grid) -> "Matrix":
        """Assemble from a 2D grid of matrices (or None for zero blocks).

        Every row of the grid must have consistent block heights and every
        column consistent widths; None blocks take their size from peers.
        """
        nbr = len(grid)
        nbc = len(grid[0]) if nbr else 0
        heights = [None] * nbr
        widths = [None] * nbc
        for i in range(nbr):
            for j in range(nbc):
                b = grid[i][j]
                if b is not None:
                    if heights[i] is None:
                        heights[i] = b.rows
                    elif heights[i] != b.rows:
                        raise ValueError("inconsistent block heights")
                    if widths[j] is None:
                        widths[j] = b.cols
                    elif widths[j] != b.cols:
                        raise ValueError("inconsistent block widths")
        if any(h is None for h in heights) or any(w is None for w in widths):
            raise ValueError("cannot infer zero block sizes")
        roff = [0]
        for h in heights:
            roff.append(roff[-1] + h)
        coff = [0]
        for w in widths:
            coff.append(coff[-1] + w)
        data = {}
        for i in range(nbr):
            for j in range(nbc):
                b = grid[i][j]
                if b is None:
                    continue
                r0, c0 = roff[i], coff[j]
                for (r, c), x in b.data.items():
                    data[(r0 + r, c0 + c)] = x
        return Matrix(ring, roff[-1], coff[-1], data)

    def submatrix(self, row_idx, col_idx) -> "Matrix":
        rmap = {r: i for i, r in enumerate(row_idx)}
        cmap = {c: j for j, c in enumerate(col_idx)}
        data = {}
        for (i, j), x in self.data.items():
            if i in rmap and j in cmap:
                data[(rmap[i], cmap[j])] = x
        return Matrix(self.ring, len(rmap), len(cmap), data)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch")
        data = dict(self.data)
        off = self.cols
        for (i, j), x in other.data.items():
            data[(i, j + off)] = x
        return Matrix(self.ring, self.rows, self.cols + other.cols, data)

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.cols != other.cols:
            raise ValueError("col mismatch")
        data = dict(self.data)
        off = self.rows
        for (i, j), x in other.data.items():
            data[(i + off, j)] = x
        return Matrix(self.ring, self.rows + other.rows, self.cols, data)

    # -- conversions -------------------------------------------------------
    def change_ring(self, ring: Ring) -> "Matrix":
        data = {}
        for k, x in self.data.items():
            y = ring.coerce(x)
            if y != 0:
                data[k] = y
        return Matrix(ring, self.rows, self.cols, data)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.ring == other.ring
                and self.shape == other.shape and self.data == other.data)

    def __hash__(self):
        return hash((self.ring, self.rows, self.cols, frozenset(self.data.items())))

    def __repr__(self):
        if self.rows * self.cols <= 64:
            return f"Matrix({self.ring}, {self.to_rows()})"
        return f"Matrix({self.ring}, {self.rows}x{self.cols}, nnz={len(self.data)})"
