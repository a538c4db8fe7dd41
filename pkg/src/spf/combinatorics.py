"""Partitions, p-cores, tableau permutations, shuffles and monomial bases."""

from __future__ import annotations

from itertools import combinations
from math import comb
from typing import Iterator, List, Tuple

from .rings import is_prime


class Partition:
    """Weakly decreasing tuple of positive integers."""

    __slots__ = ("parts",)

    def __init__(self, parts):
        parts = tuple(int(x) for x in parts if x != 0)
        for a, b in zip(parts, parts[1:]):
            if a < b:
                raise ValueError(f"not weakly decreasing: {parts}")
        if any(x < 0 for x in parts):
            raise ValueError(f"negative part in {parts}")
        object.__setattr__(self, "parts", parts)

    def __setattr__(self, *a):
        raise AttributeError("Partition is immutable")

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def __eq__(self, other):
        other = other.parts if isinstance(other, Partition) else tuple(other)
        return self.parts == other

    def __hash__(self):
        return hash(self.parts)

    def __repr__(self):
        return f"Partition{self.parts}"

    def __str__(self):
        return ",".join(map(str, self.parts)) if self.parts else "0"

    @staticmethod
    def parse(s: str) -> "Partition":
        s = s.strip()
        if s in ("0", "", "()"):
            return Partition(())
        return Partition(int(x) for x in s.split(","))

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        cols = [0] * self.parts[0]
        for p in self.parts:
            for i in range(p):
                cols[i] += 1
        return Partition(cols)


def conjugate(lam: Partition) -> Partition:
    return lam.conjugate()


def partitions_of(d: int) -> Iterator[Partition]:
    """All partitions of weight d, lexicographically decreasing."""
    def gen(n, maxp):
        if n == 0:
            yield ()
            return
        for first in range(min(n, maxp), 0, -1):
            for rest in gen(n - first, first):
                yield (first,) + rest
    for p in gen(d, d):
        yield Partition(p)


# --------------------------------------------------------------------------
# p-cores
# --------------------------------------------------------------------------

def p_core(lam: Partition, p: int) -> Partition:
    """The p-core via first-column hook lengths (beta-numbers) mod p.

    Order-independent by construction; the rim-hook removal description is
    kept as a test oracle.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    parts = list(lam.parts)
    n = len(parts)
    betas = [parts[i] + (n - 1 - i) for i in range(n)]  # strictly decreasing
    # place beta-numbers on the p-runners and slide them down
    runners = [[] for _ in range(p)]
    for b in betas:
        runners[b % p].append(b)
    new_betas = []
    for r in range(p):
        k = len(runners[r])
        new_betas.extend(r + p * i for i in range(k))
    new_betas.sort(reverse=True)
    m = len(new_betas)
    core = [new_betas[i] - (m - 1 - i) for i in range(m)]
    return Partition([c for c in core if c > 0])


def remove_rim_hook(parts: Tuple[int, ...], p: int):
    """All partitions obtained by removing one rim p-hook (test oracle)."""
    results = []
    lam = list(parts)
    n = len(lam)
    betas = [lam[i] + (n - 1 - i) for i in range(n)]
    for i, b in enumerate(betas):
        if b - p >= 0 and (b - p) not in betas:
            nb = sorted(betas, reverse=True)
            nb[i] = b - p
            nb.sort(reverse=True)
            m = len(nb)
            cand = [nb[j] - (m - 1 - j) for j in range(m)]
            if all(x >= 0 for x in cand) and all(a > bb for a, bb in zip(nb, nb[1:])):
                results.append(tuple(x for x in cand if x > 0))
    return results


# --------------------------------------------------------------------------
# Tableau permutation sigma_lambda
# --------------------------------------------------------------------------

def standard_tableau(lam: Partition) -> List[List[int]]:
    """Row-by-row filling with 1..d."""
    rows = []
    c = 1
    for p in lam.parts:
        rows.append(list(range(c, c + p)))
        c += p
    return rows


def sigma_lambda(lam: Partition) -> Tuple[int, ...]:
    """One-line permutation: row-reading of the transpose of the standard
    tableau of lam."""
    t = standard_tableau(lam)
    if not t:
        return ()
    width = len(t[0])
    word = []
    for j in range(width):
        for row in t:
            if j < len(row):
                word.append(row[j])
    return tuple(word)


def perm_sign(perm: Tuple[int, ...]) -> int:
    """Sign of a permutation in one-line notation (1-based values)."""
    n = len(perm)
    seen = [False] * n
    sign = 1
    for i in range(n):
        if seen[i]:
            continue
        j = i
        clen = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j] - 1
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


def perm_inverse(perm: Tuple[int, ...]) -> Tuple[int, ...]:
    inv = [0] * len(perm)
    for i, v in enumerate(perm):
        inv[v - 1] = i + 1
    return tuple(inv)


# --------------------------------------------------------------------------
# Shuffles
# --------------------------------------------------------------------------

def shuffles(p: int, q: int) -> List[Tuple[Tuple[int, ...], int]]:
    """All (p, q)-shuffles of {1..p+q} with signs, lexicographic order.

    A shuffle is returned in one-line notation: the permutation mu with
    mu(1) < ... < mu(p) and mu(p+1) < ... < mu(p+q).
    """
    n = p + q
    out = []
    for first in combinations(range(1, n + 1), p):
        rest = tuple(x for x in range(1, n + 1) if x not in first)
        perm = first + rest
        out.append((perm, perm_sign(perm)))
    out.sort(key=lambda t: t[0])
    return out


# --------------------------------------------------------------------------
# Monomial basis labels
# --------------------------------------------------------------------------

SYM, WEDGE, DIV, WORD = "Sym", "Wedge", "Div", "TensorWord"


def basis(kind: str, d: int, m: int) -> List[Tuple[int, ...]]:
    """Canonical ordered basis labels for the monomial functors at rank m.

    Sym / Div: weakly increasing d-tuples over {0..m-1};
    Wedge: strictly increasing; TensorWord: all words.  Lexicographic order.
    """
    if d < 0 or m < 0:
        raise ValueError("d and m must be nonnegative")
    if kind in (SYM, DIV):
        return list(_weakly_increasing(d, m))
    if kind == WEDGE:
        return [tuple(c) for c in combinations(range(m), d)]
    if kind == WORD:
        return list(_words(d, m))
    raise ValueError(f"unknown basis kind {kind}")


def _weakly_increasing(d, m):
    if d == 0:
        yield ()
        return
    def gen(k, lo):
        if k == 0:
            yield ()
            return
        for first in range(lo, m):
            for rest in gen(k - 1, first):
                yield (first,) + rest
    yield from gen(d, 0)


def _words(d, m):
    if d == 0:
        yield ()
        return
    def gen(k):
        if k == 0:
            yield ()
            return
        for first in range(m):
            for rest in gen(k - 1):
                yield (first,) + rest
    yield from gen(d)


def basis_size(kind: str, d: int, m: int) -> int:
    if kind in (SYM, DIV):
        return comb(m + d - 1, d) if d else 1
    if kind == WEDGE:
        return comb(m, d)
    if kind == WORD:
        return m ** d
    raise ValueError(kind)


def compositions(d: int, n: int) -> List[Tuple[int, ...]]:
    """All n-tuples of nonnegative integers summing to d, lex order."""
    out = []
    def gen(rem, k, acc):
        if k == 1:
            out.append(tuple(acc) + (rem,))
            return
        for first in range(rem + 1):
            gen(rem - first, k - 1, acc + [first])
    if n == 0:
        return [()] if d == 0 else []
    gen(d, n, [])
    return out
