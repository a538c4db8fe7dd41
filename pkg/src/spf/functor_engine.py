"""Evaluable homogeneous strict polynomial functors.

A functor expression is a syntax tree over the catalog (symmetric, exterior,
divided and tensor powers, tensor products, composition, duality, Frobenius
twist, parameterization, Schur and Weyl functors).  Per ground ring an
expression compiles to an evaluator that can

  * enumerate a canonical ordered basis of F(k^m),
  * produce the matrix F(f) for an arbitrary linear map f,
  * apply variable *substitutions* (rename / merge / kill) cheaply on
    monomial bases -- the operation the derived-functor engine runs on, and
  * apply the divided-power action, i.e. the linear extension of
    f |-> F(f) to the whole lattice of invariant tensors
    Gamma^d(Hom(V, W)) -- the operation Schur-algebra modules and the
    Ringel-duality calculus run on.

Variables of k^m are 0..m-1.  Sym/Div labels are weakly increasing tuples,
Wedge labels strictly increasing, tensor words plain tuples, tensor-product
labels tuples of factor labels, composite labels relabel the inner functor's
basis as 0..dim-1.  All label lists are lexicographically sorted, so every
matrix is deterministic.
"""

from __future__ import annotations

import re
from collections import Counter
from functools import lru_cache
from itertools import permutations
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

from .combinatorics import Partition, basis as comb_basis
from .exact_linalg import kernel_basis, solve_matrix
from .matrix import Matrix
from .rings import Ring


class UnsupportedRing(Exception):
    pass


class InternalError(Exception):
    pass


# ===========================================================================
# Functor expressions
# ===========================================================================

class FunctorExpr:
    __slots__ = ("tag", "args")

    def __init__(self, tag: str, args: tuple):
        object.__setattr__(self, "tag", tag)
        object.__setattr__(self, "args", args)

    def __setattr__(self, *a):
        raise AttributeError("FunctorExpr is immutable")

    def __eq__(self, other):
        return (isinstance(other, FunctorExpr)
                and self.tag == other.tag and self.args == other.args)

    def __hash__(self):
        return hash((self.tag, self.args))

    def __repr__(self):
        return expr_to_str(self)


def Const() -> FunctorExpr:
    return FunctorExpr("Const", ())


def Sym(d: int) -> FunctorExpr:
    return FunctorExpr("Sym", (int(d),))


def Wedge(d: int) -> FunctorExpr:
    return FunctorExpr("Wedge", (int(d),))


def Div(d: int) -> FunctorExpr:
    return FunctorExpr("Div", (int(d),))


def TensorPower(d: int) -> FunctorExpr:
    return FunctorExpr("TensorPower", (int(d),))


def Tensor(*factors: FunctorExpr) -> FunctorExpr:
    return FunctorExpr("Tensor", tuple(factors))


def Compose(F: FunctorExpr, G: FunctorExpr) -> FunctorExpr:
    return FunctorExpr("Compose", (F, G))


def Dual(F: FunctorExpr) -> FunctorExpr:
    return FunctorExpr("Dual", (F,))


def Schur(lam) -> FunctorExpr:
    return FunctorExpr("Schur", (lam if isinstance(lam, Partition) else Partition(lam),))


def Weyl(lam) -> FunctorExpr:
    return FunctorExpr("Weyl", (lam if isinstance(lam, Partition) else Partition(lam),))


def Twist(r: int) -> FunctorExpr:
    return FunctorExpr("Twist", (int(r),))


def Param(F: FunctorExpr, r: int) -> FunctorExpr:
    return FunctorExpr("Param", (F, int(r)))


def degree(F: FunctorExpr, ring: Ring | None = None) -> int:
    t = F.tag
    if t == "Const":
        return 0
    if t in ("Sym", "Wedge", "Div", "TensorPower"):
        return F.args[0]
    if t == "Tensor":
        return sum(degree(G, ring) for G in F.args)
    if t == "Compose":
        return degree(F.args[0], ring) * degree(F.args[1], ring)
    if t == "Dual":
        return degree(F.args[0], ring)
    if t in ("Schur", "Weyl"):
        return F.args[0].weight
    if t == "Twist":
        if ring is None or ring.kind != "Fp":
            raise UnsupportedRing("Frobenius twist needs a prime field")
        return ring.p ** F.args[0]
    if t == "Param":
        return degree(F.args[0], ring)
    raise ValueError(t)


def canonicalize(F: FunctorExpr) -> FunctorExpr:
    """Rewrite duality through the tree: Sym<->Div, Schur<->Weyl, etc."""
    t = F.tag
    if t == "Dual":
        G = canonicalize(F.args[0])
        g = G.tag
        if g == "Const":
            return G
        if g == "Sym":
            return Div(G.args[0])
        if g == "Div":
            return Sym(G.args[0])
        if g in ("Wedge", "TensorPower", "Twist"):
            return G
        if g == "Tensor":
            return Tensor(*[canonicalize(Dual(H)) for H in G.args])
        if g == "Compose":
            return Compose(canonicalize(Dual(G.args[0])),
                           canonicalize(Dual(G.args[1])))
        if g == "Schur":
            return Weyl(G.args[0])
        if g == "Weyl":
            return Schur(G.args[0])
        if g == "Param":
            return Param(canonicalize(Dual(G.args[0])), G.args[1])
        raise ValueError(g)
    if t == "Tensor":
        return Tensor(*[canonicalize(G) for G in F.args])
    if t == "Compose":
        return Compose(canonicalize(F.args[0]), canonicalize(F.args[1]))
    if t == "Param":
        return Param(canonicalize(F.args[0]), F.args[1])
    return F


# -- expression grammar -------------------------------------------------
#   S[d]  W[d]  G[d]  T[d]  Schur[2,1]  Weyl[2,1]  Tw[r]  Dual(...)
#   Param(F,r)  Const  A*B (tensor)  A o B (compose)  parentheses

_TOKEN = re.compile(r"\s*(Schur|Weyl|Tw|Dual|Param|Const|S|W|G|T|o|\*|\(|\)|\[|\]|,|\d+)")


def parse_expr(s: str) -> FunctorExpr:
    tokens = []
    pos = 0
    while pos < len(s):
        if s[pos:].strip() == "":
            break
        m = _TOKEN.match(s, pos)
        if not m:
            raise ValueError(f"cannot tokenize functor expression at {s[pos:]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    out, rest = _parse_tensor(tokens)
    if rest:
        raise ValueError(f"trailing tokens {rest} in functor expression")
    return out


def _parse_tensor(toks):
    left, toks = _parse_compose(toks)
    while toks and toks[0] == "*":
        right, toks = _parse_compose(toks[1:])
        factors = list(left.args) if left.tag == "Tensor" else [left]
        factors.append(right)
        left = Tensor(*factors)
    return left, toks


def _parse_compose(toks):
    left, toks = _parse_atom(toks)
    while toks and toks[0] == "o":
        right, toks = _parse_atom(toks[1:])
        left = Compose(left, right)
    return left, toks


def _parse_atom(toks):
    if not toks:
        raise ValueError("unexpected end of functor expression")
    t = toks[0]
    if t == "(":
        inner, rest = _parse_tensor(toks[1:])
        if not rest or rest[0] != ")":
            raise ValueError("unbalanced parentheses")
        return inner, rest[1:]
    if t in ("S", "W", "G", "T", "Tw"):
        if len(toks) < 4 or toks[1] != "[" or toks[3] != "]":
            raise ValueError(f"expected {t}[n]")
        n = int(toks[2])
        ctor = {"S": Sym, "W": Wedge, "G": Div, "T": TensorPower, "Tw": Twist}[t]
        return ctor(n), toks[4:]
    if t in ("Schur", "Weyl"):
        if toks[1] != "[":
            raise ValueError(f"expected {t}[...]")
        i = 2
        parts = []
        while toks[i] != "]":
            if toks[i] != ",":
                parts.append(int(toks[i]))
            i += 1
        return (Schur if t == "Schur" else Weyl)(parts), toks[i + 1:]
    if t == "Dual":
        if toks[1] != "(":
            raise ValueError("expected Dual(...)")
        inner, rest = _parse_tensor(toks[2:])
        if not rest or rest[0] != ")":
            raise ValueError("unbalanced Dual(")
        return Dual(inner), rest[1:]
    if t == "Param":
        if toks[1] != "(":
            raise ValueError("expected Param(F,r)")
        inner, rest = _parse_tensor(toks[2:])
        if len(rest) < 3 or rest[0] != "," or rest[2] != ")":
            raise ValueError("expected Param(F,r)")
        return Param(inner, int(rest[1])), rest[3:]
    if t == "Const":
        return Const(), toks[1:]
    raise ValueError(f"unexpected token {t!r}")


def expr_to_str(F: FunctorExpr) -> str:
    t = F.tag
    if t == "Const":
        return "Const"
    if t in ("Sym", "Wedge", "Div", "TensorPower", "Twist"):
        letter = {"Sym": "S", "Wedge": "W", "Div": "G",
                  "TensorPower": "T", "Twist": "Tw"}[t]
        return f"{letter}[{F.args[0]}]"
    if t == "Tensor":
        return "*".join(f"({expr_to_str(G)})" if G.tag in ("Tensor", "Compose")
                        else expr_to_str(G) for G in F.args)
    if t == "Compose":
        a, b = F.args
        sa = f"({expr_to_str(a)})" if a.tag in ("Tensor", "Compose") else expr_to_str(a)
        sb = f"({expr_to_str(b)})" if b.tag in ("Tensor", "Compose") else expr_to_str(b)
        return f"{sa} o {sb}"
    if t == "Dual":
        return f"Dual({expr_to_str(F.args[0])})"
    if t in ("Schur", "Weyl"):
        return f"{t}[{','.join(map(str, F.args[0].parts))}]"
    if t == "Param":
        return f"Param({expr_to_str(F.args[0])},{F.args[1]})"
    raise ValueError(t)


# ===========================================================================
# Divided homs: invariant tensors in Hom(k^a, k^b)^{(x) d}
# ===========================================================================

class DividedHom:
    """Sparse invariant element of Hom(k^a,k^b)^{(x)d}.

    Words are d-tuples of (target, source) index pairs; the dict maps each
    word of the support (full orbit) to its coefficient.  Invariance under
    simultaneous permutation is the caller's contract (gamma-basis elements
    and their compositions satisfy it by construction).
    """

    __slots__ = ("words", "d")

    def __init__(self, words: Dict[tuple, object], d: int):
        self.words = words
        self.d = d

    @staticmethod
    def gamma(pairs: Sequence[Tuple[int, int]], coeff=1) -> "DividedHom":
        """Orbit sum of the multiset of (target, source) pairs."""
        pairs = tuple(sorted(pairs))
        words = {}
        for w in set(permutations(pairs)):
            words[w] = coeff
        return DividedHom(words, len(pairs))

    @staticmethod
    def zero(d: int) -> "DividedHom":
        return DividedHom({}, d)

    def is_zero(self):
        return not self.words

    def scale(self, c, ring: Ring) -> "DividedHom":
        if c == 0:
            return DividedHom.zero(self.d)
        return DividedHom({w: ring.mul(c, x) for w, x in self.words.items()}, self.d)

    def add(self, other: "DividedHom", ring: Ring) -> "DividedHom":
        words = dict(self.words)
        for w, x in other.words.items():
            v = ring.add(words.get(w, ring.zero()), x)
            if v == 0:
                words.pop(w, None)
            else:
                words[w] = v
        return DividedHom(words, self.d)

    def compose(self, other: "DividedHom", ring: Ring) -> "DividedHom":
        """self o other, factorwise composition of elementary maps."""
        out: Dict[tuple, object] = {}
        by_src: Dict[tuple, list] = {}
        for w, c in self.words.items():
            by_src.setdefault(tuple(q for (_, q) in w), []).append((w, c))
        for w2, c2 in other.words.items():
            key = tuple(p for (p, _) in w2)
            for w1, c1 in by_src.get(key, ()):
                w = tuple((w1[i][0], w2[i][1]) for i in range(self.d))
                v = ring.add(out.get(w, ring.zero()), ring.mul(c1, c2))
                if v == 0:
                    out.pop(w, None)
                else:
                    out[w] = v
        return DividedHom(out, self.d)

    def transpose(self) -> "DividedHom":
        return DividedHom({tuple((q, p) for (p, q) in w): c
                           for w, c in self.words.items()}, self.d)

    def insert_identity_left(self, r: int, src_rank: int, tgt_rank: int) -> "DividedHom":
        """id_{k^r} (x) xi  under the rank convention (a, u) -> a*rank + u."""
        out = {}
        for w, c in self.words.items():
            for a_choice in _words_over(r, self.d):
                w2 = tuple((a_choice[i] * tgt_rank + w[i][0],
                            a_choice[i] * src_rank + w[i][1]) for i in range(self.d))
                out[w2] = c
        return DividedHom(out, self.d)

    def by_source_word(self) -> Dict[tuple, list]:
        out: Dict[tuple, list] = {}
        for w, c in self.words.items():
            out.setdefault(tuple(q for (_, q) in w), []).append(
                (tuple(p for (p, _) in w), c))
        return out

    def gamma_coordinates(self) -> Dict[tuple, object]:
        """Coordinates on the gamma-monomial basis (sorted-word representatives)."""
        return {w: c for w, c in self.words.items() if tuple(sorted(w)) == w}

    def split(self, degs: Sequence[int]) -> List[Tuple[Tuple[tuple, ...], object]]:
        """External comultiplication into Gamma^{d1} (x) ... (x) Gamma^{dk}.

        Returns (tuple of sorted pair-multisets, coeff) entries; the
        coefficient of a pure tensor of gamma-monomials is the coefficient
        of its concatenated representative word.
        """
        offs = [0]
        for a in degs:
            offs.append(offs[-1] + a)
        seen = {}
        for w in self.words:
            key = tuple(tuple(sorted(w[offs[i]:offs[i + 1]])) for i in range(len(degs)))
            if key not in seen:
                rep = tuple(x for part in key for x in part)
                c = self.words.get(rep)
                if c is not None:
                    seen[key] = c
        return list(seen.items())

    @staticmethod
    def identity(rank: int, d: int) -> "DividedHom":
        """gamma_d(id): all diagonal words, coefficient 1."""
        words = {}
        for w in _words_over(rank, d):
            words[tuple((v, v) for v in w)] = 1
        return DividedHom(words, d)


def _words_over(m: int, d: int):
    if d == 0:
        yield ()
        return
    idx = [0] * d
    while True:
        yield tuple(idx)
        i = d - 1
        while i >= 0:
            idx[i] += 1
            if idx[i] < m:
                break
            idx[i] = 0
            i -= 1
        if i < 0:
            return


# ===========================================================================
# Label algebra helpers
# ===========================================================================

def _sort_sign(seq):
    """Insertion sort returning (sign, sorted); sign 0 on repeats."""
    seq = list(seq)
    sign = 1
    for i in range(1, len(seq)):
        j = i
        while j > 0 and seq[j - 1] > seq[j]:
            seq[j - 1], seq[j] = seq[j], seq[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and seq[j - 1] == seq[j]:
            return 0, seq
    return sign, seq


def _pow_ring(ring, c, n):
    out = ring.one()
    for _ in range(n):
        out = ring.mul(out, c)
    return out


def monomial_labels(kind: str, d: int, variables) -> List[tuple]:
    """Ordered monomial labels over an arbitrary ordered alphabet."""
    vs = list(variables)
    key = "TensorWord" if kind == "TensorPower" else kind
    return [tuple(vs[i] for i in lab) for lab in comb_basis(key, d, len(vs))]


# ===========================================================================
# Evaluators
# ===========================================================================

class Evaluator:
    """Compiled (expr, ring).  Subclasses fill in the label services."""

    def dim(self, m: int) -> int:
        return len(self.labels(m))

    def label_index(self, m: int) -> Dict:
        key = ("idx", m)
        if key not in self._cache:
            self._cache[key] = {lab: i for i, lab in enumerate(self.labels(m))}
        return self._cache[key]

    def matrix(self, f: Matrix) -> Matrix:
        src = self.labels(f.cols)
        tgt = self.label_index(f.rows)
        cols = {}
        for j, lab in enumerate(src):
            cols[j] = self.apply_map(lab, f)
        data = {}
        for j, img in cols.items():
            for lab2, c in img.items():
                i = tgt.get(lab2)
                if i is not None and c != 0:
                    data[(i, j)] = c
        return Matrix(self.ring, len(tgt), len(src), data)

    def subst_matrix(self, m_src: int, m_tgt: int, vmap: dict) -> Matrix:
        src = self.labels(m_src)
        tgt = self.label_index(m_tgt)
        data = self.subst_entries(src, vmap, tgt, m_src, m_tgt)
        return Matrix(self.ring, len(tgt), len(src), data)

    def subst_entries(self, src_labels, vmap, tgt_pos, m_src, m_tgt):
        """Generic path for single-target substitution functors."""
        R = self.ring
        data = {}
        for j, lab in enumerate(src_labels):
            t = self.subst_label(lab, vmap, m_src, m_tgt)
            if t is None:
                continue
            lab2, c = t
            i = tgt_pos.get(lab2)
            if i is not None and c != 0:
                data[(i, j)] = c
        return data

    def act(self, xi: DividedHom, m_src: int, m_tgt: int) -> Matrix:
        src = self.labels(m_src)
        tgt = self.label_index(m_tgt)
        data = self.act_entries(xi, src, tgt, m_src, m_tgt)
        return Matrix(self.ring, len(tgt), len(src), data)

    # -- subclass hooks -------------------------------------------------
    def labels(self, m: int) -> list:
        raise NotImplementedError

    def var_weight(self, label, m: int) -> dict:
        raise NotImplementedError

    def subst_label(self, label, vmap, m_src, m_tgt):
        raise NotImplementedError("no single-target substitution")

    def apply_map(self, label, f: Matrix) -> dict:
        """Image of a basis label under F(f), as {label: coeff}."""
        raise NotImplementedError

    def act_entries(self, xi, src_labels, tgt_pos, m_src, m_tgt) -> dict:
        raise NotImplementedError


class ConstEvaluator(Evaluator):
    def __init__(self, expr, ring):
        self.expr, self.ring, self.d = expr, ring, 0
        self._cache = {}

    def labels(self, m):
        return [()]

    def var_weight(self, label, m):
        return {}

    def subst_label(self, label, vmap, m_src, m_tgt):
        return (), self.ring.one()

    def apply_map(self, label, f):
        return {(): self.ring.one()}

    def act_entries(self, xi, src_labels, tgt_pos, m_src, m_tgt):
        i = tgt_pos.get(())
        return {(i, 0): self.ring.one()} if i is not None else {}


class MonoEvaluator(Evaluator):
    """Sym / Wedge / Div / TensorPower."""

    def __init__(self, expr, ring, kind, d):
        self.expr, self.ring, self.kind, self.d = expr, ring, kind, d
        self._cache = {}

    def labels(self, m):
        key = ("labels", m)
        if key not in self._cache:
            kind = "TensorWord" if self.kind == "TensorPower" else self.kind
            self._cache[key] = comb_basis(kind, self.d, m)
        return self._cache[key]

    def var_weight(self, label, m):
        w = {}
        for v in label:
            w[v] = w.get(v, 0) + 1
        return w

    # -- substitution ----------------------------------------------------
    def subst_label(self, label, vmap, m_src, m_tgt):
        R = self.ring
        kind = self.kind
        out = []
        coeff = R.one()
        for v in label:
            t = vmap.get(v)
            if t is None:
                return None
            v2, c = t
            out.append(v2)
            coeff = R.mul(coeff, c)
        if coeff == 0:
            return None
        if kind == "TensorPower":
            return tuple(out), coeff
        if kind == "Sym":
            return tuple(sorted(out)), coeff
        if kind == "Wedge":
            sign, s = _sort_sign(out)
            if sign == 0:
                return None
            return tuple(s), coeff if sign > 0 else R.neg(coeff)
        # Div: coefficient rules with multinomial merge factors
        src = Counter(label)
        coeff = R.one()
        tgt = Counter()
        merge: Dict[int, list] = {}
        for v, a in src.items():
            v2, c = vmap.get(v)
            coeff = R.mul(coeff, _pow_ring(R, c, a))
            tgt[v2] += a
            merge.setdefault(v2, []).append(a)
        for v2, parts in merge.items():
            if len(parts) > 1:
                mfac = factorial(sum(parts))
                for a in parts:
                    mfac //= factorial(a)
                coeff = R.mul(coeff, R.coerce(mfac))
        if coeff == 0:
            return None
        lab2 = []
        for v2 in sorted(tgt):
            lab2.extend([v2] * tgt[v2])
        return tuple(lab2), coeff

    # -- general linear maps ----------------------------------------------
    def apply_map(self, label, f):
        R = self.ring
        cols = f.columns()
        kind = self.kind
        if kind == "Div":
            out = {}
            for arrangement in set(permutations(label)):
                acc = {(): R.one()}
                for v in arrangement:
                    nxt = {}
                    for word, c in acc.items():
                        for w, cw in cols[v].items():
                            key = word + (w,)
                            nxt[key] = R.add(nxt.get(key, R.zero()), R.mul(c, cw))
                    acc = nxt
                for word, c in acc.items():
                    if c != 0 and tuple(sorted(word)) == word:
                        out[word] = R.add(out.get(word, R.zero()), c)
            return {k: v for k, v in out.items() if v != 0}
        acc = {(): R.one()}
        for v in label:
            nxt = {}
            for mono, c in acc.items():
                for w, cw in cols[v].items():
                    cc = R.mul(c, cw)
                    if kind == "Sym":
                        key = tuple(sorted(mono + (w,)))
                    elif kind == "TensorPower":
                        key = mono + (w,)
                    else:  # Wedge
                        if w in mono:
                            continue
                        sign, s = _sort_sign(mono + (w,))
                        key = tuple(s)
                        if sign < 0:
                            cc = R.neg(cc)
                    nxt[key] = R.add(nxt.get(key, R.zero()), cc)
            acc = {k: v for k, v in nxt.items() if v != 0}
        return acc

    # -- divided action ----------------------------------------------------
    def act_entries(self, xi, src_labels, tgt_pos, m_src, m_tgt):
        R = self.ring
        kind = self.kind
        by_src = xi.by_source_word()
        data = {}
        for j, lab in enumerate(src_labels):
            img = self._act_label(lab, by_src, R, kind)
            for lab2, c in img.items():
                i = tgt_pos.get(lab2)
                if i is not None and c != 0:
                    data[(i, j)] = c
        return data

    @staticmethod
    def _act_label(lab, by_src, R, kind):
        if kind == "Div":
            acc = {}
            for word in set(permutations(lab)):
                for tgt_word, c in by_src.get(word, ()):
                    if tuple(sorted(tgt_word)) == tgt_word:
                        acc[tgt_word] = R.add(acc.get(tgt_word, R.zero()), R.coerce(c))
            return acc
        acc = {}
        for tgt_word, c in by_src.get(tuple(lab), ()):
            c = R.coerce(c)
            if kind == "Sym":
                lab2 = tuple(sorted(tgt_word))
            elif kind == "TensorPower":
                lab2 = tgt_word
            else:
                sign, s = _sort_sign(tgt_word)
                if sign == 0:
                    continue
                lab2 = tuple(s)
                if sign < 0:
                    c = R.neg(c)
            acc[lab2] = R.add(acc.get(lab2, R.zero()), c)
        return acc

    # -- parameterized divided action (the Ringel-side hot path) -----------
    def act_param(self, xi: DividedHom, a: int, b: int, u: int) -> Matrix:
        """Matrix of X^d(xi (x) id_{k^u}): X^d(k^a (x) k^u) -> X^d(k^b (x) k^u).

        Variables are flattened (param, vec) -> param*u + vec.
        """
        R = self.ring
        kind = self.kind
        src = self.labels(a * u)
        tgt_pos = self.label_index(b * u)
        by_src = xi.by_source_word()
        data = {}
        for j, lab in enumerate(src):
            arrangements = set(permutations(lab)) if kind == "Div" else (tuple(lab),)
            acc = {}
            for word in arrangements:
                vpart = tuple(v // u for v in word)
                upart = tuple(v % u for v in word)
                for tgt_v, c in by_src.get(vpart, ()):
                    c = R.coerce(c)
                    tgt_word = tuple(tgt_v[i] * u + upart[i] for i in range(len(word)))
                    if kind == "Sym":
                        lab2 = tuple(sorted(tgt_word))
                    elif kind == "TensorPower":
                        lab2 = tgt_word
                    elif kind == "Wedge":
                        sign, s = _sort_sign(tgt_word)
                        if sign == 0:
                            continue
                        lab2 = tuple(s)
                        if sign < 0:
                            c = R.neg(c)
                    else:  # Div: collect on sorted representatives
                        if tuple(sorted(tgt_word)) != tgt_word:
                            continue
                        lab2 = tgt_word
                    acc[lab2] = R.add(acc.get(lab2, R.zero()), c)
            for lab2, c in acc.items():
                if c != 0:
                    i = tgt_pos.get(lab2)
                    if i is not None:
                        data[(i, j)] = c
        return Matrix(R, len(tgt_pos), len(src), data)


class TwistEvaluator(Evaluator):
    """Frobenius twist I^(r) over F_p: the span of p^r-th powers in S^{p^r}."""

    def __init__(self, expr, ring, r):
        if ring.kind != "Fp":
            raise UnsupportedRing("Frobenius twist needs a prime field")
        self.expr, self.ring, self.r = expr, ring, r
        self.q = ring.p ** r
        self.d = self.q
        self._cache = {}

    def labels(self, m):
        return [(v,) for v in range(m)]

    def var_weight(self, label, m):
        return {label[0]: self.q}

    def subst_label(self, label, vmap, m_src, m_tgt):
        t = vmap.get(label[0])
        if t is None:
            return None
        v2, c = t
        cq = pow(int(c), self.q, self.ring.p)
        if cq == 0:
            return None
        return (v2,), cq

    def apply_map(self, label, f):
        p = self.ring.p
        out = {}
        for w, c in f.column_vector(label[0]).items():
            cq = pow(int(c), self.q, p)
            if cq:
                out[(w,)] = (out.get((w,), 0) + cq) % p
        return {k: v for k, v in out.items() if v}

    def act_entries(self, xi, src_labels, tgt_pos, m_src, m_tgt):
        # restrict the ambient S^{p^r} action to the power basis
        R = self.ring
        by_src = xi.by_source_word()
        data = {}
        for j, (v,) in enumerate(src_labels):
            word = (v,) * self.d
            acc = {}
            for tgt_word, c in by_src.get(word, ()):
                lab2 = tuple(sorted(tgt_word))
                acc[lab2] = R.add(acc.get(lab2, R.zero()), R.coerce(c))
            for lab2, c in acc.items():
                if c == 0:
                    continue
                if len(set(lab2)) != 1:
                    raise InternalError("twist action left the power subspace")
                i = tgt_pos.get((lab2[0],))
                if i is not None:
                    data[(i, j)] = c
        return data


class TensorEvaluator(Evaluator):
    def __init__(self, expr, ring, children):
        self.expr, self.ring, self.children = expr, ring, children
        self.d = sum(c.d for c in children)
        self._cache = {}

    def labels(self, m):
        key = ("labels", m)
        if key not in self._cache:
            out = [()]
            for child in self.children:
                labs = child.labels(m)
                out = [t + (lab,) for t in out for lab in labs]
            self._cache[key] = out
        return self._cache[key]

    def var_weight(self, label, m):
        w = {}
        for child, lab in zip(self.children, label):
            for v, a in child.var_weight(lab, m).items():
                w[v] = w.get(v, 0) + a
        return w

    def subst_label(self, label, vmap, m_src, m_tgt):
        R = self.ring
        out = []
        coeff = R.one()
        for child, lab in zip(self.children, label):
            t = child.subst_label(lab, vmap, m_src, m_tgt)
            if t is None:
                return None
            lab2, c = t
            out.append(lab2)
            coeff = R.mul(coeff, c)
        return tuple(out), coeff

    def apply_map(self, label, f):
        R = self.ring
        acc = {(): R.one()}
        for child, lab in zip(self.children, label):
            img = child.apply_map(lab, f)
            nxt = {}
            for t, c in acc.items():
                for lab2, c2 in img.items():
                    nxt[t + (lab2,)] = R.add(nxt.get(t + (lab2,), R.zero()),
                                             R.mul(c, c2))
            acc = {k: v for k, v in nxt.items() if v != 0}
        return acc

    def act_entries(self, xi, src_labels, tgt_pos, m_src, m_tgt):
        R = self.ring
        degs = [c.d for c in self.children]
        pieces = xi.split(degs)
        data = {}
        cache = {}
        for j, lab in enumerate(src_labels):
            acc = {}
            for gammas, c in pieces:
                c = R.coerce(c)
                parts = [{lab_i: R.one()} for lab_i in lab]
                ok = True
                cur = {(): c}
                for child, lab_i, g in zip(self.children, lab, gammas):
                    key = (id(child), lab_i, g, m_src, m_tgt)
                    if key not in cache:
                        img = child.act_entries(
                            DividedHom.gamma(g), [lab_i], _Capture(), m_src, m_tgt)
                        cache[key] = {i.label: v for (i, _), v in img.items()}
                    img = cache[key]
                    if not img:
                        ok = False
                        break
                    nxt = {}
                    for t, cc in cur.items():
                        for lab2, c2 in img.items():
                            nxt[t + (lab2,)] = R.add(nxt.get(t + (lab2,), R.zero()),
                                                     R.mul(cc, c2))
                    cur = nxt
                if not ok:
                    continue
                for t, cc in cur.items():
                    acc[t] = R.add(acc.get(t, R.zero()), cc)
            for lab2, c in acc.items():
                if c != 0:
                    i = tgt_pos.get(lab2)
                    if i is not None:
                        data[(i, j)] = c
        return data


class _CapturedKey:
    __slots__ = ("label",)

    def __init__(self, label):
        self.label = label

    def __hash__(self):
        return hash(self.label)

    def __eq__(self, other):
        return isinstance(other, _CapturedKey) and self.label == other.label


class _Capture(dict):
    """Stand-in for a position index that accepts and remembers any label."""

    def get(self, key):
        return _CapturedKey(key)


class ComposeEvaluator(Evaluator):
    """F o G: F's labels over the alphabet of G-label indices."""

    def __init__(self, expr, ring, F, G):
        self.expr, self.ring, self.F, self.G = expr, ring, F, G
        self.d = F.d * G.d
        self._cache = {}

    def labels(self, m):
        return self.F.labels(self.G.dim(m))

    def var_weight(self, label, m):
        glabs = self.G.labels(m)
        w = {}
        for gi, a in self.F.var_weight(label, self.G.dim(m)).items():
            for v, b in self.G.var_weight(glabs[gi], m).items():
                w[v] = w.get(v, 0) + a * b
        return w

    def subst_label(self, label, vmap, m_src, m_tgt):
        gsrc = self.G.labels(m_src)
        gpos = self.G.label_index(m_tgt)
        key = ("gvmap", tuple(sorted(vmap.items())), m_src, m_tgt)
        if key not in self._cache:
            gmap = {}
            for gi, glab in enumerate(gsrc):
                t = self.G.subst_label(glab, vmap, m_src, m_tgt)
                if t is not None:
                    lab2, c = t
                    gmap[gi] = (gpos[lab2], c)
            self._cache[key] = gmap
        return self.F.subst_label(label, self._cache[key],
                                  self.G.dim(m_src), self.G.dim(m_tgt))

    def apply_map(self, label, f):
        gmat = self.G.matrix(f)
        return self.F.apply_map(label, gmat)

    def act_entries(self, xi, src_labels, tgt_pos, m_src, m_tgt):
        R = self.ring
        e, c_deg = self.F.d, self.G.d
        # coordinates of xi in Gamma^e(Gamma^c(Hom))
        coords = xi.split([c_deg] * e) if e else []
        # the linear map L = Act_G on the needed gamma-monomials
        theta_words: Dict[tuple, object] = {}
        Lcache: Dict[tuple, list] = {}
        for gammas, coeff in coords:
            # gammas is an e-tuple of sorted pair-multisets
            expansions = []
            for g in gammas:
                if g not in Lcache:
                    mat = self.G.act(DividedHom.gamma(g), m_src, m_tgt)
                    Lcache[g] = [((i, j), v) for (i, j), v in mat.data.items()]
                expansions.append(Lcache[g])
            # push gamma-monomial through L^{(x)e}: orbit of gammas x entries
            for arrangement in set(permutations(gammas)):
                stack = [((), R.coerce(coeff))]
                for g in arrangement:
                    nxt = []
                    for w, cc in stack:
                        for (i, j), v in Lcache[g]:
                            nxt.append((w + ((i, j),), R.mul(cc, v)))
                    stack = nxt
                for w, cc in stack:
                    theta_words[w] = R.add(theta_words.get(w, R.zero()), cc)
        theta = DividedHom({w: c for w, c in theta_words.items() if c != 0}, e)
        return self.F.act_entries(theta, src_labels, tgt_pos,
                                  self.G.dim(m_src), self.G.dim(m_tgt))


class ParamEvaluator(Evaluator):
    """F(k^r (x) -): a frozen parameter of rank r, variables (a, u) -> a*m + u."""

    def __init__(self, expr, ring, child, r):
        self.expr, self.ring, self.child, self.r = expr, ring, child, r
        self.d = child.d
        self._cache = {}

    def labels(self, m):
        return self.child.labels(self.r * m)

    def var_weight(self, label, m):
        w = {}
        for v, a in self.child.var_weight(label, self.r * m).items():
            u = v % m if m else 0
            w[u] = w.get(u, 0) + a
        return w

    def subst_label(self, label, vmap, m_src, m_tgt):
        lifted = {}
        for a in range(self.r):
            for u, t in vmap.items():
                if t is not None:
                    u2, c = t
                    lifted[a * m_src + u] = (a * m_tgt + u2, c)
        return self.child.subst_label(label, lifted, self.r * m_src, self.r * m_tgt)

    def apply_map(self, label, f):
        key = ("pf", id(f))
        if key not in self._cache:
            self._cache[key] = Matrix.identity(self.ring, self.r).kron(f)
        return self.child.apply_map(label, self._cache[key])

    def act_entries(self, xi, src_labels, tgt_pos, m_src, m_tgt):
        lifted = xi.insert_identity_left(self.r, m_src, m_tgt)
        return self.child.act_entries(lifted, src_labels, tgt_pos,
                                      self.r * m_src, self.r * m_tgt)


class KernelEvaluator(Evaluator):
    """Functor presented as the kernel of natural maps between monomial
    functors (Schur and Weyl functors via their exterior/symmetric power
    presentations).  Bases are Hermite lattice bases per weight block.
    """

    def __init__(self, expr, ring, ambient: TensorEvaluator, constraints):
        # constraints: list of (target_evaluator, entry_fn) where entry_fn
        # maps (ambient_label, m) -> {target_label: coeff}
        self.expr, self.ring = expr, ring
        self.ambient = ambient
        self.constraints = constraints
        self.d = ambient.d
        self._cache = {}

    # -- block machinery ---------------------------------------------------
    def _blocks(self, m):
        key = ("blocks", m)
        if key not in self._cache:
            groups: Dict[tuple, list] = {}
            for lab in self.ambient.labels(m):
                wkey = tuple(sorted(self.ambient.var_weight(lab, m).items()))
                groups.setdefault(wkey, []).append(lab)
            self._cache[key] = groups
        return self._cache[key]

    def _block_basis(self, m, wkey):
        """Hermite kernel basis of one weight block, via a canonical-pattern
        cache (blocks differing only by variable names share the result)."""
        key = ("bb", m, wkey)
        if key not in self._cache:
            vars_sorted = [v for v, _ in wkey]
            pattern = tuple(a for _, a in wkey)
            canon_m = len(vars_sorted)
            canon_key = ("canon", pattern)
            if canon_key not in self._cache:
                rename = {v: i for i, v in enumerate(vars_sorted)}
                canon_wkey = tuple((rename[v], a) for v, a in wkey)
                self._cache[canon_key] = self._compute_block(canon_m, canon_wkey)
            canon = self._cache[canon_key]
            self._cache[key] = canon
        return self._cache[key]

    def _compute_block(self, m, wkey):
        """Kernel basis over the canonical block of rank m with weight wkey."""
        amb_labels = [lab for lab in self.ambient.labels(m)
                      if tuple(sorted(self.ambient.var_weight(lab, m).items())) == wkey]
        rows = []
        for tgt_ev, entry_fn in self.constraints:
            tgt_labels = {}
            entries = {}
            for j, lab in enumerate(amb_labels):
                for lab2, c in entry_fn(lab, m).items():
                    if lab2 not in tgt_labels:
                        tgt_labels[lab2] = len(tgt_labels)
                    entries[(tgt_labels[lab2], j)] = c
            rows.append(Matrix(self.ring, len(tgt_labels), len(amb_labels), entries))
        if rows:
            big = rows[0]
            for mrow in rows[1:]:
                big = big.vstack(mrow)
        else:
            big = Matrix(self.ring, 0, len(amb_labels))
        K = kernel_basis(big)
        return amb_labels, K  # K: len(amb_labels) x k

    def labels(self, m):
        key = ("labels", m)
        if key not in self._cache:
            out = []
            for wkey in sorted(self._blocks(m)):
                _, K = self._block_basis(m, wkey)
                out.extend((wkey, i) for i in range(K.cols))
            self._cache[key] = out
        return self._cache[key]

    def var_weight(self, label, m):
        return dict(label[0])

    def _block_info(self, m, wkey):
        """(ambient labels of the block at rank m, kernel matrix, positions)."""
        canon_labels, K = self._block_basis(m, wkey)
        vars_sorted = [v for v, _ in wkey]
        rename = {i: v for i, v in enumerate(vars_sorted)}
        vmap = {i: (v, self.ring.one()) for i, v in rename.items()}
        labels = []
        for lab in canon_labels:
            t = self.ambient.subst_label(lab, vmap, len(vars_sorted), m)
            labels.append(t[0])
        return labels, K

    def subst_entries(self, src_labels, vmap, tgt_pos, m_src, m_tgt):
        R = self.ring
        data = {}
        by_block: Dict[tuple, list] = {}
        for j, (wkey, i) in enumerate(src_labels):
            by_block.setdefault(wkey, []).append((j, i))
        tgt_labels_all = None
        for wkey, items in by_block.items():
            amb_src, K_src = self._block_info(m_src, wkey)
            # push the block weight through vmap
            tw = {}
            dead = False
            for v, a in wkey:
                t = vmap.get(v)
                if t is None:
                    dead = True
                    break
                tw[t[0]] = tw.get(t[0], 0) + a
            if dead:
                continue
            twkey = tuple(sorted(tw.items()))
            amb_tgt, K_tgt = self._block_info(m_tgt, twkey)
            tpos = {lab: i for i, lab in enumerate(amb_tgt)}
            sub = {}
            for jj, lab in enumerate(amb_src):
                t = self.ambient.subst_label(lab, vmap, m_src, m_tgt)
                if t is None:
                    continue
                lab2, c = t
                ii = tpos.get(lab2)
                if ii is not None and c != 0:
                    sub[(ii, jj)] = c
            Sub = Matrix(R, len(amb_tgt), len(amb_src), sub)
            X = solve_matrix(K_tgt, Sub * K_src)
            if X is None:
                raise InternalError("substitution left the kernel lattice")
            for (ii, jj), c in X.data.items():
                for j, i in items:
                    if i == jj:
                        gi = tgt_pos.get((twkey, ii))
                        if gi is not None:
                            data[(gi, j)] = c
        return data

    def _whole_basis(self, m):
        """Kernel basis embedded in the full ambient space at rank m."""
        key = ("whole", m)
        if key not in self._cache:
            amb_pos = self.ambient.label_index(m)
            cols = []
            for (wkey, i) in self.labels(m):
                amb_labels, K = self._block_info(m, wkey)
                col = {}
                for (r, c), v in K.data.items():
                    if c == i:
                        col[amb_pos[amb_labels[r]]] = v
                cols.append(col)
            data = {}
            for j, col in enumerate(cols):
                for r, v in col.items():
                    data[(r, j)] = v
            self._cache[key] = Matrix(self.ring, len(amb_pos), len(cols), data)
        return self._cache[key]

    def matrix(self, f):
        K_src = self._whole_basis(f.cols)
        K_tgt = self._whole_basis(f.rows)
        amb = self.ambient.matrix(f)
        X = solve_matrix(K_tgt, amb * K_src)
        if X is None:
            raise InternalError("functor map left the kernel lattice")
        return X

    def apply_map(self, label, f):
        # single-label path used by outer Compose; go through matrix()
        pos = {lab: i for i, lab in enumerate(self.labels(f.cols))}
        M = self.matrix(f)
        j = pos[label]
        tgt = self.labels(f.rows)
        return {tgt[i]: v for (i, jj), v in M.data.items() if jj == j}

    def act(self, xi, m_src, m_tgt):
        K_src = self._whole_basis(m_src)
        K_tgt = self._whole_basis(m_tgt)
        amb = self.ambient.act(xi, m_src, m_tgt)
        X = solve_matrix(K_tgt, amb * K_src)
        if X is None:
            raise InternalError("divided action left the kernel lattice")
        return X

    def act_entries(self, xi, src_labels, tgt_pos, m_src, m_tgt):
        M = self.act(xi, m_src, m_tgt)
        all_src = {lab: j for j, lab in enumerate(self.labels(m_src))}
        tgt = self.labels(m_tgt)
        data = {}
        for j, lab in enumerate(src_labels):
            jj = all_src[lab]
            for (i, jcol), v in M.data.items():
                if jcol == jj:
                    gi = tgt_pos.get(tgt[i])
                    if gi is not None:
                        data[(gi, j)] = v
        return data


# ===========================================================================
# Structural maps on monomial functors
# ===========================================================================

def sym_box_entry(label, i, k, ring):
    """Component of the Schur presentation on Sym factors:
    S^a (x) S^b -> S^{a+k} (x) S^{b-k} on tensor positions (i, i+1):
    comultiply k letters out of factor i+1 and multiply them into factor i.
    Position-based extraction realizes the binomial coefficients of the
    comultiplication dual to divided-power multiplication.
    Returns {target_label: coeff}.
    """
    from itertools import combinations as _comb
    alpha, beta = label[i], label[i + 1]
    out = {}
    n = len(beta)
    for pos in _comb(range(n), k):
        kappa = tuple(beta[t] for t in pos)
        rest = tuple(beta[t] for t in range(n) if t not in pos)
        new_i = tuple(sorted(alpha + kappa))
        lab2 = label[:i] + (new_i, rest) + label[i + 2:]
        out[lab2] = ring.add(out.get(lab2, ring.zero()), ring.one())
    return out


def wedge_box_entry(label, i, k, ring):
    """Same shape on Wedge factors, with Koszul signs."""
    alpha, beta = label[i], label[i + 1]
    out = {}
    n = len(beta)
    from itertools import combinations as _comb
    for pos in _comb(range(n), k):
        kappa = tuple(beta[t] for t in pos)
        rest = tuple(beta[t] for t in range(n) if t not in pos)
        # sign of extracting kappa to the front of beta
        perm = list(pos) + [t for t in range(n) if t not in pos]
        sign = _perm_sign_list(perm)
        merged = alpha + kappa
        s2, sorted_m = _sort_sign(merged)
        if s2 == 0:
            continue
        sign *= s2
        lab2 = label[:i] + (tuple(sorted_m), rest) + label[i + 2:]
        c = ring.one() if sign > 0 else ring.neg(ring.one())
        out[lab2] = ring.add(out.get(lab2, ring.zero()), c)
    return out


def _perm_sign_list(perm):
    sign = 1
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                sign = -sign
    return sign


def _distinct_submultisets(mono: tuple, k: int):
    """Distinct size-k submultisets of a sorted tuple, sorted output."""
    from collections import Counter as _C
    items = sorted(_C(mono).items())
    out = []

    def gen(idx, remaining, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        if idx == len(items):
            return
        v, a = items[idx]
        for take in range(min(a, remaining), -1, -1):
            gen(idx + 1, remaining - take, acc + [v] * take)
    gen(0, k, [])
    return out


# ===========================================================================
# Compilation
# ===========================================================================

_COMPILED: Dict[tuple, Evaluator] = {}


def compile_functor(F: FunctorExpr, ring: Ring) -> Evaluator:
    F = canonicalize(F)
    key = (F, ring)
    if key in _COMPILED:
        return _COMPILED[key]
    ev = _compile(F, ring)
    _COMPILED[key] = ev
    return ev


def _compile(F: FunctorExpr, ring: Ring) -> Evaluator:
    t = F.tag
    if t == "Const":
        return ConstEvaluator(F, ring)
    if t in ("Sym", "Wedge", "Div", "TensorPower"):
        return MonoEvaluator(F, ring, t, F.args[0])
    if t == "Twist":
        return TwistEvaluator(F, ring, F.args[0])
    if t == "Tensor":
        return TensorEvaluator(F, ring, [compile_functor(G, ring) for G in F.args])
    if t == "Compose":
        return ComposeEvaluator(F, ring, compile_functor(F.args[0], ring),
                                compile_functor(F.args[1], ring))
    if t == "Param":
        return ParamEvaluator(F, ring, compile_functor(F.args[0], ring), F.args[1])
    if t == "Schur":
        lam = F.args[0]
        ambient = compile_functor(Tensor(*[Sym(a) for a in lam.parts]), ring)
        constraints = _box_constraints(lam, ring, sym_box_entry, ambient)
        return KernelEvaluator(F, ring, ambient, constraints)
    if t == "Weyl":
        lam = F.args[0].conjugate()
        ambient = compile_functor(Tensor(*[Wedge(a) for a in lam.parts]), ring)
        constraints = _box_constraints(lam, ring, wedge_box_entry, ambient)
        return KernelEvaluator(F, ring, ambient, constraints)
    raise ValueError(t)


def _box_constraints(lam: Partition, ring, entry_builder, ambient):
    constraints = []
    parts = lam.parts
    for i in range(len(parts) - 1):
        for k in range(1, parts[i + 1] + 1):
            def entry_fn(label, m, i=i, k=k):
                return entry_builder(label, i, k, ring)
            constraints.append((None, entry_fn))
    return constraints


# ===========================================================================
# Public operations
# ===========================================================================

def dimension(F: FunctorExpr, m: int, ring: Ring) -> int:
    return compile_functor(F, ring).dim(m)


def eval_map(F: FunctorExpr, f: Matrix) -> Matrix:
    """Matrix of F(f) on the canonical bases."""
    return compile_functor(F, f.ring).matrix(f)


def dual_eval(F: FunctorExpr, f: Matrix) -> Matrix:
    """eval_map(Dual(F), f) = transpose(eval_map(F, transpose(f)))."""
    return eval_map(F, f.transpose()).transpose()


def twist_eval(r: int, f: Matrix) -> Matrix:
    if f.ring.kind != "Fp":
        raise UnsupportedRing("Frobenius twist needs a prime field")
    return eval_map(Twist(r), f)


def divided_action(F: FunctorExpr, xi: DividedHom, m_src: int, m_tgt: int,
                   ring: Ring) -> Matrix:
    """The polarized action of an invariant tensor xi on F."""
    return compile_functor(F, ring).act(xi, m_src, m_tgt)


def schur_generator(lam: Partition, m: int, ring: Ring) -> Matrix:
    """d_lambda: Wedge^{lam'} (k^m) -> S^{lam}(k^m).

    Inclusion of the exterior powers into the tensor power, the place
    permutation sigma_lambda, then the projection onto symmetric powers.
    """
    from .combinatorics import perm_inverse, sigma_lambda
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    lamc = lam.conjugate()
    src_ev = compile_functor(Tensor(*[Wedge(a) for a in lamc.parts]), ring)
    tgt_ev = compile_functor(Tensor(*[Sym(a) for a in lam.parts]), ring)
    # position k of the column-grouped word carries the box whose standard
    # entry is sigma_lambda(k); it must land at that position of the
    # row-grouped word, i.e. the word is permuted by the inverse.
    sigma = perm_inverse(sigma_lambda(lam))
    d = lam.weight
    src = src_ev.labels(m)
    tgt_pos = tgt_ev.label_index(m)
    data = {}
    R = ring
    tgt_splits = []
    off = 0
    for a in lam.parts:
        tgt_splits.append((off, off + a))
        off += a
    for j, lab in enumerate(src):
        # expand each wedge factor into signed words, concatenate
        words = [((), 1)]
        for part in lab:
            nxt = []
            for w, s in words:
                for perm in permutations(part):
                    sgn, _ = _sort_sign(perm)
                    # perm of distinct entries: sign relative to sorted part
                    nxt.append((w + tuple(perm), s * sgn))
            words = nxt
        for w, s in words:
            permuted = tuple(w[sigma[i] - 1] for i in range(d))
            lab2 = tuple(tuple(sorted(permuted[a:b])) for a, b in tgt_splits)
            i = tgt_pos.get(lab2)
            if i is not None:
                c = R.coerce(s)
                data[(i, j)] = R.add(data.get((i, j), R.zero()), c)
    data = {k: v for k, v in data.items() if v != 0}
    return Matrix(ring, len(tgt_pos), len(src), data)


def abw_presentation(lam: Partition, m: int, ring: Ring):
    """[]_lambda: direct sum over mu of Wedge^mu (k^m) -> Wedge^lambda (k^m).

    mu runs over (lam_1, ..., lam_i + k, lam_{i+1} - k, ...); each component
    comultiplies k letters off the (i+1)st factor and multiplies them into
    the i-th.  Returns (matrix, list of mu tuples).
    """
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    parts = lam.parts
    tgt_ev = compile_functor(Tensor(*[Wedge(a) for a in parts]), ring)
    tgt_pos = tgt_ev.label_index(m)
    blocks = []
    mus = []
    for i in range(len(parts) - 1):
        for k in range(1, parts[i + 1] + 1):
            mu = parts[:i] + (parts[i] + k, parts[i + 1] - k) + parts[i + 2:]
            mus.append(mu)
            src_ev = compile_functor(Tensor(*[Wedge(a) for a in mu]), ring)
            src = src_ev.labels(m)
            data = {}
            for j, lab in enumerate(src):
                # dual move: comultiply k letters off factor i (which has
                # lam_i + k letters) and multiply into factor i+1
                alpha, beta = lab[i], lab[i + 1]
                n = len(alpha)
                from itertools import combinations as _comb
                for pos in _comb(range(n), k):
                    kappa = tuple(alpha[t] for t in pos)
                    rest = tuple(alpha[t] for t in range(n) if t not in pos)
                    perm = [t for t in range(n) if t not in pos] + list(pos)
                    sign = _perm_sign_list(perm)
                    merged = kappa + beta
                    s2, sorted_m = _sort_sign(merged)
                    if s2 == 0:
                        continue
                    sign *= s2
                    lab2 = lab[:i] + (rest, tuple(sorted_m)) + lab[i + 2:]
                    ii = tgt_pos.get(lab2)
                    if ii is not None:
                        c = ring.coerce(sign)
                        data[(ii, j)] = ring.add(data.get((ii, j), ring.zero()), c)
            blocks.append(Matrix(ring, len(tgt_pos), len(src),
                                 {k2: v for k2, v in data.items() if v != 0}))
    if blocks:
        big = blocks[0]
        for b in blocks[1:]:
            big = big.hstack(b)
    else:
        big = Matrix(ring, len(tgt_pos), 0)
    return big, mus


def koszul_complex(d: int, m: int, ring: Ring):
    """The Koszul complex Wedge^d -> Wedge^{d-1} (x) S^1 -> ... -> S^d at k^m,
    as a homological chain complex with Wedge^q (x) S^{d-q} in degree q."""
    from .exact_linalg import ChainComplexData
    ranks = {}
    evs = {}
    for q in range(d + 1):
        ev = compile_functor(Tensor(Wedge(q), Sym(d - q)), ring)
        evs[q] = ev
        ranks[q] = ev.dim(m)
    diffs = {}
    for q in range(1, d + 1):
        src = evs[q].labels(m)
        tgt_pos = evs[q - 1].label_index(m)
        data = {}
        for j, (alpha, beta) in enumerate(src):
            n = len(alpha)
            for t in range(n):
                v = alpha[t]
                rest = alpha[:t] + alpha[t + 1:]
                sign = (-1) ** (n - 1 - t)   # move v past the letters after it
                lab2 = (rest, tuple(sorted(beta + (v,))))
                i = tgt_pos.get(lab2)
                if i is not None:
                    c = ring.coerce(sign)
                    data[(i, j)] = ring.add(data.get((i, j), ring.zero()), c)
        diffs[q] = Matrix(ring, ranks[q - 1], ranks[q],
                          {k2: v for k2, v in data.items() if v != 0})
    return ChainComplexData(ring, ranks, diffs)
