"""Exact ground rings: the integers, the rationals and prime fields.

Scalars are plain ``int`` (for Z and F_p, the latter kept reduced to
``0..p-1``) or ``fractions.Fraction`` (for Q), so all arithmetic is exact
and arbitrary precision.
"""

from __future__ import annotations

from fractions import Fraction


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Ring:
    """One of Z, Q or F_p.  Immutable and hashable."""

    __slots__ = ("kind", "p")

    def __init__(self, kind: str, p: int | None = None):
        if kind not in ("Z", "Q", "Fp"):
            raise ValueError(f"unknown ring kind {kind!r}")
        if kind == "Fp":
            if p is None or not is_prime(p):
                raise ValueError(f"{p} is not prime")
        else:
            p = None
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "p", p)

    def __setattr__(self, *a):
        raise AttributeError("Ring is immutable")

    # -- predicates ---------------------------------------------------
    @property
    def is_field(self) -> bool:
        return self.kind != "Z"

    @property
    def char(self) -> int:
        return self.p if self.kind == "Fp" else 0

    # -- scalar operations --------------------------------------------
    def coerce(self, x):
        if self.kind == "Fp":
            return int(x) % self.p
        if self.kind == "Q":
            return x if isinstance(x, Fraction) else Fraction(x)
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return x.numerator
        return int(x)

    def zero(self):
        return Fraction(0) if self.kind == "Q" else 0

    def one(self):
        return Fraction(1) if self.kind == "Q" else 1

    def add(self, a, b):
        c = a + b
        return c % self.p if self.kind == "Fp" else c

    def sub(self, a, b):
        c = a - b
        return c % self.p if self.kind == "Fp" else c

    def mul(self, a, b):
        c = a * b
        return c % self.p if self.kind == "Fp" else c

    def neg(self, a):
        return (-a) % self.p if self.kind == "Fp" else -a

    def is_unit(self, a) -> bool:
        if self.kind == "Z":
            return a in (1, -1)
        return a != 0

    def inv(self, a):
        if self.kind == "Fp":
            return pow(a % self.p, self.p - 2, self.p)
        if self.kind == "Q":
            return 1 / a
        if a in (1, -1):
            return a
        raise ZeroDivisionError(f"{a} is not a unit in Z")

    def divides(self, a, b) -> bool:
        """Whether a | b, i.e. b is a multiple of a."""
        if self.kind != "Z":
            return a != 0 or b == 0
        if a == 0:
            return b == 0
        return b % a == 0

    def exact_div(self, a, b):
        """a / b, assumed exact."""
        if self.kind == "Fp":
            return a * self.inv(b) % self.p
        if self.kind == "Q":
            return a / b
        q, r = divmod(a, b)
        if r:
            raise ValueError(f"{b} does not divide {a}")
        return q

    # -- misc ----------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, Ring) and (self.kind, self.p) == (other.kind, other.p)

    def __hash__(self):
        return hash((self.kind, self.p))

    def __repr__(self):
        return "F%d" % self.p if self.kind == "Fp" else self.kind

    @staticmethod
    def parse(s: str) -> "Ring":
        """Parse a ring name: "Z", "Q", "F2", "F3", ..."""
        s = s.strip()
        if s == "Z":
            return ZZ
        if s == "Q":
            return QQ
        if s.startswith("F"):
            return Ring("Fp", int(s[1:]))
        raise ValueError(f"cannot parse ring {s!r}")


ZZ = Ring("Z")
QQ = Ring("Q")


def GF(p: int) -> Ring:
    return Ring("Fp", p)
