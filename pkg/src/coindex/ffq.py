"""Finite fields F_p and F_{p^2} carrying an image of zeta, and entrywise
congruence reduction of Eisenstein matrices.

A field element is always a coefficient pair (c0, c1) on the basis
{1, x}; degree-1 fields keep c1 = 0, so one set of arithmetic formulas
(reduction by x^2 + x + 1) serves both degrees.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .eiszeta import MatZ2


class NotPrimeError(ValueError):
    """The requested modulus is not prime (prime powers are rejected)."""


class FqElt(NamedTuple):
    c0: int
    c1: int

    def to_json_obj(self) -> list[int]:
        return [self.c0] if self.c1 == 0 else [self.c0, self.c1]


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldDesc:
    """F_p (degree 1) or F_p[x]/(x^2 + x + 1) (degree 2), with the image of zeta."""

    p: int
    degree: int
    zeta: FqElt

    @property
    def size(self) -> int:
        return self.p ** self.degree

    @property
    def ramified(self) -> bool:
        """True for p = 3, where zeta maps to 1 rather than a primitive cube root."""
        return self.p == 3

    def zero(self) -> FqElt:
        return FqElt(0, 0)

    def one(self) -> FqElt:
        return FqElt(1, 0)

    def from_int(self, n: int) -> FqElt:
        return FqElt(n % self.p, 0)

    def add(self, x: FqElt, y: FqElt) -> FqElt:
        return FqElt((x.c0 + y.c0) % self.p, (x.c1 + y.c1) % self.p)

    def sub(self, x: FqElt, y: FqElt) -> FqElt:
        return FqElt((x.c0 - y.c0) % self.p, (x.c1 - y.c1) % self.p)

    def neg(self, x: FqElt) -> FqElt:
        return FqElt(-x.c0 % self.p, -x.c1 % self.p)

    def mul(self, x: FqElt, y: FqElt) -> FqElt:
        if self.degree == 1:
            return FqElt(x.c0 * y.c0 % self.p, 0)
        # (x0 + x1 t)(y0 + y1 t) mod t^2 + t + 1
        hi = x.c1 * y.c1
        return FqElt((x.c0 * y.c0 - hi) % self.p,
                     (x.c0 * y.c1 + x.c1 * y.c0 - hi) % self.p)

    def pow(self, x: FqElt, n: int) -> FqElt:
        if n < 0:
            return self.pow(self.inv(x), -n)
        result = self.one()
        base = x
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def inv(self, x: FqElt) -> FqElt:
        if x == (0, 0):
            raise ZeroDivisionError("inverse of zero field element")
        return self.pow(x, self.size - 2)

    def elements(self) -> Iterator[FqElt]:
        for c0 in range(self.p):
            if self.degree == 1:
                yield FqElt(c0, 0)
            else:
                for c1 in range(self.p):
                    yield FqElt(c0, c1)

    def format(self, x: FqElt) -> str:
        if self.degree == 1 or x.c1 == 0:
            return str(x.c0)
        return f"{x.c0}+{x.c1}x"


def make_reduction(p: int) -> FieldDesc:
    """Field of definition for the mod-p image of GL2(Z[zeta]).

    p = 3 (ramified) maps zeta to 1; p = 1 mod 3 picks the smallest root
    of r^2 + r + 1 in F_p; p = 2 mod 3 (including 2) uses
    F_p[x]/(x^2 + x + 1) with zeta = x.
    """
    if not is_prime(p):
        raise NotPrimeError(f"{p} is not prime")
    if p == 3:
        return FieldDesc(p=3, degree=1, zeta=FqElt(1, 0))
    if p % 3 == 1:
        for r in range(2, p):
            if (r * r + r + 1) % p == 0:
                return FieldDesc(p=p, degree=1, zeta=FqElt(r, 0))
        raise AssertionError(f"no cube root of unity mod {p}")  # unreachable
    return FieldDesc(p=p, degree=2, zeta=FqElt(0, 1))


@dataclass(frozen=True)
class MatFq2:
    """A 2x2 matrix over F_q, with its field descriptor."""

    entries: tuple[tuple[FqElt, FqElt], tuple[FqElt, FqElt]]
    field: FieldDesc

    @classmethod
    def of(cls, f: FieldDesc, e00: FqElt, e01: FqElt, e10: FqElt, e11: FqElt) -> "MatFq2":
        return cls(((e00, e01), (e10, e11)), f)

    @classmethod
    def identity(cls, f: FieldDesc) -> "MatFq2":
        return cls.of(f, f.one(), f.zero(), f.zero(), f.one())

    def __mul__(self, other: "MatFq2") -> "MatFq2":
        f = self.field
        if other.field != f:
            raise ValueError("matrices over different fields")
        (a, b), (c, d) = self.entries
        (e, g), (h, k) = other.entries
        mul, add = f.mul, f.add
        return MatFq2.of(
            f,
            add(mul(a, e), mul(b, h)), add(mul(a, g), mul(b, k)),
            add(mul(c, e), mul(d, h)), add(mul(c, g), mul(d, k)),
        )

    def det(self) -> FqElt:
        f = self.field
        (a, b), (c, d) = self.entries
        return f.sub(f.mul(a, d), f.mul(b, c))

    def is_invertible(self) -> bool:
        return self.det() != (0, 0)

    def inverse(self) -> "MatFq2":
        f = self.field
        dinv = f.inv(self.det())
        (a, b), (c, d) = self.entries
        return MatFq2.of(f,
                         f.mul(d, dinv), f.mul(f.neg(b), dinv),
                         f.mul(f.neg(c), dinv), f.mul(a, dinv))

    def __pow__(self, n: int) -> "MatFq2":
        if n < 0:
            return self.inverse() ** (-n)
        result = MatFq2.identity(self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def is_identity(self) -> bool:
        return self == MatFq2.identity(self.field)

    def encode(self) -> int:
        """Canonical integer key: base-p digits of all residues.

        Degree-1 matrices pack 4 digits, degree-2 pack 8; distinct
        matrices over the same field get distinct keys.
        """
        p = self.field.p
        key = 0
        if self.field.degree == 1:
            for row in self.entries:
                for e in row:
                    key = key * p + e.c0
        else:
            for row in self.entries:
                for e in row:
                    key = key * p + e.c0
                    key = key * p + e.c1
        return key

    @classmethod
    def decode(cls, f: FieldDesc, key: int) -> "MatFq2":
        p = f.p
        n_digits = 4 if f.degree == 1 else 8
        digits = []
        for _ in range(n_digits):
            digits.append(key % p)
            key //= p
        digits.reverse()
        if f.degree == 1:
            es = [FqElt(d, 0) for d in digits]
        else:
            es = [FqElt(digits[i], digits[i + 1]) for i in range(0, 8, 2)]
        return cls.of(f, es[0], es[1], es[2], es[3])

    def to_json_obj(self) -> list:
        return [[e.to_json_obj() for e in row] for row in self.entries]

    def __str__(self) -> str:
        f = self.field
        return "[[%s, %s], [%s, %s]]" % tuple(f.format(e) for row in self.entries for e in row)


def reduce_matrix(m: MatZ2, f: FieldDesc) -> MatFq2:
    """Entrywise ring homomorphism a + b*zeta -> (a mod p) + (b mod p)*zeta_image."""
    out = []
    for row in m.rows:
        for e in row:
            img = f.add(f.from_int(e.a), f.mul(f.from_int(e.b), f.zeta))
            out.append(img)
    return MatFq2.of(f, out[0], out[1], out[2], out[3])
