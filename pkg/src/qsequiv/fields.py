"""Exact coefficient fields: the rationals and prime fields F_p.

Scalars are plain values supporting Python arithmetic operators: ``gmpy2.mpq``
for the rationals and :class:`ModP` for prime fields.  All code downstream is
written against that operator interface, so linear algebra, tensors and the
Groebner engine are field-agnostic.
"""

from __future__ import annotations

from gmpy2 import mpq

__all__ = ["FieldError", "ModP", "Field", "Rationals", "PrimeField", "QQ", "parse_field"]


class FieldError(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic Miller-Rabin for n < 3.3e24
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if a >= n:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class ModP:
    """Residue in F_p with canonical representative in [0, p)."""

    __slots__ = ("p", "v")

    def __init__(self, v: int, p: int):
        self.p = p
        self.v = v % p

    def __add__(self, other):
        return ModP(self.v + other.v, self.p)

    def __sub__(self, other):
        return ModP(self.v - other.v, self.p)

    def __mul__(self, other):
        return ModP(self.v * other.v, self.p)

    def __truediv__(self, other):
        if other.v == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return ModP(self.v * pow(other.v, -1, self.p), self.p)

    def __neg__(self):
        return ModP(-self.v, self.p)

    def __bool__(self):
        return self.v != 0

    def __eq__(self, other):
        if isinstance(other, ModP):
            return self.v == other.v and self.p == other.p
        if isinstance(other, int):
            return self.v == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __repr__(self):
        return f"{self.v} (mod {self.p})"


class Field:
    """Common interface: element construction and canonical serialization."""

    kind: str

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def of(self, n, d=1):
        """Field element from integers n/d."""
        raise NotImplementedError

    def coeff_str(self, x) -> tuple[str, str]:
        """(numerator, denominator) decimal strings for the JSON schema."""
        raise NotImplementedError

    def parse_coeff(self, num: str, den: str = "1"):
        return self.of(int(num), int(den))

    def spec(self) -> str:
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Field) and self.spec() == other.spec()

    def __hash__(self):
        return hash(self.spec())

    def __repr__(self):
        return self.spec()


class Rationals(Field):
    kind = "Q"

    def zero(self):
        return mpq(0)

    def one(self):
        return mpq(1)

    def of(self, n, d=1):
        return mpq(n, d)

    def coeff_str(self, x):
        return str(x.numerator), str(x.denominator)

    def spec(self):
        return "Q"


class PrimeField(Field):
    kind = "Fp"

    def __init__(self, p: int):
        if not _is_prime(p):
            raise FieldError(f"{p} is not prime")
        self.p = p

    def zero(self):
        return ModP(0, self.p)

    def one(self):
        return ModP(1, self.p)

    def of(self, n, d=1):
        x = ModP(int(n), self.p)
        if d != 1:
            x = x / ModP(int(d), self.p)
        return x

    def coeff_str(self, x):
        return str(x.v), "1"

    def spec(self):
        return f"Fp:{self.p}"


QQ = Rationals()


def parse_field(s: str) -> Field:
    """Parse "Q" or "Fp:<p>"."""
    if s == "Q":
        return QQ
    if s.startswith("Fp:"):
        return PrimeField(int(s[3:]))
    raise FieldError(f"unknown field spec {s!r}")


def to_prime_field(x, fp: PrimeField) -> ModP:
    """Reduce a rational mod p.  Raises FieldError if p divides the denominator."""
    num, den = int(x.numerator), int(x.denominator)
    if den % fp.p == 0:
        raise FieldError(f"denominator divisible by {fp.p}")
    return fp.of(num, den)
