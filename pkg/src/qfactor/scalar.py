"""Coefficient arithmetic.

Four backends share one interface: exact rationals, a quadratic extension
Q(sqrt(D)), a prime field F_p, and approximate reals with a relative
tolerance.  Every value participating in one computation carries the same
FieldSpec; mixing contexts raises FieldMismatch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BadPrime, DivisionByZero, FieldMismatch


def _sqf(n: int) -> bool:
    if n == 0:
        return False
    n = abs(n)
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class QuadExt:
    """a + b*sqrt(disc) with rational a, b and a fixed square-free disc."""

    a: Fraction
    b: Fraction
    disc: int

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if other.disc != self.disc:
                raise FieldMismatch(f"sqrt({self.disc}) vs sqrt({other.disc})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt(Fraction(other), Fraction(0), self.disc)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExt(self.a + o.a, self.b + o.b, self.disc)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.disc)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExt(self.a - o.a, self.b - o.b, self.disc)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QuadExt(
            self.a * o.a + self.disc * self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.disc,
        )

    __rmul__ = __mul__

    def inv(self) -> "QuadExt":
        n = self.norm()
        if n == 0:
            raise DivisionByZero("quadratic extension element has norm 0")
        return QuadExt(self.a / n, -self.b / n, self.disc)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        out = QuadExt(Fraction(1), Fraction(0), self.disc)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, QuadExt):
            return (self.a, self.b, self.disc) == (other.a, other.b, other.disc)
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.disc))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.a, -self.b, self.disc)

    def norm(self) -> Fraction:
        return self.a * self.a - self.disc * self.b * self.b

    def __repr__(self):
        return f"({self.a}+{self.b}*sqrt{self.disc})"


@dataclass(frozen=True)
class Fp:
    """Residue class modulo a prime."""

    residue: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "residue", self.residue % self.p)

    def _coerce(self, other):
        if isinstance(other, Fp):
            if other.p != self.p:
                raise FieldMismatch(f"mod {self.p} vs mod {other.p}")
            return other
        if isinstance(other, int):
            return Fp(other, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.residue + o.residue, self.p)

    __radd__ = __add__

    def __neg__(self):
        return Fp(-self.residue, self.p)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.residue - o.residue, self.p)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.residue * o.residue, self.p)

    __rmul__ = __mul__

    def inv(self) -> "Fp":
        if self.residue == 0:
            raise DivisionByZero(f"0 mod {self.p}")
        return Fp(pow(self.residue, self.p - 2, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inv()

    def __rtruediv__(self, other):
        return self.inv() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        return Fp(pow(self.residue, e, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, int):
            return self.residue == other % self.p
        if isinstance(other, Fp):
            return self.p == other.p and self.residue == other.residue
        return NotImplemented

    def __hash__(self):
        return hash((self.residue, self.p))

    def __bool__(self):
        return self.residue != 0

    def __repr__(self):
        return f"{self.residue}(mod {self.p})"


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    # deterministic Miller-Rabin for n < 3.3e24
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
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


def sqrt_mod(a: int, p: int) -> int | None:
    """A square root of a modulo prime p, or None if a is a non-residue."""
    a %= p
    if a == 0:
        return 0
    if p == 2:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # Tonelli-Shanks
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, tt = 0, t
        while tt != 1:
            tt = tt * tt % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


@dataclass(frozen=True)
class FieldSpec:
    """Which coefficient field a computation runs over.

    tag is one of "rational", "quadratic" (with disc), "prime" (with p),
    "approx" (with eps, relative).
    """

    tag: str
    disc: int | None = None
    p: int | None = None
    eps: float = 1e-8

    @classmethod
    def rational(cls):
        return cls("rational")

    @classmethod
    def quadratic(cls, disc: int):
        if not _sqf(disc) or disc == 1:
            raise ValueError(f"discriminant must be square-free and != 1: {disc}")
        return cls("quadratic", disc=disc)

    @classmethod
    def prime(cls, p: int):
        if not is_prime(p):
            raise BadPrime(f"{p} is not prime")
        return cls("prime", p=p)

    @classmethod
    def approx(cls, eps: float = 1e-8):
        if eps <= 0:
            raise ValueError("eps must be positive")
        return cls("approx", eps=eps)

    # -- element constructors -------------------------------------------------

    def coerce(self, value):
        if self.tag == "rational":
            if isinstance(value, Fraction):
                return value
            if isinstance(value, int):
                return Fraction(value)
            raise FieldMismatch(f"cannot coerce {value!r} into Q")
        if self.tag == "quadratic":
            if isinstance(value, QuadExt):
                if value.disc != self.disc:
                    raise FieldMismatch("discriminant mismatch")
                return value
            if isinstance(value, (int, Fraction)):
                return QuadExt(Fraction(value), Fraction(0), self.disc)
            raise FieldMismatch(f"cannot coerce {value!r} into Q(sqrt{self.disc})")
        if self.tag == "prime":
            if isinstance(value, Fp):
                if value.p != self.p:
                    raise FieldMismatch("modulus mismatch")
                return value
            if isinstance(value, int):
                return Fp(value, self.p)
            if isinstance(value, Fraction):
                return reduce_mod(value, self.p)
            raise FieldMismatch(f"cannot coerce {value!r} into F_{self.p}")
        if self.tag == "approx":
            if isinstance(value, QuadExt):
                return float(value.a) + float(value.b) * math.sqrt(value.disc)
            return float(value)
        raise ValueError(f"unknown field tag {self.tag}")

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def sqrt_disc_elem(self):
        if self.tag != "quadratic":
            raise FieldMismatch("sqrt element only exists in a quadratic field")
        return QuadExt(Fraction(0), Fraction(1), self.disc)

    # -- arithmetic helpers ---------------------------------------------------

    def mul(self, x, y):
        return self.coerce(x) * self.coerce(y)

    def add(self, x, y):
        return self.coerce(x) + self.coerce(y)

    def inv(self, x):
        x = self.coerce(x)
        if self.tag == "rational":
            if x == 0:
                raise DivisionByZero("1/0 in Q")
            return 1 / x
        if self.tag == "approx":
            if abs(x) <= self.eps:
                return_err = DivisionByZero(f"|x| <= eps: {x}")
                raise return_err
            return 1.0 / x
        return x.inv()

    def is_zero(self, x) -> bool:
        x = self.coerce(x)
        if self.tag == "approx":
            return abs(x) <= self.eps
        return not bool(x)

    def eq(self, x, y) -> bool:
        x, y = self.coerce(x), self.coerce(y)
        if self.tag == "approx":
            return abs(x - y) <= self.eps * max(1.0, abs(x), abs(y))
        return x == y

    def random(self, rng, span: int = 20):
        """A random element with small integer data; never the same stream twice
        for a fixed rng state."""
        n = rng.randrange(-span, span + 1)
        if self.tag == "prime":
            return Fp(rng.randrange(self.p), self.p)
        if self.tag == "approx":
            return rng.uniform(-float(span), float(span))
        if self.tag == "quadratic":
            return QuadExt(Fraction(n), Fraction(rng.randrange(-span, span + 1)), self.disc)
        return Fraction(n)

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        if self.tag == "rational":
            return {"field": "rational"}
        if self.tag == "quadratic":
            return {"field": "quadratic", "D": self.disc}
        if self.tag == "prime":
            return {"field": "prime", "p": self.p}
        return {"field": "approx", "eps": self.eps}

    @classmethod
    def from_json(cls, obj: dict) -> "FieldSpec":
        tag = obj["field"]
        if tag == "rational":
            return cls.rational()
        if tag == "quadratic":
            return cls.quadratic(int(obj["D"]))
        if tag == "prime":
            return cls.prime(int(obj["p"]))
        if tag == "approx":
            return cls.approx(float(obj.get("eps", 1e-8)))
        raise ValueError(f"unknown field tag {tag!r}")

    def scalar_to_json(self, x):
        x = self.coerce(x)
        if self.tag == "rational":
            return str(x) if x.denominator != 1 else x.numerator
        if self.tag == "quadratic":
            return f"{x.a}+{x.b}*sqrt{self.disc}"
        if self.tag == "prime":
            return x.residue
        return float(x)

    def scalar_from_json(self, obj):
        if self.tag == "rational":
            if isinstance(obj, str):
                return Fraction(obj)
            return Fraction(obj)
        if self.tag == "quadratic":
            if isinstance(obj, str) and "sqrt" in obj:
                # format "a+b*sqrtD"; plain rationals also accepted below
                a_str, b_str = obj.rsplit("+", 1) if "+" in obj[1:] else ("0", obj)
                b_part, d_part = b_str.split("*sqrt")
                if int(d_part) != self.disc:
                    raise FieldMismatch("discriminant mismatch in scalar literal")
                return QuadExt(Fraction(a_str), Fraction(b_part), self.disc)
            return QuadExt(Fraction(obj), Fraction(0), self.disc)
        if self.tag == "prime":
            return Fp(int(obj), self.p)
        return float(obj)


def reduce_mod(x, p: int, sqrt_disc: int | None = None) -> Fp:
    """Ring-homomorphic image of a rational or quadratic-extension scalar in F_p.

    For a quadratic element the image depends on which square root of the
    discriminant is chosen; pass sqrt_disc to pin the choice.
    """
    if isinstance(x, int):
        return Fp(x, p)
    if isinstance(x, Fraction):
        if x.denominator % p == 0:
            raise BadPrime(f"{p} divides denominator of {x}")
        return Fp(x.numerator * pow(x.denominator, p - 2, p), p)
    if isinstance(x, Fp):
        if x.p != p:
            raise FieldMismatch("modulus mismatch")
        return x
    if isinstance(x, QuadExt):
        if sqrt_disc is None:
            sqrt_disc = sqrt_mod(x.disc % p, p)
            if sqrt_disc is None:
                raise BadPrime(f"{x.disc} is not a square mod {p}")
        elif (sqrt_disc * sqrt_disc - x.disc) % p != 0:
            raise BadPrime("supplied root does not square to the discriminant")
        return reduce_mod(x.a, p) + reduce_mod(x.b, p) * Fp(sqrt_disc, p)
    raise FieldMismatch(f"cannot reduce {x!r} mod {p}")


class ModularReduction:
    """Reduction map from an exact field into F_p with the root choice recorded."""

    def __init__(self, source: FieldSpec, p: int, root_choice: int = 0):
        if source.tag not in ("rational", "quadratic"):
            raise FieldMismatch("can only reduce exact characteristic-0 scalars")
        self.source = source
        self.p = p
        self.target = FieldSpec.prime(p)
        self.sqrt_disc = None
        if source.tag == "quadratic":
            r = sqrt_mod(source.disc % p, p)
            if r is None:
                raise BadPrime(f"{source.disc} is not a square mod {p}")
            self.sqrt_disc = (p - r) if root_choice else r

    def __call__(self, x) -> Fp:
        return reduce_mod(self.source.coerce(x), self.p, self.sqrt_disc)
