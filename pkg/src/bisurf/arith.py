"""Exact coefficient domains: rationals, Q(i*sqrt(7)), prime fields, F_{p^2},
and residue rings mod p^K.

All values are immutable and hashable.  Arithmetic between elements of
different domains raises TypeError rather than coercing; crossing domains is
always an explicit call (``embed_quad``, ``Domain.coerce``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd


class NonResidue(ValueError):
    """Raised when a square root is requested for a quadratic non-residue."""


class DenominatorDivisibleByP(ZeroDivisionError):
    """Raised when a rational with p in the denominator is reduced mod p."""


class NoReconstruction(ValueError):
    """Raised when no bounded-height preimage matches a residue."""


Rational = Fraction  # kept reduced with positive denominator by construction


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational")


@dataclass(frozen=True, slots=True)
class QuadElem:
    """Element a + b*w of Q(i*sqrt(7)), where w^2 = -7."""

    a: Fraction
    b: Fraction

    def __init__(self, a, b=0):
        object.__setattr__(self, "a", _as_fraction(a))
        object.__setattr__(self, "b", _as_fraction(b))

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def __add__(self, other):
        other = _quad(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadElem(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(-self.a, -self.b)

    def __sub__(self, other):
        other = _quad(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadElem(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        other = _quad(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadElem(
            self.a * other.a - 7 * self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    __rmul__ = __mul__

    def conjugate(self) -> "QuadElem":
        return QuadElem(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a + 7 * self.b * self.b

    def inverse(self) -> "QuadElem":
        n = self.norm()
        if not n:
            raise ZeroDivisionError("inverse of zero in Q(i*sqrt(7))")
        return QuadElem(self.a / n, -self.b / n)

    def __truediv__(self, other):
        other = _quad(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _quad(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = QuadElem(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        other = _quad(other)
        if other is NotImplemented:
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b, "w"))

    def is_rational(self) -> bool:
        return not self.b

    def __repr__(self):
        return f"QuadElem({self.a!s}, {self.b!s})"

    def __str__(self):
        return format_scalar(self)


OMEGA = QuadElem(0, 1)


def _quad(x):
    if isinstance(x, QuadElem):
        return x
    if isinstance(x, (int, Fraction)):
        return QuadElem(x)
    return NotImplemented


@dataclass(frozen=True, slots=True)
class FpElem:
    """Element of the prime field F_p, stored as the representative in [0, p)."""

    value: int
    p: int

    def __init__(self, value: int, p: int):
        object.__setattr__(self, "value", value % p)
        object.__setattr__(self, "p", p)

    def _check(self, other):
        if isinstance(other, FpElem):
            if other.p != self.p:
                raise TypeError(f"mixed moduli {self.p} and {other.p}")
            return other
        if isinstance(other, int):
            return FpElem(other, self.p)
        return NotImplemented

    def __bool__(self):
        return self.value != 0

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return FpElem(self.value + other.value, self.p)

    __radd__ = __add__

    def __neg__(self):
        return FpElem(-self.value, self.p)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return FpElem(self.value - other.value, self.p)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return FpElem(self.value * other.value, self.p)

    __rmul__ = __mul__

    def inverse(self) -> "FpElem":
        if not self.value:
            raise ZeroDivisionError(f"inverse of 0 mod {self.p}")
        return FpElem(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._check(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return FpElem(pow(self.value, n, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == other % self.p
        if isinstance(other, FpElem):
            return self.p == other.p and self.value == other.value
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __repr__(self):
        return f"FpElem({self.value}, {self.p})"

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True, slots=True)
class Fp2Elem:
    """Element a + b*s of F_{p^2} = F_p[s]/(s^2 - nonresidue)."""

    a: int
    b: int
    p: int
    ns: int  # fixed quadratic non-residue defining the extension

    def __init__(self, a: int, b: int, p: int, ns: int):
        object.__setattr__(self, "a", a % p)
        object.__setattr__(self, "b", b % p)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "ns", ns)

    def _check(self, other):
        if isinstance(other, Fp2Elem):
            if (other.p, other.ns) != (self.p, self.ns):
                raise TypeError("mixed F_{p^2} domains")
            return other
        if isinstance(other, int):
            return Fp2Elem(other, 0, self.p, self.ns)
        if isinstance(other, FpElem):
            if other.p != self.p:
                raise TypeError("mixed moduli")
            return Fp2Elem(other.value, 0, self.p, self.ns)
        return NotImplemented

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return Fp2Elem(self.a + other.a, self.b + other.b, self.p, self.ns)

    __radd__ = __add__

    def __neg__(self):
        return Fp2Elem(-self.a, -self.b, self.p, self.ns)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return Fp2Elem(self.a - other.a, self.b - other.b, self.p, self.ns)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return Fp2Elem(
            self.a * other.a + self.b * other.b * self.ns,
            self.a * other.b + self.b * other.a,
            self.p,
            self.ns,
        )

    __rmul__ = __mul__

    def inverse(self) -> "Fp2Elem":
        n = (self.a * self.a - self.b * self.b * self.ns) % self.p
        if not n:
            raise ZeroDivisionError("inverse of 0 in F_{p^2}")
        ninv = pow(n, -1, self.p)
        return Fp2Elem(self.a * ninv, -self.b * ninv, self.p, self.ns)

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._check(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = Fp2Elem(1, 0, self.p, self.ns)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            return self.b == 0 and self.a == other % self.p
        if isinstance(other, Fp2Elem):
            return (self.a, self.b, self.p, self.ns) == (other.a, other.b, other.p, other.ns)
        if isinstance(other, FpElem):
            return self.p == other.p and self.b == 0 and self.a == other.value
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash((self.a, self.p))  # agree with FpElem on the prime subfield
        return hash((self.a, self.b, self.p, self.ns))

    def __repr__(self):
        return f"Fp2Elem({self.a}, {self.b}, {self.p}, {self.ns})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"({self.a}+{self.b}*s)"


@dataclass(frozen=True, slots=True)
class PadicApprox:
    """Residue mod p^K together with its modulus; arithmetic is exact mod p^K."""

    value: int
    p: int
    k: int

    def __init__(self, value: int, p: int, k: int):
        if k < 1:
            raise ValueError("precision exponent must be >= 1")
        object.__setattr__(self, "value", value % p**k)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "k", k)

    @property
    def modulus(self) -> int:
        return self.p**self.k

    def reduce_to(self, k: int) -> "PadicApprox":
        if k > self.k:
            raise ValueError(f"cannot raise precision {self.k} -> {k}")
        return PadicApprox(self.value, self.p, k)

    def _check(self, other):
        if isinstance(other, PadicApprox):
            if other.p != self.p:
                raise TypeError(f"mixed primes {self.p} and {other.p}")
            return other
        if isinstance(other, int):
            return PadicApprox(other, self.p, self.k)
        return NotImplemented

    def __bool__(self):
        return self.value != 0

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        k = min(self.k, other.k)
        return PadicApprox(self.value + other.value, self.p, k)

    __radd__ = __add__

    def __neg__(self):
        return PadicApprox(-self.value, self.p, self.k)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        k = min(self.k, other.k)
        return PadicApprox(self.value - other.value, self.p, k)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        k = min(self.k, other.k)
        return PadicApprox(self.value * other.value, self.p, k)

    __rmul__ = __mul__

    def inverse(self) -> "PadicApprox":
        if self.value % self.p == 0:
            raise ZeroDivisionError(f"{self.value} is not a unit mod {self.p}^{self.k}")
        return PadicApprox(pow(self.value, -1, self.modulus), self.p, self.k)

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._check(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return PadicApprox(pow(self.value, n, self.modulus), self.p, self.k)

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == other % self.modulus
        if isinstance(other, PadicApprox):
            return (self.value, self.p, self.k) == (other.value, other.p, other.k)
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p, self.k))

    def __repr__(self):
        return f"PadicApprox({self.value}, {self.p}, {self.k})"

    def __str__(self):
        return f"{self.value} mod {self.p}^{self.k}"


# ---------------------------------------------------------------------------
# Domains: small descriptors used by polynomials to tag their coefficients.

class Domain:
    name: str

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, Domain) and self.name == getattr(other, "name", None)

    def __hash__(self):
        return hash(self.name)


class _RationalDomain(Domain):
    name = "QQ"
    zero = Fraction(0)
    one = Fraction(1)

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def coerce(self, x) -> Fraction:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, QuadElem) and x.is_rational():
            return x.a
        raise TypeError(f"cannot coerce {x!r} into QQ")


class _QuadDomain(Domain):
    name = "QI7"
    zero = QuadElem(0)
    one = QuadElem(1)

    def from_int(self, n: int) -> QuadElem:
        return QuadElem(n)

    def coerce(self, x) -> QuadElem:
        q = _quad(x)
        if q is NotImplemented:
            raise TypeError(f"cannot coerce {x!r} into Q(i*sqrt(7))")
        return q


QQ = _RationalDomain()
QI7 = _QuadDomain()


class FpDomain(Domain):
    def __init__(self, p: int):
        self.p = p
        self.name = f"GF({p})"
        self.zero = FpElem(0, p)
        self.one = FpElem(1, p)

    def from_int(self, n: int) -> FpElem:
        return FpElem(n, self.p)

    def coerce(self, x) -> FpElem:
        if isinstance(x, FpElem):
            if x.p != self.p:
                raise TypeError("mixed moduli")
            return x
        if isinstance(x, int):
            return FpElem(x, self.p)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise DenominatorDivisibleByP(f"{x} has denominator divisible by {self.p}")
            return FpElem(x.numerator * pow(x.denominator, -1, self.p), self.p)
        raise TypeError(f"cannot coerce {x!r} into GF({self.p})")


class Fp2Domain(Domain):
    def __init__(self, p: int):
        self.p = p
        self.ns = smallest_nonresidue(p)
        self.name = f"GF({p}^2)"
        self.zero = Fp2Elem(0, 0, p, self.ns)
        self.one = Fp2Elem(1, 0, p, self.ns)

    def from_int(self, n: int) -> Fp2Elem:
        return Fp2Elem(n, 0, self.p, self.ns)

    def coerce(self, x) -> Fp2Elem:
        if isinstance(x, Fp2Elem):
            if (x.p, x.ns) != (self.p, self.ns):
                raise TypeError("mixed F_{p^2} domains")
            return x
        if isinstance(x, FpElem):
            if x.p != self.p:
                raise TypeError("mixed moduli")
            return Fp2Elem(x.value, 0, self.p, self.ns)
        if isinstance(x, (int, Fraction)):
            return Fp2Elem(GF(self.p).coerce(x).value, 0, self.p, self.ns)
        raise TypeError(f"cannot coerce {x!r} into GF({self.p}^2)")

    @property
    def generator(self) -> Fp2Elem:
        return Fp2Elem(0, 1, self.p, self.ns)


class PadicDomain(Domain):
    def __init__(self, p: int, k: int):
        self.p = p
        self.k = k
        self.name = f"Z/{p}^{k}"
        self.zero = PadicApprox(0, p, k)
        self.one = PadicApprox(1, p, k)

    def from_int(self, n: int) -> PadicApprox:
        return PadicApprox(n, self.p, self.k)

    def coerce(self, x) -> PadicApprox:
        if isinstance(x, PadicApprox):
            if x.p != self.p or x.k < self.k:
                raise TypeError("cannot coerce across primes or up in precision")
            return x.reduce_to(self.k)
        if isinstance(x, int):
            return PadicApprox(x, self.p, self.k)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise DenominatorDivisibleByP(f"{x} has denominator divisible by {self.p}")
            m = self.p**self.k
            return PadicApprox(x.numerator * pow(x.denominator, -1, m), self.p, self.k)
        raise TypeError(f"cannot coerce {x!r} into {self.name}")


_fp_cache: dict[int, FpDomain] = {}
_fp2_cache: dict[int, Fp2Domain] = {}


def GF(p: int) -> FpDomain:
    if p not in _fp_cache:
        _fp_cache[p] = FpDomain(p)
    return _fp_cache[p]


def GF2(p: int) -> Fp2Domain:
    if p not in _fp2_cache:
        _fp2_cache[p] = Fp2Domain(p)
    return _fp2_cache[p]


def Zmod(p: int, k: int) -> PadicDomain:
    return PadicDomain(p, k)


# ---------------------------------------------------------------------------
# Square roots and embeddings.

def is_residue(a: int, p: int) -> bool:
    a %= p
    return a == 0 or pow(a, (p - 1) // 2, p) == 1


def smallest_nonresidue(p: int) -> int:
    for n in range(2, p):
        if not is_residue(n, p):
            return n
    raise ValueError(f"{p} has no non-residue; not an odd prime?")


def sqrt_mod_p(a, p: int | None = None) -> FpElem:
    """Canonical square root mod an odd prime: the representative in [0, p/2).

    Raises NonResidue when ``a`` is not a square mod p.
    """
    if isinstance(a, FpElem):
        p = a.p
        a = a.value
    elif p is None:
        raise TypeError("sqrt_mod_p needs a modulus")
    a %= p
    if a == 0:
        return FpElem(0, p)
    if pow(a, (p - 1) // 2, p) != 1:
        raise NonResidue(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        # Tonelli-Shanks
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = smallest_nonresidue(p)
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            t2, i = t, 0
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t = t * c % p
            r = r * b % p
    if 2 * r >= p:
        r = p - r
    return FpElem(r, p)


def lift_sqrt(a: int, p: int, k: int, branch: str = "plus") -> PadicApprox:
    """Square root of ``a`` mod p^k whose mod-p reduction is the canonical
    (branch ``plus``) or complementary (branch ``minus``) root."""
    r = sqrt_mod_p(a % p, p).value
    if branch == "minus":
        r = (p - r) % p
    elif branch != "plus":
        raise ValueError(f"unknown branch {branch!r}")
    mod = p
    for _ in range(max(0, (k - 1).bit_length())):
        mod = min(mod * mod, p**k)
        # Newton step for r^2 - a
        r = (r - (r * r - a) * pow(2 * r, -1, mod)) % mod
    r %= p**k
    assert (r * r - a) % p**k == 0
    return PadicApprox(r, p, k)


def embed_quad(x: QuadElem, p: int, k: int = 1, branch: str = "plus") -> PadicApprox:
    """Reduce an element of Q(i*sqrt(7)) mod p^k along one of the two
    conjugate embeddings (w -> +/- sqrt(-7))."""
    r = lift_sqrt(-7, p, k, branch)
    m = p**k
    for den in (x.a.denominator, x.b.denominator):
        if den % p == 0:
            raise DenominatorDivisibleByP(f"{x} has denominator divisible by {p}")
    a = x.a.numerator * pow(x.a.denominator, -1, m)
    b = x.b.numerator * pow(x.b.denominator, -1, m)
    return PadicApprox(a + b * r.value, p, k)


# ---------------------------------------------------------------------------
# Rational reconstruction.

def _recon_rational(x: int, m: int, bound: int) -> Fraction:
    # Extended Euclid on (m, x); stop at the first remainder <= bound.
    r0, r1 = m, x % m
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    num, den = r1, t1
    if den < 0:
        num, den = -num, -den
    if den == 0 or den > bound or gcd(num, den) != 1 or gcd(den, m) != 1:
        raise NoReconstruction(f"no rational of height <= {bound} matches {x} mod {m}")
    return Fraction(num, den)


def rational_reconstruction(x: PadicApprox, bound: int, quadratic: bool = False):
    """Recover a small rational (or (a+b*w)/c with ``quadratic=True``)
    congruent to ``x`` mod p^K.

    Uniqueness is guaranteed when 2*bound^2 < p^K; the result is always
    re-verified against the residue.  Raises NoReconstruction when nothing of
    the requested height exists.
    """
    m = x.modulus
    if not quadratic:
        f = _recon_rational(x.value, m, bound)
        if (f.numerator - f.denominator * x.value) % m != 0:
            raise NoReconstruction(f"verification failed for {x}")
        return f
    r = lift_sqrt(-7, x.p, x.k, "plus").value
    from .recog import _lll_rows  # local import: recog depends on arith types

    rows = [[-r, 1, 0], [x.value, 0, 1], [m, 0, 0]]
    reduced, _ = _lll_rows(rows)
    for vec in reduced:
        a, b, c = vec
        if c < 0:
            a, b, c = -a, -b, -c
        if c == 0 or max(abs(a), abs(b), c) > bound:
            continue
        if (a + b * r - c * x.value) % m != 0:
            continue
        g = gcd(gcd(abs(a), abs(b)), c)
        return QuadElem(Fraction(a // g, c // g), Fraction(b // g, c // g))
    raise NoReconstruction(f"no quadratic element of height <= {bound} matches {x}")


# ---------------------------------------------------------------------------
# Literal syntax: integers base-10, rationals a/b, quadratic (a+b*I7)/c.

_QUAD_RE = re.compile(
    r"^\(\s*(-?\d+)\s*([+-])\s*(\d+)\s*\*\s*I7\s*\)\s*(?:/\s*(\d+))?$"
)
_I7_RE = re.compile(r"^(-?\d+)\s*\*\s*I7$")


def parse_scalar(text: str):
    """Parse the literal syntax into int, Fraction, or QuadElem."""
    s = text.strip()
    if s == "I7":
        return OMEGA
    if s == "-I7":
        return -OMEGA
    m = _I7_RE.match(s)
    if m:
        return QuadElem(0, int(m.group(1)))
    m = _QUAD_RE.match(s)
    if m:
        a, sign, b, c = m.groups()
        b = int(b) if sign == "+" else -int(b)
        c = int(c) if c else 1
        return QuadElem(Fraction(int(a), c), Fraction(b, c))
    if "/" in s:
        num, den = s.split("/")
        return Fraction(int(num), int(den))
    return int(s)


def format_scalar(x) -> str:
    """Serialize a scalar in the literal syntax (canonical form)."""
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, QuadElem):
        if x.is_rational():
            return format_scalar(x.a)
        c = x.a.denominator
        c = c * (x.b.denominator // gcd(x.b.denominator, c))
        a = x.a.numerator * (c // x.a.denominator)
        b = x.b.numerator * (c // x.b.denominator)
        sign = "+" if b >= 0 else "-"
        core = f"({a}{sign}{abs(b)}*I7)"
        return core if c == 1 else f"{core}/{c}"
    if isinstance(x, (FpElem,)):
        return str(x.value)
    if isinstance(x, Fp2Elem):
        return str(x)
    if isinstance(x, PadicApprox):
        return str(x.value)
    raise TypeError(f"cannot format {x!r}")
