"""Exact arithmetic in GF(p^k), p odd, and in the polynomial ring over it.

Field elements are plain integers ``0 .. q-1``.  For ``k > 1`` the integer
``a`` encodes the coefficient vector ``(c_0, ..., c_{k-1})`` of
``c_0 + c_1 t + ... + c_{k-1} t^{k-1}`` (t a root of the modulus) as
``a = sum c_i p^i``.  All arithmetic goes through precomputed ``q x q``
tables, which keeps it vectorisable with numpy fancy indexing.

Polynomials are :class:`Poly` values with coefficients stored constant-first
and no trailing zeros; the zero polynomial has an empty coefficient tuple.
"""

from __future__ import annotations

import enum
import functools
import itertools
import random
from dataclasses import dataclass

import numpy as np

from .errors import (
    EvenCharacteristic,
    NonPrime,
    ReducibleModulus,
    UnsupportedField,
    ZeroConstantTerm,
    ZeroElement,
    ZeroPolynomial,
)

MAX_Q = 81


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class SquareClass(enum.Enum):
    """An element of K*/(K*)^2."""

    SQUARE = "square"
    NONSQUARE = "nonsquare"

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        if not isinstance(other, SquareClass):
            return NotImplemented
        return SquareClass.SQUARE if self is other else SquareClass.NONSQUARE

    @property
    def sign(self) -> int:
        return 1 if self is SquareClass.SQUARE else -1

    @classmethod
    def from_sign(cls, s: int) -> "SquareClass":
        return cls.SQUARE if s == 1 else cls.NONSQUARE

    @classmethod
    def product(cls, classes) -> "SquareClass":
        out = cls.SQUARE
        for c in classes:
            out = out * c
        return out

    def __repr__(self):
        return f"SquareClass.{self.name}"


SQUARE = SquareClass.SQUARE
NONSQUARE = SquareClass.NONSQUARE


class Field:
    """GF(p^k) with p odd and q = p^k <= MAX_Q.

    Construct through :func:`field_make`, which validates the input and
    caches instances; two fields compare equal iff (p, k, modulus) agree.
    """

    def __init__(self, p: int, k: int, modulus: tuple[int, ...] | None):
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = modulus
        q = self.q
        digits = np.array(
            [[(a // p**i) % p for i in range(k)] for a in range(q)], dtype=np.int64
        )
        self._digits = digits
        weights = p ** np.arange(k, dtype=np.int64)
        add = (digits[:, None, :] + digits[None, :, :]) % p @ weights
        neg = ((-digits) % p) @ weights
        if k == 1:
            a = np.arange(q, dtype=np.int64)
            mul = (a[:, None] * a[None, :]) % p
        else:
            mul = np.zeros((q, q), dtype=np.int64)
            red = _reduction_rows(p, k, modulus)
            for a in range(q):
                for b in range(a, q):
                    prod = np.convolve(digits[a], digits[b]) % p
                    vec = prod[:k].copy()
                    for j in range(k, 2 * k - 1):
                        if prod[j]:
                            vec = (vec + prod[j] * red[j - k]) % p
                    mul[a, b] = mul[b, a] = int(vec @ weights)
        self.add = add.astype(np.int64)
        self.neg = neg.astype(np.int64)
        self.sub = self.add[:, self.neg]
        self.mul = mul
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            inv[a] = int(np.flatnonzero(mul[a] == 1)[0])
        self.inv = inv
        squares = np.zeros(q, dtype=bool)
        squares[mul[np.arange(1, q), np.arange(1, q)]] = True
        self.is_square = squares
        self.nonsquare = int(np.flatnonzero(~squares[1:])[0]) + 1
        self.one = 1
        self.zero = 0
        self.minus_one = int(neg[1])
        self.two = int(add[1, 1])

    def __eq__(self, other):
        return isinstance(other, Field) and (self.p, self.k, self.modulus) == (
            other.p,
            other.k,
            other.modulus,
        )

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    def __repr__(self):
        if self.k == 1:
            return f"GF({self.p})"
        return f"GF({self.q}; modulus={list(self.modulus)})"

    @property
    def is_prime_field(self) -> bool:
        return self.k == 1

    def elem(self, x) -> int:
        """Encode an int (prime field, or any int mod p) or a coefficient list."""
        if isinstance(x, (list, tuple, np.ndarray)):
            if len(x) != self.k:
                raise ValueError(f"expected {self.k} coefficients, got {len(x)}")
            return int(sum((int(c) % self.p) * self.p**i for i, c in enumerate(x)))
        x = int(x)
        if self.k == 1:
            return x % self.p
        # integers embed through the prime subfield
        return x % self.p

    def coeffs(self, a: int) -> list[int]:
        return [int(c) for c in self._digits[a]]

    def encode(self, a: int):
        """JSON form of an element: int for prime fields, list otherwise."""
        return int(a) if self.k == 1 else self.coeffs(a)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            if a == 0:
                raise ZeroElement("0 has no inverse")
            a, e = int(self.inv[a]), -e
        r, b = 1, int(a)
        while e:
            if e & 1:
                r = int(self.mul[r, b])
            b = int(self.mul[b, b])
            e >>= 1
        return r

    def frobenius_root(self, a: int) -> int:
        """The unique b with b^p = a."""
        return self.pow(a, self.p ** (self.k - 1))

    def elements(self) -> range:
        return range(self.q)


def _reduction_rows(p, k, modulus):
    # rows[i] = coefficient vector of t^(k+i) reduced mod modulus
    m = np.array(modulus[:k], dtype=np.int64)
    rows = []
    cur = (-m) % p  # t^k
    for _ in range(k - 1):
        rows.append(cur.copy())
        top = cur[k - 1]
        nxt = np.zeros(k, dtype=np.int64)
        nxt[1:] = cur[: k - 1]
        nxt = (nxt + top * ((-m) % p)) % p
        cur = nxt
    return rows


@functools.lru_cache(maxsize=None)
def _field(p, k, modulus):
    return Field(p, k, modulus)


def field_make(p: int, k: int = 1, modulus=None, *, max_q: int = MAX_Q) -> Field:
    """Validated, cached constructor for GF(p^k).

    ``modulus`` is a constant-first integer coefficient sequence (or a Poly
    over GF(p)) of a monic irreducible polynomial of degree k.  When omitted
    for k > 1 the lexicographically smallest one is used, comparing
    coefficient tuples from the x^(k-1) coefficient down to the constant.
    """
    if not _is_prime(p):
        raise NonPrime(f"{p} is not prime")
    if p == 2:
        raise EvenCharacteristic("characteristic 2 is not supported")
    if k < 1:
        raise ValueError("extension degree must be >= 1")
    if p**k > max_q:
        raise UnsupportedField(f"q = {p**k} exceeds the configured cap {max_q}")
    if k == 1:
        return _field(p, 1, None)
    base = _field(p, 1, None)
    if modulus is None:
        mod = smallest_irreducible(base, k)
        return _field(p, k, mod.coeffs)
    if isinstance(modulus, Poly):
        coeffs = tuple(int(c) % p for c in modulus.coeffs)
    else:
        coeffs = tuple(int(c) % p for c in modulus)
    f = Poly(base, coeffs)
    if f.degree != k or f.lc != 1:
        raise ReducibleModulus(f"modulus must be monic of degree {k}")
    if not is_irreducible(f):
        raise ReducibleModulus(f"{f} is reducible over GF({p})")
    return _field(p, k, f.coeffs)


def square_class(F: Field, a: int) -> SquareClass:
    if a % F.q == 0:
        raise ZeroElement("0 has no square class")
    return SQUARE if F.is_square[a] else NONSQUARE


def class_of_minus_one(F: Field) -> SquareClass:
    return SQUARE if F.q % 4 == 1 else NONSQUARE


# ---------------------------------------------------------------- polynomials


def _trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(int(c) for c in coeffs)


@dataclass(frozen=True)
class Poly:
    field: Field
    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    # construction
    @classmethod
    def x(cls, F: Field) -> "Poly":
        return cls(F, (0, 1))

    @classmethod
    def const(cls, F: Field, c: int) -> "Poly":
        return cls(F, (c,))

    @classmethod
    def from_ints(cls, F: Field, ints) -> "Poly":
        """Constant-first coefficients given as ints (or coefficient lists)."""
        return cls(F, tuple(F.elem(c) for c in ints))

    @classmethod
    def linear(cls, F: Field, root: int) -> "Poly":
        """x - root."""
        return cls(F, (int(F.neg[root]), 1))

    # basic properties
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (1,)

    def is_monic(self) -> bool:
        return self.lc == 1

    def __bool__(self):
        return bool(self.coeffs)

    def sort_key(self):
        return (self.degree, tuple(reversed(self.coeffs)))

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        F = self.field
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            cs = str(c) if F.k == 1 else "(" + ",".join(map(str, F.coeffs(c))) + ")"
            if i == 0:
                terms.append(cs)
            else:
                mon = "x" if i == 1 else f"x^{i}"
                terms.append(mon if c == 1 else f"{cs}*{mon}")
        return " + ".join(terms)

    # arithmetic
    def __add__(self, other: "Poly") -> "Poly":
        F = self.field
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        a = a + (0,) * (n - len(a))
        b = b + (0,) * (n - len(b))
        return Poly(F, tuple(int(F.add[x, y]) for x, y in zip(a, b)))

    def __neg__(self) -> "Poly":
        F = self.field
        return Poly(F, tuple(int(F.neg[c]) for c in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        F = self.field
        if isinstance(other, int):
            return Poly(F, tuple(int(F.mul[c, other]) for c in self.coeffs))
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(F, ())
        out = [0] * (len(a) + len(b) - 1)
        add, mul = F.add, F.mul
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] = int(add[out[i + j], mul[x, y]])
        return Poly(F, tuple(out))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Poly":
        r = Poly.const(self.field, 1)
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def __divmod__(self, other: "Poly"):
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        F = self.field
        rem = list(self.coeffs)
        db = other.degree
        inv_lc = int(F.inv[other.lc])
        if len(rem) - 1 < db:
            return Poly(F, ()), self
        quot = [0] * (len(rem) - db)
        add, mul, neg = F.add, F.mul, F.neg
        b = other.coeffs
        for i in range(len(rem) - 1, db - 1, -1):
            c = rem[i]
            if c == 0:
                continue
            c = int(mul[c, inv_lc])
            quot[i - db] = c
            nc = int(neg[c])
            for j, y in enumerate(b):
                rem[i - db + j] = int(add[rem[i - db + j], mul[nc, y]])
        return Poly(F, tuple(quot)), Poly(F, tuple(rem[:db]))

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> "Poly":
        if not self.coeffs:
            raise ZeroPolynomial("cannot normalise the zero polynomial")
        return self * int(self.field.inv[self.lc])

    def derivative(self) -> "Poly":
        F = self.field
        return Poly(
            F, tuple(int(F.mul[F.elem(i), c]) for i, c in enumerate(self.coeffs))[1:]
        )

    def __call__(self, a: int) -> int:
        F = self.field
        r = 0
        for c in reversed(self.coeffs):
            r = int(F.add[F.mul[r, a], c])
        return r

    def powmod(self, e: int, mod: "Poly") -> "Poly":
        r = Poly.const(self.field, 1)
        b = self % mod
        while e:
            if e & 1:
                r = (r * b) % mod
            b = (b * b) % mod
            e >>= 1
        return r

    def is_selfreciprocal(self) -> bool:
        return poly_reciprocal(self) == self


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while b.coeffs:
        a, b = b, a % b
    return a.monic() if a.coeffs else a


def poly_lcm(a: Poly, b: Poly) -> Poly:
    return (a * b // poly_gcd(a, b)).monic()


def poly_reciprocal(f: Poly) -> Poly:
    """r*(x) = r(0)^{-1} x^d r(1/x) for monic r with nonzero constant term."""
    if f.is_zero():
        raise ZeroPolynomial("zero polynomial has no reciprocal")
    if not f.is_monic():
        raise ValueError("reciprocal is defined for monic polynomials")
    if f.coeffs[0] == 0:
        raise ZeroConstantTerm("reciprocal needs f(0) != 0")
    F = f.field
    c = int(F.inv[f.coeffs[0]])
    return Poly(F, tuple(int(F.mul[c, a]) for a in reversed(f.coeffs)))


def is_irreducible(f: Poly) -> bool:
    """Rabin-style test via gcd(f, x^(q^i) - x) for i <= deg/2."""
    if f.degree < 1:
        return False
    f = f.monic()
    if f.degree == 1:
        return True
    F = f.field
    x = Poly.x(F)
    h = x
    for i in range(1, f.degree // 2 + 1):
        h = h.powmod(F.q, f)
        if not poly_gcd(h - x, f).is_one():
            return False
    return True


def smallest_irreducible(F: Field, k: int) -> Poly:
    for tail in itertools.product(range(F.q), repeat=k):
        # tail = (a_{k-1}, ..., a_0); lexicographic from the top coefficient
        f = Poly(F, tuple(reversed(tail)) + (1,))
        if is_irreducible(f):
            return f
    raise AssertionError("unreachable: irreducibles exist in every degree")


def _pth_root(f: Poly) -> Poly:
    F = f.field
    p = F.p
    return Poly(F, tuple(F.frobenius_root(f.coeffs[i]) for i in range(0, len(f.coeffs), p)))


def _squarefree(f: Poly):
    """Pairs (g, e) with g squarefree, pairwise coprime, f = prod g^e (f monic)."""
    F = f.field
    out = []
    df = f.derivative()
    if df.is_zero():
        c = f
        w = Poly.const(F, 1)
    else:
        c = poly_gcd(f, df)
        w = f // c
    i = 1
    while not w.is_one():
        y = poly_gcd(w, c)
        z = w // y
        if not z.is_one():
            out.append((z.monic(), i))
        i += 1
        w = y
        c = c // y
    if not c.is_one():
        for g, e in _squarefree(_pth_root(c.monic()).monic()):
            out.append((g, e * F.p))
    return out


def _distinct_degree(f: Poly):
    F = f.field
    x = Poly.x(F)
    out = []
    h = x
    i = 1
    rest = f
    while rest.degree >= 2 * i:
        h = h.powmod(F.q, rest)
        g = poly_gcd(h - x, rest)
        if not g.is_one():
            out.append((g, i))
            rest = rest // g
            h = h % rest
        i += 1
    if rest.degree > 0:
        out.append((rest.monic(), rest.degree))
    return out


def _equal_degree(g: Poly, d: int, rng: random.Random):
    if g.degree == d:
        return [g]
    F = g.field
    n = g.degree
    e = (F.q**d - 1) // 2
    one = Poly.const(F, 1)
    while True:
        a = Poly(F, tuple(rng.randrange(F.q) for _ in range(n)))
        if a.degree < 1:
            continue
        u = poly_gcd(a, g)
        if u.is_one():
            u = poly_gcd(a.powmod(e, g) - one, g)
        if 0 < u.degree < n:
            return _equal_degree(u, d, rng) + _equal_degree((g // u).monic(), d, rng)


def poly_factor(f: Poly) -> list[tuple[Poly, int]]:
    """Monic irreducible factorisation, sorted by (degree, coefficients)."""
    if f.is_zero():
        raise ZeroPolynomial("cannot factor the zero polynomial")
    f = f.monic()
    if f.degree == 0:
        return []
    F = f.field
    rng = random.Random(repr((F.p, F.k, F.modulus, f.coeffs)))
    out = []
    for g, e in _squarefree(f):
        for h, d in _distinct_degree(g):
            for r in _equal_degree(h, d, rng):
                out.append((r.monic(), e))
    out.sort(key=lambda t: t[0].sort_key())
    return out


def poly_product(factors, F: Field) -> Poly:
    out = Poly.const(F, 1)
    for g, e in factors:
        out = out * g**e
    return out


def monic_polys(F: Field, degree: int):
    """All monic polynomials of the given degree (lexicographic order)."""
    for tail in itertools.product(range(F.q), repeat=degree):
        yield Poly(F, tuple(reversed(tail)) + (1,))


def irreducible_polys(F: Field, degree: int):
    return [f for f in monic_polys(F, degree) if is_irreducible(f)]
