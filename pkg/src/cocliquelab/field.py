"""Exact arithmetic in GF(p^n) for small odd primes.

A field element is an integer in [0, p^n) packing its coefficient vector
(c0, c1, ..., c_{n-1}) with c0 (the constant term) as the most significant
base-p digit.  Integer comparison therefore coincides with lexicographic
comparison of coefficient vectors, and that ordering is the global
tie-breaker for everything built on top of a field.

The modulus is the lexicographically smallest monic irreducible polynomial
of the requested degree (constant term first), so fields are identical
across runs.
"""

from __future__ import annotations

import functools
from itertools import product

import numpy as np

# Table construction above this size is deferred until first arithmetic use.
_LAZY_TABLE_THRESHOLD = 20_000


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    d = 2
    while d * d <= m:
        if m % d == 0:
            return False
        d += 1
    return True


# -- polynomial helpers over GF(p), coefficient lists low-degree first --


def _poly_trim(f):
    while len(f) > 1 and f[-1] == 0:
        f.pop()
    return f


def _poly_mulmod(f, g, mod, p):
    out = [0] * (len(f) + len(g) - 1)
    for i, fi in enumerate(f):
        if fi:
            for j, gj in enumerate(g):
                out[i + j] = (out[i + j] + fi * gj) % p
    # reduce by the monic modulus
    n = len(mod) - 1
    for i in range(len(out) - 1, n - 1, -1):
        c = out[i]
        if c:
            out[i] = 0
            for j in range(n):
                out[i - n + j] = (out[i - n + j] - c * mod[j]) % p
    return _poly_trim(out[:n] if len(out) > n else out)


def _poly_powmod(f, e, mod, p):
    result = [1]
    base = list(f)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, mod, p)
        base = _poly_mulmod(base, base, mod, p)
        e >>= 1
    return result


def _poly_gcd(f, g, p):
    f, g = list(f), list(g)
    while g != [0]:
        # f mod g with g made monic
        inv_lead = pow(g[-1], p - 2, p)
        g_monic = [(c * inv_lead) % p for c in g]
        r = list(f)
        while len(r) >= len(g_monic) and r != [0]:
            c = r[-1]
            shift = len(r) - len(g_monic)
            for j, mj in enumerate(g_monic):
                r[shift + j] = (r[shift + j] - c * mj) % p
            _poly_trim(r)
            if len(r) < len(g_monic):
                break
        f, g = g_monic, _poly_trim(r)
    return f


def _is_irreducible(mod, p):
    """Rabin test for a monic polynomial, coefficients low-degree first."""
    n = len(mod) - 1
    if n == 1:
        return True
    x = [0, 1]
    xq = _poly_powmod(x, p**n, mod, p)
    # x^(p^n) == x mod f
    if _poly_trim([(a - b) % p for a, b in zip(xq + [0] * len(x), x + [0] * len(xq))]) != [0]:
        return False
    for r in {d for d in (2, 3) if n % d == 0}:
        xr = _poly_powmod(x, p ** (n // r), mod, p)
        diff = [0] * max(len(xr), 2)
        for i, c in enumerate(xr):
            diff[i] = c
        diff[1] = (diff[1] - 1) % p
        g = _poly_gcd(list(mod), _poly_trim(diff), p)
        if len(g) > 1:
            return False
    return True


class FieldSpec:
    """GF(p^n) with exhaustive lookup tables for all arithmetic.

    All operations take and return integer element codes.  Instances are
    immutable after construction and safe to share between threads.
    """

    def __init__(self, p: int, n: int):
        if not _is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if p == 2:
            raise ValueError("even characteristic is not supported")
        if not 1 <= n <= 4:
            raise ValueError(f"extension degree {n} out of range 1..4")
        self.p = p
        self.n = n
        self.q = p**n
        self.element_count = self.q
        self.modulus = self._smallest_irreducible()
        self.zero = 0
        self.one = self.encode([1] + [0] * (n - 1))
        self._tables_ready = False
        if self.q <= _LAZY_TABLE_THRESHOLD:
            self._build_tables()

    # -- element codes <-> coefficient vectors (constant term first) --

    def encode(self, coeffs) -> int:
        k = 0
        for c in coeffs:
            k = k * self.p + (c % self.p)
        return k

    def decode(self, a: int):
        out = []
        for _ in range(self.n):
            out.append(a % self.p)
            a //= self.p
        return tuple(reversed(out))

    def _smallest_irreducible(self):
        if self.n == 1:
            return (0, 1)
        for coeffs in product(range(self.p), repeat=self.n):
            mod = list(coeffs) + [1]
            if _is_irreducible(mod, self.p):
                return tuple(mod)
        raise RuntimeError("no irreducible polynomial found")  # unreachable

    # -- table construction --

    def _ensure_tables(self):
        if not self._tables_ready:
            self._build_tables()

    def _build_tables(self):
        p, n, q = self.p, self.n, self.q
        codes = np.arange(q, dtype=np.int64)
        digits = []
        rem = codes.copy()
        for _ in range(n):
            digits.append(rem % p)
            rem //= p
        digits.reverse()  # digits[i] is now c_i (constant term first)

        def pack(ds):
            k = np.zeros_like(ds[0])
            for d in ds:
                k = k * p + (d % p)
            return k

        self._add = pack([(digits[i][:, None] + digits[i][None, :]) % p for i in range(n)]).ravel().tolist()
        self._neg = pack([(-digits[i]) % p for i in range(n)]).tolist()

        if n == 1:
            mul = (codes[:, None] * codes[None, :]) % p
        elif n == 2:
            m0, m1 = self.modulus[0], self.modulus[1]
            a0, a1 = digits[0][:, None], digits[1][:, None]
            b0, b1 = digits[0][None, :], digits[1][None, :]
            hi = a1 * b1  # coefficient of t^2; t^2 = -m1*t - m0
            r0 = (a0 * b0 - m0 * hi) % p
            r1 = (a0 * b1 + a1 * b0 - m1 * hi) % p
            mul = r0 * p + r1
        else:
            mod = list(self.modulus)
            mul = np.zeros((q, q), dtype=np.int64)
            # decode() is constant-term first, which is already low-degree first
            polys = [list(self.decode(a)) for a in range(q)]
            for a in range(q):
                fa = _poly_trim(list(polys[a]))
                row = mul[a]
                for b in range(a, q):
                    r = _poly_mulmod(fa, _poly_trim(list(polys[b])), mod, p)
                    r = r + [0] * (self.n - len(r))
                    code = self.encode(r)
                    row[b] = code
                    mul[b, a] = code
        self._mul = mul.ravel().tolist()

        inv = [0] * q
        for a in range(1, q):
            inv[a] = self._pow_with_tables(a, q - 2)
        self._inv = inv

        sqrt = [None] * q
        for b in range(q):
            s = self._mul[b * q + b]
            if sqrt[s] is None:
                sqrt[s] = b
        self._sqrt = sqrt
        self._squares = frozenset(i for i, s in enumerate(sqrt) if s is not None)
        self._tables_ready = True

    def _pow_with_tables(self, a, e):
        result = self.one
        q = self.q
        while e:
            if e & 1:
                result = self._mul[result * q + a]
            a = self._mul[a * q + a]
            e >>= 1
        return result

    # -- arithmetic --

    def add(self, a, b):
        self._ensure_tables()
        return self._add[a * self.q + b]

    def neg(self, a):
        self._ensure_tables()
        return self._neg[a]

    def sub(self, a, b):
        self._ensure_tables()
        return self._add[a * self.q + self._neg[b]]

    def mul(self, a, b):
        self._ensure_tables()
        return self._mul[a * self.q + b]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero field element")
        self._ensure_tables()
        return self._inv[a]

    def pow(self, a, e):
        self._ensure_tables()
        if a == 0:
            return 0 if e else self.one
        e %= self.q - 1
        return self._pow_with_tables(a, e)

    def is_square(self, a) -> bool:
        self._ensure_tables()
        return a in self._squares

    def sqrt(self, a):
        """A root b with b*b = a, or None; roots are the smallest by element order."""
        self._ensure_tables()
        return self._sqrt[a]

    def frobenius(self, a):
        return self.pow(a, self.p)

    def nonsquare(self) -> int:
        """Smallest non-square under the element order."""
        self._ensure_tables()
        for a in range(self.q):
            if a not in self._squares:
                return a
        raise RuntimeError("every element is a square")  # impossible for odd q

    @functools.lru_cache(maxsize=None)
    def subfield_elements(self, m: int) -> frozenset:
        """Elements of the subfield GF(p^m), as codes; m must divide n."""
        if self.n % m != 0:
            raise ValueError(f"GF(p^{m}) is not a subfield of GF(p^{self.n})")
        pm = self.p**m
        return frozenset(a for a in range(self.q) if self.pow(a, pm) == a)

    def maximal_subfield_degrees(self):
        """Degrees m of maximal proper subfields GF(p^m), largest first."""
        degs = sorted({self.n // r for r in (2, 3) if self.n % r == 0}, reverse=True)
        return [m for m in degs if m < self.n]

    def embed_prime(self, c: int) -> int:
        """Code of the prime-subfield element c."""
        return self.encode([c % self.p] + [0] * (self.n - 1))

    def to_prime(self, a: int) -> int:
        """Inverse of embed_prime; raises if a is outside the prime subfield."""
        coeffs = self.decode(a)
        if any(coeffs[1:]):
            raise ValueError(f"element {a} is not in the prime subfield")
        return coeffs[0]

    def elements(self):
        return range(self.q)

    def __repr__(self):
        return f"FieldSpec(p={self.p}, n={self.n})"

    def __hash__(self):
        return hash((self.p, self.n))

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.p, self.n) == (other.p, other.n)


@functools.lru_cache(maxsize=None)
def ff_build(p: int, n: int = 1) -> FieldSpec:
    """Build (and cache) GF(p^n) with the canonical modulus."""
    return FieldSpec(p, n)


def ff_inv(a: int, F: FieldSpec) -> int:
    return F.inv(a)


def ff_is_square(a: int, F: FieldSpec) -> bool:
    return F.is_square(a)


def ff_sqrt(a: int, F: FieldSpec):
    return F.sqrt(a)
