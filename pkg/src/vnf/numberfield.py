"""Exact arithmetic in Q and quadratic fields Q(sqrt d).

Elements are a + b*w in the integral basis {1, w}, with w = sqrt(d) when
d = 2, 3 (mod 4) and w = (1 + sqrt(d))/2 when d = 1 (mod 4).  Then
w^2 = t*w - n with (t, n) = (0, -d) or (1, (1 - d)/4).

Fractional ideals are stored as q * (Z*a + Z*(b + w)) with q a positive
rational and integers 0 <= b < a.  Pulling the content of the w-coefficient
into q makes this representation unique, so ideal equality is structural.
Over Q an ideal is just a positive rational generator q (with a = 1, b = 0).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import (
    ConfigError,
    DisallowedD,
    FactorizationOverflow,
    HenselFailure,
    NonIntegralIdeal,
    NonSquarefree,
    RegionUnbounded,
    ZeroIdeal,
    ZeroInput,
)

_FACTOR_LIMIT = 2**63


# ---------------------------------------------------------------------------
# integer helpers


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for p in small:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    # deterministic for n < 3.3e24 with these bases
    for a in small:
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


@lru_cache(maxsize=1 << 16)
def factor_int(n: int) -> tuple:
    """Prime factorization of a positive integer as ((p, e), ...), increasing p."""
    n = int(n)
    if n <= 0:
        raise ZeroInput("factor_int needs a positive integer")
    if n >= _FACTOR_LIMIT:
        raise FactorizationOverflow(f"{n} exceeds 2^63")
    out = []
    for p in (2, 3, 5):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    p = 7
    steps = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while p * p <= n and p <= 1_000_000:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += steps[i]
        i = (i + 1) % 8
    if n > 1:
        if p * p > n or _is_probable_prime(n):
            out.append((n, 1))
        else:
            # beyond trial-division range and composite: defer to sympy
            from sympy import factorint

            out.extend(sorted(factorint(n).items()))
    return tuple(sorted(out))


def _vp(x: int, p: int) -> int:
    if x == 0:
        raise ZeroInput("valuation of zero")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _vp_frac(x: Fraction, p: int) -> int:
    return _vp(x.numerator, p) - _vp(x.denominator, p)


def _primes_of(x: Fraction) -> set:
    out = set()
    for part in (abs(x.numerator), x.denominator):
        if part > 1:
            out.update(p for p, _ in factor_int(part))
    return out


def _is_squarefree(d: int) -> bool:
    return all(e == 1 for _, e in factor_int(abs(d)))


# ---------------------------------------------------------------------------
# fields and elements


@dataclass(frozen=True)
class FieldDescriptor:
    kind: str
    d: int | None
    disc: int
    t: int
    n: int
    signature: tuple

    @property
    def degree(self) -> int:
        return self.signature[0] + 2 * self.signature[1]

    @property
    def is_rational(self) -> bool:
        return self.kind == "rational"

    @property
    def places(self) -> tuple:
        r1, r2 = self.signature
        return ("real",) * r1 + ("complex",) * r2

    def element(self, a, b=0) -> "FieldElement":
        return FieldElement(self, Fraction(a), Fraction(b))

    @property
    def omega_values(self):
        """Embeddings of w in the fixed place order."""
        if self.is_rational:
            return ()
        if self.d > 0:
            r = math.sqrt(self.d)
            return ((self.t + r) / 2 if self.t else r, (self.t - r) / 2 if self.t else -r)
        r = 1j * math.sqrt(-self.d)
        return ((self.t + r) / 2 if self.t else r,)

    def label(self) -> str:
        return "Q" if self.is_rational else f"Q(sqrt,{self.d})"

    def __repr__(self):
        return f"FieldDescriptor({self.label()})"


def make_field(spec) -> FieldDescriptor:
    """Build Q or Q(sqrt d) from a dict ({"kind": ..., "d": ...}) or a string ("Q", "Q(sqrt,d)")."""
    if isinstance(spec, FieldDescriptor):
        return spec
    if isinstance(spec, str):
        spec = parse_field(spec)
    kind = spec.get("kind", "quadratic" if "d" in spec else "rational")
    if kind == "rational":
        return FieldDescriptor("rational", None, 1, 0, 0, (1, 0))
    if kind != "quadratic":
        raise ConfigError(f"unknown field kind {kind!r}")
    try:
        d = int(spec["d"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("quadratic field needs an integer d") from exc
    if d in (0, 1):
        raise DisallowedD(f"d = {d} does not define a quadratic field")
    if not _is_squarefree(d):
        raise NonSquarefree(f"d = {d} is not squarefree")
    if d % 4 == 1:
        t, n, disc = 1, (1 - d) // 4, d
    else:
        t, n, disc = 0, -d, 4 * d
    return FieldDescriptor("quadratic", d, disc, t, n, (2, 0) if d > 0 else (0, 1))


_FIELD_RE = re.compile(r"^\s*Q\s*\(\s*sqrt\s*,\s*([+-]?\d+)\s*\)\s*$", re.I)


def parse_field(text: str) -> dict:
    text = text.strip()
    if text.upper() == "Q":
        return {"kind": "rational"}
    m = _FIELD_RE.match(text)
    if not m:
        raise ConfigError(f"cannot parse field {text!r}; use 'Q' or 'Q(sqrt,d)'")
    return {"kind": "quadratic", "d": int(m.group(1))}


@dataclass(frozen=True)
class FieldElement:
    F: FieldDescriptor = field(repr=False)
    a: Fraction
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.F.is_rational and self.b != 0:
            raise ConfigError("elements of Q have no w-component")

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            return other
        return FieldElement(self.F, Fraction(other), Fraction(0))

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement(self.F, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.F, -self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        F = self.F
        bd = self.b * o.b
        return FieldElement(F, self.a * o.a - F.n * bd, self.a * o.b + self.b * o.a + F.t * bd)

    __rmul__ = __mul__

    def conj(self):
        return FieldElement(self.F, self.a + self.b * self.F.t, -self.b)

    def norm(self) -> Fraction:
        F = self.F
        return self.a * self.a + self.a * self.b * F.t + self.b * self.b * F.n

    def trace(self) -> Fraction:
        return 2 * self.a + self.b * self.F.t if not self.F.is_rational else self.a

    def inverse(self):
        if self.is_zero():
            raise ZeroInput("inverse of zero")
        if self.F.is_rational:
            return FieldElement(self.F, 1 / self.a)
        nm = self.norm()
        c = self.conj()
        return FieldElement(self.F, c.a / nm, c.b / nm)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __str__(self):
        if self.F.is_rational:
            return str(self.a)
        return f"{self.a}+{self.b}*w"


_RAT = r"[+-]?\s*\d+(?:\s*/\s*\d+)?"


def parse_rational(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if isinstance(text, float):
        raise ConfigError("use exact rationals (e.g. '1/3'), not floats, for field data")
    try:
        return Fraction(str(text).replace(" ", ""))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse rational {text!r}") from exc


def parse_element(F: FieldDescriptor, text) -> FieldElement:
    """Parse 'a', 'a+b*w', 'b*w', 'w', '-1/2 + 3/4*w' into a FieldElement."""
    if isinstance(text, FieldElement):
        return text
    if isinstance(text, (int, Fraction)):
        return F.element(text)
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return F.element(parse_rational(text[0]), parse_rational(text[1]))
    s = str(text).replace(" ", "")
    if not s:
        raise ConfigError("empty element literal")
    a = Fraction(0)
    b = Fraction(0)
    for sign, body in re.findall(r"([+-]?)([^+-]+)", s):
        neg = sign == "-"
        if body.endswith("w"):
            coef = body[:-1].rstrip("*")
            val = parse_rational(coef) if coef else Fraction(1)
            b += -val if neg else val
        else:
            val = parse_rational(body)
            a += -val if neg else val
    if re.sub(r"([+-]?)([^+-]+)", "", s):
        raise ConfigError(f"cannot parse element {text!r}")
    return F.element(a, b)


# ---------------------------------------------------------------------------
# 2D Hermite normal form


def _egcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _hnf(vectors):
    """Basis (a, 0), (b, c) of the Z-span of integer vectors (x, y) (meaning x + y*w)."""
    pivot = None
    xs = []
    for x, y in vectors:
        if y == 0:
            if x:
                xs.append(x)
            continue
        if pivot is None:
            pivot = (x, y)
            continue
        px, py = pivot
        g, u, v = _egcd(py, y)
        new = (u * px + v * x, g)
        xs.append((y // g) * px - (py // g) * x)
        pivot = new
    if pivot is None:
        raise ZeroIdeal("generators span a rank-1 module; not an ideal")
    a = 0
    for x in xs:
        a = math.gcd(a, x)
    if a == 0:
        raise ZeroIdeal("generators span a rank-1 module; not an ideal")
    px, py = pivot
    if py < 0:
        px, py = -px, -py
    return a, px % a, py


# ---------------------------------------------------------------------------
# ideals


@dataclass(frozen=True)
class FractionalIdeal:
    F: FieldDescriptor = field(repr=False)
    scale: Fraction
    a: int = 1
    b: int = 0

    @property
    def hnf(self):
        return (self.a, self.b, 1)

    def basis(self):
        """Z-basis (q*a, q*(b + w)) as FieldElements (for Q: (q,))."""
        if self.F.is_rational:
            return (self.F.element(self.scale),)
        return (self.F.element(self.scale * self.a), self.F.element(self.scale * self.b, self.scale))

    def norm(self) -> Fraction:
        if self.F.is_rational:
            return self.scale
        return self.scale * self.scale * self.a

    def is_integral(self) -> bool:
        if self.F.is_rational:
            return self.scale.denominator == 1
        q = self.scale
        return (q * self.a).denominator == 1 and (q * self.b).denominator == 1 and q.denominator == 1

    def contains(self, x: FieldElement) -> bool:
        if x.is_zero():
            return True
        if self.F.is_rational:
            return (x.a / self.scale).denominator == 1
        nb = x.b / self.scale
        if nb.denominator != 1:
            return False
        m = (x.a / self.scale - nb * self.b) / self.a
        return m.denominator == 1

    def __mul__(self, other):
        return mul(self, other)

    def __str__(self):
        if self.F.is_rational:
            return f"({self.scale})"
        return f"{self.scale}*[{self.a}, {self.b}+w]"


def ideal_from_generators(F: FieldDescriptor, gens) -> FractionalIdeal:
    """The O-ideal generated by a list of FieldElements."""
    gens = [parse_element(F, g) for g in gens]
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise ZeroIdeal("the zero ideal is not a fractional ideal")
    if F.is_rational:
        num = 0
        den = 1
        for g in gens:
            den = den * g.a.denominator // math.gcd(den, g.a.denominator)
        for g in gens:
            num = math.gcd(num, int(g.a * den))
        return FractionalIdeal(F, Fraction(abs(num), den))
    w = F.element(0, 1)
    elems = []
    for g in gens:
        elems.extend([g, g * w])
    den = 1
    for e in elems:
        for c in (e.a, e.b):
            den = den * c.denominator // math.gcd(den, c.denominator)
    vecs = [(int(e.a * den), int(e.b * den)) for e in elems]
    a, b, c = _hnf(vecs)
    if a % c or b % c:
        raise ZeroIdeal("generators do not span an O-module")  # cannot happen for O-ideals
    return FractionalIdeal(F, Fraction(c, den), a // c, (b // c) % (a // c))


def from_element(x: FieldElement) -> FractionalIdeal:
    return ideal_from_generators(x.F, [x])


def unit_ideal(F: FieldDescriptor) -> FractionalIdeal:
    return FractionalIdeal(F, Fraction(1), 1, 0)


def mul(I: FractionalIdeal, J: FractionalIdeal) -> FractionalIdeal:
    if I.F.is_rational:
        return FractionalIdeal(I.F, I.scale * J.scale)
    gens = [x * y for x in I.basis() for y in J.basis()]
    return ideal_from_generators(I.F, gens)


def inverse(I: FractionalIdeal) -> FractionalIdeal:
    if I.F.is_rational:
        return FractionalIdeal(I.F, 1 / I.scale)
    nrm = I.norm()
    return ideal_from_generators(I.F, [x.conj() / nrm for x in I.basis()])


def norm(I: FractionalIdeal) -> Fraction:
    return I.norm()


def equals(I: FractionalIdeal, J: FractionalIdeal) -> bool:
    return I == J


def power(I: FractionalIdeal, k: int) -> FractionalIdeal:
    out = unit_ideal(I.F)
    base = I if k >= 0 else inverse(I)
    for _ in range(abs(k)):
        out = mul(out, base)
    return out


def scale_ideal(I: FractionalIdeal, x: FieldElement) -> FractionalIdeal:
    """The ideal x*I."""
    if x.is_zero():
        raise ZeroIdeal("scaling by zero")
    if I.F.is_rational:
        return FractionalIdeal(I.F, abs(x.a) * I.scale)
    return ideal_from_generators(I.F, [x * g for g in I.basis()])


def different(F: FieldDescriptor) -> FractionalIdeal:
    """The different ideal (sqrt(disc))."""
    if F.is_rational:
        return unit_ideal(F)
    return from_element(sqrt_disc(F))


def sqrt_disc(F: FieldDescriptor) -> FieldElement:
    return F.element(-F.t, 2)


def parse_ideal(F: FieldDescriptor, text) -> FractionalIdeal:
    """Ideal literal: generator list '(g1, g2, ...)' or HNF triple 'hnf:q,a,b,c'."""
    if isinstance(text, FractionalIdeal):
        return text
    if isinstance(text, dict):
        if "hnf" in text:
            q = parse_rational(text.get("scale", 1))
            a, b, c = (int(v) for v in text["hnf"])
            return _from_hnf(F, q, a, b, c)
        return ideal_from_generators(F, text["generators"])
    if isinstance(text, (list, tuple)):
        return ideal_from_generators(F, list(text))
    s = str(text).strip()
    if s.lower().startswith("hnf:"):
        parts = [p for p in s[4:].split(",")]
        if len(parts) != 4:
            raise ConfigError("HNF ideal literal is 'hnf:q,a,b,c'")
        return _from_hnf(F, parse_rational(parts[0]), *(int(p) for p in parts[1:]))
    if not (s.startswith("(") and s.endswith(")")):
        raise ConfigError(f"cannot parse ideal {text!r}; use '(g1,g2,...)' or 'hnf:q,a,b,c'")
    body = s[1:-1]
    gens = [g for g in body.split(",") if g.strip()]
    if not gens:
        raise ConfigError("ideal needs at least one generator")
    return ideal_from_generators(F, [parse_element(F, g) for g in gens])


def _from_hnf(F, q, a, b, c):
    if a <= 0 or c <= 0 or q <= 0:
        raise ConfigError("HNF needs q, a, c > 0")
    if F.is_rational:
        return FractionalIdeal(F, q * a)
    I = ideal_from_generators(F, [F.element(q * a), F.element(q * b, q * c)])
    if I.norm() != q * q * a * c:
        raise ConfigError("HNF triple does not describe an O-ideal")
    return I


# ---------------------------------------------------------------------------
# primes


@dataclass(frozen=True)
class PrimeIdealData:
    p: int
    kind: str  # rational | split_plus | split_minus | inert | ramified
    f: int
    root: int | None = None  # root of the minimal polynomial of w mod p

    @property
    def e(self) -> int:
        return 2 if self.kind == "ramified" else 1

    @property
    def norm(self) -> int:
        return self.p**self.f

    def label(self) -> str:
        if self.kind in ("rational", "inert"):
            return f"({self.p})"
        return f"({self.p}, w-{self.root})"


def _roots_mod_p(F, p):
    # roots of X^2 - t X + n mod p
    if p < 64:
        return sorted(r for r in range(p) if (r * r - F.t * r + F.n) % p == 0)
    from sympy.ntheory import sqrt_mod

    # complete the square: (2X - t)^2 = t^2 - 4n = disc
    inv2 = pow(2, -1, p)
    sq = sqrt_mod(F.disc % p, p, all_roots=True) or []
    return sorted({(r + F.t) * inv2 % p for r in sq})


def primes_above(F: FieldDescriptor, p: int) -> tuple:
    """Prime ideals above the rational prime p, in a fixed order."""
    return _primes_above(F, int(p))


@lru_cache(maxsize=None)
def _primes_above(F, p):
    if F.is_rational:
        return (PrimeIdealData(p, "rational", 1),)
    from .zeta import kronecker

    k = kronecker(F.disc, p)
    if k == -1:
        return (PrimeIdealData(p, "inert", 2),)
    roots = _roots_mod_p(F, p)
    if k == 0:
        return (PrimeIdealData(p, "ramified", 1, roots[0]),)
    return (PrimeIdealData(p, "split_plus", 1, roots[0]), PrimeIdealData(p, "split_minus", 1, roots[1]))


def prime_ideal(F: FieldDescriptor, P: PrimeIdealData) -> FractionalIdeal:
    if F.is_rational or P.kind == "inert":
        return from_element(F.element(P.p))
    return ideal_from_generators(F, [F.element(P.p), F.element(-P.root, 1)])


def _ord_integral_primitive(F, A: int, B: int, P: PrimeIdealData) -> int:
    """ord_P(A + B w) for integers with p not dividing both."""
    if P.kind == "inert":
        return 0
    nrm = A * A + A * B * F.t + B * B * F.n
    if nrm == 0:
        raise ZeroInput("valuation of zero")
    if P.kind == "ramified":
        return _vp(nrm, P.p)
    if (A + B * P.root) % P.p:
        return 0
    return _vp(nrm, P.p)


def ord_v(x, P: PrimeIdealData) -> int:
    """Additive valuation at the prime P of an element or a fractional ideal."""
    if isinstance(x, FractionalIdeal):
        return _ord_ideal(x, P)
    if x.is_zero():
        raise ZeroInput("ord of zero")
    F = x.F
    p = P.p
    if F.is_rational:
        return _vp_frac(x.a, p)
    # x = (A + B w)/den; pull out the common p-power
    den = x.a.denominator * x.b.denominator // math.gcd(x.a.denominator, x.b.denominator)
    A = int(x.a * den)
    B = int(x.b * den)
    m = min(_vp(A, p) if A else 10**9, _vp(B, p) if B else 10**9)
    A //= p**m
    B //= p**m
    return P.e * (m - _vp(den, p)) + _ord_integral_primitive(F, A, B, P)


def _ord_ideal(I: FractionalIdeal, P: PrimeIdealData) -> int:
    if I.F.is_rational:
        return _vp_frac(I.scale, P.p)
    e = P.e
    base = e * _vp_frac(I.scale, P.p)
    # primitive part Z a + Z (b + w): minimum over the two generators
    v1 = e * _vp(I.a, P.p)
    v2 = _ord_integral_primitive(I.F, I.b, 1, P)
    return base + min(v1, v2)


def factor_ideal(F: FieldDescriptor, I: FractionalIdeal):
    """[(PrimeIdealData, exponent), ...] with nonzero exponents, sorted by p."""
    out = []
    for p in sorted(_primes_of(I.norm())):
        for P in primes_above(F, p):
            k = _ord_ideal(I, P)
            if k:
                out.append((P, k))
    return out


# ---------------------------------------------------------------------------
# divisor function


def _tau_prime_power(P_norm: int, k: int, s: complex) -> complex:
    # sum_{j=0}^k N(P)^{(2j-k) s}; symmetric so pairs combine into cosh terms
    if k == 0 or s == 0:
        return complex(k + 1)
    ls = math.log(P_norm) * s
    total = 0j
    for j in range(k + 1):
        total += np.exp((2 * j - k) * ls)
    return complex(total)


def tau_from_exponents(exps, s: complex) -> complex:
    """tau_s from [(N(P), k), ...]."""
    out = 1 + 0j
    for nP, k in exps:
        out *= _tau_prime_power(nP, k, s)
    return out


def tau_s(F: FieldDescriptor, I: FractionalIdeal, s: complex) -> complex:
    """tau_s(n) = N(n)^{-s} sum_{d | n} N(d)^{2s} for an integral ideal n."""
    fac = factor_ideal(F, I)
    if any(k < 0 for _, k in fac):
        raise NonIntegralIdeal("tau_s needs an integral ideal")
    return tau_from_exponents([(P.norm, k) for P, k in fac], complex(s))


# ---------------------------------------------------------------------------
# dual data


@dataclass(frozen=True)
class DualData:
    S: tuple
    b_ideal: FractionalIdeal


def dual_data(F: FieldDescriptor, zeta: FieldElement, a: FractionalIdeal) -> DualData:
    """S = {v : ord_v(zeta) < ord_v(a)} and b = a^{-1} prod_{v in S} P_v^{2 ord_v(a/zeta)}."""
    zeta = parse_element(F, zeta)
    ainv = inverse(a)
    if zeta.is_zero():
        return DualData((), ainv)
    cand = set()
    for c in (zeta.a, zeta.b, zeta.norm(), a.norm()):
        if c:
            cand |= _primes_of(c)
    S = []
    b = ainv
    for p in sorted(cand):
        for P in primes_above(F, p):
            oz = ord_v(zeta, P)
            oa = _ord_ideal(a, P)
            if oz < oa:
                S.append(P)
                b = mul(b, power(prime_ideal(F, P), 2 * (oa - oz)))
    return DualData(tuple(S), b)


# ---------------------------------------------------------------------------
# embeddings and lattices


def embed(F: FieldDescriptor, x: FieldElement):
    """Point of F_infinity: one real per real place, one complex per complex place."""
    if F.is_rational:
        return (float(x.a),)
    w = F.omega_values
    if F.d > 0:
        v1 = float(x.a) + float(x.b) * w[0]
        v2 = float(x.a) + float(x.b) * w[1]
        # recover the small conjugate from the exact norm to avoid cancellation
        if abs(v1) < abs(v2) and v2 != 0:
            v1 = float(x.norm()) / v2
        elif abs(v2) < abs(v1):
            v2 = float(x.norm()) / v1
        return (v1, v2)
    return (complex(float(x.a)) + float(x.b) * w[0],)


def basis_embedding(F: FieldDescriptor, I: FractionalIdeal) -> np.ndarray:
    """Real 2x2 (or 1x1) matrix whose columns embed the Z-basis of I.

    Rows: the real embeddings (real quadratic), or Re/Im (imaginary quadratic).
    """
    if F.is_rational:
        return np.array([[float(I.scale)]])
    e1, e2 = I.basis()
    if F.d > 0:
        return np.array([embed(F, e1), embed(F, e2)]).T
    z1, z2 = embed(F, e1)[0], embed(F, e2)[0]
    return np.array([[z1.real, z2.real], [z1.imag, z2.imag]])


def lattice_coords(F: FieldDescriptor, I: FractionalIdeal, region):
    """Integer coefficient pairs (m, n) of nonzero lattice points m*e1 + n*e2 in region.

    region: for Q, a list of intervals [(lo, hi), ...];
    real quadratic: a pair of per-place interval lists;
    imaginary quadratic: an annulus (rmin, rmax).
    Returns (m, n, points) with points the embeddings, shape (k,) or (k, 2).
    """
    if F.is_rational:
        q = float(I.scale)
        ms = []
        for lo, hi in _intervals(region):
            lo_m = math.ceil(lo / q - 1e-12)
            hi_m = math.floor(hi / q + 1e-12)
            ms.append(np.arange(lo_m, hi_m + 1, dtype=np.int64))
        m = np.unique(np.concatenate(ms)) if ms else np.zeros(0, dtype=np.int64)
        m = m[m != 0]
        qi = I.scale
        pts = m * float(qi)
        return m, np.zeros_like(m), pts
    M = basis_embedding(F, I)
    e1 = float(I.scale * I.a)  # rational, same at every place
    if F.d > 0:
        iv1 = _intervals(region[0])
        iv2 = _intervals(region[1])
        lo1, hi1 = min(l for l, _ in iv1), max(h for _, h in iv1)
        lo2, hi2 = min(l for l, _ in iv2), max(h for _, h in iv2)
        # y1 - y2 = n * (e2_1 - e2_2)
        diff = M[0, 1] - M[1, 1]
        n_lo, n_hi = sorted(((lo1 - hi2) / diff, (hi1 - lo2) / diff))
        n = np.arange(math.floor(n_lo) - 1, math.ceil(n_hi) + 2, dtype=np.int64)
        if n.size > 50_000_000:
            raise RegionUnbounded("region too large to enumerate")
        mlo = np.maximum((lo1 - n * M[0, 1]) / e1, (lo2 - n * M[1, 1]) / e1)
        mhi = np.minimum((hi1 - n * M[0, 1]) / e1, (hi2 - n * M[1, 1]) / e1)
        m, n = _expand(np.ceil(mlo - 1e-9).astype(np.int64), np.floor(mhi + 1e-9).astype(np.int64), n)
        y1 = m * M[0, 0] + n * M[0, 1]
        y2 = m * M[1, 0] + n * M[1, 1]
        keep = _in_intervals(y1, iv1) & _in_intervals(y2, iv2) & ((m != 0) | (n != 0))
        return m[keep], n[keep], np.stack([y1[keep], y2[keep]], axis=1)
    rmin, rmax = region
    if not math.isfinite(rmax):
        raise RegionUnbounded("annulus must be bounded")
    # Im(y) = n * Im(e2)
    im2 = M[1, 1]
    nmax = math.floor(rmax / abs(im2) + 1e-9)
    n = np.arange(-nmax, nmax + 1, dtype=np.int64)
    re_off = n * M[0, 1]
    half = np.sqrt(np.maximum(rmax * rmax - (n * im2) ** 2, 0.0))
    mlo = np.ceil((-half - re_off) / e1 - 1e-9).astype(np.int64)
    mhi = np.floor((half - re_off) / e1 + 1e-9).astype(np.int64)
    m, n = _expand(mlo, mhi, n)
    z = (m * M[0, 0] + n * M[0, 1]) + 1j * (n * M[1, 1])
    r = np.abs(z)
    keep = (r >= rmin) & (r <= rmax) & ((m != 0) | (n != 0))
    return m[keep], n[keep], z[keep]


def _intervals(spec):
    if isinstance(spec, tuple) and len(spec) == 2 and not isinstance(spec[0], (tuple, list)):
        spec = [spec]
    out = []
    for lo, hi in spec:
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise RegionUnbounded("interval bounds must be finite")
        out.append((float(lo), float(hi)))
    if not out:
        raise RegionUnbounded("empty region specification")
    return out


def _in_intervals(x, ivs):
    keep = np.zeros(x.shape, dtype=bool)
    for lo, hi in ivs:
        keep |= (x >= lo) & (x <= hi)
    return keep


def _expand(mlo, mhi, n):
    cnt = np.maximum(mhi - mlo + 1, 0)
    total = int(cnt.sum())
    nn = np.repeat(n, cnt)
    starts = np.repeat(mlo, cnt)
    offs = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    return starts + offs, nn


def coords_to_element(F: FieldDescriptor, I: FractionalIdeal, m: int, n: int) -> FieldElement:
    if F.is_rational:
        return F.element(I.scale * int(m))
    q = I.scale
    return F.element(q * (int(m) * I.a + int(n) * I.b), q * int(n))


def lattice_points(F: FieldDescriptor, I: FractionalIdeal, region):
    """Nonzero elements of I whose embedding lies in region, lexicographic in (n, m)."""
    m, n, _ = lattice_coords(F, I, region)
    order = np.lexsort((m, n))
    return [coords_to_element(F, I, m[i], n[i]) for i in order]


# ---------------------------------------------------------------------------
# additive characters


def _e(x: Fraction) -> complex:
    """e(x) = exp(2 pi i x) after exact reduction mod 1."""
    r = x - math.floor(x)
    if r == 0:
        return 1 + 0j
    if r == Fraction(1, 2):
        return -1 + 0j
    if r == Fraction(1, 4):
        return 1j
    if r == Fraction(3, 4):
        return -1j
    ang = 2 * math.pi * float(r)
    return complex(math.cos(ang), math.sin(ang))


def psi_infty(F: FieldDescriptor, x: FieldElement) -> complex:
    """e(-Tr x)."""
    return _e(-x.trace())


def padic_frac(x: Fraction, p: int) -> Fraction:
    """p-adic fractional part {x}_p in [0, 1) with denominator a power of p."""
    den = x.denominator
    k = _vp(den, p)
    if k == 0:
        return Fraction(0)
    pk = p**k
    rest = den // pk
    num = x.numerator * pow(rest, -1, pk) % pk
    return Fraction(num, pk)


@lru_cache(maxsize=4096)
def hensel_root(F: FieldDescriptor, p: int, r0: int, k: int) -> int:
    """Lift a simple root r0 of X^2 - t X + n mod p to a root mod p^k."""
    mod = p
    r = r0 % p
    fp = (2 * r - F.t) % p
    if fp == 0:
        raise HenselFailure(f"root {r0} mod {p} is not simple")
    while mod < p**k:
        mod = min(mod * mod, p**k)
        f = r * r - F.t * r + F.n
        df = 2 * r - F.t
        r = (r - f * pow(df, -1, mod)) % mod
    if (r * r - F.t * r + F.n) % p**k:
        raise HenselFailure(f"Hensel lift failed for p = {p}")
    return r


# test hook: flips the sign of every finite local character (mutation testing)
_PSI_SIGN = {"flip": False}


def _local_trace_frac(F: FieldDescriptor, x: FieldElement, P: PrimeIdealData, extra: int = 0) -> Fraction:
    p = P.p
    if F.is_rational:
        return padic_frac(x.a, p)
    if P.kind in ("inert", "ramified"):
        return padic_frac(x.trace(), p)
    k0 = max(_vp(x.a.denominator, p), _vp(x.b.denominator, p))
    if k0 == 0:
        return Fraction(0)
    k = k0 + _vp(abs(F.disc), p) + 2 + extra
    r = hensel_root(F, p, P.root, k)
    M = p**k0
    # p^k0 (a + b w_p) is a p-adic integer; reduce it mod p^k0
    aa = x.a * M
    bb = x.b * M
    va = aa.numerator * pow(aa.denominator, -1, M) % M
    vb = bb.numerator * pow(bb.denominator, -1, M) % M
    return Fraction((va + vb * r) % M, M)


def psi_local(F: FieldDescriptor, x: FieldElement, P: PrimeIdealData) -> complex:
    """psi_v(x) = e({Tr_v x}_p) at a finite place."""
    frac = _local_trace_frac(F, x, P)
    if P.kind.startswith("split"):
        # raising the lifting precision must not change the answer
        if _local_trace_frac(F, x, P, extra=2) != frac:
            raise HenselFailure(f"local trace at {P.label()} is not stable under lifting")
    if _PSI_SIGN["flip"]:
        frac = -frac
    return _e(frac)


def psi_S(F: FieldDescriptor, x: FieldElement, S) -> complex:
    """Product of the local characters psi_v(x) over v in S."""
    if not S:
        return 1 + 0j
    if x.is_zero():
        raise ZeroInput("psi_S argument is zero")
    out = 1 + 0j
    for P in S:
        out *= psi_local(F, x, P)
    return out


def psi_S_multiples(F: FieldDescriptor, r: Fraction, ms, S) -> np.ndarray:
    """psi_S(r m) for a rational r and an integer array m (field Q only).

    Exact: the p-adic fractional part of r m only depends on m mod p^k.
    """
    if not F.is_rational:
        raise DomainError("psi_S_multiples is for the rational field")
    ms = np.asarray(ms, dtype=np.int64)
    if np.any(ms == 0):
        raise ZeroInput("psi_S argument is zero")
    r = Fraction(r)
    num = np.zeros(ms.shape, dtype=np.int64)
    den = 1
    for P in S:
        p = P.p
        k = _vp(r.denominator, p)
        if k == 0:
            continue
        pk = p**k
        c = r.numerator * pow(r.denominator // pk, -1, pk) % pk
        local = (c * (ms % pk)) % pk
        # accumulate over a common denominator (distinct primes)
        num = num * pk + local * den
        den *= pk
    num %= den
    if _PSI_SIGN["flip"]:
        num = (-num) % den
    table = {v: _e(Fraction(int(v), den)) for v in np.unique(num)}
    return np.array([table[v] for v in num], dtype=complex)


def psi_S_phase(F: FieldDescriptor, x: FieldElement, S) -> Fraction:
    """Exact phase (mod 1) of psi_S(x)."""
    total = Fraction(0)
    for P in S:
        total += _local_trace_frac(F, x, P)
    return total - math.floor(total)


def bad_places(F: FieldDescriptor, x: FieldElement) -> tuple:
    """Finite places where psi_v(x) can be nontrivial (p dividing a denominator of x)."""
    primes = set()
    for c in (x.a, x.b):
        if c.denominator > 1:
            primes |= {p for p, _ in factor_int(c.denominator)}
    if not F.is_rational:
        primes |= {p for p, _ in factor_int(abs(F.disc))}
    out = []
    for p in sorted(primes):
        out.extend(primes_above(F, p))
    return tuple(out)


def global_character(F: FieldDescriptor, x: FieldElement) -> complex:
    """prod over all places of psi_v(x); equals 1 for x in F."""
    return psi_infty(F, x) * psi_S(F, x, bad_places(F, x)) if not x.is_zero() else 1 + 0j
