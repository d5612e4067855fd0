"""Riemann, Hurwitz and Dedekind zeta values for Q and quadratic fields.

Every value goes through the Euler-Maclaurin formula for the Hurwitz zeta
function; a quadratic Dedekind zeta function is factored as
zeta(s) * L(s, chi_D) with chi_D the Kronecker symbol of the discriminant.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError, PoleError
from .specfun import gamma_factor, gamma_fn, sinpi

EULER_GAMMA = 0.57721566490153286061

_EM_TERMS = 40
_EM_CORRECTIONS = 12
# B_2, B_4, ..., B_26
_BERNOULLI = [
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30), Fraction(5, 66),
    Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510), Fraction(43867, 798),
    Fraction(-174611, 330), Fraction(854513, 138), Fraction(-236364091, 2730),
    Fraction(8553103, 6),
]
_EM_COEF = [float(_BERNOULLI[j] / math.factorial(2 * j + 2)) for j in range(_EM_CORRECTIONS)]


@dataclass(frozen=True)
class LaurentData:
    """zeta_F(s) = residue/(s-1) + constant + O(s-1)."""

    residue: float
    constant: float


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for n >= 1."""
    if n <= 0:
        raise DomainError("kronecker symbol needs n >= 1")
    result = 1
    while n % 2 == 0:
        n //= 2
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5):
            result = -result
    # Jacobi symbol (D/n), n odd
    a = D % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


class QuadraticCharacter:
    """chi_D(n) = (D/n) for a fundamental discriminant D."""

    def __init__(self, disc: int):
        if disc in (0, 1):
            raise DomainError("discriminant must differ from 0 and 1")
        self.disc = int(disc)
        self.modulus = abs(self.disc)
        self.values = tuple(kronecker(self.disc, a) if a else 0 for a in range(self.modulus))

    def __call__(self, n: int) -> int:
        return self.values[n % self.modulus]

    def __repr__(self):
        return f"QuadraticCharacter({self.disc})"


def _hurwitz_parts(s: complex, a: float):
    """Euler-Maclaurin pieces of zeta(s, a), with the pole term returned separately.

    zeta(s, a) = head + (N+a)^{1-s}/(s-1).
    """
    n = _EM_TERMS
    k = np.arange(n, dtype=float) + a
    head = complex(np.sum(k ** (-s)))
    x = n + a
    head += 0.5 * x ** (-s)
    # rising product s (s+1) ... (s+2j) / x^(s+2j+1)
    poch = s
    power = x ** (-s - 1)
    for j in range(_EM_CORRECTIONS):
        head += _EM_COEF[j] * poch * power
        poch *= (s + 2 * j + 1) * (s + 2 * j + 2)
        power /= x * x
    return head, x


def hurwitz_zeta(s: complex, a: float) -> complex:
    """zeta(s, a) = sum_{k>=0} (k+a)^{-s}, a > 0, s != 1."""
    s = complex(s)
    if s == 1:
        raise PoleError("Hurwitz zeta has a pole at s = 1")
    if a <= 0:
        raise DomainError("Hurwitz zeta needs a > 0")
    head, x = _hurwitz_parts(s, a)
    return head + x ** (1 - s) / (s - 1)


def riemann_zeta(s: complex) -> complex:
    """Riemann zeta function, s != 1."""
    s = complex(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    if s.real < -0.5:
        # the direct sum cancels badly left of the critical strip; reflect
        if s.imag == 0 and s.real == round(s.real) and int(s.real) % 2 == 0:
            return 0j
        g = complex(gamma_fn(1 - s))
        return 2**s * math.pi ** (s - 1) * complex(sinpi(s / 2)) * g * hurwitz_zeta(1 - s, 1.0)
    return hurwitz_zeta(s, 1.0)


def _expm1_ratio(t: complex) -> complex:
    # (e^t - 1)/t, stable near 0
    if t == 0:
        return 1.0
    # e^t - 1 = 2 e^{t/2} sinh(t/2) avoids cancellation for small t
    return 2 * cmath.exp(t / 2) * cmath.sinh(t / 2) / t


def dirichlet_L(s: complex, chi: QuadraticCharacter) -> complex:
    """L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q), entire for nontrivial chi."""
    s = complex(s)
    q = chi.modulus
    if s.real < -0.5:
        # Lambda(s) = (q/pi)^{(s+a)/2} Gamma((s+a)/2) L(s) is invariant under s -> 1-s
        a = 0 if chi(-1) == 1 else 1
        if s.imag == 0 and s.real == round(s.real) and (int(-s.real) - a) % 2 == 0:
            return 0j
        lam = (q / math.pi) ** ((1 - s + a) / 2) * complex(gamma_fn((1 - s + a) / 2)) * dirichlet_L(1 - s, chi)
        return lam / ((q / math.pi) ** ((s + a) / 2) * complex(gamma_fn((s + a) / 2)))
    total = 0j
    for a in range(1, q + 1):
        c = chi(a)
        if c == 0:
            continue
        head, x = _hurwitz_parts(s, a / q)
        # x^{1-s}/(s-1) = -log x * (e^{(1-s) log x} - 1)/((1-s) log x) - 1/(1-s);
        # the constant pieces cancel since sum chi(a) = 0
        lx = math.log(x)
        total += c * (head - lx * _expm1_ratio((1 - s) * lx))
    return q ** (-s) * total


def character_of(F) -> QuadraticCharacter:
    return _character(F.disc)


@lru_cache(maxsize=None)
def _character(disc):
    return QuadraticCharacter(disc)


def dedekind_zeta(F, s: complex) -> complex:
    """Dedekind zeta of Q or a quadratic field, s != 1."""
    s = complex(s)
    if s == 1:
        raise PoleError("Dedekind zeta has a pole at s = 1")
    z = riemann_zeta(s)
    if F.degree == 1:
        return z
    return z * dirichlet_L(s, character_of(F))


def _richardson_derivative(f, x, h=1e-3):
    def central(step):
        return (f(x + step) - f(x - step)) / (2 * step)

    return (4 * central(h / 2) - central(h)) / 3


@lru_cache(maxsize=None)
def _laurent_quadratic(disc):
    chi = _character(disc)
    L1 = dirichlet_L(1.0, chi).real
    dL = _richardson_derivative(lambda x: dirichlet_L(x, chi).real, 1.0)
    return LaurentData(L1, EULER_GAMMA * L1 + dL)


def laurent_at_1(F) -> LaurentData:
    """Residue and constant term of zeta_F at s = 1."""
    if F.degree == 1:
        return LaurentData(1.0, EULER_GAMMA)
    return _laurent_quadratic(F.disc)


def field_gamma(F, s: complex) -> complex:
    """Product of the archimedean gamma factors of F."""
    r1, r2 = F.signature
    return gamma_factor(s, "real") ** r1 * gamma_factor(s, "complex") ** r2


def functional_equation_residual(F, s: complex) -> float:
    """Relative mismatch of N(D)^{s/2} zeta_F(s) gamma_F(s) against its value at 1-s."""
    s = complex(s)
    nd = abs(F.disc)
    lhs = nd ** (s / 2) * dedekind_zeta(F, s) * field_gamma(F, s)
    rhs = nd ** ((1 - s) / 2) * dedekind_zeta(F, 1 - s) * field_gamma(F, 1 - s)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
