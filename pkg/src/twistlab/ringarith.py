"""Ideal arithmetic for the base field.

Supports Q (mandatory) and class-number-one real/imaginary quadratic fields
Q(sqrt(d)) described by a squarefree d.  Prime ideals are classified by their
splitting behaviour; ideals are kept in a canonical factored form so that
enumeration order (norm ascending, split-before-inert, generator-lexicographic)
is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import gmpy2
import numpy as np


class ConfigurationError(ValueError):
    """Unsupported field / missing certificate."""


class DomainError(ValueError):
    """Arguments outside an operation's domain."""


# ---------------------------------------------------------------------------
# fields


@dataclass(frozen=True)
class BaseField:
    """The base number field F.

    zeta_residue is A(F) = Res_{w=1} zeta_F(w); class_number_over_S is the
    class number of the S-integers (must be 1, per the S-inversion setup).
    """

    kind: str  # "rational" | "quadratic"
    d: int = 0  # squarefree parameter for quadratic fields
    discriminant: int = 1
    zeta_residue: float = 1.0
    class_number_over_S: int = 1

    def __post_init__(self):
        if self.kind not in ("rational", "quadratic"):
            raise ConfigurationError(f"unsupported field kind: {self.kind}")
        if self.class_number_over_S != 1:
            raise ConfigurationError("class number over S must be 1")
        if self.kind == "quadratic":
            d = self.d
            if d in (0, 1) or _has_square_factor(abs(d)):
                raise ConfigurationError(f"quadratic parameter must be squarefree != 0,1: {d}")
            expected = d if d % 4 == 1 else 4 * d
            if self.discriminant != expected:
                raise ConfigurationError("discriminant inconsistent with d")
        elif self.discriminant != 1:
            raise ConfigurationError("rational field has discriminant 1")


def rational_field() -> BaseField:
    return BaseField(kind="rational")


def quadratic_field(d: int, zeta_residue: float) -> BaseField:
    disc = d if d % 4 == 1 else 4 * d
    return BaseField(kind="quadratic", d=d, discriminant=disc, zeta_residue=zeta_residue)


def _has_square_factor(n: int) -> bool:
    m = n
    p = 2
    while p * p <= m:
        if m % (p * p) == 0:
            return True
        while m % p == 0:
            m //= p
        p += 1
    return False


# ---------------------------------------------------------------------------
# prime ideals and ideals

_TAG_RANK = {"rational": 0, "split": 0, "ramified": 1, "inert": 2}


@dataclass(frozen=True, order=False)
class PrimeIdealRec:
    norm: int
    p: int  # residue characteristic
    tag: str  # rational | split | inert | ramified
    gen: str  # generator descriptor, lexicographic tiebreaker

    def sort_key(self):
        return (self.norm, _TAG_RANK[self.tag], self.gen)

    def __lt__(self, other: "PrimeIdealRec"):
        return self.sort_key() < other.sort_key()


@dataclass(frozen=True)
class IdealRec:
    """Integral ideal in canonical factored form."""

    factorization: tuple  # tuple[(PrimeIdealRec, int), ...] sorted canonically
    norm: int

    @staticmethod
    def unit() -> "IdealRec":
        return IdealRec(factorization=(), norm=1)

    @staticmethod
    def from_factors(factors: Sequence[tuple]) -> "IdealRec":
        fs = tuple(sorted(((P, e) for P, e in factors if e > 0), key=lambda t: t[0].sort_key()))
        n = 1
        for P, e in fs:
            n *= P.norm ** e
        return IdealRec(factorization=fs, norm=n)

    def mul(self, other: "IdealRec") -> "IdealRec":
        exps: dict = {}
        for P, e in self.factorization + other.factorization:
            exps[P] = exps.get(P, 0) + e
        return IdealRec.from_factors(exps.items())

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factorization)

    def is_unit(self) -> bool:
        return not self.factorization

    def coprime(self, other: "IdealRec") -> bool:
        mine = {P for P, _ in self.factorization}
        return all(P not in mine for P, _ in other.factorization)

    def primes(self) -> tuple:
        return tuple(P for P, _ in self.factorization)

    def ord_at(self, P: PrimeIdealRec) -> int:
        for Q, e in self.factorization:
            if Q == P:
                return e
        return 0


@dataclass(frozen=True)
class SFDecomposition:
    """D = D0 * D1^2 with D0 squarefree."""

    D0: IdealRec
    D1: IdealRec


def squarefree_split(D: IdealRec) -> SFDecomposition:
    d0 = [(P, 1) for P, e in D.factorization if e % 2 == 1]
    d1 = [(P, e // 2) for P, e in D.factorization if e // 2 > 0]
    return SFDecomposition(D0=IdealRec.from_factors(d0), D1=IdealRec.from_factors(d1))


def recompose(dec: SFDecomposition) -> IdealRec:
    return dec.D0.mul(dec.D1.mul(dec.D1))


def moebius(D: IdealRec) -> int:
    if not D.is_squarefree():
        return 0
    return -1 if len(D.factorization) % 2 else 1


# ---------------------------------------------------------------------------
# rational integer sieves (shared utility)


@lru_cache(maxsize=8)
def sieve_primes(limit: int) -> tuple:
    """All rational primes <= limit."""
    if limit < 2:
        return ()
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return tuple(int(p) for p in np.nonzero(mask)[0])


@lru_cache(maxsize=4)
def spf_array(limit: int) -> np.ndarray:
    """Smallest prime factor table, spf[0] = spf[1] = 0."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in sieve_primes(limit):
        sl = spf[p::p]
        sl[sl == 0] = p
    return spf


def factor_int(n: int) -> list:
    """Factor a positive integer, small-trial division (desk scale)."""
    if n <= 0:
        raise DomainError("positive integers only")
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        out.append((m, 1))
    return out


# ---------------------------------------------------------------------------
# field-specific prime ideal construction


def legendre_disc(field: BaseField, p: int) -> int:
    """Kronecker symbol (disc(F)|p); decides the splitting of p."""
    return int(gmpy2.kronecker(field.discriminant, p))


def primes_above(field: BaseField, p: int) -> list:
    """Prime ideals of F above the rational prime p."""
    if field.kind == "rational":
        return [PrimeIdealRec(norm=p, p=p, tag="rational", gen=str(p))]
    sym = legendre_disc(field, p)
    if sym == 0:
        return [PrimeIdealRec(norm=p, p=p, tag="ramified", gen=f"{p}r")]
    if sym == 1:
        # two conjugate primes, labelled by the two roots of x^2 = d mod p
        r = _sqrt_mod(field.d % p, p)
        lo, hi = sorted((r, (p - r) % p))
        return [
            PrimeIdealRec(norm=p, p=p, tag="split", gen=f"{p}a{lo}"),
            PrimeIdealRec(norm=p, p=p, tag="split", gen=f"{p}b{hi}"),
        ]
    return [PrimeIdealRec(norm=p * p, p=p, tag="inert", gen=f"{p}i")]


def _sqrt_mod(a: int, p: int) -> int:
    """Square root mod odd prime p (Tonelli-Shanks), a assumed a QR."""
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        return int(gmpy2.powmod(a, (p + 1) // 4, p))
    # general case
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while gmpy2.kronecker(z, p) != -1:
        z += 1
    m, c = s, int(gmpy2.powmod(z, q, p))
    t, r = int(gmpy2.powmod(a, q, p)), int(gmpy2.powmod(a, (q + 1) // 2, p))
    while t != 1:
        t2, i = t, 0
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = int(gmpy2.powmod(c, 1 << (m - i - 1), p))
        m, c = i, b * b % p
        r, t = r * b % p, t * c % p
    return r


def prime_ideals(field: BaseField, S: frozenset | set, X: int) -> list:
    """Prime ideals with norm <= X, residue characteristic not in S, canonical order."""
    out = []
    for p in sieve_primes(int(X)):
        if p in S:
            continue
        for P in primes_above(field, p):
            if P.norm <= X:
                out.append(P)
    out.sort(key=lambda P: P.sort_key())
    return out


def enumerate_ideals(field: BaseField, S: frozenset | set, X: int) -> list:
    """All integral ideals of I+(S) with norm <= X, in canonical order.

    Every such ideal appears exactly once; (1) is included.
    """
    if X < 1:
        raise DomainError("norm bound must be >= 1")
    ps = prime_ideals(field, frozenset(S), int(X))
    results = [IdealRec.unit()]

    def dfs(idx: int, cur: IdealRec):
        for j in range(idx, len(ps)):
            P = ps[j]
            if cur.norm * P.norm > X:
                continue
            nxt = cur
            while nxt.norm * P.norm <= X:
                nxt = nxt.mul(IdealRec.from_factors([(P, 1)]))
                results.append(nxt)
                dfs(j + 1, nxt)

    dfs(0, IdealRec.unit())
    results.sort(key=_ideal_sort_key)
    return results


def _ideal_sort_key(D: IdealRec):
    return (D.norm, tuple(p.sort_key() + (e,) for p, e in D.factorization))


def ideal_from_int(field: BaseField, n: int) -> IdealRec:
    """The principal ideal (n) for a positive rational integer n (field = Q)."""
    if field.kind != "rational":
        raise ConfigurationError("ideal_from_int is for the rational field")
    if n <= 0:
        raise DomainError("positive generator required")
    return IdealRec.from_factors(
        [(PrimeIdealRec(norm=p, p=p, tag="rational", gen=str(p)), e) for p, e in factor_int(n)]
    )


def zeta_partial(field: BaseField, w: complex, S: frozenset | set, X: int) -> complex:
    """Truncated Euler product for zeta_F over primes of norm <= X outside S."""
    if complex(w).real <= 1.0:
        raise DomainError("zeta_partial requires Re(w) > 1")
    out = 1.0 + 0.0j
    for P in prime_ideals(field, frozenset(S), int(X)):
        out *= 1.0 / (1.0 - P.norm ** (-complex(w)))
    return out


def dedekind_zeta2(field: BaseField, X: int = 100000) -> float:
    """zeta_F(2) by truncated product (geometric tail < X^-1 * small)."""
    if field.kind == "rational":
        return float(np.pi**2 / 6.0)
    return complex(zeta_partial(field, 2.0, frozenset(), X)).real
