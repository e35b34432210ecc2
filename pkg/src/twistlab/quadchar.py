"""Quadratic symbols chi_D, the ray class 2-group H_C, and reciprocity.

The context is driven by a certificate: the S-set, the modulus C, generator
classes with S-unit generators m_E, and quadratic characters rho_j = (u_j/.)
whose values identify the class of any ideal.  Over Q the certificate is
built in (S = {oo, 2}, C = (8), H_C = (Z/8)^x of order 4); quadratic fields
must supply one explicitly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import gmpy2

from .ringarith import (
    BaseField,
    ConfigurationError,
    DomainError,
    IdealRec,
    PrimeIdealRec,
    enumerate_ideals,
    ideal_from_int,
    squarefree_split,
)

__all__ = [
    "SymbolContext",
    "RayClass",
    "EtaTable",
    "build_context",
    "decompose",
    "chi",
    "eta",
    "sieve_delta",
    "save_context",
    "load_context",
]


@dataclass(frozen=True)
class RayClass:
    """Exponent vector over the generator classes of H_C (entries in {0,1})."""

    exps: tuple

    def __mul__(self, other: "RayClass") -> "RayClass":
        return RayClass(tuple((a + b) % 2 for a, b in zip(self.exps, other.exps)))

    def is_principal(self) -> bool:
        return not any(self.exps)


@dataclass(frozen=True)
class Certificate:
    """Class-number-one certificate for a base field (Lemma-style S-inversion data).

    char_units: S-units u_j with rho_j = (u_j / .) generating the quadratic
    characters of H_C; generator_ideals/generator_m: representatives E_j and
    their S-unit generators m_{E_j}.
    """

    s_primes: tuple  # finite rational primes in S
    modulus_norm: int  # |C|
    char_units: tuple  # integers u_j (field elements for quadratic fields)
    generator_ideals: tuple  # generator norms (Q: small integers)
    generator_m: tuple  # m_{E_j} as integers


RATIONAL_CERT = Certificate(
    s_primes=(2,),
    modulus_norm=8,
    char_units=(-4, 8),  # Kronecker discriminants for (-1/.) and (2/.)
    generator_ideals=(3, 5),
    generator_m=(3, 5),
)


class SymbolContext:
    """Everything needed to evaluate chi_D, classes, eta, and class sieves."""

    def __init__(self, field: BaseField, cert: Certificate):
        self.field = field
        self.cert = cert
        self.s_primes = frozenset(cert.s_primes)
        self.k = len(cert.generator_ideals)
        self.h_C = 2**self.k
        if field.kind != "rational":
            # ideal arithmetic supports quadratic fields, the symbol layer does not
            raise ConfigurationError(
                "quadratic-field symbol contexts are not supported in this build"
            )
        self.modulus = ideal_from_int(field, cert.modulus_norm)
        self.generators = tuple(ideal_from_int(field, g) for g in cert.generator_ideals)
        self.generator_m = tuple(Fraction(m) for m in cert.generator_m)
        # pairing matrix rho_i(E_j) as F2 exponents; must be invertible
        self._pairing = [
            [(1 - int(gmpy2.kronecker(u, g))) // 2 for g in cert.generator_ideals]
            for u in cert.char_units
        ]
        self._pairing_inv = _invert_f2(self._pairing)
        if self._pairing_inv is None:
            raise ConfigurationError("certificate characters do not separate the generators")
        self._eta: EtaTable | None = None

    # -- classes ------------------------------------------------------------

    def all_classes(self):
        return [RayClass(exps) for exps in itertools.product((0, 1), repeat=self.k)]

    def class_of(self, D: IdealRec) -> RayClass:
        """Class of D in H_C, from the certificate characters."""
        self._check_prime_to_s(D)
        d0 = _generator_int(squarefree_split(D).D0)
        vals = [(1 - int(gmpy2.kronecker(u, d0))) // 2 for u in self.cert.char_units]
        exps = _solve_f2(self._pairing_inv, vals)
        return RayClass(tuple(exps))

    def representative(self, c: RayClass) -> IdealRec:
        out = IdealRec.unit()
        for e, g in zip(c.exps, self.generators):
            if e:
                out = out.mul(g)
        return out

    def representative_m(self, c: RayClass) -> Fraction:
        out = Fraction(1)
        for e, m in zip(c.exps, self.generator_m):
            if e:
                out *= m
        return out

    def characters(self):
        """All h_C quadratic characters, as {+-1}-vectors on the generators."""
        return [tuple(vals) for vals in itertools.product((1, -1), repeat=self.k)]

    def char_value(self, rho: tuple, c: RayClass) -> int:
        v = 1
        for r, e in zip(rho, c.exps):
            if e:
                v *= r
        return v

    # -- helpers ------------------------------------------------------------

    def _check_prime_to_s(self, D: IdealRec):
        for P, _ in D.factorization:
            if P.p in self.s_primes:
                raise DomainError(f"ideal not prime to S (residue char {P.p})")

    def eta_table(self) -> "EtaTable":
        if self._eta is None:
            self._eta = _build_eta(self)
        return self._eta


@dataclass(frozen=True)
class EtaTable:
    """eta([D],[D']) = chi_D(D') chi_{D'}(D), constant on class pairs."""

    table: dict

    def value(self, c1: RayClass, c2: RayClass) -> int:
        return self.table[(c1.exps, c2.exps)]


def _invert_f2(mat):
    k = len(mat)
    aug = [row[:] + [1 if i == j else 0 for j in range(k)] for i, row in enumerate(mat)]
    for col in range(k):
        piv = next((r for r in range(col, k) if aug[r][col]), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        for r in range(k):
            if r != col and aug[r][col]:
                aug[r] = [(a + b) % 2 for a, b in zip(aug[r], aug[col])]
    return [row[k:] for row in aug]


def _solve_f2(inv, vals):
    k = len(vals)
    # exps = inv^T . vals ? pairing: vals_i = sum_j pairing[i][j] * exps_j
    return [sum(inv[j][i] * vals[i] for i in range(k)) % 2 for j in range(k)]


def _generator_int(D: IdealRec) -> int:
    """Positive generator of a rational ideal."""
    n = 1
    for P, e in D.factorization:
        n *= P.p**e
    return n


# ---------------------------------------------------------------------------
# operations


def build_context(field: BaseField, cert: Certificate | None = None) -> SymbolContext:
    """Symbol context for the field; Q needs no certificate."""
    if field.kind == "rational":
        return SymbolContext(field, cert or RATIONAL_CERT)
    if cert is None:
        raise ConfigurationError("missing class-number-one certificate for quadratic field")
    return SymbolContext(field, cert)


def decompose(D: IdealRec, ctx: SymbolContext):
    """D = (m) E G^2 with m totally positive, m = 1 mod C.

    Returns (m: Fraction, E: IdealRec, G: IdealRec).  The squareful part D1
    is put in G, so m = gen(D0) / m_E.
    """
    ctx._check_prime_to_s(D)
    dec = squarefree_split(D)
    c = ctx.class_of(D)
    E = ctx.representative(c)
    m_e = ctx.representative_m(c)
    m = Fraction(_generator_int(dec.D0)) / m_e
    if m <= 0:
        raise DomainError("no totally positive normalization found")
    _check_one_mod_c(m, ctx)
    return m, E, dec.D1


def _check_one_mod_c(m: Fraction, ctx: SymbolContext):
    # over Q: C = (8); need ord_2(m - 1) >= 3
    num = (m - 1).numerator
    den = (m - 1).denominator
    if num == 0:
        return
    if den % 2 == 0:
        raise DomainError("m not a 2-adic unit")
    if num % 8 != 0:
        raise DomainError(f"normalized generator {m} is not 1 mod C")


def kronecker_rational(a: Fraction, n: int) -> int:
    """Extended symbol (a/n) for a rational a and odd positive n, 0 on common factors."""
    num, den = a.numerator, a.denominator
    if gmpy2.gcd(den, n) != 1:
        raise DomainError("denominator shares a factor with the argument")
    if gmpy2.gcd(num, n) != 1:
        return 0
    return int(gmpy2.jacobi(num % n, n)) * int(gmpy2.jacobi(den % n, n))


def chi(D: IdealRec, N: IdealRec, ctx: SymbolContext) -> int:
    """Quadratic symbol chi_D(N) = (m * m_E / N), via the decomposition."""
    ctx._check_prime_to_s(N)
    m, E, _ = decompose(D, ctx)
    c = ctx.class_of(D)
    a = m * ctx.representative_m(c)
    out = 1
    for P, e in N.factorization:
        s = kronecker_rational(a, P.p)
        if s == 0:
            return 0
        out *= s**e
    return out


def chi_int(d: int, n: int, ctx: SymbolContext) -> int:
    """chi_{(d)}((n)) over Q for odd positive integers, built on the ideal route."""
    return chi(ideal_from_int(ctx.field, d), ideal_from_int(ctx.field, n), ctx)


def _build_eta(ctx: SymbolContext, witnesses: int = 20) -> EtaTable:
    """Brute-force eta on witness pairs; reciprocity guarantees class-constancy,
    the witness sweep guards the implementation."""
    classes = ctx.all_classes()
    # first few ideals per class, coprime-friendly small odd integers
    per_class: dict = {c.exps: [] for c in classes}
    for D in enumerate_ideals(ctx.field, ctx.s_primes, 600):
        if D.is_unit() or not D.is_squarefree():
            continue
        c = ctx.class_of(D)
        if len(per_class[c.exps]) < 3 * witnesses:
            per_class[c.exps].append(D)
    table = {}
    for c1 in classes:
        for c2 in classes:
            val = None
            checked = 0
            for D1 in per_class[c1.exps]:
                for D2 in per_class[c2.exps]:
                    if not D1.coprime(D2):
                        continue
                    v = chi(D1, D2, ctx) * chi(D2, D1, ctx)
                    if val is None:
                        val = v
                    elif v != val:
                        raise ArithmeticError(
                            f"eta not class-constant at {c1.exps} x {c2.exps}"
                        )
                    checked += 1
                    if checked >= witnesses:
                        break
                if checked >= witnesses:
                    break
            if val is None:
                raise ArithmeticError("no coprime witnesses found")
            table[(c1.exps, c2.exps)] = val
    return EtaTable(table=table)


def eta(c1: RayClass, c2: RayClass, ctx: SymbolContext) -> int:
    return ctx.eta_table().value(c1, c2)


def eta_ideals(D: IdealRec, N: IdealRec, ctx: SymbolContext) -> int:
    return eta(ctx.class_of(D), ctx.class_of(N), ctx)


def sieve_delta(E: RayClass, ctx: SymbolContext):
    """Characters and coefficients with sum_rho coeff * rho(D) = [D in class E]."""
    out = []
    for rho in ctx.characters():
        coeff = Fraction(ctx.char_value(rho, E), ctx.h_C)  # rho
        out.append((rho, coeff))
    return out


def apply_delta(pairs, D: IdealRec, ctx: SymbolContext) -> Fraction:
    total = Fraction(0)
    c = ctx.class_of(D)
    for rho, coeff in pairs:
        total += coeff * ctx.char_value(rho, c)
    return total


# ---------------------------------------------------------------------------
# serialization (versioned key-value text)

_FORMAT_VERSION = 1


def save_context(ctx: SymbolContext, path: str):
    eta_t = ctx.eta_table()
    lines = [
        f"version = {_FORMAT_VERSION}",
        f"field = {ctx.field.kind}",
        f"field_d = {ctx.field.d}",
        f"s_primes = {','.join(str(p) for p in sorted(ctx.s_primes))}",
        f"modulus_norm = {ctx.cert.modulus_norm}",
        f"char_units = {','.join(str(u) for u in ctx.cert.char_units)}",
        f"generators = {','.join(str(g) for g in ctx.cert.generator_ideals)}",
        f"generator_m = {','.join(str(m) for m in ctx.cert.generator_m)}",
    ]
    for (e1, e2), v in sorted(eta_t.table.items()):
        key1 = "".join(map(str, e1))
        key2 = "".join(map(str, e2))
        lines.append(f"eta_{key1}_{key2} = {v}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_context(path: str) -> SymbolContext:
    kv = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            k, _, v = line.partition("=")
            kv[k.strip()] = v.strip()
    if int(kv.get("version", -1)) != _FORMAT_VERSION:
        raise ConfigurationError(f"unsupported context file version {kv.get('version')}")
    if kv["field"] != "rational":
        raise ConfigurationError("only rational contexts are serializable in this build")
    cert = Certificate(
        s_primes=tuple(int(x) for x in kv["s_primes"].split(",")),
        modulus_norm=int(kv["modulus_norm"]),
        char_units=tuple(int(x) for x in kv["char_units"].split(",")),
        generator_ideals=tuple(int(x) for x in kv["generators"].split(",")),
        generator_m=tuple(int(x) for x in kv["generator_m"].split(",")),
    )
    from .ringarith import rational_field

    ctx = SymbolContext(rational_field(), cert)
    # restore eta and cross-check one witness pass lazily on demand
    table = {}
    for k, v in kv.items():
        if k.startswith("eta_"):
            _, e1, e2 = k.split("_")
            table[(tuple(int(c) for c in e1), tuple(int(c) for c in e2))] = int(v)
    if table:
        ctx._eta = EtaTable(table=table)
    return ctx
