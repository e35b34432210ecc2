"""Double Dirichlet series over Q: pure, squarefree, restricted, corrected.

Everything here runs over the rational field with S = {oo, 2}; sums range
over odd integers d (the |D|-variable) and n (the |N|-variable).  Class
characters of H_C = (Z/8)^x are labelled by the fundamental discriminants
{1, -4, 8, -8}; chi_D(N) factors through Kronecker symbols of fundamental
discriminants, so the inner loops are plain character sieves.

The correction factors a^S(s, D, pi, alpha), b^S(w, M, pi, beta) are solved
per prime from their defining constraints: the prime-power interchange of
the basic identity, the two one-variable functional equations, and triviality
on squarefree support.  The solved family is cached per (system, prime).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
import numpy as np

from .lseries import CoefficientSystem, char_values_array, fundamental_disc
from .quadchar import RayClass, SymbolContext
from .ringarith import DomainError, sieve_primes

CLASS_CHARS = (1, -4, 8, -8)  # fundamental-discriminant labels for H_C-hat over Q

# mod-8 residue -> class index, classes ordered (1, 3, 5, 7)
_CLASS_OF_RESIDUE = {1: 0, 3: 1, 5: 2, 7: 3}
_CLASS_REPS = (1, 3, 5, 7)


@dataclass(frozen=True)
class TruncationSpec:
    x_d: int
    x_n: int
    tolerance: float = 1e-9
    order: str = "D-first"  # or "N-first"

    def __post_init__(self):
        if self.x_d < 1 or self.x_n < 1:
            raise DomainError("cutoffs must be >= 1")
        if self.order not in ("D-first", "N-first"):
            raise DomainError(f"unknown evaluation order {self.order}")


@dataclass(frozen=True)
class DDSValue:
    value: complex
    last_term: float
    tail: float

    def __post_init__(self):
        if not (np.isfinite(self.last_term) and np.isfinite(self.tail)):
            raise DomainError("non-finite truncation diagnostics")


# ---------------------------------------------------------------------------
# integer-level tables


def odd_range(X: int) -> np.ndarray:
    return np.arange(1, X + 1, 2, dtype=np.int64)


def squarefree_part_array(X: int) -> np.ndarray:
    """d0[n] = squarefree part of n, for n <= X."""
    d0 = np.ones(X + 1, dtype=np.int64)
    for p in sieve_primes(X):
        pk = p
        k = 1
        while pk <= X:
            idx = np.arange(pk, X + 1, pk, dtype=np.int64)
            if pk * p <= X:
                idx = idx[idx % (pk * p) != 0]
            if k % 2 == 1:
                d0[idx] *= p
            pk *= p
            k += 1
    return d0


def class_index(d0: int) -> int:
    return _CLASS_OF_RESIDUE[d0 % 8]


def class_rep(idx: int) -> int:
    return _CLASS_REPS[idx]


def eta_matrix(ctx: SymbolContext) -> np.ndarray:
    """eta on class-index pairs, from the context's witnessed table."""
    table = ctx.eta_table()
    classes = [_class_of_int(ctx, r) for r in _CLASS_REPS]
    out = np.zeros((4, 4), dtype=np.int64)
    for i, c1 in enumerate(classes):
        for j, c2 in enumerate(classes):
            out[i, j] = table.value(c1, c2)
    return out


def _class_of_int(ctx: SymbolContext, d: int) -> RayClass:
    from .ringarith import ideal_from_int

    return ctx.class_of(ideal_from_int(ctx.field, d))


def char_on_classes(disc_label: int) -> np.ndarray:
    """Values of the class character on class indices of (1, 3, 5, 7)."""
    if disc_label == 1:
        return np.ones(4, dtype=np.int64)
    return np.array([int(gmpy2.kronecker(disc_label, r)) for r in _CLASS_REPS], dtype=np.int64)


def char_value_on(disc_label: int, d0: int) -> int:
    if disc_label == 1:
        return 1
    return int(gmpy2.kronecker(disc_label, d0))


# ---------------------------------------------------------------------------
# correction-factor solver (per prime, sequential levels)


class CorrectionSolverError(ArithmeticError):
    """Singular local system (inconsistent Satake input)."""


@dataclass(frozen=True)
class CorrectionPolynomial:
    """Local correction family at a prime.

    table[i][j]: coefficient of |P|^{-is} |P|^{-jw}.  On the a-side j indexes
    ord_P(D) and i the Dirichlet-polynomial power in s; on the b-side i
    indexes ord_P(M) and j the power in w.  Row/column 0..1 of the level
    index are identically the unit polynomial (trivial on squarefree parts).
    """

    prime: int
    side: str  # "a" | "b"
    table: tuple  # tuple of tuples, complex

    def level(self, lev: int) -> np.ndarray:
        if self.side == "a":
            return np.array([row[lev] for row in self.table])
        return np.array(self.table[lev])

    def c00(self) -> complex:
        return self.table[0][0]


class LocalCorrections:
    """Sequential solver for the a/b families at one prime."""

    def __init__(self, sys: CoefficientSystem, p: int, max_level: int = 12):
        self.p = p
        self.q = float(p)
        if not sys.self_dual:
            raise CorrectionSolverError("correction solver requires a self-dual system")
        self.H = np.array(sys.coeff_prime_powers(p, 2 * max_level + 6))
        self.a = {0: np.array([1.0 + 0j]), 1: np.array([1.0 + 0j])}
        self.b = {0: np.array([1.0 + 0j]), 1: np.array([1.0 + 0j])}

    # -- identity sides -------------------------------------------------------

    def lhs(self, i: int, j: int) -> complex:
        aj = self.a[j]
        if j % 2 == 1:
            return complex(aj[i]) if i < len(aj) else 0.0 + 0j
        lo = max(0, i - len(self.H) + 1)
        return complex(
            sum(aj[i2] * self.H[i - i2] for i2 in range(lo, min(i, len(aj) - 1) + 1))
        )

    def rhs(self, i: int, j: int) -> complex:
        bi = self.b[i]
        if i % 2 == 1:
            return complex(self.H[i] * (bi[j] if j < len(bi) else 0.0))
        return complex(self.H[i] * np.sum(bi[: min(j, len(bi) - 1) + 1]))

    # -- solving --------------------------------------------------------------

    def ensure_b(self, i: int):
        if i in self.b:
            return
        q = self.q
        mhalf = i // 2
        self.ensure_a_upto(mhalf)
        d = np.zeros(2 * mhalf + 1, dtype=complex)
        d[0] = 1.0
        ap = self.H[i]
        if abs(ap) < 1e-12:
            raise CorrectionSolverError(f"a(P^{i}) ~ 0 at P = {self.p}")
        cum = d[0]
        for j in range(1, mhalf + 1):
            L = self.lhs(i, j)
            if i % 2 == 0:
                d[j] = L / ap - cum
                cum += d[j]
            else:
                d[j] = L / ap
        for j in range(mhalf + 1, 2 * mhalf + 1):
            d[j] = d[2 * mhalf - j] * q ** (j - mhalf)
        self.b[i] = d

    def ensure_a_upto(self, n: int):
        for j in range(2, n + 1):
            self.ensure_a(j)

    def ensure_a(self, n: int):
        if n in self.a:
            return
        self.ensure_a_upto(n - 1)
        q = self.q
        m = n // 2
        nfree = 3 * m
        imax = 2 * n - 1  # keeps every required b-level below a-level n
        for i in range(2, imax + 1):
            self.ensure_b(i)

        def cvec(it: int) -> np.ndarray:
            v = np.zeros(nfree + 1, dtype=complex)
            if it > 6 * m:
                return v
            if it == 0:
                v[0] = 1.0
            elif it <= 3 * m:
                v[it] = 1.0
            else:
                ip = 6 * m - it
                if ip == 0:
                    v[0] = q ** (3 * m)
                else:
                    v[ip] = q ** (3 * m - ip)
            return v

        rows, rhs_v = [], []
        for i in range(1, imax + 1):
            if n % 2 == 1:
                vec = cvec(i)
            else:
                vec = np.zeros(nfree + 1, dtype=complex)
                for i2 in range(0, min(i, 6 * m) + 1):
                    vec += cvec(i2) * self.H[i - i2]
            R = self.rhs(i, n)
            row, c0 = vec[1:], vec[0]
            scale = max(float(np.abs(row).max()), abs(R - c0), 1e-30)
            rows.append(row / scale)
            rhs_v.append((R - c0) / scale)
        M = np.array(rows)
        y = np.array(rhs_v)
        sol, _, rank, _ = np.linalg.lstsq(M, y, rcond=None)
        if rank < nfree:
            raise CorrectionSolverError(f"underdetermined level {n} at P = {self.p}")
        resid = float(np.linalg.norm(M @ sol - y))
        if resid > 1e-7:
            raise CorrectionSolverError(
                f"inconsistent local system at P = {self.p}, level {n} (resid {resid:.2e})"
            )
        c = np.zeros(6 * m + 1, dtype=complex)
        c[0] = 1.0
        c[1 : 3 * m + 1] = sol
        for i in range(3 * m + 1, 6 * m + 1):
            c[i] = c[6 * m - i] * q ** (3 * m - (6 * m - i))
        self.a[n] = c

    def verify_rectangle(self, A: int) -> float:
        """Worst relative residual of every identity equation with j <= A."""
        self.ensure_a_upto(A)
        for i in range(2, 2 * A):
            self.ensure_b(i)
        worst = 0.0
        for i in range(0, 2 * A):
            for j in range(0, A + 1):
                L, R = self.lhs(i, j), self.rhs(i, j)
                worst = max(worst, abs(L - R) / max(1.0, abs(L), abs(R)))
        return worst

    def polynomials(self, side: str, max_level: int) -> CorrectionPolynomial:
        if side == "a":
            self.ensure_a_upto(max_level)
            deg = max(len(self.a[j]) for j in range(0, max_level + 1))
            tab = tuple(
                tuple(
                    complex(self.a[j][i]) if i < len(self.a[j]) else 0.0 + 0j
                    for j in range(0, max_level + 1)
                )
                for i in range(0, deg)
            )
            return CorrectionPolynomial(prime=self.p, side="a", table=tab)
        for i in range(2, max_level + 1):
            self.ensure_b(i)
        tab = tuple(
            tuple(complex(self.b[i][j]) if j < len(self.b[i]) else 0.0 + 0j for j in range(0, max_level + 1))
            for i in range(0, max_level + 1)
        )
        return CorrectionPolynomial(prime=self.p, side="b", table=tab)


class CorrectionSystem:
    """Per-prime local solvers for one coefficient system, built on demand."""

    def __init__(self, sys: CoefficientSystem):
        self.sys = sys
        self._local: dict = {}

    def local(self, p: int) -> LocalCorrections:
        got = self._local.get(p)
        if got is None:
            got = LocalCorrections(self.sys, p)
            self._local[p] = got
        return got

    def a_poly(self, p: int, level: int) -> np.ndarray:
        loc = self.local(p)
        loc.ensure_a(level) if level >= 2 else None
        return loc.a[level]

    def b_poly(self, p: int, level: int) -> np.ndarray:
        loc = self.local(p)
        if level >= 2:
            loc.ensure_b(level)
        return loc.b[level]

    # -- global evaluation ------------------------------------------------

    def a_value(self, s: complex, d: int, alpha: int = 1) -> complex:
        """a^S(s, (d), pi, alpha) as a product of local polynomials."""
        out = 1.0 + 0j
        for p, e in _factor_odd(d):
            if e < 2:
                continue
            # the local factor sees the prime-to-p symbol of D and alpha
            rest0 = _squarefree_part(d // p**e)
            sign = char_value_on(alpha, p) * int(gmpy2.jacobi(rest0 % p, p))
            poly = self.a_poly(p, e)
            out *= _polyval(poly, sign * p ** (-complex(s)))
        return out

    def a_monomials(self, d: int, alpha: int = 1) -> list:
        """(k, coeff) pairs with a^S(s,(d),alpha) = sum coeff * k^{-s}."""
        terms = [(1, 1.0 + 0j)]
        for p, e in _factor_odd(d):
            if e < 2:
                continue
            rest0 = _squarefree_part(d // p**e)
            sign = char_value_on(alpha, p) * int(gmpy2.jacobi(rest0 % p, p))
            poly = self.a_poly(p, e)
            new = []
            for k, c in terms:
                for i, ci in enumerate(poly):
                    if ci == 0:
                        continue
                    new.append((k * p**i, c * ci * sign**i))
            terms = new
        return terms

    def b_monomials(self, m: int, beta: int = 1) -> list:
        """(k, coeff) pairs with b^S(w,(m),beta) = sum coeff * k^{-w}."""
        terms = [(1, 1.0 + 0j)]
        for q, e in _factor_odd(m):
            if e < 2:
                continue
            rest0 = _squarefree_part(m // q**e)
            sign = char_value_on(beta, q) * int(gmpy2.jacobi(rest0 % q, q))
            poly = self.b_poly(q, e)
            new = []
            for k, c in terms:
                for j, cj in enumerate(poly):
                    if cj == 0:
                        continue
                    new.append((k * q**j, c * cj * sign**j))
            terms = new
        return terms

    def b_value(self, w: complex, m: int, beta: int = 1) -> complex:
        return complex(sum(c * k ** (-complex(w)) for k, c in self.b_monomials(m, beta)))


def _polyval(coeffs: np.ndarray, x: complex) -> complex:
    out = 0.0 + 0j
    for c in reversed(coeffs):
        out = out * x + c
    return out


def _factor_odd(n: int) -> list:
    out = []
    m = n
    p = 3
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out.append((p, e))
        p += 2
    if m > 1:
        out.append((m, 1))
    return out


def _squarefree_part(n: int) -> int:
    out = 1
    for p, e in _factor_odd(n):
        if e % 2:
            out *= p
    return out


# ---------------------------------------------------------------------------
# pure double Dirichlet series


def Z_pure(s: complex, w: complex, sys: CoefficientSystem, ctx: SymbolContext, trunc: TruncationSpec) -> DDSValue:
    """Uncorrected double sum; D-first sums twisted L-truncations, N-first
    reroutes chi_D(N) through reciprocity (eta class factors)."""
    s, w = complex(s), complex(w)
    a = sys.coeff_array(trunc.x_n)
    if trunc.order == "D-first":
        return _z_pure_d_first(s, w, a, ctx, trunc)
    return _z_pure_n_first(s, w, a, ctx, trunc)


def _z_pure_d_first(s, w, a, ctx, trunc) -> DDSValue:
    ns = np.arange(0, trunc.x_n + 1, dtype=float)
    ns[0] = 1.0
    npow = ns ** (-s)
    inner_weights = a[: trunc.x_n + 1] * npow
    total = 0.0 + 0j
    last = 0.0
    for d in range(1, trunc.x_d + 1, 2):
        d0 = _squarefree_part(d)
        chi = char_values_array(fundamental_disc(d0), trunc.x_n)
        inner = complex((inner_weights[1::2] * chi[1::2]).sum())
        term = d ** (-w) * inner
        total += term
        last = abs(term)
    return DDSValue(value=total, last_term=last, tail=_dds_tail(s.real, w.real, trunc))


def _z_pure_n_first(s, w, a, ctx, trunc) -> DDSValue:
    em = eta_matrix(ctx)
    ds = odd_range(trunc.x_d)
    d0s = squarefree_part_array(trunc.x_d)[ds]
    dpow = ds.astype(float) ** (-w)
    dcls = np.array([_CLASS_OF_RESIDUE[r] for r in (d0s % 8)])
    total = 0.0 + 0j
    last = 0.0
    for n in range(1, trunc.x_n + 1, 2):
        an = a[n]
        if an == 0.0:
            continue
        n0 = _squarefree_part(n)
        msq = int(round((n // n0) ** 0.5))
        chi_n0 = char_values_array(fundamental_disc(n0), trunc.x_d)
        vals = chi_n0[d0s.astype(np.int64)]
        # chi_D(N) = 0 whenever gcd(d0, n) > 1; the n0-symbol kills shared
        # odd-part primes, shared square-part primes need the explicit mask
        if msq > 1:
            mask = np.ones(len(ds), dtype=bool)
            for p, _ in _factor_odd(msq):
                mask &= d0s % p != 0
            vals = vals * mask
        etas = em[dcls, class_index(n0)]
        term = an * float(n) ** (-s) * complex((vals * etas * dpow).sum())
        total += term
        last = abs(term)
    return DDSValue(value=total, last_term=last, tail=_dds_tail(s.real, w.real, trunc))


def _dds_tail(sig: float, tau: float, trunc: TruncationSpec) -> float:
    def one(sigma, X):
        if sigma <= 1.0:
            return np.inf
        return np.log(max(X, 2)) ** 2 * X ** (1.0 - sigma) / (sigma - 1.0)

    td = one(tau, trunc.x_d)
    tn = one(sig, trunc.x_n)
    if not (np.isfinite(td) and np.isfinite(tn)):
        return float(max(td, tn))
    return float(td + tn + td * tn)


def Z_star(
    s: complex,
    w: complex,
    sys: CoefficientSystem,
    ctx: SymbolContext,
    alpha: int,
    beta: int,
    trunc: TruncationSpec,
    delta_class: int | None = None,
    chi_r: int | None = None,
) -> DDSValue:
    """Squarefree-restricted pure series with class characters alpha, beta.

    delta_class restricts D to one class index; chi_r inserts the quadratic
    symbol (r/.) evaluated at D (for the residue experiments).
    """
    s, w = complex(s), complex(w)
    a = sys.coeff_array(trunc.x_n)
    ns = np.arange(0, trunc.x_n + 1, dtype=float)
    ns[0] = 1.0
    npow = ns ** (-s)
    alpha_vals = char_values_array(alpha, trunc.x_n) if alpha != 1 else None
    total = 0.0 + 0j
    last = 0.0
    for d in range(1, trunc.x_d + 1, 2):
        if _squarefree_part(d) != d:
            continue
        if delta_class is not None and class_index(d) != delta_class:
            continue
        bval = char_value_on(beta, d)
        rval = 1
        if chi_r is not None:
            rval = char_value_on(fundamental_disc(chi_r), d) if gmpy2.gcd(chi_r, d) == 1 else 0
            if rval == 0:
                continue
        chi = char_values_array(fundamental_disc(d), trunc.x_n)
        row = a[1::2] * npow[1::2] * chi[1::2]
        if alpha_vals is not None:
            row = row * alpha_vals[1::2]
        term = bval * rval * d ** (-w) * complex(row.sum())
        total += term
        last = abs(term)
    return DDSValue(value=total, last_term=last, tail=_dds_tail(s.real, w.real, trunc))


# ---------------------------------------------------------------------------
# corrected series and restrictions


def _corrected_d_term(
    corr: CorrectionSystem, s: complex, d: int, alpha: int, x_n: int, inner_cum: np.ndarray
) -> complex:
    """beta-free part of one corrected D-term with lattice truncation:
    sum over correction monomials k of c_k k^{-s} * (inner L-sum to x_n/k)."""
    out = 0.0 + 0j
    for k, c in corr.a_monomials(d, alpha):
        lim = x_n // k
        if lim < 1:
            continue
        out += c * k ** (-complex(s)) * inner_cum[lim]
    return out


def corrected_Z(
    s: complex,
    w: complex,
    sys: CoefficientSystem,
    ctx: SymbolContext,
    alpha: int,
    beta: int,
    trunc: TruncationSpec,
    corr: CorrectionSystem | None = None,
    restrict_r: int | None = None,
    coprime_l: int | None = None,
) -> DDSValue:
    """D-side corrected series Z^S(s, w; pi, alpha, beta), lattice-truncated.

    restrict_r: keep only D with r | D_1 (the Z_r family).
    coprime_l:  keep only D with (D_1, l) = 1 (the Z_(l) family).
    """
    s, w = complex(s), complex(w)
    corr = corr or CorrectionSystem(sys)
    if restrict_r is not None and _squarefree_part(restrict_r) != restrict_r:
        raise DomainError("restriction ideal r must be squarefree")
    a = sys.coeff_array(trunc.x_n)
    ns = np.arange(0, trunc.x_n + 1, dtype=float)
    ns[0] = 1.0
    npow = ns ** (-s)
    alpha_vals = char_values_array(alpha, trunc.x_n) if alpha != 1 else np.ones(trunc.x_n + 1)
    total = 0.0 + 0j
    last = 0.0
    cum_cache: dict = {}
    for d in range(1, trunc.x_d + 1, 2):
        d0 = _squarefree_part(d)
        d1 = int(round((d // d0) ** 0.5))
        if restrict_r is not None and d1 % restrict_r != 0:
            continue
        if coprime_l is not None and gmpy2.gcd(d1, coprime_l) != 1:
            continue
        cum = cum_cache.get(d0)
        if cum is None:
            chi = char_values_array(fundamental_disc(d0), trunc.x_n)
            row = np.zeros(trunc.x_n + 1, dtype=complex)
            row[1::2] = a[1::2] * npow[1::2] * chi[1::2] * alpha_vals[1::2]
            cum = np.cumsum(row)
            cum_cache[d0] = cum
        term = char_value_on(beta, d0) * d ** (-w) * _corrected_d_term(corr, s, d, alpha, trunc.x_n, cum)
        total += term
        last = abs(term)
    return DDSValue(value=total, last_term=last, tail=_dds_tail(s.real, w.real, trunc))


def corrected_Z_m_side(
    s: complex,
    w: complex,
    sys: CoefficientSystem,
    ctx: SymbolContext,
    alpha: int,
    beta: int,
    trunc: TruncationSpec,
    corr: CorrectionSystem | None = None,
) -> DDSValue:
    """M-side of the basic identity: GL(1) L-truncations with b-corrections."""
    s, w = complex(s), complex(w)
    corr = corr or CorrectionSystem(sys)
    a = sys.coeff_array(trunc.x_n)
    ds = np.arange(0, trunc.x_d + 1, dtype=float)
    ds[0] = 1.0
    dpow = ds ** (-w)
    beta_vals = char_values_array(beta, trunc.x_d) if beta != 1 else np.ones(trunc.x_d + 1)
    total = 0.0 + 0j
    last = 0.0
    cum_cache: dict = {}
    for m in range(1, trunc.x_n + 1, 2):
        m0 = _squarefree_part(m)
        cum = cum_cache.get(m0)
        if cum is None:
            chi = char_values_array(fundamental_disc(m0), trunc.x_d)
            row = np.zeros(trunc.x_d + 1, dtype=complex)
            row[1::2] = chi[1::2] * beta_vals[1::2] * dpow[1::2]
            cum = np.cumsum(row)
            cum_cache[m0] = cum
        inner = 0.0 + 0j
        for k, c in corr.b_monomials(m, beta):
            lim = trunc.x_d // k
            if lim >= 1:
                inner += c * k ** (-complex(w)) * cum[lim]
        # b^S(w, M) carries the a_pi(M)-factor; the solved family is its
        # squarefree-normalized part
        term = char_value_on(alpha, m0) * a[m] * m ** (-s) * inner
        total += term
        last = abs(term)
    return DDSValue(value=total, last_term=last, tail=_dds_tail(s.real, w.real, trunc))


def basic_identity_check(
    s: complex,
    w: complex,
    sys: CoefficientSystem,
    ctx: SymbolContext,
    alpha: int,
    beta: int,
    trunc: TruncationSpec,
    corr: CorrectionSystem | None = None,
) -> tuple:
    """(D-side, M-side, residual) at the same lattice truncation."""
    corr = corr or CorrectionSystem(sys)
    zd = corrected_Z(s, w, sys, ctx, alpha, beta, trunc, corr=corr)
    zm = corrected_Z_m_side(s, w, sys, ctx, alpha, beta, trunc, corr=corr)
    return zd, zm, abs(zd.value - zm.value)


def Z_r(s, w, sys, ctx, r: int, trunc, corr=None) -> DDSValue:
    if _squarefree_part(r) != r or r % 2 == 0:
        raise DomainError("r must be odd squarefree")
    return corrected_Z(s, w, sys, ctx, 1, 1, trunc, corr=corr, restrict_r=r)


def Z_paren_l(s, w, sys, ctx, l: int, trunc, corr=None) -> DDSValue:
    return corrected_Z(s, w, sys, ctx, 1, 1, trunc, corr=corr, coprime_l=l)


# ---------------------------------------------------------------------------
# Moebius sieve identities (exact)


def moebius_int(n: int) -> int:
    m = n
    cnt = 0
    p = 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            cnt += 1
        p += 1 if p == 2 else 2
    if m > 1:
        cnt += 1
    return -1 if cnt % 2 else 1


def sieve_identity_check(f: dict, r: int) -> bool:
    """Exact finite Moebius identities for a finitely-supported f on odd ints.

    Checks sum_r' mu(r') sum_{r'|D1} f(D) = sum_{squarefree D} f(D)  and the
    divisor-sum variant sum_{l|r} mu(l) [ (D1,l)=1 ] = [ r | D1 ].
    """
    support = sorted(f)
    sq_side = sum((f[d] for d in support if _squarefree_part(d) == d), Fraction(0))
    rmax = int(max(support)) if support else 1
    lhs = Fraction(0)
    for rr in range(1, int(rmax**0.5) + 1):
        if rr % 2 == 0 or _squarefree_part(rr) != rr:
            continue
        mu = moebius_int(rr)
        if mu == 0:
            continue
        for d in support:
            d0 = _squarefree_part(d)
            d1 = int(round((d // d0) ** 0.5))
            if d1 % rr == 0:
                lhs += mu * f[d]
    ok1 = lhs == sq_side
    # Lemma-style divisor identity: Z_r = sum_{l | r} mu(l) Z_(l)
    lhs2 = Fraction(0)
    rhs2 = Fraction(0)
    for d in support:
        d0 = _squarefree_part(d)
        d1 = int(round((d // d0) ** 0.5))
        if d1 % r == 0:
            rhs2 += f[d]
    for l in _divisors(r):
        mu = moebius_int(l)
        if mu == 0:
            continue
        for d in support:
            d0 = _squarefree_part(d)
            d1 = int(round((d // d0) ** 0.5))
            if gmpy2.gcd(d1, l) == 1:
                lhs2 += mu * f[d]
    return ok1 and lhs2 == rhs2


def _divisors(n: int) -> list:
    out = [1]
    for p, e in _factor_odd(n):
        out = [d * p**k for d in out for k in range(e + 1)]
    return sorted(out)


# ---------------------------------------------------------------------------
# refined functional-equation expansions (descriptors + identity checks)


@dataclass(frozen=True)
class RefinedTerm:
    """One term of the refined-FE divisor expansion."""

    divisors: tuple  # (l, m) on the psi side; (l_1,l_2,l_3,m_1,m_2,m_3) on phi
    coefficient_desc: str
    s_exponent: tuple  # per-divisor exponent pattern in the relevant variable


def refined_fe_expand(r: int, char_label: int, side: str) -> list:
    """Divisor-sum descriptor of the refined functional equations.

    side = 'psi': terms (l, m) over divisors of r with coefficients
    mu*beta(l)/|l|^w and beta(m)/|m|^{1-w}.  side = 'phi': six divisor
    indices (l_j, m_j | r) with gamma_j-weighted coefficients.  r = 1
    degenerates to the single unrefined term.
    """
    divs = _divisors(r)
    out = []
    if side == "psi":
        for l, m in itertools.product(divs, divs):
            out.append(
                RefinedTerm(
                    divisors=(l, m),
                    coefficient_desc=f"mu*beta({l}) |{l}|^-w * beta({m}) |{m}|^-(1-w)",
                    s_exponent=(l, m),
                )
            )
        return out
    if side == "phi":
        for picks in itertools.product(divs, repeat=6):
            ls, ms = picks[:3], picks[3:]
            out.append(
                RefinedTerm(
                    divisors=picks,
                    coefficient_desc=(
                        "prod_j alpha*gamma_j(l_j)/|l_j|^(1-s) * mu*alpha*gamma_j(m_j)/|m_j|^s"
                    ),
                    s_exponent=picks,
                )
            )
        return out
    raise DomainError(f"unknown side {side}")


def refined_phi_identity_residual(
    sys: CoefficientSystem, p: int, s: complex, alpha_sign: int = 1, chi_sign: int = 1
) -> float:
    """Exactness of the per-prime phi-side divisor expansion.

    The 64-term sum over l_j, m_j | p with coefficients
    alpha*gamma_j(l_j)/|l_j|^{1-s} and mu*alpha*gamma_j(m_j)/|m_j|^s must
    reproduce prod_j (1 - a g_j chi p^{-s})(1 + a g_j chi p^{-(1-s)}), whose
    conjugate-pair product telescopes against prod_j (1 - g_j^2 p^{2s-2}).
    """
    s = complex(s)
    g = sys.satake(p)
    x = float(p) ** (-(1 - s))
    y = float(p) ** (-s)
    total = 0.0 + 0.0j
    for picks in itertools.product((1, p), repeat=6):
        term = 1.0 + 0.0j
        for j in range(3):
            lj, mj = picks[j], picks[3 + j]
            if lj == p:
                term *= alpha_sign * chi_sign * g[j] * x
            if mj == p:
                term *= -alpha_sign * chi_sign * g[j] * y
        total += term
    direct = 1.0 + 0.0j
    for gj in g:
        direct *= (1.0 - alpha_sign * chi_sign * gj * y) * (1.0 + alpha_sign * chi_sign * gj * x)
    resid = abs(total - direct)
    # conjugate-pair telescoping: (1 - z)(1 + z) = 1 - g^2 p^{2s-2} at z = g chi p^{s-1}
    for gj in g:
        z = gj * chi_sign * float(p) ** (s - 1.0)
        resid = max(resid, abs((1.0 - z) * (1.0 + z) - (1.0 - gj**2 * float(p) ** (2 * s - 2))))
    return resid
