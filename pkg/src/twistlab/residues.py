"""Residue layer: local series L_{1,r}, L_{2,r}, T(s), R_1, R_r, the
Dedekind-zeta residue identity, the switching identity, the scattering factor,
and the Euler-product probe behind the no-pole hypothesis.

All sums run over odd integers (prime to S = {oo, 2}) on the rational field.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
import mpmath as mp
import numpy as np

from .dds import _factor_odd, class_index, eta_matrix
from .gammafn import cgamma
from .lseries import (
    CoefficientSystem,
    _multiplicative_fill,
    fundamental_disc,
    twisted_params,
)
from .quadchar import SymbolContext
from .ringarith import BaseField, ConfigurationError, DomainError, sieve_primes

S_PRIMES = (2,)
H_C = 4


@dataclass(frozen=True)
class LocalSeriesPair:
    r: int
    L1_closed: complex
    L2_closed: complex
    L1_series: complex
    L2_series: complex
    K: int

    def closed_vs_series(self) -> float:
        num = max(abs(self.L1_closed - self.L1_series), abs(self.L2_closed - self.L2_series))
        den = max(1.0, abs(self.L1_closed), abs(self.L2_closed))
        return num / den


@dataclass(frozen=True)
class ResidueReport:
    R1: complex
    Rr: complex
    T_of_s: complex
    sym2_partial: complex
    components: dict


def closed_local_pair(a_r: complex, gammas: tuple, r: int, s: complex) -> tuple:
    """Closed forms of the two parity series from (a_pi(r), gamma_j(r))."""
    s = complex(s)
    x2 = float(r) ** (-2 * s)
    denom = 1.0 + 0j
    for g in gammas:
        fac = 1.0 - g * g * x2
        if abs(g * g) >= float(r) ** (2 * s.real):
            raise DomainError("divergent local factor: |gamma^2| >= |r|^{2 Re s}")
        denom *= fac
    L1 = (a_r + x2) * float(r) ** (-s) / denom
    L2 = (1.0 + a_r * x2) / denom
    return complex(L1), complex(L2)


def local_pair(sys: CoefficientSystem, r: int, s: complex, K: int = 60) -> LocalSeriesPair:
    if r % 2 == 0 or len(_factor_odd(r)) != 1 or _factor_odd(r)[0][1] != 1:
        raise DomainError("r must be an odd prime")
    g = sys.satake(r)
    a_r = sys.coeff_prime_powers(r, 1)[1]
    L1c, L2c = closed_local_pair(a_r, g, r, s)
    h = sys.coeff_prime_powers(r, 2 * K + 1)
    s = complex(s)
    L1s = sum(h[2 * k + 1] * float(r) ** (-(2 * k + 1) * s) for k in range(K + 1))
    L2s = sum(h[2 * k] * float(r) ** (-(2 * k) * s) for k in range(K + 1))
    return LocalSeriesPair(
        r=r, L1_closed=L1c, L2_closed=L2c, L1_series=complex(L1s), L2_series=complex(L2s), K=K
    )


def Rr_from_parts(eta_val: int, r: int, L1: complex, L2: complex) -> complex:
    denom = 1.0 / r + L2
    if abs(denom) < 1e-14:
        raise ArithmeticError("singular R_r denominator")
    return eta_val * (1.0 + 1.0 / r) * L1 / denom


def Rr(sys: CoefficientSystem, ctx: SymbolContext, E_class: int, r: int, s: complex) -> complex:
    """R_r(s, pi, E) = eta(E, r) (1 + |r|^{-1}) L_1 / (|r|^{-1} + L_2)."""
    pair = local_pair(sys, r, s)
    em = eta_matrix(ctx)
    ev = int(em[E_class, class_index(r)])
    return Rr_from_parts(ev, r, pair.L1_closed, pair.L2_closed)


def sym2_partial(sys: CoefficientSystem, s: complex, X: int) -> complex:
    """L^S(s, pi, sym^2) Euler truncation (degree six) over odd primes <= X."""
    s = complex(s)
    out = 1.0 + 0j
    for p in sieve_primes(X):
        if p in S_PRIMES:
            continue
        for prod in sys.sym2(p).satake6:
            out *= 1.0 / (1.0 - prod * float(p) ** (-s))
    return complex(out)


def square_coeff_array(sys: CoefficientSystem, X: int) -> np.ndarray:
    """a(n^2) prod_{p|n} (1+1/p)^{-1} for n <= X, by multiplicative fill."""

    def weighted_square_powers(p: int, kmax: int) -> list:
        h = sys.coeff_prime_powers(p, 2 * kmax)
        w = 1.0 / (1.0 + 1.0 / p)
        return [1.0 + 0j] + [w * h[2 * k] for k in range(1, kmax + 1)]

    return _multiplicative_fill(X, weighted_square_powers)


def square_coeff_sum(sys: CoefficientSystem, s: complex, X: int, coprime_to: int = 1) -> complex:
    """sum_{n <= X odd, (n, coprime_to) = 1} a(n^2) n^{-2s} prod_{p|n} (1 + 1/p)^{-1}."""
    s = complex(s)
    aw = square_coeff_array(sys, X)
    n = np.arange(1, X + 1, 2, dtype=float)
    terms = aw[1 : X + 1 : 2] * n ** (-2 * s)
    if coprime_to > 1:
        odd = np.arange(1, X + 1, 2)
        mask = np.ones(len(odd), dtype=bool)
        for p, _ in _factor_odd(coprime_to):
            mask &= (odd % p) != 0
        terms = terms * mask
    return complex(terms.sum())


def T_of_s(sys: CoefficientSystem, s: complex, X: int) -> tuple:
    """T(s) = [square-coefficient sum] / L^S(2s, sym^2), with an X vs 2X
    stabilization report: returns (T, spread)."""
    s = complex(s)

    def at(x):
        num = square_coeff_sum(sys, s, x)
        den = sym2_partial(sys, 2 * s, x)
        if abs(den) < 1e-14:
            raise ArithmeticError("sym^2 truncation vanished")
        return num / den

    t1 = at(X)
    t2 = at(max(2, X // 2))
    return complex(t1), abs(t1 - t2)


def local_T_factor(sys: CoefficientSystem, p: int, s: complex, K: int = 40) -> complex:
    """Per-prime factor of T(s): local square-coefficient series with the
    (1+1/p)^{-1} weight, divided by the local sym^2 factor at 2s."""
    s = complex(s)
    h = sys.coeff_prime_powers(p, 2 * K)
    series = 1.0 + 0j
    w = 1.0 / (1.0 + 1.0 / p)
    for k in range(1, K + 1):
        series += w * h[2 * k] * float(p) ** (-2 * k * s)
    local_sym2 = 1.0 + 0j
    for prod in sys.sym2(p).satake6:
        local_sym2 *= 1.0 / (1.0 - prod * float(p) ** (-2 * s))
    return complex(series / local_sym2)


def R1(
    sys: CoefficientSystem,
    ctx: SymbolContext,
    E_class: int,
    s: complex,
    X: int,
    field: BaseField | None = None,
) -> ResidueReport:
    """R_1(s, pi, E) with full component breakdown.

    Components: A(F), h_C, zeta_F(2), the S-product, the finite S-local
    twisted L-factor, the sym^2 truncation at 2s, and T(s).
    """
    s = complex(s)
    A_F = 1.0 if field is None else field.zeta_residue
    zeta2 = float(mp.zeta(2))
    s_product = 1.0
    for p in S_PRIMES:
        s_product *= 1.0 / (1.0 + 1.0 / p)
    l_s = finite_s_local_gl3(sys, class_rep_int(E_class), s)
    sym2v = sym2_partial(sys, 2 * s, X)
    tval, tspread = T_of_s(sys, s, X)
    value = (A_F / (H_C * zeta2)) * s_product * l_s * sym2v * tval
    comps = {
        "A_F": A_F,
        "h_C": H_C,
        "zeta_F_2": zeta2,
        "s_product": s_product,
        "L_S_factor": l_s,
        "sym2_partial": sym2v,
        "T": tval,
        "T_spread": tspread,
    }
    return ResidueReport(R1=complex(value), Rr=0j, T_of_s=tval, sym2_partial=sym2v, components=comps)


def class_rep_int(E_class: int) -> int:
    return (1, 3, 5, 7)[E_class]


def finite_s_local_gl3(sys: CoefficientSystem, e0: int, s: complex) -> complex:
    """prod_{p in S_f} L_p(s, pi x chi_E): the finite part of L_S."""
    s = complex(s)
    out = 1.0 + 0j
    for p in S_PRIMES:
        cv = int(gmpy2.kronecker(fundamental_disc(e0), p)) if e0 != 1 else 1
        if cv == 0:
            continue
        try:
            g = sys.satake(p)
        except DomainError:
            continue
        for gj in g:
            out *= 1.0 / (1.0 - gj * cv * float(p) ** (-s))
    return complex(out)


def hypothesis_probe(sys: CoefficientSystem, s_grid, x_ladder) -> dict:
    """Partial products of the four-factor Euler product across the X-ladder.

    Diagnostic only: reports the products and successive drifts per s.
    """
    report = {}
    for s in s_grid:
        s = complex(s)
        vals = []
        prod = 1.0 + 0j
        ladder = sorted(int(x) for x in x_ladder)
        primes = [p for p in sieve_primes(ladder[-1]) if p not in S_PRIMES]
        idx = 0
        for X in ladder:
            while idx < len(primes) and primes[idx] <= X:
                p = primes[idx]
                prod *= hypothesis_local_factor(sys, p, s)
                idx += 1
            vals.append(complex(prod))
        drifts = [abs(vals[i + 1] - vals[i]) / max(1e-300, abs(vals[i])) for i in range(len(vals) - 1)]
        report[s] = {"ladder": ladder, "values": vals, "drifts": drifts}
    return report


def hypothesis_local_factor(sys: CoefficientSystem, p: int, s: complex) -> complex:
    g1, g2, g3 = sys.satake(p)
    ap = sys.coeff_prime_powers(p, 1)[1]
    x = float(p) ** (-2 * complex(s))
    return (1 + ap * x) * (1 - g1 * g2 * x) * (1 - g2 * g3 * x) * (1 - g3 * g1 * x)


def switching_check(sys: CoefficientSystem, r: int, s: complex, X: int) -> float:
    """Residual of the switching identity between the r-coprime and the
    unrestricted weighted square-coefficient sums."""
    s = complex(s)
    pair = local_pair(sys, r, s)
    lhs = square_coeff_sum(sys, s, X, coprime_to=r) / (1.0 + 1.0 / r)
    rhs = square_coeff_sum(sys, s, X) / (1.0 / r + pair.L2_closed)
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# Dedekind residue identity


def dedekind_perprime_identity(chi_p: int) -> bool:
    """(1 - u^2)^{-1} (1 + chi u) = (1 - chi u)^{-1} for chi in {-1, +1}, and
    the chi = 0 branch, as exact integer polynomial identities."""
    if chi_p == 0:
        return True  # both sides are the bare (1 - u^2)^{-1} factor
    # cross-multiplied: (1 + chi u)(1 - chi u) == 1 - u^2
    lhs = _polymul([1, chi_p], [1, -chi_p])
    return lhs == [1, 0, -1]


def _polymul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def dedekind_residue_factor_check(
    chi_disc: int, N: int, w_samples=(2.0,), X: int = 10_000
) -> dict:
    """Prop-style factorization checks for zeta_F(2w) * (squarefree chi-sum).

    - per-prime polynomial identities for every prime <= 1000;
    - numeric factor-matched identity at the w samples;
    - the two limit branches at w -> 1 (Richardson at 1+1e-3, 1+1e-4).
    """
    for p, _ in _factor_odd(abs(chi_disc)):
        if chi_disc != 1 and N % p != 0:
            raise DomainError("odd ramified primes of chi must divide N (residue use case)")
    out = {"per_prime": True, "numeric": {}, "limit_branch": None}
    for p in sieve_primes(1000):
        chi_p = int(gmpy2.kronecker(chi_disc, p)) if chi_disc != 1 else 1
        if not dedekind_perprime_identity(chi_p):
            out["per_prime"] = False
    for w in w_samples:
        w = complex(w)
        lhs = 1.0 + 0j
        rhs = 1.0 + 0j
        for p in sieve_primes(X):
            u = float(p) ** (-w)
            in_excluded = (p in S_PRIMES) or (N % p == 0)
            chi_p = 0 if in_excluded else (int(gmpy2.kronecker(chi_disc, p)) if chi_disc != 1 else 1)
            lhs *= (1.0 / (1.0 - u * u)) * (1.0 + chi_p * u if not in_excluded else 1.0)
            if in_excluded:
                rhs *= 1.0 / (1.0 - u * u)
            else:
                if chi_p == 0:
                    rhs *= 1.0 / (1.0 - u * u)
                else:
                    rhs *= 1.0 / (1.0 - chi_p * u)
        out["numeric"][complex(w)] = abs(lhs - rhs) / max(1.0, abs(lhs))
    if chi_disc == 1:
        # trivial branch: (w-1) zeta_F(w) prod_{pinS or p|N} (1+p^-w)^{-1} -> A(F) * prod(1+1/p)^{-1}
        def f(wv):
            val = float((wv - 1) * mp.zeta(wv))
            for p in set(S_PRIMES) | {p for p, _ in _factor_odd(N)}:
                val *= 1.0 / (1.0 + float(p) ** (-wv))
            return val

        h1, h2 = 1e-3, 1e-4
        f1, f2 = f(1 + h1), f(1 + h2)
        richardson = (h1 * f2 - h2 * f1) / (h1 - h2)
        target = 1.0
        for p in set(S_PRIMES) | {p for p, _ in _factor_odd(N)}:
            target *= 1.0 / (1.0 + 1.0 / p)
        out["limit_branch"] = abs(richardson - target) / abs(target)
    else:
        # no-pole branch: (w-1) L^{S_N}(w, chi) small near w = 1
        w = 1 + 1e-4
        val = 1.0
        for p in sieve_primes(X):
            if p in S_PRIMES or N % p == 0:
                continue
            chi_p = int(gmpy2.kronecker(chi_disc, p))
            val *= 1.0 / (1.0 - chi_p * float(p) ** (-w))
        out["limit_branch"] = abs((w - 1) * val)
    return out


# ---------------------------------------------------------------------------
# scattering factor and residue consistency


def fe_full_ratio_gl3(sys: CoefficientSystem, d0: int, s: complex) -> complex:
    """eps * G(1-s) L_2(1-s) / (G(s) L_2(s)) for pi x chi_{d0}: the exact
    ratio with L^S(s) = ratio * L^S(1-s)."""
    s = complex(s)
    params = twisted_params(sys, d0)

    def G(z):
        out = params.conductor ** (z / 2.0)
        for m in params.shifts:
            out *= np.pi ** (-(z + m) / 2) * complex(cgamma((z + m) / 2))
        return out

    def L2(z):
        return finite_s_local_gl3(sys, d0, z)

    return params.root_number * G(1 - s) * L2(1 - s) / (G(s) * L2(s))


def scattering_M(sys: CoefficientSystem, E_class: int, s: complex) -> complex:
    """M(s, E) = [eps(s, pi x chi_E)/|E_0|^{3(1/2-s)}] prod_{v in S} L_v-ratio."""
    if not sys.arch_shifts_even:
        raise ConfigurationError("archimedean shift data missing")
    e0 = class_rep_int(E_class)
    s = complex(s)
    return fe_full_ratio_gl3(sys, e0, s) / float(e0) ** (3 * (0.5 - s))


def residue_consistency(
    sys: CoefficientSystem,
    ctx: SymbolContext,
    E_class: int,
    r: int,
    s: complex,
    X: int,
    field: BaseField | None = None,
) -> dict:
    """Residue of the squarefree series at w = 1, two routes.

    Route A expands over N with GL(1) residues (squarefree-part r only
    survives); route B is the closed product R_1 * R_r.  Both carry the same
    finite S-local factor, included for auditability.
    """
    s = complex(s)
    A_F = 1.0 if field is None else field.zeta_residue
    zeta2 = float(mp.zeta(2))
    em = eta_matrix(ctx)
    s_product = 1.0
    for p in S_PRIMES:
        s_product *= 1.0 / (1.0 + 1.0 / p)
    l_s = finite_s_local_gl3(sys, class_rep_int(E_class), s)
    if r == 1:
        routeA = (
            l_s * (A_F / (H_C * zeta2)) * s_product * square_coeff_sum(sys, s, int(X**0.5) + 1)
        )
        rep = R1(sys, ctx, E_class, s, X, field)
        routeB = rep.R1
    else:
        eta_val = int(em[E_class, class_index(r)])
        # sum over N = r^{2k+1} n2^2 <= X, (n2, r) = 1, with the N2-product
        # convention of the residue formula (the r-factor lives in R_r)
        aw = square_coeff_array(sys, int(np.sqrt(X)) + 1)
        a_sum = 0.0 + 0j
        kpow = r
        k = 0
        while kpow <= X:
            a_rodd = sys.coeff_prime_powers(r, 2 * k + 1)[2 * k + 1]
            lim = int(np.sqrt(X / kpow))
            for n2 in range(1, lim + 1, 2):
                if n2 % r == 0:
                    continue
                N = kpow * n2 * n2
                a_sum += a_rodd * aw[n2] * float(N) ** (-s)
            kpow *= r * r
            k += 1
        routeA = l_s * (A_F / (H_C * zeta2)) * s_product * eta_val * a_sum
        rep = R1(sys, ctx, E_class, s, X, field)
        routeB = rep.R1 * Rr(sys, ctx, E_class, r, s)
    denom = max(abs(routeA), abs(routeB), 1e-300)
    return {
        "route_expansion": complex(routeA),
        "route_closed": complex(routeB),
        "relative_deviation": abs(routeA - routeB) / denom,
    }
