"""Exact rational calculus of the functional-equation group and regions.

Affine maps act on (s, w); regions are finite unions of convex pieces, each
an intersection of rational half-planes in the real-part plane (sigma, tau).
Convex hulls of unions (possibly unbounded) are computed by homogenizing
generators (vertices and recession rays) into a 3-d cone and enumerating
facets by exact cross products, so 'the hull is the whole plane' is a
decidable outcome (empty constraint list).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .ringarith import DomainError

F = Fraction


# ---------------------------------------------------------------------------
# affine maps


@dataclass(frozen=True)
class AffineMap2:
    """x -> A x + b with exact rational entries."""

    a11: Fraction
    a12: Fraction
    a21: Fraction
    a22: Fraction
    b1: Fraction
    b2: Fraction

    def __call__(self, pt):
        x, y = pt
        return (
            self.a11 * x + self.a12 * y + self.b1,
            self.a21 * x + self.a22 * y + self.b2,
        )

    def compose(self, other: "AffineMap2") -> "AffineMap2":
        """self after other: x -> self(other(x))."""
        return AffineMap2(
            a11=self.a11 * other.a11 + self.a12 * other.a21,
            a12=self.a11 * other.a12 + self.a12 * other.a22,
            a21=self.a21 * other.a11 + self.a22 * other.a21,
            a22=self.a21 * other.a12 + self.a22 * other.a22,
            b1=self.a11 * other.b1 + self.a12 * other.b2 + self.b1,
            b2=self.a21 * other.b1 + self.a22 * other.b2 + self.b2,
        )

    def det(self) -> Fraction:
        return self.a11 * self.a22 - self.a12 * self.a21

    def inverse(self) -> "AffineMap2":
        d = self.det()
        if d == 0:
            raise DomainError("singular affine map")
        i11, i12 = self.a22 / d, -self.a12 / d
        i21, i22 = -self.a21 / d, self.a11 / d
        return AffineMap2(
            a11=i11,
            a12=i12,
            a21=i21,
            a22=i22,
            b1=-(i11 * self.b1 + i12 * self.b2),
            b2=-(i21 * self.b1 + i22 * self.b2),
        )


def identity_map() -> AffineMap2:
    return AffineMap2(F(1), F(0), F(0), F(1), F(0), F(0))


def phi_map() -> AffineMap2:
    """phi(s, w) = (1 - s, w + 3s - 3/2)."""
    return AffineMap2(F(-1), F(0), F(3), F(1), F(1), F(-3, 2))


def psi_map() -> AffineMap2:
    """psi(s, w) = (s + w - 1/2, 1 - w)."""
    return AffineMap2(F(1), F(1), F(0), F(-1), F(-1, 2), F(1))


def generate_group(phi: AffineMap2 | None = None, psi: AffineMap2 | None = None, cap: int = 100) -> list:
    """Closure of {phi, psi} under composition (expected: dihedral, order 12)."""
    phi = phi or phi_map()
    psi = psi or psi_map()
    seen = {identity_map(), phi, psi}
    frontier = [phi, psi]
    steps = 0
    while frontier:
        steps += 1
        if steps > cap:
            raise ArithmeticError("group closure not reached within composition cap")
        new = []
        for g in frontier:
            for h in (phi, psi):
                for cand in (g.compose(h), h.compose(g)):
                    if cand not in seen:
                        seen.add(cand)
                        new.append(cand)
        frontier = new
    return sorted(seen, key=lambda m: (m.a11, m.a12, m.a21, m.a22, m.b1, m.b2))


def fixed_points(m: AffineMap2):
    """Solution set of m(x) = x: ('point', (x,y)) | ('line', (a,b,c)) with
    ax + by = c | ('plane', None) | ('empty', None)."""
    a, b = m.a11 - 1, m.a12
    c, d = m.a21, m.a22 - 1
    r1, r2 = -m.b1, -m.b2
    det = a * d - b * c
    if det != 0:
        x = (r1 * d - b * r2) / det
        y = (a * r2 - r1 * c) / det
        return ("point", (x, y))
    if a == b == 0 and c == d == 0:
        if r1 == 0 and r2 == 0:
            return ("plane", None)
        return ("empty", None)
    if a == b == 0:
        if r1 != 0:
            return ("empty", None)
        return ("line", (c, d, r2))
    if (a * r2 - c * r1 == 0) and (b * r2 - d * r1 == 0):
        return ("line", (a, b, r1))
    return ("empty", None)


# ---------------------------------------------------------------------------
# lines (polar divisors)


@dataclass(frozen=True)
class RationalLine:
    """a*s + b*w = c, normalized so the leading nonzero of (a, b) is positive."""

    a: Fraction
    b: Fraction
    c: Fraction

    @staticmethod
    def make(a, b, c) -> "RationalLine":
        a, b, c = F(a), F(b), F(c)
        if a == 0 and b == 0:
            raise DomainError("degenerate line")
        lead = a if a != 0 else b
        if lead < 0:
            a, b, c = -a, -b, -c
        g = abs(lead)
        return RationalLine(a / g, b / g, c / g)

    def contains(self, pt) -> bool:
        return self.a * pt[0] + self.b * pt[1] == self.c


def completion_polynomial_lines() -> list:
    """Zero lines of P(s, w) = w (w-1)(w+3s-3/2)(w+3s-5/2)(3s+2w-3)."""
    return [
        RationalLine.make(0, 1, 0),
        RationalLine.make(0, 1, 1),
        RationalLine.make(3, 1, F(3, 2)),
        RationalLine.make(3, 1, F(5, 2)),
        RationalLine.make(3, 2, 3),
    ]


def transport_line(m: AffineMap2, line: RationalLine) -> RationalLine:
    """Image of the line under m (pull the equation back through m^{-1})."""
    inv = m.inverse()
    # (a,b).(inv(x)) = c
    a = line.a * inv.a11 + line.b * inv.a21
    b = line.a * inv.a12 + line.b * inv.a22
    c = line.c - (line.a * inv.b1 + line.b * inv.b2)
    return RationalLine.make(a, b, c)


def transport_poles(m: AffineMap2, lines) -> list:
    return [transport_line(m, line) for line in lines]


# ---------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class HalfPlane:
    """a*sigma + b*tau > c (strict=True) or >= c (strict=False)."""

    a: Fraction
    b: Fraction
    c: Fraction
    strict: bool = True

    def holds(self, pt) -> bool:
        v = self.a * pt[0] + self.b * pt[1]
        return v > self.c if self.strict else v >= self.c

    def holds_closure(self, pt) -> bool:
        return self.a * pt[0] + self.b * pt[1] >= self.c


@dataclass(frozen=True)
class ConvexPiece:
    halfplanes: tuple

    def contains(self, pt) -> bool:
        return all(h.holds(pt) for h in self.halfplanes)

    def closure_contains(self, pt) -> bool:
        return all(h.holds_closure(pt) for h in self.halfplanes)


@dataclass(frozen=True)
class Region:
    pieces: tuple

    def contains(self, pt) -> bool:
        return any(p.contains(pt) for p in self.pieces)

    def closure_contains(self, pt) -> bool:
        return any(p.closure_contains(pt) for p in self.pieces)

    def is_whole_plane(self) -> bool:
        return any(not p.halfplanes for p in self.pieces)


def piece(*hps) -> ConvexPiece:
    return ConvexPiece(halfplanes=tuple(hps))


def hp(a, b, c, strict: bool = True) -> HalfPlane:
    return HalfPlane(a=F(a), b=F(b), c=F(c), strict=strict)


def region_R1(eps: Fraction = F(0)) -> Region:
    """Rough-continuation region: two convex case-systems.

    With eps = 0 each three-case system collapses to the intersection of its
    three half-planes (the piecewise bounds are continuous and convex); for
    eps > 0 the case strips are kept separate.
    """
    if eps == 0:
        p1 = piece(hp(3, 1, F(5, 2)), hp(F(3, 2), 1, F(85, 28)), hp(0, 1, 1))
        p2 = piece(hp(1, 1, F(13, 7)), hp(1, F(1, 2), F(13, 7)), hp(1, 0, F(19, 14)))
        return Region(pieces=(p1, p2))
    e = F(eps)
    pieces = [
        piece(hp(3, 1, F(5, 2)), hp(-1, 0, F(5, 14) + e, strict=False)),
        piece(
            hp(F(3, 2), 1, F(85, 28)),
            hp(1, 0, -F(5, 14) - e),
            hp(-1, 0, -F(19, 14) - e),
        ),
        piece(hp(0, 1, 1), hp(1, 0, F(19, 14) + e, strict=False)),
        piece(hp(1, 1, F(13, 7)), hp(0, -1, e, strict=False)),
        piece(hp(1, F(1, 2), F(13, 7)), hp(0, 1, -e), hp(0, -1, -1 - e)),
        piece(hp(1, 0, F(19, 14)), hp(0, 1, 1 + e, strict=False)),
    ]
    return Region(pieces=tuple(pieces))


def region_prop56() -> Region:
    """{sigma > 1/2, tau > 119/124} u {0 <= sigma <= 1/2, tau > -(191/62) sigma + 5/2}."""
    p1 = piece(hp(1, 0, F(1, 2)), hp(0, 1, F(119, 124)))
    p2 = piece(
        hp(1, 0, 0, strict=False),
        hp(-1, 0, -F(1, 2), strict=False),
        hp(F(191, 62), 1, F(5, 2)),
    )
    return Region(pieces=(p1, p2))


def transform_region(m: AffineMap2, region: Region) -> Region:
    """Image m(region); half-planes pull back through m^{-1}."""
    inv = m.inverse()
    out = []
    for p in region.pieces:
        hps = []
        for h in p.halfplanes:
            a = h.a * inv.a11 + h.b * inv.a21
            b = h.a * inv.a12 + h.b * inv.a22
            c = h.c - (h.a * inv.b1 + h.b * inv.b2)
            hps.append(HalfPlane(a=a, b=b, c=c, strict=h.strict))
        out.append(ConvexPiece(halfplanes=tuple(hps)))
    return Region(pieces=tuple(out))


def union(*regions: Region) -> Region:
    return Region(pieces=tuple(p for r in regions for p in r.pieces))


# -- V-representation of a convex piece -------------------------------------


def _line_intersection(h1: HalfPlane, h2: HalfPlane):
    det = h1.a * h2.b - h2.a * h1.b
    if det == 0:
        return None
    x = (h1.c * h2.b - h2.c * h1.b) / det
    y = (h1.a * h2.c - h2.a * h1.c) / det
    return (x, y)


def piece_generators(p: ConvexPiece):
    """(vertices, rays, interior_point) of a nonempty convex piece.

    Vertices: feasible pairwise boundary intersections.  Rays: extreme rays
    of the recession cone {d : a.d >= 0 for all half-planes}.
    """
    hps = list(p.halfplanes)
    if not hps:
        # whole plane: spanned by four axis rays and the origin
        return (
            [(F(0), F(0))],
            [(F(1), F(0)), (F(-1), F(0)), (F(0), F(1)), (F(0), F(-1))],
            (F(0), F(0)),
        )
    verts = []
    for h1, h2 in itertools.combinations(hps, 2):
        pt = _line_intersection(h1, h2)
        if pt is None:
            continue
        if all(hh.holds_closure(pt) for hh in hps):
            verts.append(pt)
    # recession cone: boundary directions of each half-plane, kept if feasible
    rays = []
    cand = []
    for h in hps:
        cand.extend([(h.b, -h.a), (-h.b, h.a)])
    for d in cand:
        if all(h.a * d[0] + h.b * d[1] >= 0 for h in hps):
            rays.append(_normalize_dir(d))
    rays = sorted(set(rays))
    interior = _interior_point(hps, verts, rays)
    if interior is None:
        raise DomainError("empty convex piece")
    # a closure point on each face, so facet enumeration always sees the
    # boundary even when pairwise intersections are absent
    for h in hps:
        n2 = h.a * h.a + h.b * h.b
        t = (h.a * interior[0] + h.b * interior[1] - h.c) / n2
        proj = (interior[0] - t * h.a, interior[1] - t * h.b)
        if all(hh.holds_closure(proj) for hh in hps):
            verts.append(proj)
    if not verts:
        verts = [interior]
    return verts, rays, interior


def _normalize_dir(d):
    a, b = F(d[0]), F(d[1])
    if a == 0 and b == 0:
        raise DomainError("zero direction")
    g = abs(a) if a != 0 else abs(b)
    # normalize by max-abs component for a canonical representative
    m = max(abs(a), abs(b))
    return (a / m, b / m)


def _interior_point(hps, verts, rays):
    seeds = list(verts)
    if verts:
        cx = sum(v[0] for v in verts) / len(verts)
        cy = sum(v[1] for v in verts) / len(verts)
        seeds.append((cx, cy))
    else:
        seeds.append((F(0), F(0)))
    push = rays or [(F(0), F(0))]
    for base in seeds:
        for scale in (F(0), F(1), F(7, 2), F(25)):
            for d in push:
                cand = (base[0] + scale * d[0], base[1] + scale * d[1])
                if all(h.holds(cand) for h in hps):
                    return cand
    # strictness may require nudging along combined directions
    for base in seeds:
        for d1 in push:
            for d2 in push:
                cand = (base[0] + d1[0] + d2[0] + F(1, 17), base[1] + d1[1] + d2[1] + F(1, 13))
                if all(h.holds(cand) for h in hps):
                    return cand
    return None


def hull(*regions: Region) -> Region:
    """Convex hull of a union of convex pieces, exact.

    Homogenize generators: vertices (x, y, 1) and rays (x, y, 0); facets of
    the hull are planes through pairs of generators with every generator on
    one side.  No surviving facet means the hull is the whole plane.
    """
    gens = []
    for r in regions:
        for p in r.pieces:
            verts, rays, _ = piece_generators(p)
            gens.extend((v[0], v[1], F(1)) for v in verts)
            gens.extend((d[0], d[1], F(0)) for d in rays)
    if not gens:
        raise DomainError("hull of empty input")
    gens = list(dict.fromkeys(gens))
    facets = []
    for g1, g2 in itertools.combinations(gens, 2):
        n = _cross3(g1, g2)
        if n == (F(0), F(0), F(0)):
            continue
        for sgn in (1, -1):
            a, b, c = sgn * n[0], sgn * n[1], sgn * n[2]
            if all(a * g[0] + b * g[1] + c * g[2] >= 0 for g in gens):
                if a == 0 and b == 0:
                    continue  # horizon facet, no (sigma, tau) constraint
                facets.append(HalfPlane(a=a, b=b, c=-c, strict=True))
    # dedupe up to positive scaling
    seen = {}
    for h in facets:
        m = max(abs(h.a), abs(h.b))
        key = (h.a / m, h.b / m, h.c / m)
        seen[key] = HalfPlane(a=key[0], b=key[1], c=key[2], strict=True)
    return Region(pieces=(ConvexPiece(halfplanes=tuple(seen.values())),))


def _cross3(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def continuation_pipeline(eps: Fraction = F(0)) -> dict:
    """R1 -> R2 = hull(R1 u phi R1) -> R3 = hull(R2 u psi R2) -> final."""
    phi, psi = phi_map(), psi_map()
    r1 = region_R1(eps)
    r2 = hull(r1, transform_region(phi, r1))
    r3 = hull(r2, transform_region(psi, r2))
    final = hull(r3, transform_region(phi, r3))
    return {"R1": r1, "R2": r2, "R3": r3, "final": final}


def box_coverage(region: Region, lo: int = -100, hi: int = 100, steps: int = 201) -> bool:
    """Exact membership of a (steps x steps) rational grid on [lo, hi]^2."""
    if steps < 2:
        raise DomainError("need at least a 2x2 grid")
    span = F(hi - lo)
    for i in range(steps):
        x = F(lo) + span * i / (steps - 1)
        for j in range(steps):
            y = F(lo) + span * j / (steps - 1)
            if not region.contains((x, y)):
                return False
    return True


# ---------------------------------------------------------------------------
# completion factor descriptors


@dataclass(frozen=True)
class CompletionFactor:
    """P(s,w) as linear forms; Phi/Psi as per-prime factor descriptors on S_f."""

    linear_forms: tuple  # RationalLine list: the polar-candidate arrangement
    s_primes: tuple

    @staticmethod
    def standard(s_primes=(2,)) -> "CompletionFactor":
        return CompletionFactor(
            linear_forms=tuple(completion_polynomial_lines()), s_primes=tuple(s_primes)
        )

    def poly_value(self, s: complex, w: complex) -> complex:
        out = 1.0 + 0.0j
        for line in self.linear_forms:
            out *= float(line.a) * s + float(line.b) * w - float(line.c)
        return out

    def phi_factor(self, sys, s: complex, alpha_sign: int = 1) -> complex:
        out = 1.0 + 0.0j
        for p in self.s_primes:
            try:
                g = sys.satake(p)
            except Exception:
                continue  # ramified S-prime contributes no factor
            for gj in g:
                out *= 1.0 - alpha_sign * gj**2 * float(p) ** -(2.0 - 2.0 * complex(s))
        return out

    def psi_factor(self, beta_sign: int, w: complex) -> complex:
        out = 1.0 + 0.0j
        for p in self.s_primes:
            out *= 1.0 - (beta_sign**2) * float(p) ** -(2.0 - 2.0 * complex(w))
        return out


def polar_divisor(xi: CompletionFactor) -> list:
    """The rational polar-candidate lines of the completed series (zeros of P)."""
    return list(xi.linear_forms)
