"""Intersection of the canonical Hermitian surface with tangent quadrics.

The quadric under study is z = a*x^2 + b*y^2 + c*xy + d*x + e*y + f over
GF(q^2); it shares the tangent plane J = 0 with the Hermitian surface at
(0,0,0,1).  Substituting z into the Hermitian equation and splitting
GF(q^2) coordinates over the {1, eps} basis turns the affine intersection
into the affine part of a quadric of PG(4,q) ("the lift"); its section by
the hyperplane at infinity is a quadric of PG(3,q).  The pair of their
classes determines the affine intersection size through a fourteen-case
table, and adding the size of the common points at infinity gives
|H intersect Q| without any enumeration.

A brute-force oracle computes the same number by direct evaluation over
all of AG(3,q^2) plus a scan of the plane at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import NamedTuple, Optional

from .forms import (
    CONE_ELLIPTIC,
    CONE_HYPERBOLIC,
    CONE_POINT_CONIC,
    CONJUGATE_PAIR,
    ELLIPTIC,
    HYPERBOLIC,
    PARABOLIC,
    RATIONAL_PAIR,
    QuadraticForm,
    classify_pg3,
    classify_pg4,
    point_count,
    projective_points,
)
from .hermitian import HermitianSurface, ProjectiveLine, normalize_point, pg3_points


class CaseTableError(RuntimeError):
    """A class pair outside the case table; must never fire."""


class AffineQuadric(NamedTuple):
    """Coefficients of z = a x^2 + b y^2 + c xy + d x + e y + f over GF(q^2)."""

    a: int
    b: int
    c: int
    d: int
    e: int
    f: int


class InfinitySection(NamedTuple):
    """Common points of the two surfaces on the plane at infinity."""

    kind: str  # point | one-line | two-lines
    size: int
    directions: tuple  # the norm-one slopes of the shared lines


@dataclass
class IntersectionReport:
    q: int
    coeffs: AffineQuadric
    species: str
    cinf_kind: str
    cinf_size: int
    case: str
    n_affine: int
    size_total: int
    rank_lift: int
    species_lift: str
    rank_inf: int
    species_inf: str
    oracle_size: Optional[int] = None
    ovoid: Optional[bool] = None
    permutable: Optional[bool] = None


def classify_quadric(ctx, quad: AffineQuadric) -> str:
    """hyperbolic | elliptic | cone | reducible, from (a, b, c) alone."""
    a, b, c = quad.a, quad.b, quad.c
    if c:
        t = ctx.m2(ctx.m2(a, b), ctx.i2(ctx.s2(c)))
        return HYPERBOLIC if ctx.trace2[t] == 0 else ELLIPTIC
    if a or b:
        return "cone"
    return "reducible"


def infinity_section(ctx, quad: AffineQuadric) -> InfinitySection:
    """Classify the shared points on J = 0 by scanning slope directions.

    Both surfaces meet J = 0 in lines through (0,0,0,1); the Hermitian
    cone consists of the slopes X = lam*Y with lam^(q+1) = 1, so it
    suffices to test the q+1 norm-one slopes against a*lam^2 + c*lam + b.
    """
    a, b, c = quad.a, quad.b, quad.c
    if not (a or b or c):
        raise ValueError("reducible quadric has no infinity section")
    m2, s2 = ctx.m2, ctx.s2
    roots = tuple(lam for lam in ctx.norm_one
                  if (m2(a, s2(lam)) ^ m2(c, lam) ^ b) == 0)
    k = len(roots)
    if k and classify_quadric(ctx, quad) == ELLIPTIC:
        raise CaseTableError("elliptic quadric with a shared line at infinity")
    if k == 0:
        return InfinitySection("point", 1, roots)
    if k == 1:
        return InfinitySection("one-line", ctx.q2 + 1, roots)
    if k == 2:
        return InfinitySection("two-lines", 2 * ctx.q2 + 1, roots)
    raise CaseTableError(f"{k} shared lines at infinity; a binary quadric has at most 2")


def subfield_lift(ctx, quad: AffineQuadric) -> tuple[QuadraticForm, QuadraticForm]:
    """The PG(4,q) lift and its PG(3,q) section at infinity.

    Variables are ordered (x0, x1, y0, y1, w) with w the homogenizer;
    x = x0 + eps*x1 and so on.
    """
    mul, nu = ctx.mul, ctx.nu
    nu1 = nu ^ 1  # 1 + nu
    a0, a1 = ctx.split(quad.a)
    b0, b1 = ctx.split(quad.b)
    c0, c1 = ctx.split(quad.c)
    d0, d1 = ctx.split(quad.d)
    e0, e1 = ctx.split(quad.e)
    _, f1 = ctx.split(quad.f)

    dx0 = a1 ^ 1
    dx1 = a0 ^ mul[nu1][a1] ^ nu
    dy0 = b1 ^ 1
    dy1 = b0 ^ mul[nu1][b1] ^ nu
    c_sum = c0 ^ c1
    c_mix = c0 ^ mul[nu1][c1]

    inf4 = QuadraticForm(4, (dx0, dx1, dy0, dy1,
                             1, c1, c_sum, c_sum, c_mix, 1))
    lift5 = QuadraticForm(5, (dx0, dx1, dy0, dy1, f1,
                              1, c1, c_sum, d1,
                              c_sum, c_mix, d0 ^ d1,
                              1, e1,
                              e0 ^ e1))
    return lift5, inf4


# case label -> N as a function of q
CASE_N = {
    "C1.1": lambda q: q ** 3 - q,
    "C1.2": lambda q: q ** 3 + q,
    "C2": lambda q: q ** 3,
    "C3.1": lambda q: q ** 3 + q * q - q,
    "C3.2": lambda q: q ** 3 - q * q + q,
    "C4.1": lambda q: q ** 3 + q * q,
    "C4.2": lambda q: q ** 3 - q * q,
    "C5.1": lambda q: q ** 3,
    "C5.2": lambda q: q ** 3,
    "C6": lambda q: q ** 3,
    "C7.1": lambda q: q ** 3 - q * q,
    "C7.2": lambda q: q ** 3 + q * q,
    "C8.1": lambda q: 2 * q ** 3 - q * q,
    "C8.2": lambda q: q * q,
}


def resolve_case(cls_lift, cls_inf) -> str:
    """Map the (lift, infinity-section) class pair to its case label."""
    rl, ri = cls_lift.rank, cls_inf.rank
    sl, si = cls_lift.species, cls_inf.species
    if (rl, ri) == (5, 4):
        if sl == PARABOLIC and si == HYPERBOLIC:
            return "C1.1"
        if sl == PARABOLIC and si == ELLIPTIC:
            return "C1.2"
    elif (rl, ri) == (5, 3):
        return "C2"
    elif (rl, ri) == (4, 4):
        if (sl, si) == (CONE_HYPERBOLIC, HYPERBOLIC):
            return "C3.1"
        if (sl, si) == (CONE_ELLIPTIC, ELLIPTIC):
            return "C3.2"
    elif (rl, ri) == (4, 3):
        if sl == CONE_HYPERBOLIC:
            return "C4.1"
        if sl == CONE_ELLIPTIC:
            return "C4.2"
    elif (rl, ri) == (4, 2):
        if (sl, si) == (CONE_HYPERBOLIC, RATIONAL_PAIR):
            return "C5.1"
        if (sl, si) == (CONE_ELLIPTIC, CONJUGATE_PAIR):
            return "C5.2"
    elif (rl, ri) == (3, 3):
        return "C6"
    elif (rl, ri) == (3, 2):
        if sl == CONE_POINT_CONIC and si == RATIONAL_PAIR:
            return "C7.1"
        if sl == CONE_POINT_CONIC and si == CONJUGATE_PAIR:
            return "C7.2"
    elif (rl, ri) == (2, 2):
        if (sl, si) == (RATIONAL_PAIR, RATIONAL_PAIR):
            return "C8.1"
        if (sl, si) == (CONJUGATE_PAIR, CONJUGATE_PAIR):
            return "C8.2"
    raise CaseTableError(
        f"class pair outside the case table: lift={sl} (rank {rl}), infinity={si} (rank {ri})")


def fast_intersection_size(ctx, quad: AffineQuadric) -> IntersectionReport:
    """|H intersect Q| via the PG(4,q) reduction, no enumeration."""
    species = classify_quadric(ctx, quad)
    if species == "reducible":
        raise ValueError("reducible quadric: no intersection report")
    cinf = infinity_section(ctx, quad)
    lift5, inf4 = subfield_lift(ctx, quad)
    cls_inf = classify_pg3(inf4, ctx)
    cls_lift = classify_pg4(lift5, ctx)
    label = resolve_case(cls_lift, cls_inf)
    q = ctx.q
    n_affine = point_count(cls_lift, 4, q) - point_count(cls_inf, 3, q)
    if n_affine != CASE_N[label](q):
        raise CaseTableError(f"case {label}: N={n_affine} disagrees with the table")
    return IntersectionReport(
        q=q, coeffs=quad, species=species,
        cinf_kind=cinf.kind, cinf_size=cinf.size,
        case=label, n_affine=n_affine, size_total=n_affine + cinf.size,
        rank_lift=cls_lift.rank, species_lift=cls_lift.species,
        rank_inf=cls_inf.rank, species_inf=cls_inf.species)


def oracle_intersection_size(ctx, quad: AffineQuadric) -> int:
    """|H intersect Q| by direct evaluation: all affine (x, y) plus a scan
    of the plane at infinity on both surfaces."""
    a, b, c, d, e, f = quad
    h = ctx.h
    q2 = ctx.q2
    m2, s2, norm2 = ctx.m2, ctx.s2, ctx.norm2
    count = 0
    for x in range(q2):
        tx = m2(a, s2(x)) ^ m2(d, x) ^ f
        cx_e = m2(c, x) ^ e
        nx = norm2[x]
        for y in range(q2):
            z = tx ^ m2(b, s2(y)) ^ m2(cx_e, y)
            if (z >> h) == nx ^ norm2[y]:
                count += 1
    # plane at infinity: points (0, X, Y, Z), first nonzero coordinate 1
    for x, y, _ in projective_points(3, q2):
        on_h = (norm2[x] ^ norm2[y]) == 0
        if on_h and (m2(a, s2(x)) ^ m2(b, s2(y)) ^ m2(c, m2(x, y))) == 0:
            count += 1
    return count


# ---------------------------------------------------------------------------
# normalized families
# ---------------------------------------------------------------------------

FAMILY_KINDS = ("hyp-point", "hyp-line", "hyp-twolines", "cone-point", "cone-line", "elliptic")


def family_quadratic_parts(ctx, kind: str):
    """The (a, b, c) triples of a normalized family, in lex order."""
    q2 = ctx.q2
    if kind == "hyp-point":
        parts = [(a, 0, c) for a in range(q2) for c in range(1, q2)
                 if ctx.norm2[a] != ctx.norm2[c]]
    elif kind == "hyp-line":
        parts = [(c, 0, c) for c in range(1, q2)]
    elif kind == "hyp-twolines":
        parts = [(a, ctx.m2(beta, a), ctx.m2(beta ^ 1, a))
                 for a in range(1, q2) for beta in ctx.norm_one if beta != 1]
    elif kind == "cone-point":
        parts = [(a, 0, 0) for a in range(1, q2)]
    elif kind == "cone-line":
        parts = [(a, a, 0) for a in range(1, q2)]
    elif kind == "elliptic":
        parts = [(a, b, c) for a in range(q2) for b in range(q2) for c in range(1, q2)
                 if ctx.trace2[ctx.m2(ctx.m2(a, b), ctx.i2(ctx.s2(c)))] == 1]
    else:
        raise ValueError(f"unknown family kind {kind!r}; choose from {FAMILY_KINDS}")
    return sorted(set(parts))


def normalized_family(ctx, kind: str):
    """All quadrics of the family, sweeping the free coefficients."""
    q2 = ctx.q2
    for a, b, c in family_quadratic_parts(ctx, kind):
        for d, e, f in product(range(q2), repeat=3):
            yield AffineQuadric(a, b, c, d, e, f)


# ---------------------------------------------------------------------------
# quadric geometry over GF(q^2): reguli and extremal configurations
# ---------------------------------------------------------------------------


def quadric_contains(ctx, quad: AffineQuadric, p) -> bool:
    """Membership in the projective closure Z*J = a X^2 + ... + f J^2."""
    a, b, c, d, e, f = quad
    m2, s2 = ctx.m2, ctx.s2
    j, x, y, z = p
    acc = m2(a, s2(x)) ^ m2(b, s2(y)) ^ m2(c, m2(x, y))
    if j:
        acc ^= m2(j, m2(d, x) ^ m2(e, y) ^ z) ^ m2(f, s2(j))
    return acc == 0


def quadric_polar(ctx, quad: AffineQuadric, u, v) -> int:
    """Polar form of the projective closure over GF(q^2)."""
    m2 = ctx.m2
    a, b, c, d, e, f = quad
    acc = m2(u[0], v[3]) ^ m2(u[3], v[0])
    if d:
        acc ^= m2(d, m2(u[0], v[1]) ^ m2(u[1], v[0]))
    if e:
        acc ^= m2(e, m2(u[0], v[2]) ^ m2(u[2], v[0]))
    if c:
        acc ^= m2(c, m2(u[1], v[2]) ^ m2(u[2], v[1]))
    return acc


def quadric_points(ctx, quad: AffineQuadric):
    return [p for p in pg3_points(ctx) if quadric_contains(ctx, quad, p)]


def quadric_tangent_plane(ctx, quad: AffineQuadric, p):
    """Dual coordinates of the tangent plane at a smooth point."""
    a, b, c, d, e, f = quad
    m2 = ctx.m2
    j, x, y, z = p
    w = (m2(d, x) ^ m2(e, y) ^ z,
         m2(d, j) ^ m2(c, y),
         m2(e, j) ^ m2(c, x),
         j)
    return normalize_point(w, ctx)


def _lines_on_quadric_through(ctx, quad, p, points):
    """The lines on the quadric through p (two for a hyperbolic quadric).

    Points u of the quadric with B(p, u) = 0 span lines fully contained in
    it, since F(s*p + t*u) = s*t*B(p, u).
    """
    section = [u for u in points if u != p and quadric_polar(ctx, quad, p, u) == 0]
    lines = []
    covered = set()
    for u in section:
        if u in covered:
            continue
        line = ProjectiveLine(p, u, ctx)
        lines.append(line)
        covered.update(line.points)
    lines.sort(key=lambda ln: ln.key)
    return lines


def reguli(ctx, quad: AffineQuadric):
    """The two families of q^2+1 pairwise-disjoint lines ruling the quadric."""
    if classify_quadric(ctx, quad) != HYPERBOLIC:
        raise ValueError("reguli exist only for hyperbolic quadrics")
    points = quadric_points(ctx, quad)
    p0 = points[0]
    seed_lines = _lines_on_quadric_through(ctx, quad, p0, points)
    if len(seed_lines) != 2:
        raise CaseTableError(f"{len(seed_lines)} lines through a point of a hyperbolic quadric")
    g1, g2 = seed_lines

    def family_meeting(transversal):
        fam = []
        for u in transversal.points:
            pair = _lines_on_quadric_through(ctx, quad, u, points)
            others = [ln for ln in pair if ln != transversal]
            if len(pair) != 2 or len(others) != 1:
                raise CaseTableError("point of a hyperbolic quadric not on exactly 2 lines")
            fam.append(others[0])
        return fam

    r1 = family_meeting(g2)
    r2 = family_meeting(g1)
    if len(set(r1)) != ctx.q2 + 1 or len(set(r2)) != ctx.q2 + 1:
        raise CaseTableError("regulus does not have q^2+1 distinct lines")
    return r1, r2


def regulus_secant_distribution(ctx, quad: AffineQuadric, regulus):
    """(r1, r2, r3): tangent / (q+1)-secant / generator counts against H."""
    surface = HermitianSurface(ctx)
    counts = {"tangent": 0, "secant": 0, "generator": 0}
    for line in regulus:
        kind, _ = surface.line_meet_type(line)
        counts[kind] += 1
    return counts["tangent"], counts["secant"], counts["generator"]


def intersection_points(ctx, quad: AffineQuadric):
    surface = HermitianSurface(ctx)
    return [p for p in quadric_points(ctx, quad) if surface.contains(p)]


def check_ovoid(ctx, quad: AffineQuadric) -> bool:
    """Minimal-size intersections: one point on every generator, and the
    two tangent planes coincide at each of the q^2+1 common points."""
    q = ctx.q
    omega = intersection_points(ctx, quad)
    if len(omega) != q * q + 1:
        raise ValueError(f"check_ovoid precondition: size {len(omega)} != q^2+1")
    omega_set = set(omega)
    r1, r2 = reguli(ctx, quad)
    for line in r1 + r2:
        if sum(1 for p in line.points if p in omega_set) != 1:
            return False
    surface = HermitianSurface(ctx)
    for p in omega:
        if surface.tangent_plane(p) != quadric_tangent_plane(ctx, quad, p):
            return False
    return True


def check_permutable(ctx, quad: AffineQuadric):
    """Maximal-size intersections: some regulus has >= 3 generators inside H.

    Returns (ok, (dist1, dist2)) with each dist = (r1, r2, r3).
    """
    q = ctx.q
    omega = intersection_points(ctx, quad)
    expected = 2 * q ** 3 + q * q + 1
    if len(omega) != expected:
        raise ValueError(f"check_permutable precondition: size {len(omega)} != 2q^3+q^2+1")
    r1, r2 = reguli(ctx, quad)
    d1 = regulus_secant_distribution(ctx, quad, r1)
    d2 = regulus_secant_distribution(ctx, quad, r2)
    return (d1[2] >= 3 or d2[2] >= 3), (d1, d2)
