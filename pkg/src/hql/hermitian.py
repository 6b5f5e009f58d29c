"""The canonical Hermitian surface of PG(3,q^2): z^q + z = x^(q+1) + y^(q+1).

Homogeneous coordinates are (J, X, Y, Z) over GF(q^2); the homogenized
equation is X^(q+1) + Y^(q+1) + Z^q J + Z J^q = 0.  The hyperplane at
infinity J = 0 is the tangent plane at the distinguished point
P_inf = (0,0,0,1).

Points are 4-tuples of GF(q^2) codes, normalized so the first nonzero
coordinate is 1.  Lines carry their full point set and a canonical key
(the two lexicographically least points), so equal lines compare equal.
"""

from __future__ import annotations

from .forms import projective_points


P_INF = (0, 0, 0, 1)


class ConsistencyError(RuntimeError):
    """An exact identity of the geometry failed; indicates a defect."""


def normalize_point(p, ctx):
    for k, v in enumerate(p):
        if v:
            if v == 1:
                return tuple(p)
            s = ctx.i2(v)
            return tuple(0 if x == 0 else ctx.m2(s, x) for x in p)
    raise ValueError("zero vector is not a projective point")


def pg3_points(ctx):
    """All points of PG(3,q^2), normalized, in lex order."""
    return projective_points(4, ctx.q2)


class ProjectiveLine:
    """Line of PG(3,q^2) spanned by two distinct points."""

    __slots__ = ("points", "key")

    def __init__(self, p1, p2, ctx):
        p1 = normalize_point(p1, ctx)
        p2 = normalize_point(p2, ctx)
        if p1 == p2:
            raise ValueError("a line needs two distinct points")
        pts = {p2}
        for t in range(ctx.q2):
            v = tuple(a ^ ctx.m2(t, b) for a, b in zip(p1, p2))
            pts.add(normalize_point(v, ctx))
        if len(pts) != ctx.q2 + 1:
            raise ConsistencyError("line span does not have q^2+1 points")
        self.points = tuple(sorted(pts))
        self.key = self.points[:2]

    def __eq__(self, other):
        return isinstance(other, ProjectiveLine) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"ProjectiveLine({self.key[0]}, {self.key[1]})"


def all_lines(ctx):
    """Every line of PG(3,q^2); feasible for q = 2 (357 lines at q^2 = 4)."""
    points = list(pg3_points(ctx))
    seen = set()
    out = []
    for i, p in enumerate(points):
        for v in points[i + 1:]:
            line = ProjectiveLine(p, v, ctx)
            if line.key not in seen:
                seen.add(line.key)
                out.append(line)
    return out


class HermitianSurface:
    """Membership, tangent planes and line-meet types for the canonical H."""

    def __init__(self, ctx):
        self.ctx = ctx

    def contains(self, p) -> bool:
        ctx = self.ctx
        j, x, y, z = p
        u = ctx.m2(z, ctx.frob2[j])
        return (ctx.norm2[x] ^ ctx.norm2[y] ^ (u >> ctx.h)) == 0

    def points(self):
        return (p for p in pg3_points(self.ctx) if self.contains(p))

    def point_count_scan(self) -> int:
        return sum(1 for _ in self.points())

    def expected_point_count(self) -> int:
        q = self.ctx.q
        return (q * q + 1) * (q ** 3 + 1)

    def tangent_plane(self, p):
        """Dual coordinates of the polar plane of a point on H, normalized."""
        if not self.contains(p):
            raise ValueError("tangent plane requested at a point not on the surface")
        ctx = self.ctx
        fr = ctx.frob2
        j, x, y, z = p
        return normalize_point((fr[z], fr[x], fr[y], fr[j]), ctx)

    def line_meet_type(self, line: ProjectiveLine):
        """('tangent', 1), ('secant', q+1) or ('generator', q^2+1)."""
        q = self.ctx.q
        m = sum(1 for p in line.points if self.contains(p))
        if m == 1:
            return "tangent", 1
        if m == q + 1:
            return "secant", q + 1
        if m == q * q + 1:
            return "generator", q * q + 1
        raise ConsistencyError(f"line meets H in {m} points; expected 1, {q+1} or {q*q+1}")


def plane_contains(plane, point, ctx) -> bool:
    acc = 0
    for w, u in zip(plane, point):
        if w and u:
            acc ^= ctx.m2(w, u)
    return acc == 0


def format_point(p, ctx) -> str:
    """Colon-separated normalized coordinates, e.g. '0:0:0:1'."""
    return ":".join(str(v) for v in normalize_point(p, ctx))
