import random

import pytest

from hql.hermitian import (
    HermitianSurface,
    P_INF,
    ProjectiveLine,
    all_lines,
    format_point,
    normalize_point,
    pg3_points,
    plane_contains,
)


def test_point_counts(ctx2, ctx4):
    for ctx, expected in ((ctx2, 45), (ctx4, 1105)):
        surface = HermitianSurface(ctx)
        assert surface.expected_point_count() == expected
        assert surface.point_count_scan() == expected


def test_p_inf_and_its_tangent_plane(ctx2, ctx4):
    for ctx in (ctx2, ctx4):
        surface = HermitianSurface(ctx)
        assert surface.contains(P_INF)
        assert surface.tangent_plane(P_INF) == (1, 0, 0, 0)  # the plane J = 0


def test_affine_points_over_subfield_z(ctx4):
    # (1, 0, 0, z) lies on the surface exactly when z is in GF(q)
    surface = HermitianSurface(ctx4)
    for z in range(ctx4.q2):
        assert surface.contains((1, 0, 0, z)) == (z < ctx4.q)


def test_tangent_plane_at_origin(ctx2, ctx4):
    for ctx in (ctx2, ctx4):
        surface = HermitianSurface(ctx)
        assert surface.tangent_plane((1, 0, 0, 0)) == (0, 0, 0, 1)  # the plane Z = 0


def test_tangent_plane_incidence(ctx2):
    surface = HermitianSurface(ctx2)
    for p in surface.points():
        plane = surface.tangent_plane(p)
        assert plane_contains(plane, p, ctx2)


def test_tangent_plane_requires_membership(ctx2):
    surface = HermitianSurface(ctx2)
    with pytest.raises(ValueError):
        surface.tangent_plane((1, 0, 0, ctx2.eps))  # eps is not in GF(q)


def test_generator_and_tangent_lines_through_p_inf(ctx2, ctx4):
    for ctx in (ctx2, ctx4):
        surface = HermitianSurface(ctx)
        # unit slope X = Y: a norm-one direction, fully on the surface
        line = ProjectiveLine((0, 0, 0, 1), (0, 1, 1, 0), ctx)
        kind, size = surface.line_meet_type(line)
        assert kind == "generator" and size == ctx.q * ctx.q + 1
        # J = X = 0 has slope zero, norm 0 != 1: meets only at P_inf
        line = ProjectiveLine((0, 0, 0, 1), (0, 0, 1, 0), ctx)
        assert surface.line_meet_type(line) == ("tangent", 1)


def test_lines_through_p_inf_in_tangent_plane(ctx2, ctx4):
    # q+1 generators (norm-one slopes) and q^2-q tangent lines
    for ctx in (ctx2, ctx4):
        surface = HermitianSurface(ctx)
        kinds = {"tangent": 0, "secant": 0, "generator": 0}
        for x in range(ctx.q2):
            line = ProjectiveLine(P_INF, (0, x, 1, 0), ctx)
            kinds[surface.line_meet_type(line)[0]] += 1
        line = ProjectiveLine(P_INF, (0, 1, 0, 0), ctx)
        kinds[surface.line_meet_type(line)[0]] += 1
        q = ctx.q
        assert kinds == {"generator": q + 1, "tangent": q * q - q, "secant": 0}


def test_every_line_meets_lawfully_q2(ctx2):
    surface = HermitianSurface(ctx2)
    lines = all_lines(ctx2)
    assert len(lines) == 357  # (s^2+1)(s^2+s+1) for s = 4
    counts = {"tangent": 0, "secant": 0, "generator": 0}
    for line in lines:
        kind, _ = surface.line_meet_type(line)
        counts[kind] += 1
    assert sum(counts.values()) == 357
    assert counts["generator"] == 27  # (q^3+1)(q+1) generators on H(3,4)


def test_random_lines_meet_lawfully_q4(ctx4):
    surface = HermitianSurface(ctx4)
    points = list(pg3_points(ctx4))
    rng = random.Random(99)
    for _ in range(500):
        p1, p2 = rng.sample(points, 2)
        surface.line_meet_type(ProjectiveLine(p1, p2, ctx4))  # raises if unlawful


def test_secant_line_example(ctx2):
    # the affine z-axis J=..: points (1,0,0,z) plus P_inf; meets H in q+1 points
    surface = HermitianSurface(ctx2)
    line = ProjectiveLine((1, 0, 0, 0), P_INF, ctx2)
    kind, size = surface.line_meet_type(line)
    assert kind == "secant" and size == ctx2.q + 1


def test_format_point(ctx2):
    assert format_point(P_INF, ctx2) == "0:0:0:1"
    # normalization happens before serialization
    assert format_point((2, 2, 0, 3), ctx2) == format_point((1, 1, 0, ctx2.m2(ctx2.i2(2), 3)), ctx2)


def test_line_and_point_validation(ctx2):
    with pytest.raises(ValueError):
        normalize_point((0, 0, 0, 0), ctx2)
    with pytest.raises(ValueError):
        ProjectiveLine((1, 0, 0, 0), (2, 0, 0, 0), ctx2)  # same point, rescaled
    line1 = ProjectiveLine((1, 0, 0, 0), (0, 1, 0, 0), ctx2)
    line2 = ProjectiveLine((1, 1, 0, 0), (1, 2, 0, 0), ctx2)
    assert line1 == line2
    assert len({line1, line2}) == 1
    assert len(line1.points) == ctx2.q2 + 1
