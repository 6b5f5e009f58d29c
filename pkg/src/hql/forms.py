"""Quadratic forms over GF(q), q even: rank, species, point counts.

A form in n variables is stored as a flat coefficient tuple in the
documented order: the n diagonal coefficients (of x_i^2) first, then the
off-diagonal coefficients (of x_i*x_j, i < j) in lexicographic order.

Rank and species follow the even-characteristic conventions: the polar
form B(x,y) = F(x+y) + F(x) + F(y) is alternating, F restricted to the
radical of B is a perfect square (hence linear after a square root), and

    rank F = rank B + (1 if F does not vanish on the radical else 0).

Nondegenerate forms in four variables are split into hyperbolic and
elliptic by the trace of the alpha invariant: det A, det B and
(det A - det B)/4 are expanded once as integer polynomials in generic
coefficients, reduced mod 2, and then evaluated in GF(q).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product


HYPERBOLIC = "hyperbolic"
ELLIPTIC = "elliptic"
PARABOLIC = "parabolic"
CONE_HYPERBOLIC = "cone-over-hyperbolic"
CONE_ELLIPTIC = "cone-over-elliptic"
CONE_POINT_CONIC = "cone-point-conic"
RATIONAL_PAIR = "rational-pair"
CONJUGATE_PAIR = "conjugate-pair"
DOUBLE_SUBSPACE = "double-subspace"


class ZeroFormError(ValueError):
    """Raised when the zero form is handed to a classifier."""


class AlphaUndefinedError(ValueError):
    """Raised when det B specializes to zero and alpha has no value."""


@lru_cache(maxsize=None)
def off_pairs(n: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(n) for j in range(i + 1, n))


@lru_cache(maxsize=None)
def off_pos(n: int) -> dict[tuple[int, int], int]:
    return {p: n + k for k, p in enumerate(off_pairs(n))}


class QuadraticForm:
    """Immutable quadratic form in ``n`` variables over GF(q)."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs):
        coeffs = tuple(coeffs)
        if len(coeffs) != n + n * (n - 1) // 2:
            raise ValueError(f"expected {n + n*(n-1)//2} coefficients for n={n}, got {len(coeffs)}")
        self.n = n
        self.coeffs = coeffs

    def diag(self, i: int) -> int:
        return self.coeffs[i]

    def off(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        return self.coeffs[off_pos(self.n)[(i, j)]]

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, QuadraticForm) and self.n == other.n and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n, self.coeffs))

    def __repr__(self):
        return f"QuadraticForm(n={self.n}, coeffs={self.coeffs})"


def evaluate(form: QuadraticForm, v, ctx) -> int:
    mul, sq = ctx.mul, ctx.sq
    acc = 0
    c = form.coeffs
    for i in range(form.n):
        ci = c[i]
        if ci and v[i]:
            acc ^= mul[ci][sq[v[i]]]
    for k, (i, j) in enumerate(off_pairs(form.n)):
        cij = c[form.n + k]
        if cij and v[i] and v[j]:
            acc ^= mul[cij][mul[v[i]][v[j]]]
    return acc


def polar_value(form: QuadraticForm, u, v, ctx) -> int:
    """The polar form B(u,v) = F(u+v) + F(u) + F(v)."""
    mul = ctx.mul
    acc = 0
    c = form.coeffs
    for k, (i, j) in enumerate(off_pairs(form.n)):
        cij = c[form.n + k]
        if cij:
            t = mul[u[i]][v[j]] ^ mul[u[j]][v[i]]
            if t:
                acc ^= mul[cij][t]
    return acc


def polar_matrix(form: QuadraticForm, ctx=None):
    """Alternating matrix of the polar form: zero diagonal, c_ij off it."""
    n = form.n
    rows = [[0] * n for _ in range(n)]
    for k, (i, j) in enumerate(off_pairs(n)):
        cij = form.coeffs[n + k]
        rows[i][j] = cij
        rows[j][i] = cij
    return rows


def row_reduce(rows, mul, inv):
    """RREF over a field given by mul/inv tables.

    Returns (rank, pivot_cols, reduced_rows).  Works on a copy.
    """
    a = [list(r) for r in rows]
    m = len(a)
    ncols = len(a[0]) if m else 0
    piv_cols = []
    r = 0
    for col in range(ncols):
        pr = None
        for i in range(r, m):
            if a[i][col]:
                pr = i
                break
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        s = inv[a[r][col]]
        if s != 1:
            row = a[r]
            a[r] = [mul[s][x] for x in row]
        lead = a[r]
        for i in range(m):
            f = a[i][col]
            if f and i != r:
                ai = a[i]
                a[i] = [x ^ mul[f][y] for x, y in zip(ai, lead)]
        piv_cols.append(col)
        r += 1
        if r == m:
            break
    return r, piv_cols, a


def matrix_rank(rows, mul, inv) -> int:
    rank, _, _ = row_reduce(rows, mul, inv)
    return rank


def kernel_profile(rows, ctx):
    """(rank, pivot_cols, kernel_basis) of a square matrix over GF(q).

    Kernel vectors are indexed by free columns; the vector for free
    column j has a 1 there and its other support on pivot columns, so
    the pivot-column standard vectors span a complement of the kernel.
    """
    n = len(rows)
    rank, piv_cols, red = row_reduce(rows, ctx.mul, ctx.inv)
    piv_set = set(piv_cols)
    kernel = []
    for fc in range(n):
        if fc in piv_set:
            continue
        v = [0] * n
        v[fc] = 1
        for r, pc in enumerate(piv_cols):
            v[pc] = red[r][fc]
        kernel.append(v)
    return rank, piv_cols, kernel


def _radical_residual_nonzero(form: QuadraticForm, kernel, ctx) -> bool:
    # F restricted to the radical is additive, so a basis check suffices
    return any(evaluate(form, v, ctx) for v in kernel)


def quadric_rank(form: QuadraticForm, ctx) -> int:
    """Minimal number of variables in any equation for the quadric."""
    if form.is_zero:
        raise ZeroFormError("zero form has no rank")
    rank_p, _, kernel = kernel_profile(polar_matrix(form), ctx)
    return rank_p + (1 if _radical_residual_nonzero(form, kernel, ctx) else 0)


def restrict_to(form: QuadraticForm, keep, ctx=None) -> QuadraticForm:
    """The form with all variables outside ``keep`` set to zero.

    When ``keep`` lists the pivot columns of the polar matrix and the form
    vanishes on the radical, this is the induced form on the quotient by
    the radical.
    """
    keep = list(keep)
    m = len(keep)
    coeffs = [form.diag(i) for i in keep]
    for a in range(m):
        for b in range(a + 1, m):
            coeffs.append(form.off(keep[a], keep[b]))
    return QuadraticForm(m, coeffs)


# ---------------------------------------------------------------------------
# alpha: generic integer-polynomial specialization
# ---------------------------------------------------------------------------

# Variable order for 4-variable forms: Z0..Z3 (diagonal), then the
# off-diagonal Z01, Z02, Z03, Z12, Z13, Z23 -- identical to the coefficient
# tuple order of a QuadraticForm with n=4.


@lru_cache(maxsize=1)
def _alpha_monomials():
    """Sparse mod-2 monomials of det A, det B and (det A - det B)/4.

    Each polynomial is a tuple of monomials; a monomial is a tuple of
    (coefficient_index, exponent) pairs.  Only odd integer coefficients
    survive the mod-2 reduction.
    """
    import sympy

    zd = sympy.symbols("Zd0:4")
    zo = sympy.symbols("Zo0:6")
    pairs = off_pairs(4)
    omat = [[0] * 4 for _ in range(4)]
    for k, (i, j) in enumerate(pairs):
        omat[i][j] = zo[k]

    a = sympy.zeros(4, 4)
    b = sympy.zeros(4, 4)
    for i in range(4):
        a[i, i] = 2 * zd[i]
        for j in range(4):
            if i < j:
                a[i, j] = a[j, i] = omat[i][j]
                b[i, j] = omat[i][j]
                b[j, i] = -omat[i][j]

    det_a = sympy.expand(a.det())
    det_b = sympy.expand(b.det())
    diff = sympy.expand(det_a - det_b)

    gens = list(zd) + list(zo)

    def mod2(expr, divisor=1):
        poly = sympy.Poly(expr, *gens)
        monos = []
        for exps, coef in poly.terms():
            c = int(coef)
            if c % divisor:
                raise AssertionError("generic determinant difference not divisible by 4")
            if (c // divisor) % 2:
                monos.append(tuple((k, e) for k, e in enumerate(exps) if e))
        monos.sort()
        return tuple(monos)

    det_a2 = mod2(det_a)
    det_b2 = mod2(det_b)
    quarter2 = mod2(diff, divisor=4)
    assert det_a2 == det_b2  # the difference is divisible by 4, hence by 2
    return det_a2, det_b2, quarter2


def _eval_mod2(monomials, vals, ctx) -> int:
    mul, pw = ctx.mul, ctx.pow_small
    acc = 0
    for mono in monomials:
        t = 1
        for idx, e in mono:
            v = vals[idx]
            if not v:
                t = 0
                break
            t = mul[t][v if e == 1 else pw[v][e]]
        acc ^= t
    return acc


def det_a_mod2(form: QuadraticForm, ctx) -> int:
    """The mod-2 specialization of the generic det A at this form."""
    if form.n != 4:
        raise ValueError("det A is defined for forms in 4 variables")
    det_a2, _, _ = _alpha_monomials()
    return _eval_mod2(det_a2, form.coeffs, ctx)


def alpha_pg3(form: QuadraticForm, ctx) -> int:
    """alpha = (det A - det B) / (4 det B), specialized over GF(q)."""
    if form.n != 4:
        raise ValueError("alpha is defined for forms in 4 variables")
    _, det_b2, quarter2 = _alpha_monomials()
    den = _eval_mod2(det_b2, form.coeffs, ctx)
    if den == 0:
        raise AlphaUndefinedError("alpha undefined (degenerate)")
    num = _eval_mod2(quarter2, form.coeffs, ctx)
    return ctx.mul[num][ctx.inv[den]]


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadricClass:
    rank: int
    species: str

    def __str__(self):
        return f"{self.species} (rank {self.rank})"


def _split_species(form: QuadraticForm, pivots, ctx) -> str:
    """Rank-2 forms: rational pair vs conjugate pair of hyperplanes."""
    binary = restrict_to(form, pivots)
    a, c, b = binary.coeffs[0], binary.coeffs[1], binary.coeffs[2]
    # polar form is nondegenerate on the complement, so b != 0
    t = ctx.mul[ctx.mul[a][c]][ctx.inv[ctx.sq[b]]]
    return RATIONAL_PAIR if ctx.trace[t] == 0 else CONJUGATE_PAIR


def classify_with_profile(form: QuadraticForm, ctx, profile) -> QuadricClass:
    """Classify with a precomputed polar kernel profile (see kernel_profile)."""
    if form.is_zero:
        raise ZeroFormError("zero form cannot be classified")
    rank_p, pivots, kernel = profile
    rank = rank_p + (1 if _radical_residual_nonzero(form, kernel, ctx) else 0)
    n = form.n
    if n == 4:
        if rank == 4:
            alpha = alpha_pg3(form, ctx)
            return QuadricClass(4, HYPERBOLIC if ctx.trace[alpha] == 0 else ELLIPTIC)
        if rank == 3:
            return QuadricClass(3, CONE_POINT_CONIC)
        if rank == 2:
            return QuadricClass(2, _split_species(form, pivots, ctx))
        return QuadricClass(1, DOUBLE_SUBSPACE)
    if n == 5:
        if rank == 5:
            return QuadricClass(5, PARABOLIC)
        if rank == 4:
            base = restrict_to(form, pivots)
            alpha = alpha_pg3(base, ctx)
            return QuadricClass(4, CONE_HYPERBOLIC if ctx.trace[alpha] == 0 else CONE_ELLIPTIC)
        if rank == 3:
            return QuadricClass(3, CONE_POINT_CONIC)
        if rank == 2:
            return QuadricClass(2, _split_species(form, pivots, ctx))
        return QuadricClass(1, DOUBLE_SUBSPACE)
    raise ValueError(f"classification supports 4 or 5 variables, got {n}")


def _classify(form: QuadraticForm, ctx) -> QuadricClass:
    return classify_with_profile(form, ctx, kernel_profile(polar_matrix(form), ctx))


def classify_pg3(form: QuadraticForm, ctx) -> QuadricClass:
    """Species of a quadric of PG(3,q) given by a 4-variable form."""
    if form.n != 4:
        raise ValueError("classify_pg3 expects a form in 4 variables")
    return _classify(form, ctx)


def classify_pg4(form: QuadraticForm, ctx) -> QuadricClass:
    """Species of a quadric of PG(4,q) given by a 5-variable form."""
    if form.n != 5:
        raise ValueError("classify_pg4 expects a form in 5 variables")
    return _classify(form, ctx)


_COUNTS_PG3 = {
    HYPERBOLIC: lambda q: (q + 1) ** 2,
    ELLIPTIC: lambda q: q * q + 1,
    CONE_POINT_CONIC: lambda q: q * q + q + 1,
    RATIONAL_PAIR: lambda q: 2 * q * q + q + 1,
    CONJUGATE_PAIR: lambda q: q + 1,
    DOUBLE_SUBSPACE: lambda q: q * q + q + 1,
}

_COUNTS_PG4 = {
    PARABOLIC: lambda q: (q + 1) * (q * q + 1),
    CONE_HYPERBOLIC: lambda q: q * (q + 1) ** 2 + 1,
    CONE_ELLIPTIC: lambda q: q * (q * q + 1) + 1,
    CONE_POINT_CONIC: lambda q: q ** 3 + q * q + q + 1,
    RATIONAL_PAIR: lambda q: 2 * q ** 3 + q * q + q + 1,
    CONJUGATE_PAIR: lambda q: q * q + q + 1,
    DOUBLE_SUBSPACE: lambda q: q ** 3 + q * q + q + 1,
}


def point_count(cls: QuadricClass, ambient_dim: int, q: int) -> int:
    """Projective point count of a quadric of the given class."""
    table = {3: _COUNTS_PG3, 4: _COUNTS_PG4}.get(ambient_dim)
    if table is None or cls.species not in table:
        raise ValueError(f"no point count for species {cls.species!r} in PG({ambient_dim},q)")
    return table[cls.species](q)


def projective_points(n_vars: int, size: int):
    """Normalized representatives of PG(n_vars - 1, size), in lex order."""
    for lead in range(n_vars):
        for rest in product(range(size), repeat=n_vars - 1 - lead):
            yield (0,) * lead + (1,) + rest


def count_points_bruteforce(form: QuadraticForm, ctx) -> int:
    """Independent oracle: count projective zeros by full enumeration."""
    return sum(1 for p in projective_points(form.n, ctx.q) if evaluate(form, p, ctx) == 0)


def substitute(form: QuadraticForm, matrix, ctx) -> QuadraticForm:
    """The form F(Mx); matrix rows are listed row-major over GF(q)."""
    n = form.n
    cols = [[matrix[r][c] for r in range(n)] for c in range(n)]
    coeffs = [evaluate(form, col, ctx) for col in cols]
    for i, j in off_pairs(n):
        coeffs.append(polar_value(form, cols[i], cols[j], ctx))
    return QuadraticForm(n, coeffs)
