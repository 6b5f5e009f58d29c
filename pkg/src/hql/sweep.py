"""Sweep engine: exhaustive, random and normalized-family verification runs.

The exhaustive and normalized sweeps walk quadratic parts (a, b, c) in
the outer loop and reuse everything that depends only on them: the
species of Q, the section at infinity, its classification and the polar
data of the lift.  Two exact reductions keep the tuple space manageable
without losing information:

  * f enters the lift only through its eps-coordinate f1, and |H n Q|
    itself does not depend on f0, so f0 is swept implicitly with
    multiplicity q;
  * (d, e) enter only through the GF(q)-linear bijection
    (d1, d0+d1, e1, e0+e1), which the engine walks directly.

Counts are reported in literal tuples.  Work is partitioned
deterministically by quadratic part and merged commutatively, so
aggregates are identical for any worker count.
"""

from __future__ import annotations

import multiprocessing as mp
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .field import context_for_q
from .forms import (
    CONE_HYPERBOLIC,
    CONJUGATE_PAIR,
    ELLIPTIC,
    HYPERBOLIC,
    RATIONAL_PAIR,
    QuadraticForm,
    classify_with_profile,
    kernel_profile,
    point_count,
    polar_matrix,
    row_reduce,
    _alpha_monomials,
)
from .intersect import (
    CASE_N,
    AffineQuadric,
    CaseTableError,
    FAMILY_KINDS,
    classify_quadric,
    family_quadratic_parts,
    fast_intersection_size,
    infinity_section,
    oracle_intersection_size,
    subfield_lift,
    resolve_case,
)

# positions of the w-dependent coefficients in the 5-variable lift tuple
_F1_POS = 4
_L_POS = (8, 11, 13, 14)
_PIV4 = [0, 1, 2, 3]


class UsageError(ValueError):
    """Invalid or infeasible sweep configuration."""


@dataclass(frozen=True)
class SweepConfig:
    q: int
    mode: str = "exhaustive"  # exhaustive | random | normalized
    samples: Optional[int] = None
    seed: int = 0
    workers: int = 1
    oracle: str = "default"   # all | off | sample:N | default
    families: Optional[tuple] = None

    def resolved_oracle(self) -> tuple[str, int]:
        """('all'|'off'|'sample', N)."""
        policy = self.oracle
        if policy == "default":
            if self.q == 2 and self.mode == "exhaustive":
                policy = "all"
            elif self.q > 8:
                policy = "sample:50"  # one brute-force pass costs ~(q^2)^2 evaluations
            else:
                policy = "sample:10000"
        if policy == "all":
            return "all", 0
        if policy == "off":
            return "off", 0
        if policy.startswith("sample:"):
            n = int(policy.split(":", 1)[1])
            if n < 0:
                raise UsageError("oracle sample count must be nonnegative")
            return "sample", n
        raise UsageError(f"unknown oracle policy {policy!r}")


def validate_config(config: SweepConfig) -> None:
    if config.q not in (2, 4, 8, 16, 32, 64):
        raise UsageError(f"q={config.q} is not a supported even prime power")
    if config.mode not in ("exhaustive", "random", "normalized"):
        raise UsageError(f"unknown mode {config.mode!r}")
    if config.mode == "exhaustive" and config.q > 4:
        raise UsageError(
            f"exhaustive mode at q={config.q} means (q^2)^6 = {(config.q**2)**6:.2e} tuples, "
            "which is not desk-scale; use --mode normalized or --mode random instead")
    if config.mode in ("exhaustive", "normalized") and config.q not in (2, 4, 8):
        raise UsageError(f"mode {config.mode!r} supports q in {{2,4,8}}; use --mode random")
    if config.mode == "normalized" and config.q == 8 and config.samples is None:
        raise UsageError(
            "normalized mode at q=8 sweeps ~1.1e8 representatives; pass --samples N "
            "for a seeded deterministic subsample")
    if config.mode == "random" and not config.samples:
        raise UsageError("random mode needs --samples")
    if config.workers < 1:
        raise UsageError("workers must be >= 1")
    if config.families:
        bad = set(config.families) - set(FAMILY_KINDS)
        if bad:
            raise UsageError(f"unknown families: {sorted(bad)}")
    config.resolved_oracle()


def expected_spectra(q: int) -> dict[str, list[int]]:
    """The reference intersection-size lists per species (set semantics)."""
    q3 = q ** 3
    q2 = q * q
    elliptic = {q3 - q2 + 1, q3 - q2 + q + 1, q3 - q + 1, q3 + 1,
                q3 + q + 1, q3 + q2 - q + 1, q3 + q2 + 1}
    cone = {q3 - q2 + q + 1, q3 - q + 1, q3 + q + 1, q3 + q2 - q + 1,
            q3 + 2 * q2 - q + 1}
    hyperbolic = {q2 + 1, q3 - q2 + 1, q3 - q2 + q + 1, q3 - q + 1, q3 + 1,
                  q3 + q + 1, q3 + q2 - q + 1, q3 + q2 + 1, q3 + 2 * q2 - q + 1,
                  q3 + 2 * q2 + 1, q3 + 3 * q2 - q + 1, 2 * q3 + q2 + 1}
    return {"elliptic": sorted(elliptic), "cone": sorted(cone),
            "hyperbolic": sorted(hyperbolic)}


def philox_samples(seed: int, n: int, q2: int):
    """Seeded coefficient tuples from the counter-based Philox4x64 PRNG."""
    import numpy as np

    rng = np.random.Generator(np.random.Philox(key=seed))
    return rng.integers(0, q2, size=(n, 6), dtype=np.uint16)


def _philox_choice(seed: int, population: int, k: int):
    import numpy as np

    if k >= population:
        return list(range(population))
    rng = np.random.Generator(np.random.Philox(key=seed))
    idx = rng.choice(population, size=k, replace=False)
    idx.sort()
    return [int(i) for i in idx]


def matrix_inverse(rows, ctx):
    """Inverse over GF(q), or None when singular."""
    n = len(rows)
    aug = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(rows)]
    _, piv, red = row_reduce(aug, ctx.mul, ctx.inv)
    if piv[:n] != list(range(n)):
        return None
    return [row[n:] for row in red[:n]]


def exclusion_violations(species, cinf_kind, case, rank_lift, species_lift,
                         rank_inf, species_inf, a, b):
    """Case-table exclusion checks; every hit is a defect witness."""
    out = []
    if species == "cone" and rank_inf != 4:
        out.append("cone-with-degenerate-infinity-section")
    if species == HYPERBOLIC and cinf_kind == "one-line" and rank_inf == 4 \
            and case in ("C1.2", "C3.2"):
        out.append("one-line-with-elliptic-infinity-section")
    if species == HYPERBOLIC and cinf_kind == "two-lines" and rank_inf < 4 \
            and species_lift == CONE_HYPERBOLIC:
        out.append("two-lines-degenerate-with-hyperbolic-cone-lift")
    if cinf_kind == "two-lines" and rank_inf == 2 and species_inf != RATIONAL_PAIR:
        out.append("two-lines-rank2-not-rational-pair")
    if species == HYPERBOLIC and cinf_kind == "point" and rank_inf == 2 \
            and species_inf != CONJUGATE_PAIR:
        out.append("point-rank2-not-conjugate-pair")
    if species == ELLIPTIC and case.split(".")[0] in ("C5", "C7", "C8"):
        out.append("elliptic-outside-C1-C4-C6")
    if species == "cone" and a == b and case not in ("C1.1", "C3.1"):
        out.append("equal-cone-coefficients-outside-C1.1-C3.1")
    return out


class _AbcData:
    """Everything reusable across (d, e, f1) for one quadratic part."""

    __slots__ = ("species", "cinf", "cls_inf", "base", "p4", "p4inv")

    def __init__(self, ctx, a, b, c):
        quad0 = AffineQuadric(a, b, c, 0, 0, 0)
        self.species = classify_quadric(ctx, quad0)
        if self.species == "reducible":
            return
        self.cinf = infinity_section(ctx, quad0)
        lift0, inf4 = subfield_lift(ctx, quad0)
        p4 = polar_matrix(inf4)
        prof4 = kernel_profile(p4, ctx)
        self.cls_inf = classify_with_profile(inf4, ctx, prof4)
        self.base = list(lift0.coeffs)
        self.p4 = p4
        self.p4inv = matrix_inverse(p4, ctx) if prof4[0] == 4 else None


def _lift_profile(ctx, data: _AbcData, lvec):
    """Polar kernel profile of the lift for a given linear part."""
    if data.p4inv is not None:
        # nondegenerate 4x4 block: kernel is spanned by (P4^-1 l, 1)
        mul = ctx.mul
        v0 = []
        for row in data.p4inv:
            acc = 0
            for m, l in zip(row, lvec):
                if m and l:
                    acc ^= mul[m][l]
            v0.append(acc)
        v0.append(1)
        return 4, _PIV4, [v0]
    rows = [list(r) + [l] for r, l in zip(data.p4, lvec)]
    rows.append(list(lvec) + [0])
    return kernel_profile(rows, ctx)


def _classify_lift(ctx, data: _AbcData, lvec, f1, profile):
    base = data.base
    for pos, val in zip(_L_POS, lvec):
        base[pos] = val
    base[_F1_POS] = f1
    form = QuadraticForm(5, tuple(base))
    cls_lift = classify_with_profile(form, ctx, profile)
    label = resolve_case(cls_lift, data.cls_inf)
    n_affine = point_count(cls_lift, 4, ctx.q) - point_count(data.cls_inf, 3, ctx.q)
    if n_affine != CASE_N[label](ctx.q):
        raise CaseTableError(f"case {label}: N={n_affine} disagrees with the table")
    return cls_lift, label, n_affine


def _lvec_for(ctx, d, e):
    mask, h = ctx.q - 1, ctx.h
    d0, d1 = d & mask, d >> h
    e0, e1 = e & mask, e >> h
    return (d1, d0 ^ d1, e1, e0 ^ e1)


def _rep_tuple(ctx, a, b, c, d, e, f1):
    return (a, b, c, d, e, f1 << ctx.h)


def _empty_agg():
    return {"counts": Counter(), "cases": Counter(), "family_sizes": Counter(),
            "witness": {}, "violations": [], "mismatches": [],
            "reducible": 0, "oracle_checked": 0}


def _note_witness(witness, key, rep):
    old = witness.get(key)
    if old is None or old > rep:
        witness[key] = rep


# ---------------------------------------------------------------------------
# workers
# ---------------------------------------------------------------------------

_WCTX = None


def _init_worker(q):
    global _WCTX
    _alpha_monomials()
    _WCTX = context_for_q(q)


def _process_abc_chunk(args):
    """Sweep (d, e, f1) for a slice of quadratic parts.

    ``abc_list`` holds (family, a, b, c) with family None for exhaustive
    sweeps.  ``oracle_plan`` maps a local abc index to sorted collapsed
    offsets (d*q2*q + e*q + f1) whose representatives get oracle-checked.
    """
    abc_list, oracle_plan = args
    ctx = _WCTX
    q, q2 = ctx.q, ctx.q2
    agg = _empty_agg()
    counts, cases, family_sizes = agg["counts"], agg["cases"], agg["family_sizes"]
    witness = agg["witness"]
    inner = q2 * q2 * q

    for abc_idx, (family, a, b, c) in enumerate(abc_list):
        data = _AbcData(ctx, a, b, c)
        if data.species == "reducible":
            agg["reducible"] += inner * q
            continue
        species, cinf = data.species, data.cinf
        offsets = oracle_plan.get(abc_idx)
        oracle_iter = iter(offsets) if offsets else None
        next_oracle = next(oracle_iter, None) if oracle_iter else None
        offset = 0
        for d in range(q2):
            for e in range(q2):
                lvec = _lvec_for(ctx, d, e)
                profile = _lift_profile(ctx, data, lvec)
                for f1 in range(q):
                    cls_lift, label, n_affine = _classify_lift(ctx, data, lvec, f1, profile)
                    size = n_affine + cinf.size
                    counts[(species, size)] += q
                    cases[label] += q
                    if family is not None:
                        family_sizes[(family, size)] += q
                    rep = _rep_tuple(ctx, a, b, c, d, e, f1)
                    _note_witness(witness, (species, size), rep)
                    bad = exclusion_violations(species, cinf.kind, label,
                                               cls_lift.rank, cls_lift.species,
                                               data.cls_inf.rank, data.cls_inf.species,
                                               a, b)
                    if bad:
                        agg["violations"].extend({"coeffs": rep, "rule": r} for r in bad)
                    if next_oracle is not None and offset == next_oracle:
                        osize = oracle_intersection_size(ctx, AffineQuadric(*rep))
                        agg["oracle_checked"] += 1
                        if osize != size:
                            agg["mismatches"].append(
                                {"coeffs": rep, "fast": size, "oracle": osize})
                        next_oracle = next(oracle_iter, None)
                    offset += 1
    return agg


def _process_random_chunk(args):
    """Literal tuples from the Philox stream; oracle on the global prefix."""
    rows, base_index, oracle_n = args
    ctx = _WCTX
    agg = _empty_agg()
    for i, row in enumerate(rows):
        quad = AffineQuadric(*(int(v) for v in row))
        if classify_quadric(ctx, quad) == "reducible":
            agg["reducible"] += 1
            continue
        rep = fast_intersection_size(ctx, quad)
        agg["counts"][(rep.species, rep.size_total)] += 1
        agg["cases"][rep.case] += 1
        _note_witness(agg["witness"], (rep.species, rep.size_total), tuple(quad))
        bad = exclusion_violations(rep.species, rep.cinf_kind, rep.case,
                                   rep.rank_lift, rep.species_lift,
                                   rep.rank_inf, rep.species_inf, quad.a, quad.b)
        if bad:
            agg["violations"].extend({"coeffs": tuple(quad), "rule": r} for r in bad)
        if base_index + i < oracle_n:
            osize = oracle_intersection_size(ctx, quad)
            agg["oracle_checked"] += 1
            if osize != rep.size_total:
                agg["mismatches"].append({"coeffs": tuple(quad), "fast": rep.size_total,
                                          "oracle": osize})
    return agg


def _subsample_chunk(args):
    """Classify selected (abc, offset, do_oracle) representatives only."""
    items = args
    ctx = _WCTX
    q, q2 = ctx.q, ctx.q2
    agg = _empty_agg()
    cache = {}
    for family, a, b, c, offset, do_oracle in items:
        data = cache.get((a, b, c))
        if data is None:
            data = cache[(a, b, c)] = _AbcData(ctx, a, b, c)
        if data.species == "reducible":
            agg["reducible"] += q
            continue
        f1 = offset % q
        e = (offset // q) % q2
        d = offset // (q * q2)
        lvec = _lvec_for(ctx, d, e)
        profile = _lift_profile(ctx, data, lvec)
        cls_lift, label, n_affine = _classify_lift(ctx, data, lvec, f1, profile)
        size = n_affine + data.cinf.size
        agg["counts"][(data.species, size)] += q
        agg["cases"][label] += q
        agg["family_sizes"][(family, size)] += q
        rep = _rep_tuple(ctx, a, b, c, d, e, f1)
        _note_witness(agg["witness"], (data.species, size), rep)
        bad = exclusion_violations(data.species, data.cinf.kind, label,
                                   cls_lift.rank, cls_lift.species,
                                   data.cls_inf.rank, data.cls_inf.species, a, b)
        if bad:
            agg["violations"].extend({"coeffs": rep, "rule": r} for r in bad)
        if do_oracle:
            osize = oracle_intersection_size(ctx, AffineQuadric(*rep))
            agg["oracle_checked"] += 1
            if osize != size:
                agg["mismatches"].append({"coeffs": rep, "fast": size, "oracle": osize})
    return agg


def _merge(results):
    agg = _empty_agg()
    for r in results:
        agg["counts"].update(r["counts"])
        agg["cases"].update(r["cases"])
        agg["family_sizes"].update(r["family_sizes"])
        for key, tup in r["witness"].items():
            _note_witness(agg["witness"], key, tup)
        agg["violations"].extend(r["violations"])
        agg["mismatches"].extend(r["mismatches"])
        agg["reducible"] += r["reducible"]
        agg["oracle_checked"] += r["oracle_checked"]
    agg["violations"].sort(key=lambda v: (v["coeffs"], v["rule"]))
    agg["mismatches"].sort(key=lambda v: v["coeffs"])
    return agg


def _abc_jobs(ctx, config: SweepConfig):
    """(family, a, b, c) jobs in deterministic order."""
    q2 = ctx.q2
    if config.mode == "exhaustive":
        return [(None, a, b, c) for a in range(q2) for b in range(q2) for c in range(q2)]
    jobs = []
    for kind in (config.families or FAMILY_KINDS):
        jobs.extend((kind, a, b, c) for a, b, c in family_quadratic_parts(ctx, kind))
    return jobs


def _oracle_plan_for(config: SweepConfig, n_jobs: int, inner: int):
    """abc_index -> sorted inner offsets to oracle-check."""
    policy, n = config.resolved_oracle()
    if policy == "off":
        return {}
    if policy == "all":
        return {i: list(range(inner)) for i in range(n_jobs)}
    # sample only irreducible jobs; in exhaustive mode job 0 is a=b=c=0
    skip_first = 1 if config.mode == "exhaustive" else 0
    population = (n_jobs - skip_first) * inner
    plan: dict[int, list[int]] = {}
    for idx in _philox_choice(config.seed, population, n):
        plan.setdefault(idx // inner + skip_first, []).append(idx % inner)
    return plan


def _run_chunks(config, func, tasks):
    if config.workers <= 1 or len(tasks) <= 1:
        _init_worker(config.q)
        return [func(t) for t in tasks]
    with mp.Pool(config.workers, initializer=_init_worker, initargs=(config.q,)) as pool:
        return pool.map(func, tasks)


def run_sweep(config: SweepConfig) -> dict:
    """Execute the sweep, returning merged counts, witnesses and checks."""
    validate_config(config)
    ctx = context_for_q(config.q)
    _alpha_monomials()  # build once before any forking
    if config.mode == "random":
        rows = philox_samples(config.seed, config.samples, ctx.q2)
        policy, n = config.resolved_oracle()
        oracle_n = config.samples if policy == "all" else (n if policy == "sample" else 0)
        chunk = max(1, (len(rows) + config.workers * 8 - 1) // (config.workers * 8))
        tasks = [(rows[i:i + chunk], i, oracle_n) for i in range(0, len(rows), chunk)]
        agg = _merge(_run_chunks(config, _process_random_chunk, tasks))
        agg["total"] = config.samples
        return agg

    jobs = _abc_jobs(ctx, config)
    inner = ctx.q2 * ctx.q2 * ctx.q

    if config.mode == "normalized" and config.samples is not None:
        population = len(jobs) * inner
        chosen = _philox_choice(config.seed, population, config.samples)
        policy, n = config.resolved_oracle()
        if policy == "all":
            stride = 1
        elif policy == "off" or n == 0:
            stride = 0
        else:
            stride = max(1, len(chosen) // n)
        items = []
        for k, idx in enumerate(chosen):
            family, a, b, c = jobs[idx // inner]
            items.append((family, a, b, c, idx % inner, bool(stride) and k % stride == 0))
        nchunks = max(1, min(len(items), config.workers * 4))
        step = (len(items) + nchunks - 1) // nchunks
        tasks = [items[i:i + step] for i in range(0, len(items), step)]
        agg = _merge(_run_chunks(config, _subsample_chunk, tasks))
        agg["total"] = len(items) * ctx.q
        return agg

    oracle_plan = _oracle_plan_for(config, len(jobs), inner)
    nchunks = max(1, min(len(jobs), config.workers * 8))
    step = (len(jobs) + nchunks - 1) // nchunks
    tasks = []
    for lo in range(0, len(jobs), step):
        sub = jobs[lo:lo + step]
        sub_plan = {i - lo: oracle_plan[i] for i in range(lo, lo + len(sub)) if i in oracle_plan}
        tasks.append((sub, sub_plan))
    agg = _merge(_run_chunks(config, _process_abc_chunk, tasks))
    agg["total"] = len(jobs) * inner * ctx.q
    return agg


def iter_instance_rows(config: SweepConfig):
    """Per-instance records in literal lex tuple order (serial; used for CSV).

    Yields dicts with the classification of every tuple of the sweep,
    expanding the implicit f0 sweep so rows are in bijection with tuples.
    """
    validate_config(config)
    ctx = context_for_q(config.q)
    _init_worker(config.q)
    q, q2 = ctx.q, ctx.q2
    policy, n_oracle = config.resolved_oracle()
    inner = q2 * q2 * q

    if config.mode == "random":
        rows = philox_samples(config.seed, config.samples, ctx.q2)
        oracle_n = config.samples if policy == "all" else (n_oracle if policy == "sample" else 0)
        for i, row in enumerate(rows):
            quad = AffineQuadric(*(int(v) for v in row))
            yield _row_for(ctx, quad, policy != "off" and i < oracle_n)
        return

    jobs = _abc_jobs(ctx, config)
    oracle_plan = _oracle_plan_for(config, len(jobs), inner)
    for abc_idx, (family, a, b, c) in enumerate(jobs):
        offsets = set(oracle_plan.get(abc_idx, ()))
        data = _AbcData(ctx, a, b, c)
        for d in range(q2):
            for e in range(q2):
                lvec = None if data.species == "reducible" else _lvec_for(ctx, d, e)
                profile = None if lvec is None else _lift_profile(ctx, data, lvec)
                for f in range(q2):
                    f0, f1 = f & (q - 1), f >> ctx.h
                    quad = AffineQuadric(a, b, c, d, e, f)
                    if data.species == "reducible":
                        yield {"quad": quad, "species": "reducible"}
                        continue
                    offset = (d * q2 + e) * q + f1
                    cls_lift, label, n_affine = _classify_lift(ctx, data, lvec, f1, profile)
                    size = n_affine + data.cinf.size
                    row = {"quad": quad, "species": data.species,
                           "cinf": data.cinf.kind, "case": label, "size_fast": size}
                    if offset in offsets and f0 == 0:
                        row["size_oracle"] = oracle_intersection_size(ctx, quad)
                    yield row


def _row_for(ctx, quad: AffineQuadric, with_oracle: bool):
    if classify_quadric(ctx, quad) == "reducible":
        return {"quad": quad, "species": "reducible"}
    rep = fast_intersection_size(ctx, quad)
    row = {"quad": quad, "species": rep.species, "cinf": rep.cinf_kind,
           "case": rep.case, "size_fast": rep.size_total}
    if with_oracle:
        row["size_oracle"] = oracle_intersection_size(ctx, quad)
    return row


# ---------------------------------------------------------------------------
# bulk oracle (vectorized direct evaluation)
# ---------------------------------------------------------------------------


def oracle_sizes_bulk(ctx, quads) -> list[int]:
    """Brute-force |H n Q| for many quadrics at once.

    Same semantics as oracle_intersection_size: direct evaluation of the
    two defining equations over every affine (x, y) with numpy gathers,
    plus the shared points on the plane at infinity (the point of
    tangency and q^2 further points per shared norm-one slope).
    """
    import numpy as np

    tabs = ctx.numpy_tables()
    mul2, sq2, norm2 = tabs["mul2"], tabs["sq2"], tabs["norm2"]
    q2, h = ctx.q2, ctx.h
    xs = np.repeat(np.arange(q2, dtype=np.uint16), q2)
    ys = np.tile(np.arange(q2, dtype=np.uint16), q2)
    sxs, sys = sq2[xs], sq2[ys]
    nxy = norm2[xs] ^ norm2[ys]
    xy = mul2[xs, ys]
    m2, s2 = ctx.m2, ctx.s2
    qq = ctx.q * ctx.q
    out = []
    for quad in quads:
        a, b, c, d, e, f = (int(v) for v in quad)
        z = mul2[a][sxs] ^ mul2[b][sys] ^ mul2[c][xy] ^ mul2[d][xs] ^ mul2[e][ys] ^ f
        affine = int(np.count_nonzero((z >> h) == nxy))
        k = sum(1 for lam in ctx.norm_one if (m2(a, s2(lam)) ^ m2(c, lam) ^ b) == 0)
        out.append(affine + 1 + qq * k)
    return out
