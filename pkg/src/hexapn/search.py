"""Exhaustive and seeded-random coefficient-space search drivers.

Exhaustive mode sweeps (A, B, C) blocks with a vectorized (D, E) kernel and
is deterministically shardable: shards split the block range, and results
are independent of the shard count. Random mode draws tuples from
counter-mode streams addressed by sample index (see rng), which again makes
the output independent of sharding.

Filter presets:
  theory A != 0, drop C1/C2, drop the generic obstruction (C6 with h1 != 0).
         This is the universe behind the reference APN hit counts.
  plain  A != 0, drop C1/C2 only.
  none   every tuple tested.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .field import FieldCtx, FieldSpec, make_field
from .hexanomial import Coeffs
from .diffanalysis import (
    BatchTables,
    apn_mask_batch,
    is_apn_ddt,
    is_apn_equation,
    is_permutation,
)
from .rng import Stream64
from .theory import cond_C1_C2, cond_C6, h1_value, match_summary_cases, predict_verdict

EXHAUSTIVE_GATE_BITS = 30  # (q^2)^5 <= 2^30, i.e. q <= 8


class SearchGateError(ValueError):
    pass


@dataclass(frozen=True)
class SearchFilters:
    require_a_nonzero: bool = True
    exclude_c1c2: bool = True
    exclude_obstruction: bool = True
    prioritized: bool = False
    cases: frozenset[int] = frozenset()

    def label(self) -> str:
        parts = []
        if self.require_a_nonzero:
            parts.append("a-nonzero")
        if self.exclude_c1c2:
            parts.append("exclude-c1c2")
        if self.exclude_obstruction:
            parts.append("exclude-obstruction")
        if self.prioritized:
            parts.append("prioritized")
        if self.cases:
            parts.append("cases=" + ";".join(map(str, sorted(self.cases))))
        return ",".join(parts) if parts else "none"


THEORY_FILTERS = SearchFilters()
PLAIN_FILTERS = SearchFilters(exclude_obstruction=False)
NO_FILTERS = SearchFilters(False, False, False)


def parse_filters(text: str) -> SearchFilters:
    t = text.strip().lower()
    if t in ("", "default", "theory"):
        return THEORY_FILTERS
    if t == "plain":
        return PLAIN_FILTERS
    if t == "none":
        return NO_FILTERS
    f = NO_FILTERS
    for tok in t.split(","):
        tok = tok.strip()
        if tok == "a-nonzero":
            f = replace(f, require_a_nonzero=True)
        elif tok == "exclude-c1c2":
            f = replace(f, exclude_c1c2=True)
        elif tok == "exclude-obstruction":
            f = replace(f, exclude_obstruction=True)
        elif tok == "prioritized":
            f = replace(f, prioritized=True)
        elif tok.startswith("cases="):
            ids = frozenset(int(x) for x in tok[6:].split(";") if x)
            f = replace(f, cases=ids)
        else:
            raise ValueError(f"unknown filter token {tok!r}")
    return f


@dataclass(frozen=True)
class SearchJob:
    field: FieldSpec
    mode: str  # 'exhaustive' | 'random'
    samples: int = 0
    seed: int | None = None
    filters: SearchFilters = THEORY_FILTERS
    shards: int = 1

    def __post_init__(self):
        if self.mode not in ("exhaustive", "random"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "random" and self.seed is None:
            raise ValueError("random mode requires an explicit seed")
        if self.shards < 1:
            raise ValueError("shards must be >= 1")


@dataclass
class SearchResult:
    apn_hits: list[Coeffs]
    counters: dict[str, int]
    manifest: dict

    def hit_indices(self, n: int) -> list[int]:
        return [tuple_index(c, n) for c in self.apn_hits]


def tuple_index(c: Coeffs, n: int) -> int:
    return (((c.A * n + c.B) * n + c.C) * n + c.D) * n + c.E


def index_tuple(idx: int, n: int) -> Coeffs:
    e = idx % n; idx //= n
    d = idx % n; idx //= n
    cc = idx % n; idx //= n
    b = idx % n; idx //= n
    return Coeffs(idx, b, cc, d, e)


def passes_filters(ctx: FieldCtx, c: Coeffs, filters: SearchFilters) -> bool:
    if filters.require_a_nonzero and c.A == 0:
        return False
    if filters.exclude_c1c2:
        c1, c2 = cond_C1_C2(ctx, c)
        if c1 or c2:
            return False
    if filters.exclude_obstruction and cond_C6(ctx, c) and h1_value(ctx, c) != 0:
        return False
    if filters.prioritized and predict_verdict(ctx, c).kind in ("excluded", "not-apn"):
        return False
    if filters.cases and not filters.cases.intersection(match_summary_cases(ctx, c)):
        return False
    return True


# -- exhaustive ----------------------------------------------------------------


class _BlockFilter:
    """Vectorized filter masks over the (D, E) plane of one (A, B, C) block."""

    def __init__(self, ctx: FieldCtx):
        n = ctx.size
        mul = ctx.np_mul
        zs = np.arange(n, dtype=np.uint16)
        frob = ctx.np_frob
        self.ctx = ctx
        self.n = n
        self.mul = mul
        self.zs = zs
        self.frob = frob
        self.norm = mul[zs, frob[zs]]  # z^(q+1)

    def mask(self, A: int, B: int, C: int, filters: SearchFilters) -> np.ndarray:
        """True where the tuple (A, B, C, D, E) is kept; shape (N, N) over (D, E)."""
        ctx, n, mul = self.ctx, self.n, self.mul
        keep = np.ones((n, n), dtype=bool)
        if A == 0:
            if filters.require_a_nonzero:
                keep[:] = False
            return keep
        Aq, Bq, Cq = ctx.frob_q(A), ctx.frob_q(B), ctx.frob_q(C)
        if filters.exclude_c1c2:
            b_ok = ctx.mul(Aq, B) == Bq
            e_ok = mul[Aq, self.zs] == self.frob[self.zs]  # A^q E == E^q per E
            if C == 0 and b_ok:
                keep[0, :] &= ~e_ok  # C1 at D = 0
            if C != 0 and ctx.mul(A, Aq) == 1 and b_ok:
                d_t = ctx.mul(A, Cq)
                if d_t != 0:
                    keep[d_t, :] &= ~e_ok  # C2 at D = A C^q
        if filters.exclude_obstruction:
            ds = self.zs
            nA, nC = ctx.norm_rel(A), ctx.norm_rel(C)
            c6 = (mul[A, self.frob[ds]] ^ C != 0) | ((nA ^ nC ^ self.norm[ds] ^ 1) != 0)
            B2 = ctx.mul(B, B)
            B2q = ctx.mul(Bq, Bq)
            Bq1 = ctx.mul(B, Bq)
            h1_const = (
                ctx.mul(ctx.mul(A, Aq), Bq1)
                ^ ctx.mul(A, B2q)
                ^ ctx.mul(Aq, B2)
                ^ ctx.mul(Bq1, nC)
                ^ Bq1
            )
            h1 = (
                h1_const
                ^ mul[ctx.mul(B2, Cq), self.frob[ds]]
                ^ mul[Bq1, self.norm[ds]]
                ^ mul[ctx.mul(B2q, C), ds]
            )
            keep &= ~(c6 & (h1 != 0))[:, None]
        return keep


def _sweep_blocks(ctx: FieldCtx, lo: int, hi: int, filters: SearchFilters):
    """Run blocks [lo, hi) of the (A, B, C) range; returns (hits, tested, skipped)."""
    n = ctx.size
    bt = BatchTables(ctx)
    bf = _BlockFilter(ctx)
    ds = np.repeat(np.arange(n, dtype=np.uint16), n)
    es = np.tile(np.arange(n, dtype=np.uint16), n)
    hits: list[int] = []
    tested = 0
    skipped = 0
    for blk in range(lo, hi):
        A = blk // (n * n)
        B = (blk // n) % n
        C = blk % n
        keep = bf.mask(A, B, C, filters).reshape(-1)
        kcount = int(keep.sum())
        skipped += n * n - kcount
        tested += kcount
        if kcount == 0:
            continue
        idx = np.nonzero(keep)[0]
        sub_d, sub_e = ds[idx], es[idx]
        av = np.full(idx.shape, A, dtype=np.uint16)
        bv = np.full(idx.shape, B, dtype=np.uint16)
        cv = np.full(idx.shape, C, dtype=np.uint16)
        apn = apn_mask_batch(bt, av, bv, cv, sub_d, sub_e)
        base = blk * n * n
        for k in np.nonzero(apn)[0]:
            hits.append(base + int(idx[k]))
    return hits, tested, skipped


def _shard_worker(args):
    spec_m, spec_mod, lo, hi, filters = args
    ctx = make_field(FieldSpec(spec_m, spec_mod))
    return _sweep_blocks(ctx, lo, hi, filters)


def run_exhaustive(job: SearchJob, verify: bool = True) -> SearchResult:
    """Visit every tuple once, apply filters, APN-test survivors.

    Results are a pure function of (field, filters); the shard count only
    changes the work partition. Every hit is re-verified with the no-abort
    DDT oracle and the equation-form test unless verify=False.
    """
    if job.mode != "exhaustive":
        raise ValueError("job mode is not exhaustive")
    spec = job.field
    if 5 * spec.degree > EXHAUSTIVE_GATE_BITS:
        raise SearchGateError(
            f"exhaustive universe (2^{5 * spec.degree}) exceeds the "
            f"2^{EXHAUSTIVE_GATE_BITS} gate for {spec}"
        )
    ctx = make_field(spec)
    n = ctx.size
    nblocks = n ** 3
    t0 = time.time()
    if job.shards == 1:
        parts = [_sweep_blocks(ctx, 0, nblocks, job.filters)]
    else:
        bounds = [nblocks * i // job.shards for i in range(job.shards + 1)]
        args = [
            (spec.m, spec.modulus, bounds[i], bounds[i + 1], job.filters)
            for i in range(job.shards)
        ]
        with ProcessPoolExecutor(max_workers=job.shards) as pool:
            parts = list(pool.map(_shard_worker, args))
    hit_idx: list[int] = []
    tested = 0
    skipped = 0
    for h, t, s in parts:
        hit_idx.extend(h)
        tested += t
        skipped += s
    hit_idx.sort()
    hits = [index_tuple(i, n) for i in hit_idx]
    if verify:
        for c in hits:
            if not (is_apn_ddt(ctx, c, early_abort=False) and is_apn_equation(ctx, c)):
                raise AssertionError(f"hit {c} failed independent re-verification")
    perms = sum(is_permutation(ctx, c) for c in hits)
    counters = {
        "universe": n ** 5,
        "tested": tested,
        "skipped_by_filter": skipped,
        "apn": len(hits),
        "permutations": perms,
    }
    manifest = {
        "field": str(spec),
        "mode": "exhaustive",
        "filters": job.filters.label(),
        "seed": None,
        "shards": job.shards,
        "wall_time_s": round(time.time() - t0, 3),
        "tool_version": __version__,
    }
    return SearchResult(hits, counters, manifest)


# -- random --------------------------------------------------------------------

_MAX_DRAWS_PER_SAMPLE = 1_000_000


def _random_sample(ctx: FieldCtx, seed: int, j: int, filters: SearchFilters):
    """(tuple, rejected_draws) for sample j; deterministic in (seed, j)."""
    stream = Stream64(seed, j)
    n5 = ctx.size ** 5
    rejected = 0
    for _ in range(_MAX_DRAWS_PER_SAMPLE):
        c = index_tuple(stream.below(n5), ctx.size)
        if passes_filters(ctx, c, filters):
            return c, rejected
        rejected += 1
    raise SearchGateError(
        f"filter region too sparse: {_MAX_DRAWS_PER_SAMPLE} draws rejected "
        f"for sample {j}"
    )


def _random_shard_worker(args):
    spec_m, spec_mod, seed, lo, hi, filters = args
    ctx = make_field(FieldSpec(spec_m, spec_mod))
    hits = []
    rejected = 0
    for j in range(lo, hi):
        c, rej = _random_sample(ctx, seed, j, filters)
        rejected += rej
        if is_apn_ddt(ctx, c):
            hits.append(tuple_index(c, ctx.size))
    return hits, rejected


def run_random(job: SearchJob, verify: bool = True) -> SearchResult:
    """Draw `samples` filtered tuples from seed-addressed streams and test each.

    Sampling is with replacement over the filtered universe (per-sample
    rejection); the hit list is deduplicated and sorted, and is identical
    for any shard count.
    """
    if job.mode != "random":
        raise ValueError("job mode is not random")
    spec = job.field
    ctx = make_field(spec)
    t0 = time.time()
    if job.shards == 1:
        parts = [_random_shard_worker((spec.m, spec.modulus, job.seed, 0, job.samples, job.filters))]
    else:
        bounds = [job.samples * i // job.shards for i in range(job.shards + 1)]
        args = [
            (spec.m, spec.modulus, job.seed, bounds[i], bounds[i + 1], job.filters)
            for i in range(job.shards)
        ]
        with ProcessPoolExecutor(max_workers=job.shards) as pool:
            parts = list(pool.map(_random_shard_worker, args))
    hit_idx: list[int] = []
    rejected = 0
    for h, r in parts:
        hit_idx.extend(h)
        rejected += r
    hit_idx = sorted(set(hit_idx))
    hits = [index_tuple(i, ctx.size) for i in hit_idx]
    if verify:
        for c in hits:
            if not (is_apn_ddt(ctx, c, early_abort=False) and is_apn_equation(ctx, c)):
                raise AssertionError(f"hit {c} failed independent re-verification")
    perms = sum(is_permutation(ctx, c) for c in hits)
    counters = {
        "universe": ctx.size ** 5,
        "tested": job.samples,
        "skipped_by_filter": rejected,
        "apn": len(hits),
        "permutations": perms,
    }
    manifest = {
        "field": str(spec),
        "mode": "random",
        "filters": job.filters.label(),
        "seed": job.seed,
        "shards": job.shards,
        "wall_time_s": round(time.time() - t0, 3),
        "tool_version": __version__,
    }
    return SearchResult(hits, counters, manifest)


def run(job: SearchJob, verify: bool = True) -> SearchResult:
    if job.mode == "exhaustive":
        return run_exhaustive(job, verify=verify)
    return run_random(job, verify=verify)


# -- common-factor regime census -------------------------------------------


@dataclass
class CensusReport:
    """Classification of the h1 = 0, BC^q + B^qD != 0 (A != 0) regime.

    Every regime tuple carries an empirical APN flag and a gcd(a2, a0)
    triviality flag; tuples with nontrivial gcd are split by the phi-fixed
    point scan of (G = 0, gcd = 0) into 'exceptional' (no off-plane point)
    and 'generic'. Scans for non-APN tuples are skipped unless full_scan.
    """

    field: str
    regime_size: int = 0
    apn_total: int = 0
    gcd_trivial: int = 0
    gcd_trivial_apn: int = 0
    gcd_nontrivial: int = 0
    gcd_nontrivial_apn: int = 0
    exceptional_apn: int = 0
    generic_apn: int = 0
    exceptional_nonapn: int | None = None
    generic_nonapn: int | None = None
    exceptional_apn_all_c_zero: bool = True
    exceptional_tuples: list[Coeffs] = field(default_factory=list)

    def to_json(self) -> dict:
        out = dict(self.__dict__)
        out["exceptional_tuples"] = [list(c) for c in self.exceptional_tuples]
        return out


def regime_tuples(ctx: FieldCtx) -> list[Coeffs]:
    """All tuples with A != 0, h1 = 0 and BC^q + B^qD != 0."""
    n = ctx.size
    mul, frob = ctx.mul, ctx.frob_q
    out = []
    for a in range(1, n):
        for b in range(1, n):  # B = 0 forces BC^q + B^qD = 0
            bq = frob(b)
            for cc in range(n):
                bcq = mul(b, frob(cc))
                for d in range(n):
                    if bcq ^ mul(bq, d) == 0:
                        continue
                    if h1_value(ctx, Coeffs(a, b, cc, d, 0)) != 0:
                        continue  # h1 does not involve E
                    out.extend(Coeffs(a, b, cc, d, e) for e in range(n))
    return out


def gcd_regime_census(spec: FieldSpec, full_scan: bool = False) -> CensusReport:
    """Classify the whole regime at one field; see CensusReport."""
    from .sympoly import (
        build_variety_system,
        gcd_bivariate,
        g1_g2_displays,
        rational_point_scan,
    )
    from .sympoly import _g_display_brackets  # display bracket reuse

    ctx = make_field(spec)
    rep = CensusReport(field=str(spec))
    tuples = regime_tuples(ctx)
    rep.regime_size = len(tuples)
    if not tuples:
        return rep

    bt = BatchTables(ctx)
    arr = np.array(tuples, dtype=np.uint16)
    apn = np.zeros(len(tuples), dtype=bool)
    for lo in range(0, len(tuples), 8192):
        hi = min(lo + 8192, len(tuples))
        apn[lo:hi] = apn_mask_batch(
            bt, arr[lo:hi, 0], arr[lo:hi, 1], arr[lo:hi, 2], arr[lo:hi, 3], arr[lo:hi, 4]
        )
    rep.apn_total = int(apn.sum())

    if full_scan:
        rep.exceptional_nonapn = 0
        rep.generic_nonapn = 0
    for i, c in enumerate(tuples):
        g1, g2 = g1_g2_displays(ctx, c)
        g3 = _g_display_brackets(ctx, c)[0]
        trivial = (
            gcd_bivariate(g3, g1).total_degree() <= 0
            and gcd_bivariate(g3, g2).total_degree() <= 0
        )
        is_apn = bool(apn[i])
        if trivial:
            rep.gcd_trivial += 1
            rep.gcd_trivial_apn += is_apn
            continue
        rep.gcd_nontrivial += 1
        rep.gcd_nontrivial_apn += is_apn
        if not (is_apn or full_scan):
            continue
        vs = build_variety_system(ctx, c)
        ell = gcd_bivariate(vs.a2, vs.a0)
        count, _ = rational_point_scan(ctx, [vs.G, ell], force=True)
        if count == 0:
            if is_apn:
                rep.exceptional_apn += 1
                rep.exceptional_tuples.append(c)
                if c.C != 0:
                    rep.exceptional_apn_all_c_zero = False
            else:
                rep.exceptional_nonapn += 1
        else:
            if is_apn:
                rep.generic_apn += 1
            else:
                rep.generic_nonapn += 1
    return rep
