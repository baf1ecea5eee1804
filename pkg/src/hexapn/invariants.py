"""CCZ-invariant fingerprints and invariant-class partitioning.

Fingerprints bundle the differential spectrum, the extended Walsh spectrum
and (gated, opt-in) the GF(2) ranks of the graph and DDT-support incidence
matrices. Equal fingerprints never certify equivalence; distinct
fingerprints certify inequivalence. Rank matrices have N^2 rows where
N = q^2, so the gate keeps them to 4096 rows (q <= 8) unless forced.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .field import FieldCtx
from .hexanomial import Coeffs, function_table
from .diffanalysis import ddt, differential_profile
from .walsh import Spectrum, extended_walsh_spectrum_table

RANK_GATE_ROWS = 4096


class RankGateError(ValueError):
    pass


def gf2_rank(rows: list[int]) -> int:
    """Rank of a GF(2) matrix given as int bitsets, one per row."""
    basis: dict[int, int] = {}  # leading bit -> reduced row
    for row in rows:
        while row:
            lead = row.bit_length() - 1
            if lead not in basis:
                basis[lead] = row
                break
            row ^= basis[lead]
    return len(basis)


def _incidence_rank(dim_bits: int, points: list[int]) -> int:
    """Rank of M[u][v] = 1 iff u ^ v is in the point set."""
    rows = []
    for u in range(1 << dim_bits):
        row = 0
        for g in points:
            row |= 1 << (u ^ g)
        rows.append(row)
    return gf2_rank(rows)


def gamma_rank_table(ctx: FieldCtx, table: list[int], force: bool = False) -> int:
    """GF(2) rank of the graph incidence matrix of an arbitrary function table."""
    n = ctx.size
    _check_gate(n, force)
    graph = [(x << ctx.n) | fx for x, fx in enumerate(table)]
    return _incidence_rank(2 * ctx.n, graph)


def gamma_delta_rank(ctx: FieldCtx, c: Coeffs, which: str, force: bool = False) -> int:
    """Gamma: incidence rank of the graph {(x, f(x))}; Delta: of the DDT support."""
    n = ctx.size
    _check_gate(n, force)
    if which == "gamma":
        return gamma_rank_table(ctx, function_table(ctx, c), force=force)
    if which == "delta":
        table = ddt(ctx, c)
        pts = [
            (a << ctx.n) | b
            for a in range(1, n)
            for b in range(n)
            if table[a][b] > 0
        ]
        return _incidence_rank(2 * ctx.n, pts)
    raise ValueError(f"which must be 'gamma' or 'delta', not {which!r}")


def _check_gate(n: int, force: bool):
    if n * n > RANK_GATE_ROWS and not force:
        raise RankGateError(
            f"rank matrix would have {n * n} rows "
            f"(~{(n * n) ** 2 // 8 / 1e6:.0f} MB dense); pass force=True to run"
        )


@dataclass(frozen=True)
class Fingerprint:
    field: str
    diff_spectrum: Spectrum
    walsh_spectrum: Spectrum
    gamma_rank: int | None
    delta_rank: int | None

    def key(self):
        return (self.field, self.diff_spectrum, self.walsh_spectrum,
                self.gamma_rank, self.delta_rank)

    @property
    def hash(self) -> str:
        payload = json.dumps(
            {
                "field": self.field,
                "diff_spectrum": list(self.diff_spectrum),
                "walsh_spectrum": list(self.walsh_spectrum),
                "gamma_rank": self.gamma_rank,
                "delta_rank": self.delta_rank,
            },
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def to_json(self) -> dict:
        return {
            "field": self.field,
            "diff_spectrum": [list(p) for p in self.diff_spectrum],
            "walsh_spectrum": [list(p) for p in self.walsh_spectrum],
            "gamma_rank": self.gamma_rank,
            "delta_rank": self.delta_rank,
            "hash": self.hash,
        }


def fingerprint(
    ctx: FieldCtx,
    c: Coeffs,
    with_ranks: bool = False,
    force: bool = False,
) -> Fingerprint:
    table = function_table(ctx, c)
    prof = differential_profile(ctx, c)
    walsh = extended_walsh_spectrum_table(ctx, table)
    gamma = delta = None
    if with_ranks:
        gamma = gamma_delta_rank(ctx, c, "gamma", force=force)
        delta = gamma_delta_rank(ctx, c, "delta", force=force)
    return Fingerprint(
        field=str(ctx.spec),
        diff_spectrum=prof.spectrum,
        walsh_spectrum=walsh,
        gamma_rank=gamma,
        delta_rank=delta,
    )


def partition_by_fingerprint(
    ctx: FieldCtx, tuples: list[Coeffs], with_ranks: bool = False, force: bool = False
) -> dict[Fingerprint, list[Coeffs]]:
    """Group tuples with identical fingerprints (one shared field context)."""
    groups: dict[Fingerprint, list[Coeffs]] = {}
    for c in tuples:
        fp = fingerprint(ctx, c, with_ranks=with_ranks, force=force)
        groups.setdefault(fp, []).append(c)
    return groups


def group_fingerprints(items: list[tuple[Coeffs, Fingerprint]]) -> dict[Fingerprint, list[Coeffs]]:
    """Partition precomputed fingerprints; mixing field contexts is an error."""
    fields = {fp.field for _, fp in items}
    if len(fields) > 1:
        raise ValueError(f"fingerprints from mixed field contexts: {sorted(fields)}")
    groups: dict[Fingerprint, list[Coeffs]] = {}
    for c, fp in items:
        groups.setdefault(fp, []).append(c)
    return groups


def partition_csv(groups: dict[Fingerprint, list[Coeffs]], ctx: FieldCtx) -> str:
    """'group id, size, representative tuple' rows, deterministic order."""
    lines = ["group,size,representative"]
    ordered = sorted(groups.items(), key=lambda kv: (-len(kv[1]), kv[0].hash))
    for gid, (fp, members) in enumerate(ordered, 1):
        rep = min(members)
        rep_txt = ";".join(ctx.format_elem(z) for z in rep)
        lines.append(f"{gid},{len(members)},{rep_txt}")
    return "\n".join(lines) + "\n"
