"""Report plumbing: the convention block every artifact embeds, plus
deterministic JSON/CSV formatting (17 significant digits, sorted keys)."""

from __future__ import annotations

import json

SCHEMA_VERSION = 1

#: Embedded in every report so emitted numbers are self-describing.
CONVENTIONS = {
    "omega_normalization": "omega = (i/2) sum_j dz_j ^ dzbar_j; i ddbar |z|^2 = 2 omega",
    "relative_eigenvalue": "eigenvalues of 2*H against the metric coefficient matrix G",
    "delta_phi_factor": "Delta Phi = 4 * d^2 Phi / dz dzbar (n = 1)",
    "ball_openness": "ball counts use strict inequality (open balls)",
    "density_cutoff": "density sums over nodes at geodesic distance >= cutoff",
}


def fmt(x) -> str:
    """Full-precision scientific-ish rendering for CSV cells."""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def report_envelope(kind: str, body: dict) -> dict:
    out = {"schema_version": SCHEMA_VERSION, "kind": kind, "conventions": CONVENTIONS}
    out.update(body)
    return out


def dump_json(obj) -> str:
    """Deterministic JSON rendering (sorted keys, stable float repr)."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True) + "\n"


def dump_csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(c) if not isinstance(c, str) else c for c in row))
    return "\n".join(lines) + "\n"
