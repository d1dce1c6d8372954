"""Canonical height machinery for marked sections.

The forward/backward canonical heights are limits of h(f^n s)/lambda^n
where h pairs the coordinate degree triple with the nef eigendivisor.
Increments of the computed sequence decay geometrically (ratio 1/lambda
up to the family's vertical corrections), so the reported error bound
is the lambda/(lambda-1)-scaled largest tail increment: a heuristic,
never a certificate, and flagged as such.

Classification is conservative: "stable" is only ever concluded from
exact periodicity or from degree sequences bounded in both time
directions; smallness of the height estimate alone never suffices.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

from . import cache as orbit_cache
from .nslattice import DivisorClass
from .wehler import (
    DegreeCapError,
    IterationLimitError,
    MarkedSection,
    OrbitConfig,
    OrbitRecord,
    SurfaceFamily,
    automorphism_apply,
    orbit_degrees,
    section_degree_exact,
)


@dataclass(frozen=True)
class HeightEstimate:
    """Truncated canonical height with its heuristic tail bound."""

    value: float
    error_bound: float
    n_used: int
    sequence: tuple[tuple[int, float], ...]
    certified: bool
    direction: str
    fitted_ratio: Optional[float] = None
    partial: bool = False

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "error_bound": self.error_bound,
            "n_used": self.n_used,
            "sequence": [[n, h] for n, h in self.sequence],
            "certified": self.certified,
            "direction": self.direction,
            "fitted_ratio": self.fitted_ratio,
            "partial": self.partial,
        }


@dataclass(frozen=True)
class StabilityVerdict:
    tag: str  # periodic | stable_nonperiodic_flagged | unstable | undetermined
    period: Optional[int] = None
    evidence: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"tag": self.tag, "period": self.period, "evidence": self.evidence}


@dataclass(frozen=True)
class AlphaEstimate:
    alpha_lower: float
    alpha_upper: float
    alpha_point: float
    window: tuple[int, int]
    exact_periodic: bool = False
    partial: bool = False

    def as_dict(self) -> dict:
        return {
            "alpha_lower": self.alpha_lower,
            "alpha_upper": self.alpha_upper,
            "alpha_point": self.alpha_point,
            "window": list(self.window),
            "exact_periodic": self.exact_periodic,
            "partial": self.partial,
        }


# ---------------------------------------------------------------------------
# orbit access with caching


def _orbit(fam: SurfaceFamily, s: MarkedSection, n_max: int, direction: int,
           config: Optional[OrbitConfig]) -> list[tuple[int, tuple, str]]:
    cfg = config or OrbitConfig()
    knobs = {
        "degree_cap": cfg.degree_cap,
        "budget": cfg.exact_budget_bytes,
        "primes": cfg.n_primes,
        "gcd_budget": cfg.gcd_budget,
    }
    key = orbit_cache.orbit_key(
        fam.content_hash(), str(s), direction, n_max, knobs
    )
    got = orbit_cache.load_orbit(key)
    if got is not None:
        return got
    records = orbit_degrees(fam, s, n_max, direction, cfg)
    slim = [(r.n, r.degrees, r.exactness) for r in records]
    orbit_cache.store_orbit(key, slim)
    return slim


# ---------------------------------------------------------------------------
# naive and canonical heights


def _divisor_weights(fam: SurfaceFamily, direction: str) -> tuple[float, float, float]:
    if direction == "+":
        return fam.eigendivisor("+").as_floats()
    if direction == "-":
        return fam.eigendivisor("-").as_floats()
    if direction == "total":
        dp = fam.eigendivisor("+").as_floats()
        dm = fam.eigendivisor("-").as_floats()
        return tuple(a + b for a, b in zip(dp, dm))
    raise ValueError("direction must be '+', '-' or 'total'")


def naive_height(fam: SurfaceFamily, s: MarkedSection, direction: str = "total") -> float:
    """Degree pairing h_direction(s) = sum_i d_i deg_i(s) >= 0."""
    w = _divisor_weights(fam, direction)
    return float(sum(wi * di for wi, di in zip(w, s.degrees())))


def naive_height_exact(fam: SurfaceFamily, s: MarkedSection, direction: str = "+"):
    """The same pairing as an exact element of Q(lambda)."""
    d = fam.eigendivisor(direction) if direction in "+-" else None
    if d is None:
        dp, dm = fam.eigendivisor("+"), fam.eigendivisor("-")
        d = DivisorClass(
            tuple(a + b for a, b in zip(dp.coeffs, dm.coeffs)), role="D"
        )
    return section_degree_exact(s, d)


def height_sequence(
    fam: SurfaceFamily,
    s: MarkedSection,
    direction: str = "+",
    max_n: int = 6,
    config: Optional[OrbitConfig] = None,
) -> list[tuple[int, float]]:
    """[(n, h(f^{±n} s)/lambda^n)] for n = 0..max_n from the degree orbit."""
    w = _divisor_weights(fam, "+" if direction == "total" else direction)
    if direction == "total":
        w = _divisor_weights(fam, "total")
    lam = fam.lambda_float()
    orbit_dir = +1 if direction in ("+", "total") else -1
    records = _orbit(fam, s, max_n, orbit_dir, config)
    out = []
    for n, degs, _ in records:
        k = abs(n)
        h = sum(wi * di for wi, di in zip(w, degs))
        out.append((k, h / lam**k))
    return out


def canonical_height(
    fam: SurfaceFamily,
    s: MarkedSection,
    direction: str = "+",
    max_n: int = 6,
    config: Optional[OrbitConfig] = None,
) -> HeightEstimate:
    """Truncated limit of h(f^{±n} s)/lambda^n with the geometric tail bound.

    The bound scales the largest increment observed over the tail window
    by lambda/(lambda-1); it is heuristic (certified=False) because the
    true increment constant of the family is not computable from the
    orbit alone.
    """
    if max_n < 2:
        raise ValueError("max_n must be at least 2")
    lam = fam.lambda_float()
    partial = False
    try:
        seq = height_sequence(fam, s, direction, max_n, config)
    except (IterationLimitError, RuntimeError):
        # retry at reduced depth, flag partial
        seq = height_sequence(fam, s, direction, max(2, max_n // 2), config)
        partial = True
    incs = [abs(b[1] - a[1]) for a, b in zip(seq, seq[1:])]
    n_star = len(seq) - 1
    tail_from = max(1, n_star - 3)
    tail = incs[tail_from - 1 :] if len(incs) >= tail_from else incs
    worst = max(tail) if tail else 0.0
    error = lam / (lam - 1.0) * worst
    return HeightEstimate(
        value=seq[-1][1],
        error_bound=error,
        n_used=n_star,
        sequence=tuple(seq),
        certified=False,
        direction=direction,
        fitted_ratio=fit_increment_ratio(incs),
        partial=partial,
    )


def fit_increment_ratio(increments) -> Optional[float]:
    """Least-squares slope of log|increments|; None if too short."""
    pts = [(k, math.log(v)) for k, v in enumerate(increments) if v > 0]
    if len(pts) < 2:
        return None
    n = len(pts)
    sx = sum(p[0] for p in pts)
    sy = sum(p[1] for p in pts)
    sxx = sum(p[0] * p[0] for p in pts)
    sxy = sum(p[0] * p[1] for p in pts)
    denom = n * sxx - sx * sx
    if denom == 0:
        return None
    slope = (n * sxy - sx * sy) / denom
    return math.exp(slope)


# ---------------------------------------------------------------------------
# periodicity and classification


def detect_cycle(
    fam: SurfaceFamily, s: MarkedSection, max_period: int
) -> Optional[int]:
    """Exact minimal period m <= max_period with f^m(s) = s, else None.

    Periodic sections have bounded degrees, so iteration is cut off as
    soon as coordinates outgrow a small multiple of the starting size.
    """
    cap = 64 * (max(s.degrees()) + 1)
    cur = s
    for m in range(1, max_period + 1):
        try:
            cur = automorphism_apply(fam, cur, 1, degree_cap=cap)
        except IterationLimitError:
            return None
        if cur == s:
            return m
    return None


def classify(
    fam: SurfaceFamily,
    s: MarkedSection,
    gap_eps: float = 1e-3,
    max_n: int = 6,
    max_period: int = 12,
    config: Optional[OrbitConfig] = None,
) -> StabilityVerdict:
    """Stability verdict per the weak-Northcott decision procedure.

    periodic(m): exact cycle found.  stable_nonperiodic_flagged: both
    degree sequences bounded by the naive-height ceiling over |n| <=
    max_n (flagged for review, with a base-locus note when the degree
    triple pairs to zero against the big divisor).  unstable: height
    estimate clears gap_eps net of its error bound.  Smallness of the
    estimate alone never yields "stable".
    """
    if gap_eps <= 0:
        raise ValueError("gap_eps must be positive")
    m = detect_cycle(fam, s, max_period)
    if m is not None:
        return StabilityVerdict(
            tag="periodic",
            period=m,
            evidence={"max_period": max_period, "exact": True},
        )
    lam = fam.lambda_float()
    ceiling_slack = 2.0 * lam / (lam - 1.0)
    h0 = naive_height(fam, s, "total")
    w = _divisor_weights(fam, "total")
    bounded = {}
    partial = False
    degseqs = {}
    for direction, odir in (("forward", +1), ("backward", -1)):
        try:
            recs = _orbit(fam, s, max_n, odir, config)
        except (RuntimeError, IterationLimitError):
            partial = True
            bounded[direction] = False
            continue
        hs = [sum(wi * di for wi, di in zip(w, degs)) for _, degs, _ in recs]
        degseqs[direction] = [list(degs) for _, degs, _ in recs]
        bounded[direction] = max(hs) <= h0 + ceiling_slack
    if bounded.get("forward") and bounded.get("backward"):
        note = None
        if h0 == 0.0 and not s.is_constant():
            note = "degree triple pairs to zero against D: candidate base-locus member"
        elif h0 == 0.0:
            note = "constant section: degree triple pairs to zero against D"
        return StabilityVerdict(
            tag="stable_nonperiodic_flagged",
            evidence={
                "window": max_n,
                "ceiling": h0 + ceiling_slack,
                "degree_sequences": degseqs,
                "base_locus_note": note,
            },
        )
    est_p = canonical_height(fam, s, "+", max_n, config)
    est_m = canonical_height(fam, s, "-", max_n, config)
    total = est_p.value + est_m.value
    total_err = est_p.error_bound + est_m.error_bound
    if total - total_err > gap_eps:
        return StabilityVerdict(
            tag="unstable",
            evidence={
                "height_estimate": total,
                "error_bound": total_err,
                "gap_eps": gap_eps,
                "partial": partial or est_p.partial or est_m.partial,
            },
        )
    return StabilityVerdict(
        tag="undetermined",
        evidence={
            "height_estimate": total,
            "error_bound": total_err,
            "gap_eps": gap_eps,
            "partial": partial or est_p.partial or est_m.partial,
        },
    )


# ---------------------------------------------------------------------------
# arithmetic degree


def ample_height(degrees, base_degree: int = 1) -> float:
    """Reference ample height: total coordinate degree plus the base term.

    Any positive-coefficient degree functional works (the growth rate is
    independent of the ample class); the +1 keeps constant sections off
    zero so the ratio proxies are defined.
    """
    return float(base_degree + sum(degrees))


def arithmetic_degree(
    fam: SurfaceFamily,
    s: MarkedSection,
    max_n: int = 6,
    max_period: int = 12,
    config: Optional[OrbitConfig] = None,
) -> AlphaEstimate:
    """(liminf proxy, limsup proxy, point estimate) of the orbit growth rate.

    Proxies are min/max of h_A(f^n s)^(1/n) over the tail window; the
    point estimate is the last consecutive ratio.  Exactly periodic
    sections return all values 1 exactly.
    """
    m = detect_cycle(fam, s, max_period)
    if m is not None:
        return AlphaEstimate(1.0, 1.0, 1.0, (0, m), exact_periodic=True)
    partial = False
    try:
        recs = _orbit(fam, s, max_n, +1, config)
    except (RuntimeError, IterationLimitError):
        recs = _orbit(fam, s, max(2, max_n // 2), +1, config)
        partial = True
    hs = [ample_height(degs) for _, degs, _ in recs]
    n_top = len(hs) - 1
    lo_win = max(1, n_top // 2)
    roots = [hs[n] ** (1.0 / n) for n in range(lo_win, n_top + 1)]
    point = hs[n_top] / hs[n_top - 1] if n_top >= 1 else 1.0
    return AlphaEstimate(
        alpha_lower=min(roots),
        alpha_upper=max(roots),
        alpha_point=point,
        window=(lo_win, n_top),
        partial=partial,
    )


# ---------------------------------------------------------------------------
# report emission


def section_report(
    fam: SurfaceFamily,
    s: MarkedSection,
    gap_eps: float = 1e-3,
    max_n: int = 6,
    max_period: int = 12,
    config: Optional[OrbitConfig] = None,
) -> dict:
    """Per-section JSON-ready report: heights, verdict, arithmetic degree."""
    est_p = canonical_height(fam, s, "+", max_n, config)
    est_m = canonical_height(fam, s, "-", max_n, config)
    verdict = classify(fam, s, gap_eps, max_n, max_period, config)
    alpha = arithmetic_degree(fam, s, max_n, max_period, config)
    return {
        "h_plus": est_p.as_dict(),
        "h_minus": est_m.as_dict(),
        "h_total": {
            "value": est_p.value + est_m.value,
            "error_bound": est_p.error_bound + est_m.error_bound,
            "certified": False,
        },
        "naive": {
            "h_plus": naive_height(fam, s, "+"),
            "h_minus": naive_height(fam, s, "-"),
            "h_total": naive_height(fam, s, "total"),
            "exact": True,
        },
        "sequence": [[n, h] for n, h in est_p.sequence],
        "error_bound": est_p.error_bound + est_m.error_bound,
        "verdict": verdict.as_dict(),
        "alpha": alpha.as_dict(),
    }


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2)
