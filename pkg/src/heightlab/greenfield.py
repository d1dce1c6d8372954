"""Floating companion: fiberwise Green potentials and mass estimates.

Points carry unit-normalized projective pairs plus per-coordinate
log-lifts.  One Vieta step evaluates the coordinate quadratic on the
stored pairs and produces the *reduced* conjugate lift (the pointwise
analogue of dividing the polynomial pair by its structural factors):

    ell_i' = 2 ell_j + 2 ell_k - ell_i + log ||raw pair||

so log-lifts transform by the lattice reflection plus a bounded
cocycle.  Summing the cocycle against the eigendivisor weights along
the orbit yields the partial Green potentials u_n, which converge
geometrically at rate 1/lambda.

All of this is double precision with explicit renormalization each
step; nothing here is certified, and every report carries an
uncertainty derived from the geometric tail.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .wehler import MarkedSection, SurfaceFamily

MEMBERSHIP_TOL = 1e-9


class UnstableSpecializationError(RuntimeError):
    """The fiber quadratic is too degenerate to iterate at this parameter."""


@dataclass
class ComplexFiberPoint:
    """A fiber point: parameter, three unit-max-norm pairs, log-lifts."""

    t: complex
    pairs: tuple[np.ndarray, np.ndarray, np.ndarray]
    lifts: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def copy(self) -> "ComplexFiberPoint":
        return ComplexFiberPoint(
            self.t, tuple(p.copy() for p in self.pairs), self.lifts
        )


@dataclass
class PotentialSample:
    point: ComplexFiberPoint
    u_n: list[float]
    depth: int

    def increments(self) -> list[float]:
        return [abs(b - a) for a, b in zip(self.u_n, self.u_n[1:])]


class FiberContext:
    """Family data specialized at one parameter value."""

    def __init__(self, fam: SurfaceFamily, t: complex):
        self.fam = fam
        self.t = complex(t)
        self.cvals = {key: complex(_eval_poly(poly, self.t)) for key, poly in fam.coeffs.items()}
        self.scale = max(abs(v) for v in self.cvals.values()) if self.cvals else 0.0
        if self.scale == 0.0:
            raise UnstableSpecializationError(f"form vanishes at t={t}")
        self.lam = fam.lambda_float()
        self.word = fam.word

    def quadratic(self, i: int, pairs) -> tuple[complex, complex, complex]:
        j, k = [x for x in range(3) if x != i]
        mj = _monomials(pairs[j])
        mk = _monomials(pairs[k])
        q = [0j, 0j, 0j]
        for (mdeg), cv in self.cvals.items():
            q[mdeg[i]] += cv * mj[mdeg[j]] * mk[mdeg[k]]
        return q[0], q[1], q[2]

    def membership_residual(self, pairs) -> float:
        q0, q1, q2 = self.quadratic(0, pairs)
        u, v = pairs[0]
        num = abs(q0 * u * u + q1 * u * v + q2 * v * v)
        den = max(abs(q0), abs(q1), abs(q2), 1e-300)
        return num / den


def _eval_poly(poly, t: complex) -> complex:
    acc = 0j
    for c in reversed(poly.coeffs):
        acc = acc * t + complex(c)
    return acc


def _monomials(pair) -> tuple[complex, complex, complex]:
    a, b = complex(pair[0]), complex(pair[1])
    return (a * a, a * b, b * b)


def _unit(pair) -> tuple[np.ndarray, float]:
    norm = max(abs(pair[0]), abs(pair[1]))
    if norm == 0.0:
        raise UnstableSpecializationError("zero projective pair")
    return np.array([pair[0] / norm, pair[1] / norm], dtype=complex), math.log(norm)


def lift_point(fam: SurfaceFamily, s: MarkedSection, t: complex) -> ComplexFiberPoint:
    """Evaluate a section's polynomial pairs at t (lifts absorbed)."""
    pairs = []
    lifts = []
    for pr in s.pairs:
        a = _eval_poly(pr.p, t)
        b = _eval_poly(pr.q, t)
        unit, ell = _unit((a, b))
        pairs.append(unit)
        lifts.append(ell)
    return ComplexFiberPoint(complex(t), tuple(pairs), tuple(lifts))


def point_from_values(t: complex, triples: Sequence[tuple[complex, complex]]) -> ComplexFiberPoint:
    pairs = []
    lifts = []
    for a, b in triples:
        unit, ell = _unit((a, b))
        pairs.append(unit)
        lifts.append(ell)
    return ComplexFiberPoint(complex(t), tuple(pairs), tuple(lifts))


# ---------------------------------------------------------------------------
# the fiber map


def _vieta_step(ctx: FiberContext, pt: ComplexFiberPoint, i: int,
                *, degeneracy_tol: float = 1e-12) -> ComplexFiberPoint:
    """One involution at floating precision with reduced-lift bookkeeping."""
    q0, q1, q2 = ctx.quadratic(i, pt.pairs)
    qscale = max(abs(q0), abs(q1), abs(q2))
    if qscale <= degeneracy_tol * ctx.scale:
        raise UnstableSpecializationError(
            f"quadratic degenerates at t={pt.t:.6g} (coordinate {i + 1})"
        )
    u, v = complex(pt.pairs[i][0]), complex(pt.pairs[i][1])
    # reduced conjugate values (R2, R0) evaluated stably in the larger chart
    if abs(u) >= abs(v):
        r2 = q2 / u
        r0 = -(q1 + r2 * v) / u
    else:
        r0 = q0 / v
        r2 = -(q1 + r0 * u) / v
    raw = (r2, r0)
    norm = max(abs(raw[0]), abs(raw[1]))
    if norm <= degeneracy_tol * qscale:
        raise UnstableSpecializationError(
            f"conjugate root collapses at t={pt.t:.6g} (coordinate {i + 1})"
        )
    new_pair = np.array([raw[0] / norm, raw[1] / norm], dtype=complex)
    new_pair = _polish(q0, q1, q2, new_pair)
    j, k = [x for x in range(3) if x != i]
    ell = list(pt.lifts)
    ell[i] = 2.0 * ell[j] + 2.0 * ell[k] - ell[i] + math.log(norm)
    pairs = list(pt.pairs)
    pairs[i] = new_pair
    out = ComplexFiberPoint(pt.t, tuple(pairs), tuple(ell))
    resid = ctx.membership_residual(out.pairs)
    if resid > MEMBERSHIP_TOL:
        raise UnstableSpecializationError(
            f"membership drift {resid:.2e} at t={pt.t:.6g}"
        )
    return out


def _polish(q0: complex, q1: complex, q2: complex, pair: np.ndarray) -> np.ndarray:
    """One Newton step on the quadratic in the better-conditioned chart."""
    u, v = complex(pair[0]), complex(pair[1])
    if abs(u) >= abs(v):
        w = v / u
        f = q0 + q1 * w + q2 * w * w
        df = q1 + 2 * q2 * w
        if abs(df) > 1e-30:
            w -= f / df
        out = np.array([1.0 + 0j, w], dtype=complex)
    else:
        w = u / v
        f = q0 * w * w + q1 * w + q2
        df = 2 * q0 * w + q1
        if abs(df) > 1e-30:
            w -= f / df
        out = np.array([w, 1.0 + 0j], dtype=complex)
    norm = max(abs(out[0]), abs(out[1]))
    return out / norm


def fiber_map(
    fam: SurfaceFamily,
    pt: ComplexFiberPoint,
    power: int = 1,
    ctx: Optional[FiberContext] = None,
) -> ComplexFiberPoint:
    """Apply the word automorphism on one fiber, ``power`` signed times."""
    if power == 0:
        return pt.copy()
    if ctx is None:
        ctx = FiberContext(fam, pt.t)
    word = ctx.word if power > 0 else tuple(reversed(ctx.word))
    cur = pt
    for _ in range(abs(power)):
        for letter in word:
            cur = _vieta_step(ctx, cur, letter - 1)
    return cur


# ---------------------------------------------------------------------------
# Green potentials


def _weights(fam: SurfaceFamily, direction: str) -> tuple[float, float, float]:
    return fam.eigendivisor(direction).as_floats()


def green_potential(
    fam: SurfaceFamily,
    pt: ComplexFiberPoint,
    direction: str = "+",
    depth: int = 12,
    ctx: Optional[FiberContext] = None,
) -> PotentialSample:
    """Partial Green potentials u_1..u_depth at the point.

    u_n = sum_{j<n} lambda^{-j} v0(f^j p) with v0 the one-step lift
    cocycle paired against the eigendivisor weights; the limit is the
    relative potential of the invariant current against the log-max
    reference metric.
    """
    if direction not in ("+", "-"):
        raise ValueError("direction must be '+' or '-'")
    if ctx is None:
        ctx = FiberContext(fam, pt.t)
    w = _weights(fam, direction)
    lam = ctx.lam
    sgn = +1 if direction == "+" else -1
    u_vals = []
    acc = 0.0
    cur = ComplexFiberPoint(pt.t, tuple(p.copy() for p in pt.pairs), (0.0, 0.0, 0.0))
    for j in range(depth):
        stepped = fiber_map(fam, ComplexFiberPoint(cur.t, cur.pairs, (0.0, 0.0, 0.0)),
                            sgn, ctx)
        v0 = sum(wi * li for wi, li in zip(w, stepped.lifts)) / lam
        acc += v0 / lam**j
        u_vals.append(acc)
        cur = stepped
    return PotentialSample(point=pt, u_n=u_vals, depth=depth)


def potential_value(
    fam: SurfaceFamily,
    s: MarkedSection,
    t: complex,
    direction: str = "+",
    depth: int = 12,
    ctx: Optional[FiberContext] = None,
) -> float:
    """Phi(t) = phi(sigma(t)) + u_depth(sigma(t)): potential of the pulled
    back invariant current against the section's polynomial lifts."""
    pt = lift_point(fam, s, t)
    w = _weights(fam, direction)
    phi = sum(wi * li for wi, li in zip(w, pt.lifts))
    sample = green_potential(fam, pt, direction, depth, ctx)
    return phi + sample.u_n[-1]


# ---------------------------------------------------------------------------
# mass estimates over parameter annuli


def circle_average(
    fam: SurfaceFamily,
    s: MarkedSection,
    radius: float,
    grid: int,
    direction: str = "+",
    depth: int = 12,
) -> tuple[float, int]:
    """Average of Phi over |t| = radius; returns (average, dropped)."""
    total = 0.0
    dropped = 0
    vals = []
    for k in range(grid):
        t = radius * cmath.exp(2j * cmath.pi * k / grid)
        try:
            vals.append(potential_value(fam, s, t, direction, depth))
        except UnstableSpecializationError:
            dropped += 1
    if not vals:
        raise UnstableSpecializationError(f"all samples dropped on |t|={radius}")
    # pairwise summation for reproducible reduction order
    arr = np.array(vals, dtype=float)
    total = float(arr.sum())
    return total / len(vals), dropped


def mass_vs_height(
    fam: SurfaceFamily,
    s: MarkedSection,
    direction: str = "+",
    radii: tuple[float, float] = (8.0, 64.0),
    grid: int = 512,
    depth: int = 12,
    hhat: Optional[float] = None,
    hhat_error: float = 0.0,
) -> dict:
    """Jensen mass estimate over the annulus versus the canonical height.

    The slope of the circle averages of Phi between the two radii
    estimates the mass of the pulled-back invariant current, which
    equals the canonical height over a one-dimensional base.  A DSH
    window variant (radii e^r, e^{2r}) cross-validates.  The report is
    flagged inconclusive when the geometric tail bound exceeds 10% of
    the estimate.
    """
    r1, r2 = radii
    if not 0 < r1 < r2:
        raise ValueError("radii must satisfy 0 < r1 < r2")
    m1, drop1 = circle_average(fam, s, r1, grid, direction, depth)
    m2, drop2 = circle_average(fam, s, r2, grid, direction, depth)
    estimate = (m2 - m1) / (math.log(r2) - math.log(r1))
    # DSH window at r = log(r1): circles r1 and r1^2
    r = math.log(r1)
    md1, dd1 = circle_average(fam, s, r1, grid, direction, depth)
    md2, dd2 = circle_average(fam, s, r1 * r1, grid, direction, depth)
    dsh_estimate = (md2 - md1) / r
    lam = fam.lambda_float()
    tail = _tail_bound(fam, s, direction, depth, (r1, r2))
    uncertainty = tail + abs(estimate) * (drop1 + drop2) / max(1, 2 * grid)
    report = {
        "radii": [r1, r2],
        "grid": grid,
        "depth": depth,
        "direction": direction,
        "mass_estimate": estimate,
        "dsh_estimate": dsh_estimate,
        "dsh_radii": [r1, r1 * r1],
        "uncertainty": uncertainty,
        "dropped_samples": drop1 + drop2 + dd1 + dd2,
        "inconclusive": False,
        "certified": False,
    }
    if hhat is not None:
        report["hhat"] = hhat
        report["hhat_error"] = hhat_error
        report["ratio"] = estimate / hhat if hhat else None
    if abs(estimate) > 1e-12 and tail > 0.1 * abs(estimate):
        report["inconclusive"] = True
        report["diagnosis"] = (
            f"tail bound {tail:.3g} exceeds 10% of estimate {estimate:.3g}; "
            "increase depth"
        )
    return report


def _tail_bound(fam, s, direction, depth, radii, probes: int = 16) -> float:
    """Geometric bound on the truncation error of u_depth over the annulus."""
    lam = fam.lambda_float()
    worst = 0.0
    rng = np.random.default_rng(0xC0FFEE)
    for _ in range(probes):
        r = math.exp(rng.uniform(math.log(radii[0]), math.log(radii[1])))
        t = r * cmath.exp(2j * math.pi * rng.uniform())
        try:
            pt = lift_point(fam, s, t)
            sample = green_potential(fam, pt, direction, depth)
        except UnstableSpecializationError:
            continue
        incs = sample.increments()
        if incs:
            worst = max(worst, incs[-1] * (1.0 / (lam - 1.0)) * lam)
    return worst


# ---------------------------------------------------------------------------
# degeneration rate toward the boundary parameter


def degeneration_fit(
    fam: SurfaceFamily,
    s: MarkedSection,
    direction: str = "+",
    depth: int = 10,
    radii: Optional[Sequence[float]] = None,
    angle: float = 0.37,
) -> dict:
    """Fit |u_depth - u_{depth-1}| * lambda^{depth-1} ~ C1 log+|t| + C2
    along a ray toward the boundary parameter t = infinity."""
    lam = fam.lambda_float()
    if radii is None:
        radii = [4.0 * 2.0**k for k in range(8)]
    xs, ys = [], []
    for r in radii:
        t = r * cmath.exp(1j * angle)
        try:
            pt = lift_point(fam, s, t)
            sample = green_potential(fam, pt, direction, depth)
        except UnstableSpecializationError:
            continue
        incs = sample.increments()
        if not incs:
            continue
        xs.append(max(0.0, math.log(abs(t))))
        ys.append(abs(incs[-1]) * lam ** (depth - 1))
    if len(xs) < 3:
        return {"c1": None, "c2": None, "points": len(xs)}
    a = np.vstack([np.array(xs), np.ones(len(xs))]).T
    coef, res, *_ = np.linalg.lstsq(a, np.array(ys), rcond=None)
    return {
        "c1": float(coef[0]),
        "c2": float(coef[1]),
        "points": len(xs),
        "residual": float(res[0]) if len(res) else 0.0,
    }


# ---------------------------------------------------------------------------
# CSV emitters


def potential_profile_csv(
    fam: SurfaceFamily,
    s: MarkedSection,
    ts: Sequence[complex],
    direction: str = "+",
    depth: int = 12,
) -> str:
    """CSV: t_re, t_im, potential at each requested parameter."""
    lines = ["t_re,t_im,phi"]
    for t in ts:
        try:
            val = potential_value(fam, s, t, direction, depth)
        except UnstableSpecializationError:
            val = float("nan")
        lines.append(f"{t.real!r},{t.imag!r},{val!r}")
    return "\n".join(lines) + "\n"


def mass_report_csv(reports: Sequence[dict]) -> str:
    lines = ["r1,r2,estimate,hhat,ratio,uncertainty,inconclusive"]
    for rep in reports:
        r1, r2 = rep["radii"]
        lines.append(
            f"{r1!r},{r2!r},{rep['mass_estimate']!r},{rep.get('hhat', '')!r},"
            f"{rep.get('ratio', '')!r},{rep['uncertainty']!r},{rep['inconclusive']}"
        )
    return "\n".join(lines) + "\n"
