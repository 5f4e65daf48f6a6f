"""Closed-form slipping robustness of contact points and interfaces.

The contact condition as a function of the external force magnitude s is

    c(s) = mu * |f_n + s*e_n| - ||f_t + s*e_t||

for a unit direction e expressed in the contact frame. Its zeros come from
a quadratic whose curvature d = mu^2 e_n^2 - ||e_t||^2 selects between the
four qualitative shapes (concave cap, rise-then-fall, monotone rise,
fall-then-rise). The first non-negative zero is the point robustness; the
argmax s* has a closed form with three cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .contacts import ContactInterface, ContactPoint
from .equilibrium import ContactForce, ForceSolution

LINEAR_CURVATURE_TOL = 1e-12


@dataclass(frozen=True)
class SlipAnalysis:
    """Roots, curvature, initial slope, robustness, and best magnitude."""

    s_m: float
    s_p: float
    d: float
    dcds0: float
    sr_slip: float
    s_star: float


def contact_condition(force: ContactForce, direction, s):
    """c(s) for a local-frame unit direction; vectorized over s."""
    e = np.asarray(direction, dtype=float)
    s = np.asarray(s, dtype=float)
    fn = force.normal + s * e[2]
    ft = np.sqrt(
        (force.tangential[0] + s * e[0]) ** 2 + (force.tangential[1] + s * e[1]) ** 2
    )
    return force.mu * np.abs(fn) - ft


def slope(force: ContactForce, direction, s: float = 0.0) -> float:
    """dc/ds at magnitude s. At a zero tangential sum the one-sided limit
    mu*e_n - ||e_t|| is returned."""
    e = np.asarray(direction, dtype=float)
    t = force.tangential + s * e[:2]
    tn = float(np.linalg.norm(t))
    if tn < 1e-15:
        return force.mu * e[2] - float(np.hypot(e[0], e[1]))
    return force.mu * e[2] - float(e[:2] @ t) / tn


def analyze_contact(force: ContactForce, mu: float, direction) -> SlipAnalysis:
    """Closed-form slip analysis for a unit direction in the contact frame.

    Preconditions: ||direction|| = 1 (1e-9) and c(0) >= 0 (the solved state
    is not already slipping).
    """
    e = np.asarray(direction, dtype=float)
    if abs(np.linalg.norm(e) - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    fu, fv = float(force.tangential[0]), float(force.tangential[1])
    fn = float(force.normal)
    ft_norm = math.hypot(fu, fv)
    c0 = mu * abs(fn) - ft_norm
    if c0 < -1e-9 * (1.0 + mu * abs(fn)):
        raise ValueError("contact is already slipping (c(0) < 0)")
    eu, ev, en = float(e[0]), float(e[1]), float(e[2])
    et_sq = eu * eu + ev * ev

    d = mu * mu * en * en - et_sq
    # discriminant of the squared slipping equation
    n_sq = (
        mu * mu * (en * fu - eu * fn) ** 2
        + mu * mu * (en * fv - ev * fn) ** 2
        - (ev * fu - eu * fv) ** 2
    )
    lin = fu * eu + fv * ev - mu * mu * fn * en  # e . [f_u, f_v, -mu^2 f_n]

    if abs(d) < LINEAR_CURVATURE_TOL:
        denom = mu * mu * en * fn - (eu * fu + ev * fv)
        if abs(denom) < 1e-15:
            s_m = s_p = math.inf
        else:
            s_m = (ft_norm**2 - mu * mu * fn * fn) / (2.0 * denom)
            s_p = math.inf
    elif n_sq < 0.0:
        s_m = s_p = math.inf  # no real zero: the condition never reaches zero
    else:
        n = math.sqrt(n_sq)
        s_m = (lin - n) / d
        s_p = s_m + 2.0 * n / d

    sr = s_m if (math.isfinite(s_m) and s_m >= 0.0) else math.inf

    dcds0 = slope(force, e)
    s_star = _best_magnitude(fu, fv, fn, mu, eu, ev, en, ft_norm, et_sq)
    return SlipAnalysis(s_m, s_p, d, dcds0, sr, s_star)


def _best_magnitude(fu, fv, fn, mu, eu, ev, en, ft_norm, et_sq) -> float:
    """Argmax of c(s) over s >= 0, in three cases: already decreasing at 0,
    monotone increasing (direction inside the cone), interior optimum.

    The stationary point solves mu*e_n*||f_t + s e_t|| = e_t.(f_t + s e_t);
    squaring yields two roots, and only the one where the projection term
    shares the sign of e_n satisfies the unsquared equation.
    """
    if ft_norm > 1e-15:
        slope_term = (eu * fu + ev * fv) / ft_norm
    else:
        slope_term = math.sqrt(et_sq)
    if mu * en <= slope_term:
        return 0.0
    if et_sq < mu * mu * en * en:
        return math.inf
    gap = et_sq - (mu * en) ** 2
    if gap < 1e-15:
        # boundary curvature: concave rise toward a finite asymptote
        return math.inf
    b = eu * fu + ev * fv
    cross = abs(eu * fv - ev * fu)
    cand = -b / et_sq + mu * en * cross / (et_sq * math.sqrt(gap))
    return max(0.0, cand)


def direction_in_frame(point: ContactPoint, direction_world, flipped: bool) -> np.ndarray:
    """World direction expressed in the point frame, optionally in the
    mirrored frame whose normal enters the opposite body."""
    e = point.frame.T @ np.asarray(direction_world, dtype=float)
    if flipped:
        e = np.array([e[0], -e[1], -e[2]])
    return e


def force_in_frame(force: ContactForce, flipped: bool) -> ContactForce:
    """The same interface force seen from the opposite body's frame."""
    if not flipped:
        return force
    return ContactForce(
        np.array([-force.tangential[0], force.tangential[1]]), force.normal, force.mu
    )


def interface_capacity(
    interface: ContactInterface,
    solution: ForceSolution,
    direction_world,
    flipped: bool = False,
) -> float:
    """Slipping robustness of an interface: per-point robustnesses add.

    `flipped` selects the frame whose normal enters body_b, for queries
    whose transmitted force presses into that side.
    """
    total = 0.0
    for p in interface.points:
        force = force_in_frame(solution.forces[p.key], flipped)
        e = direction_in_frame(p, direction_world, flipped)
        sr = analyze_contact(force, interface.mu, e).sr_slip
        if math.isinf(sr):
            return math.inf
        total += sr
    return total


def interface_improvement(
    interface: ContactInterface,
    solution: ForceSolution,
    direction_world,
    s_eval: float = 0.0,
    flipped: bool = False,
) -> float:
    """Sum of dc/ds over the interface points at magnitude s_eval."""
    total = 0.0
    for p in interface.points:
        force = force_in_frame(solution.forces[p.key], flipped)
        e = direction_in_frame(p, direction_world, flipped)
        total += slope(force, e, s_eval)
    return total


def global_slip_maximizer(
    states: list[tuple[ContactForce, float, np.ndarray]],
) -> tuple[float, float]:
    """Magnitude maximizing the summed contact condition across interfaces.

    `states` holds (force, mu, local unit direction) per contact point
    along the loaded paths. The summed condition is piecewise concave, so
    the maximum sits at one of the per-point candidates min(sr_slip, s*).
    Returns (argmax magnitude, summed condition there); an unbounded rise
    returns (inf, inf).
    """
    if not states:
        raise ValueError("need at least one contact state")
    candidates = {0.0}
    for force, mu, e in states:
        a = analyze_contact(force, mu, e)
        if math.isfinite(min(a.sr_slip, a.s_star)):
            for c in (a.sr_slip, a.s_star):
                if math.isfinite(c):
                    candidates.add(c)
        else:
            candidates.add(math.inf)

    def summed(s: float) -> float:
        return sum(float(contact_condition(f, e, s)) for f, _, e in states)

    finite = sorted(c for c in candidates if math.isfinite(c))
    best_s, best_c = 0.0, summed(0.0)
    for s in finite:
        cs = summed(s)
        if cs > best_c + 1e-12:
            best_s, best_c = s, cs
    if math.inf in candidates:
        # unbounded only if the total slope stays positive past all kinks
        probe = (finite[-1] if finite else 0.0) + 1.0
        rate = sum(slope(f, e, probe + 1.0) for f, _, e in states)
        if rate > 1e-12 and summed(probe) > best_c:
            return math.inf, math.inf
    return best_s, best_c
