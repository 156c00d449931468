"""Discrete elastica for the reinforcement beams.

A beam pinned to pixel tops is modelled as an inextensible polyline with
uniform arc-length segments.  The solver minimises the discrete bending
energy sum(turn_angle^2) / segment_length subject to: the curve starts and
ends at the first and last constraint, passes through every interior
constraint, holds horizontal tangents at both ends (moveable clamps), and
has total arc length span + excess_length.  Constraints are enforced by a
quadratic penalty with an increasing weight schedule followed by a
Gauss-Newton projection onto the constraint set.

The solver is deterministic: no randomness, fixed iteration budgets, and
an internal rescaling to unit span so that geometrically similar problems
produce identical iterates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.linalg import cho_solve_banded, cholesky_banded


class ElasticaError(ValueError):
    """Base class for elastica solver failures."""


class InfeasibleExcessError(ElasticaError):
    """Raised when span + excess_length cannot geometrically reach the
    constraint points."""


class ElasticaConvergenceError(ElasticaError):
    """Raised when the solver stops above tolerance.  Carries the best
    iterate in .solution and its worst violation in .residual."""

    def __init__(self, message: str, solution: "ElasticaSolution"):
        super().__init__(message)
        self.solution = solution
        self.residual = solution.residual


@dataclass(frozen=True)
class ElasticaSettings:
    """Solver knobs.  Defaults satisfy the resolution contract of at least
    50 nodes per inter-pixel span."""

    nodes_per_span: int = 64
    tol: float = 1e-6                  # worst violation, relative to span
    max_iter: int = 60                 # Gauss-Newton steps per penalty stage
    penalty_stages: Tuple[float, ...] = (1e3, 1e5, 1e7)
    max_segments: int = 2400
    projection_steps: int = 6

    def __post_init__(self):
        if self.nodes_per_span < 50:
            raise ValueError("nodes_per_span must be at least 50")
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")


@dataclass
class ElasticaSolution:
    """A solved beam shape.

    nodes            -- (m+1, 2) polyline vertices, uniform arc spacing
    segment_length   -- arc length of every segment (mm)
    energy           -- sum(turn^2)/segment_length over interior turns (1/mm)
    excess           -- prescribed arc-length excess (mm)
    residual         -- worst constraint violation (mm): max over point-to-
                        polyline distances and the far-end gap
    stage_objectives -- per penalty stage, the penalised objective at each
                        accepted iterate (non-increasing within a stage)
    """

    nodes: np.ndarray
    segment_length: float
    energy: float
    excess: float
    residual: float
    stage_objectives: List[List[float]]
    n_iterations: int

    @property
    def arc_length(self) -> float:
        return self.segment_length * (self.nodes.shape[0] - 1)

    def profile(self, x: np.ndarray) -> np.ndarray:
        """Height at horizontal position x (arc-length-to-x interpolation of
        the node polyline).  Outside the span the end heights are held."""
        return np.interp(np.asarray(x, dtype=float),
                         self.nodes[:, 0], self.nodes[:, 1])


# ----------------------------------------------------------------------
# internals (all in span-normalised units: first constraint at the origin,
# span scaled to 1)
# ----------------------------------------------------------------------

def _residual_vector(theta, m, h, xs_c, ys_c, x_end, y_end):
    """Constraint residuals and their Jacobian wrt the free angles.

    Rows: far-end x gap, far-end y gap, then one vertical-intercept gap per
    interior constraint.  If the polyline transiently folds (x not strictly
    increasing) the vertical intercept is undefined, so those rows pin the
    arc station closest to the constraint instead.
    """
    c = np.cos(theta)
    s = np.sin(theta)
    x = np.empty(m + 1)
    y = np.empty(m + 1)
    x[0] = 0.0
    y[0] = 0.0
    np.cumsum(h * c, out=x[1:])
    np.cumsum(h * s, out=y[1:])
    n_c = len(xs_c)
    monotone = bool(np.all(np.diff(x) > 0.0))
    rows = 2 + (n_c if monotone else 2 * n_c)
    r = np.empty(rows)
    jac = np.zeros((rows, m))
    r[0] = x[m] - x_end
    r[1] = y[m] - y_end
    jac[0] = -h * s
    jac[1] = h * c
    k = 2
    for xi, yi in zip(xs_c, ys_c):
        if monotone:
            j = int(np.searchsorted(x, xi, side="right")) - 1
            j = min(max(j, 0), m - 1)
            t = math.tan(theta[j])
            r[k] = y[j] + (xi - x[j]) * t - yi
            if j > 0:
                jac[k, :j] = h * (c[:j] + t * s[:j])
            jac[k, j] = (xi - x[j]) * (1.0 + t * t)
            k += 1
        else:
            j = min(max(int(round(xi / h)), 0), m)
            r[k] = x[j] - xi
            r[k + 1] = y[j] - yi
            jac[k, :j] = -h * s[:j]
            jac[k + 1, :j] = h * c[:j]
            k += 2
    return r, jac[:, 1:m - 1], (x, y)


def _bend_energy_grad(theta, h):
    dth = np.diff(theta)
    bend = float(dth @ dth) / h
    grad = np.zeros(len(theta))
    grad[:-1] -= 2.0 * dth / h
    grad[1:] += 2.0 * dth / h
    return bend, grad[1:len(theta) - 1]


def _gn_stage(theta_free, m, h, xs_c, ys_c, x_end, y_end, weight, chol,
              max_steps):
    """Minimise bend + (weight/2)|r|^2 by damped Gauss-Newton.

    The Hessian is approximated by H_bend + weight*J^T J; steps solve
    (H + w J^T J) d = -g through the banded Cholesky factor of H_bend and
    the Woodbury identity, so each step costs O(m * n_constraints).
    Backtracking keeps the objective non-increasing.
    """

    def full_eval(tf):
        th = np.zeros(m)
        th[1:m - 1] = tf
        bend, gbend = _bend_energy_grad(th, h)
        r, jac, _ = _residual_vector(th, m, h, xs_c, ys_c, x_end, y_end)
        f = bend + 0.5 * weight * float(r @ r)
        g = gbend + weight * (jac.T @ r)
        return f, g, r, jac

    trace = []
    f, g, r, jac = full_eval(theta_free)
    trace.append(f)
    for _ in range(max_steps):
        if np.max(np.abs(g)) < 1e-12:
            break
        # Woodbury: (H + w J^T J)^{-1} g
        v = cho_solve_banded((chol, False), g)
        wt = cho_solve_banded((chol, False), jac.T)
        small = jac @ wt
        small[np.diag_indices_from(small)] += 1.0 / weight
        corr = wt @ np.linalg.solve(small, jac @ v)
        step = -(v - corr)
        # Armijo backtracking on the penalised objective
        slope = float(g @ step)
        if slope >= 0.0:
            step = -g
            slope = float(g @ step)
        alpha = 1.0
        accepted = False
        for _bt in range(30):
            cand = np.clip(theta_free + alpha * step, -1.45, 1.45)
            fc, gc, rc, jc = full_eval(cand)
            if fc <= f + 1e-4 * alpha * slope:
                theta_free, f, g, r, jac = cand, fc, gc, rc, jc
                trace.append(f)
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break
        if len(trace) > 1 and trace[-2] - trace[-1] <= 1e-15 * max(abs(trace[-1]), 1e-30):
            break
    return theta_free, trace


def _initial_angles(con, m, total_len, initial):
    """Segment angles for the starting iterate: resample the hint curve (or
    a monotone interpolant through the constraints) by arc length, then make
    up any length deficit with per-gap arch modes.

    The slack is split between the inter-constraint gaps in proportion to
    their width and absorbed by a raised-cosine arch per gap, signs
    alternating, so the seeded curve already satisfies the pins.  A single
    full-span arch would cross the interior pins and, for small slack,
    leave the optimiser at the flat saddle where the end-shortening
    Jacobian vanishes.
    """
    xs = con[:, 0]
    if initial is not None:
        px, py = np.asarray(initial[0], float), np.asarray(initial[1], float)
    else:
        ys = con[:, 1]
        px = np.linspace(xs[0], xs[-1], 16 * m + 1)
        if len(xs) > 3:
            py = PchipInterpolator(xs, ys)(px)
        else:
            py = np.interp(px, xs, ys)
    seg = np.hypot(np.diff(px), np.diff(py))
    s_cum = np.concatenate([[0.0], np.cumsum(seg)])
    length = s_cum[-1]
    deficit = total_len - length
    if deficit > 1e-12 * total_len:
        gaps = np.diff(xs)
        shares = deficit * gaps / float(np.sum(gaps))
        bump = np.zeros_like(px)
        for i, (x0, width, share) in enumerate(zip(xs[:-1], gaps, shares)):
            amp = (2.0 / math.pi) * math.sqrt(max(width * share, 0.0))
            sign = 1.0 if i % 2 == 0 else -1.0
            u = np.clip((px - x0) / width, 0.0, 1.0)
            bump += sign * 0.5 * amp * (1.0 - np.cos(2.0 * math.pi * u))
        py = py + bump
        seg = np.hypot(np.diff(px), np.diff(py))
        s_cum = np.concatenate([[0.0], np.cumsum(seg)])
        length = s_cum[-1]
    stations = np.linspace(0.0, length, m + 1)
    rx = np.interp(stations, s_cum, px)
    ry = np.interp(stations, s_cum, py)
    theta = np.arctan2(np.diff(ry), np.diff(rx))
    theta[0] = 0.0
    theta[-1] = 0.0
    return theta


def _project(theta, m, h, xs_c, ys_c, x_end, y_end, steps):
    """Gauss-Newton projection onto the constraint set (minimum-norm
    steps).  Returns the projected angles and the final max |residual|."""
    theta = theta.copy()
    for _ in range(steps):
        r, jac, _ = _residual_vector(theta, m, h, xs_c, ys_c, x_end, y_end)
        if np.max(np.abs(r)) < 1e-13:
            break
        jjt = jac @ jac.T
        jjt[np.diag_indices_from(jjt)] += 1e-12 * max(np.trace(jjt), 1e-30)
        lam = np.linalg.solve(jjt, r)
        theta[1:m - 1] -= jac.T @ lam
    r, _, _ = _residual_vector(theta, m, h, xs_c, ys_c, x_end, y_end)
    return theta, float(np.max(np.abs(r)))


def _point_polyline_distance(points, nodes) -> np.ndarray:
    """Distance from each point to the polyline (min over segments)."""
    a = nodes[:-1]
    b = nodes[1:]
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    out = np.empty(len(points))
    for i, p in enumerate(points):
        ap = p[None, :] - a
        t = np.clip(np.einsum("ij,ij->i", ap, ab) / np.maximum(denom, 1e-300),
                    0.0, 1.0)
        proj = a + t[:, None] * ab
        out[i] = np.min(np.hypot(p[0] - proj[:, 0], p[1] - proj[:, 1]))
    return out


def solve_elastica_1d(constraints: Sequence[Tuple[float, float]],
                      excess_length: float,
                      settings: Optional[ElasticaSettings] = None,
                      initial: Optional[Tuple[np.ndarray, np.ndarray]] = None,
                      ) -> ElasticaSolution:
    """Minimum-bending-energy inextensible curve through the constraints.

    constraints    -- (x, y) pixel points sorted by x, at least two; the
                      first and last are the beam ends (clamped horizontal)
    excess_length  -- arc length beyond the end-to-end span (mm, >= 0)
    initial        -- optional (x, y) arrays of a hint curve; used to seed
                      the iterate (the rendering path seeds with the target
                      shape so the solver starts on the physical branch)

    Raises InfeasibleExcessError("infeasible excess") when the arc budget
    cannot reach the constraint heights, and ElasticaConvergenceError (with
    the best iterate attached) when tolerance is not met.
    """
    settings = settings or ElasticaSettings()
    con = np.asarray(constraints, dtype=float)
    if con.ndim != 2 or con.shape[1] != 2 or con.shape[0] < 2:
        raise ValueError("need at least two (x, y) constraints")
    if np.any(np.diff(con[:, 0]) <= 0.0):
        raise ValueError("constraints must be sorted by strictly increasing x")
    if not np.isfinite(excess_length) or excess_length < 0.0:
        raise ValueError("excess_length must be finite and >= 0")

    origin = con[0].copy()
    span = con[-1, 0] - con[0, 0]
    scale = span
    conn = (con - origin) / scale
    exn = excess_length / scale
    total = 1.0 + exn

    chords = float(np.sum(np.hypot(np.diff(conn[:, 0]), np.diff(conn[:, 1]))))
    flat = bool(np.all(np.abs(conn[:, 1]) <= 1e-14))
    if total < chords * (1.0 - 1e-12) or (not flat and total <= chords):
        raise InfeasibleExcessError("infeasible excess")

    n_span = con.shape[0] - 1
    m = min(settings.nodes_per_span * n_span, settings.max_segments)
    m = max(m, 2 * settings.nodes_per_span)
    h = total / m

    if flat and exn <= 1e-14:
        nodes = np.column_stack([np.linspace(0.0, 1.0, m + 1), np.zeros(m + 1)])
        nodes = nodes * scale + origin
        return ElasticaSolution(nodes, h * scale, 0.0, excess_length, 0.0,
                                [[0.0]], 0)

    if initial is not None:
        init = ((np.asarray(initial[0], float) - origin[0]) / scale,
                (np.asarray(initial[1], float) - origin[1]) / scale)
    else:
        init = None
    theta = _initial_angles(conn, m, total, init)

    xs_c = conn[1:-1, 0]
    ys_c = conn[1:-1, 1]
    x_end = conn[-1, 0]
    y_end = conn[-1, 1]

    stage_objectives: List[List[float]] = []
    n_iter = 0
    theta_free = theta[1:m - 1].copy()
    # bending Hessian (2/h)*tridiag(-1, 2, -1) on the free angles, factored
    # once per solve and reused by every Gauss-Newton step
    ab = np.zeros((2, m - 2))
    ab[0, 1:] = -2.0 / h
    ab[1, :] = 4.0 / h
    chol = cholesky_banded(ab, lower=False)
    for weight in settings.penalty_stages:
        theta_free, trace = _gn_stage(theta_free, m, h, xs_c, ys_c,
                                      x_end, y_end, weight, chol,
                                      settings.max_iter)
        n_iter += max(len(trace) - 1, 0)
        stage_objectives.append(trace)

    theta = np.zeros(m)
    theta[1:m - 1] = theta_free
    theta, worst = _project(theta, m, h, xs_c, ys_c, x_end, y_end,
                            settings.projection_steps)

    if worst > settings.tol:
        # The penalty cascade cannot resolve excesses far below the scale
        # set by the stage weights (the flat state then wins every stage
        # and is a saddle of the end-shortening constraint).  The pchip
        # plus per-gap arch seed is already near-feasible there, so a
        # plain projection from it recovers the constraint set.
        theta_fb = _initial_angles(conn, m, total, None)
        theta_fb, worst_fb = _project(theta_fb, m, h, xs_c, ys_c,
                                      x_end, y_end,
                                      2 * settings.projection_steps)
        if worst_fb < worst:
            theta, worst = theta_fb, worst_fb

    c = np.cos(theta)
    s = np.sin(theta)
    x = np.concatenate([[0.0], np.cumsum(h * c)])
    y = np.concatenate([[0.0], np.cumsum(h * s)])
    nodes_n = np.column_stack([x, y])

    dth = np.diff(theta)
    energy_n = float(dth @ dth) / h

    interior = conn[1:-1]
    if interior.shape[0] > 0:
        dists = _point_polyline_distance(interior, nodes_n)
        worst = float(np.max(dists))
    else:
        worst = 0.0
    worst = max(worst, float(np.hypot(x[-1] - x_end, y[-1] - y_end)))

    nodes = nodes_n * scale + origin
    sol = ElasticaSolution(nodes, h * scale, energy_n / scale, excess_length,
                           worst * scale, stage_objectives, n_iter)
    if worst > settings.tol:
        raise ElasticaConvergenceError("elastica did not converge", sol)
    return sol
