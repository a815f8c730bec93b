"""Single-channel Numerov integration on a step-doubling grid.

Solves u'' = Q(r) u, Q = 2 mu (V - E) + l(l+1)/r^2. The grid is piecewise
uniform: it starts fine enough for the deepest part of the well and the
step doubles wherever the local wave number allows, which keeps long-range
integrations (thousands of bohr) cheap. Several solutions can share one
grid, which is what the Wronskian check needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

_BIG = 1e150


def local_q(potential: Callable, mu: float, energy: float, l: int = 0) -> Callable:
    def q(r):
        return 2 * mu * (potential(r) - energy) + l * (l + 1) / r**2

    return q


def doubling_grid(
    q: Callable,
    r_start: float,
    r_end: float,
    phase_step: float = 0.05,
    h_max: float = 50.0,
    h0: float | None = None,
    h_rel: float | None = None,
) -> np.ndarray:
    """Piecewise-uniform grid with h * sqrt(|Q|) <= phase_step.

    ``h_rel`` additionally caps h at h_rel * r, which matters where Q is
    small but still varies on the scale of r (power-law tails near threshold).

    Each segment holds at least 4 points so the recurrence can restart
    across a doubling with the point two old steps back.
    """
    if r_end <= r_start:
        raise ValueError("r_end must exceed r_start")
    mesh = np.geomspace(r_start, r_end, 4000)
    kk = np.sqrt(np.abs(q(mesh)))
    # running max from the right: the step may only grow where everything ahead is slow enough
    kmax_ahead = np.maximum.accumulate(kk[::-1])[::-1]
    if h0 is None:
        h0 = phase_step / max(kmax_ahead[0], 1e-12)
    h = min(h0, h_max, (r_end - r_start) / 8)
    if h_rel is not None:
        h = min(h, h_rel * r_start)
    pts = [r_start]
    r = r_start
    count = 0
    while r < r_end - 1e-12 * r_end:
        if count >= 4 and 2 * h <= h_max and (h_rel is None or 2 * h <= h_rel * r):
            j = min(max(np.searchsorted(mesh, r) - 1, 0), len(mesh) - 1)
            if 2 * h * kmax_ahead[j] <= phase_step:
                h *= 2
                count = 0
        r = r + h
        pts.append(r)
        count += 1
    pts = np.array(pts)
    # shrink affinely so the last point is r_end: steps stay uniform per segment
    return r_start + (pts - r_start) * ((r_end - r_start) / (pts[-1] - r_start))


def wall_start(q: Callable, r_lo: float, r_hi: float, depth: float = 35.0) -> float:
    """Radius inside the repulsive wall where the WKB decay to the turning point reaches ``depth``.

    Starting there instead of at ``r_lo`` loses nothing (the solution has
    grown by e^depth by the turning point) but avoids resolving an
    arbitrarily stiff wall. Returns ``r_lo`` if the wall is shallower.
    """
    mesh = np.geomspace(r_lo, r_hi, 20000)
    qq = q(mesh)
    inside = np.nonzero(qq < 0)[0]
    if len(inside) == 0 or inside[0] == 0:
        return r_lo
    i_turn = inside[0]
    kappa = np.sqrt(qq[:i_turn])
    seg = 0.5 * (kappa[1:] + kappa[:-1]) * np.diff(mesh[:i_turn])
    acc = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
    deep = np.nonzero(acc > depth)[0]
    return float(mesh[deep[-1]]) if len(deep) else r_lo


@dataclass
class NumerovSolution:
    r: np.ndarray
    u: np.ndarray
    q: np.ndarray
    nodes: int

    def value_and_derivative(self, i: int) -> tuple[float, float]:
        """u and u' at r_i from the Numerov-consistent three-point formula."""
        h = self.r[i + 1] - self.r[i]
        hm = self.r[i] - self.r[i - 1]
        if not np.isclose(h, hm):
            i -= 1
            h = self.r[i + 1] - self.r[i]
        c = h * h / 12
        # y = (1 - c Q) u; y' ~ (y_{i+1} - y_{i-1}) / 2h with O(h^4) correction folded in
        up = ((1 - c * self.q[i + 1]) * self.u[i + 1] - (1 - c * self.q[i - 1]) * self.u[i - 1]) / (2 * h)
        return float(self.u[i]), float(up)


def propagate(q_values: np.ndarray, r: np.ndarray, u0: float = 0.0, u1: float = 1e-30) -> NumerovSolution:
    """Numerov recurrence on a grid from :func:`doubling_grid`.

    Values are rescaled on overflow, so only the shape is meaningful unless
    the caller normalizes. ``nodes`` counts sign changes in (r[0], r[-1]].
    """
    n = len(r)
    rl = r.tolist()
    ql = np.asarray(q_values, dtype=float).tolist()
    u = [0.0] * n
    u[0], u[1] = float(u0), float(u1)
    nodes = 0
    h_prev = rl[1] - rl[0]
    for i in range(1, n - 1):
        h = rl[i + 1] - rl[i]
        j = i - 2 if h > 1.5 * h_prev else i - 1  # after a doubling, r_i - h is two points back
        h_prev = h
        c = h * h / 12.0
        un = (2.0 * u[i] * (1.0 + 5.0 * c * ql[i]) - u[j] * (1.0 - c * ql[j])) / (1.0 - c * ql[i + 1])
        if un * u[i] < 0.0 or (u[i] == 0.0 and un * u[i - 1] < 0.0):
            nodes += 1
        u[i + 1] = un
        if abs(un) > _BIG:
            inv = 1.0 / abs(un)
            for k in range(i + 2):
                u[k] *= inv
    u = np.array(u)
    return NumerovSolution(r, u, q_values, nodes)


def solve(q: Callable, r_start: float, r_end: float, phase_step: float = 0.05, h_max: float = 50.0) -> NumerovSolution:
    r = doubling_grid(q, r_start, r_end, phase_step, h_max)
    return propagate(q(r), r)


def wronskian(a: NumerovSolution, b: NumerovSolution) -> np.ndarray:
    """Discrete Wronskian (Y_{i+1} Z_i - Y_i Z_{i+1}) / h with Y = (1 - h^2 Q/12) u.

    Exactly conserved by the recurrence within a uniform segment; returned
    for every interior index where both neighbours share the same step.
    """
    r, qv = a.r, a.q
    out = []
    for i in range(len(r) - 1):
        h = r[i + 1] - r[i]
        c = h * h / 12
        y1, y0 = (1 - c * qv[i + 1]) * a.u[i + 1], (1 - c * qv[i]) * a.u[i]
        z1, z0 = (1 - c * qv[i + 1]) * b.u[i + 1], (1 - c * qv[i]) * b.u[i]
        out.append((y1 * z0 - y0 * z1) / h)
    return np.array(out)


def node_counts(v_grid: np.ndarray, grid: np.ndarray, mu: float, energies: np.ndarray) -> np.ndarray:
    """Sign changes of the outward solution on (r0, r_end] for many energies at once.

    By Sturm oscillation this is the number of Dirichlet eigenvalues below
    each energy.
    """
    e = np.asarray(energies, dtype=float)
    u_prev = np.zeros_like(e)
    u_cur = np.full_like(e, 1e-30)
    base = 2 * mu * v_grid
    twomu_e = 2 * mu * e
    nodes = np.zeros(e.shape, dtype=int)
    q_hist = [base[0] - twomu_e, base[1] - twomu_e]
    u_hist = [u_prev, u_cur]
    n = len(grid)
    h_prev = grid[1] - grid[0]
    for i in range(1, n - 1):
        h = grid[i + 1] - grid[i]
        back = 2 if h > 1.5 * h_prev else 1
        h_prev = h
        c = h * h / 12.0
        q_i = q_hist[-1]
        q_j = q_hist[-1 - back]
        u_j = u_hist[-1 - back]
        q_n = base[i + 1] - twomu_e
        u_n = (2 * u_hist[-1] * (1 + 5 * c * q_i) - u_j * (1 - c * q_j)) / (1 - c * q_n)
        nodes += (u_n * u_hist[-1] < 0)
        big = np.abs(u_n) > _BIG
        if big.any():
            scale = np.where(big, 1.0 / np.abs(u_n), 1.0)
            u_n = u_n * scale
            u_hist = [x * scale for x in u_hist]
        u_hist = u_hist[-2:] + [u_n]
        q_hist = q_hist[-2:] + [q_n]
    return nodes


def bound_levels(
    potential: Callable,
    mu: float,
    r_min: float,
    r_max: float,
    e_low: float,
    e_high: float = 0.0,
    l: int = 0,
    phase_step: float = 0.02,
    rel_tol: float = 1e-13,
) -> np.ndarray:
    """Dirichlet eigenvalues on [r_min, r_max] in (e_low, e_high) by shooting.

    Every level is bracketed by node counts of the outward Numerov solution
    (Sturm oscillation) and all brackets are bisected together. Intended as
    an independent oracle, so it shares nothing with the DVR code.
    """
    q_lo, q_hi = local_q(potential, mu, e_low, l), local_q(potential, mu, e_high, l)

    def q_worst(r):
        return np.maximum(np.abs(q_lo(r)), np.abs(q_hi(r)))

    grid = doubling_grid(q_worst, r_min, r_max, phase_step=phase_step, h_max=5.0)
    v_grid = potential(grid) + l * (l + 1) / (2 * mu * grid**2)
    n_lo, n_hi = node_counts(v_grid, grid, mu, np.array([e_low, e_high]))
    k = np.arange(n_lo, n_hi)
    if len(k) == 0:
        return np.array([])
    lo = np.full(len(k), e_low, dtype=float)
    hi = np.full(len(k), e_high, dtype=float)
    scale = max(abs(e_low), abs(e_high))
    while np.max(hi - lo) > rel_tol * scale:
        mid = 0.5 * (lo + hi)
        nm = node_counts(v_grid, grid, mu, mid)
        below = nm <= k
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)
