"""Sampling the limiting random variable of the plug-in estimator.

The limit is minus the Stieltjes integral of the derivative-transformed
Brownian bridge against d[gdot(f(x), x)].  Strictly concave truths leave
the bridge untouched; piecewise-affine truths apply the least concave
majorant interval by interval.  Unbounded supports are truncated where
the CDF reaches 1 - truncation_mass, and the neglected tail's worst-case
contribution is reported alongside emitted samples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError
from .functionals import ScalarFunctional, SmoothFunctional
from .majorant import GridPath, _hull_indices, restricted_lcm
from .samples import ScenarioSpec

DEFAULT_TRUNCATION_MASS = 1e-6

STRICTLY_CONCAVE = "strictly_concave"
PIECEWISE_AFFINE = "piecewise_affine"


@dataclass(frozen=True)
class TrueModel:
    """A scenario CDF together with its concavity structure."""

    spec: ScenarioSpec
    concavity_kind: str
    truncation: float
    truncation_mass: float = 0.0

    @staticmethod
    def from_scenario(spec: ScenarioSpec,
                      truncation_mass: float = DEFAULT_TRUNCATION_MASS) -> "TrueModel":
        if spec.is_strictly_concave:
            t_end = float(spec.quantile(1.0 - truncation_mass))
            return TrueModel(spec, STRICTLY_CONCAVE, t_end, truncation_mass)
        return TrueModel(spec, PIECEWISE_AFFINE, spec.support_end, 0.0)

    @property
    def breakpoints(self) -> np.ndarray:
        ts, _ = self.spec._pw_arrays()
        return ts

    @property
    def levels(self) -> np.ndarray:
        _, vs = self.spec._pw_arrays()
        return vs

    def affine_intervals(self):
        return self.spec.affine_intervals()


def bridge_path(grid, stream) -> GridPath:
    """Exact Brownian-bridge sample on a grid over [0, 1].

    Standard Brownian motion from independent Gaussian increments, then
    pinned: B(t) = W(t) - t W(1).  Values at 0 and 1 are exactly 0.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or grid[0] != 0.0 or grid[-1] != 1.0:
        raise InputError("bridge grid must run from 0 to 1")
    if np.any(np.diff(grid) <= 0.0):
        raise InputError("bridge grid must be strictly increasing")
    values = _bridge_values(grid, 1, stream)[0]
    return GridPath(grid, values)


def _bridge_values(u: np.ndarray, draws: int, stream) -> np.ndarray:
    """Rows of bridge values on the grid u (u[0] = 0); pinned to 0 at
    u = 1 exactly when the grid ends at 1."""
    incr = stream.standard_normal((draws, u.size - 1)) * np.sqrt(np.diff(u))
    w = np.cumsum(incr, axis=1)
    out = np.empty((draws, u.size))
    out[:, 0] = 0.0
    out[:, 1:] = w - np.outer(w[:, -1], u[1:])
    return out


def build_grid(model: TrueModel, grid_size: int) -> np.ndarray:
    """Uniform grid on [0, T] merged with all affine-interval endpoints."""
    if grid_size < 2:
        raise InputError("grid_size must be at least 2")
    base = np.linspace(0.0, model.truncation, int(grid_size) + 1)
    if model.concavity_kind == PIECEWISE_AFFINE:
        base = np.union1d(base, model.breakpoints)
    return base


def hadamard_lcm_derivative(model: TrueModel, g_path: GridPath) -> GridPath:
    """Directional derivative of the LCM operator applied to a path.

    Strictly concave truth: the identity (the same object is returned).
    Piecewise-affine truth: the LCM is taken independently over each
    affine interval; interval endpoints are extreme hull points, so the
    path's values there are preserved exactly.
    """
    if model.concavity_kind == STRICTLY_CONCAVE:
        return g_path
    out = g_path
    for a, b in model.affine_intervals():
        out = restricted_lcm(out, a, b)
    return out


def _cell_levels(model: TrueModel, grid: np.ndarray) -> np.ndarray:
    """Density level governing each grid cell (evaluated at the right
    endpoint, which cannot cross a breakpoint because breakpoints are
    grid members)."""
    return np.asarray(model.spec.density(grid[1:]), dtype=float)


def _jump_terms(G: SmoothFunctional, model: TrueModel):
    """Breakpoint locations and jumps of psi(x) = gdot(f(x), x) there."""
    ts = model.breakpoints
    vs = model.levels
    jumps = np.empty(ts.size)
    for i in range(ts.size):
        left = float(G.gdot(vs[i], ts[i]))
        right = float(G.gdot(vs[i + 1], ts[i])) if i + 1 < vs.size else float(G.gdot(0.0, ts[i]))
        jumps[i] = right - left
    return ts, jumps


def _psi_increments(G: SmoothFunctional, model: TrueModel, grid: np.ndarray) -> np.ndarray:
    """Within-piece increments of psi over grid cells (jumps excluded)."""
    if model.concavity_kind == STRICTLY_CONCAVE:
        f = np.asarray(model.spec.density(grid), dtype=float)
        psi = np.array([float(G.gdot(z, x)) for z, x in zip(f, grid)])
        return np.diff(psi)
    if G.x_free:
        return np.zeros(grid.size - 1)
    lv = _cell_levels(model, grid)
    right = np.array([float(G.gdot(z, x)) for z, x in zip(lv, grid[1:])])
    left = np.array([float(G.gdot(z, x)) for z, x in zip(lv, grid[:-1])])
    return right - left


class YPlan:
    """Precomputed pieces of the Stieltjes sum for one (functional, model,
    grid) combination, applicable to many bridge paths at once."""

    def __init__(self, G: SmoothFunctional, model: TrueModel, grid: np.ndarray):
        self.model = model
        self.grid = np.asarray(grid, dtype=float)
        self.dpsi = _psi_increments(G, model, self.grid)
        self.needs_hull = (model.concavity_kind == PIECEWISE_AFFINE) and not G.x_free
        if model.concavity_kind == PIECEWISE_AFFINE:
            ts, self.jumps = _jump_terms(G, model)
            self.t_idx = np.searchsorted(self.grid, ts)
            if np.any(self.t_idx >= self.grid.size) or np.any(self.grid[self.t_idx] != ts):
                raise InputError("grid does not contain every affine-interval endpoint")
            self.intervals = [(int(np.searchsorted(self.grid, a)),
                               int(np.searchsorted(self.grid, b)))
                              for a, b in model.affine_intervals()]
        else:
            self.jumps = None
            self.t_idx = None
            self.intervals = []

    def apply(self, paths: np.ndarray) -> np.ndarray:
        """Limit-variable realizations for rows of bridge-composed values
        on this plan's grid."""
        paths = np.atleast_2d(np.asarray(paths, dtype=float))
        if self.jumps is not None:
            jump_part = paths[:, self.t_idx] @ self.jumps
        else:
            jump_part = 0.0
        if self.needs_hull:
            hat = paths.copy()
            for ia, ib in self.intervals:
                _hull_rows_inplace(hat, self.grid, ia, ib)
            cont_part = hat[:, :-1] @ self.dpsi
        else:
            cont_part = paths[:, :-1] @ self.dpsi
        return -(cont_part + jump_part)


def y_from_path(G: SmoothFunctional, model: TrueModel, g_path: GridPath) -> float:
    """One realization of the limit variable from a given bridge-composed
    path: apply the LCM derivative, then the Stieltjes sum with
    left-endpoint evaluation plus exact jump contributions."""
    plan = YPlan(G, model, g_path.grid)
    return float(plan.apply(g_path.values)[0])


def _hull_rows_inplace(values: np.ndarray, grid: np.ndarray, ia: int, ib: int):
    """Replace values[:, ia:ib+1] with the per-row upper concave hull."""
    seg_grid = grid[ia:ib + 1]
    xs = seg_grid.tolist()
    for row in values:
        ys = row[ia:ib + 1].tolist()
        idx = _hull_indices(xs, ys)
        if len(idx) < len(xs):
            seg = row[ia:ib + 1]
            row[ia:ib + 1] = np.maximum(seg, np.interp(seg_grid, seg_grid[idx], seg[idx]))


def draw_y_samples(G: SmoothFunctional, model: TrueModel, grid_size: int,
                   draws: int, stream, batch: int = 4096):
    """Monte Carlo draws of the limit variable.

    Returns ``(ys, info)`` where info carries the truncation point, the
    neglected tail's total-variation bound times the largest observed
    path magnitude, and the grid actually used.
    """
    if draws < 1:
        raise InputError("need at least one draw")
    grid = build_grid(model, grid_size)
    u = np.asarray(model.spec.cdf(grid), dtype=float)
    truncated = u[-1] < 1.0
    if truncated:
        u_ext = np.concatenate((u, [1.0]))
    else:
        u_ext = u
    plan = YPlan(G, model, grid)
    ys = np.empty(draws)
    max_abs_g = 0.0
    done = 0
    while done < draws:
        m = min(batch, draws - done)
        paths = _bridge_values(u_ext, m, stream)
        if truncated:
            paths = paths[:, :-1]
        max_abs_g = max(max_abs_g, float(np.max(np.abs(paths))))
        ys[done:done + m] = plan.apply(paths)
        done += m
    info = {
        "model": model.spec.to_json(),
        "functional": G.name,
        "grid_size": int(grid_size),
        "grid_points": int(grid.size),
        "truncation": float(model.truncation),
        "tail_bound": max_abs_g * _tail_total_variation(G, model),
        "draws": int(draws),
    }
    return ys, info


def sample_Y(G: SmoothFunctional, model: TrueModel, grid_size: int, stream) -> float:
    """One draw of the limit variable."""
    ys, _ = draw_y_samples(G, model, grid_size, 1, stream)
    return float(ys[0])


def linear_y_samples(h: ScalarFunctional, model: TrueModel, draws: int, stream) -> np.ndarray:
    """Draws from the linear breakpoint formula for x-free functionals
    under a piecewise-affine truth: minus the sum over breakpoints of the
    bridge value times the jump of h'(f)."""
    if model.concavity_kind != PIECEWISE_AFFINE:
        raise InputError("linear formula requires a piecewise-affine truth")
    ts = model.breakpoints
    vs = model.levels
    jumps = np.empty(ts.size)
    for i in range(ts.size):
        left = float(h.hprime(vs[i]))
        right = float(h.hprime(vs[i + 1])) if i + 1 < vs.size else float(h.hprime(0.0))
        jumps[i] = right - left
    u = np.concatenate(([0.0], np.asarray(model.spec.cdf(ts), dtype=float)))
    u[-1] = 1.0
    paths = _bridge_values(u, draws, stream)
    return -(paths[:, 1:] @ jumps)


def _tail_total_variation(G: SmoothFunctional, model: TrueModel) -> float:
    """Total variation of psi on the truncated tail, by fine sampling."""
    if model.concavity_kind != STRICTLY_CONCAVE or model.truncation_mass <= 0.0:
        return 0.0
    spec = model.spec
    tail_u = 1.0 - np.geomspace(model.truncation_mass, 1e-14, 200)
    xs = np.asarray(spec.quantile(tail_u), dtype=float)
    fs = np.asarray(spec.density(xs), dtype=float)
    psi = np.array([float(G.gdot(z, x)) for z, x in zip(fs, xs)])
    tv = float(np.sum(np.abs(np.diff(psi))))
    tv += abs(float(G.gdot(0.0, xs[-1])) - psi[-1])
    return tv


def emit_y_csv(path, ys: np.ndarray, info: dict) -> None:
    """Write samples as a single-column CSV headed by a JSON metadata line."""
    lines = ["# " + json.dumps(info, sort_keys=True)]
    lines.extend(repr(float(y)) for y in ys)
    Path(path).write_text("\n".join(lines) + "\n")


def load_y_csv(path):
    """Read back samples and metadata written by :func:`emit_y_csv`."""
    text = Path(path).read_text().strip().splitlines()
    if not text or not text[0].startswith("#"):
        raise InputError(f"{path}: missing JSON metadata header line")
    info = json.loads(text[0][1:].strip())
    ys = np.array([float(v) for v in text[1:]])
    return ys, info
