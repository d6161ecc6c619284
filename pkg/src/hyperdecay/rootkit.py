"""Polynomial root extraction and root-branch continuation along radial rays.

Roots come from companion-matrix eigenvalues refined by Aberth-Ehrlich sweeps;
the guarantee is a residual bound |p(z)| <= 1e-10 * sum_i |c_i||z|^i per root.
Branch tracking solves the scaled polynomial in mu = lambda/rho (well
conditioned at both ends of the ray) and matches consecutive root sets by a
minimum-total-distance assignment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import linear_sum_assignment

from .symbols import Direction, OperatorStack, UnivariatePoly, full_symbol_at, restrict_complexified
from .tolerances import TOL

ABERTH_MAX_SWEEPS = 100
MAX_BISECTIONS = 20


class RootfindingError(RuntimeError):
    pass


class NonRealRootsError(ValueError):
    def __init__(self, poly: UnivariatePoly, bad_root: complex):
        self.bad_root = bad_root
        super().__init__(f"polynomial has a non-real root {bad_root!r}")


class BisectionLimitError(RuntimeError):
    def __init__(self, rho_a: float, rho_b: float, detail: str = ""):
        self.interval = (rho_a, rho_b)
        super().__init__(
            f"branch matching could not be resolved on rho interval ({rho_a!r}, {rho_b!r})"
            + (f": {detail}" if detail else "")
        )


# ---------------------------------------------------------------------------
# core root extraction


def _residuals(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    """|p(z)| normalized by the coefficient-magnitude bound sum |c_i||z|^i."""
    vals = np.abs(npoly.polyval(z, c))
    scale = npoly.polyval(np.abs(z), np.abs(c))
    return vals / np.maximum(scale, np.finfo(float).tiny)


def _aberth(c: np.ndarray, z0: np.ndarray) -> np.ndarray:
    dc = npoly.polyder(c)
    z = z0.astype(complex).copy()
    best = z.copy()
    best_res = _residuals(c, z)
    tiny = np.finfo(float).tiny
    for _ in range(ABERTH_MAX_SWEEPS):
        p = npoly.polyval(z, c)
        dp = npoly.polyval(z, dc)
        newton = p / np.where(np.abs(dp) < tiny, tiny, dp)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        # exactly coincident iterates exert no repulsion (multiple roots)
        diff = np.where(diff == 0, np.inf, diff)
        s = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - newton * s
        with np.errstate(invalid="ignore", over="ignore"):
            step = newton / np.where(np.abs(denom) < 1e-300, 1.0, denom)
            step = np.where(np.isfinite(step), step, 0.0)
            # cap runaway corrections; companion eigenvalues start close already
            cap = 0.5 * (1.0 + np.abs(z))
            mag = np.abs(step)
            too_big = mag > cap
            step = np.where(too_big, step / np.where(mag == 0, 1.0, mag) * cap, step)
        z = z - step
        res = _residuals(c, z)
        improved = res < best_res
        best[improved] = z[improved]
        best_res[improved] = res[improved]
        if np.all(best_res <= 1e-15) or np.max(np.abs(step) / (1.0 + np.abs(z))) < 1e-16:
            break
    return best


def roots(p: UnivariatePoly) -> np.ndarray:
    """All complex roots of p with multiplicity, refined companion eigenvalues."""
    if p.is_zero:
        raise RootfindingError("the zero polynomial has no well-defined root set")
    if p.degree == 0:
        raise RootfindingError("a degree-0 polynomial has no roots")
    c = p.array()
    return _roots_from_coeffs(c)


def _roots_from_coeffs(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    if len(c) == 2:
        z = np.array([-c[0] / c[1]])
    else:
        z = np.roots(c[::-1])
        z = _aberth(c, z)
    res = _residuals(c, z)
    if np.any(res > TOL.root_residual_rtol):
        raise RootfindingError(
            f"root refinement left residual {np.max(res):.3e} above {TOL.root_residual_rtol:.1e}"
        )
    return _canonical_sort(z)


def _canonical_sort(z: np.ndarray) -> np.ndarray:
    order = np.lexsort((z.imag, z.real))
    return z[order]


def is_real_root(z: complex) -> bool:
    return abs(z.imag) <= TOL.realness_rtol * (1.0 + abs(z))


def real_roots_sorted(p: UnivariatePoly) -> np.ndarray:
    """Real parts of the roots, sorted ascending; raises if any root is not real."""
    zs = roots(p)
    for z in zs:
        if not is_real_root(z):
            raise NonRealRootsError(p, z)
    return np.sort(zs.real)


def root_scale(zs: Sequence[complex]) -> float:
    return 1.0 + float(np.max(np.abs(zs))) if len(zs) else 1.0


# ---------------------------------------------------------------------------
# clusters


@dataclass(frozen=True)
class RootCluster:
    indices: frozenset[int]
    center: complex
    radius: float


def find_clusters(zs: Sequence[complex], tol: float) -> list[RootCluster]:
    """Greedy union of roots within `tol` of each other."""
    zs = np.asarray(zs)
    n = len(zs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(zs[i] - zs[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for members in groups.values():
        if len(members) < 2:
            continue
        pts = zs[members]
        center = complex(np.mean(pts))
        radius = float(np.max(np.abs(pts - center)))
        out.append(RootCluster(frozenset(members), center, radius))
    return out


# ---------------------------------------------------------------------------
# radial evaluation in the scaled variable mu = lambda / rho


class RadialRootSolver:
    """Roots of Q(lambda, i rho d) for varying rho > 0 along a fixed direction.

    Internally solves sum_j rho^(ell-j) P_{m-j}(mu, i d) = 0 for mu and
    returns lambda = rho * mu; the scaling keeps the vanishing branches well
    conditioned at small rho and the oscillatory ones at large rho.
    """

    def __init__(self, stack: OperatorStack, d: Direction):
        if d.dim != stack.dim:
            raise ValueError(f"direction dim {d.dim} != stack dim {stack.dim}")
        self.stack = stack
        self.direction = d
        self.m = stack.m
        self.ell = stack.ell
        self._pieces = []
        for s in stack.symbols:
            arr = np.zeros(self.m + 1, dtype=complex)
            c = restrict_complexified(s, d).array()
            arr[: len(c)] = c
            self._pieces.append(arr)

    def mu_coeffs(self, rho: float) -> np.ndarray:
        out = np.zeros(self.m + 1, dtype=complex)
        for j, arr in enumerate(self._pieces):
            out += rho ** (self.ell - j) * arr
        return out

    def lambdas(self, rho: float) -> np.ndarray:
        if rho <= 0:
            raise ValueError("rho must be positive")
        return rho * _roots_from_coeffs(self.mu_coeffs(rho))

    def lambdas_with_noise(self, rho: float) -> tuple[np.ndarray, np.ndarray]:
        """Roots plus a first-order rounding floor eps * bound(p, z) / |p'(z)| per root."""
        if rho <= 0:
            raise ValueError("rho must be positive")
        c = self.mu_coeffs(rho)
        mu = _roots_from_coeffs(c)
        dc = npoly.polyder(c)
        bound = npoly.polyval(np.abs(mu), np.abs(c))
        dval = np.abs(npoly.polyval(mu, dc))
        tinyf = np.finfo(float).tiny
        noise = np.finfo(float).eps * bound / np.maximum(dval, tinyf)
        return rho * mu, rho * noise


def spectral_abscissa(stack: OperatorStack, xi: Sequence[float]) -> float:
    """max_j Re lambda_j(xi) for the full symbol at one frequency."""
    xi = np.asarray(xi, dtype=float)
    rho = float(np.linalg.norm(xi))
    if rho == 0.0:
        zs = roots(full_symbol_at(stack, xi))
    else:
        zs = RadialRootSolver(stack, Direction.of(xi)).lambdas(rho)
    return float(np.max(zs.real))


# ---------------------------------------------------------------------------
# branch tracking


@dataclass
class RootBranchSet:
    """Root curves lambda_j(rho * d) matched across an ascending rho grid."""

    direction: Direction
    rho_grid: np.ndarray
    branches: np.ndarray  # shape (m, len(rho_grid))
    cluster_events: list[tuple[float, tuple[int, ...], float]] = field(default_factory=list)
    noise: np.ndarray | None = None  # same shape; per-value rounding floor

    @property
    def m(self) -> int:
        return self.branches.shape[0]

    def values_at(self, i: int) -> np.ndarray:
        return self.branches[:, i]


def _match(prev: np.ndarray, cand: np.ndarray) -> tuple[np.ndarray, float, np.ndarray]:
    cost = np.abs(prev[:, None] - cand[None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(len(cand), dtype=int)
    perm[rows] = cols
    ordered = cand[perm]
    movement = float(np.max(np.abs(prev - ordered)))
    return ordered, movement, perm


def _min_gap(zs: np.ndarray) -> float:
    if len(zs) < 2:
        return np.inf
    diff = np.abs(zs[:, None] - zs[None, :])
    np.fill_diagonal(diff, np.inf)
    return float(np.min(diff))


def _closest_pair(zs: np.ndarray) -> tuple[int, int]:
    diff = np.abs(zs[:, None] - zs[None, :])
    np.fill_diagonal(diff, np.inf)
    i, j = np.unravel_index(np.argmin(diff), diff.shape)
    return int(min(i, j)), int(max(i, j))


def track_branches(stack: OperatorStack, d: Direction, rho_grid: Sequence[float],
                   max_bisections: int = MAX_BISECTIONS) -> RootBranchSet:
    """Continuation of the m root branches along rho * d for ascending rho > 0.

    A step is accepted when the matched movement stays below a quarter of the
    smallest inter-root gap; otherwise it is bisected (depth-capped).  When
    bisection stops helping (branches genuinely collide) a cluster event is
    recorded and the minimum-distance match is kept.
    """
    grid = np.asarray(rho_grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise ValueError("rho_grid must be a nonempty 1-d ascending array")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("rho_grid must be positive and strictly ascending")

    solver = RadialRootSolver(stack, d)
    rhos: list[float] = [float(grid[0])]
    lam0, noise0 = solver.lambdas_with_noise(grid[0])
    order0 = np.lexsort((lam0.imag, lam0.real))
    current = lam0[order0]
    cols: list[np.ndarray] = [current]
    noises: list[np.ndarray] = [noise0[order0]]
    events: list[tuple[float, tuple[int, ...], float]] = []

    def note_clusters(rho: float, zs: np.ndarray):
        tol = TOL.cluster_rtol * (1.0 + float(np.max(np.abs(zs))))
        for cl in find_clusters(zs, tol):
            events.append((rho, tuple(sorted(cl.indices)), cl.radius * 2.0))

    note_clusters(rhos[0], current)

    def accept(rho_b: float, ordered: np.ndarray, cand_noise: np.ndarray, perm: np.ndarray):
        rhos.append(rho_b)
        cols.append(ordered)
        noises.append(cand_noise[perm])
        note_clusters(rho_b, ordered)

    def advance(prev: np.ndarray, rho_a: float, rho_b: float, depth: int, parent_ratio: float):
        cand, cand_noise = solver.lambdas_with_noise(rho_b)
        ordered, movement, perm = _match(prev, cand)
        gap = _min_gap(prev)
        cluster_tol = TOL.cluster_rtol * (1.0 + float(np.max(np.abs(prev))))
        if movement <= 0.25 * gap or gap < cluster_tol:
            accept(rho_b, ordered, cand_noise, perm)
            return ordered
        ratio = movement / gap
        if depth >= max_bisections:
            if ratio >= 0.8 * parent_ratio:
                # collision: bisection no longer separates movement from gap
                i, j = _closest_pair(prev)
                events.append((rho_b, (i, j), gap))
                accept(rho_b, ordered, cand_noise, perm)
                return ordered
            raise BisectionLimitError(rho_a, rho_b, f"movement/gap ratio {ratio:.3g} after {depth} bisections")
        mid = 0.5 * (rho_a + rho_b)
        half = advance(prev, rho_a, mid, depth + 1, ratio)
        return advance(half, mid, rho_b, depth + 1, ratio)

    current_state = current
    for rho_b in grid[1:]:
        current_state = advance(current_state, rhos[-1], float(rho_b), 0, np.inf)

    branches = np.stack(cols, axis=1)
    noise = np.stack(noises, axis=1)
    return RootBranchSet(direction=d, rho_grid=np.asarray(rhos), branches=branches,
                         cluster_events=events, noise=noise)


def connecting_permutation(stack: OperatorStack, d: Direction, rho_low: float, rho_high: float,
                           points_per_decade: int = 40) -> np.ndarray:
    """Permutation p with low-anchored branch j ending at the rank-p[j] root at rho_high.

    Ranks at both ends follow the canonical (Re, Im) sort, so p links the
    low-frequency labeling to the high-frequency one along this ray.
    """
    n = max(2, int(np.ceil(points_per_decade * np.log10(rho_high / rho_low))))
    grid = np.geomspace(rho_low, rho_high, n)
    bs = track_branches(stack, d, grid)
    final = bs.branches[:, -1]
    order = np.lexsort((final.imag, final.real))
    perm = np.empty(len(final), dtype=int)
    for rank, idx in enumerate(order):
        perm[idx] = rank
    return perm


def branch_dump_rows(bs: RootBranchSet, ray_id: int = 0):
    """Rows (ray_id, rho, branch, re, im) for CSV export."""
    for i, rho in enumerate(bs.rho_grid):
        for j in range(bs.m):
            z = bs.branches[j, i]
            yield (ray_id, float(rho), j, float(z.real), float(z.imag))
