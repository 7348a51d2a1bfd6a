"""Brute-force grid bounds that certify the LP pipeline on small instances.

The concavification oracle evaluates the reweighted value pointwise on a
simplex grid and maximizes over explicit decompositions of the prior into
grid points: upper-hull chords for two types; for three types, exhaustive
grid pairs collinear with the prior, all triples from a pool of region
boundary points, and seeded random triples.  Every candidate split is a
genuine decomposition, so the result is always a lower bound on the true
envelope; restricted minima over reweighting grids bound the worst-prior
values from the other side.  Gap allowances come from the pieces' affine
slopes.

Candidate decompositions depend only on the structure and the grid, never on
the reweighting, so they are built once and reused across reweightings.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import gcd
from random import Random
from typing import Iterable, Sequence

from .core import Belief, PersuasionGame, SubjectivePrior, restrict_to_support
from .geometry import PiecewiseValueStructure, compile_pieces
from .rational import ONE, ZERO, Rational, RationalLike, rat

DEFAULT_SEED = 177013
DEFAULT_RESTARTS = 800
_POOL_CAP = 64


class TooManyTypes(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Simplex grid of step 1/resolution; points are integer compositions."""

    resolution: int

    def __post_init__(self) -> None:
        if self.resolution < 2:
            raise ValueError("grid resolution must be at least 2")


def snapped_resolution(structure: PiecewiseValueStructure, target: int) -> int:
    """Smallest multiple of ``target``'s order that puts every piece boundary
    and the prior on the grid (two types only; otherwise ``target``).

    With boundaries on-grid the concavification oracle captures optimal
    splits exactly instead of up to one grid step.
    """
    if structure.dim != 2:
        return target
    denoms = {int(w.denominator) for w in structure.prior.weights}
    for piece in structure.pieces:
        for coeffs, _, rhs in piece.region.rows:
            c0, c1 = coeffs
            if c0 == c1:
                continue
            x = (rhs - c1) / (c0 - c1)
            if 0 <= x <= 1:
                denoms.add(int(x.denominator))
    base = 1
    for d in denoms:
        base = base * d // gcd(base, d)
        if base > 4096:  # boundary denominators too ragged; accept grid error
            return target
    return base * -(-target // base)


@lru_cache(maxsize=32)
def grid_beliefs(dim: int, resolution: int) -> tuple[Belief, ...]:
    n = resolution
    if dim == 1:
        return (Belief([ONE]),)
    if dim == 2:
        return tuple(Belief([rat(k, n), rat(n - k, n)]) for k in range(n + 1))
    if dim == 3:
        out = []
        for i in range(n + 1):
            for j in range(n + 1 - i):
                out.append(Belief([rat(i, n), rat(j, n), rat(n - i - j, n)]))
        return tuple(out)
    raise TooManyTypes(f"grids support at most 3 types, got {dim}")


@lru_cache(maxsize=64)
def _grid_table(structure: PiecewiseValueStructure, resolution: int):
    """Per grid point: weights, payoff shares against the prior, value interval.

    The prior itself is appended when off-grid, so index ``prior_idx`` always
    exists.
    """
    points = list(grid_beliefs(structure.dim, resolution))
    index = {mu.weights: i for i, mu in enumerate(points)}
    if structure.prior.weights not in index:
        index[structure.prior.weights] = len(points)
        points.append(structure.prior)
    entries = []
    for mu in points:
        shares = tuple(mu[t] / structure.prior[t] for t in range(structure.dim))
        lo, hi = structure.interval_at(mu)
        entries.append((mu.weights, shares, lo, hi))
    return tuple(entries), index[structure.prior.weights]


def _pointwise_values(
    structure: PiecewiseValueStructure,
    lam: SubjectivePrior,
    budget: Rational | None,
    entries,
) -> list[Rational]:
    n = structure.dim
    lam_w = [lam[t] for t in range(n)]
    out = []
    for _, shares, lo, hi in entries:
        w = ZERO
        for t in range(n):
            if lam_w[t] != 0 and shares[t] != 0:
                w += lam_w[t] * shares[t]
        if budget is None:
            out.append(w * hi)
        else:
            out.append(max(w * hi, w * (lo - budget)))
    return out


def lipschitz_slack(
    structure: PiecewiseValueStructure,
    lam: SubjectivePrior,
    budget: Rational | None,
    grid: GridSpec,
) -> Rational:
    """Grid-resolution allowance: (2/n) times the steepest piece slope."""
    span = ZERO
    for k in structure.solver_piece_indices():
        piece = structure.pieces[k]
        coeffs = [piece.vmax] if budget is None else [piece.vmax, piece.vmin - budget]
        for c in coeffs:
            grads = [lam[t] * c / structure.prior[t] for t in range(structure.dim)]
            s = max(grads) - min(grads)
            span = max(span, s)
    return rat(2, grid.resolution) * span


@lru_cache(maxsize=64)
def _candidates(structure: PiecewiseValueStructure, resolution: int, seed: int, restarts: int):
    """Weighted index combinations that exactly rebuild the prior (3 types)."""
    entries, prior_idx = _grid_table(structure, resolution)
    index = {e[0]: i for i, e in enumerate(entries)}
    prior = structure.prior
    out: list[tuple[tuple[int, ...], tuple[Rational, ...]]] = []

    # Exhaustive collinear pairs, walking the exact ray from each grid point
    # through the prior; needs the prior itself on the grid.
    n = resolution
    if all((w * n).denominator == 1 for w in prior.weights):
        for i, (weights, _, _, _) in enumerate(entries):
            if i == prior_idx:
                continue
            d = [prior.weights[t] - weights[t] for t in range(3)]
            dn = [int(v * n) for v in d]
            g = 0
            for v in dn:
                g = gcd(g, abs(v))
            if g == 0:
                continue
            j = 1
            while True:
                s = rat(j, g)
                b = tuple(prior.weights[t] + s * d[t] for t in range(3))
                if any(v < 0 for v in b):
                    break
                other = index.get(b)
                if other is not None:
                    wb = ONE / (ONE + s)
                    out.append(((i, other), (ONE - wb, wb)))
                j += 1

    pool = _boundary_pool(structure, resolution, index)
    for combo in combinations(pool, 3):
        w = _solve_triple(prior, [entries[i][0] for i in combo])
        if w is not None:
            out.append((combo, w))

    rng = Random(seed)
    all_idx = list(range(len(entries)))
    for _ in range(restarts):
        combo = tuple(rng.sample(all_idx, 3))
        w = _solve_triple(prior, [entries[i][0] for i in combo])
        if w is not None:
            out.append((combo, w))
    return tuple(out)


def _boundary_pool(structure, resolution, index) -> list[int]:
    pool = []
    for mu in grid_beliefs(structure.dim, resolution):
        if len(structure.pieces_at(mu)) >= 2:
            pool.append(index[mu.weights])
    if len(pool) > _POOL_CAP:
        step = len(pool) / _POOL_CAP
        pool = [pool[int(i * step)] for i in range(_POOL_CAP)]
    extras = [Belief.degenerate(structure.dim, t) for t in range(structure.dim)]
    extras.append(structure.prior)
    for mu in extras:
        i = index[mu.weights]
        if i not in pool:
            pool.append(i)
    return pool


def _solve_triple(prior: Belief, triple) -> tuple[Rational, ...] | None:
    """Exact barycentric weights of the prior in a 3-point set, or None."""
    a, b, c = triple
    m = [
        [a[0], b[0], c[0], prior[0]],
        [a[1], b[1], c[1], prior[1]],
        [ONE, ONE, ONE, ONE],
    ]
    for col in range(3):
        piv = None
        for r in range(col, 3):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        inv = ONE / m[col][col]
        if inv != ONE:
            m[col] = [v * inv for v in m[col]]
        for r in range(3):
            if r != col and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [v - factor * w for v, w in zip(m[r], m[col])]
    w = (m[0][3], m[1][3], m[2][3])
    if any(v < 0 for v in w):
        return None
    return w


def grid_concavify(
    structure: PiecewiseValueStructure,
    lam: SubjectivePrior,
    budget: Rational | None,
    grid: GridSpec,
    seed: int = DEFAULT_SEED,
    restarts: int = DEFAULT_RESTARTS,
) -> Rational:
    """Best split of the prior into grid atoms; a lower bound on the envelope.

    The prior itself always counts as one admissible atom, so the bound is at
    least the pointwise value there.
    """
    dim = structure.dim
    if dim > 3:
        raise TooManyTypes("concavification oracle supports at most 3 types")
    if budget is None and lam.domain != "simplex":
        raise ValueError("unlimited-budget oracle needs a simplex reweighting")
    entries, prior_idx = _grid_table(structure, grid.resolution)
    vals = _pointwise_values(structure, lam, budget, entries)
    best = vals[prior_idx]
    if dim == 1:
        return best
    if dim == 2:
        return max(best, _hull_value_at(entries, vals, structure.prior))
    for combo, weights in _candidates(structure, grid.resolution, seed, restarts):
        v = sum((w * vals[i] for i, w in zip(combo, weights)), ZERO)
        if v > best:
            best = v
    return best


def _hull_value_at(entries, vals, prior: Belief) -> Rational:
    """Exact upper-concave-hull interpolation at the prior (two types)."""
    pts = sorted(
        ((weights[0], v) for (weights, _, _, _), v in zip(entries, vals)),
    )
    hull: list[tuple[Rational, Rational]] = []
    for p in pts:
        if hull and hull[-1][0] == p[0]:
            if p[1] > hull[-1][1]:
                hull.pop()
            else:
                continue
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop the middle point when it sits on or under the chord
            if (y2 - y1) * (p[0] - x1) <= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    x0 = prior[0]
    if x0 <= hull[0][0]:
        return hull[0][1]
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        if x1 <= x0 <= x2:
            return y1 + (y2 - y1) * (x0 - x1) / (x2 - x1)
    return hull[-1][1]


def grid_min_lambda(
    structure: PiecewiseValueStructure,
    lambdas: Iterable[SubjectivePrior],
    budget: Rational | None,
    grid: GridSpec,
    seed: int = DEFAULT_SEED,
    restarts: int = DEFAULT_RESTARTS,
) -> tuple[Rational, SubjectivePrior]:
    """Minimum of the grid concavification over a supplied reweighting grid.

    The exact min over all reweightings never exceeds the exact envelope at
    any grid reweighting, so this bounds it from above up to the allowance.
    """
    best = None
    arg = None
    for lam in lambdas:
        v = grid_concavify(structure, lam, budget, grid, seed, restarts)
        if best is None or v < best:
            best, arg = v, lam
    if best is None:
        raise ValueError("empty reweighting grid")
    return best, arg


def grid_qcav_binary(structure: PiecewiseValueStructure, grid: GridSpec) -> Rational:
    """Grid quasi-concave envelope for two types: best level whose superlevel
    grid points straddle the prior."""
    if structure.dim != 2:
        raise TooManyTypes("grid quasi-concavification implemented for 2 types")
    entries, prior_idx = _grid_table(structure, grid.resolution)
    x0 = structure.prior[0]
    points = [(weights[0], hi) for weights, _, _, hi in entries]
    for level in sorted({v for _, v in points}, reverse=True):
        left = any(x <= x0 and v >= level for x, v in points)
        right = any(x >= x0 and v >= level for x, v in points)
        if left and right:
            return level
    raise AssertionError("some level must be feasible")


def simplex_lambda_grid(dim: int, steps: int) -> list[SubjectivePrior]:
    if dim == 1:
        return [SubjectivePrior([ONE])]
    if dim == 2:
        return [
            SubjectivePrior([rat(k, steps), rat(steps - k, steps)]) for k in range(steps + 1)
        ]
    if dim == 3:
        out = []
        for i in range(steps + 1):
            for j in range(steps + 1 - i):
                out.append(
                    SubjectivePrior(
                        [rat(i, steps), rat(j, steps), rat(steps - i - j, steps)]
                    )
                )
        return out
    raise TooManyTypes("reweighting grids support at most 3 types")


def affine_lambda_grid_binary(
    lo: RationalLike, hi: RationalLike, steps: int
) -> list[SubjectivePrior]:
    lo, hi = rat(lo), rat(hi)
    step = (hi - lo) / steps
    out = []
    for k in range(steps + 1):
        first = lo + k * step
        out.append(SubjectivePrior([first, ONE - first], domain="affine"))
    return out


@dataclass(frozen=True)
class AuditRow:
    protocol: str
    exact: Rational
    lower: Rational | None
    upper: Rational | None
    slack: Rational
    satisfied: bool


@dataclass(frozen=True)
class AuditReport:
    rows: tuple[AuditRow, ...]

    @property
    def ok(self) -> bool:
        return all(r.satisfied for r in self.rows)


def _row(protocol, exact, lower, upper, slack) -> AuditRow:
    ok = True
    if lower is not None:
        ok = ok and lower <= exact and exact - lower <= slack
    if upper is not None:
        ok = ok and abs(exact - upper) <= slack
    return AuditRow(protocol, exact, lower, upper, slack, ok)


def audit_structure(
    structure: PiecewiseValueStructure,
    budgets: Sequence[RationalLike] = (),
    grid: GridSpec | None = None,
    lambda_steps: int | None = None,
    overrides=None,
    seed: int = DEFAULT_SEED,
    restarts: int = DEFAULT_RESTARTS,
) -> AuditReport:
    """Compare exact protocol values against grid-oracle bounds.

    ``overrides`` substitutes claimed values per protocol before comparison;
    tests use it as a negative control.  The reweighting grids include the
    solver's own worst reweighting, pinning the restricted minimum to it.
    """
    from .solvers import (
        value_bp_structure,
        value_ct_structure,
        value_mdmb_budget_structure,
        value_mdmb_structure,
    )

    dim = structure.dim
    if dim > 3:
        raise TooManyTypes("oracle audits support at most 3 types")
    if grid is None:
        grid = GridSpec(snapped_resolution(structure, 256) if dim <= 2 else 60)
    if lambda_steps is None:
        lambda_steps = 32 if dim <= 2 else 4
    overrides = overrides or {}

    exact_bp = overrides.get("bp", value_bp_structure(structure))
    exact_ct = overrides.get("ct", value_ct_structure(structure))
    mdmb_value, cert = value_mdmb_structure(structure)
    exact_mdmb = overrides.get("mdmb", mdmb_value)

    prior_lam = SubjectivePrior.from_belief(structure.prior)
    rows = []

    bp_lower = grid_concavify(structure, prior_lam, None, grid, seed, restarts)
    rows.append(
        _row("bp", exact_bp, bp_lower, None, lipschitz_slack(structure, prior_lam, None, grid))
    )

    if dim == 2:
        ct_lower = grid_qcav_binary(structure, grid)
        rows.append(
            _row("ct", exact_ct, ct_lower, None, lipschitz_slack(structure, prior_lam, None, grid))
        )

    lam_grid = simplex_lambda_grid(dim, lambda_steps)
    lam_grid.append(cert.lambda_star)
    upper, upper_arg = grid_min_lambda(structure, lam_grid, None, grid, seed, restarts)
    slack = max(
        lipschitz_slack(structure, lam, None, grid) for lam in (upper_arg, cert.lambda_star)
    )
    if dim == 2:
        vertex_lower = min(
            grid_concavify(structure, SubjectivePrior.degenerate(2, t), None, grid, seed, restarts)
            for t in range(2)
        )
        vslack = max(
            lipschitz_slack(structure, SubjectivePrior.degenerate(2, t), None, grid)
            for t in range(2)
        )
        rows.append(_row("mdmb", exact_mdmb, vertex_lower, upper, max(slack, vslack)))
    else:
        rows.append(_row("mdmb", exact_mdmb, None, upper, slack))

    for label, cap in [("md", rat(0))] + [(f"mdmb[C={rat(c)}]", rat(c)) for c in budgets]:
        c_value, c_cert = value_mdmb_budget_structure(structure, cap)
        c_exact = overrides.get(label, c_value)
        c_grid: list[SubjectivePrior] = [c_cert.lambda_star]
        if dim == 2:
            c_grid.extend(affine_lambda_grid_binary(-4, 2, 48))
        c_upper, c_arg = grid_min_lambda(structure, c_grid, cap, grid, seed, restarts)
        c_slack = max(
            lipschitz_slack(structure, lam, cap, grid) for lam in (c_arg, c_cert.lambda_star)
        )
        rows.append(_row(label, c_exact, None, c_upper, c_slack))

    return AuditReport(tuple(rows))


def audit_report(
    game: PersuasionGame,
    budgets: Sequence[RationalLike] = (),
    grid: GridSpec | None = None,
    lambda_steps: int | None = None,
    overrides=None,
    seed: int = DEFAULT_SEED,
    restarts: int = DEFAULT_RESTARTS,
) -> AuditReport:
    game = restrict_to_support(game)
    if game.n_types > 3:
        raise TooManyTypes("oracle audits support at most 3 types")
    return audit_structure(
        compile_pieces(game), budgets, grid, lambda_steps, overrides, seed, restarts
    )
