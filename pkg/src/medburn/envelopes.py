"""Concave and quasi-concave envelope evaluation at the prior.

The concavification of a reweighted piecewise value is one LP: a nonnegative
``mass x belief`` vector per (piece, branch) constrained to the piece's cone,
summing to the prior.  The minimization over reweightings (worst subjective
prior) is the LP dual of a max-min program over the same blocks, so a single
solve returns the value, the optimal posterior decomposition, and the worst
prior as the payoff rows' multipliers.

Branches realize a pointwise max: the ``max`` branch pays a piece's best
value, the ``min`` branch its worst value less the burning budget.  Offering
both as separate blocks at the same region is exact because concavification
already maximizes over decompositions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Belief, PosteriorDistribution, SubjectivePrior
from .geometry import PiecewiseValueStructure
from .lp import EQ, FREE, LE, NONNEG, OPTIMAL, LinearProgram, solve
from .rational import ONE, ZERO, Rational, rat

MAX_BRANCH = "max"
MIN_BRANCH = "min"

MAX_ONLY = "max_only"
TWO_BRANCH = "two_branch"


@dataclass(frozen=True)
class WeightedEnvelopeQuery:
    structure: PiecewiseValueStructure
    lam: SubjectivePrior
    budget: Rational | None = None  # None stands for an unlimited budget
    branch_mode: str = MAX_ONLY

    def __post_init__(self) -> None:
        if self.branch_mode not in (MAX_ONLY, TWO_BRANCH):
            raise ValueError(f"unknown branch mode {self.branch_mode!r}")
        if self.branch_mode == MAX_ONLY and self.lam.domain != "simplex":
            raise ValueError("max-only envelopes require a simplex reweighting")
        if self.branch_mode == TWO_BRANCH and self.budget is None:
            raise ValueError("two-branch envelopes need a finite budget")
        if self.budget is not None and self.budget < 0:
            raise ValueError("budget must be nonnegative")
        if len(self.lam) != self.structure.dim:
            raise ValueError("reweighting dimension mismatch")


@dataclass(frozen=True)
class DecompositionAtom:
    belief: Belief
    weight: Rational
    piece: int  # index into structure.pieces
    branch: str
    value: Rational  # branch coefficient: vmax, or vmin - budget


@dataclass(frozen=True)
class EnvelopeResult:
    value: Rational
    atoms: tuple[DecompositionAtom, ...]

    def posterior(self) -> PosteriorDistribution:
        return PosteriorDistribution(
            (a.belief, a.weight) for a in self.atoms
        ).merged()


def subjective_weight(lam: SubjectivePrior, prior: Belief, mu: Belief) -> Rational:
    """Likelihood reweighting sum(lam_t * mu_t / prior_t); identically 1 at lam == prior."""
    total = ZERO
    for t in range(len(prior)):
        lt = lam[t]
        if lt != 0:
            total += lt * mu[t] / prior[t]
    return total


def evaluate_subjective(
    structure: PiecewiseValueStructure,
    lam: SubjectivePrior,
    budget: Rational | None,
    mu: Belief,
) -> Rational:
    """Pointwise reweighted value at ``mu`` with the exact tie set there."""
    w = subjective_weight(lam, structure.prior, mu)
    lo, hi = structure.interval_at(mu)
    if budget is None:
        if lam.domain != "simplex":
            raise ValueError("unlimited budget requires a simplex reweighting")
        return w * hi
    return max(w * hi, w * (lo - budget))


def _require_full_support(structure: PiecewiseValueStructure) -> None:
    if any(w == 0 for w in structure.prior.weights):
        raise ValueError("envelope operations need a full-support prior; restrict first")


def _blocks(
    structure: PiecewiseValueStructure, budget: Rational | None, branch_mode: str
) -> list[tuple[int, str, Rational]]:
    out = []
    for k in structure.solver_piece_indices():
        piece = structure.pieces[k]
        out.append((k, MAX_BRANCH, piece.vmax))
        if branch_mode == TWO_BRANCH:
            out.append((k, MIN_BRANCH, piece.vmin - budget))
    return out


def _mass_rows(structure, blocks):
    """Equality rows forcing block masses to rebuild the prior, then cone rows."""
    n = structure.dim
    rows: list[tuple[dict, str, Rational]] = []
    for t in range(n):
        rows.append(({b * n + t: ONE for b in range(len(blocks))}, EQ, structure.prior[t]))
    for b, (k, _, _) in enumerate(blocks):
        for coeffs, relation in structure.pieces[k].region.cone_rows():
            row = {b * n + t: c for t, c in enumerate(coeffs) if c != 0}
            rows.append((row, relation, ZERO))
    return rows


def _extract_atoms(
    structure: PiecewiseValueStructure,
    blocks: list[tuple[int, str, Rational]],
    primal,
) -> tuple[DecompositionAtom, ...]:
    n = structure.dim
    atoms = []
    for b, (k, branch, coeff) in enumerate(blocks):
        z = [primal[b * n + t] for t in range(n)]
        mass = sum(z, ZERO)
        if mass == 0:
            continue
        belief = Belief([v / mass for v in z])
        assert structure.pieces[k].region.contains(belief), "atom left its piece"
        atoms.append(DecompositionAtom(belief, mass, k, branch, coeff))
    return _merge_atoms(atoms)


def _merge_atoms(atoms) -> tuple[DecompositionAtom, ...]:
    grouped: dict[tuple, DecompositionAtom] = {}
    order = []
    for a in atoms:
        key = (a.belief.weights, a.branch, a.value)
        if key in grouped:
            old = grouped[key]
            grouped[key] = DecompositionAtom(
                old.belief, old.weight + a.weight, old.piece, old.branch, old.value
            )
        else:
            grouped[key] = a
            order.append(key)
    return tuple(grouped[k] for k in order)


def _check_result(
    structure: PiecewiseValueStructure,
    lam: SubjectivePrior,
    result: EnvelopeResult,
) -> None:
    n = structure.dim
    totals = [ZERO] * n
    recombined = ZERO
    for a in result.atoms:
        for t in range(n):
            totals[t] += a.weight * a.belief[t]
        recombined += a.weight * subjective_weight(lam, structure.prior, a.belief) * a.value
    assert tuple(totals) == structure.prior.weights, "decomposition is not Bayes-plausible"
    assert recombined == result.value, "decomposition does not re-evaluate to the value"


def concavify_weighted(query: WeightedEnvelopeQuery) -> EnvelopeResult:
    """Value and optimal split of the concavified reweighted piecewise value."""
    structure = query.structure
    _require_full_support(structure)
    n = structure.dim
    budget = None if query.branch_mode == MAX_ONLY else rat(query.budget)
    blocks = _blocks(structure, budget, query.branch_mode)
    objective: dict[int, Rational] = {}
    for b, (_, _, coeff) in enumerate(blocks):
        if coeff == 0:
            continue
        for t in range(n):
            lt = query.lam[t]
            if lt != 0:
                objective[b * n + t] = coeff * lt / structure.prior[t]
    lp = LinearProgram(
        "max",
        [(f"z{b}_{t}", NONNEG) for b in range(len(blocks)) for t in range(n)],
        objective,
        _mass_rows(structure, blocks),
    )
    sol = solve(lp)
    assert sol.status == OPTIMAL, f"envelope LP came back {sol.status}"
    atoms = _extract_atoms(structure, blocks, sol.primal)
    if query.branch_mode == MAX_ONLY:
        atoms = _caratheodory_reduce(structure, query.lam, atoms, sol.value)
        assert len(atoms) <= n + 1, "max-only decomposition exceeds the Caratheodory bound"
    result = EnvelopeResult(sol.value, atoms)
    _check_result(structure, query.lam, result)
    return result


def _caratheodory_reduce(
    structure: PiecewiseValueStructure,
    lam: SubjectivePrior,
    atoms: tuple[DecompositionAtom, ...],
    value: Rational,
) -> tuple[DecompositionAtom, ...]:
    """Rebalance onto a basic subset: at most |types|+1 atoms carry the split.

    The reweighting constraints (prior coordinates plus total objective) have
    rank at most |types|+1, so any basic feasible reweighting of the existing
    atoms has support that small; beliefs and branch values never move.
    """
    n = structure.dim
    if len(atoms) <= n + 1:
        return atoms
    gains = [
        subjective_weight(lam, structure.prior, a.belief) * a.value for a in atoms
    ]
    cons: list[tuple[dict, str, Rational]] = []
    for t in range(n):
        cons.append(
            ({i: atoms[i].belief[t] for i in range(len(atoms))}, EQ, structure.prior[t])
        )
    cons.append(({i: gains[i] for i in range(len(atoms))}, EQ, value))
    lp = LinearProgram(
        "max",
        [(f"w{i}", NONNEG) for i in range(len(atoms))],
        {},
        cons,
    )
    sol = solve(lp)
    assert sol.status == OPTIMAL, "reduction LP must stay feasible"
    kept = [
        DecompositionAtom(a.belief, w, a.piece, a.branch, a.value)
        for a, w in zip(atoms, sol.primal)
        if w > 0
    ]
    return _merge_atoms(kept)


@dataclass(frozen=True)
class WorstPriorResult:
    value: Rational
    lam: SubjectivePrior
    envelope: EnvelopeResult


def worst_prior_envelope(
    structure: PiecewiseValueStructure,
    budget: Rational | None,
    domain: str,
) -> WorstPriorResult:
    """Minimize the concavified reweighted value over reweightings.

    Solved from the max-min side: maximize the worst per-type payoff of a
    decomposition whose atom values come from the (piece, branch) blocks.
    With an affine reweighting domain the per-type payoffs are forced equal;
    with the simplex domain they are only bounded below.  The reweighting that
    attains the outer minimum falls out as the payoff rows' dual multipliers,
    and strong duality (checked exactly in the solver) makes both sides equal.
    """
    _require_full_support(structure)
    if domain not in ("simplex", "affine"):
        raise ValueError(f"unknown domain {domain!r}")
    branch_mode = MAX_ONLY if budget is None else TWO_BRANCH
    if budget is not None and budget < 0:
        raise ValueError("budget must be nonnegative")
    n = structure.dim
    blocks = _blocks(structure, budget, branch_mode)
    nblocks = len(blocks)
    eta = nblocks * n
    variables = [(f"z{b}_{t}", NONNEG) for b in range(nblocks) for t in range(n)]
    variables.append(("eta", FREE))

    rows: list[tuple[dict, str, Rational]] = []
    for t in range(n):
        rows.append(({b * n + t: ONE for b in range(nblocks)}, EQ, structure.prior[t]))
    relation = LE if domain == "simplex" else EQ
    for t in range(n):
        row: dict[int, Rational] = {eta: ONE}
        for b, (_, _, coeff) in enumerate(blocks):
            if coeff != 0:
                row[b * n + t] = -coeff / structure.prior[t]
        rows.append((row, relation, ZERO))
    for b, (k, _, _) in enumerate(blocks):
        for coeffs, rel in structure.pieces[k].region.cone_rows():
            rows.append(({b * n + t: c for t, c in enumerate(coeffs) if c != 0}, rel, ZERO))

    lp = LinearProgram("max", variables, {eta: ONE}, rows)
    sol = solve(lp)
    assert sol.status == OPTIMAL, f"worst-prior LP came back {sol.status}"
    lam_weights = [sol.dual[n + t] for t in range(n)]
    assert sum(lam_weights, ZERO) == ONE, "payoff-row multipliers must sum to 1"
    if domain == "simplex":
        assert all(w >= 0 for w in lam_weights), "simplex multipliers must be nonnegative"
    lam = SubjectivePrior(lam_weights, domain=domain)
    atoms = _extract_atoms(structure, blocks, sol.primal)
    envelope = EnvelopeResult(sol.value, atoms)
    _check_result(structure, lam, envelope)
    return WorstPriorResult(sol.value, lam, envelope)


def quasiconcavify(structure: PiecewiseValueStructure) -> Rational:
    """Largest level whose superlevel pieces convexly cover the prior.

    Candidate levels are the pieces' best values in decreasing order; coverage
    is one feasibility LP over the qualifying pieces' cones.  The lowest level
    is always feasible because the regions cover the simplex.
    """
    _require_full_support(structure)
    n = structure.dim
    indices = structure.solver_piece_indices()
    levels = sorted({structure.pieces[k].vmax for k in indices}, reverse=True)
    for level in levels:
        qualifying = [k for k in indices if structure.pieces[k].vmax >= level]
        rows: list[tuple[dict, str, Rational]] = []
        for t in range(n):
            rows.append(
                ({b * n + t: ONE for b in range(len(qualifying))}, EQ, structure.prior[t])
            )
        for b, k in enumerate(qualifying):
            for coeffs, rel in structure.pieces[k].region.cone_rows():
                rows.append(
                    ({b * n + t: c for t, c in enumerate(coeffs) if c != 0}, rel, ZERO)
                )
        lp = LinearProgram(
            "max",
            [(f"z{b}_{t}", NONNEG) for b in range(len(qualifying)) for t in range(n)],
            {},
            rows,
        )
        if solve(lp).status == OPTIMAL:
            return level
    raise AssertionError("piece regions failed to cover the simplex")
