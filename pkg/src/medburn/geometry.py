"""Receiver best-response structure compiled into belief-space pieces.

For each set of actions S the receiver is willing to tie over, the beliefs
where every action in S is optimal form a closed polytope; attaching the
sender's worst and best values over S gives a piecewise description of the
achievable-value correspondence.  Every envelope computation downstream
consumes this compiled form, so abstract value structures (given directly as
polytopes with value intervals) plug into the same solvers.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .core import Belief, PersuasionGame
from .lp import EQ, FREE, GE, LE, NONNEG, OPTIMAL, LinearProgram, solve
from .rational import ONE, ZERO, Rational, RationalLike, rat

MAX_ACTIONS_FOR_PIECES = 12


@dataclass(frozen=True)
class Polytope:
    """H-representation over belief coordinates; simplex rows always included."""

    dim: int
    rows: tuple[tuple[tuple[Rational, ...], str, Rational], ...]

    @staticmethod
    def on_simplex(
        dim: int, extra: Iterable[tuple[Sequence[RationalLike], str, RationalLike]] = ()
    ) -> "Polytope":
        rows: list[tuple[tuple[Rational, ...], str, Rational]] = []
        for t in range(dim):
            coeffs = tuple(ONE if i == t else ZERO for i in range(dim))
            rows.append((coeffs, GE, ZERO))
        rows.append((tuple(ONE for _ in range(dim)), EQ, ONE))
        for coeffs, relation, rhs in extra:
            packed = tuple(rat(c) for c in coeffs)
            if len(packed) != dim:
                raise ValueError("polytope row has wrong dimension")
            if relation not in (LE, EQ, GE):
                raise ValueError(f"unknown relation {relation!r}")
            rows.append((packed, relation, rat(rhs)))
        return Polytope(dim, tuple(rows))

    def contains(self, mu: Belief) -> bool:
        if len(mu) != self.dim:
            return False
        for coeffs, relation, rhs in self.rows:
            lhs = sum((c * mu[t] for t, c in enumerate(coeffs) if c != 0), ZERO)
            if relation == LE and lhs > rhs:
                return False
            if relation == GE and lhs < rhs:
                return False
            if relation == EQ and lhs != rhs:
                return False
        return True

    def cone_rows(self) -> tuple[tuple[tuple[Rational, ...], str], ...]:
        """Homogenized rows: a.mu REL b becomes (a - b*1).z REL 0.

        Scaling a belief by a nonnegative mass keeps these rows valid, so they
        cut out the cone over the polytope; coordinate nonnegativity rides on
        the LP variable signs and the trivial sum row drops out.
        """
        out = []
        for coeffs, relation, rhs in self.rows:
            shifted = tuple(c - rhs for c in coeffs)
            if any(c != 0 for c in shifted):
                out.append((shifted, relation))
        return tuple(out)

    def is_empty(self) -> bool:
        n = self.dim
        lp = LinearProgram(
            "max",
            [(f"m{t}", NONNEG) for t in range(n)],
            {},
            [({t: c for t, c in enumerate(coeffs) if c != 0}, relation, rhs)
             for coeffs, relation, rhs in self.rows],
        )
        return solve(lp).status != OPTIMAL


@dataclass(frozen=True)
class ValuePiece:
    """A region of beliefs with the value interval achievable on it.

    ``actions`` lists the tied receiver actions that generate a compiled
    piece; directly supplied pieces leave it empty.
    """

    region: Polytope
    vmin: Rational
    vmax: Rational
    actions: tuple[int, ...] = ()
    label: str = ""

    def __post_init__(self) -> None:
        if self.vmin > self.vmax:
            raise ValueError("piece has vmin > vmax")


@dataclass(frozen=True)
class PiecewiseValueStructure:
    """All pieces plus the prior they will be concavified against."""

    pieces: tuple[ValuePiece, ...]
    prior: Belief
    kind: str = "tie_sets"  # "tie_sets" (game-derived) | "direct"

    @property
    def dim(self) -> int:
        return len(self.prior)

    def pieces_at(self, mu: Belief) -> tuple[int, ...]:
        return tuple(i for i, p in enumerate(self.pieces) if p.region.contains(mu))

    def interval_at(self, mu: Belief) -> tuple[Rational, Rational]:
        """Achievable-value hull at ``mu`` over the pieces containing it."""
        idx = self.pieces_at(mu)
        if not idx:
            raise ValueError(f"no piece covers belief {mu}")
        return (
            min(self.pieces[i].vmin for i in idx),
            max(self.pieces[i].vmax for i in idx),
        )

    def solver_piece_indices(self) -> tuple[int, ...]:
        """Pieces the envelope LPs need.

        For a game-derived structure the single-action pieces already span
        every achievable (region, value) pair pointwise: a larger tie set's
        region is the intersection of its members' regions and its value
        bounds are attained by members.  Larger tie sets stay in ``pieces``
        for reporting and region queries.
        """
        if self.kind != "tie_sets":
            return tuple(range(len(self.pieces)))
        singles = tuple(i for i, p in enumerate(self.pieces) if len(p.actions) == 1)
        return singles if singles else tuple(range(len(self.pieces)))

    def with_prior(self, prior: Belief) -> "PiecewiseValueStructure":
        if len(prior) != self.dim:
            raise ValueError("prior dimension mismatch")
        return PiecewiseValueStructure(self.pieces, prior, self.kind)


def direct_structure(
    pieces: Iterable[ValuePiece], prior: Belief
) -> PiecewiseValueStructure:
    packed = tuple(pieces)
    if not packed:
        raise ValueError("need at least one piece")
    for p in packed:
        if p.region.dim != len(prior):
            raise ValueError("piece dimension does not match prior")
        if p.region.is_empty():
            raise ValueError(f"piece {p.label!r} has an empty region")
    return PiecewiseValueStructure(packed, prior, kind="direct")


def best_responses(game: PersuasionGame, mu: Belief) -> tuple[int, ...]:
    """Exact argmax set of the receiver's expected payoff at ``mu``."""
    scores = [game.expected_u(a, mu) for a in range(game.n_actions)]
    top = max(scores)
    return tuple(a for a, s in enumerate(scores) if s == top)


def value_interval(game: PersuasionGame, mu: Belief) -> tuple[Rational, Rational]:
    ro = best_responses(game, mu)
    values = [game.v[a] for a in ro]
    return min(values), max(values)


def _tie_region(game: PersuasionGame, tie_set: tuple[int, ...]) -> Polytope:
    n = game.n_types
    rows = []
    seen = set()
    for a in tie_set:
        for b in range(game.n_actions):
            if b == a or (a, b) in seen:
                continue
            seen.add((a, b))
            coeffs = tuple(game.u[a][t] - game.u[b][t] for t in range(n))
            rows.append((coeffs, GE, ZERO))
    return Polytope.on_simplex(n, rows)


def compile_pieces(game: PersuasionGame) -> PiecewiseValueStructure:
    """Enumerate nonempty tie-set regions with their value intervals.

    Worst case emits 2^|A|-1 pieces; refuses more than
    ``MAX_ACTIONS_FOR_PIECES`` actions.  Subsets are ordered by size then
    lexicographically, so single-action pieces occupy a stable prefix.
    """
    if game.n_actions > MAX_ACTIONS_FOR_PIECES:
        raise ValueError(
            f"{game.n_actions} actions would enumerate too many tie sets "
            f"(limit {MAX_ACTIONS_FOR_PIECES})"
        )
    subsets: list[tuple[int, ...]] = []
    for size in range(1, game.n_actions + 1):
        subsets.extend(_subsets_of_size(game.n_actions, size))
    pieces = []
    for tie_set in subsets:
        region = _tie_region(game, tie_set)
        if region.is_empty():
            continue
        values = [game.v[a] for a in tie_set]
        label = "{" + ",".join(game.actions[a] for a in tie_set) + "}"
        pieces.append(ValuePiece(region, min(values), max(values), tie_set, label))
    return PiecewiseValueStructure(tuple(pieces), game.prior, kind="tie_sets")


def _subsets_of_size(n: int, size: int) -> list[tuple[int, ...]]:
    return [tuple(c) for c in combinations(range(n), size)]


@dataclass(frozen=True)
class GenericityReport:
    generic: bool
    witnesses: tuple[tuple[tuple[int, ...], int, Belief], ...]
    failing: tuple[tuple[int, ...], int] | None


def is_generic(game: PersuasionGame) -> GenericityReport:
    """Check that any action tied at some belief is uniquely optimal at another
    belief with the same support.

    Per support face and action: one LP decides whether the action is optimal
    somewhere strictly inside the face, a second maximizes its minimum strict
    win margin there.  A positive margin yields a witness belief; a
    nonpositive one on a face where the action is optimal fails the check.
    """
    n = game.n_types
    witnesses = []
    for support in _nonempty_subsets(n):
        for a in range(game.n_actions):
            if not _optimal_inside_face(game, support, a):
                continue
            witness = _unique_witness(game, support, a)
            if witness is None:
                return GenericityReport(False, tuple(witnesses), (support, a))
            witnesses.append((support, a, witness))
    return GenericityReport(True, tuple(witnesses), None)


def _nonempty_subsets(n: int) -> list[tuple[int, ...]]:
    out = []
    for size in range(1, n + 1):
        out.extend(_subsets_of_size(n, size))
    return out


def _face_lp(
    game: PersuasionGame, support: tuple[int, ...], a: int, strict_opt: bool
) -> LinearProgram:
    # variables: mu_0..mu_{n-1} (nonneg), s (free, maximized)
    n = game.n_types
    s_var = n
    cons: list[tuple[dict, str, RationalLike]] = []
    cons.append(({t: 1 for t in range(n)}, EQ, 1))
    for t in range(n):
        if t in support:
            cons.append(({t: 1, s_var: -1}, GE, 0))
        else:
            cons.append(({t: 1}, EQ, 0))
    for b in range(game.n_actions):
        if b == a:
            continue
        row = {t: game.u[a][t] - game.u[b][t] for t in range(n)}
        if strict_opt:
            row[s_var] = rat(-1)
        cons.append((row, GE, 0))
    variables = [(f"m{t}", NONNEG) for t in range(n)] + [("s", FREE)]
    return LinearProgram("max", variables, {s_var: 1}, cons)


def _optimal_inside_face(game: PersuasionGame, support: tuple[int, ...], a: int) -> bool:
    sol = solve(_face_lp(game, support, a, strict_opt=False))
    return sol.status == OPTIMAL and sol.value > 0


def _unique_witness(
    game: PersuasionGame, support: tuple[int, ...], a: int
) -> Belief | None:
    sol = solve(_face_lp(game, support, a, strict_opt=True))
    if sol.status != OPTIMAL or sol.value <= 0:
        return None
    return Belief(sol.primal[: game.n_types])
