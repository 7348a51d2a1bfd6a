"""Game primitives: types, actions, payoffs, priors, and belief objects.

A game is a finite sender-receiver interaction: the sender privately knows a
type, the receiver picks an action, the receiver's payoff depends on both, and
the sender's value depends on the action alone (state-independent motives).
Everything downstream consumes the validated, support-restricted form built
here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .rational import ONE, ZERO, Rational, RationalLike, format_fraction, rat


class GameValidationError(ValueError):
    """Base class for rejected game descriptions."""


class DimensionMismatch(GameValidationError):
    pass


class PriorNotOnSimplex(GameValidationError):
    pass


class EmptyTypeOrActionSet(GameValidationError):
    pass


class AllTypesNull(GameValidationError):
    pass


def _rat_tuple(values: Iterable[RationalLike]) -> tuple[Rational, ...]:
    return tuple(rat(v) for v in values)


@dataclass(frozen=True)
class Belief:
    """A point on the probability simplex over types."""

    weights: tuple[Rational, ...]

    def __init__(self, weights: Iterable[RationalLike]):
        object.__setattr__(self, "weights", _rat_tuple(weights))
        if any(w < 0 for w in self.weights):
            raise PriorNotOnSimplex(f"negative belief weight in {self}")
        if sum(self.weights, ZERO) != ONE:
            raise PriorNotOnSimplex(f"belief weights sum to {sum(self.weights, ZERO)}, not 1")

    def __len__(self) -> int:
        return len(self.weights)

    def __getitem__(self, i: int) -> Rational:
        return self.weights[i]

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, w in enumerate(self.weights) if w > 0)

    def is_degenerate_on(self, i: int) -> bool:
        return self.weights[i] == ONE

    @staticmethod
    def degenerate(n: int, i: int) -> "Belief":
        return Belief([ONE if j == i else ZERO for j in range(n)])

    @staticmethod
    def uniform(n: int) -> "Belief":
        return Belief([rat(1, n)] * n)

    def __str__(self) -> str:
        return "(" + ", ".join(format_fraction(w) for w in self.weights) + ")"


@dataclass(frozen=True)
class SubjectivePrior:
    """A reweighting of types: a simplex point, or any affine combination.

    The ``affine`` domain allows negative weights; only the sum-to-one
    normalization is kept.  Mediation without burning minimizes over affine
    reweightings, the money-burning protocol over simplex ones.
    """

    weights: tuple[Rational, ...]
    domain: str = "simplex"

    def __init__(self, weights: Iterable[RationalLike], domain: str = "simplex"):
        object.__setattr__(self, "weights", _rat_tuple(weights))
        object.__setattr__(self, "domain", domain)
        if domain not in ("simplex", "affine"):
            raise ValueError(f"unknown prior domain {domain!r}")
        if sum(self.weights, ZERO) != ONE:
            raise ValueError("subjective prior weights must sum to 1")
        if domain == "simplex" and any(w < 0 for w in self.weights):
            raise ValueError("simplex-domain subjective prior must be nonnegative")

    def __len__(self) -> int:
        return len(self.weights)

    def __getitem__(self, i: int) -> Rational:
        return self.weights[i]

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, w in enumerate(self.weights) if w != 0)

    @staticmethod
    def degenerate(n: int, i: int) -> "SubjectivePrior":
        return SubjectivePrior([ONE if j == i else ZERO for j in range(n)])

    @staticmethod
    def from_belief(belief: Belief) -> "SubjectivePrior":
        return SubjectivePrior(belief.weights)

    def __str__(self) -> str:
        return "(" + ", ".join(format_fraction(w) for w in self.weights) + ")"


@dataclass(frozen=True)
class PosteriorDistribution:
    """Finitely supported distribution over posterior beliefs.

    This is a signaling scheme in unconditional form: atom ``(belief, weight)``
    says the receiver ends at ``belief`` with total probability ``weight``.
    """

    atoms: tuple[tuple[Belief, Rational], ...]

    def __init__(self, atoms: Iterable[tuple[Belief, RationalLike]]):
        packed = tuple((b, rat(w)) for b, w in atoms)
        object.__setattr__(self, "atoms", packed)
        if not packed:
            raise ValueError("posterior distribution needs at least one atom")
        if any(w <= 0 for _, w in packed):
            raise ValueError("atom weights must be positive")
        if sum((w for _, w in packed), ZERO) != ONE:
            raise ValueError("atom weights must sum to 1")
        n = len(packed[0][0])
        if any(len(b) != n for b, _ in packed):
            raise DimensionMismatch("atoms live on simplices of different dimension")

    def mean(self) -> Belief:
        n = len(self.atoms[0][0])
        totals = [ZERO] * n
        for belief, weight in self.atoms:
            for i in range(n):
                totals[i] += weight * belief[i]
        return Belief(totals)

    def is_bayes_plausible(self, prior: Belief) -> bool:
        return self.mean() == prior

    def merged(self) -> "PosteriorDistribution":
        """Combine atoms that share a belief."""
        grouped: dict[tuple[Rational, ...], Rational] = {}
        order: list[tuple[Rational, ...]] = []
        for belief, weight in self.atoms:
            key = belief.weights
            if key not in grouped:
                grouped[key] = ZERO
                order.append(key)
            grouped[key] += weight
        return PosteriorDistribution((Belief(k), grouped[k]) for k in order)

    def __str__(self) -> str:
        return ", ".join(f"{b} w.p. {format_fraction(w)}" for b, w in self.atoms)


@dataclass(frozen=True)
class PersuasionGame:
    """Validated game: types, actions, receiver payoffs u(a, t), sender values v(a)."""

    types: tuple[str, ...]
    actions: tuple[str, ...]
    u: tuple[tuple[Rational, ...], ...]  # indexed action x type
    v: tuple[Rational, ...]  # indexed by action
    prior: Belief

    @property
    def n_types(self) -> int:
        return len(self.types)

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    def expected_u(self, action: int, belief: Belief) -> Rational:
        row = self.u[action]
        return sum((belief[t] * row[t] for t in range(self.n_types)), ZERO)

    def with_prior(self, prior: Belief) -> "PersuasionGame":
        if len(prior) != self.n_types:
            raise DimensionMismatch("prior length does not match type count")
        return PersuasionGame(self.types, self.actions, self.u, self.v, prior)


def validate_game(
    types: Sequence[str],
    actions: Sequence[str],
    u: Sequence[Sequence[RationalLike]],
    v: Sequence[RationalLike],
    prior: Sequence[RationalLike] | Belief,
) -> PersuasionGame:
    """Check dimensions and the prior, returning an immutable game.

    ``u`` is row-major action x type.  ``v`` has one entry per action: the
    sender's value cannot depend on the type.
    """
    if len(types) == 0 or len(actions) == 0:
        raise EmptyTypeOrActionSet("need at least one type and one action")
    if len(set(types)) != len(types) or len(set(actions)) != len(actions):
        raise GameValidationError("type and action labels must be distinct")
    if len(u) != len(actions):
        raise DimensionMismatch(f"u has {len(u)} rows for {len(actions)} actions")
    rows = []
    for a, row in enumerate(u):
        if len(row) != len(types):
            raise DimensionMismatch(f"u row {a} has {len(row)} entries for {len(types)} types")
        rows.append(_rat_tuple(row))
    if len(v) != len(actions):
        raise DimensionMismatch(f"v has {len(v)} entries for {len(actions)} actions")
    if not isinstance(prior, Belief):
        if len(prior) != len(types):
            raise PriorNotOnSimplex(f"prior has {len(prior)} entries for {len(types)} types")
        prior = Belief(prior)
    elif len(prior) != len(types):
        raise PriorNotOnSimplex(f"prior has {len(prior)} entries for {len(types)} types")
    return PersuasionGame(tuple(types), tuple(actions), tuple(rows), _rat_tuple(v), prior)


def restrict_to_support(game: PersuasionGame) -> PersuasionGame:
    """Drop zero-prior types.  Solver entry points call this first.

    The removed types carry no mass, so the prior needs no renormalization.
    Idempotent; returns the same game object when the prior has full support.
    """
    keep = game.prior.support()
    if not keep:
        raise AllTypesNull("prior assigns zero to every type")
    if len(keep) == game.n_types:
        return game
    types = tuple(game.types[t] for t in keep)
    u = tuple(tuple(row[t] for t in keep) for row in game.u)
    prior = Belief([game.prior[t] for t in keep])
    return PersuasionGame(types, game.actions, u, game.v, prior)
