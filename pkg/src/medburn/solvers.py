"""Protocol values and certificates.

Five sender-optimal values for one game: cheap talk (quasi-concave envelope),
mediation (worst affine reweighting), mediation with budget-capped burning,
mediation with unlimited burning (worst simplex reweighting), and full
commitment (plain concavification).  The burning protocols also return a
saddle certificate: the worst reweighting, an optimal posterior decomposition,
and per-type directional payoffs witnessing optimality.

Every operation also exists at the structure level, so abstract value
structures given directly as pieces run through the identical pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .core import (
    PersuasionGame,
    PosteriorDistribution,
    SubjectivePrior,
    restrict_to_support,
)
from .envelopes import (
    MAX_ONLY,
    TWO_BRANCH,
    EnvelopeResult,
    WeightedEnvelopeQuery,
    concavify_weighted,
    evaluate_subjective,
    quasiconcavify,
    worst_prior_envelope,
)
from .geometry import PiecewiseValueStructure, compile_pieces, value_interval
from .lp import EQ, FREE, GE, LinearProgram, OPTIMAL, solve
from .rational import ONE, ZERO, Rational, RationalLike, rat


class InadmissibleValue(ValueError):
    pass


class NotBinary(ValueError):
    pass


@dataclass(frozen=True)
class SaddleCertificate:
    lambda_star: SubjectivePrior
    p_star: PosteriorDistribution
    value: Rational
    per_type_payoffs: tuple[Rational, ...]


def _structure_of(game: PersuasionGame) -> PiecewiseValueStructure:
    return compile_pieces(restrict_to_support(game))


def max_selection(game: PersuasionGame, p: PosteriorDistribution) -> tuple[Rational, ...]:
    """The best achievable sender value at each atom."""
    game = restrict_to_support(game)
    return tuple(value_interval(game, belief)[1] for belief, _ in p.atoms)


def interim_payoffs(
    game: PersuasionGame,
    p: PosteriorDistribution,
    values: Sequence[RationalLike],
) -> tuple[Rational, ...]:
    """Per-type expected payoff shares of a signaling scheme.

    Type t receives sum over atoms of weight * belief(t)/prior(t) * value.
    Each selected value must be achievable at its atom.
    """
    game = restrict_to_support(game)
    if len(values) != len(p.atoms):
        raise ValueError("one value per atom required")
    if any(len(belief) != game.n_types for belief, _ in p.atoms):
        raise ValueError("atom beliefs do not match the supported type count")
    vals = [rat(v) for v in values]
    for (belief, _), v in zip(p.atoms, vals):
        lo, hi = value_interval(game, belief)
        if not (lo <= v <= hi):
            raise InadmissibleValue(
                f"value {v} outside achievable interval [{lo}, {hi}] at {belief}"
            )
    return _payoff_shares(game.prior, p, vals)


def _payoff_shares(prior, p: PosteriorDistribution, vals) -> tuple[Rational, ...]:
    if not p.is_bayes_plausible(prior):
        raise ValueError("posterior distribution does not average to the prior")
    out = []
    for t in range(len(prior)):
        total = ZERO
        for (belief, weight), v in zip(p.atoms, vals):
            if belief[t] != 0:
                total += weight * belief[t] / prior[t] * v
        out.append(total)
    return tuple(out)


# -- structure-level values --------------------------------------------------


def value_bp_structure(structure: PiecewiseValueStructure) -> Rational:
    query = WeightedEnvelopeQuery(
        structure, SubjectivePrior.from_belief(structure.prior), None, MAX_ONLY
    )
    return concavify_weighted(query).value


def value_ct_structure(structure: PiecewiseValueStructure) -> Rational:
    return quasiconcavify(structure)


def _certificate(
    structure: PiecewiseValueStructure,
    value: Rational,
    lam: SubjectivePrior,
    envelope: EnvelopeResult,
) -> SaddleCertificate:
    p_star = envelope.posterior()
    vals = [structure.interval_at(belief)[1] for belief, _ in p_star.atoms]
    payoffs = _payoff_shares(structure.prior, p_star, vals)
    return SaddleCertificate(lam, p_star, value, payoffs)


def value_mdmb_structure(
    structure: PiecewiseValueStructure,
) -> tuple[Rational, SaddleCertificate]:
    result = worst_prior_envelope(structure, None, "simplex")
    cert = _certificate(structure, result.value, result.lam, result.envelope)
    assert min(cert.per_type_payoffs) == result.value, (
        "optimal scheme's worst type payoff must equal the protocol value"
    )
    return result.value, cert


def value_mdmb_budget_structure(
    structure: PiecewiseValueStructure, budget: RationalLike
) -> tuple[Rational, SaddleCertificate]:
    cap = rat(budget)
    if cap < 0:
        raise ValueError("budget must be nonnegative")
    result = worst_prior_envelope(structure, cap, "affine")
    return result.value, _certificate(structure, result.value, result.lam, result.envelope)


# -- game-level values -------------------------------------------------------


def value_bp(game: PersuasionGame) -> Rational:
    """Full-commitment value: concavification at the prior."""
    return value_bp_structure(_structure_of(game))


def value_ct(game: PersuasionGame) -> Rational:
    """Cheap-talk value: quasi-concave envelope at the prior."""
    return value_ct_structure(_structure_of(game))


def value_mdmb(game: PersuasionGame) -> tuple[Rational, SaddleCertificate]:
    """Value of mediation with unlimited money burning, with its saddle.

    Equals both the max over schemes of the minimum per-type payoff and the
    min over simplex reweightings of the concavified reweighted value; the
    certificate carries a maximizer of the former and a minimizer of the
    latter, which together form a saddle point.
    """
    return value_mdmb_structure(_structure_of(game))


def value_mdmb_budget(
    game: PersuasionGame, budget: RationalLike
) -> tuple[Rational, SaddleCertificate]:
    """Value of mediation with burning capped at ``budget`` per message."""
    return value_mdmb_budget_structure(_structure_of(game), budget)


def value_md(game: PersuasionGame) -> Rational:
    """Value of mediation without burning: the zero-budget cap."""
    return value_mdmb_budget(game, 0)[0]


def value_mdmb_binary(game: PersuasionGame) -> Rational:
    """Two-type shortcut: the worst reweighting sits at a vertex."""
    structure = _structure_of(game)
    if structure.dim != 2:
        raise NotBinary(f"{structure.dim} supported types; shortcut needs exactly 2")
    return min(
        concavify_weighted(
            WeightedEnvelopeQuery(structure, SubjectivePrior.degenerate(2, t), None, MAX_ONLY)
        ).value
        for t in range(2)
    )


# -- saddle verification -----------------------------------------------------


@dataclass(frozen=True)
class SaddleDiagnostics:
    ok: bool
    first_violation: str | None
    payoff_at_saddle: Rational | None = None


def _mixture_payoff(
    structure: PiecewiseValueStructure,
    lam: SubjectivePrior,
    budget: Rational | None,
    p: PosteriorDistribution,
) -> Rational:
    return sum(
        (w * evaluate_subjective(structure, lam, budget, belief) for belief, w in p.atoms),
        ZERO,
    )


def _min_affine_payoff(
    structure: PiecewiseValueStructure, budget: Rational, p: PosteriorDistribution
) -> Rational:
    """min over affine reweightings of the budgeted mixture payoff (small LP)."""
    n = structure.dim
    prior = structure.prior
    atoms = list(p.atoms)
    # variables: lam_0..lam_{n-1} free, then one epigraph variable per atom
    s0 = n
    cons: list[tuple[dict, str, RationalLike]] = [({t: 1 for t in range(n)}, EQ, 1)]
    objective: dict[int, Rational] = {}
    for i, (belief, weight) in enumerate(atoms):
        lo, hi = structure.interval_at(belief)
        shares = {t: belief[t] / prior[t] for t in range(n) if belief[t] != 0}
        for coeff in (hi, lo - budget):
            row: dict[int, Rational] = {s0 + i: ONE}
            for t, share in shares.items():
                if coeff != 0:
                    row[t] = -share * coeff
            cons.append((row, GE, 0))
        objective[s0 + i] = weight
    variables = [(f"l{t}", FREE) for t in range(n)] + [
        (f"s{i}", FREE) for i in range(len(atoms))
    ]
    sol = solve(LinearProgram("min", variables, objective, cons))
    assert sol.status == OPTIMAL, "affine best-response LP must be solvable"
    return sol.value


def verify_saddle_structure(
    structure: PiecewiseValueStructure,
    cert: SaddleCertificate,
    budget: RationalLike | None = None,
    type_labels: Sequence[str] | None = None,
) -> SaddleDiagnostics:
    labels = type_labels or [str(t) for t in range(structure.dim)]
    cap = None if budget is None else rat(budget)
    if cap is None and cert.lambda_star.domain != "simplex":
        return SaddleDiagnostics(
            False, "unlimited-budget certificate needs a simplex reweighting"
        )
    if not cert.p_star.is_bayes_plausible(structure.prior):
        return SaddleDiagnostics(False, "scheme is not Bayes-plausible at the prior")

    at_saddle = _mixture_payoff(structure, cert.lambda_star, cap, cert.p_star)
    mode = MAX_ONLY if cap is None else TWO_BRANCH
    cav = concavify_weighted(
        WeightedEnvelopeQuery(structure, cert.lambda_star, cap, mode)
    ).value
    if at_saddle != cav:
        return SaddleDiagnostics(
            False,
            f"mixture payoff {at_saddle} differs from concavified value {cav}",
            at_saddle,
        )

    if cap is None:
        directional = [
            _mixture_payoff(
                structure, SubjectivePrior.degenerate(structure.dim, t), None, cert.p_star
            )
            for t in range(structure.dim)
        ]
        support = set(cert.lambda_star.support())
        for t, d in enumerate(directional):
            if t in support and d != cert.value:
                return SaddleDiagnostics(
                    False,
                    f"supported type {labels[t]} has directional payoff {d} != value {cert.value}",
                    at_saddle,
                )
            if t not in support and d < cert.value:
                return SaddleDiagnostics(
                    False,
                    f"unsupported type {labels[t]} has directional payoff {d} < value {cert.value}",
                    at_saddle,
                )
    else:
        best_response = _min_affine_payoff(structure, cap, cert.p_star)
        if best_response != cert.value:
            return SaddleDiagnostics(
                False,
                f"affine best response {best_response} differs from value {cert.value}",
                at_saddle,
            )
    if at_saddle != cert.value:
        return SaddleDiagnostics(
            False,
            f"mixture payoff {at_saddle} differs from stated value {cert.value}",
            at_saddle,
        )
    return SaddleDiagnostics(True, None, at_saddle)


def verify_saddle(
    game: PersuasionGame,
    cert: SaddleCertificate,
    budget: RationalLike | None = None,
) -> SaddleDiagnostics:
    """Exact saddle-point audit of a certificate.

    Simplex mode (``budget`` None): the mixture payoff at the certificate pair
    must equal the concavified value at its reweighting; every supported type's
    directional payoff must equal the value; every unsupported type's must not
    fall below it.  Budget mode replaces the per-type conditions with the
    affine best-response check, since burning makes supported directional
    payoffs exceed the net value by the amount burned.
    """
    restricted = restrict_to_support(game)
    return verify_saddle_structure(
        compile_pieces(restricted), cert, budget, restricted.types
    )


# -- the full comparison -----------------------------------------------------


@dataclass(frozen=True)
class ProtocolReport:
    ct: Rational
    md: Rational
    budgeted: tuple[tuple[Rational, Rational], ...]  # (budget, value), ascending
    mdmb: Rational
    bp: Rational
    certificate: SaddleCertificate

    def chain(self) -> tuple[Rational, ...]:
        return (self.ct, self.md) + tuple(v for _, v in self.budgeted) + (self.mdmb, self.bp)


def protocol_report_structure(
    structure: PiecewiseValueStructure, budgets: Sequence[RationalLike] = ()
) -> ProtocolReport:
    caps = sorted(rat(c) for c in budgets)
    ct = value_ct_structure(structure)
    md, _ = value_mdmb_budget_structure(structure, 0)
    budgeted = tuple((c, value_mdmb_budget_structure(structure, c)[0]) for c in caps)
    mdmb, cert = value_mdmb_structure(structure)
    bp = value_bp_structure(structure)
    report = ProtocolReport(ct, md, budgeted, mdmb, bp, cert)
    values = report.chain()
    for lo, hi in zip(values, values[1:]):
        assert lo <= hi, f"protocol ordering violated: {lo} > {hi}"
    return report


def protocol_report(
    game: PersuasionGame, budgets: Sequence[RationalLike] = ()
) -> ProtocolReport:
    """All five protocol values, with the value chain asserted before return."""
    return protocol_report_structure(_structure_of(game), budgets)
