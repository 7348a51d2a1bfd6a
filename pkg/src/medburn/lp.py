"""Exact linear programming over rationals with certified answers.

Two-phase tableau simplex with Bland's anti-cycling rule.  Every arithmetic
step is an exact rational operation, so an ``optimal`` answer comes with a
primal point and dual multipliers that satisfy feasibility and strong duality
exactly (checked before returning), and an ``infeasible`` answer carries a
Farkas combination of the rows.  There are no tolerances anywhere.

Scale target is desk-sized instances (up to a few hundred variables); no
attempt is made at sparse factorizations or revised-simplex bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .rational import ONE, ZERO, Rational, RationalLike, rat

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

NONNEG = "nonneg"
FREE = "free"

LE, EQ, GE = "<=", "=", ">="
_RELS = (LE, EQ, GE)


class MalformedProgram(ValueError):
    pass


SparseRow = Mapping[int, RationalLike]


def _pack_row(row: SparseRow, nvars: int, what: str) -> tuple[tuple[int, Rational], ...]:
    merged: dict[int, Rational] = {}
    for j, coeff in row.items():
        if not isinstance(j, int) or isinstance(j, bool) or j < 0 or j >= nvars:
            raise MalformedProgram(f"{what} references undeclared variable {j!r}")
        c = rat(coeff)
        if c != 0:
            merged[j] = merged.get(j, ZERO) + c
    return tuple(sorted((j, c) for j, c in merged.items() if c != 0))


@dataclass(frozen=True)
class LinearProgram:
    sense: str
    variables: tuple[tuple[str, str], ...]  # (name, "nonneg" | "free")
    objective: tuple[tuple[int, Rational], ...]
    constraints: tuple[tuple[tuple[tuple[int, Rational], ...], str, Rational], ...]

    def __init__(
        self,
        sense: str,
        variables: Sequence[tuple[str, str]],
        objective: SparseRow,
        constraints: Iterable[tuple[SparseRow, str, RationalLike]],
    ):
        if sense not in ("max", "min"):
            raise MalformedProgram(f"sense must be 'max' or 'min', got {sense!r}")
        vars_packed = tuple((str(n), s) for n, s in variables)
        for name, sign in vars_packed:
            if sign not in (NONNEG, FREE):
                raise MalformedProgram(f"variable {name!r} has unknown sign {sign!r}")
        n = len(vars_packed)
        cons = []
        for row, relation, rhs in constraints:
            if relation not in _RELS:
                raise MalformedProgram(f"unknown relation {relation!r}")
            cons.append((_pack_row(row, n, "constraint"), relation, rat(rhs)))
        object.__setattr__(self, "sense", sense)
        object.__setattr__(self, "variables", vars_packed)
        object.__setattr__(self, "objective", _pack_row(objective, n, "objective"))
        object.__setattr__(self, "constraints", tuple(cons))

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    def objective_value(self, x: Sequence[Rational]) -> Rational:
        return sum((c * x[j] for j, c in self.objective), ZERO)

    def row_value(self, i: int, x: Sequence[Rational]) -> Rational:
        row, _, _ = self.constraints[i]
        return sum((c * x[j] for j, c in row), ZERO)


@dataclass(frozen=True)
class LpSolution:
    status: str
    value: Rational | None = None
    primal: tuple[Rational, ...] | None = None
    dual: tuple[Rational, ...] | None = None
    farkas: tuple[Rational, ...] | None = None


def primal_feasible(lp: LinearProgram, x: Sequence[Rational]) -> bool:
    for name_sign, xj in zip(lp.variables, x):
        if name_sign[1] == NONNEG and xj < 0:
            return False
    for i, (_, relation, rhs) in enumerate(lp.constraints):
        lhs = lp.row_value(i, x)
        if relation == LE and lhs > rhs:
            return False
        if relation == GE and lhs < rhs:
            return False
        if relation == EQ and lhs != rhs:
            return False
    return True


def dual_feasible(lp: LinearProgram, y: Sequence[Rational]) -> bool:
    """Exact feasibility of ``y`` for the dual of ``lp`` (signs and rows)."""
    is_max = lp.sense == "max"
    for i, (_, relation, _) in enumerate(lp.constraints):
        if relation == LE and (y[i] < 0 if is_max else y[i] > 0):
            return False
        if relation == GE and (y[i] > 0 if is_max else y[i] < 0):
            return False
    combo = [ZERO] * lp.n_vars
    for i, (row, _, _) in enumerate(lp.constraints):
        yi = y[i]
        if yi != 0:
            for j, c in row:
                combo[j] += yi * c
    cost = [ZERO] * lp.n_vars
    for j, c in lp.objective:
        cost[j] = c
    for j, (_, sign) in enumerate(lp.variables):
        if sign == FREE:
            if combo[j] != cost[j]:
                return False
        elif is_max:
            if combo[j] < cost[j]:
                return False
        else:
            if combo[j] > cost[j]:
                return False
    return True


def dual_objective(lp: LinearProgram, y: Sequence[Rational]) -> Rational:
    return sum((y[i] * lp.constraints[i][2] for i in range(len(lp.constraints))), ZERO)


def farkas_valid(lp: LinearProgram, u: Sequence[Rational]) -> bool:
    """Check that ``u`` certifies infeasibility.

    Sign-compatible multipliers whose combined row no sign-feasible point can
    make positive, yet with a positive combined rhs: a contradiction witness.
    """
    for i, (_, relation, _) in enumerate(lp.constraints):
        if relation == LE and u[i] > 0:
            return False
        if relation == GE and u[i] < 0:
            return False
    combo = [ZERO] * lp.n_vars
    for i, (row, _, _) in enumerate(lp.constraints):
        if u[i] != 0:
            for j, c in row:
                combo[j] += u[i] * c
    for j, (_, sign) in enumerate(lp.variables):
        if sign == FREE and combo[j] != 0:
            return False
        if sign == NONNEG and combo[j] > 0:
            return False
    return dual_objective(lp, u) > 0


def dual_program(lp: LinearProgram) -> LinearProgram:
    """The symmetric dual; solving it reproduces the optimal value exactly.

    Nonnegative dual variables stand for the natural-sign multiplier of each
    inequality (y >= 0 on <= rows of a max program, on >= rows of a min
    program); rows of the opposite orientation enter negated.
    """
    is_max = lp.sense == "max"

    def mult(i: int) -> Rational:
        relation = lp.constraints[i][1]
        if relation == EQ:
            return ONE
        natural = LE if is_max else GE
        return ONE if relation == natural else -ONE

    dual_vars = tuple(
        (f"y{i}", FREE if relation == EQ else NONNEG)
        for i, (_, relation, _) in enumerate(lp.constraints)
    )
    objective = {i: mult(i) * lp.constraints[i][2] for i in range(len(lp.constraints))}
    cols: dict[int, dict[int, Rational]] = {j: {} for j in range(lp.n_vars)}
    for i, (row, _, _) in enumerate(lp.constraints):
        for j, c in row:
            cols[j][i] = mult(i) * c
    cost = {j: ZERO for j in range(lp.n_vars)}
    for j, c in lp.objective:
        cost[j] = c
    constraints = []
    for j, (_, sign) in enumerate(lp.variables):
        relation = EQ if sign == FREE else (GE if is_max else LE)
        constraints.append((cols[j], relation, cost[j]))
    return LinearProgram("min" if is_max else "max", dual_vars, objective, constraints)


class _Tableau:
    """Dense two-phase simplex working state."""

    def __init__(self, lp: LinearProgram):
        self.lp = lp
        # Structural columns: nonneg -> one column, free -> plus/minus pair.
        self.col_of_var: list[tuple[int, int | None]] = []
        ncols = 0
        for _, sign in lp.variables:
            if sign == NONNEG:
                self.col_of_var.append((ncols, None))
                ncols += 1
            else:
                self.col_of_var.append((ncols, ncols + 1))
                ncols += 2
        self.n_struct = ncols

        m = len(lp.constraints)
        dense_rows: list[list[Rational]] = []
        rhs: list[Rational] = []
        self.row_scale: list[Rational] = []  # multiplier that standardized row i
        kinds: list[str] = []  # "slack" (kept <=) | "tight" (>= or =, rhs >= 0)
        for row, relation, b in lp.constraints:
            a = [ZERO] * self.n_struct
            for j, c in row:
                pos, neg = self.col_of_var[j]
                a[pos] += c
                if neg is not None:
                    a[neg] -= c
            scale = ONE
            if relation == GE:
                a, b, scale, relation = [-c for c in a], -b, -scale, LE
            if relation == LE and b < 0:
                a, b, scale, relation = [-c for c in a], -b, -scale, GE
            if relation == EQ and b < 0:
                a, b, scale = [-c for c in a], -b, -scale
            dense_rows.append(a)
            rhs.append(b)
            self.row_scale.append(scale)
            kinds.append("slack" if relation == LE else "tight")

        # One slack or surplus column per original inequality, then one
        # artificial column per row that lacks an identity column.
        col = self.n_struct
        aux_of_row: list[int | None] = [None] * m
        for i, (_, relation, _) in enumerate(lp.constraints):
            if relation != EQ:
                aux_of_row[i] = col
                col += 1
        art_of_row: list[int | None] = [None] * m
        for i, kind in enumerate(kinds):
            if kind != "slack":
                art_of_row[i] = col
                col += 1
        self.ncols = col
        self.artificial_cols = {c for c in art_of_row if c is not None}

        self.rows: list[list[Rational]] = []
        self.basis: list[int] = []
        self.row_of_orig: list[int] = list(range(m))  # tableau row -> original row
        self.id_col: list[int] = [0] * m  # original row -> its identity column
        for i in range(m):
            full = dense_rows[i] + [ZERO] * (self.ncols - self.n_struct) + [rhs[i]]
            aux = aux_of_row[i]
            if aux is not None:
                full[aux] = ONE if kinds[i] == "slack" else -ONE
            art = art_of_row[i]
            if art is not None:
                full[art] = ONE
                self.basis.append(art)
                self.id_col[i] = art
            else:
                assert aux is not None
                self.basis.append(aux)
                self.id_col[i] = aux
            self.rows.append(full)
        self.objrow: list[Rational] = []

    # -- pivoting ---------------------------------------------------------

    def _pivot(self, r: int, c: int) -> None:
        row = self.rows[r]
        piv = row[c]
        if piv != ONE:
            inv = ONE / piv
            self.rows[r] = row = [v * inv for v in row]
        width = self.ncols + 1
        nonzero = [k for k in range(width) if row[k] != 0]
        for other in self.rows:
            if other is not row:
                f = other[c]
                if f != 0:
                    for k in nonzero:
                        other[k] -= f * row[k]
        f = self.objrow[c]
        if f != 0:
            for k in nonzero:
                self.objrow[k] -= f * row[k]
        self.basis[r] = c

    def _set_objective(self, cost: list[Rational]) -> None:
        self.objrow = list(cost) + [ZERO]
        for r, b in enumerate(self.basis):
            cb = self.objrow[b]
            if cb != 0:
                row = self.rows[r]
                for k in range(self.ncols + 1):
                    if row[k] != 0:
                        self.objrow[k] -= cb * row[k]

    def _iterate(self, banned: set[int]) -> str:
        """Bland's rule on a minimization tableau until optimal or unbounded."""
        while True:
            enter = -1
            for j in range(self.ncols):
                if self.objrow[j] < 0 and j not in banned:
                    enter = j
                    break
            if enter < 0:
                return OPTIMAL
            leave = -1
            best = None
            for r, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    ratio = row[self.ncols] / a
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and self.basis[r] < self.basis[leave])
                    ):
                        best = ratio
                        leave = r
            if leave < 0:
                return UNBOUNDED
            self._pivot(leave, enter)

    # -- phases -----------------------------------------------------------

    def run(self) -> LpSolution:
        lp = self.lp
        minimize = lp.sense == "min"
        cost = [ZERO] * self.ncols
        for j, c in lp.objective:
            pos, neg = self.col_of_var[j]
            cc = c if minimize else -c
            cost[pos] += cc
            if neg is not None:
                cost[neg] -= cc

        if self.artificial_cols:
            phase1 = [ONE if c in self.artificial_cols else ZERO for c in range(self.ncols)]
            self._set_objective(phase1)
            status = self._iterate(banned=set())
            assert status == OPTIMAL, "phase 1 cannot be unbounded"
            if -self.objrow[self.ncols] != 0:
                farkas = self._extract_duals(phase1_duals=True)
                assert farkas_valid(lp, farkas), "internal error: invalid Farkas certificate"
                return LpSolution(status=INFEASIBLE, farkas=tuple(farkas))
            self._purge_artificials()

        self._set_objective(cost)
        status = self._iterate(banned=self.artificial_cols)
        if status == UNBOUNDED:
            return LpSolution(status=UNBOUNDED)
        x = self._extract_primal()
        y = self._extract_duals(phase1_duals=False)
        value = lp.objective_value(x)
        assert primal_feasible(lp, x), "internal error: simplex primal infeasible"
        assert dual_feasible(lp, y), "internal error: simplex dual infeasible"
        assert dual_objective(lp, y) == value, "internal error: strong duality violated"
        return LpSolution(status=OPTIMAL, value=value, primal=tuple(x), dual=tuple(y))

    def _purge_artificials(self) -> None:
        """Drive zero-level artificials out of the basis; drop redundant rows."""
        r = 0
        while r < len(self.rows):
            if self.basis[r] in self.artificial_cols:
                row = self.rows[r]
                pivot_col = -1
                for j in range(self.ncols):
                    if j not in self.artificial_cols and row[j] != 0:
                        pivot_col = j
                        break
                if pivot_col < 0:
                    del self.rows[r]
                    del self.basis[r]
                    del self.row_of_orig[r]
                    continue
                self._pivot(r, pivot_col)
            r += 1

    def _extract_primal(self) -> list[Rational]:
        vals = [ZERO] * self.ncols
        for r, b in enumerate(self.basis):
            vals[b] = self.rows[r][self.ncols]
        x = []
        for pos, neg in self.col_of_var:
            x.append(vals[pos] - (vals[neg] if neg is not None else ZERO))
        return x

    def _extract_duals(self, phase1_duals: bool) -> list[Rational]:
        """Read y = (basis cost) . B^-1 off the identity columns.

        The identity column of row i satisfies reduced_cost = cost_col - y_i.
        Slacks cost zero in both phases; artificials cost one in phase 1.
        Multipliers for rows deleted as redundant stay zero.
        """
        m = len(self.lp.constraints)
        y = [ZERO] * m
        present = set(self.row_of_orig)
        for orig in range(m):
            if orig not in present:
                continue
            col = self.id_col[orig]
            reduced = self.objrow[col]
            col_cost = ONE if (phase1_duals and col in self.artificial_cols) else ZERO
            y[orig] = self.row_scale[orig] * (col_cost - reduced)
        if not phase1_duals and self.lp.sense == "max":
            y = [-v for v in y]
        return y


def solve(lp: LinearProgram) -> LpSolution:
    """Solve exactly; the returned certificates verify under rational arithmetic."""
    return _Tableau(lp).run()
