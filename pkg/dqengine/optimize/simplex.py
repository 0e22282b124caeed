"""Dense two-phase primal simplex with Bland's anti-cycling rule."""

import numpy as np

import log

from . import constants
from .types import Infeasible, IterationLimit, LpProblem, LpSolution, Unbounded


class Tableau:
    """Simplex tableau whose last row holds reduced costs and -objective."""

    def __init__(self, rows: np.ndarray, rhs: np.ndarray, basis: list[int]):
        self.table = np.zeros((rows.shape[0] + 1, rows.shape[1] + 1))
        self.table[:-1, :-1] = rows
        self.table[:-1, -1] = rhs
        self.basis = basis
        self.iterations = 0

    @property
    def costs(self) -> np.ndarray:
        return self.table[-1, :-1]

    @property
    def values(self) -> np.ndarray:
        return self.table[:-1, -1]

    def price(self, c: np.ndarray):
        self.table[-1, :] = 0
        self.table[-1, : c.size] = c
        for row, column in enumerate(self.basis):
            if self.table[-1, column]:
                self.table[-1, :] -= self.table[-1, column] * self.table[row, :]

    def pivot(self, row: int, column: int):
        self.table[row, :] /= self.table[row, column]
        factors = self.table[:, column].copy()
        factors[row] = 0
        self.table -= np.outer(factors, self.table[row, :])
        self.basis[row] = column
        self.iterations += 1

    def iterate(self, columns: int, tolerance: float, limit: int):
        while True:
            candidates = np.flatnonzero(self.costs[:columns] < -tolerance)
            if not candidates.size:
                return
            if self.iterations >= limit:
                raise IterationLimit(f"Simplex stopped after {self.iterations} pivots")

            entering = int(candidates[0])
            column = self.table[:-1, entering]
            rows = np.flatnonzero(column > tolerance)
            if not rows.size:
                raise Unbounded(f"Variable {entering} can grow without bound")

            ratios = self.values[rows] / column[rows]
            best = ratios.min()
            ties = rows[ratios <= best + tolerance * max(1.0, abs(best))]
            leaving = min(ties, key=lambda row: self.basis[row])
            self.pivot(int(leaving), entering)

    def drop_artificials(self, first: int, tolerance: float):
        keep = []
        for row, column in enumerate(self.basis):
            if column < first:
                keep.append(row)
                continue
            entries = np.flatnonzero(np.abs(self.table[row, :first]) > tolerance)
            if entries.size:
                self.pivot(row, int(entries[0]))
                keep.append(row)
            else:
                log.debug(f"Dropping redundant constraint row {row}")
        retained = list(range(first)) + [self.table.shape[1] - 1]
        self.table = self.table[keep + [-1]][:, retained]
        self.basis = [self.basis[row] for row in keep]


def standard_form(
    problem: LpProblem,
) -> tuple[np.ndarray, np.ndarray, list[int | None]]:
    """Equality rows with slacks, right-hand sides flipped to be nonnegative.

    Returns the rows, the right-hand side and, per row, a slack column that can
    start in the basis (or None when the row needs an artificial variable).
    """
    width, inequalities = problem.width, problem.b_ub.size
    upper = np.hstack([problem.a_ub, np.eye(inequalities)])
    equal = np.hstack([problem.a_eq, np.zeros((problem.b_eq.size, inequalities))])
    rows = np.vstack([upper, equal])
    rhs = np.concatenate([problem.b_ub, problem.b_eq])

    starts: list[int | None] = [width + index for index in range(inequalities)]
    starts += [None] * problem.b_eq.size

    negative = rhs < 0
    rows[negative] *= -1
    rhs[negative] *= -1
    for row in np.flatnonzero(negative):
        starts[row] = None

    return rows, rhs, starts


def solve_lp(
    problem: LpProblem,
    *,
    tolerance: float = constants.LP_TOLERANCE,
    max_iterations: int = constants.LP_MAX_ITERATIONS,
) -> LpSolution:
    rows, rhs, starts = standard_form(problem)
    count, columns = rows.shape
    missing = [row for row, start in enumerate(starts) if start is None]

    artificial = np.zeros((count, len(missing)))
    artificial[missing, range(len(missing))] = 1
    basis = [
        start if start is not None else columns + missing.index(row)
        for row, start in enumerate(starts)
    ]
    tableau = Tableau(np.hstack([rows, artificial]), rhs, basis)

    if missing:
        phase_one = np.concatenate([np.zeros(columns), np.ones(len(missing))])
        tableau.price(phase_one)
        tableau.iterate(columns + len(missing), tolerance, max_iterations)
        residual = -tableau.table[-1, -1]
        if residual > tolerance * max(1.0, np.abs(rhs).max()):
            raise Infeasible(f"Constraints cannot be met (residual {residual:.3g})")
        tableau.drop_artificials(columns, tolerance)

    costs = np.concatenate([problem.c, np.zeros(columns - problem.width)])
    tableau.price(costs)
    tableau.iterate(columns, tolerance, max_iterations)

    solution = np.zeros(columns)
    solution[tableau.basis] = tableau.values
    x = np.clip(solution[: problem.width], 0, None)
    log.debug(f"Simplex finished after {tableau.iterations} pivots")
    return LpSolution(x, float(problem.c @ x), tableau.iterations)
