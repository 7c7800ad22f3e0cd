import time
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import mpmath as mp
from ortools.sat.python import cp_model

from utils.quadfield import FieldContext

TIMEOUT_SECONDS = 600


@dataclass
class RootSearchStats:
    status: int
    assignments: List[Tuple[int, ...]]
    duration: float
    num_classes: int
    solved: bool


class AssignmentCollector(cp_model.CpSolverSolutionCallback):
    """ Collecte toutes les affectations rencontrées pendant l'énumération. """

    def __init__(self, variables):
        cp_model.CpSolverSolutionCallback.__init__(self)
        self._variables = variables
        self.assignments: List[Tuple[int, ...]] = []

    def on_solution_callback(self):
        self.assignments.append(tuple(self.Value(v) for v in self._variables))


class DeltaRootSolver:
    """
    Énumère les choix de racines 12-ièmes de Δ(O)/Δ(rep_i) compatibles avec
    δ(O_K) = 1 et la conjugaison complexe δ(rep̄_i) = conj δ(rep_i).
    """

    def __init__(self, ctx: FieldContext, roots: Sequence[Sequence[mp.mpc]], tol):
        self.ctx = ctx
        self.roots = roots
        self.tol = tol
        self.model = cp_model.CpModel()
        self.solver = cp_model.CpSolver()
        self.choice = []
        self.setup_solver()

    def setup_solver(self):
        """
        Configure les paramètres du solveur :
        - Temps limite.
        - Désactivation des journaux de progression.
        - Un seul thread, condition de l'énumération exhaustive.
        """
        self.solver.parameters.max_time_in_seconds = TIMEOUT_SECONDS
        self.solver.parameters.log_search_progress = False
        self.solver.parameters.num_search_workers = 1
        self.solver.parameters.enumerate_all_solutions = True

    def create_variables(self):
        """ Une variable par classe : l'indice r de la racine ζ_12^r·z^{1/12}. """
        self.choice = [self.model.NewIntVar(0, 11, f'root_{i}') for i in range(self.ctx.h)]

    def _close(self, a, b) -> bool:
        return mp.fabs(a - b) < self.tol * max(mp.mpf(1), mp.fabs(a))

    def add_constraints(self):
        """
        Ajoute les contraintes au modèle :
        - δ(O_K) = 1 sur la classe triviale.
        - Couples (i, ī) : la racine de rep̄_i est la conjuguée de celle de rep_i.
        """
        unit = [(r,) for r in range(12) if self._close(self.roots[0][r], mp.mpc(1))]
        self.model.AddAllowedAssignments([self.choice[0]], unit)
        conj_index: Dict[int, int] = {}
        for i, rep in enumerate(self.ctx.class_reps):
            conj_index[i] = self.ctx.class_of(rep.conjugate())
        seen = set()
        for i in range(1, self.ctx.h):
            j = conj_index[i]
            if (j, i) in seen:
                continue
            seen.add((i, j))
            pairs = [(a, b) for a in range(12) for b in range(12)
                     if self._close(self.roots[i][a], mp.conj(self.roots[j][b]))]
            self.model.AddAllowedAssignments([self.choice[i], self.choice[j]], pairs)

    def solve(self) -> RootSearchStats:
        self.create_variables()
        self.add_constraints()
        collector = AssignmentCollector(self.choice)

        start_time = time.time()
        status = self.solver.Solve(self.model, collector)
        duration = time.time() - start_time

        solved = status in (cp_model.OPTIMAL, cp_model.FEASIBLE) and (duration <= TIMEOUT_SECONDS)
        return RootSearchStats(
            status=status,
            assignments=sorted(collector.assignments),
            duration=duration,
            num_classes=self.ctx.h,
            solved=solved
        )


STATUS_NAMES = {
    cp_model.OPTIMAL: "OPTIMAL",
    cp_model.FEASIBLE: "FEASIBLE",
    cp_model.INFEASIBLE: "INFEASIBLE",
    cp_model.MODEL_INVALID: "MODEL_INVALID",
}
