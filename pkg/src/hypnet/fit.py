"""Star-planarity fitting: turn a quad mesh into a net with planar stars.

The functional is a sum over every vertex star (the vertex plus its
neighbors) of the squared volumes of all tetrahedra spanned by
4-subsets of the star.  It is smooth, non-negative, vanishes exactly on
nets with planar stars, is rigid-motion invariant, and scales as the
sixth power of a uniform scale factor.  Squared (rather than unsigned)
volumes keep the functional differentiable at its zero set.

Minimization uses a limited-memory quasi-Newton method with pinned
vertices eliminated from the variable set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import minimize

from .errors import DidNotConverge
from .quadgraph import QuadGraph

DEFAULT_MAX_ITER = 5000
GRAD_TOL_FACTOR = 1e-10


@dataclass
class FitProblem:
    """Mesh, start positions, pinned vertex set, and tetrahedron weights.

    ``weights`` is aligned with :attr:`tetrahedra` (one entry per
    enumerated 4-subset, default all ones).  Pinned vertices keep their
    initial coordinates exactly.
    """

    graph: QuadGraph
    initial_positions: np.ndarray
    pinned: frozenset = frozenset()
    weights: np.ndarray | None = None
    tetrahedra: np.ndarray = field(init=False)

    def __post_init__(self):
        self.initial_positions = np.array(
            self.initial_positions, dtype=float
        )
        self.pinned = frozenset(int(v) for v in self.pinned)
        tets = []
        for v in range(len(self.initial_positions)):
            if not self.graph.is_referenced(v):
                continue
            neighbors, _ = self.graph.vertex_star(v)
            star = sorted([v] + neighbors)
            tets.extend(combinations(star, 4))
        self.tetrahedra = (
            np.array(tets, dtype=int) if tets else np.zeros((0, 4), dtype=int)
        )
        if self.weights is None:
            self.weights = np.ones(len(self.tetrahedra))
        else:
            self.weights = np.asarray(self.weights, dtype=float)
            if self.weights.shape != (len(self.tetrahedra),):
                raise ValueError(
                    f"weights must have one entry per tetrahedron "
                    f"({len(self.tetrahedra)}), got {self.weights.shape}"
                )

    @property
    def free_vertices(self):
        return [
            v
            for v in range(len(self.initial_positions))
            if v not in self.pinned
        ]


def _edge_vectors(problem: FitProblem, positions):
    t = problem.tetrahedra
    p = positions
    d1 = p[t[:, 1]] - p[t[:, 0]]
    d2 = p[t[:, 2]] - p[t[:, 0]]
    d3 = p[t[:, 3]] - p[t[:, 0]]
    return d1, d2, d3


def energy(problem: FitProblem, positions) -> float:
    """Sum of weighted squared tetrahedron volumes over all stars."""
    positions = np.asarray(positions, dtype=float)
    if len(problem.tetrahedra) == 0:
        return 0.0
    d1, d2, d3 = _edge_vectors(problem, positions)
    dets = np.einsum("ij,ij->i", d1, np.cross(d2, d3))
    return float(np.sum(problem.weights * dets**2) / 36.0)


def gradient(problem: FitProblem, positions) -> np.ndarray:
    """Analytic gradient of :func:`energy`; rows of pinned vertices are zero."""
    positions = np.asarray(positions, dtype=float)
    grad = np.zeros_like(positions)
    if len(problem.tetrahedra) == 0:
        return grad
    t = problem.tetrahedra
    d1, d2, d3 = _edge_vectors(problem, positions)
    c23 = np.cross(d2, d3)
    dets = np.einsum("ij,ij->i", d1, c23)
    coeff = (problem.weights * dets / 18.0)[:, None]
    g1 = c23
    g2 = np.cross(d3, d1)
    g3 = np.cross(d1, d2)
    np.add.at(grad, t[:, 1], coeff * g1)
    np.add.at(grad, t[:, 2], coeff * g2)
    np.add.at(grad, t[:, 3], coeff * g3)
    np.add.at(grad, t[:, 0], -coeff * (g1 + g2 + g3))
    if problem.pinned:
        grad[sorted(problem.pinned)] = 0.0
    return grad


def fit(
    problem: FitProblem,
    max_iter: int = DEFAULT_MAX_ITER,
    tol_g: float | None = None,
):
    """Minimize the star-planarity functional.

    Returns ``(positions, report)``.  The gradient tolerance defaults to
    ``1e-10`` times the initial gradient's max-norm.  Raises
    :class:`DidNotConverge` (carrying ``(positions, report)`` in its
    ``result``) when the budget is exhausted first.
    """
    x_full = problem.initial_positions.copy()
    free = problem.free_vertices
    g0 = gradient(problem, x_full)
    g0_norm = float(np.max(np.abs(g0))) if g0.size else 0.0
    tol = tol_g if tol_g is not None else GRAD_TOL_FACTOR * g0_norm

    def make_report(iterations, final_positions, history, message,
                    stopping):
        g = gradient(problem, final_positions)
        g_norm = float(np.max(np.abs(g))) if g.size else 0.0
        return {
            "iterations": int(iterations),
            "energy": energy(problem, final_positions),
            "grad_norm": g_norm,
            "tolerance": float(tol),
            "converged": bool(g_norm <= tol or stopping == "progress_floor"),
            "stopping": stopping,
            "energy_history": history,
            "message": message,
        }

    if not free or g0_norm == 0.0:
        report = make_report(0, x_full, [energy(problem, x_full)],
                             "initial point already stationary"
                             if free else "all vertices pinned",
                             "gradient")
        report["converged"] = True
        return x_full, report

    free_arr = np.array(free, dtype=int)

    def unpack(x):
        full = problem.initial_positions.copy()
        full[free_arr] = x.reshape(-1, 3)
        return full

    history = []

    def objective(x):
        full = unpack(x)
        e = energy(problem, full)
        g = gradient(problem, full)
        return e, g[free_arr].ravel()

    def on_iterate(xk):
        history.append(energy(problem, unpack(xk)))

    x0 = x_full[free_arr].ravel()
    history.append(energy(problem, x_full))
    res = minimize(
        objective,
        x0,
        jac=True,
        method="L-BFGS-B",
        callback=on_iterate,
        options={"maxiter": max_iter, "ftol": 1e-22, "gtol": tol,
                 "maxcor": 20},
    )
    final = unpack(res.x)
    # status 0: a convergence test of the method fired (gradient small or
    # no float-representable decrease left); 1: budget; 2: line search
    # could not make progress.
    stopping = {0: "progress_floor", 1: "budget", 2: "line_search"}.get(
        res.status, "unknown"
    )
    report = make_report(res.nit, final, history, str(res.message), stopping)
    if report["grad_norm"] <= tol:
        report["stopping"] = "gradient"
        report["converged"] = True
    if not report["converged"]:
        raise DidNotConverge(
            f"stopped on {report['stopping']} with gradient norm "
            f"{report['grad_norm']:.3e} above tolerance {tol:.3e} "
            f"after {res.nit} iterations",
            result=(final, report),
        )
    return final, report
