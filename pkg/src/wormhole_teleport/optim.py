"""Derivative-free minimization under a hard budget of objective evaluations.

``cobyla`` wraps SciPy's implementation of Powell's COBYLA; ``nelder-mead``
is a self-contained downhill simplex. Both go through ``minimize``, which
records every evaluation and stops the optimizer as soon as the budget is
spent.
"""
from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

METHODS = ("cobyla", "nelder-mead")


class _BudgetExhausted(Exception):
    pass


@dataclass
class OptimResult:
    x: np.ndarray
    fun: float
    history: list[float] = field(default_factory=list)
    message: str = ""

    @property
    def n_evals(self) -> int:
        return len(self.history)

    @property
    def running_best(self) -> np.ndarray:
        return np.minimum.accumulate(np.asarray(self.history, dtype=float))


class _Recorder:
    def __init__(self, fun: Callable[[np.ndarray], float], max_evals: int, soft: bool = False):
        self.fun = fun
        self.max_evals = max_evals
        # soft: past the budget, answer with the best value instead of raising
        self.soft = soft
        self.exhausted = False
        self.history: list[float] = []
        self.best_x: np.ndarray | None = None
        self.best_f = math.inf

    def __call__(self, x) -> float:
        if len(self.history) >= self.max_evals:
            self.exhausted = True
            if self.soft:
                return self.best_f
            raise _BudgetExhausted
        x = np.array(x, dtype=float)
        f = float(self.fun(x))
        self.history.append(f)
        if f < self.best_f:
            self.best_f, self.best_x = f, x
        return f


def nelder_mead(fun, x0, *, max_evals: int, tol: float = 1e-8, initial_step: float = 0.5,
                alpha: float = 1.0, gamma: float = 2.0, rho: float = 0.5, sigma: float = 0.5) -> str:
    """Standard reflect/expand/contract/shrink simplex; returns a stop reason.

    Stops when the spread of simplex values drops below ``tol`` or when
    ``fun`` raises because the caller's budget is gone.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    simplex = np.vstack([x0] + [x0 + initial_step * e for e in np.eye(n)])
    fvals = np.array([fun(p) for p in simplex])
    for _ in range(max_evals):
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        if fvals[-1] - fvals[0] <= tol:
            return "simplex value spread below tolerance"
        centroid = simplex[:-1].mean(axis=0)
        xr = centroid + alpha * (centroid - simplex[-1])
        fr = fun(xr)
        if fvals[0] <= fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = fun(xe)
            simplex[-1], fvals[-1] = (xe, fe) if fe < fr else (xr, fr)
            continue
        if fr < fvals[-1]:
            xc = centroid + rho * (xr - centroid)
            fc = fun(xc)
            if fc <= fr:
                simplex[-1], fvals[-1] = xc, fc
                continue
        else:
            xc = centroid + rho * (simplex[-1] - centroid)
            fc = fun(xc)
            if fc < fvals[-1]:
                simplex[-1], fvals[-1] = xc, fc
                continue
        simplex[1:] = simplex[0] + sigma * (simplex[1:] - simplex[0])
        fvals[1:] = [fun(p) for p in simplex[1:]]
    return "iteration limit"


def _cobyla(fun, x0, *, max_evals: int, tol: float, initial_step: float) -> str:
    from scipy.optimize import minimize as sp_minimize

    # scipy refuses budgets below n + 2; the recorder enforces the real one.
    # Raising through the Fortran callback is noisy, hence the soft recorder.
    maxiter = max(max_evals, x0.size + 2)
    res = sp_minimize(fun, x0, method="COBYLA",
                      options={"maxiter": maxiter, "rhobeg": initial_step, "tol": tol})
    return str(res.message)


def minimize(fun: Callable[[np.ndarray], float], x0, *, method: str = "cobyla", max_evals: int = 500,
             tol: float = 1e-8, initial_step: float = 1.0) -> OptimResult:
    """Minimize ``fun`` from ``x0`` using at most ``max_evals`` evaluations."""
    if max_evals < 1:
        raise ValueError("max_evals must be >= 1")
    x0 = np.asarray(x0, dtype=float)
    rec = _Recorder(fun, max_evals, soft=method == "cobyla")
    if method == "cobyla":
        run = _cobyla
    elif method == "nelder-mead":
        run = nelder_mead
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    try:
        message = run(rec, x0, max_evals=max_evals, tol=tol, initial_step=initial_step)
    except _BudgetExhausted:
        pass
    if rec.exhausted:
        message = f"evaluation budget of {max_evals} reached"
    return OptimResult(x=rec.best_x, fun=rec.best_f, history=rec.history, message=message)
