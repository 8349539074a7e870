"""Quasi-Newton (BFGS) ascent with Armijo backtracking.

Used by the GRAPE field search, which needs a target-value stop and an
explicit stagnation flag. Deterministic: identical inputs produce identical
iterates. The recorded objective trace contains accepted iterates only and is
therefore non-decreasing by construction.

Stop reasons:
  "gtol"        gradient infinity-norm below tolerance
  "target"      objective reached ``target_value``
  "stagnation"  total relative gain over the last ``stag_window`` accepted
                steps below ``stag_window * stag_tol``
  "linesearch"  no ascent step above ``min_step`` improves the objective
  "maxiter"     iteration budget exhausted while still improving
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

ValueAndGrad = Callable[[np.ndarray], tuple[float, np.ndarray]]

CONVERGED_REASONS = ("gtol", "target", "stagnation", "linesearch")


@dataclass
class AscentResult:
    x: np.ndarray
    value: float
    gradient_norm: float
    iterations: int
    reason: str
    trace: list[float] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.reason in CONVERGED_REASONS


def maximize(
    fun_and_grad: ValueAndGrad,
    x0: np.ndarray,
    *,
    value_fun: Callable[[np.ndarray], float] | None = None,
    grad_tol: float = 1e-8,
    max_iter: int = 5000,
    stag_tol: float = 1e-12,
    stag_window: int = 50,
    target_value: float | None = None,
    armijo_c: float = 1e-4,
    backtrack: float = 0.5,
    min_step: float = 1e-20,
    record_trace: bool = True,
) -> AscentResult:
    """``value_fun``, when given, is a cheaper objective-only evaluation used
    inside the backtracking search; the gradient is computed once per
    accepted step."""
    x = np.array(x0, dtype=float, copy=True)
    f, g = fun_and_grad(x)
    if not np.isfinite(f) or not np.all(np.isfinite(g)):
        raise FloatingPointError("objective or gradient not finite at the initial point")
    n = x.size
    hinv = np.eye(n)
    trace = [f] if record_trace else []
    f_mark = f  # objective at the start of the current stagnation window
    reason = "maxiter"
    it = 0

    for it in range(1, max_iter + 1):
        if target_value is not None and f >= target_value:
            reason = "target"
            it -= 1
            break
        gnorm = float(np.max(np.abs(g))) if n else 0.0
        if gnorm < grad_tol:
            reason = "gtol"
            it -= 1
            break

        d = hinv @ g
        slope = float(g @ d)
        if slope <= 0.0:  # curvature information unusable; restart from steepest ascent
            hinv = np.eye(n)
            d = g.copy()
            slope = float(g @ g)

        step = 1.0
        accepted = False
        while step >= min_step:
            x_try = x + step * d
            if value_fun is not None:
                f_try = value_fun(x_try)
                if np.isfinite(f_try) and f_try >= f + armijo_c * step * slope:
                    _, g_new = fun_and_grad(x_try)
                    x_new, f_new = x_try, f_try
                    accepted = True
                    break
            else:
                f_try, g_try = fun_and_grad(x_try)
                if np.isfinite(f_try) and f_try >= f + armijo_c * step * slope:
                    x_new, f_new, g_new = x_try, f_try, g_try
                    accepted = True
                    break
            step *= backtrack
        if not accepted:
            reason = "linesearch"
            it -= 1
            break

        s = x_new - x
        y = g_new - g
        sy = float(s @ y)  # ascent: y·s < 0 near a concave maximum
        if -sy > 1e-10 * np.linalg.norm(s) * np.linalg.norm(y):
            rho = 1.0 / (-sy)
            hs = hinv @ (-y)
            # inverse BFGS update for the minimization of -f
            hinv += (np.outer(s, s) * (rho * rho * float((-y) @ hs) + rho)
                     - rho * (np.outer(hs, s) + np.outer(s, hs)))

        x, f, g = x_new, f_new, g_new
        if record_trace:
            trace.append(f)
        if it % stag_window == 0:
            if f - f_mark <= stag_window * stag_tol * max(1.0, abs(f)):
                reason = "stagnation"
                break
            f_mark = f
    else:
        it = max_iter

    if target_value is not None and f >= target_value and reason == "maxiter":
        reason = "target"
    return AscentResult(x=x, value=f, gradient_norm=float(np.max(np.abs(g))) if n else 0.0,
                        iterations=it, reason=reason, trace=trace)
