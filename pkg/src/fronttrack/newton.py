"""Damped Newton iteration for small dense systems."""

import numpy as np

from .errors import ConvergenceError

RES_TOL = 1e-12
STEP_TOL = 1e-14
FD_STEP = 1e-7
MAX_ITER = 50


def fd_jacobian(fn, x, f0=None, step=FD_STEP):
    if f0 is None:
        f0 = fn(x)
    m, n = len(f0), len(x)
    J = np.empty((m, n))
    for k in range(n):
        xk = x.copy()
        xk[k] += step
        J[:, k] = (fn(xk) - f0) / step
    return J


def newton_solve(fn, x0, jac=None, res_tol=RES_TOL, step_tol=STEP_TOL,
                 max_iter=MAX_ITER, fd_step=FD_STEP, context=""):
    """Solve fn(x) = 0 with damped (backtracking) Newton.

    Converges when the residual max-norm drops below ``res_tol`` or the
    Newton step below ``step_tol``; raises ConvergenceError otherwise.
    """
    x = np.asarray(x0, dtype=float).copy()
    f = np.asarray(fn(x), dtype=float)
    best = float(np.max(np.abs(f)))
    for _ in range(max_iter):
        if best < res_tol:
            return x
        J = jac(x) if jac is not None else fd_jacobian(fn, x, f0=f, step=fd_step)
        try:
            dx = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"singular Newton system {context}") from exc
        if float(np.max(np.abs(dx))) < step_tol:
            return x
        t = 1.0
        for _ in range(40):
            x_try = x + t * dx
            try:
                f_try = np.asarray(fn(x_try), dtype=float)
                r_try = float(np.max(np.abs(f_try)))
            except Exception:
                r_try = np.inf
            if np.isfinite(r_try) and r_try < best:
                x, f, best = x_try, f_try, r_try
                break
            t *= 0.5
        else:
            raise ConvergenceError(
                f"Newton line search stalled {context} (residual {best:.3e})")
    if best < res_tol:
        return x
    raise ConvergenceError(
        f"Newton did not converge {context} (residual {best:.3e})")
