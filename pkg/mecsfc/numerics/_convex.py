from __future__ import annotations
from dataclasses import dataclass, field
import logging
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from ..settings import register_option, get_option, is_positive, is_positive_int
from ..types import InfeasibleError

logger = logging.getLogger(__name__)

register_option(
    "numerics.convex.tol",
    1e-8,
    "Duality-gap / KKT tolerance of minimize_convex, relative to the objective scale",
    validator=is_positive,
)
register_option(
    "numerics.convex.barrier_factor",
    2.0,
    "Growth of the barrier weight between centerings (2 halves the barrier parameter)",
    validator=is_positive,
)
register_option(
    "numerics.convex.max_newton",
    100,
    "Maximum number of Newton steps per centering",
    validator=is_positive_int,
)

# value, gradient (n,), Hessian (n, n) or its diagonal (n,)
SmoothFunction = Callable[[np.ndarray], Tuple[float, np.ndarray, np.ndarray]]


@dataclass
class ConvexProgram:
    """Smooth convex program

        minimize    f(x)
        subject to  A x = b
                    g_j(x) <= 0
                    x > lower

    Parameters
    ----------
    objective : SmoothFunction
        convex f, returning value, gradient and Hessian
    x0 : np.ndarray
        strictly feasible starting point
    A, b : np.ndarray, optional
        affine equality constraints
    inequalities : Sequence[SmoothFunction]
        convex inequality constraint functions g_j
    lower : np.ndarray, optional
        variable lower bounds, -inf entries are ignored
    """

    objective: SmoothFunction
    x0: np.ndarray
    A: Optional[np.ndarray] = None
    b: Optional[np.ndarray] = None
    inequalities: Sequence[SmoothFunction] = field(default_factory=tuple)
    lower: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        self.x0 = np.asarray(self.x0, dtype=float).ravel()
        n = self.x0.size
        if self.A is None:
            self.A = np.zeros((0, n))
            self.b = np.zeros(0)
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.b = np.asarray(self.b, dtype=float).ravel()
        if self.A.shape[1] != n:
            raise ValueError(f"A has {self.A.shape[1]} columns, expected {n}")
        if self.A.shape[0] != self.b.size:
            raise ValueError(f"A has {self.A.shape[0]} rows but b has {self.b.size} entries")
        if self.lower is not None:
            self.lower = np.asarray(self.lower, dtype=float).ravel()
            if self.lower.size != n:
                raise ValueError(f"lower has {self.lower.size} entries, expected {n}")

    @property
    def n(self) -> int:
        return self.x0.size


@dataclass(frozen=True)
class KKTResiduals:
    """KKT residuals, in units of the objective scale"""

    stationarity: float
    primal: float
    dual: float
    complementarity: float

    def max(self) -> float:
        return max(self.stationarity, self.primal, self.dual, self.complementarity)


@dataclass
class ConvexSolution:
    """Result of minimize_convex

    Multipliers are in the units of the objective: at the solution
    grad f + sum_j ineq_multipliers_j grad g_j - bound_multipliers
    + A^T eq_multipliers = 0.
    """

    x: np.ndarray
    objective: float
    eq_multipliers: np.ndarray
    ineq_multipliers: np.ndarray
    bound_multipliers: np.ndarray
    kkt: KKTResiduals
    n_newton: int
    n_outer: int


def _as_matrix(H: np.ndarray, n: int) -> np.ndarray:
    H = np.asarray(H, dtype=float)
    return np.diag(H) if H.ndim == 1 else H.reshape(n, n)


def minimize_convex(p: ConvexProgram, tol: Optional[float] = None) -> ConvexSolution:
    """Log-barrier interior point method with equality-constrained Newton steps

    The barrier weight t starts at 1 and grows by
    `numerics.convex.barrier_factor` after each centering until the
    duality gap m/t drops below `tol` (relative to |f(x0)|). Each centering
    runs feasible-start Newton on the KKT system with backtracking line search.

    Parameters
    ----------
    p : ConvexProgram
        program with a strictly feasible starting point
    tol : float, optional
        relative duality gap / KKT tolerance, by default option `numerics.convex.tol`

    Returns
    -------
    ConvexSolution

    Raises
    ------
    InfeasibleError
        if the starting point violates a constraint; `violation` holds the
        worst constraint value

    Examples
    --------
    >>> prog = ConvexProgram(
    ...     objective=lambda x: (x[0] ** 2, 2 * x, np.array([2.0])),
    ...     x0=np.array([2.0]),
    ...     lower=np.array([1.0]),
    ... )
    >>> round(minimize_convex(prog).x[0], 6)
    1.0
    """
    tol = get_option("numerics.convex.tol") if tol is None else tol
    factor = get_option("numerics.convex.barrier_factor")
    max_newton = get_option("numerics.convex.max_newton")
    if factor <= 1:
        raise ValueError(f"barrier_factor must be > 1, got {factor}")

    n = p.n
    A, b = p.A, p.b
    assert A is not None and b is not None
    x = p.x0.copy()
    has_lower = (
        np.isfinite(p.lower) if p.lower is not None else np.zeros(n, dtype=bool)
    )
    lower = np.where(has_lower, p.lower if p.lower is not None else 0.0, 0.0)

    eq_viol = float(np.max(np.abs(A @ x - b))) if b.size else 0.0
    if eq_viol > 1e-9 * max(1.0, float(np.max(np.abs(b))) if b.size else 1.0):
        raise InfeasibleError(
            f"Starting point violates the equality constraints by {eq_viol:.3g}",
            violation=eq_viol,
        )
    g0 = np.array([gi(x)[0] for gi in p.inequalities], dtype=float)
    lb_viol = lower[has_lower] - x[has_lower]
    worst = max(
        float(g0.max()) if g0.size else -np.inf,
        float(lb_viol.max()) if lb_viol.size else -np.inf,
    )
    if worst >= 0:
        raise InfeasibleError(
            f"Starting point is not strictly feasible, worst constraint value {worst:.3g}",
            violation=worst,
        )

    f0 = p.objective(x)[0]
    scale = abs(f0) if np.isfinite(f0) and f0 != 0 else 1.0
    m = len(p.inequalities) + int(has_lower.sum())

    def barrier(x: np.ndarray, t: float, derivs: bool = True):
        slack_lb = x[has_lower] - lower[has_lower]
        if np.any(slack_lb <= 0):
            return np.inf, None, None
        cons = [gi(x) for gi in p.inequalities]
        if any(c[0] >= 0 for c in cons):
            return np.inf, None, None
        f, grad, H = p.objective(x)
        phi = t * f / scale - sum(np.log(-c[0]) for c in cons) - np.sum(np.log(slack_lb))
        if not np.isfinite(phi) or not derivs:
            return phi, None, None
        g = t * np.asarray(grad, dtype=float) / scale
        hess = t * _as_matrix(H, n) / scale
        for v, dg, d2g in cons:
            dg = np.asarray(dg, dtype=float)
            g = g + dg / (-v)
            nz = np.flatnonzero(dg)
            hess[np.ix_(nz, nz)] += np.outer(dg[nz], dg[nz]) / v**2
            d2g = np.asarray(d2g, dtype=float)
            if d2g.ndim == 1:
                hess[np.diag_indices(n)] += d2g / (-v)
            else:
                hess += d2g.reshape(n, n) / (-v)
        g[has_lower] -= 1.0 / slack_lb
        idx = np.flatnonzero(has_lower)
        hess[idx, idx] += 1.0 / slack_lb**2
        return phi, g, hess

    def center(x: np.ndarray, t: float) -> Tuple[np.ndarray, np.ndarray, int]:
        w = np.zeros(b.size)
        steps = 0
        for _ in range(max_newton):
            phi, g, H = barrier(x, t)
            r = A @ x - b
            kkt = np.block([[H, A.T], [A, np.zeros((b.size, b.size))]])
            rhs = np.concatenate([-g, -r])
            try:
                sol = scipy.linalg.solve(kkt, rhs, assume_a="sym")
            except (np.linalg.LinAlgError, ValueError):
                sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
            dx, w = sol[:n], sol[n:]
            decrement = float(-g @ dx)
            steps += 1
            if decrement / 2 <= 1e-12 and np.max(np.abs(r), initial=0.0) <= 1e-12:
                break
            s = 1.0
            while s > 1e-16:
                phi_new = barrier(x + s * dx, t, derivs=False)[0]
                if phi_new <= phi - 0.25 * s * decrement:
                    break
                # decrease below the rounding of phi; the full step is taken if it stays feasible
                if decrement < 1e-8 and np.isfinite(phi_new):
                    break
                s *= 0.5
            else:
                break
            x = x + s * dx
        return x, w, steps

    t = 1.0
    n_newton = 0
    n_outer = 0
    while True:
        x, w, steps = center(x, t)
        n_newton += steps
        n_outer += 1
        if m == 0 or m / t < tol:
            break
        t *= factor

    logger.debug("barrier method: %d centerings, %d Newton steps, t=%.3g", n_outer, n_newton, t)

    fx, grad, _ = p.objective(x)
    cons_vals = np.array([gi(x)[0] for gi in p.inequalities], dtype=float)
    cons_grads = [np.asarray(gi(x)[1], dtype=float) for gi in p.inequalities]
    lam = 1.0 / (t * -cons_vals) if cons_vals.size else np.zeros(0)
    slack_lb = x - lower
    lam_lb = np.where(has_lower, 1.0 / (t * np.where(has_lower, slack_lb, 1.0)), 0.0)
    nu = w / t

    resid = np.asarray(grad, dtype=float) / scale - lam_lb + A.T @ nu
    for lj, dg in zip(lam, cons_grads):
        resid = resid + lj * dg
    primal = max(
        0.0,
        float(cons_vals.max()) if cons_vals.size else 0.0,
        float((lower - x)[has_lower].max()) if has_lower.any() else 0.0,
        float(np.max(np.abs(A @ x - b))) if b.size else 0.0,
    )
    compl = max(
        float(np.max(np.abs(lam * cons_vals))) if lam.size else 0.0,
        float(np.max(np.abs(lam_lb * slack_lb)[has_lower])) if has_lower.any() else 0.0,
    )
    kkt = KKTResiduals(
        stationarity=float(np.max(np.abs(resid))) if n else 0.0,
        primal=primal,
        dual=float(max(0.0, -lam.min() if lam.size else 0.0, -lam_lb.min())),
        complementarity=compl,
    )

    return ConvexSolution(
        x=x,
        objective=float(fx),
        eq_multipliers=nu * scale,
        ineq_multipliers=lam * scale,
        bound_multipliers=lam_lb * scale,
        kkt=kkt,
        n_newton=n_newton,
        n_outer=n_outer,
    )
