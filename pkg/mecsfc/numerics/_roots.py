from __future__ import annotations
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from ..settings import register_option, get_option, is_positive

register_option(
    "numerics.root.tol",
    1e-10,
    "Default bracket width / residual tolerance of find_root",
    validator=is_positive,
)


def find_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Optional[float] = None,
    *,
    maxiter: int = 500,
) -> float:
    """Root of a continuous function with a sign change on [lo, hi]

    Brent's method: bisection safeguarded, accelerated by secant and inverse
    quadratic interpolation steps.

    Parameters
    ----------
    f : Callable[[float], float]
        continuous (typically monotone) function
    lo, hi : float
        bracket, f(lo) * f(hi) <= 0
    tol : float, optional
        absolute tolerance on the bracket width,
        by default option `numerics.root.tol`
    maxiter : int, optional
        maximum number of iterations, by default 500

    Returns
    -------
    float
        x with |f(x)| <= tol or bracket width <= tol

    Raises
    ------
    ValueError
        if f does not change sign on [lo, hi]

    Examples
    --------
    >>> find_root(lambda x: x - 3.0, 0.0, 10.0)
    3.0
    >>> find_root(lambda x: x**2 - 2.0, 0.0, 2.0)
    1.4142135623...
    """
    tol = get_option("numerics.root.tol") if tol is None else tol
    if lo > hi:
        lo, hi = hi, lo

    flo, fhi = f(lo), f(hi)
    if np.isnan(flo) or np.isnan(fhi):
        raise ValueError(f"f is not finite on the bracket [{lo}, {hi}]")
    if flo == 0.0:
        return float(lo)
    if fhi == 0.0:
        return float(hi)
    if np.sign(flo) == np.sign(fhi):
        raise ValueError(
            f"No sign change in bracket [{lo}, {hi}]: f(lo)={flo:.3g}, f(hi)={fhi:.3g}"
        )

    return float(brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=maxiter))
