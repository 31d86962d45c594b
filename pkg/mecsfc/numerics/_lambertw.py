from __future__ import annotations
from typing import Union

import numpy as np
from scipy.special import lambertw

from ..settings import register_option, get_option, is_positive

register_option(
    "numerics.lambert.tol",
    1e-12,
    "Relative round-trip tolerance |w e^w - x| / max(1, |x|) of lambert_w0",
    validator=is_positive,
)

_BRANCH_POINT = -np.exp(-1.0)


def lambert_w0(x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Principal branch of the Lambert W function

    Solves w * exp(w) = x for w >= -1. The scipy evaluation is polished with
    Halley iterations until the round trip meets `numerics.lambert.tol`.

    Parameters
    ----------
    x : float or np.ndarray
        argument(s), x >= -1/e

    Returns
    -------
    float or np.ndarray
        W0(x), same shape as x

    Raises
    ------
    ValueError
        if any x < -1/e

    Examples
    --------
    >>> lambert_w0(0.0)
    0.0
    >>> lambert_w0(np.e)
    1.0
    >>> lambert_w0(1.0)
    0.5671432904097838
    """
    scalar = np.ndim(x) == 0
    z = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.isnan(z)):
        raise ValueError("lambert_w0 is undefined for NaN")
    # rounding of -1/e computed elsewhere may land one ulp below the branch point
    slack = 4 * np.finfo(float).eps
    if np.any(z < _BRANCH_POINT - slack):
        raise ValueError(f"lambert_w0 requires x >= -1/e, got min(x)={z.min()}")
    z = np.maximum(z, _BRANCH_POINT)

    # scipy returns nan exactly at the branch point
    at_branch = z == _BRANCH_POINT
    w = np.where(at_branch, -1.0, lambertw(np.where(at_branch, 0.0, z), 0).real)
    tol = get_option("numerics.lambert.tol")
    scale = np.maximum(1.0, np.abs(z))
    for _ in range(8):
        ew = np.exp(w)
        f = w * ew - z
        if np.all(np.abs(f) <= tol * scale):
            break
        wp1 = w + 1.0
        # Halley step; the branch point w=-1 has a zero derivative and is exact already
        safe = np.abs(wp1) > 1e-8
        denom = np.where(safe, ew * wp1 - (w + 2.0) * f / (2.0 * np.where(safe, wp1, 1.0)), 1.0)
        w = np.where(safe, w - f / denom, w)

    w = np.where(z == 0.0, 0.0, w)
    w = np.where(at_branch, -1.0, w)
    return float(w[0]) if scalar else w
