import dataclasses
from logging import getLogger

import numpy as np
from scipy.optimize import brentq

from .constants import INV_E, DEFAULT_TOL, DEFAULT_MAX_ITER
from .errors import DomainError, BracketError, ConvergenceError
from .typing import RealFn

logger = getLogger(__name__)

# coefficients of W0 in powers of p = sqrt(2 (e z + 1)) about the branch point
_BRANCH_SERIES = (-1.0, 1.0, -1 / 3, 11 / 72, -43 / 540, 769 / 17280, -221 / 8505)


@dataclasses.dataclass(frozen=True)
class Tolerance:
    """Stopping rule shared by the scalar solvers.

    Attributes:
        abs_tol: Absolute tolerance on the bracket width
        max_iter: Maximum number of iterations before giving up
    """
    abs_tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError(f'Require abs_tol > 0 but got {self.abs_tol}')
        if self.max_iter < 1:
            raise DomainError(f'Require max_iter >= 1 but got {self.max_iter}')


def lambert_w0(z: float) -> float:
    """Principal branch :math:`W_0` of the Lambert function, i.e. the solution :math:`w \\geq -1` of
    :math:`w e^w = z`.

    A branch-point series seeds Halley's method near :math:`z = -1/e`, :math:`\\log(1 + z)` seeds it for
    moderate :math:`z` and the asymptotic :math:`\\log z - \\log \\log z` seeds it for large :math:`z`.

    Args:
        z: Argument, must satisfy :math:`z \\geq -1/e`

    Returns:
        :math:`W_0(z)`

    """
    z = float(z)
    if np.isnan(z) or z < -INV_E * (1 + 4 * np.finfo(float).eps):
        raise DomainError(f'Require z >= -1/e for the principal branch but got {z}')
    if z == 0:
        return 0.0
    if np.isinf(z):
        return np.inf
    q = max(2 * (np.e * z + 1), 0.0)
    p = np.sqrt(q)
    if p < 1e-3:
        return float(np.polyval(_BRANCH_SERIES[::-1], p))
    if p < 0.5:
        w = float(np.polyval(_BRANCH_SERIES[:4][::-1], p))
    elif z < 3:
        w = np.log1p(z)
    else:
        l1 = np.log(z)
        l2 = np.log(l1)
        w = l1 - l2 + l2 / l1

    last_dw = np.inf
    for i in range(100):
        ew = np.exp(w)
        f = w * ew - z
        w1 = w + 1
        dw = f / (ew * w1 - (w + 2) * f / (2 * w1))
        # near the branch point rounding in f sets a floor on the step size
        if abs(dw) >= last_dw:
            return float(w)
        w -= dw
        if abs(dw) < 0.7e-16 * (2 + abs(w)):
            return float(w)
        last_dw = abs(dw)
    raise ConvergenceError(f'Halley iteration for W0({z}) did not converge')


def find_root(f: RealFn, lo: float, hi: float, tol: Tolerance = Tolerance()) -> float:
    """Find a root of a continuous scalar function on a sign-changing bracket.

    Bisection safeguarded with secant and inverse-quadratic steps (Brent's method), which never leaves
    the bracket, so monotone targets always converge.

    Args:
        f: Continuous function of one real variable
        lo: Lower end of the bracket
        hi: Upper end of the bracket
        tol: Stopping rule (absolute bracket width and iteration budget)

    Returns:
        The root, deterministic for identical inputs

    """
    if not lo <= hi:
        raise BracketError(f'Require lo <= hi but got [{lo}, {hi}]')
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0:
        return float(lo)
    if f_hi == 0:
        return float(hi)
    if np.sign(f_lo) == np.sign(f_hi):
        raise BracketError(f'Require f(lo) and f(hi) of opposite sign but got '
                           f'f({lo}) = {f_lo}, f({hi}) = {f_hi}')
    root, result = brentq(f, lo, hi, xtol=tol.abs_tol, maxiter=tol.max_iter, full_output=True, disp=False)
    if not result.converged:
        raise ConvergenceError(f'Root finder stopped after {result.iterations} iterations on [{lo}, {hi}]: '
                               f'{result.flag}')
    logger.debug(f'find_root converged to {root} in {result.iterations} iterations')
    return float(root)
