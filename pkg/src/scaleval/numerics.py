"""
Linear-algebra, optimization and tail-probability primitives.

Everything here is a pure function of its arguments.  Matrices are plain
``numpy.ndarray`` objects; :func:`as_symmetric` is the single validation
gate for symmetric inputs.
"""

from dataclasses import dataclass
import warnings

import numpy as np
from scipy import special

from .errors import InvalidParameter, NonFiniteObjective, NotPositiveDefinite

PIVOT_FLOOR = 1e-12
SYMMETRY_RTOL = 1e-12

ARMIJO_C = 1e-4
BACKTRACK_FACTOR = 0.5
MAX_HALVINGS = 50


def as_symmetric(m):
    """Return `m` as a float array after checking it is finite and symmetric."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise InvalidParameter(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidParameter("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.T)) > SYMMETRY_RTOL * scale:
        raise InvalidParameter("matrix is not symmetric")
    return m


def cholesky_log_det(m):
    """
    Lower Cholesky factor and log-determinant of a symmetric matrix.

    Parameters
    ----------
    m : array_like
        Symmetric matrix.

    Returns
    -------
    factor : ndarray
        Lower-triangular ``L`` with ``L @ L.T == m``.
    log_det : float
        ``2 * sum(log(diag(L)))``.

    Raises
    ------
    NotPositiveDefinite
        If any pivot (squared diagonal of ``L``) is at or below 1e-12.
    """
    m = as_symmetric(m)
    try:
        factor = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("matrix is not positive definite") from exc
    pivots = np.diag(factor) ** 2
    if np.any(pivots <= PIVOT_FLOOR):
        raise NotPositiveDefinite(
            f"pivot {pivots.min():.3e} below floor {PIVOT_FLOOR:g}; data may be collinear"
        )
    return factor, float(2.0 * np.sum(np.log(np.diag(factor))))


def log_det(m):
    return cholesky_log_det(m)[1]


def inverse_spd(m):
    """Inverse of a symmetric positive-definite matrix via its Cholesky factor."""
    factor, _ = cholesky_log_det(m)
    eye = np.eye(factor.shape[0])
    linv = np.linalg.solve(factor, eye)  # small dense p; triangular solve is fine
    inv = linv.T @ linv
    return 0.5 * (inv + inv.T)


@dataclass(frozen=True)
class OptimResult:
    point: np.ndarray
    objective: float
    gradient_norm: float
    iterations: int
    converged: bool
    message: str = ""


def central_gradient(fun, x, step=1e-5):
    """Central finite-difference gradient, used as an oracle and as a fallback."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        g[i] = (fun(x + e) - fun(x - e)) / (2.0 * step)
    return g


def minimize(fun, start, grad=None, tol=1e-6, max_iter=1000):
    """
    Minimize a smooth scalar function with BFGS and Armijo backtracking.

    Parameters
    ----------
    fun : callable
        ``fun(x) -> float``.  May return ``inf``/``nan`` outside its domain;
        the line search halves the step until the value is finite.
    start : array_like
        Starting point; `fun` must be finite there.
    grad : callable, optional
        Analytic gradient.  Central differences are used when omitted.
    tol : float
        Convergence threshold on the Euclidean gradient norm.
    max_iter : int
        Iteration cap.  Exceeding it returns the best point with
        ``converged=False`` and emits a ``RuntimeWarning``.

    Returns
    -------
    OptimResult
    """
    x = np.atleast_1d(np.asarray(start, dtype=float)).copy()
    if grad is None:
        grad = lambda z: central_gradient(fun, z)  # noqa: E731

    f = float(fun(x))
    if not np.isfinite(f):
        raise NonFiniteObjective("objective is not finite at the starting point")
    g = np.asarray(grad(x), dtype=float)
    n = x.size
    h = np.eye(n)
    fresh = True  # h is the identity; a failed search cannot be rescued by a reset

    for it in range(max_iter):
        gnorm = float(np.linalg.norm(g))
        if gnorm <= tol:
            return OptimResult(x, f, gnorm, it, True, "gradient tolerance reached")

        p = -h @ g
        slope = float(g @ p)
        if slope >= 0.0:
            h = np.eye(n)
            fresh = True
            p = -g
            slope = -gnorm**2

        step = 1.0
        accepted = False
        last_finite = True
        for _ in range(MAX_HALVINGS + 1):
            x_new = x + step * p
            f_new = float(fun(x_new))
            last_finite = np.isfinite(f_new)
            if last_finite and f_new <= f + ARMIJO_C * step * slope:
                accepted = True
                break
            step *= BACKTRACK_FACTOR

        if not accepted:
            if not last_finite:
                raise NonFiniteObjective(
                    f"objective non-finite after {MAX_HALVINGS} step halvings"
                )
            if not fresh:
                h = np.eye(n)
                fresh = True
                continue
            return OptimResult(x, f, gnorm, it, False, "line search failed")

        g_new = np.asarray(grad(x_new), dtype=float)
        s = x_new - x
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-12 * float(np.linalg.norm(s)) * float(np.linalg.norm(y)):
            if fresh:
                # Shanno-Phua scaling of the initial inverse Hessian
                h = np.eye(n) * (sy / float(y @ y))
            rho = 1.0 / sy
            hy = h @ y
            h = (
                h
                - rho * (np.outer(s, hy) + np.outer(hy, s))
                + (rho * rho * float(y @ hy) + rho) * np.outer(s, s)
            )
            fresh = False
        x, f, g = x_new, f_new, g_new

    gnorm = float(np.linalg.norm(g))
    converged = gnorm <= tol
    if not converged:
        warnings.warn(
            f"minimize: {max_iter} iterations exceeded (gradient norm {gnorm:.3e})",
            RuntimeWarning,
            stacklevel=2,
        )
    return OptimResult(x, f, gnorm, max_iter, converged, "maximum iterations exceeded")


def _check_df(df):
    if df is None or not df > 0:
        raise InvalidParameter(f"degrees of freedom must be positive, got {df!r}")


def chi_square_sf(x, df):
    _check_df(df)
    if x <= 0:
        return 1.0
    return float(special.gammaincc(0.5 * df, 0.5 * x))


def student_t_sf(x, df):
    _check_df(df)
    if np.isnan(x):
        return float("nan")
    if np.isinf(x):
        return 0.0 if x > 0 else 1.0
    tail = 0.5 * float(special.betainc(0.5 * df, 0.5, df / (df + x * x)))
    return tail if x >= 0 else 1.0 - tail


def normal_sf(x):
    return float(0.5 * special.erfc(x / np.sqrt(2.0)))


def survival(dist, x, df=None):
    """
    Upper-tail probability ``P(X > x)``.

    `dist` is one of ``"chi_square"``, ``"student_t"`` or ``"standard_normal"``;
    the first two need `df`.
    """
    if dist == "chi_square":
        return chi_square_sf(x, df)
    if dist == "student_t":
        return student_t_sf(x, df)
    if dist == "standard_normal":
        return normal_sf(x)
    raise InvalidParameter(f"unknown distribution {dist!r}")


def student_t_quantile(prob, df):
    """Lower-tail quantile of Student's t."""
    _check_df(df)
    return float(special.stdtrit(df, prob))


def normal_quantile(prob):
    return float(special.ndtri(prob))
