"""Least-squares solvers on top of the randomized factorizations.

Three problem shapes are covered: overdetermined solves (m >= n), basic
solutions of underdetermined systems (m < n, trailing coefficients pinned to
zero before unmixing), and minimum-norm solutions via the VLU factorization.
Every solver checks the triangular factor for numerical rank deficiency and
raises instead of silently truncating.
"""

from dataclasses import dataclass

import numpy as np

from .errors import RankDeficiencyError
from .linalg import (
    apply_q,
    apply_qt,
    as_matrix,
    back_substitute,
    extract_r,
    forward_substitute,
    house_qr,
    house_qrcp,
)
from .rurv import haar_sample, mix_apply, rurv_ros, rvlu_ros
from .transforms import ros_apply, ros_sample

_EPS = float(np.finfo(np.float64).eps)

OVERDETERMINED_METHODS = ("qr-overdet", "rurv-ros-overdet")
BASIC_METHODS = ("qr-basic", "qrcp", "rurv-haar-basic", "rurv-ros-basic")


@dataclass
class LsSolution:
    """Solution vector with its residual and solution norms.

    residual_norm is ||A x - b||_2 recomputed from the returned x, not the
    solver's internal estimate.
    """

    x: np.ndarray
    residual_norm: float
    solution_norm: float
    method: str


def _check_full_rank(diag):
    """Raise if any |diag[i]| falls under n*eps*|diag[0]|."""
    n = diag.size
    ref = abs(diag[0])
    if ref == 0.0:
        raise RankDeficiencyError(0)
    bad = np.abs(diag) < n * _EPS * ref
    if np.any(bad):
        raise RankDeficiencyError(int(np.flatnonzero(bad)[0]))


def _finish(a, b, x, method):
    residual = float(np.linalg.norm(a @ x - b))
    return LsSolution(x=x, residual_norm=residual, solution_norm=float(np.linalg.norm(x)), method=method)


def _as_rhs(b, m):
    b = np.asarray(b, dtype=np.float64).ravel()
    if b.size != m:
        raise ValueError(f"right-hand side has {b.size} entries, expected {m}")
    return b


def solve_overdetermined(a, b, method="qr-overdet", rng=None, num_mixes=1):
    """Least squares for m >= n via y = R^-1 (U.T b), x = V.T y.

    method "qr-overdet" factors A directly (V is the identity);
    "rurv-ros-overdet" mixes the columns first and unmixes the solution.
    """
    a = as_matrix(a)
    m, n = a.shape
    if m < n:
        raise ValueError(f"solve_overdetermined needs m >= n, got {a.shape}")
    b = _as_rhs(b, m)
    if method == "qr-overdet":
        f = house_qr(a)
        v = None
    elif method == "rurv-ros-overdet":
        fac = rurv_ros(a, num_mixes, rng)
        f = fac.u
        v = fac.v
    else:
        raise ValueError(f"method must be one of {OVERDETERMINED_METHODS}, got {method!r}")
    r = extract_r(f)[:n, :n]
    _check_full_rank(np.diagonal(r))
    y = back_substitute(r, apply_qt(f, b)[:n])
    x = y if v is None else mix_apply(v, y, "left-transpose")
    return _finish(a, b, x, method)


def _basic_solver(a, method, rng, num_mixes):
    """Factor once and return a solve(rhs) -> (y, x) closure.

    y is the coefficient vector in the factored basis; its trailing n - m
    entries are exact zeros by construction.  The closure form lets the
    caller reuse the factorization for refinement passes.
    """
    m, n = a.shape
    if method == "qr-basic":
        # no mixing at all: factor the leading m columns as they stand
        f = house_qr(a[:, :m])
        unmix = None
    elif method == "qrcp":
        f = house_qrcp(a)
        unmix = None
    elif method == "rurv-haar-basic":
        v = haar_sample(n, rng)
        mixed = a @ v.T
        f = house_qr(mixed[:, :m])
        unmix = lambda y: v.T @ y
    elif method == "rurv-ros-basic":
        v = ros_sample(n, num_mixes, rng)
        mixed = ros_apply(v, a, "right-transpose")
        norms = np.linalg.norm(mixed, axis=0)
        v.presort = np.argsort(-norms, kind="stable")
        # only the leading m sorted columns are factored; the rest never
        # enter the triangular solve because their coefficients are zero
        f = house_qr(mixed[:, v.presort[:m]])
        unmix = lambda y: mix_apply(v, y, "left-transpose")
    else:
        raise ValueError(f"method must be one of {BASIC_METHODS}, got {method!r}")
    r = extract_r(f)[:m, :m]
    _check_full_rank(np.diagonal(r))

    def solve(rhs):
        y1 = back_substitute(r, apply_qt(f, rhs)[:m])
        y = np.concatenate((y1, np.zeros(n - m)))
        if unmix is not None:
            return y, unmix(y)
        if method == "qrcp":
            x = np.zeros(n)
            x[f.perm[:m]] = y1
            return y, x
        return y, y.copy()

    return solve


def solve_basic(a, b, method="rurv-ros-basic", rng=None, num_mixes=1):
    """Basic solution of an underdetermined full-rank system (m < n).

    Mixing methods mix all n columns, sort them by decreasing norm, factor
    the leading m, and unmix; "qr-basic" factors A[:, :m] as given, which is
    exactly the fragile strategy the mixed variants repair.

    The system is consistent whenever A has full row rank, so after the
    triangular solve one refinement pass against the original matrix pulls
    the residual down to the rounding floor; without it the mix and unmix
    rounding would sit in the result at a few extra ulps.
    """
    a = as_matrix(a)
    m, n = a.shape
    if m >= n:
        raise ValueError(f"solve_basic needs m < n, got {a.shape}")
    rng = np.random.default_rng(rng)
    b = _as_rhs(b, m)
    solve = _basic_solver(a, method, rng, num_mixes)
    _, x = solve(b)
    _, dx = solve(b - a @ x)
    return _finish(a, b, x + dx, method)


def solve_min_norm(a, b, rng=None, num_mixes=1):
    """Minimum-norm solution of an underdetermined full-row-rank system.

    Uses A = V.T L U from the VLU factorization: x = U.T L^-1 V b.  The
    result lies in the row space of A, which is what makes its norm minimal
    among all solutions.
    """
    a = as_matrix(a)
    m, n = a.shape
    if m >= n:
        raise ValueError(f"solve_min_norm needs m < n, got {a.shape}")
    b = _as_rhs(b, m)
    fac = rvlu_ros(a, num_mixes, rng)
    ldiag = np.diagonal(fac.l)
    _check_full_rank(ldiag)
    z = forward_substitute(fac.l[:m, :m], mix_apply(fac.v, b, "left"))
    padded = np.zeros(n)
    padded[:m] = z
    x = apply_q(fac.u, padded)
    return _finish(a, b, x, "rvlu-minnorm")
