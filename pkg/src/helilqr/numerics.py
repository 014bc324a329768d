"""Dense real-matrix kernel: eigenvalues, linear solves, rank and Lyapunov.

All routines accept anything array-like, reject non-finite entries and
return fresh numpy arrays. LAPACK (through numpy/scipy) does the heavy
lifting; this module pins the tolerances and error semantics the rest of
the package relies on.
"""

import warnings

import numpy as np
import scipy.linalg

from ._validation import as_matrix, check_symmetric
from .exceptions import (
    ConvergenceError,
    DegenerateSpectrumError,
    DimensionError,
    NotStableError,
    SingularMatrixError,
    ValidationError,
)

TOL_EIG = 1e-9
TOL_SOLVE = 1e-10
TOL_LYAP = 1e-9
TOL_RANK = 1e-8

# LAPACK's dhseqr gives up after 30 sweeps per eigenvalue (ITMAX = 30 * n).
MAX_QR_SWEEPS_PER_EIGENVALUE = 30

_SINGULAR_PIVOT = 1e-14


def _qr_failure(n):
    return ConvergenceError(
        f"QR iteration did not converge within {MAX_QR_SWEEPS_PER_EIGENVALUE * n} "
        f"iterations for a {n}x{n} matrix"
    )


def eigenvalues(m):
    """Eigenvalues of a real square matrix, with multiplicity.

    Complex eigenvalues come back in exact conjugate pairs (positive
    imaginary part first), as produced by the real Schur form.
    """
    m = as_matrix(m, "m", square=True)
    try:
        return np.linalg.eigvals(m).astype(np.complex128)
    except np.linalg.LinAlgError as exc:
        raise _qr_failure(m.shape[0]) from exc


def eig(m):
    """Eigenvalues and unit-norm right eigenvectors (columns)."""
    m = as_matrix(m, "m", square=True)
    try:
        return np.linalg.eig(m)
    except np.linalg.LinAlgError as exc:
        raise _qr_failure(m.shape[0]) from exc


def solve_linear(a, rhs):
    """Solve ``a @ X = rhs`` by LU factorisation with partial pivoting."""
    a = as_matrix(a, "a", square=True)
    rhs = np.asarray(rhs, dtype=np.float64)
    vector_rhs = rhs.ndim == 1
    rhs = as_matrix(rhs.reshape(-1, 1) if vector_rhs else rhs, "rhs")
    if rhs.shape[0] != a.shape[0]:
        raise DimensionError(
            f"rhs has {rhs.shape[0]} rows but a is {a.shape[0]}x{a.shape[1]}"
        )
    with warnings.catch_warnings():
        # singularity is reported below with our own threshold
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    scale = np.max(np.abs(a))
    if scale == 0.0 or pivots.min() <= _SINGULAR_PIVOT * scale:
        raise SingularMatrixError(
            f"matrix is singular to working precision (min pivot {pivots.min():.3e})"
        )
    x = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)
    return x.ravel() if vector_rhs else x


def matrix_rank(m, tol=TOL_RANK):
    """Numerical rank from a column-pivoted QR.

    A pivot counts if ``|R[i, i]| > tol * |R[0, 0]|``; with column pivoting
    ``|R[0, 0]|`` is the largest column norm.
    """
    if not tol > 0:
        raise ValidationError(f"tol must be positive, got {tol}")
    m = as_matrix(m, "m")
    if not np.any(m):
        return 0
    r = scipy.linalg.qr(m, mode="r", pivoting=True, check_finite=False)[0]
    diag = np.abs(np.diag(r))
    return int(np.sum(diag > tol * diag[0]))


def lyapunov_operator(a):
    """Matrix of ``X -> a.T @ X + X @ a`` acting on column-stacked vec(X)."""
    n = a.shape[0]
    eye = np.eye(n)
    return np.kron(eye, a.T) + np.kron(a.T, eye)


def solve_lyapunov(a, c):
    """Solve ``a.T @ X + X @ a + c = 0`` for symmetric X, with ``a`` Hurwitz.

    Uses the dense n^2 x n^2 Kronecker form, which is cheap for the model
    sizes handled here (n <= 26).
    """
    a = as_matrix(a, "a", square=True)
    c = check_symmetric(c, "c")
    n = a.shape[0]
    if c.shape != (n, n):
        raise DimensionError(f"c must be {n}x{n}, got {c.shape}")
    spectrum = eigenvalues(a)
    if np.max(spectrum.real) >= 0:
        raise NotStableError(
            f"a is not Hurwitz (max real part {np.max(spectrum.real):.3e})"
        )
    op = lyapunov_operator(a)
    try:
        vec_x = solve_linear(op, -c.reshape(-1, order="F"))
    except SingularMatrixError as exc:
        raise DegenerateSpectrumError(
            "Lyapunov operator is singular (eigenvalues of a sum to zero)"
        ) from exc
    x = vec_x.reshape(n, n, order="F")
    return 0.5 * (x + x.T)


def lyapunov_residual(a, x, c):
    return np.linalg.norm(a.T @ x + x @ a + c)
