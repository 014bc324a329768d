"""Continuous-time LQR synthesis.

The stabilizing solution of the algebraic Riccati equation

    A'P + PA - P B R^-1 B' P + Q = 0

is taken from the stable invariant subspace of the Hamiltonian matrix and
then polished with Newton-Kleinman steps (one Lyapunov solve each).
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import as_matrix, as_vector, check_symmetric
from .analysis import TOL_MARGINAL, report_from_spectrum
from .exceptions import (
    ClosedLoopNotHurwitzError,
    ConvergenceError,
    DimensionError,
    NoStabilizingSolutionError,
    NotStableError,
    SubspaceExtractionError,
    ValidationError,
)
from .model import StateSpace
from .numerics import eig, eigenvalues, solve_linear, solve_lyapunov

CARE_TOL = 1e-8
IMAGINARY_AXIS_TOL = 1e-8
MAX_NEWTON_STEPS = 10


@dataclass(frozen=True)
class LqrWeights:
    Q: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        Q = check_symmetric(self.Q, "Q")
        R = check_symmetric(self.R, "R")
        try:
            np.linalg.cholesky(R)
        except np.linalg.LinAlgError:
            raise ValidationError("R must be positive definite") from None
        q_eigs = np.linalg.eigvalsh(Q)
        if q_eigs.min() < -1e-12 * max(1.0, np.abs(q_eigs).max()):
            raise ValidationError("Q must be positive semidefinite")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "R", R)


def default_weights(ss, q_diag=None, r_diag=None):
    """Identity state and input weights, with optional diagonal overrides.

    ``Q = C'C`` for the full-state output ``C = I``.
    """
    n, m = ss.n_states, ss.n_inputs
    if q_diag is None:
        Q = np.eye(n)
    else:
        q_diag = as_vector(q_diag, n, "q_diag")
        if np.any(q_diag < 0):
            raise ValidationError("q_diag entries must be >= 0")
        Q = np.diag(q_diag)
    if r_diag is None:
        R = np.eye(m)
    else:
        r_diag = as_vector(r_diag, m, "r_diag")
        if np.any(r_diag <= 0):
            raise ValidationError("r_diag entries must be > 0")
        R = np.diag(r_diag)
    return LqrWeights(Q, R)


def _check_problem(a, b, w):
    a = as_matrix(a, "A", square=True)
    b = as_matrix(b, "B")
    n, m = a.shape[0], b.shape[1]
    if b.shape[0] != n:
        raise DimensionError(f"B must have {n} rows, got {b.shape[0]}")
    if w.Q.shape != (n, n) or w.R.shape != (m, m):
        raise DimensionError(
            f"weights must be {n}x{n} and {m}x{m}, got {w.Q.shape} and {w.R.shape}"
        )
    return a, b


def care_residual(a, b, w, p):
    """Relative CARE residual ``||A'P + PA - PBR^-1B'P + Q||_F / max(1, ||Q||_F)``."""
    gain = solve_linear(w.R, b.T @ p)
    res = a.T @ p + p @ a - p @ b @ gain + w.Q
    return float(np.linalg.norm(res) / max(1.0, np.linalg.norm(w.Q)))


def hamiltonian(a, b, w):
    g = b @ solve_linear(w.R, b.T)
    return np.block([[a, -g], [-w.Q, -a.T]])


def _stable_subspace_solution(a, b, w):
    n = a.shape[0]
    h = hamiltonian(a, b, w)
    lam, vecs = eig(h)
    scale = max(1.0, np.abs(lam).max())
    if np.any(np.abs(lam.real) <= IMAGINARY_AXIS_TOL * scale):
        raise NoStabilizingSolutionError(
            "Hamiltonian has eigenvalues on the imaginary axis; "
            "no stabilizing solution exists"
        )
    stable = lam.real < 0
    if stable.sum() != n:
        raise NoStabilizingSolutionError(
            f"expected {n} stable Hamiltonian eigenvalues, found {stable.sum()}"
        )
    u1, u2 = vecs[:n, stable], vecs[n:, stable]
    if np.linalg.cond(u1) > 1e12:
        raise SubspaceExtractionError(
            "stable-subspace basis U1 is singular; (A, B) may not be stabilizable"
        )
    # P = U2 U1^-1  <=>  U1' P' = U2'
    p = np.linalg.solve(u1.T, u2.T).T.real
    return 0.5 * (p + p.T)


def solve_care(a, b, w, max_newton_steps=MAX_NEWTON_STEPS, tol=CARE_TOL):
    """Stabilizing solution P of the continuous algebraic Riccati equation."""
    a, b = _check_problem(a, b, w)
    p = _stable_subspace_solution(a, b, w)
    residual = care_residual(a, b, w, p)
    for _ in range(max_newton_steps):
        if residual <= tol:
            break
        k = solve_linear(w.R, b.T @ p)
        try:
            candidate = solve_lyapunov(a - b @ k, w.Q + k.T @ w.R @ k)
        except NotStableError:
            break
        candidate_residual = care_residual(a, b, w, candidate)
        if candidate_residual >= residual:
            break
        p, residual = candidate, candidate_residual
    if residual > tol:
        raise ConvergenceError(
            f"CARE residual {residual:.3e} above {tol:.0e} after Newton refinement"
        )
    return p


def closed_loop_matrix(ss, k):
    k = as_matrix(k, "K")
    if k.shape != (ss.n_inputs, ss.n_states):
        raise DimensionError(
            f"K must be {ss.n_inputs}x{ss.n_states}, got {k.shape}"
        )
    return ss.A - ss.B @ k


@dataclass(frozen=True)
class LqrSolution:
    P: np.ndarray
    K: np.ndarray
    care_residual: float
    closed_loop_spectrum: np.ndarray

    @property
    def slowest_pole(self):
        return self.closed_loop_spectrum[np.argmax(self.closed_loop_spectrum.real)]

    def to_dict(self):
        return {
            "K": self.K.tolist(),
            "P": self.P.tolist(),
            "residual": self.care_residual,
            "closed_loop_eigenvalues": [
                {"re": float(z.real), "im": float(z.imag)}
                for z in self.closed_loop_spectrum
            ],
        }

    @classmethod
    def from_dict(cls, doc):
        spectrum = np.array(
            [complex(z["re"], z["im"]) for z in doc.get("closed_loop_eigenvalues", [])]
        )
        return cls(
            P=np.asarray(doc["P"], dtype=float),
            K=np.asarray(doc["K"], dtype=float),
            care_residual=float(doc["residual"]),
            closed_loop_spectrum=spectrum,
        )


def lqr_gain(ss, w, max_newton_steps=MAX_NEWTON_STEPS, tol=CARE_TOL):
    """Solve the CARE for ``ss`` and package P, K, the residual and closed-loop poles."""
    p = solve_care(ss.A, ss.B, w, max_newton_steps, tol)
    k = solve_linear(w.R, ss.B.T @ p)
    spectrum = eigenvalues(closed_loop_matrix(ss, k))
    if np.any(spectrum.real >= -TOL_MARGINAL):
        raise ClosedLoopNotHurwitzError(
            f"closed loop has an eigenvalue with Re = {spectrum.real.max():.3e}"
        )
    return LqrSolution(p, k, care_residual(ss.A, ss.B, w, p), spectrum)


class LQRRegulator(BaseEstimator):
    """Infinite-horizon LQR state-feedback regulator.

    ``fit(A, B)`` solves the Riccati equation; ``predict(X)`` maps state
    deviations (rows of ``X``) to controls ``u = -K x``.

    Parameters
    ----------
    q_diag, r_diag : array-like or None
        Diagonals of the state and input weights. ``None`` means identity.
    max_newton_steps : int
        Cap on Newton-Kleinman refinement steps.
    tol : float
        Relative CARE residual that must be reached.
    """

    def __init__(self, q_diag=None, r_diag=None, max_newton_steps=MAX_NEWTON_STEPS,
                 tol=CARE_TOL):
        self.q_diag = q_diag
        self.r_diag = r_diag
        self.max_newton_steps = max_newton_steps
        self.tol = tol

    def fit(self, A, B=None):
        """Fit on dynamics ``A`` and input matrix ``B``, or on a StateSpace alone."""
        ss = A if isinstance(A, StateSpace) and B is None else StateSpace(A, B)
        w = default_weights(ss, self.q_diag, self.r_diag)
        sol = lqr_gain(ss, w, self.max_newton_steps, self.tol)
        self.P_ = sol.P
        self.K_ = sol.K
        self.care_residual_ = sol.care_residual
        self.closed_loop_eigenvalues_ = sol.closed_loop_spectrum
        self.n_features_in_ = ss.n_states
        return self

    def predict(self, X):
        check_is_fitted(self, "K_")
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = as_matrix(X.reshape(1, -1) if single else X, "X")
        if X.shape[1] != self.n_features_in_:
            raise DimensionError(
                f"X has {X.shape[1]} features, regulator was fit on {self.n_features_in_}"
            )
        u = -X @ self.K_.T
        return u[0] if single else u

    def stability_report(self):
        check_is_fitted(self, "K_")
        return report_from_spectrum(self.closed_loop_eigenvalues_)

    def solution(self):
        check_is_fitted(self, "K_")
        return LqrSolution(self.P_, self.K_, self.care_residual_,
                           self.closed_loop_eigenvalues_)
