"""Modal stability classification and Kalman controllability test."""

from dataclasses import dataclass

import numpy as np

from ._validation import as_matrix
from .exceptions import DimensionError
from .numerics import TOL_RANK, eigenvalues, matrix_rank

TOL_MARGINAL = 1e-6
_NEGLIGIBLE = 1e-13

STABLE = "stable"
MARGINAL = "marginal"
UNSTABLE = "unstable"


def classify(eigenvalue, tol=TOL_MARGINAL):
    re = eigenvalue.real
    if re > tol:
        return UNSTABLE
    if abs(re) <= tol:
        return MARGINAL
    return STABLE


@dataclass(frozen=True)
class Mode:
    eigenvalue: complex
    natural_frequency: float
    damping_ratio: float | None
    kind: str

    @classmethod
    def from_eigenvalue(cls, lam, tol=TOL_MARGINAL):
        lam = complex(lam)
        wn = abs(lam)
        zeta = -lam.real / wn if wn > 0 else None
        return cls(lam, wn, zeta, classify(lam, tol))

    def to_dict(self):
        return {
            "eigenvalue": {"re": self.eigenvalue.real, "im": self.eigenvalue.imag},
            "natural_frequency": self.natural_frequency,
            "damping_ratio": self.damping_ratio,
            "class": self.kind,
        }


@dataclass(frozen=True)
class ModeReport:
    modes: tuple
    rhp_count: int
    marginal_count: int
    is_stable: bool

    @property
    def eigenvalues(self):
        return np.array([m.eigenvalue for m in self.modes])

    def to_dict(self):
        return {
            "modes": [m.to_dict() for m in self.modes],
            "rhp_count": self.rhp_count,
            "marginal_count": self.marginal_count,
            "is_stable": self.is_stable,
        }


def report_from_spectrum(spectrum, tol=TOL_MARGINAL):
    modes = tuple(Mode.from_eigenvalue(lam, tol) for lam in spectrum)
    rhp = sum(m.kind == UNSTABLE for m in modes)
    marginal = sum(m.kind == MARGINAL for m in modes)
    return ModeReport(modes, rhp, marginal, rhp == 0 and marginal == 0)


def stability_report(a, tol=TOL_MARGINAL):
    """Classify every eigenvalue of ``a`` as stable, marginal or unstable."""
    return report_from_spectrum(eigenvalues(a), tol)


@dataclass(frozen=True)
class ControllabilityResult:
    rank: int
    n_states: int

    @property
    def controllable(self):
        return self.rank == self.n_states

    def to_dict(self):
        return {
            "rank": self.rank,
            "n_states": self.n_states,
            "controllable": self.controllable,
        }


def controllability_matrix(a, b, normalize=True):
    """``[B, AB, ..., A^(n-1)B]``; with ``normalize`` each column is scaled to
    unit norm as it is generated, which leaves the rank unchanged but keeps
    the entries of high powers from overflowing the rank threshold."""
    a = as_matrix(a, "A", square=True)
    b = as_matrix(b, "B")
    n = a.shape[0]
    if b.shape[0] != n:
        raise DimensionError(f"B must have {n} rows, got {b.shape[0]}")
    blocks = []
    block = b.copy()
    # columns this small relative to the map that produced them are roundoff
    floor = _NEGLIGIBLE * np.linalg.norm(b, axis=0).max()
    a_norm = np.linalg.norm(a)
    for _ in range(n):
        if normalize:
            norms = np.linalg.norm(block, axis=0)
            block = np.divide(
                block, norms, out=np.zeros_like(block), where=norms > floor
            )
            floor = _NEGLIGIBLE * a_norm
        blocks.append(block)
        block = a @ block
    return np.hstack(blocks)


def controllability_rank(ss, tol=TOL_RANK):
    ctrb = controllability_matrix(ss.A, ss.B)
    return ControllabilityResult(matrix_rank(ctrb, tol), ss.n_states)
