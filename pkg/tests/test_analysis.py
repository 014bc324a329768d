import numpy as np
import pytest
from scipy.linalg import block_diag

from helilqr import LQRRegulator, StateSpace
from helilqr.analysis import (
    MARGINAL,
    STABLE,
    UNSTABLE,
    Mode,
    controllability_rank,
    report_from_spectrum,
    stability_report,
)

TABLE_2 = [-0.12, 0, -5.85 + 7.34j, -5.85 - 7.34j, 0.68 + 3.55j, 0.68 - 3.55j,
           0.42 + 2.62j, 0.42 - 2.62j, 0, -0.16, -3.36, -2.83, -1.01]


def _real_matrix_with_spectrum(spectrum, seed=3):
    """Real block-diagonal realisation of a conjugate-closed spectrum, then similarity."""
    blocks, seen = [], set()
    for i, z in enumerate(spectrum):
        if i in seen:
            continue
        z = complex(z)
        if z.imag == 0:
            blocks.append(np.array([[z.real]]))
        else:
            j = next(k for k in range(i + 1, len(spectrum))
                     if k not in seen and complex(spectrum[k]) == z.conjugate())
            seen.add(j)
            blocks.append(np.array([[z.real, z.imag], [-z.imag, z.real]]))
    d = block_diag(*blocks)
    t = np.random.default_rng(seed).standard_normal(d.shape) + 4 * np.eye(len(d))
    return t @ d @ np.linalg.inv(t)


def test_diagonal_hurwitz():
    rep = stability_report(np.diag([-1.0, -2.0]))
    assert rep.is_stable and rep.rhp_count == 0 and rep.marginal_count == 0


def test_table_pattern_from_spectrum():
    rep = report_from_spectrum(TABLE_2)
    assert (rep.rhp_count, rep.marginal_count, rep.is_stable) == (4, 2, False)


def test_table_pattern_from_matrix():
    a = _real_matrix_with_spectrum(TABLE_2)
    # exact zeros survive the similarity only to roundoff, well inside tol_marginal
    rep = stability_report(a)
    assert (rep.rhp_count, rep.marginal_count, rep.is_stable) == (4, 2, False)


def test_mode_frequency_and_damping():
    mode = Mode.from_eigenvalue(-5.85 + 7.34j)
    wn = np.hypot(5.85, 7.34)
    assert mode.natural_frequency == pytest.approx(wn, rel=1e-15)
    assert mode.natural_frequency == pytest.approx(9.386, abs=5e-4)
    assert mode.damping_ratio == pytest.approx(5.85 / wn, rel=1e-15)
    assert mode.damping_ratio == pytest.approx(0.623, abs=5e-4)
    assert mode.kind == STABLE


def test_zero_eigenvalue_is_marginal_with_undefined_damping():
    mode = Mode.from_eigenvalue(0.0)
    assert mode.kind == MARGINAL and mode.damping_ratio is None
    assert Mode.from_eigenvalue(2e-6).kind == UNSTABLE
    assert Mode.from_eigenvalue(5e-7 + 3j).kind == MARGINAL


def test_report_json_shape():
    doc = stability_report(np.diag([-1.0, 0.5])).to_dict()
    assert set(doc) == {"modes", "rhp_count", "marginal_count", "is_stable"}
    assert doc["modes"][0]["eigenvalue"].keys() == {"re", "im"}


@pytest.mark.parametrize(
    "a, b, rank",
    [
        (np.zeros((2, 2)), np.eye(2), 2),
        ([[0.0, 1.0], [0.0, 0.0]], [[0.0], [1.0]], 2),
        ([[0.0, 1.0], [0.0, 0.0]], np.zeros((2, 1)), 0),
    ],
)
def test_controllability_examples(a, b, rank):
    res = controllability_rank(StateSpace(a, b))
    assert res.rank == rank
    assert res.controllable == (rank == 2)


def test_decoupled_block_is_uncontrollable(rng):
    a1 = rng.standard_normal((3, 3))
    a2 = rng.standard_normal((2, 2))
    a = block_diag(a1, a2)
    b = np.vstack([rng.standard_normal((3, 2)), np.zeros((2, 2))])
    res = controllability_rank(StateSpace(a, b))
    assert res.rank == 3 and not res.controllable


def test_rank_invariant_under_input_permutation(shipped_system, rng):
    perm = rng.permutation(shipped_system.n_inputs)
    permuted = StateSpace(shipped_system.A, shipped_system.B[:, perm])
    assert controllability_rank(permuted).rank == controllability_rank(shipped_system).rank


def test_shipped_models_controllable(shipped_system):
    assert controllability_rank(shipped_system).rank == 13


def test_lqr_closed_loop_reports_stable(shipped_system):
    reg = LQRRegulator().fit(shipped_system)
    rep = stability_report(shipped_system.A - shipped_system.B @ reg.K_)
    assert rep.is_stable
