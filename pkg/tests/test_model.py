import json
import warnings

import numpy as np
import pytest

from helilqr.exceptions import LabelError, SchemaError, ValidationError
from helilqr.model import (
    DERIVATIVE_NAMES,
    INPUT_LABELS,
    STATE_LABELS,
    ParameterSet,
    build_system,
    load_params,
    output_matrix,
    params_to_document,
)

S = {k: i for i, k in enumerate(STATE_LABELS)}
U = {k: i for i, k in enumerate(INPUT_LABELS)}
TAU_F, TAU_S = 0.5, 0.25

# derivative -> [(matrix, row, col, multiplier)], transcribed from the row equations
ENTRY_MAP = {
    "X_u": [("A", "u", "u", 1)],
    "X_a": [("A", "u", "a", 1)],
    "Y_v": [("A", "v", "v", 1)],
    "Y_b": [("A", "v", "b", 1)],
    "Y_ped": [("B", "v", "th_ped", 1)],
    "L_u": [("A", "p", "u", 1)],
    "L_v": [("A", "p", "v", 1)],
    "L_b": [("A", "p", "b", 1)],
    "M_u": [("A", "q", "u", 1)],
    "M_v": [("A", "q", "v", 1)],
    "M_a": [("A", "q", "a", 1)],
    "M_col": [("B", "q", "th_col", 1)],
    "A_b": [("A", "a", "b", 1 / TAU_F)],
    "A_c": [("A", "a", "c", 1 / TAU_F)],
    "A_lat": [("B", "a", "th_lat", 1 / TAU_F)],
    "A_lon": [("B", "a", "th_lon", 1 / TAU_F)],
    "B_a": [("A", "b", "a", 1 / TAU_F)],
    "B_d": [("A", "b", "d", 1 / TAU_F)],
    "B_lat": [("B", "b", "th_lat", 1 / TAU_F)],
    "B_lon": [("B", "b", "th_lon", 1 / TAU_F)],
    "Z_w": [("A", "w", "w", 1)],
    "Z_a": [("A", "w", "a", 1)],
    "Z_b": [("A", "w", "b", 1)],
    "Z_r": [("A", "w", "r", 1)],
    "Z_col": [("B", "w", "th_col", 1)],
    "N_v": [("A", "r", "v", 1)],
    "N_p": [("A", "r", "p", 1)],
    "N_w": [("A", "r", "w", 1)],
    "N_r": [("A", "r", "r", 1)],
    "N_ped": [("B", "r", "th_ped", 1), ("A", "r", "rfb", -1)],
    "N_col": [("B", "r", "th_col", 1)],
    "K_r": [("A", "rfb", "r", 1)],
    "K_rfb": [("A", "rfb", "rfb", 1)],
    "C_lon": [("B", "c", "th_lon", 1 / TAU_S)],
    "D_lat": [("B", "d", "th_lat", 1 / TAU_S)],
    "u0": [("A", "v", "q", -1), ("A", "w", "q", 1)],
    "v0": [("A", "u", "r", 1), ("A", "w", "p", -1)],
    "w0": [("A", "u", "q", -1), ("A", "v", "r", 1)],
}


def _skeleton():
    return build_system(ParameterSet(gravity=0.0, tau_f=TAU_F, tau_s=TAU_S))


def test_every_coefficient_is_mapped():
    assert set(DERIVATIVE_NAMES) | {"K_r", "K_rfb", "u0", "v0", "w0"} == set(ENTRY_MAP)


@pytest.mark.parametrize("name", sorted(ENTRY_MAP))
def test_one_hot_sweep(name):
    base = _skeleton()
    value = 1.7
    ss = build_system(ParameterSet(gravity=0.0, tau_f=TAU_F, tau_s=TAU_S, **{name: value}))
    dA = np.zeros((13, 13))
    dB = np.zeros((13, 4))
    for mat, row, col, mult in ENTRY_MAP[name]:
        if mat == "A":
            dA[S[row], S[col]] += value * mult
        else:
            dB[S[row], U[col]] += value * mult
    np.testing.assert_allclose(ss.A - base.A, dA, rtol=1e-15, atol=0)
    np.testing.assert_allclose(ss.B - base.B, dB, rtol=1e-15, atol=0)


def test_structural_skeleton_unit_time_constants():
    ss = build_system(ParameterSet(gravity=0.0, tau_f=1.0, tau_s=1.0))
    expected = {
        ("phi", "p"): 1, ("theta", "q"): 1,
        ("a", "q"): -1, ("b", "p"): -1, ("a", "a"): -1, ("b", "b"): -1,
        ("c", "q"): -1, ("d", "p"): -1, ("c", "c"): -1, ("d", "d"): -1,
    }
    A = np.zeros((13, 13))
    for (r, c), v in expected.items():
        A[S[r], S[c]] = v
    np.testing.assert_array_equal(ss.A, A)
    np.testing.assert_array_equal(ss.B, np.zeros((13, 4)))


def test_gravity_entries():
    ss = build_system(ParameterSet(gravity=32.17, tau_f=1.0, tau_s=1.0))
    assert ss.A[S["u"], S["theta"]] == -32.17
    assert ss.A[S["v"], S["phi"]] == 32.17


def test_flapping_row_divided_by_time_constant():
    ss = build_system(ParameterSet(gravity=0.0, tau_f=0.1, tau_s=1.0, A_b=0.2))
    assert ss.A[S["a"], S["a"]] == pytest.approx(-10.0)
    assert ss.A[S["a"], S["b"]] == pytest.approx(2.0)
    assert ss.A[S["a"], S["q"]] == -1.0


def test_linearity_in_derivatives(rng):
    names = list(DERIVATIVE_NAMES) + ["K_r", "K_rfb"]
    p1 = {n: float(v) for n, v in zip(names, rng.standard_normal(len(names)))}
    p2 = {n: float(v) for n, v in zip(names, rng.standard_normal(len(names)))}
    fixed = dict(gravity=32.17, tau_f=0.3, tau_s=0.7, u0=5.0, v0=-1.0, w0=2.0)
    s1 = build_system(ParameterSet(**fixed, **p1))
    s2 = build_system(ParameterSet(**fixed, **p2))
    s12 = build_system(ParameterSet(**fixed, **{n: p1[n] + p2[n] for n in names}))
    s0 = build_system(ParameterSet(**fixed))
    np.testing.assert_allclose(s12.A, s1.A + s2.A - s0.A, atol=1e-12)
    np.testing.assert_allclose(s12.B, s1.B + s2.B - s0.B, atol=1e-12)


def test_kinematic_rows_and_sparsity(forward_system):
    A, B = forward_system.A, forward_system.B
    assert A.shape == (13, 13) and B.shape == (13, 4)
    for row, col in (("phi", "p"), ("theta", "q")):
        expected = np.zeros(13)
        expected[S[col]] = 1.0
        np.testing.assert_array_equal(A[S[row]], expected)
        np.testing.assert_array_equal(B[S[row]], np.zeros(4))
    allowed_A = {(S[r], S[c]) for m in ENTRY_MAP.values() for (mat, r, c, _) in m if mat == "A"}
    allowed_A |= {(S["u"], S["theta"]), (S["v"], S["phi"]),
                  (S["a"], S["a"]), (S["b"], S["b"]), (S["c"], S["c"]), (S["d"], S["d"]),
                  (S["phi"], S["p"]), (S["theta"], S["q"]),
                  (S["a"], S["q"]), (S["b"], S["p"]), (S["c"], S["q"]), (S["d"], S["p"])}
    mask = np.ones_like(A, dtype=bool)
    for idx in allowed_A:
        mask[idx] = False
    assert not np.any(A[mask])


def test_state_space_is_immutable(forward_system):
    with pytest.raises(ValueError):
        forward_system.A[0, 0] = 1.0


def test_load_params_defaults():
    p = load_params('{"gravity": 32.17, "time_constants": {"tau_f": 0.1, "tau_s": 0.3}}')
    assert p.gravity == 32.17 and p.tau_f == 0.1 and p.tau_s == 0.3
    assert all(getattr(p, n) == 0.0 for n in DERIVATIVE_NAMES)


def test_load_params_missing_tau_f():
    with pytest.raises(SchemaError, match="tau_f required"):
        load_params({"gravity": 32.17, "time_constants": {"tau_s": 0.3}})


@pytest.mark.parametrize(
    "doc, exc, match",
    [
        ({"gravity": -9.81, "time_constants": {"tau_f": 0.1, "tau_s": 0.3}},
         ValidationError, "gravity must be positive"),
        ({"time_constants": {"tau_f": 0.1, "tau_s": 0.3}}, SchemaError, "gravity required"),
        ({"gravity": 1, "time_constants": {"tau_f": 0.1, "tau_s": 0.3},
          "derivatives": {"X_uu": 1.0}}, SchemaError, "X_uu"),
        ({"gravity": 1, "time_constants": {"tau_f": 0.0, "tau_s": 0.3}},
         ValidationError, "tau_f"),
        ({"gravity": 1, "time_constants": {"tau_f": 0.1, "tau_s": 0.3},
          "derivatives": {"X_u": "fast"}}, SchemaError, "number"),
        ({"gravity": 1, "tau_f": 0.1}, SchemaError, "unknown top-level"),
    ],
)
def test_load_params_errors(doc, exc, match):
    with pytest.raises(exc, match=match):
        load_params(doc)


def test_load_params_rejects_non_finite():
    text = '{"gravity": 1, "time_constants": {"tau_f": 0.1, "tau_s": 0.3}, "derivatives": {"X_u": NaN}}'
    with pytest.raises(ValidationError):
        load_params(text)


def test_units_carried_through_and_round_trip():
    doc = {"units": "m-s-rad", "gravity": 9.81,
           "time_constants": {"tau_f": 0.1, "tau_s": 0.3},
           "derivatives": {"X_u": -0.05}, "yaw_filter": {"K_r": 2.0, "K_rfb": -8.0}}
    p = load_params(json.dumps(doc))
    assert p.units == "m-s-rad"
    assert load_params(params_to_document(p)) == p


def test_non_negative_yaw_filter_pole_warns():
    doc = {"gravity": 1, "time_constants": {"tau_f": 0.1, "tau_s": 0.3},
           "yaw_filter": {"K_r": 2.0, "K_rfb": 1.0}}
    with pytest.warns(RuntimeWarning, match="K_rfb"):
        load_params(doc)
    doc["yaw_filter"]["K_rfb"] = -1.0
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        load_params(doc)


def test_output_matrix(forward_system):
    np.testing.assert_array_equal(output_matrix(forward_system, STATE_LABELS), np.eye(13))
    c = output_matrix(forward_system, ["u"])
    assert c.shape == (1, 13) and c[0, 0] == 1 and c.sum() == 1
    c = output_matrix(forward_system, ["phi", "theta"])
    assert c[0, 4] == 1 and c[1, 5] == 1 and c.sum() == 2
    with pytest.raises(LabelError):
        output_matrix(forward_system, ["psi"])
    with pytest.raises(LabelError):
        output_matrix(forward_system, ["u", "u"])
