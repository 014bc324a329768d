"""Linearised 13-state small-scale helicopter model.

State vector ``[u v p q phi theta a b w r rfb c d]`` (body velocities, body
rates, roll/pitch attitude, main-rotor flapping, heave velocity, yaw rate,
yaw-gyro filter state, stabilizer-bar flapping) and input vector
``[th_lat th_lon th_ped th_col]``. Angles are in radians throughout.
"""

import json
import math
import warnings
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from ._validation import as_matrix
from .exceptions import DimensionError, LabelError, SchemaError, ValidationError

STATE_LABELS = ("u", "v", "p", "q", "phi", "theta", "a", "b", "w", "r", "rfb", "c", "d")
INPUT_LABELS = ("th_lat", "th_lon", "th_ped", "th_col")

STATE_UNITS = {
    "u": "ft/s", "v": "ft/s", "w": "ft/s",
    "p": "rad/s", "q": "rad/s", "r": "rad/s", "rfb": "rad/s",
    "phi": "rad", "theta": "rad", "a": "rad", "b": "rad", "c": "rad", "d": "rad",
}

DERIVATIVE_NAMES = (
    "X_u", "Y_v", "Z_w", "L_u", "L_v", "M_u", "M_v", "N_r",
    "X_a", "Y_b", "M_a", "L_b",
    "Z_col", "Z_r", "Z_a", "Z_b",
    "N_p", "N_v", "N_w", "N_ped", "N_col",
    "Y_ped", "M_col",
    "A_b", "B_a", "A_c", "B_d",
    "A_lat", "A_lon", "B_lat", "B_lon", "C_lon", "D_lat",
)

_METADATA_KEYS = {"units", "description", "source", "notes"}
_SECTION_KEYS = {
    "trim": ("u0", "v0", "w0"),
    "time_constants": ("tau_f", "tau_s"),
    "yaw_filter": ("K_r", "K_rfb"),
}


@dataclass(frozen=True)
class ParameterSet:
    """Stability/control derivatives, time constants and trim of one flight condition.

    The constructor does not validate, so degenerate sets (e.g. ``gravity=0``)
    can be built for structural tests; :func:`load_params` calls
    :meth:`validate`.
    """

    gravity: float
    tau_f: float
    tau_s: float
    u0: float = 0.0
    v0: float = 0.0
    w0: float = 0.0
    K_r: float = 0.0
    K_rfb: float = 0.0
    X_u: float = 0.0
    Y_v: float = 0.0
    Z_w: float = 0.0
    L_u: float = 0.0
    L_v: float = 0.0
    M_u: float = 0.0
    M_v: float = 0.0
    N_r: float = 0.0
    X_a: float = 0.0
    Y_b: float = 0.0
    M_a: float = 0.0
    L_b: float = 0.0
    Z_col: float = 0.0
    Z_r: float = 0.0
    Z_a: float = 0.0
    Z_b: float = 0.0
    N_p: float = 0.0
    N_v: float = 0.0
    N_w: float = 0.0
    N_ped: float = 0.0
    N_col: float = 0.0
    Y_ped: float = 0.0
    M_col: float = 0.0
    A_b: float = 0.0
    B_a: float = 0.0
    A_c: float = 0.0
    B_d: float = 0.0
    A_lat: float = 0.0
    A_lon: float = 0.0
    B_lat: float = 0.0
    B_lon: float = 0.0
    C_lon: float = 0.0
    D_lat: float = 0.0
    units: str = "ft-s-rad"
    metadata: dict = field(default_factory=dict, compare=False, repr=False)

    def validate(self):
        for f in fields(self):
            if f.type is float or f.type == "float":
                value = getattr(self, f.name)
                if not math.isfinite(value):
                    raise ValidationError(f"{f.name} must be finite, got {value}")
        for name in ("gravity", "tau_f", "tau_s"):
            if getattr(self, name) <= 0:
                raise ValidationError(
                    f"{name} must be positive, got {getattr(self, name)}"
                )
        if self.K_r != 0.0 and self.K_rfb >= 0.0:
            warnings.warn(
                f"yaw filter pole K_rfb={self.K_rfb} is not negative; "
                "the gyro filter state will not decay",
                RuntimeWarning,
                stacklevel=2,
            )
        return self

    def replace(self, **changes):
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return ParameterSet(**values)


def _number(section, key, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{section}.{key} must be a number, got {value!r}")
    return float(value)


def load_params(document):
    """Parse a parameter document (JSON text, bytes or an already-decoded dict).

    Layout::

        {"units": "ft-s-rad", "gravity": 32.17,
         "trim": {"u0": .., "v0": .., "w0": ..},
         "derivatives": {"X_u": .., ...},
         "time_constants": {"tau_f": .., "tau_s": ..},
         "yaw_filter": {"K_r": .., "K_rfb": ..}}

    Only ``gravity``, ``tau_f`` and ``tau_s`` are required; every other
    coefficient defaults to zero.
    """
    if isinstance(document, (str, bytes, bytearray)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"parameter document is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise SchemaError("parameter document must be a JSON object")

    known = _METADATA_KEYS | set(_SECTION_KEYS) | {"gravity", "derivatives"}
    unknown = sorted(set(document) - known)
    if unknown:
        raise SchemaError(f"unknown top-level field(s): {', '.join(unknown)}")

    values = {}
    if "gravity" not in document:
        raise SchemaError("gravity required")
    values["gravity"] = _number("", "gravity", document["gravity"])

    for section, keys in _SECTION_KEYS.items():
        body = document.get(section, {})
        if not isinstance(body, dict):
            raise SchemaError(f"{section} must be an object")
        extra = sorted(set(body) - set(keys))
        if extra:
            raise SchemaError(f"unknown {section} field(s): {', '.join(extra)}")
        for key in keys:
            if key in body:
                values[key] = _number(section, key, body[key])
    for key in ("tau_f", "tau_s"):
        if key not in values:
            raise SchemaError(f"{key} required")

    derivatives = document.get("derivatives", {})
    if not isinstance(derivatives, dict):
        raise SchemaError("derivatives must be an object")
    unknown = sorted(set(derivatives) - set(DERIVATIVE_NAMES))
    if unknown:
        raise SchemaError(f"unknown derivative(s): {', '.join(unknown)}")
    for key, value in derivatives.items():
        values[key] = _number("derivatives", key, value)

    units = document.get("units", "ft-s-rad")
    if not isinstance(units, str):
        raise SchemaError("units must be a string")
    metadata = {k: document[k] for k in ("description", "source", "notes") if k in document}
    return ParameterSet(units=units, metadata=metadata, **values).validate()


def load_params_file(path):
    path = Path(path)
    return load_params(path.read_text(encoding="utf-8"))


def params_to_document(p):
    doc = {"units": p.units, "gravity": p.gravity}
    doc.update(p.metadata)
    for section, keys in _SECTION_KEYS.items():
        doc[section] = {k: getattr(p, k) for k in keys}
    doc["derivatives"] = {k: getattr(p, k) for k in DERIVATIVE_NAMES}
    return doc


class StateSpace:
    """Immutable ``(A, B)`` pair with state and input labels."""

    def __init__(self, A, B, state_labels=None, input_labels=None):
        A = as_matrix(A, "A", square=True).copy()
        B = as_matrix(B, "B").copy()
        n, m = A.shape[0], B.shape[1]
        if B.shape[0] != n:
            raise DimensionError(f"B must have {n} rows, got {B.shape[0]}")
        if state_labels is None:
            state_labels = STATE_LABELS if n == len(STATE_LABELS) else tuple(
                f"x{i}" for i in range(n)
            )
        if input_labels is None:
            input_labels = INPUT_LABELS if m == len(INPUT_LABELS) else tuple(
                f"u{i}" for i in range(m)
            )
        state_labels, input_labels = tuple(state_labels), tuple(input_labels)
        if len(state_labels) != n or len(input_labels) != m:
            raise DimensionError("label counts do not match matrix dimensions")
        A.flags.writeable = False
        B.flags.writeable = False
        self.A = A
        self.B = B
        self.state_labels = state_labels
        self.input_labels = input_labels

    @property
    def n_states(self):
        return self.A.shape[0]

    @property
    def n_inputs(self):
        return self.B.shape[1]

    def state_index(self, label):
        try:
            return self.state_labels.index(label)
        except ValueError:
            raise LabelError(f"unknown state label {label!r}") from None

    def __repr__(self):
        return f"StateSpace(n_states={self.n_states}, n_inputs={self.n_inputs})"


def build_system(p):
    """Assemble the 13x13 dynamics and 13x4 input matrices from ``p``.

    Rotor (a, b) and stabilizer-bar (c, d) rows are the first-order flapping
    equations divided through by their time constants.
    """
    A = np.zeros((13, 13))
    B = np.zeros((13, 4))
    s = {label: i for i, label in enumerate(STATE_LABELS)}
    lat, lon, ped, col = range(4)
    g = p.gravity
    u, v, pr, q, phi, theta, a, b, w, r, rfb, c, d = (s[k] for k in STATE_LABELS)

    A[u, u] = p.X_u
    A[u, q] = -p.w0
    A[u, r] = p.v0
    A[u, theta] = -g
    A[u, a] = p.X_a

    # lateral trim coupling kept as w0*r - u0*q
    A[v, v] = p.Y_v
    A[v, r] = p.w0
    A[v, q] = -p.u0
    A[v, phi] = g
    A[v, b] = p.Y_b
    B[v, ped] = p.Y_ped

    A[pr, u] = p.L_u
    A[pr, v] = p.L_v
    A[pr, b] = p.L_b

    A[q, u] = p.M_u
    A[q, v] = p.M_v
    A[q, a] = p.M_a
    B[q, col] = p.M_col

    A[phi, pr] = 1.0
    A[theta, q] = 1.0

    A[a, q] = -1.0
    A[a, a] = -1.0 / p.tau_f
    A[a, b] = p.A_b / p.tau_f
    A[a, c] = p.A_c / p.tau_f
    B[a, lat] = p.A_lat / p.tau_f
    B[a, lon] = p.A_lon / p.tau_f

    A[b, pr] = -1.0
    A[b, b] = -1.0 / p.tau_f
    A[b, a] = p.B_a / p.tau_f
    A[b, d] = p.B_d / p.tau_f
    B[b, lat] = p.B_lat / p.tau_f
    B[b, lon] = p.B_lon / p.tau_f

    A[w, q] = p.u0
    A[w, pr] = -p.v0
    A[w, w] = p.Z_w
    A[w, a] = p.Z_a
    A[w, b] = p.Z_b
    A[w, r] = p.Z_r
    B[w, col] = p.Z_col

    A[r, v] = p.N_v
    A[r, pr] = p.N_p
    A[r, w] = p.N_w
    A[r, r] = p.N_r
    A[r, rfb] = -p.N_ped
    B[r, ped] = p.N_ped
    B[r, col] = p.N_col

    A[rfb, r] = p.K_r
    A[rfb, rfb] = p.K_rfb

    A[c, q] = -1.0
    A[c, c] = -1.0 / p.tau_s
    B[c, lon] = p.C_lon / p.tau_s

    A[d, pr] = -1.0
    A[d, d] = -1.0 / p.tau_s
    B[d, lat] = p.D_lat / p.tau_s

    return StateSpace(A, B, STATE_LABELS, INPUT_LABELS)


def output_matrix(ss, selected):
    """Selector matrix with one unit row per label in ``selected``."""
    selected = list(selected)
    if len(set(selected)) != len(selected):
        raise LabelError(f"duplicate labels in {selected}")
    C = np.zeros((len(selected), ss.n_states))
    for row, label in enumerate(selected):
        C[row, ss.state_index(label)] = 1.0
    return C
