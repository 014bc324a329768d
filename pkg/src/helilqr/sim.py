"""Fixed-step RK4 simulation of the open- and closed-loop linear model."""

import io
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_matrix
from .exceptions import DimensionError, DivergenceError, ValidationError
from .lqr import closed_loop_matrix
from .model import INPUT_LABELS, STATE_LABELS
from .numerics import solve_linear
from .scenario import CLOSED_LOOP, OPEN_LOOP, REFERENCE_CHANNELS

DIVERGENCE_CAP = 1e9
CSV_HEADER = ("t",) + STATE_LABELS + INPUT_LABELS


def rk4_step(derivative, x, u, dt, t=0.0):
    """One classical Runge-Kutta step of ``x' = derivative(x, u)`` with ``u`` held."""
    if not dt > 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    k1 = derivative(x, u)
    k2 = derivative(x + 0.5 * dt * k1, u)
    k3 = derivative(x + 0.5 * dt * k2, u)
    k4 = derivative(x + dt * k3, u)
    x_next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(x_next)):
        raise DivergenceError(f"state became non-finite at t = {t + dt:.6g} s", t + dt)
    return x_next


def linear_derivative(A, B):
    def f(x, u):
        return A @ x + B @ u
    return f


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    diverged: bool = False
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    @property
    def final_state(self):
        return self.states[-1]

    def channel(self, label):
        if label in STATE_LABELS:
            return self.states[:, STATE_LABELS.index(label)]
        return self.controls[:, INPUT_LABELS.index(label)]

    def to_csv(self):
        buf = io.StringIO(newline="")
        buf.write(",".join(CSV_HEADER) + "\n")
        rows = np.column_stack([self.times, self.states, self.controls])
        for row in rows:
            buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
        return buf.getvalue()

    def write_csv(self, path):
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write(self.to_csv())

    @classmethod
    def from_csv(cls, text):
        lines = [ln for ln in text.splitlines() if ln.strip()]
        header = tuple(lines[0].split(","))
        if header != CSV_HEADER:
            raise ValidationError("trajectory CSV header does not match the expected columns")
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
        data = data.reshape(-1, len(CSV_HEADER))
        n = len(STATE_LABELS)
        return cls(data[:, 0], data[:, 1:1 + n], data[:, 1 + n:])


def _make_rng(seed):
    # PCG64 bit stream with numpy's ziggurat normal transform
    return np.random.Generator(np.random.PCG64(seed))


def simulate_open_loop(ss, sc, cap=DIVERGENCE_CAP):
    """Integrate ``x' = Ax + Bu(t)`` under the scenario's input schedule.

    Blow-up is an expected outcome here: once ``||x||_inf`` passes ``cap`` the
    trajectory is truncated and flagged ``diverged``.
    """
    if sc.kind != OPEN_LOOP:
        raise ValidationError("simulate_open_loop needs an open_loop scenario")
    f = linear_derivative(ss.A, ss.B)
    n_steps = sc.n_steps
    times = np.arange(n_steps + 1) * sc.dt
    states = np.empty((n_steps + 1, ss.n_states))
    controls = np.empty((n_steps + 1, ss.n_inputs))
    x = np.array(sc.initial_state, dtype=float)
    diverged = False
    last = n_steps
    for k in range(n_steps + 1):
        u = sc.input_at(times[k])
        states[k], controls[k] = x, u
        if np.max(np.abs(x)) > cap:
            diverged, last = True, k
            break
        if k == n_steps:
            break
        try:
            x = rk4_step(f, x, u, sc.dt, times[k])
        except DivergenceError:
            diverged, last = True, k
            break
    sl = slice(0, last + 1)
    return Trajectory(times[sl].copy(), states[sl].copy(), controls[sl].copy(), diverged)


def steady_state(ss, k, x_ref):
    """Equilibrium of ``x' = (A - BK)x + BK x_ref``: ``-(A - BK)^-1 BK x_ref``."""
    acl = closed_loop_matrix(ss, k)
    return -solve_linear(acl, ss.B @ (k @ x_ref))


def feedforward_trim(ss, reference, channels=REFERENCE_CHANNELS):
    """Least-squares trim ``(x_ss, u_ss)`` for commanded output channels.

    Solves ``[[A, B], [C, 0]] [x; u] = [0; y_cmd]`` in the least-squares
    sense, ``C`` selecting ``channels`` from the state.
    """
    cmd = reference.channels()
    n, m = ss.n_states, ss.n_inputs
    c = np.zeros((len(channels), n))
    for row, label in enumerate(channels):
        c[row, ss.state_index(label)] = 1.0
    lhs = np.block([[ss.A, ss.B], [c, np.zeros((len(channels), m))]])
    rhs = np.concatenate([np.zeros(n), [cmd[label] for label in channels]])
    z = np.linalg.lstsq(lhs, rhs, rcond=None)[0]
    return z[:n], z[n:]


def simulate_closed_loop(ss, k, sc, cap=DIVERGENCE_CAP):
    """Integrate the plant under ``u = K (x_ref - x_measured)``.

    ``x_measured`` is the true state plus Gaussian noise drawn once per step
    from a PCG64 stream seeded with ``sc.seed``. With ``sc.feedforward`` the
    law becomes ``u = u_ss + K (x_ss - x_measured)`` around the least-squares
    trim of the commanded channels.
    """
    if sc.kind != CLOSED_LOOP:
        raise ValidationError("simulate_closed_loop needs a closed_loop scenario")
    k = as_matrix(k, "K")
    if k.shape != (ss.n_inputs, ss.n_states):
        raise DimensionError(f"K must be {ss.n_inputs}x{ss.n_states}, got {k.shape}")
    if sc.feedforward:
        x_target, u_trim = feedforward_trim(ss, sc.reference)
    else:
        x_target = sc.reference.as_state_vector(ss.state_labels)
        u_trim = np.zeros(ss.n_inputs)

    f = linear_derivative(ss.A, ss.B)
    rng = _make_rng(sc.seed)
    sigma = sc.noise.std if sc.noise.active else None
    n_steps = sc.n_steps
    times = np.arange(n_steps + 1) * sc.dt
    states = np.empty((n_steps + 1, ss.n_states))
    controls = np.empty((n_steps + 1, ss.n_inputs))
    x = np.array(sc.initial_state, dtype=float)
    for i in range(n_steps + 1):
        x_meas = x if sigma is None else x + sigma * rng.standard_normal(ss.n_states)
        u = u_trim + k @ (x_target - x_meas)
        states[i], controls[i] = x, u
        if i == n_steps:
            break
        x = rk4_step(f, x, u, sc.dt, times[i])
        if np.max(np.abs(x)) > cap:
            raise DivergenceError(
                f"closed-loop state exceeded {cap:.0e} at t = {times[i + 1]:.6g} s",
                times[i + 1],
            )
    return Trajectory(times, states, controls, meta={"x_target": x_target, "u_trim": u_trim})


def settling_metrics(traj, x_ss=None, band=0.02):
    """Per-channel settling time into a ``band`` (fraction) envelope and final error.

    The envelope is ``band * max(|x_final - x_0|, |x_final|)`` around the
    final value (or ``x_ss`` when given).
    """
    target = traj.final_state if x_ss is None else np.asarray(x_ss)
    out = {}
    for j, label in enumerate(STATE_LABELS):
        y = traj.states[:, j]
        scale = max(abs(target[j] - y[0]), abs(target[j]))
        if scale == 0.0:
            out[label] = {"settling_time": 0.0, "final_error": float(abs(y[-1] - target[j]))}
            continue
        outside = np.nonzero(np.abs(y - target[j]) > band * scale)[0]
        if len(outside) == 0:
            t_settle = float(traj.times[0])
        elif outside[-1] == len(y) - 1:
            t_settle = None
        else:
            t_settle = float(traj.times[outside[-1] + 1])
        out[label] = {"settling_time": t_settle, "final_error": float(abs(y[-1] - target[j]))}
    return out
