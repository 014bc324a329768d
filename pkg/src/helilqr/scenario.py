"""Simulation scenarios: reference commands, input schedules, noise settings.

Scenario files are JSON. Values are in model units (ft, s, rad); any key
ending in ``_deg`` is read in degrees and converted on ingestion::

    {"kind": "closed_loop", "duration": 40, "dt": 0.01, "seed": 7,
     "reference": {"u_cmd": 10, "theta_cmd_deg": 3, "phi_cmd_deg": 1.5},
     "noise": {"enabled": true, "std": [0.1, 0.1, ...13 values]},
     "feedforward": false}

    {"kind": "open_loop", "duration": 30, "dt": 0.01,
     "input_profile": [{"t": 0, "th_col_deg": 3}, {"t": 5}]}
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import as_vector
from .exceptions import SchemaError, ValidationError
from .model import INPUT_LABELS, STATE_LABELS

OPEN_LOOP = "open_loop"
CLOSED_LOOP = "closed_loop"

DEFAULT_DT = 0.01
DEFAULT_DURATION = 40.0

FORWARD_SPEED = 10.0  # ft/s
FORWARD_PITCH_DEG = 3.0
FORWARD_ROLL_DEG = 1.5
CLIMB_SPEED = 10.0  # ft/s
OPEN_LOOP_COLLECTIVE_DEG = 3.0
OPEN_LOOP_PULSE = 5.0  # s
OPEN_LOOP_HORIZON = 30.0  # s

REFERENCE_CHANNELS = ("u", "v", "w", "phi", "theta")


@dataclass(frozen=True)
class ReferenceCommand:
    u_cmd: float = 0.0
    v_cmd: float = 0.0
    w_cmd: float = 0.0
    phi_cmd: float = 0.0
    theta_cmd: float = 0.0

    def __post_init__(self):
        for name in ("u_cmd", "v_cmd", "w_cmd", "phi_cmd", "theta_cmd"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")

    def channels(self):
        """Commanded values keyed by state label."""
        return {
            "u": self.u_cmd,
            "v": self.v_cmd,
            "w": self.w_cmd,
            "phi": self.phi_cmd,
            "theta": self.theta_cmd,
        }

    def as_state_vector(self, state_labels=STATE_LABELS):
        x_ref = np.zeros(len(state_labels))
        for label, value in self.channels().items():
            x_ref[state_labels.index(label)] = value
        return x_ref

    def scaled(self, factor):
        return ReferenceCommand(*(factor * v for v in self.channels().values()))


def make_reference(preset, climb_sign=-1.0):
    """Reference command for the ``forward_flight`` or ``axial_flight`` preset.

    Body z points down, so a climb is a negative ``w``; pass ``climb_sign=1``
    to flip that convention.
    """
    preset = preset.replace("-", "_")
    if preset in ("forward_flight", "forward"):
        return ReferenceCommand(
            u_cmd=FORWARD_SPEED,
            phi_cmd=math.radians(FORWARD_ROLL_DEG),
            theta_cmd=math.radians(FORWARD_PITCH_DEG),
        )
    if preset in ("axial_flight", "axial"):
        if climb_sign not in (-1, 1, -1.0, 1.0):
            raise ValidationError("climb_sign must be +1 or -1")
        return ReferenceCommand(w_cmd=climb_sign * CLIMB_SPEED)
    raise ValidationError(f"unknown reference preset {preset!r}")


@dataclass(frozen=True)
class NoiseConfig:
    std: np.ndarray = field(default_factory=lambda: np.zeros(len(STATE_LABELS)))
    enabled: bool = False

    def __post_init__(self):
        std = as_vector(self.std, len(STATE_LABELS), "noise std")
        if np.any(std < 0):
            raise ValidationError("noise standard deviations must be >= 0")
        std = std.copy()
        std.flags.writeable = False
        object.__setattr__(self, "std", std)

    @property
    def active(self):
        return self.enabled and bool(np.any(self.std > 0))


@dataclass(frozen=True)
class Scenario:
    kind: str
    duration: float = DEFAULT_DURATION
    dt: float = DEFAULT_DT
    initial_state: np.ndarray = field(
        default_factory=lambda: np.zeros(len(STATE_LABELS))
    )
    input_profile: tuple = ()
    reference: ReferenceCommand = field(default_factory=ReferenceCommand)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    seed: int = 0
    feedforward: bool = False

    def __post_init__(self):
        if self.kind not in (OPEN_LOOP, CLOSED_LOOP):
            raise ValidationError(f"kind must be {OPEN_LOOP!r} or {CLOSED_LOOP!r}")
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise ValidationError("duration must be positive")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValidationError("dt must be positive")
        if self.dt > self.duration:
            raise ValidationError("dt must not exceed duration")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ValidationError("seed must be a non-negative integer")
        x0 = as_vector(self.initial_state, len(STATE_LABELS), "initial_state").copy()
        x0.flags.writeable = False
        object.__setattr__(self, "initial_state", x0)
        profile = []
        last = 0.0
        for t, u in self.input_profile:
            t = float(t)
            if t < last or t > self.duration:
                raise ValidationError(
                    "input_profile times must be non-decreasing within [0, duration]"
                )
            last = t
            profile.append((t, as_vector(u, len(INPUT_LABELS), "input_profile entry")))
        object.__setattr__(self, "input_profile", tuple(profile))

    @property
    def n_steps(self):
        n = round(self.duration / self.dt)
        if abs(n * self.dt - self.duration) > 1e-9 * self.duration:
            n = math.floor(self.duration / self.dt)
        return int(n)

    def input_at(self, t):
        """Scheduled open-loop input held from the latest entry at or before ``t``."""
        u = np.zeros(len(INPUT_LABELS))
        for start, value in self.input_profile:
            if start <= t + 1e-9 * self.dt:
                u = value
            else:
                break
        return u


def preset_scenario(name, dt=None, duration=None, seed=0, noise=None,
                    feedforward=False, climb_sign=-1.0):
    """Built-in scenarios: ``forward``, ``axial`` and ``open-collective``."""
    name = name.replace("_", "-")
    noise = noise if noise is not None else NoiseConfig()
    if name == "open-collective":
        u_pulse = np.zeros(len(INPUT_LABELS))
        u_pulse[INPUT_LABELS.index("th_col")] = math.radians(OPEN_LOOP_COLLECTIVE_DEG)
        return Scenario(
            kind=OPEN_LOOP,
            duration=duration if duration is not None else OPEN_LOOP_HORIZON,
            dt=dt if dt is not None else DEFAULT_DT,
            input_profile=((0.0, u_pulse), (OPEN_LOOP_PULSE, np.zeros(len(INPUT_LABELS)))),
            noise=noise,
            seed=seed,
        )
    if name in ("forward", "axial"):
        return Scenario(
            kind=CLOSED_LOOP,
            duration=duration if duration is not None else DEFAULT_DURATION,
            dt=dt if dt is not None else DEFAULT_DT,
            reference=make_reference(name, climb_sign),
            noise=noise,
            seed=seed,
            feedforward=feedforward,
        )
    raise ValidationError(
        f"unknown preset {name!r}; expected forward, axial or open-collective"
    )


def _read_number(body, key, where):
    """Read ``key`` or ``key_deg`` from ``body``; returns None when absent."""
    if key in body and f"{key}_deg" in body:
        raise SchemaError(f"{where}: give either {key} or {key}_deg, not both")
    if f"{key}_deg" in body:
        value, degrees = body[f"{key}_deg"], True
    elif key in body:
        value, degrees = body[key], False
    else:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{where}.{key} must be a number")
    return math.radians(value) if degrees else float(value)


def _check_keys(body, allowed, where):
    allowed = set(allowed) | {f"{k}_deg" for k in allowed}
    unknown = sorted(set(body) - allowed)
    if unknown:
        raise SchemaError(f"unknown {where} field(s): {', '.join(unknown)}")


def load_scenario(document):
    """Parse a scenario document (JSON text or decoded dict)."""
    if isinstance(document, (str, bytes, bytearray)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"scenario is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise SchemaError("scenario must be a JSON object")
    _check_keys(
        document,
        ("kind", "duration", "dt", "seed", "initial_state", "input_profile",
         "reference", "noise", "feedforward", "description"),
        "scenario",
    )
    if "kind" not in document:
        raise SchemaError("kind required")
    kwargs = {"kind": document["kind"]}
    for key in ("duration", "dt"):
        if key in document:
            kwargs[key] = float(document[key])
    if "seed" in document:
        kwargs["seed"] = document["seed"]
    if "feedforward" in document:
        kwargs["feedforward"] = bool(document["feedforward"])

    x0 = document.get("initial_state")
    if x0 is not None:
        if isinstance(x0, dict):
            _check_keys(x0, STATE_LABELS, "initial_state")
            vec = np.zeros(len(STATE_LABELS))
            for i, label in enumerate(STATE_LABELS):
                value = _read_number(x0, label, "initial_state")
                if value is not None:
                    vec[i] = value
            kwargs["initial_state"] = vec
        else:
            kwargs["initial_state"] = np.asarray(x0, dtype=float)

    profile = []
    for i, entry in enumerate(document.get("input_profile", [])):
        where = f"input_profile[{i}]"
        if "t" not in entry:
            raise SchemaError(f"{where}.t required")
        _check_keys(entry, ("t",) + INPUT_LABELS, where)
        u = np.zeros(len(INPUT_LABELS))
        for j, label in enumerate(INPUT_LABELS):
            value = _read_number(entry, label, where)
            if value is not None:
                u[j] = value
        profile.append((float(entry["t"]), u))
    kwargs["input_profile"] = tuple(profile)

    ref = document.get("reference")
    if ref is not None:
        if isinstance(ref, str):
            kwargs["reference"] = make_reference(ref)
        else:
            names = ("u_cmd", "v_cmd", "w_cmd", "phi_cmd", "theta_cmd")
            _check_keys(ref, names, "reference")
            kwargs["reference"] = ReferenceCommand(
                **{k: v for k in names if (v := _read_number(ref, k, "reference")) is not None}
            )

    noise = document.get("noise")
    if noise is not None:
        _check_keys(noise, ("enabled", "std"), "noise")
        kwargs["noise"] = NoiseConfig(
            std=np.asarray(noise.get("std", np.zeros(len(STATE_LABELS))), dtype=float),
            enabled=bool(noise.get("enabled", True)),
        )
    return Scenario(**kwargs)


def load_scenario_file(path):
    return load_scenario(Path(path).read_text(encoding="utf-8"))
