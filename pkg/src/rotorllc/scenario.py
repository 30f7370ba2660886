"""Scenario documents: maneuver scripts, config blocks, JSON validation."""

from __future__ import annotations

import importlib.resources
import json
import math
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from .fcs import FcsConfig
from .llc import MpcConfig
from .plant import SurrogateParams, default_params

SCENARIO_SCHEMA_VERSION = 1

AXES = ("lon", "lat", "col", "ped")

MODE_LLC_OFF = "llc_off"
MODE_AUTO_LIMIT = "auto_limit"
MODE_CUE = "cue"

POLICY_SCRIPT = "script"
POLICY_PERFECT = "perfect_tracking"


class ScenarioError(ValueError):
    pass


def _load_schema(name: str) -> dict:
    ref = importlib.resources.files("rotorllc.schemas").joinpath(name)
    return json.loads(ref.read_text())


@dataclass(frozen=True)
class ManeuverSegment:
    """One scripted stick segment on one axis, % stick."""

    t_start: float
    t_end: float
    axis: str
    shape: str  # step | doublet | pulse
    magnitude: float

    def __post_init__(self):
        if self.t_end <= self.t_start:
            raise ScenarioError("segment must have t_end > t_start")
        if self.axis not in AXES:
            raise ScenarioError(f"unknown axis {self.axis!r}")
        if self.shape not in ("step", "doublet", "pulse"):
            raise ScenarioError(f"unknown shape {self.shape!r}")

    def value_at(self, t: float) -> float:
        if t < self.t_start or t >= self.t_end:
            return 0.0
        if self.shape == "doublet":
            half = 0.5 * (self.t_start + self.t_end)
            return self.magnitude if t < half else -self.magnitude
        return self.magnitude  # step and pulse are both rectangular windows


@dataclass(frozen=True)
class Scenario:
    """One closed-loop experiment definition."""

    name: str
    mode: str
    duration: float
    script: tuple  # of ManeuverSegment
    seed: int = 0
    dt_ctrl: float = 0.01
    plant: SurrogateParams | None = None  # None -> calibrated default
    model_orders: dict = field(default_factory=dict)
    fcs_overrides: dict = field(default_factory=dict)
    mpc_overrides: dict = field(default_factory=dict)
    y_max: float | None = None  # None -> MpcConfig default; inf disables limiting
    stick_gain: float = 0.5  # cue mode: % effector per % stick
    pilot_policy: str = POLICY_SCRIPT
    pilot_slew: float = math.inf  # scripted-pilot stick slew limit, %/s

    def __post_init__(self):
        if self.mode not in (MODE_LLC_OFF, MODE_AUTO_LIMIT, MODE_CUE):
            raise ScenarioError(f"unknown mode {self.mode!r}")
        if self.pilot_policy not in (POLICY_SCRIPT, POLICY_PERFECT):
            raise ScenarioError(f"unknown pilot policy {self.pilot_policy!r}")
        per_axis = {}
        for seg in self.script:
            per_axis.setdefault(seg.axis, []).append(seg)
            if seg.t_end > self.duration + 1e-9:
                raise ScenarioError("duration must cover the maneuver script")
        for axis, segs in per_axis.items():
            segs = sorted(segs, key=lambda s: s.t_start)
            for a, b in zip(segs, segs[1:]):
                if b.t_start < a.t_end - 1e-9:
                    raise ScenarioError(f"overlapping script segments on axis {axis!r}")

    def stick_at(self, t: float, axis: str = "lon") -> float:
        """Scripted stick deflection (%) on an axis at time t."""
        return sum(seg.value_at(t) for seg in self.script if seg.axis == axis)

    def effective_plant(self) -> SurrogateParams:
        return self.plant if self.plant is not None else default_params()

    def fcs_config(self, reduced, u_trim) -> FcsConfig:
        from .fcs import make_default_config

        over = dict(self.fcs_overrides)
        over.setdefault("dt_ctrl", self.dt_ctrl)
        return make_default_config(reduced, u_trim, **over)

    def mpc_config(self) -> MpcConfig:
        over = dict(self.mpc_overrides)
        if self.y_max is not None and math.isfinite(self.y_max):
            over["y_max"] = self.y_max
        return MpcConfig.from_json(over)

    @property
    def limiting_disabled(self) -> bool:
        return self.y_max is not None and math.isinf(self.y_max)

    def with_mode(self, mode: str) -> "Scenario":
        from dataclasses import replace

        return replace(self, mode=mode)

    def to_json(self) -> dict:
        doc = {
            "schema_version": SCENARIO_SCHEMA_VERSION,
            "name": self.name,
            "mode": self.mode,
            "duration": self.duration,
            "seed": self.seed,
            "dt_ctrl": self.dt_ctrl,
            "script": [
                {
                    "t_start": s.t_start,
                    "t_end": s.t_end,
                    "axis": s.axis,
                    "shape": s.shape,
                    "magnitude": s.magnitude,
                }
                for s in self.script
            ],
            "pilot": {"stick_gain": self.stick_gain, "policy": self.pilot_policy},
        }
        if math.isfinite(self.pilot_slew):
            doc["pilot"]["slew_rate"] = self.pilot_slew
        if self.plant is not None:
            doc["plant"] = self.plant.to_json()
        if self.model_orders:
            doc["model"] = dict(self.model_orders)
        if self.fcs_overrides:
            doc["fcs"] = dict(self.fcs_overrides)
        if self.mpc_overrides:
            doc["mpc"] = dict(self.mpc_overrides)
        if self.y_max is not None:
            doc["y_max"] = "inf" if math.isinf(self.y_max) else self.y_max
        return doc

    @classmethod
    def from_json(cls, doc: dict, base_dir=None) -> "Scenario":
        jsonschema.validate(doc, _load_schema("scenario.schema.json"))
        plant_spec = doc.get("plant")
        plant = None
        if isinstance(plant_spec, str):
            import os

            path = plant_spec if base_dir is None else os.path.join(base_dir, plant_spec)
            with open(path) as fh:
                plant_doc = json.load(fh)
            jsonschema.validate(plant_doc, _load_schema("plant.schema.json"))
            plant = SurrogateParams.from_json(plant_doc)
        elif isinstance(plant_spec, dict):
            jsonschema.validate(plant_spec, _load_schema("plant.schema.json"))
            plant = SurrogateParams.from_json(plant_spec)
        overrides = doc.get("plant_overrides")
        if overrides:
            base = plant if plant is not None else default_params()
            kw = {}
            for k, v in overrides.items():
                kw[k] = np.asarray(v, dtype=float) if isinstance(v, list) else v
            plant = base.with_changes(**kw)

        y_max = doc.get("y_max")
        if isinstance(y_max, str):
            if y_max not in ("inf", "+inf", "Infinity"):
                raise ScenarioError(f"bad y_max string {y_max!r}")
            y_max = math.inf

        pilot = doc.get("pilot", {})
        script = tuple(
            ManeuverSegment(
                t_start=float(s["t_start"]),
                t_end=float(s["t_end"]),
                axis=s["axis"],
                shape=s["shape"],
                magnitude=float(s["magnitude"]),
            )
            for s in doc["script"]
        )
        return cls(
            name=doc["name"],
            mode=doc["mode"],
            duration=float(doc["duration"]),
            script=script,
            seed=int(doc.get("seed", 0)),
            dt_ctrl=float(doc.get("dt_ctrl", 0.01)),
            plant=plant,
            model_orders=dict(doc.get("model", {})),
            fcs_overrides=dict(doc.get("fcs", {})),
            mpc_overrides=dict(doc.get("mpc", {})),
            y_max=y_max,
            stick_gain=float(pilot.get("stick_gain", 0.5)),
            pilot_policy=pilot.get("policy", POLICY_SCRIPT),
            pilot_slew=float(pilot.get("slew_rate", math.inf)),
        )

    @classmethod
    def load(cls, path) -> "Scenario":
        import os

        with open(path) as fh:
            doc = json.load(fh)
        return cls.from_json(doc, base_dir=os.path.dirname(os.fspath(path)))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)
