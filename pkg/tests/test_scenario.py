import json
import math
import os

import numpy as np
import pytest

from rotorllc import scenario as sc_mod

SCENARIO_DIR = os.path.join(os.path.dirname(__file__), "..", "scenarios")


def seg(**kw):
    base = dict(t_start=1.0, t_end=3.0, axis="lon", shape="step", magnitude=10.0)
    base.update(kw)
    return sc_mod.ManeuverSegment(**base)


class TestSegments:
    def test_step_window(self):
        s = seg()
        assert s.value_at(0.5) == 0.0
        assert s.value_at(1.0) == 10.0
        assert s.value_at(2.999) == 10.0
        assert s.value_at(3.0) == 0.0

    def test_doublet_splits(self):
        s = seg(shape="doublet")
        assert s.value_at(1.5) == 10.0
        assert s.value_at(2.5) == -10.0

    def test_pulse_is_rectangular(self):
        s = seg(shape="pulse")
        assert s.value_at(2.0) == 10.0

    def test_bad_axis(self):
        with pytest.raises(sc_mod.ScenarioError):
            seg(axis="yaw")


class TestScenario:
    def test_overlap_rejected(self):
        with pytest.raises(sc_mod.ScenarioError, match="overlap"):
            sc_mod.Scenario(
                name="x", mode="llc_off", duration=5.0,
                script=(seg(), seg(t_start=2.0, t_end=4.0)),
            )

    def test_duration_must_cover_script(self):
        with pytest.raises(sc_mod.ScenarioError, match="duration"):
            sc_mod.Scenario(name="x", mode="llc_off", duration=2.0, script=(seg(),))

    def test_stick_sums_axes_independently(self):
        sc = sc_mod.Scenario(
            name="x", mode="llc_off", duration=5.0,
            script=(seg(), seg(axis="col", magnitude=-3.0)),
        )
        assert sc.stick_at(2.0, "lon") == 10.0
        assert sc.stick_at(2.0, "col") == -3.0
        assert sc.stick_at(2.0, "ped") == 0.0

    def test_json_round_trip(self):
        sc = sc_mod.Scenario(
            name="rt", mode="cue", duration=6.0, script=(seg(),),
            y_max=math.inf, pilot_policy="perfect_tracking", pilot_slew=120.0,
            mpc_overrides={"tp": 0.05},
        )
        back = sc_mod.Scenario.from_json(sc.to_json())
        assert back.name == "rt"
        assert math.isinf(back.y_max)
        assert back.pilot_policy == "perfect_tracking"
        assert back.pilot_slew == 120.0
        assert back.mpc_overrides["tp"] == 0.05
        assert back.script == sc.script

    def test_schema_rejects_bad_mode(self):
        doc = sc_mod.Scenario(name="x", mode="cue", duration=5.0, script=(seg(),)).to_json()
        doc["mode"] = "wat"
        import jsonschema

        with pytest.raises(jsonschema.ValidationError):
            sc_mod.Scenario.from_json(doc)

    def test_plant_overrides(self):
        doc = sc_mod.Scenario(name="x", mode="llc_off", duration=5.0, script=(seg(),)).to_json()
        doc["plant_overrides"] = {"nonlinearity_gain": 0.02}
        sc = sc_mod.Scenario.from_json(doc)
        assert sc.effective_plant().nonlinearity_gain == 0.02

    def test_shipped_scenarios_load(self):
        for name in ("attitude_step.json", "rate_doublet.json", "cue_pulse.json"):
            sc = sc_mod.Scenario.load(os.path.join(SCENARIO_DIR, name))
            assert sc.duration > 0
            assert sc.script

    def test_plant_by_path(self, tmp_path):
        from rotorllc.plant import default_params

        plant_path = tmp_path / "plant.json"
        with open(plant_path, "w") as fh:
            json.dump(default_params().to_json(), fh)
        doc = sc_mod.Scenario(name="x", mode="llc_off", duration=5.0, script=(seg(),)).to_json()
        doc["plant"] = "plant.json"
        sc_path = tmp_path / "sc.json"
        with open(sc_path, "w") as fh:
            json.dump(doc, fh)
        sc = sc_mod.Scenario.load(sc_path)
        assert sc.plant is not None
        assert sc.plant.omega == 27.0
