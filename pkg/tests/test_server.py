import asyncio
import json
import math

import numpy as np
import pytest

from rotorllc import runner
from rotorllc.scenario import ManeuverSegment, Scenario
from rotorllc.server import serve_realtime, telemetry_message

PORT = 8931

TELEMETRY_FIELDS = {
    "type", "schema_version", "t", "cm", "cue_height", "y_1rev_exact",
    "y_1rev_predicted", "y_max", "u_pilot", "u_ext", "pitch_rate",
    "attitude", "airspeed", "stale",
}


def cue_scenario(duration=1.2, policy="script"):
    return Scenario(
        name="srv",
        mode="cue",
        duration=duration,
        script=(ManeuverSegment(0.2, duration, "lon", "step", 30.0),),
        pilot_policy=policy,
        pilot_slew=200.0,
    )


@pytest.fixture(scope="module")
def cue_setup():
    return runner.prepare(cue_scenario())


class TestTelemetryMessage:
    def _row(self, **kw):
        base = {
            "t": 1.0, "cm": 3.0, "y_1rev_exact": 300.0, "y_1rev_predicted": 299.0,
            "y_max": 350.0, "u_pilot_lon": 55.0, "u_ext": 58.0,
            "x_q": 1.0, "x_theta": 2.0, "x_vx": -0.5, "solve_ms": 0.5,
        }
        base.update(kw)
        return base

    def test_cue_height_scales_margin(self):
        msg = telemetry_message(self._row(cm=4.0), cue_gain=2.5, stale=False, held_cm=0.0)
        assert msg["cue_height"] == 10.0
        assert msg["schema_version"] == 1

    def test_zero_margin_zero_height(self):
        msg = telemetry_message(self._row(cm=0.0), cue_gain=3.0, stale=False, held_cm=0.0)
        assert msg["cue_height"] == 0.0

    def test_negative_margin_negative_height(self):
        msg = telemetry_message(self._row(cm=-2.0), cue_gain=1.5, stale=False, held_cm=0.0)
        assert msg["cue_height"] == -3.0

    def test_stale_holds_previous(self):
        msg = telemetry_message(self._row(cm=-2.0), cue_gain=1.0, stale=True, held_cm=7.0)
        assert msg["cm"] == 7.0 and msg["stale"] is True


async def _run_with_client(scenario, setup, inputs, n_read=30, port=PORT):
    from websockets.asyncio.client import connect

    ready = asyncio.Event()
    task = asyncio.create_task(
        serve_realtime(scenario, port, cue_gain=2.0, setup=setup, ready_event=ready)
    )
    await ready.wait()
    received = []
    async with connect(f"ws://127.0.0.1:{port}") as ws:
        for msg in inputs:
            await ws.send(json.dumps(msg))
        for _ in range(n_read):
            received.append(json.loads(await ws.recv()))
    result = await task
    return received, result


class TestInputSlot:
    def test_hold_then_neutral_after_disconnect(self, monkeypatch):
        from rotorllc import server as server_mod

        slot = server_mod._InputSlot()
        clock = {"t": 100.0}
        monkeypatch.setattr(server_mod.time, "monotonic", lambda: clock["t"])
        assert slot.current(lambda: 42.0) == 42.0  # no client ever: script
        slot.connected = 1
        slot.set(30.0)
        assert slot.current(lambda: 42.0) == 30.0
        slot.connected = 0  # disconnect: hold the last stick briefly
        clock["t"] += 0.3
        assert slot.current(lambda: 42.0) == 30.0
        clock["t"] += 0.3  # past the 0.5 s hold window: recenter
        assert slot.current(lambda: 42.0) == 0.0


class TestSession:
    def test_telemetry_schema_and_stick(self, cue_setup):
        msgs, result = asyncio.run(
            _run_with_client(
                cue_scenario(), cue_setup,
                [{"type": "stick", "axis": "lon", "value": 25.0}, {"type": "nonsense"}],
                port=PORT,
            )
        )
        tele = [m for m in msgs if m["type"] == "telemetry"]
        errors = [m for m in msgs if m["type"] == "error"]
        assert tele and set(tele[0]) == TELEMETRY_FIELDS
        assert errors and "nonsense" in errors[0]["reason"]
        # live stick reached the loop: 50 + 25 * 0.5 = 62.5
        assert any(abs(m["u_pilot"] - 62.5) < 1e-9 for m in tele)
        assert len(result.trace) == 120
        assert result.trace["t"][0] == pytest.approx(0.01)

    def test_record_replay_deterministic(self, cue_setup):
        sc = cue_scenario()
        msgs, result = asyncio.run(
            _run_with_client(
                sc, cue_setup,
                [{"type": "stick", "axis": "lon", "value": v} for v in (10.0, 22.0)],
                n_read=10, port=PORT + 1,
            )
        )
        replay = runner.run_piloted(sc, cue_setup, stick_sequence=result.sticks)
        assert result.trace.equals(replay, deterministic_only=True)

    def test_scripted_fallback_without_client(self, cue_setup):
        async def run():
            return await serve_realtime(cue_scenario(duration=0.6), PORT + 2, setup=cue_setup)

        result = asyncio.run(run())
        # the scripted pilot engaged after 0.2 s (slew limited)
        assert result.trace["u_pilot_lon"].max() > 55.0
        scripted = runner.run_piloted(cue_scenario(duration=0.6), cue_setup)
        assert result.trace.equals(scripted, deterministic_only=True)
