"""Real-time cue session server.

Runs the piloted loop paced at dt_ctrl on the asyncio event loop and serves
JSON-per-message telemetry over a websocket (protocol.md at the repo root
documents the schemas).  Exactly two logical activities exist: the paced
simulation task and the network endpoint.  They share a latest-stick-wins
input slot and bounded per-client telemetry queues, so the simulation never
blocks on the network.

Client disconnect holds the last stick for 0.5 s and then recenters; with no
client at all the scenario script plays (slew-limited, like run_piloted).
A solve overrunning the frame budget holds the previously published margin
and raises the stale flag on the telemetry; the trace records the miss.
"""

from __future__ import annotations

import asyncio
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .runner import LoopSetup, PilotedLoop, prepare
from .scenario import Scenario
from .trace import SimTrace, TraceRecorder

PROTOCOL_VERSION = 1
HOLD_AFTER_DISCONNECT = 0.5  # s
TELEMETRY_QUEUE = 64
JITTER_FRACTION = 0.10


@dataclass
class SessionResult:
    trace: SimTrace
    sticks: list
    deadline_misses: int
    jitter_frames: int


class _InputSlot:
    """Latest-stick-wins shared input with disconnect hold semantics."""

    def __init__(self):
        self.value = 0.0
        self.last_update = None  # wall time of last client message
        self.connected = 0

    def set(self, value: float):
        self.value = float(np.clip(value, -100.0, 100.0))
        self.last_update = time.monotonic()

    def current(self, scripted_fallback):
        if self.connected == 0 and self.last_update is None:
            return scripted_fallback()
        if self.connected == 0 and self.last_update is not None:
            if time.monotonic() - self.last_update > HOLD_AFTER_DISCONNECT:
                return 0.0  # neutral after the hold window
        return self.value


def telemetry_message(row: dict, cue_gain: float, stale: bool, held_cm: float) -> dict:
    cm = held_cm if stale else row["cm"]
    return {
        "type": "telemetry",
        "schema_version": PROTOCOL_VERSION,
        "t": row["t"],
        "cm": cm,
        "cue_height": cue_gain * cm if math.isfinite(cm) else cm,
        "y_1rev_exact": row["y_1rev_exact"],
        "y_1rev_predicted": row["y_1rev_predicted"],
        "y_max": row["y_max"],
        "u_pilot": row["u_pilot_lon"],
        "u_ext": row["u_ext"],
        "pitch_rate": row["x_q"],
        "attitude": row["x_theta"],
        "airspeed": row["x_vx"],
        "stale": bool(stale),
    }


class RealtimeSession:
    def __init__(self, scenario: Scenario, cue_gain: float = 1.0, setup: LoopSetup | None = None):
        self.scenario = scenario
        self.cue_gain = cue_gain
        self.setup = prepare(scenario) if setup is None else setup
        self.loop_obj = PilotedLoop(self.setup)
        if not scenario.limiting_disabled:
            # Compile/warm the solver path off the clock so the first paced
            # frame does not blow its deadline.
            self.setup.controller.step(
                self.loop_obj.state.x, self.setup.trim.u_trim, self.setup.y_max
            )
        self.input = _InputSlot()
        self.clients: set = set()
        self.queues: dict = {}
        self.sticks: list = []
        self.deadline_misses = 0
        self.jitter_frames = 0
        self._rec = TraceRecorder(self.loop_obj.columns, int(round(scenario.duration / scenario.dt_ctrl)))
        self._script_prev = 0.0
        self.done = asyncio.Event()
        self.result: SessionResult | None = None

    def _scripted_stick(self, t: float) -> float:
        raw = self.scenario.stick_at(t, "lon")
        step = self.scenario.pilot_slew * self.scenario.dt_ctrl
        val = float(np.clip(raw, self._script_prev - step, self._script_prev + step))
        self._script_prev = val
        return val

    def _publish(self, msg: dict):
        text = json.dumps(msg)
        for q in self.queues.values():
            if q.full():
                try:
                    q.get_nowait()  # drop the oldest frame; renderers want latest
                except asyncio.QueueEmpty:
                    pass
            q.put_nowait(text)

    async def sim_task(self):
        dt = self.scenario.dt_ctrl
        n_frames = int(round(self.scenario.duration / dt))
        t0 = time.monotonic()
        held_cm = 0.0
        try:
            for k in range(n_frames):
                stick = self.input.current(lambda: self._scripted_stick(k * dt))
                self.sticks.append(stick)
                row = self.loop_obj.step(stick)
                stale = row["solve_ms"] > dt * 1e3
                if stale:
                    self.deadline_misses += 1
                    row["stale"] = 1.0
                else:
                    held_cm = row["cm"]
                self._rec.record(**row)
                self._publish(telemetry_message(row, self.cue_gain, stale, held_cm))

                deadline = t0 + (k + 1) * dt
                now = time.monotonic()
                if now - deadline > JITTER_FRACTION * dt:
                    self.jitter_frames += 1
                if deadline > now:
                    await asyncio.sleep(deadline - now)
        finally:
            self.result = SessionResult(
                trace=self._rec.finalize(),
                sticks=list(self.sticks),
                deadline_misses=self.deadline_misses,
                jitter_frames=self.jitter_frames,
            )
            self.done.set()

    async def client_handler(self, websocket):
        queue: asyncio.Queue = asyncio.Queue(maxsize=TELEMETRY_QUEUE)
        self.queues[websocket] = queue
        self.clients.add(websocket)
        self.input.connected += 1

        async def sender():
            while True:
                msg = await queue.get()
                await websocket.send(msg)

        send_task = asyncio.create_task(sender())
        try:
            async for raw in websocket:
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    await websocket.send(json.dumps({"type": "error", "reason": "bad json"}))
                    continue
                if msg.get("type") == "stick" and msg.get("axis") == "lon":
                    self.input.set(float(msg.get("value", 0.0)))
                elif msg.get("type") == "stick":
                    pass  # other axes are held at trim in this loop
                else:
                    await websocket.send(
                        json.dumps({"type": "error", "reason": f"unknown message {msg.get('type')!r}"})
                    )
        finally:
            send_task.cancel()
            self.clients.discard(websocket)
            self.queues.pop(websocket, None)
            self.input.connected -= 1
            self.input.last_update = time.monotonic()


async def serve_realtime(
    scenario: Scenario,
    port: int,
    cue_gain: float = 1.0,
    host: str = "127.0.0.1",
    setup: LoopSetup | None = None,
    ready_event: asyncio.Event | None = None,
) -> SessionResult:
    """Run one real-time session to scenario completion; returns the log."""
    from websockets.asyncio.server import serve

    session = RealtimeSession(scenario, cue_gain=cue_gain, setup=setup)
    async with serve(session.client_handler, host, port):
        if ready_event is not None:
            ready_event.set()
        sim = asyncio.create_task(session.sim_task())
        await session.done.wait()
        await sim
    return session.result
