/**
 * Cockpit wiring: cue widget, strip charts, stick input, session client.
 * Static deployment; the server URL comes from ?ws=... or the input box.
 */

import { StripChart } from "./charts.js";
import { SessionClient } from "./client.js";
import { CueModel } from "./cue.js";
import { StickInput } from "./input.js";
import { TelemetryFrame } from "./protocol.js";

const $ = (id: string) => document.getElementById(id)!;

const cue = new CueModel();
const stick = new StickInput();
const loadChart = new StripChart(15);
const loadIdx = loadChart.addSeries("1/rev load", "#e4b34a");
const predIdx = loadChart.addSeries("predicted", "#7e9ce0");
const limitIdx = loadChart.addSeries("limit", "#d0555d");
const stickChart = new StripChart(15);
const pilotIdx = stickChart.addSeries("pilot", "#9ad17e");
const extIdx = stickChart.addSeries("extremal", "#d0555d");

let client: SessionClient | null = null;
let connected = false;
let lastFrame: TelemetryFrame | null = null;

function wsUrl(): string {
  const fromQuery = new URLSearchParams(location.search).get("ws");
  const box = $("ws-url") as HTMLInputElement;
  if (fromQuery) box.value = fromQuery;
  return box.value;
}

function connect(): void {
  client?.close();
  client = new SessionClient(wsUrl(), {
    onMessage: (msg) => {
      if (msg.type === "error") {
        ($("status") as HTMLElement).textContent = `server: ${msg.reason}`;
        return;
      }
      lastFrame = msg;
      cue.applyFrame(msg, performance.now());
      loadChart.push(loadIdx, msg.t, msg.y_1rev_exact);
      loadChart.push(predIdx, msg.t, msg.y_1rev_predicted);
      loadChart.push(limitIdx, msg.t, msg.y_max);
      stickChart.push(pilotIdx, msg.t, msg.u_pilot);
      stickChart.push(extIdx, msg.t, msg.u_ext);
    },
    onStatus: (ok) => {
      connected = ok;
      ($("status") as HTMLElement).textContent = ok ? "connected" : "reconnecting...";
      if (!ok) stick.recenter(); // inputs are suppressed while disconnected
    },
  });
  client.connect();
}

function pollGamepad(): void {
  const pads = navigator.getGamepads?.() ?? [];
  const pad = Array.from(pads).find((p) => p);
  stick.setGamepadAxis(pad ? -pad.axes[1] : null); // push forward = positive
}

function renderCue(): void {
  const el = $("cue-bar") as HTMLElement;
  const badge = $("stale-badge") as HTMLElement;
  const state = cue.render(performance.now());
  el.style.display = state.visible ? "block" : "none";
  badge.style.display = state.stale && state.visible ? "block" : "none";
  const h = Math.abs(state.heightPx);
  el.style.height = `${h}px`;
  if (state.heightPx >= 0) {
    el.style.top = `${state.referencePx - h}px`;
  } else {
    el.style.top = `${state.referencePx}px`;
  }
  el.dataset.color = state.stale ? "stale" : state.color;
}

function renderLoop(): void {
  pollGamepad();
  renderCue();
  const loadCanvas = $("load-chart") as HTMLCanvasElement;
  loadChart.draw(loadCanvas.getContext("2d")!, loadCanvas.width, loadCanvas.height);
  const stickCanvas = $("stick-chart") as HTMLCanvasElement;
  stickChart.draw(stickCanvas.getContext("2d")!, stickCanvas.width, stickCanvas.height);
  if (lastFrame) {
    ($("readout") as HTMLElement).textContent =
      `t=${lastFrame.t.toFixed(2)}s  cm=${lastFrame.cm.toFixed(1)}%  ` +
      `load=${lastFrame.y_1rev_exact.toFixed(0)}/${lastFrame.y_max.toFixed(0)} lbs  ` +
      `theta=${lastFrame.attitude.toFixed(1)} deg`;
  }
  requestAnimationFrame(renderLoop);
}

window.addEventListener("keydown", (ev) => stick.keyDown(ev.key));
window.addEventListener("keyup", (ev) => stick.keyUp(ev.key));

($("connect") as HTMLButtonElement).onclick = connect;
($("cue-toggle") as HTMLInputElement).onchange = (ev) => {
  cue.toggle((ev.target as HTMLInputElement).checked);
};
($("cue-gain") as HTMLInputElement).oninput = (ev) => {
  cue.cfg.uiGain = Number((ev.target as HTMLInputElement).value);
  ($("gain-readout") as HTMLElement).textContent = cue.cfg.uiGain.toFixed(1);
};

setInterval(() => {
  const msg = stick.tick(performance.now(), connected && client !== null);
  if (msg !== null) client!.send(msg);
}, 1000 / stick.cfg.rateHz);

renderLoop();
