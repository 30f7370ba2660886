/**
 * Control-margin cue view model.
 *
 * One side of the cue is pinned to a fixed reference line; the other side
 * moves vertically so the cue's height tracks the (rescaled) control margin.
 * Width never changes. Sign semantics: above the line = margin available,
 * zero height = the harmonic load is at its limit, below the line = load
 * exceedance. Pure logic: feeding a recorded telemetry log through applyFrame
 * reproduces the exact CueViewState sequence.
 */

import { TelemetryFrame } from "./protocol.js";

export type CueColor = "positive" | "zero" | "negative";

export interface CueConfig {
  /** extra display gain on top of the server-side rescaling (UI slider) */
  uiGain: number;
  /** px per unit of cue_height */
  pxPerUnit: number;
  /** margin magnitude treated as "at the limit", % control */
  zeroBand: number;
  /** cap on the rendered bar length, px */
  maxHeightPx: number;
  /** feed older than this is greyed out, ms */
  staleAfterMs: number;
}

export const DEFAULT_CUE_CONFIG: CueConfig = {
  uiGain: 1.0,
  pxPerUnit: 6.0,
  zeroBand: 0.25,
  maxHeightPx: 160,
  staleAfterMs: 500,
};

export interface CueViewState {
  /** signed bar length; positive bars sit above the reference line */
  heightPx: number;
  color: CueColor;
  /** reference line offset inside the widget, px from the top */
  referencePx: number;
  stale: boolean;
  visible: boolean;
}

export class CueModel {
  readonly cfg: CueConfig;
  private lastFrame: TelemetryFrame | null = null;
  private lastFrameAtMs = 0;
  private lastT = -Infinity;
  private visible = true;
  dropped = 0;
  versionErrors = 0;
  /** toggle timestamps (session time s, on/off) for the session log */
  readonly toggleLog: Array<{ t: number; on: boolean }> = [];

  constructor(cfg: Partial<CueConfig> = {}) {
    this.cfg = { ...DEFAULT_CUE_CONFIG, ...cfg };
  }

  /**
   * Apply one telemetry frame. Frames must arrive in timestamp order; late
   * frames are dropped (count in .dropped). Returns the resulting view
   * state, or null when the frame was dropped.
   */
  applyFrame(frame: TelemetryFrame, nowMs: number): CueViewState | null {
    if (frame.t <= this.lastT) {
      this.dropped += 1;
      return null;
    }
    this.lastT = frame.t;
    this.lastFrame = frame;
    this.lastFrameAtMs = nowMs;
    return this.render(nowMs);
  }

  /** Current view state against the local clock (staleness re-evaluated). */
  render(nowMs: number): CueViewState {
    const f = this.lastFrame;
    const referencePx = this.cfg.maxHeightPx;
    if (f === null) {
      return { heightPx: 0, color: "zero", referencePx, stale: true, visible: this.visible };
    }
    const stale = f.stale || nowMs - this.lastFrameAtMs > this.cfg.staleAfterMs;
    let color: CueColor = "zero";
    if (f.cm > this.cfg.zeroBand) color = "positive";
    else if (f.cm < -this.cfg.zeroBand) color = "negative";
    const raw = f.cue_height * this.cfg.uiGain * this.cfg.pxPerUnit;
    const heightPx = Math.max(
      -this.cfg.maxHeightPx,
      Math.min(this.cfg.maxHeightPx, Number.isFinite(raw) ? raw : this.cfg.maxHeightPx),
    );
    return { heightPx, color, referencePx, stale, visible: this.visible };
  }

  /** Hide/show the cue element only; telemetry handling is unaffected. */
  toggle(on: boolean): void {
    if (on === this.visible) return;
    this.visible = on;
    this.toggleLog.push({ t: this.lastT === -Infinity ? 0 : this.lastT, on });
  }

  get isVisible(): boolean {
    return this.visible;
  }
}
