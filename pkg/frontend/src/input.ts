/**
 * Stick input pipeline: keyboard arrows and gamepad axis both map to the
 * longitudinal channel; the latest value wins and is emitted at a fixed
 * rate while connected. Emission is suppressed while disconnected.
 *
 * The emitted value sequence is recorded so a session can be replayed at
 * the wire level (see tests).
 */

import { stickMessage } from "./protocol.js";

export interface StickConfig {
  /** emit rate, Hz */
  rateHz: number;
  /** full keyboard deflection, % */
  keyboardMagnitude: number;
  /** keyboard ramp rate toward the target, %/s */
  keyboardSlew: number;
}

export const DEFAULT_STICK_CONFIG: StickConfig = {
  rateHz: 60,
  keyboardMagnitude: 100,
  keyboardSlew: 250,
};

export class StickInput {
  readonly cfg: StickConfig;
  private keyTarget = 0; // -1, 0, +1 from arrow keys
  private keyValue = 0; // slewed keyboard deflection
  private gamepadValue: number | null = null;
  private lastStepMs: number | null = null;
  readonly sent: number[] = []; // record of emitted values, for replay

  constructor(cfg: Partial<StickConfig> = {}) {
    this.cfg = { ...DEFAULT_STICK_CONFIG, ...cfg };
  }

  keyDown(key: string): void {
    if (key === "ArrowUp") this.keyTarget = 1;
    else if (key === "ArrowDown") this.keyTarget = -1;
  }

  keyUp(key: string): void {
    if (key === "ArrowUp" && this.keyTarget === 1) this.keyTarget = 0;
    else if (key === "ArrowDown" && this.keyTarget === -1) this.keyTarget = 0;
  }

  /** Gamepad axis in [-1, 1]; null when no pad is connected. */
  setGamepadAxis(axis: number | null): void {
    this.gamepadValue = axis === null ? null : Math.max(-1, Math.min(1, axis)) * 100;
  }

  /** Neutral everything (used on disconnect). */
  recenter(): void {
    this.keyTarget = 0;
    this.keyValue = 0;
    this.gamepadValue = null;
  }

  /** Current deflection: the gamepad wins over the keyboard when present. */
  value(nowMs: number): number {
    if (this.lastStepMs !== null) {
      const dt = Math.max(0, (nowMs - this.lastStepMs) / 1000);
      const target = this.keyTarget * this.cfg.keyboardMagnitude;
      const step = this.cfg.keyboardSlew * dt;
      this.keyValue += Math.max(-step, Math.min(step, target - this.keyValue));
    }
    this.lastStepMs = nowMs;
    return this.gamepadValue !== null ? this.gamepadValue : this.keyValue;
  }

  /**
   * One emission tick: returns the wire message to send, or null when
   * emission is suppressed (not connected).
   */
  tick(nowMs: number, connected: boolean): string | null {
    const v = this.value(nowMs);
    if (!connected) return null;
    this.sent.push(v);
    return stickMessage("lon", v);
  }
}

/** Re-emit a recorded value log; the wire sequence is identical by design. */
export function replayMessages(values: number[]): string[] {
  return values.map((v) => stickMessage("lon", v));
}
