/**
 * Wire protocol types for the real-time session server (see ../protocol.md).
 * One JSON document per websocket message; telemetry carries schema_version.
 */

export const PROTOCOL_VERSION = 1;

export interface TelemetryFrame {
  type: "telemetry";
  schema_version: number;
  /** session time, s */
  t: number;
  /** control margin, % control (may be Infinity when limiting is off) */
  cm: number;
  /** server-side cue_gain * cm — what the cue renders */
  cue_height: number;
  y_1rev_exact: number;
  y_1rev_predicted: number;
  y_max: number;
  u_pilot: number;
  u_ext: number;
  pitch_rate: number;
  attitude: number;
  airspeed: number;
  /** server held the previous margin after a solver deadline miss */
  stale: boolean;
}

export interface StickMessage {
  type: "stick";
  axis: "lon" | "lat" | "col" | "ped";
  value: number; // -100..100 % deflection
}

export interface ErrorMessage {
  type: "error";
  reason: string;
}

export type ServerMessage = TelemetryFrame | ErrorMessage;

export class ProtocolError extends Error {}

const TELEMETRY_NUMBERS: (keyof TelemetryFrame)[] = [
  "t",
  "cm",
  "cue_height",
  "y_1rev_exact",
  "y_1rev_predicted",
  "y_max",
  "u_pilot",
  "u_ext",
  "pitch_rate",
  "attitude",
  "airspeed",
];

/**
 * Parse one server message. Throws ProtocolError on malformed input or a
 * telemetry schema_version mismatch.
 */
export function parseServerMessage(raw: string): ServerMessage {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch {
    throw new ProtocolError(`not JSON: ${raw.slice(0, 80)}`);
  }
  if (typeof doc !== "object" || doc === null || !("type" in doc)) {
    throw new ProtocolError("message has no type");
  }
  const msg = doc as Record<string, unknown>;
  if (msg.type === "error") {
    return { type: "error", reason: String(msg.reason ?? "unknown") };
  }
  if (msg.type !== "telemetry") {
    throw new ProtocolError(`unexpected message type ${String(msg.type)}`);
  }
  if (msg.schema_version !== PROTOCOL_VERSION) {
    throw new ProtocolError(
      `telemetry schema_version ${String(msg.schema_version)} != ${PROTOCOL_VERSION}`,
    );
  }
  for (const key of TELEMETRY_NUMBERS) {
    if (typeof msg[key] !== "number") {
      throw new ProtocolError(`telemetry field ${key} missing or non-numeric`);
    }
  }
  return { ...(msg as object), stale: Boolean(msg.stale) } as TelemetryFrame;
}

export function stickMessage(axis: StickMessage["axis"], value: number): string {
  const clamped = Math.max(-100, Math.min(100, value));
  return JSON.stringify({ type: "stick", axis, value: clamped });
}
