// Wire protocol for the evertip gateway: one JSON object per line, the
// same message vocabulary in both directions. This mirrors the server's
// schema; field names must match it exactly.

export const PROTOCOL_VERSION = 1;

export type CommandKind =
  | "joystick"
  | "set_pressure"
  | "spray"
  | "retract"
  | "select_payload"
  | "estop"
  | "resume";

export interface HelloMsg {
  type: "hello";
  protocol: number;
  role: "operator" | "observer";
  server: string;
}

export interface TelemetryMsg {
  type: "telemetry";
  seq: number;
  sim_time: number;
  status: string;
  pressure_kpa: number;
  target_kpa: number;
  everted_length: number;
  tip_position: [number, number, number];
  tip_heading: [number, number, number];
  bend_deg: number;
  bend_azimuth_deg: number;
  servo_angles_deg: number[];
  payload: string;
  spray_on: boolean;
  estopped: boolean;
  coverage?: {
    cells: Record<string, { sprayed_count: number; percent: number }>;
    sprayed_count: number;
    panels: Record<string, Record<string, number>>;
  };
  pov?: { r: number; c: number; x: number; y: number; hit: boolean }[];
}

export interface EventMsg {
  type: "event";
  sim_time: number;
  name: string;
  data: any;
}

export interface ErrorMsg {
  type: "error";
  message: string;
  field?: string;
  seq?: number;
}

export interface WarningMsg {
  type: "warning";
  message: string;
  seq?: number;
}

export type ServerMsg = HelloMsg | TelemetryMsg | EventMsg | ErrorMsg | WarningMsg;

export function encodeCommand(seq: number, tMs: number, kind: CommandKind, args: object): string {
  return JSON.stringify({ type: "cmd", seq, t_ms: Math.round(tMs), kind, args });
}

/** Parse one line from the server. Blank lines and junk return null
 *  (the server validates our side; we just stay alive on theirs). */
export function decodeLine(line: string): ServerMsg | null {
  const text = line.trim();
  if (!text) return null;
  let doc: any;
  try {
    doc = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof doc !== "object" || doc === null || typeof doc.type !== "string") return null;
  switch (doc.type) {
    case "hello":
    case "telemetry":
    case "event":
    case "error":
    case "warning":
      return doc as ServerMsg;
    default:
      return null;
  }
}
