// All mutable UI state in one place. Network callbacks write it, widgets
// read it on render; nothing renders from a stale copy.

import type { TelemetryMsg } from "./protocol.js";

export type ConnectionStatus = "idle" | "connecting" | "connected" | "retrying" | "failed";

export class UiSessionState {
  connection: ConnectionStatus = "idle";
  role: string | null = null;
  scene: any = null; // pipescene document from the gateway's scene event
  frame: TelemetryMsg | null = null;
  framesReceived = 0;
  lastError = "";
  lastWarning = "";
  banner = ""; // sticky problem line (version mismatch etc.)
  tipTrail: [number, number][] = []; // recent tip (x, y) for the plan view

  private listeners: (() => void)[] = [];

  onChange(fn: () => void) {
    this.listeners.push(fn);
  }

  private emit() {
    for (const fn of this.listeners) fn();
  }

  setConnection(status: ConnectionStatus) {
    this.connection = status;
    this.emit();
  }

  setRole(role: string) {
    this.role = role;
    this.emit();
  }

  setScene(doc: any) {
    this.scene = doc;
    this.tipTrail = [];
    this.emit();
  }

  noteError(message: string, sticky = false) {
    this.lastError = message;
    if (sticky) this.banner = message; // survives reconnect attempts
    this.emit();
  }

  noteWarning(message: string) {
    this.lastWarning = message;
    this.emit();
  }

  pushFrame(frame: TelemetryMsg) {
    this.frame = frame;
    this.framesReceived += 1;
    const [x, y] = frame.tip_position;
    const last = this.tipTrail[this.tipTrail.length - 1];
    if (!last || Math.hypot(x - last[0], y - last[1]) > 1e-4) {
      this.tipTrail.push([x, y]);
      if (this.tipTrail.length > 400) this.tipTrail.shift();
    }
    this.emit();
  }

  get estopped(): boolean {
    return this.frame?.estopped ?? false;
  }

  /** Overall grid coverage in percent, or null before any grid data. */
  get coveragePercent(): number | null {
    const cells = this.frame?.coverage?.cells;
    if (!cells) return null;
    const nodes = Object.keys(cells);
    if (nodes.length === 0) return null;
    let sum = 0;
    for (const n of nodes) sum += cells[n].percent;
    return sum / nodes.length;
  }
}
