// Control panel: pressure slider, spray toggle, estop/resume, payload
// picker, and the numeric readouts. Estop latches: growth controls stay
// disabled until the telemetry says the latch is cleared.

import type { GatewayClient } from "./client.js";
import type { UiSessionState } from "./state.js";

export class ControlPanel {
  readonly root: HTMLDivElement;
  readonly pressure: HTMLInputElement;
  readonly sprayButton: HTMLButtonElement;
  readonly estopButton: HTMLButtonElement;
  readonly resumeButton: HTMLButtonElement;
  readonly retractButton: HTMLButtonElement;
  readonly payloadSelect: HTMLSelectElement;
  readonly statusLine: HTMLDivElement;
  readonly readout: HTMLDivElement;
  readonly bannerLine: HTMLDivElement;

  private client: GatewayClient;
  private sprayOn = false;

  constructor(parent: HTMLElement, client: GatewayClient) {
    this.client = client;
    this.root = el("div", "panel");
    parent.appendChild(this.root);

    this.statusLine = el("div", "status-line");
    this.root.appendChild(this.statusLine);
    this.bannerLine = el("div", "banner");
    this.root.appendChild(this.bannerLine);

    const pressureRow = el("div", "row");
    const label = document.createElement("label");
    label.textContent = "pressure kPa";
    this.pressure = document.createElement("input");
    this.pressure.type = "range";
    this.pressure.min = "0";
    this.pressure.max = "80";
    this.pressure.step = "1";
    this.pressure.value = "0";
    this.pressure.id = "pressure";
    this.pressure.addEventListener("input", () => {
      client.send("set_pressure", { kpa: Number(this.pressure.value) });
    });
    pressureRow.appendChild(label);
    pressureRow.appendChild(this.pressure);
    this.root.appendChild(pressureRow);

    const buttons = el("div", "row");
    this.sprayButton = button("spray", "spray-btn", () => {
      this.sprayOn = !this.sprayOn;
      client.send("spray", { on: this.sprayOn });
    });
    this.retractButton = button("retract 0.2 m", "retract-btn", () => {
      client.send("retract", { length_m: 0.2 });
    });
    this.estopButton = button("ESTOP", "estop-btn", () => {
      client.send("estop", {});
    });
    this.resumeButton = button("resume", "resume-btn", () => {
      client.send("resume", {});
    });
    buttons.append(this.sprayButton, this.retractButton, this.estopButton, this.resumeButton);
    this.root.appendChild(buttons);

    const payloadRow = el("div", "row");
    this.payloadSelect = document.createElement("select");
    for (const p of ["sprayer", "sensor"]) {
      const opt = document.createElement("option");
      opt.value = p;
      opt.textContent = p;
      this.payloadSelect.appendChild(opt);
    }
    this.payloadSelect.addEventListener("change", () => {
      client.send("select_payload", { payload: this.payloadSelect.value });
    });
    payloadRow.appendChild(this.payloadSelect);
    this.root.appendChild(payloadRow);

    this.readout = el("div", "readout");
    this.root.appendChild(this.readout);
  }

  render(state: UiSessionState) {
    const f = state.frame;
    const role = state.role ? ` (${state.role})` : "";
    this.statusLine.textContent = `${state.connection}${role}`;
    this.statusLine.dataset.connection = state.connection;
    this.bannerLine.textContent = state.banner || state.lastError || state.lastWarning;

    const estopped = state.estopped;
    this.pressure.disabled = estopped || state.connection !== "connected";
    this.sprayButton.disabled = this.pressure.disabled;
    this.resumeButton.disabled = !estopped;
    this.estopButton.classList.toggle("latched", estopped);
    if (f) this.sprayOn = f.spray_on;
    this.sprayButton.classList.toggle("on", this.sprayOn);

    if (!f) {
      this.readout.textContent = "no telemetry yet";
      return;
    }
    const cov = state.coveragePercent;
    this.readout.innerHTML = [
      `t = ${f.sim_time.toFixed(2)} s`,
      `status <b data-status="${f.status}">${f.status}${estopped ? " (estop)" : ""}</b>`,
      `pressure ${f.pressure_kpa.toFixed(1)} / ${f.target_kpa.toFixed(0)} kPa`,
      `everted <span class="everted">${f.everted_length.toFixed(3)}</span> m`,
      `bend ${f.bend_deg.toFixed(1)} deg @ ${f.bend_azimuth_deg.toFixed(0)} deg`,
      `payload ${f.payload}${f.spray_on ? ", spraying" : ""}`,
      cov === null ? "coverage n/a" : `coverage <span class="coverage">${cov.toFixed(1)}%</span>`,
    ].join("<br>");
  }
}

function el(tag: "div", cls: string): HTMLDivElement {
  const node = document.createElement(tag);
  node.className = cls;
  return node;
}

function button(text: string, cls: string, onClick: () => void): HTMLButtonElement {
  const b = document.createElement("button");
  b.textContent = text;
  b.className = cls;
  b.addEventListener("click", onClick);
  return b;
}
