// Top-down plan view of the pipe network with the robot's tip trail.
// The shipped scenes are planar, so world (x, y) maps straight onto the
// canvas with a fitted scale.

import type { UiSessionState } from "./state.js";

export class PlanView {
  readonly canvas: HTMLCanvasElement;

  constructor(parent: HTMLElement, width = 420, height = 300) {
    this.canvas = document.createElement("canvas");
    this.canvas.width = width;
    this.canvas.height = height;
    this.canvas.className = "plan-view";
    parent.appendChild(this.canvas);
  }

  render(state: UiSessionState) {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return; // headless test DOM has no 2d context
    const { width: w, height: h } = this.canvas;
    ctx.fillStyle = "#10151c";
    ctx.fillRect(0, 0, w, h);
    const scene = state.scene;
    if (!scene) {
      ctx.fillStyle = "#5a6b80";
      ctx.fillText("waiting for scene...", 16, 24);
      return;
    }

    // fit all nodes and terminal boxes into the canvas with a margin
    const xs: number[] = [];
    const ys: number[] = [];
    for (const id of Object.keys(scene.nodes)) {
      xs.push(scene.nodes[id][0]);
      ys.push(scene.nodes[id][1]);
    }
    for (const t of scene.terminals ?? []) {
      xs.push(t.center[0] - t.size / 2, t.center[0] + t.size / 2);
      ys.push(t.center[1] - t.size / 2, t.center[1] + t.size / 2);
    }
    const minX = Math.min(...xs), maxX = Math.max(...xs);
    const minY = Math.min(...ys), maxY = Math.max(...ys);
    const margin = 30;
    const scale = Math.min(
      (w - 2 * margin) / Math.max(maxX - minX, 1e-6),
      (h - 2 * margin) / Math.max(maxY - minY, 1e-6),
    );
    const px = (x: number) => margin + (x - minX) * scale;
    const py = (y: number) => h - margin - (y - minY) * scale; // world +y is up

    // pipe segments
    ctx.strokeStyle = "#3d4f66";
    ctx.lineWidth = 6;
    ctx.lineCap = "round";
    for (const seg of scene.segments) {
      const a = scene.nodes[seg.from];
      const b = scene.nodes[seg.to];
      ctx.beginPath();
      if (seg.shape === "arc" && seg.center) {
        const steps = 24;
        for (let i = 0; i <= steps; i++) {
          const p = arcPoint(a, b, seg.center, i / steps);
          i === 0 ? ctx.moveTo(px(p[0]), py(p[1])) : ctx.lineTo(px(p[0]), py(p[1]));
        }
      } else {
        ctx.moveTo(px(a[0]), py(a[1]));
        ctx.lineTo(px(b[0]), py(b[1]));
      }
      ctx.stroke();
    }

    // terminal boxes
    ctx.strokeStyle = "#55aa88";
    ctx.lineWidth = 1.5;
    for (const t of scene.terminals ?? []) {
      const s = t.size * scale;
      ctx.strokeRect(px(t.center[0]) - s / 2, py(t.center[1]) - s / 2, s, s);
    }

    // node labels
    ctx.fillStyle = "#8899aa";
    ctx.font = "10px sans-serif";
    for (const id of Object.keys(scene.nodes)) {
      const n = scene.nodes[id];
      ctx.fillText(id, px(n[0]) + 6, py(n[1]) - 6);
    }

    // tip trail and tip
    if (state.tipTrail.length > 1) {
      ctx.strokeStyle = "#e8b74c";
      ctx.lineWidth = 3;
      ctx.beginPath();
      state.tipTrail.forEach(([x, y], i) =>
        i === 0 ? ctx.moveTo(px(x), py(y)) : ctx.lineTo(px(x), py(y)),
      );
      ctx.stroke();
    }
    const frame = state.frame;
    if (frame) {
      const [tx, ty] = frame.tip_position;
      ctx.fillStyle = frame.estopped ? "#e05555" : "#f0d060";
      ctx.beginPath();
      ctx.arc(px(tx), py(ty), 5, 0, 2 * Math.PI);
      ctx.fill();
      // heading tick
      const [hx, hy] = frame.tip_heading;
      ctx.strokeStyle = ctx.fillStyle;
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.moveTo(px(tx), py(ty));
      ctx.lineTo(px(tx) + hx * 14, py(ty) - hy * 14);
      ctx.stroke();
    }
  }
}

function arcPoint(a: number[], b: number[], c: number[], t: number): number[] {
  // interpolate along the circular arc from a to b about center c
  const va = [a[0] - c[0], a[1] - c[1]];
  const vb = [b[0] - c[0], b[1] - c[1]];
  const ang0 = Math.atan2(va[1], va[0]);
  let sweep = Math.atan2(vb[1], vb[0]) - ang0;
  while (sweep > Math.PI) sweep -= 2 * Math.PI;
  while (sweep < -Math.PI) sweep += 2 * Math.PI;
  const r = Math.hypot(va[0], va[1]);
  const ang = ang0 + sweep * t;
  return [c[0] + r * Math.cos(ang), c[1] + r * Math.sin(ang)];
}
