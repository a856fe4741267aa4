// Virtual joystick: drag the knob, get normalized (x, y) in the unit
// disc. Screen-down is negative y (forward is up). Releasing the pointer
// always snaps back to (0, 0) -- dead-man behavior, the tip straightens
// the moment the operator lets go.

export class VirtualJoystick {
  readonly base: HTMLDivElement;
  private knob: HTMLDivElement;
  private pointerId: number | null = null;
  private centerX = 0;
  private centerY = 0;
  private radius: number;
  private onChange: (x: number, y: number) => void;

  x = 0;
  y = 0;

  constructor(parent: HTMLElement, onChange: (x: number, y: number) => void, radius = 60) {
    this.onChange = onChange;
    this.radius = radius;

    this.base = document.createElement("div");
    this.base.className = "joystick-base";
    this.knob = document.createElement("div");
    this.knob.className = "joystick-knob";
    this.base.appendChild(this.knob);
    parent.appendChild(this.base);

    this.base.addEventListener("pointerdown", (e) => this.start(e));
    this.base.addEventListener("pointermove", (e) => this.move(e));
    this.base.addEventListener("pointerup", (e) => this.end(e));
    this.base.addEventListener("pointercancel", (e) => this.end(e));
    this.setKnob(0, 0);
  }

  private start(e: PointerEvent) {
    if (this.pointerId !== null) return;
    this.pointerId = e.pointerId;
    const rect = this.base.getBoundingClientRect();
    if (rect.width > 0) {
      this.centerX = rect.left + rect.width / 2;
      this.centerY = rect.top + rect.height / 2;
      this.radius = rect.width / 2;
    } else {
      // no layout (headless test DOM): keep the configured radius,
      // treat the event origin as the element center
      this.centerX = 0;
      this.centerY = 0;
    }
    if (this.base.setPointerCapture) {
      try {
        this.base.setPointerCapture(e.pointerId);
      } catch {
        /* capture is cosmetic */
      }
    }
    this.move(e);
  }

  private move(e: PointerEvent) {
    if (this.pointerId !== e.pointerId) return;
    let dx = e.clientX - this.centerX;
    let dy = e.clientY - this.centerY;
    const dist = Math.hypot(dx, dy);
    if (dist > this.radius) {
      dx = (dx / dist) * this.radius;
      dy = (dy / dist) * this.radius;
    }
    this.setKnob(dx, dy);
    this.update(dx / this.radius, -dy / this.radius);
  }

  private end(e: PointerEvent) {
    if (this.pointerId !== e.pointerId) return;
    this.pointerId = null;
    this.setKnob(0, 0);
    this.update(0, 0);
  }

  private update(x: number, y: number) {
    this.x = x;
    this.y = y;
    this.onChange(x, y);
  }

  private setKnob(dx: number, dy: number) {
    this.knob.style.transform = `translate(calc(-50% + ${dx}px), calc(-50% + ${dy}px))`;
  }
}
