// Assembles the console: one state object, one gateway client, and the
// widgets wired so every server message triggers exactly one render pass.

import { GatewayClient, SocketFactory } from "./client.js";
import { VirtualJoystick } from "./joystick.js";
import { ControlPanel } from "./panel.js";
import { PlanView } from "./planview.js";
import { PovView } from "./povview.js";
import type { ServerMsg } from "./protocol.js";
import { UiSessionState } from "./state.js";

export interface AppOptions {
  address?: string; // ws://host:port, connects immediately when given
  makeSocket?: SocketFactory;
}

export interface App {
  root: HTMLElement;
  state: UiSessionState;
  client: GatewayClient;
  joystick: VirtualJoystick;
  panel: ControlPanel;
  planView: PlanView;
  povView: PovView;
  connect(address: string): void;
  destroy(): void;
}

export function createApp(root: HTMLElement, opts: AppOptions = {}): App {
  const state = new UiSessionState();

  const shell = document.createElement("div");
  shell.className = "console";
  root.appendChild(shell);

  const title = document.createElement("div");
  title.className = "title";
  title.textContent = "evertip operator console";
  shell.appendChild(title);

  const columns = document.createElement("div");
  columns.className = "columns";
  shell.appendChild(columns);

  const left = document.createElement("div");
  left.className = "col views";
  const right = document.createElement("div");
  right.className = "col controls";
  columns.append(left, right);

  const client = new GatewayClient(
    {
      onMessage: (msg: ServerMsg) => {
        switch (msg.type) {
          case "hello":
            state.setRole(msg.role);
            break;
          case "telemetry":
            state.pushFrame(msg);
            break;
          case "event":
            if (msg.name === "scene") state.setScene(msg.data);
            break;
          case "error":
            state.noteError(msg.message, msg.message.includes("protocol version mismatch"));
            break;
          case "warning":
            state.noteWarning(msg.message);
            break;
        }
      },
      onStatus: (status) => state.setConnection(status),
    },
    opts.makeSocket,
  );

  const planView = new PlanView(left);
  const povView = new PovView(left);

  const panel = new ControlPanel(right, client);
  const stickHolder = document.createElement("div");
  stickHolder.className = "joystick-holder";
  right.appendChild(stickHolder);
  const joystick = new VirtualJoystick(stickHolder, (x, y) => {
    client.send("joystick", { x, y });
  });

  const render = () => {
    panel.render(state);
    planView.render(state);
    povView.render(state);
  };
  state.onChange(render);
  render();

  const app: App = {
    root,
    state,
    client,
    joystick,
    panel,
    planView,
    povView,
    connect: (address: string) => client.connect(address),
    destroy: () => {
      client.disconnect();
      shell.remove();
    },
  };

  if (opts.address) client.connect(opts.address);
  return app;
}
