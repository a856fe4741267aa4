// Browser entry point. Gateway address comes from ?ws=... so the same
// bundle can point at any running sim.

import { createApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const address = params.get("ws") ?? "ws://127.0.0.1:8701";

createApp(document.body, { address });
