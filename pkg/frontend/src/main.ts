// Browser entry point.  The node URL is the only thing remembered
// between visits (localStorage); keys are deliberately not.

import { ConsoleApp } from "./app.js";

const params = new URLSearchParams(location.search);
const remembered = localStorage.getItem("vp-node-url") ?? undefined;
const nodeUrl = params.get("node") ?? remembered ?? "http://127.0.0.1:8000";

const mount = document.getElementById("app");
if (!mount) throw new Error("missing #app mount node");

const app = new ConsoleApp(mount, { nodeUrl });
mount.addEventListener("click", (event) => {
  const el = (event.target as HTMLElement).closest("[data-action='login']");
  if (el) {
    const box = document.getElementById("node-url") as HTMLInputElement | null;
    if (box?.value) localStorage.setItem("vp-node-url", box.value.trim());
  }
});

declare global {
  interface Window {
    vpConsole: ConsoleApp;
  }
}
window.vpConsole = app;
