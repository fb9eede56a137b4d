/**
 * Entry point: wires the socket client, the tilt pad, and the view
 * together.  The page is served by the same host as the WebSocket
 * endpoint, so the URL is derived from location.
 */

import { TiltPad } from "./tilt.js";
import { CubeView } from "./views.js";
import { CubeClient } from "./wsclient.js";

function wsUrl(): string {
  const proto = location.protocol === "https:" ? "wss:" : "ws:";
  return `${proto}//${location.host}/ws`;
}

function start(): void {
  const mount = document.getElementById("app");
  if (!mount) throw new Error("missing #app mount point");

  let view: CubeView | null = null;
  const client = new CubeClient({
    url: wsUrl(),
    onChange: (state) => view?.update(state, client.stale),
  });
  const pad = new TiltPad({ emit: (msg) => client.send(msg) });
  view = new CubeView(mount, {
    send: (msg) => client.send(msg),
    tiltInput: (dx, dy) => void pad.input(dx, dy),
  });
  client.connect();
}

start();
