/**
 * DOM construction for the four panels: flat net (primary input
 * surface), orbitable 3D cube, mesh panel, and the control strip
 * (start, tilt pad, detach/attach).  All gameplay state comes in via
 * update(); all input goes out via the callbacks, already shaped as
 * protocol messages by layout.ts helpers.
 */

import type { ClientMsg, Dir, FaceName } from "./protocol.js";
import {
  FACE_ORDER,
  FacetAddr,
  NET_SLOT,
  faceTransform,
  faceTurn,
  facetIndex,
  homeCorner,
  ROT_IDENTITY,
} from "./layout.js";
import { FacetPainter } from "./render.js";
import type { ClientState } from "./state.js";

export interface ViewCallbacks {
  send: (msg: ClientMsg) => void;
  /** pad displacement in [-1,1]^2, screen convention (dy down) */
  tiltInput: (dx: number, dy: number) => void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class CubeView {
  readonly root: HTMLElement;
  private readonly painter = new FacetPainter();
  private readonly cb: ViewCallbacks;

  private readonly staleBanner: HTMLElement;
  private readonly statusBar: HTMLElement;
  private readonly errorLog: HTMLElement;
  private readonly meshNodes = new Map<number, HTMLElement>();
  private readonly meshLinks: HTMLElement;
  private readonly controls: HTMLButtonElement[] = [];
  private readonly facetButtons = new Map<number, HTMLElement>();
  private readonly scene: HTMLElement;
  private yaw = -30;
  private pitch = -24;
  private game: string | null = null;
  private detachedByMe: number | null = null;

  constructor(mount: HTMLElement, cb: ViewCallbacks) {
    this.cb = cb;
    this.root = el("div", "cubios-app");
    this.staleBanner = el("div", "stale-banner", "connection stale: no frame for 2 s");
    this.staleBanner.hidden = true;
    this.statusBar = el("div", "status-bar", "connecting…");
    this.errorLog = el("pre", "error-log");
    this.meshLinks = el("div", "mesh-links");
    this.scene = el("div", "scene");

    this.root.append(this.staleBanner, this.statusBar);
    const panels = el("div", "panels");
    panels.append(
      this.buildNetPanel(),
      this.buildCubePanel(),
      this.buildMeshPanel(),
      this.buildControlPanel(),
    );
    this.root.append(panels, this.errorLog);
    mount.append(this.root);
  }

  // ----- panels ------------------------------------------------------------

  private buildNetPanel(): HTMLElement {
    const panel = el("section", "panel net-panel");
    panel.append(el("h2", undefined, "net"));
    const grid = el("div", "net-grid");
    for (const face of FACE_ORDER) {
      const [gr, gc] = NET_SLOT[face];
      const block = el("div", "face-block");
      block.style.gridRow = String(gr + 1);
      block.style.gridColumn = String(gc + 1);
      block.append(this.buildTurnArrow(face, "ccw"), this.buildFaceTag(face), this.buildTurnArrow(face, "cw"));
      const facets = el("div", "face-facets");
      for (let row = 0 as 0 | 1; row <= 1; row++) {
        for (let col = 0 as 0 | 1; col <= 1; col++) {
          facets.append(this.buildFacetCell({ face, row: row as 0 | 1, col: col as 0 | 1 }));
        }
      }
      block.append(facets);
      grid.append(block);
    }
    panel.append(grid);
    return panel;
  }

  private buildFaceTag(face: FaceName): HTMLElement {
    return el("span", "face-tag", face);
  }

  private buildTurnArrow(face: FaceName, dir: Dir): HTMLButtonElement {
    const btn = el("button", `turn-arrow turn-${dir}`, dir === "cw" ? "↻" : "↺");
    btn.title = `turn ${face} ${dir}`;
    btn.addEventListener("click", () => this.cb.send(faceTurn(face, dir)));
    this.controls.push(btn);
    return btn;
  }

  private buildFacetCell(addr: FacetAddr): HTMLElement {
    const idx = facetIndex(addr);
    const cell = el("div", "facet-cell");
    const canvas = el("canvas", "facet-canvas");
    this.painter.register(idx, canvas);
    cell.append(canvas);
    cell.title = `${addr.face}[${addr.row},${addr.col}]`;
    cell.addEventListener("click", () => {
      // facet clicks mean "slide this tile" and only TwentyThree has tiles
      if (this.game === "twentythree") {
        this.cb.send({ type: "slide", face: addr.face, row: addr.row, col: addr.col });
      }
    });
    this.facetButtons.set(idx, cell);
    return cell;
  }

  private buildCubePanel(): HTMLElement {
    const panel = el("section", "panel cube-panel");
    panel.append(el("h2", undefined, "cube"));
    const stage = el("div", "stage");
    this.scene.style.transform = this.orbitTransform();
    for (const face of FACE_ORDER) {
      const div = el("div", "face3d");
      div.style.transform = faceTransform(face, 256);
      for (let row = 0; row <= 1; row++) {
        for (let col = 0; col <= 1; col++) {
          const canvas = el("canvas", "facet-canvas3d");
          this.painter.register(facetIndex({ face, row: row as 0 | 1, col: col as 0 | 1 }), canvas);
          div.append(canvas);
        }
      }
      this.scene.append(div);
    }
    stage.append(this.scene);
    let dragging = false;
    let lastX = 0;
    let lastY = 0;
    stage.addEventListener("pointerdown", (e) => {
      dragging = true;
      lastX = e.clientX;
      lastY = e.clientY;
      stage.setPointerCapture(e.pointerId);
    });
    stage.addEventListener("pointermove", (e) => {
      if (!dragging) return;
      this.yaw += (e.clientX - lastX) * 0.5;
      this.pitch = Math.max(-89, Math.min(89, this.pitch - (e.clientY - lastY) * 0.5));
      lastX = e.clientX;
      lastY = e.clientY;
      this.scene.style.transform = this.orbitTransform();
    });
    stage.addEventListener("pointerup", () => (dragging = false));
    panel.append(stage);
    return panel;
  }

  private orbitTransform(): string {
    return `translateZ(-120px) rotateX(${this.pitch}deg) rotateY(${this.yaw}deg)`;
  }

  private buildMeshPanel(): HTMLElement {
    const panel = el("section", "panel mesh-panel");
    panel.append(el("h2", undefined, "mesh"));
    const nodes = el("div", "mesh-nodes");
    for (let id = 0; id < 8; id++) {
      const chip = el("div", "node-chip", String(id));
      this.meshNodes.set(id, chip);
      nodes.append(chip);
    }
    panel.append(nodes, this.meshLinks);
    return panel;
  }

  private buildControlPanel(): HTMLElement {
    const panel = el("section", "panel control-panel");
    panel.append(el("h2", undefined, "controls"));

    const start = el("button", "start-btn", "start");
    start.addEventListener("click", () => this.cb.send({ type: "start" }));
    this.controls.push(start);
    panel.append(start);

    const pad = el("div", "tilt-pad");
    const knob = el("div", "tilt-knob");
    pad.append(knob);
    let padActive = false;
    const radius = 56;
    const onPad = (e: PointerEvent) => {
      const rect = pad.getBoundingClientRect();
      const dx = (e.clientX - rect.left - rect.width / 2) / radius;
      const dy = (e.clientY - rect.top - rect.height / 2) / radius;
      const cx = Math.max(-1, Math.min(1, dx));
      const cy = Math.max(-1, Math.min(1, dy));
      knob.style.transform = `translate(${cx * radius * 0.6}px, ${cy * radius * 0.6}px)`;
      this.cb.tiltInput(cx, cy);
    };
    pad.addEventListener("pointerdown", (e) => {
      padActive = true;
      pad.setPointerCapture(e.pointerId);
      onPad(e);
    });
    pad.addEventListener("pointermove", (e) => {
      if (padActive) onPad(e);
    });
    const release = () => {
      padActive = false;
      knob.style.transform = "";
    };
    pad.addEventListener("pointerup", release);
    pad.addEventListener("pointercancel", release);
    panel.append(el("div", "pad-label", "tilt pad"), pad);

    const cubios = el("div", "cubio-buttons");
    for (let id = 0; id < 8; id++) {
      const row = el("div", "cubio-row");
      row.append(el("span", "cubio-id", `cubio ${id}`));
      const detach = el("button", undefined, "detach");
      detach.addEventListener("click", () => {
        this.detachedByMe = id;
        this.cb.send({ type: "detach", id });
      });
      const attach = el("button", undefined, "attach");
      attach.title = "reattach at the home corner; the server validates";
      attach.addEventListener("click", () => {
        if (this.detachedByMe === id) this.detachedByMe = null;
        this.cb.send({ type: "attach", id, pos: homeCorner(id), rot: ROT_IDENTITY });
      });
      this.controls.push(detach, attach);
      row.append(detach, attach);
      cubios.append(row);
    }
    panel.append(cubios);
    return panel;
  }

  // ----- updates -------------------------------------------------------------

  update(s: ClientState, stale: boolean): void {
    this.game = s.game;
    this.staleBanner.hidden = !stale;
    const role = s.role ?? "?";
    const link = s.connected ? "online" : "reconnecting…";
    this.statusBar.textContent =
      `${s.game ?? "?"} | ${role} | ${link} | tick ${s.tick} | score ${s.score}` +
      ` | ${s.phase || "?"}${s.started ? "" : " | press start"}`;

    const interactive = s.role === "controller";
    for (const btn of this.controls) btn.disabled = !interactive;

    // repaint exactly what the latest frame changed; status/mesh updates
    // re-request the same small set, which is idempotent
    this.painter.paintAll(s.frames, s.lastChanged);

    if (s.mesh) {
      const present = new Map(s.mesh.nodes.map((n) => [n.id, n.phase] as const));
      for (const [id, chip] of this.meshNodes) {
        const phase = present.get(id);
        chip.classList.toggle("detached", phase === undefined);
        chip.classList.toggle("degraded", phase === "DEGRADED");
        chip.classList.toggle("leader", s.mesh.leader === id);
        chip.textContent = s.mesh.leader === id ? `${id}★` : String(id);
        chip.title = phase ?? "detached";
      }
      this.meshLinks.textContent =
        `links: ${s.mesh.links.length}  ` + s.mesh.links.map(([a, b]) => `${a}-${b}`).join(" ");
    }

    this.errorLog.textContent = s.errors.slice(-6).join("\n");
  }
}
