/**
 * Pixel plumbing: raw RGB facet bytes onto 128x128 canvases.  A facet
 * can be shown in several places at once (net view and 3D view), so
 * painting goes through a registry of canvases per facet index.
 */

import { FACET_PX } from "./layout.js";

/** RGB triplets to RGBA, alpha 255 (pure; unit-testable off-DOM). */
export function rgbToRgba(rgb: Uint8Array): Uint8ClampedArray<ArrayBuffer> {
  const n = rgb.length / 3;
  const out = new Uint8ClampedArray(new ArrayBuffer(n * 4));
  for (let i = 0, j = 0; i < rgb.length; i += 3, j += 4) {
    out[j] = rgb[i]!;
    out[j + 1] = rgb[i + 1]!;
    out[j + 2] = rgb[i + 2]!;
    out[j + 3] = 255;
  }
  return out;
}

export class FacetPainter {
  private readonly targets = new Map<number, HTMLCanvasElement[]>();

  register(facetIdx: number, canvas: HTMLCanvasElement): void {
    canvas.width = FACET_PX;
    canvas.height = FACET_PX;
    const list = this.targets.get(facetIdx) ?? [];
    list.push(canvas);
    this.targets.set(facetIdx, list);
  }

  paint(facetIdx: number, rgb: Uint8Array): void {
    const canvases = this.targets.get(facetIdx);
    if (!canvases) return;
    const data = new ImageData(rgbToRgba(rgb), FACET_PX, FACET_PX);
    for (const canvas of canvases) {
      const ctx = canvas.getContext("2d");
      if (ctx) ctx.putImageData(data, 0, 0);
    }
  }

  paintAll(frames: Map<number, Uint8Array>, only?: number[]): void {
    const idxs = only ?? [...frames.keys()];
    for (const idx of idxs) {
      const rgb = frames.get(idx);
      if (rgb) this.paint(idx, rgb);
    }
  }
}
