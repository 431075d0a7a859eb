// Box overlays on thumbnails: server pixel boxes scaled to the display size.

import { Box } from './types.js';

export function scaleBox(box: Box, scale: number): Box {
  return { x: box.x * scale, y: box.y * scale, w: box.w * scale, h: box.h * scale };
}

export function displayScale(naturalWidth: number, displayWidth: number): number {
  return naturalWidth > 0 ? displayWidth / naturalWidth : 1;
}

export function overlayElement(box: Box, scale: number, kind: 'focal' | 'contextual'): HTMLElement {
  const scaled = scaleBox(box, scale);
  const div = document.createElement('div');
  div.className = `overlay overlay-${kind}`;
  div.style.position = 'absolute';
  div.style.left = `${scaled.x}px`;
  div.style.top = `${scaled.y}px`;
  div.style.width = `${scaled.w}px`;
  div.style.height = `${scaled.h}px`;
  div.dataset.kind = kind;
  return div;
}
