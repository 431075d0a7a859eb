// Entry cards for the capture feed: thumbnail (or placeholder), focal text
// excerpt, timestamp, strategy badge, degraded indicator, box overlays.

import { ApiClient } from './api.js';
import { overlayElement } from './overlay.js';
import { Box, Entry } from './types.js';

export const THUMB_WIDTH = 240;
const EXCERPT_CHARS = 160;

export type ThumbSource = { hash: string; kind: 'lq' | 'ctx' } | null;

export function thumbnailSource(entry: Entry): ThumbSource {
  if (entry.lq_blob) return { hash: entry.lq_blob.sha256, kind: 'lq' };
  if (entry.ctx_blob) return { hash: entry.ctx_blob.sha256, kind: 'ctx' };
  return null;
}

// Server boxes are in original-image pixels. The lq thumbnail shows the
// whole frame, so overlay = box * (displayed width / original width). The
// ctx thumbnail shows the contextual crop at native resolution, so boxes
// are first shifted into crop coordinates, then scaled the same way.
export function overlayGeometry(
  entry: Entry,
  kind: 'lq' | 'ctx',
  displayedWidth: number,
): { focal: Box; contextual: Box; scale: number } {
  if (kind === 'lq') {
    const scale = displayedWidth / entry.image_size[0];
    return { focal: entry.focal, contextual: entry.contextual, scale };
  }
  const scale = displayedWidth / entry.contextual.w;
  const shift = (box: Box): Box => ({
    x: box.x - entry.contextual.x,
    y: box.y - entry.contextual.y,
    w: box.w,
    h: box.h,
  });
  return { focal: shift(entry.focal), contextual: shift(entry.contextual), scale };
}

export function excerpt(text: string): string {
  return text.length <= EXCERPT_CHARS ? text : text.slice(0, EXCERPT_CHARS - 1) + '…';
}

export function formatTimestamp(epochSeconds: number): string {
  return new Date(epochSeconds * 1000).toISOString().replace('T', ' ').slice(0, 19);
}

export function attachOverlays(
  container: HTMLElement,
  entry: Entry,
  kind: 'lq' | 'ctx',
  displayedWidth: number,
): void {
  for (const old of Array.from(container.querySelectorAll('.overlay'))) old.remove();
  const geo = overlayGeometry(entry, kind, displayedWidth);
  container.appendChild(overlayElement(geo.contextual, geo.scale, 'contextual'));
  container.appendChild(overlayElement(geo.focal, geo.scale, 'focal'));
}

export function renderEntryCard(entry: Entry, api: ApiClient): HTMLElement {
  const card = document.createElement('article');
  card.className = 'entry-card';
  card.dataset.entryId = entry.entry_id;

  const thumbBox = document.createElement('div');
  thumbBox.className = 'thumb';
  const source = thumbnailSource(entry);
  if (source) {
    const img = document.createElement('img');
    img.src = api.blobUrl(source.hash);
    img.alt = `capture ${entry.capture_id}`;
    img.width = THUMB_WIDTH;
    thumbBox.appendChild(img);
    attachOverlays(thumbBox, entry, source.kind, THUMB_WIDTH);
  } else {
    const placeholder = document.createElement('div');
    placeholder.className = 'thumb-placeholder';
    placeholder.textContent = 'text-only entry';
    thumbBox.appendChild(placeholder);
  }
  card.appendChild(thumbBox);

  const body = document.createElement('div');
  body.className = 'card-body';

  const text = document.createElement('p');
  text.className = 'excerpt';
  text.textContent = excerpt(entry.focal_description);
  body.appendChild(text);

  const meta = document.createElement('div');
  meta.className = 'card-meta';
  const when = document.createElement('time');
  when.textContent = formatTimestamp(entry.timestamp);
  meta.appendChild(when);

  const badge = document.createElement('span');
  badge.className = 'badge';
  badge.textContent = `${entry.provenance.strategy} γ=${entry.provenance.gamma}`;
  meta.appendChild(badge);

  if (entry.provenance.degraded) {
    const degraded = document.createElement('span');
    degraded.className = 'badge degraded';
    degraded.textContent = 'degraded';
    meta.appendChild(degraded);
  }
  body.appendChild(meta);
  card.appendChild(body);
  return card;
}
