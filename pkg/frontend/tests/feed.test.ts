import { afterEach, describe, expect, it, vi } from 'vitest';

import { ApiClient } from '../src/api.js';
import { renderEntryCard, THUMB_WIDTH } from '../src/cards.js';
import { loadFeed, renderFeed } from '../src/feed.js';
import { fixtureServer, makeEntry } from './fixtures.js';

afterEach(() => {
  vi.unstubAllGlobals();
});

const api = new ApiClient();

describe('entry cards', () => {
  it('renders one card per entry', async () => {
    const entries = [0, 1, 2].map((i) =>
      makeEntry({ capture_id: `cap${i}`, timestamp: 1_700_000_000 + i }),
    );
    const server = fixtureServer({
      '/entries': { items: entries, total: 3, offset: 0, limit: 50 },
    });
    server.install();
    const container = document.createElement('div');
    await loadFeed(container, api);
    expect(container.querySelectorAll('.entry-card')).toHaveLength(3);
  });

  it('text-only entries show a placeholder instead of a thumbnail', () => {
    const card = renderEntryCard(makeEntry(), api);
    expect(card.querySelector('.thumb-placeholder')).not.toBeNull();
    expect(card.querySelector('img')).toBeNull();
  });

  it('entries with an lq blob get a thumbnail and scaled overlays', () => {
    const entry = makeEntry({
      lq_blob: { sha256: 'f'.repeat(64), length: 1000, media_type: 'image/jpeg' },
    });
    const card = renderEntryCard(entry, api);
    const img = card.querySelector('img');
    expect(img?.getAttribute('src')).toBe(`/blobs/${'f'.repeat(64)}`);
    const focal = card.querySelector('.overlay-focal') as HTMLElement;
    const scale = THUMB_WIDTH / entry.image_size[0];
    expect(focal.style.left).toBe(`${entry.focal.x * scale}px`);
    expect(focal.style.width).toBe(`${entry.focal.w * scale}px`);
    expect(card.querySelector('.overlay-contextual')).not.toBeNull();
  });

  it('degraded entries carry a visible badge', () => {
    const entry = makeEntry();
    entry.provenance.degraded = true;
    const card = renderEntryCard(entry, api);
    expect(card.querySelector('.badge.degraded')?.textContent).toBe('degraded');
  });

  it('feed status reports pagination', () => {
    const page = { items: [makeEntry()], total: 7, offset: 0, limit: 1 };
    const feed = renderFeed(page, api);
    expect(feed.querySelector('.feed-status')?.textContent).toContain('1 of 7');
  });
});

describe('schema validation', () => {
  it('surfaces malformed responses as a visible error banner', async () => {
    const server = fixtureServer({
      '/entries': { items: [{ entry_id: '' }], total: 1, offset: 0, limit: 50 },
    });
    server.install();
    const container = document.createElement('div');
    await loadFeed(container, api);
    expect(container.querySelector('.entry-card')).toBeNull();
    const banner = container.querySelector('.error-banner');
    expect(banner?.textContent).toContain('failed validation');
  });
});
