// A fixture server: a fetch stub backed by canned API responses.

import { vi } from 'vitest';
import { Entry } from '../src/types.js';

export function makeEntry(overrides: Partial<Entry> = {}): Entry {
  return {
    entry_id: 'e'.repeat(12) + (overrides.capture_id ?? 'cap'),
    capture_id: 'cap',
    focal_description: 'A platform sign reading 4B next to the stairs.',
    background_summary: 'A train station concourse.',
    timestamp: 1_700_000_000,
    gps: null,
    image_size: [1280, 960],
    ctx_blob: null,
    lq_blob: null,
    focal: { x: 512, y: 360, w: 256, h: 240 },
    contextual: { x: 400, y: 300, w: 480, h: 360 },
    proposals: [],
    provenance: {
      strategy: 'contextual',
      gamma: 9,
      patch_variant: 'text_only',
      include_background: true,
      degraded: false,
    },
    ...overrides,
  };
}

export interface FixtureServer {
  requests: { url: string; body?: unknown }[];
  install(): void;
}

export function fixtureServer(routes: Record<string, unknown>): FixtureServer {
  const requests: { url: string; body?: unknown }[] = [];
  const handler = vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    const path = url.replace(/^https?:\/\/[^/]+/, '').split('?')[0];
    const body = init?.body ? JSON.parse(String(init.body)) : undefined;
    requests.push({ url, body });
    if (!(path in routes)) {
      return new Response('not found', { status: 404 });
    }
    const payload = routes[path];
    const resolved = typeof payload === 'function' ? payload(body) : payload;
    return new Response(JSON.stringify(resolved), {
      status: 200,
      headers: { 'Content-Type': 'application/json' },
    });
  });
  return {
    requests,
    install() {
      vi.stubGlobal('fetch', handler);
    },
  };
}
