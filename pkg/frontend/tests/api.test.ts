import { afterEach, describe, expect, it, vi } from 'vitest';

import { ApiClient } from '../src/api.js';
import { SchemaError } from '../src/types.js';
import { fixtureServer, makeEntry } from './fixtures.js';

afterEach(() => {
  vi.unstubAllGlobals();
});

describe('ApiClient', () => {
  it('passes feed filters as query parameters', async () => {
    const server = fixtureServer({
      '/entries': { items: [], total: 0, offset: 5, limit: 10 },
    });
    server.install();
    const page = await new ApiClient().fetchEntries({ t0: 100, t1: 200, offset: 5, limit: 10 });
    expect(page.total).toBe(0);
    expect(server.requests[0].url).toContain('t0=100');
    expect(server.requests[0].url).toContain('t1=200');
  });

  it('validates single-entry responses', async () => {
    const entry = makeEntry();
    const server = fixtureServer({ [`/entries/${entry.entry_id}`]: entry });
    server.install();
    const fetched = await new ApiClient().fetchEntry(entry.entry_id);
    expect(fetched.focal).toEqual(entry.focal);
  });

  it('raises SchemaError on malformed answers instead of rendering blanks', async () => {
    const server = fixtureServer({ '/query': { nope: true } });
    server.install();
    await expect(
      new ApiClient().postQuery({
        question: 'q',
        top_k: 1,
        use_scene: false,
        use_metadata: false,
        answer_mode: 'text_only',
      }),
    ).rejects.toThrow(SchemaError);
  });

  it('propagates HTTP errors', async () => {
    const server = fixtureServer({});
    server.install();
    await expect(new ApiClient().fetchEntries()).rejects.toThrow('failed: 404');
  });

  it('builds blob URLs from the documented endpoint', () => {
    expect(new ApiClient().blobUrl('ab12')).toBe('/blobs/ab12');
    expect(new ApiClient('http://host:9').blobUrl('ab12')).toBe('http://host:9/blobs/ab12');
  });
});
