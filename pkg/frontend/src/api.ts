// Thin client over the documented HTTP API (no private endpoints).

import {
  Answer,
  EntriesPage,
  Entry,
  validateAnswer,
  validateEntriesPage,
  validateEntry,
} from './types.js';

export interface FeedFilters {
  t0?: number;
  t1?: number;
  lat?: number;
  lon?: number;
  radius_m?: number;
  offset?: number;
  limit?: number;
}

export interface QueryOptions {
  question: string;
  top_k: number;
  use_scene: boolean;
  use_metadata: boolean;
  answer_mode: 'text_only' | 'hybrid';
  t0?: number;
  t1?: number;
  lat?: number;
  lon?: number;
  radius_m?: number;
}

export class ApiClient {
  constructor(private readonly base: string = '') {}

  blobUrl(sha256: string): string {
    return `${this.base}/blobs/${sha256}`;
  }

  private async getJson(path: string): Promise<unknown> {
    const response = await fetch(this.base + path);
    if (!response.ok) {
      throw new Error(`GET ${path} failed: ${response.status}`);
    }
    return response.json();
  }

  async fetchEntries(filters: FeedFilters = {}): Promise<EntriesPage> {
    const params = new URLSearchParams();
    for (const [key, value] of Object.entries(filters)) {
      if (value !== undefined && value !== null) params.set(key, String(value));
    }
    const suffix = params.size > 0 ? `?${params.toString()}` : '';
    return validateEntriesPage(await this.getJson(`/entries${suffix}`));
  }

  async fetchEntry(entryId: string): Promise<Entry> {
    return validateEntry(await this.getJson(`/entries/${entryId}`));
  }

  async postQuery(options: QueryOptions): Promise<Answer> {
    const response = await fetch(`${this.base}/query`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(options),
    });
    if (!response.ok) {
      throw new Error(`POST /query failed: ${response.status}`);
    }
    return validateAnswer(await response.json());
  }
}
