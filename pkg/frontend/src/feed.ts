// Capture feed: filtered entry listing rendered as cards.

import { ApiClient, FeedFilters } from './api.js';
import { renderEntryCard } from './cards.js';
import { EntriesPage, SchemaError } from './types.js';

export function renderFeed(page: EntriesPage, api: ApiClient): HTMLElement {
  const feed = document.createElement('div');
  feed.className = 'feed';
  for (const entry of page.items) {
    feed.appendChild(renderEntryCard(entry, api));
  }
  const status = document.createElement('p');
  status.className = 'feed-status';
  status.textContent =
    page.total === 0
      ? 'No captures yet.'
      : `Showing ${page.items.length} of ${page.total} entries.`;
  feed.appendChild(status);
  return feed;
}

export async function loadFeed(
  container: HTMLElement,
  api: ApiClient,
  filters: FeedFilters = {},
): Promise<void> {
  container.replaceChildren();
  try {
    const page = await api.fetchEntries(filters);
    container.appendChild(renderFeed(page, api));
  } catch (error) {
    const banner = document.createElement('div');
    banner.className = 'error-banner';
    banner.textContent =
      error instanceof SchemaError
        ? `Server response failed validation: ${error.message}`
        : `Could not load entries: ${String(error)}`;
    container.appendChild(banner);
  }
}
