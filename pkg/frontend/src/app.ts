// Wires the feed and the query console to the page.

import { ApiClient } from './api.js';
import { loadFeed } from './feed.js';
import {
  QueryPanelState,
  initialState,
  refineToEntryHour,
  renderAnswer,
  submitQuery,
} from './query.js';
import { SchemaError } from './types.js';

const FEED_POLL_MS = 15000;

export function startApp(root: HTMLElement, api: ApiClient = new ApiClient()): void {
  root.innerHTML = `
    <header><h1>gazemem console</h1></header>
    <main>
      <section id="feed-panel">
        <form id="feed-filters">
          <input name="t0" type="number" placeholder="from (epoch s)">
          <input name="t1" type="number" placeholder="to (epoch s)">
          <button type="submit">filter</button>
        </form>
        <div id="feed"></div>
      </section>
      <section id="query-panel">
        <form id="query-form">
          <input name="question" type="text" placeholder="ask about a past moment" required>
          <label><input name="scene" type="checkbox"> +scene</label>
          <label><input name="metadata" type="checkbox"> +metadata</label>
          <label><input name="hybrid" type="checkbox"> hybrid</label>
          <input name="t0" type="number" placeholder="window from">
          <input name="t1" type="number" placeholder="window to">
          <button type="submit">ask</button>
        </form>
        <div id="answers"></div>
      </section>
    </main>`;

  const feedContainer = root.querySelector('#feed') as HTMLElement;
  const feedForm = root.querySelector('#feed-filters') as HTMLFormElement;
  const queryForm = root.querySelector('#query-form') as HTMLFormElement;
  const answers = root.querySelector('#answers') as HTMLElement;

  let state: QueryPanelState = initialState();

  const numberOrNull = (raw: FormDataEntryValue | null): number | null => {
    const text = typeof raw === 'string' ? raw.trim() : '';
    return text === '' ? null : Number(text);
  };

  const refreshFeed = () => {
    const data = new FormData(feedForm);
    const t0 = numberOrNull(data.get('t0'));
    const t1 = numberOrNull(data.get('t1'));
    void loadFeed(feedContainer, api, {
      ...(t0 !== null ? { t0 } : {}),
      ...(t1 !== null ? { t1 } : {}),
    });
  };

  feedForm.addEventListener('submit', (event) => {
    event.preventDefault();
    refreshFeed();
  });

  const syncFormFromState = () => {
    (queryForm.elements.namedItem('metadata') as HTMLInputElement).checked = state.useMetadata;
    (queryForm.elements.namedItem('t0') as HTMLInputElement).value =
      state.t0 === null ? '' : String(state.t0);
    (queryForm.elements.namedItem('t1') as HTMLInputElement).value =
      state.t1 === null ? '' : String(state.t1);
  };

  const runQuery = async () => {
    state = await submitQuery(state, api);
    const latest = state.history[state.history.length - 1];
    if (!latest) {
      const banner = document.createElement('div');
      banner.className = 'error-banner';
      banner.textContent = 'Query failed; see the server log.';
      answers.prepend(banner);
      return;
    }
    const panel = renderAnswer(latest.answer, api, (entryId) => {
      void api.fetchEntry(entryId).then((entry) => {
        state = refineToEntryHour(state, entry.timestamp);
        syncFormFromState();
        void runQuery();
      });
    });
    answers.prepend(panel);
  };

  queryForm.addEventListener('submit', (event) => {
    event.preventDefault();
    const data = new FormData(queryForm);
    state = {
      ...state,
      question: String(data.get('question') ?? ''),
      useScene: data.get('scene') === 'on',
      useMetadata: data.get('metadata') === 'on',
      hybrid: data.get('hybrid') === 'on',
      t0: numberOrNull(data.get('t0')),
      t1: numberOrNull(data.get('t1')),
    };
    void runQuery();
  });

  refreshFeed();
  setInterval(refreshFeed, FEED_POLL_MS);
}

declare global {
  interface Window {
    gazememStart?: typeof startApp;
  }
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  try {
    startApp(document.getElementById('app') as HTMLElement);
  } catch (error) {
    const detail = error instanceof SchemaError ? error.message : String(error);
    document.body.textContent = `console failed to start: ${detail}`;
  }
}
window.gazememStart = startApp;
