// Query panel: state, request building, and answer rendering.
// History is append-only within a session; each answer can seed the next
// query via the "refine to this entry's hour" action.

import { ApiClient, QueryOptions } from './api.js';
import { Answer } from './types.js';

export const SENTINEL_ANSWER = 'no memory found';
export const REFINE_HALF_WINDOW_S = 3600;

export interface QueryPanelState {
  question: string;
  topK: number;
  useScene: boolean;
  useMetadata: boolean;
  hybrid: boolean;
  t0: number | null;
  t1: number | null;
  lat: number | null;
  lon: number | null;
  radiusM: number | null;
  history: { options: QueryOptions; answer: Answer }[];
  inFlight: boolean;
}

export function initialState(): QueryPanelState {
  return {
    question: '',
    topK: 3,
    useScene: false,
    useMetadata: false,
    hybrid: false,
    t0: null,
    t1: null,
    lat: null,
    lon: null,
    radiusM: null,
    history: [],
    inFlight: false,
  };
}

export function buildRequest(state: QueryPanelState): QueryOptions {
  const options: QueryOptions = {
    question: state.question,
    top_k: state.topK,
    use_scene: state.useScene,
    use_metadata: state.useMetadata,
    answer_mode: state.hybrid ? 'hybrid' : 'text_only',
  };
  if (state.useMetadata) {
    if (state.t0 !== null) options.t0 = state.t0;
    if (state.t1 !== null) options.t1 = state.t1;
    if (state.lat !== null && state.lon !== null && state.radiusM !== null) {
      options.lat = state.lat;
      options.lon = state.lon;
      options.radius_m = state.radiusM;
    }
  }
  return options;
}

// "Refine with this entry's time window": entry timestamp +- one hour,
// with the metadata toggle switched on so the window actually applies.
export function refineToEntryHour(state: QueryPanelState, timestamp: number): QueryPanelState {
  return {
    ...state,
    useMetadata: true,
    t0: timestamp - REFINE_HALF_WINDOW_S,
    t1: timestamp + REFINE_HALF_WINDOW_S,
  };
}

export function isSentinel(answer: Answer): boolean {
  return answer.answer === SENTINEL_ANSWER && answer.supports.length === 0;
}

export async function submitQuery(
  state: QueryPanelState,
  api: ApiClient,
): Promise<QueryPanelState> {
  if (state.inFlight) return state; // one in-flight query at a time
  const options = buildRequest(state);
  const pending = { ...state, inFlight: true };
  try {
    const answer = await api.postQuery(options);
    return {
      ...pending,
      inFlight: false,
      history: [...state.history, { options, answer }],
    };
  } catch (error) {
    return { ...pending, inFlight: false };
  }
}

export function renderAnswer(
  answer: Answer,
  api: ApiClient,
  onRefine: (entryId: string) => void,
): HTMLElement {
  const panel = document.createElement('section');
  panel.className = 'answer';

  if (isSentinel(answer)) {
    const empty = document.createElement('p');
    empty.className = 'empty-state';
    empty.textContent = 'Nothing in the archive matches this question yet.';
    panel.appendChild(empty);
    return panel;
  }

  const text = document.createElement('p');
  text.className = 'answer-text';
  text.textContent = answer.answer;
  panel.appendChild(text);

  const supports = document.createElement('ol');
  supports.className = 'supports';
  for (const support of answer.supports) {
    const item = document.createElement('li');
    item.dataset.entryId = support.entry_id;

    const score = document.createElement('span');
    score.className = 'score';
    score.textContent = support.score.toFixed(4);
    item.appendChild(score);

    const id = document.createElement('code');
    id.textContent = support.entry_id.slice(0, 12);
    item.appendChild(id);

    const refine = document.createElement('button');
    refine.type = 'button';
    refine.className = 'refine';
    refine.textContent = 'refine to this entry’s hour';
    refine.addEventListener('click', () => onRefine(support.entry_id));
    item.appendChild(refine);

    supports.appendChild(item);
  }
  panel.appendChild(supports);

  if (answer.patch_hashes.length > 0) {
    const patches = document.createElement('div');
    patches.className = 'patches';
    for (const hash of answer.patch_hashes) {
      const img = document.createElement('img');
      img.src = api.blobUrl(hash);
      img.alt = 'stored patch';
      img.className = 'patch';
      patches.appendChild(img);
    }
    panel.appendChild(patches);
  }
  return panel;
}
