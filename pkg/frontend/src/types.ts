// API types mirroring the service's response models, with runtime checks.
// Every response is validated before rendering; a violation throws
// SchemaError, which the UI surfaces as a visible banner.

export interface Box {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface BlobRef {
  sha256: string;
  length: number;
  media_type: string;
}

export interface Provenance {
  strategy: string;
  gamma: number;
  patch_variant: string;
  include_background: boolean;
  degraded: boolean;
}

export interface Entry {
  entry_id: string;
  capture_id: string;
  focal_description: string;
  background_summary: string | null;
  timestamp: number;
  gps: [number, number] | null;
  image_size: [number, number];
  ctx_blob: BlobRef | null;
  lq_blob: BlobRef | null;
  focal: Box;
  contextual: Box;
  proposals: Box[];
  provenance: Provenance;
}

export interface EntriesPage {
  items: Entry[];
  total: number;
  offset: number;
  limit: number;
}

export interface Support {
  entry_id: string;
  score: number;
}

export interface Answer {
  answer: string;
  mode: string;
  supports: Support[];
  patch_hashes: string[];
}

export class SchemaError extends Error {
  constructor(where: string, detail: string) {
    super(`${where}: ${detail}`);
    this.name = 'SchemaError';
  }
}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === 'object' && value !== null && !Array.isArray(value);
}

function need(cond: boolean, where: string, detail: string): asserts cond {
  if (!cond) throw new SchemaError(where, detail);
}

export function validateBox(value: unknown, where: string): Box {
  need(isRecord(value), where, 'box is not an object');
  const { x, y, w, h } = value as Record<string, unknown>;
  need(
    [x, y, w, h].every((v) => typeof v === 'number' && Number.isFinite(v)),
    where,
    'box fields must be finite numbers',
  );
  need((w as number) > 0 && (h as number) > 0, where, 'box must have positive size');
  return { x: x as number, y: y as number, w: w as number, h: h as number };
}

function validateBlobRef(value: unknown, where: string): BlobRef | null {
  if (value === null || value === undefined) return null;
  need(isRecord(value), where, 'blob ref is not an object');
  need(typeof value.sha256 === 'string' && value.sha256.length > 0, where, 'blob ref needs sha256');
  need(typeof value.length === 'number', where, 'blob ref needs length');
  return {
    sha256: value.sha256 as string,
    length: value.length as number,
    media_type: typeof value.media_type === 'string' ? value.media_type : 'image/jpeg',
  };
}

export function validateEntry(value: unknown): Entry {
  const where = 'entry';
  need(isRecord(value), where, 'entry is not an object');
  need(typeof value.entry_id === 'string' && value.entry_id.length > 0, where, 'entry_id missing');
  need(typeof value.focal_description === 'string', where, 'focal_description missing');
  need(typeof value.timestamp === 'number', where, 'timestamp missing');
  need(isRecord(value.provenance), where, 'provenance missing');
  const prov = value.provenance as Record<string, unknown>;
  need(typeof prov.strategy === 'string', where, 'provenance.strategy missing');
  need(typeof prov.gamma === 'number', where, 'provenance.gamma missing');
  need(
    Array.isArray(value.image_size) && value.image_size.length === 2,
    where,
    'image_size missing',
  );
  return {
    entry_id: value.entry_id as string,
    capture_id: typeof value.capture_id === 'string' ? value.capture_id : '',
    focal_description: value.focal_description as string,
    background_summary:
      typeof value.background_summary === 'string' ? value.background_summary : null,
    timestamp: value.timestamp as number,
    gps: Array.isArray(value.gps) ? (value.gps as [number, number]) : null,
    image_size: value.image_size as [number, number],
    ctx_blob: validateBlobRef(value.ctx_blob, where),
    lq_blob: validateBlobRef(value.lq_blob, where),
    focal: validateBox(value.focal, `${where}.focal`),
    contextual: validateBox(value.contextual, `${where}.contextual`),
    proposals: Array.isArray(value.proposals)
      ? value.proposals.map((b, i) => validateBox(b, `${where}.proposals[${i}]`))
      : [],
    provenance: {
      strategy: prov.strategy as string,
      gamma: prov.gamma as number,
      patch_variant: typeof prov.patch_variant === 'string' ? prov.patch_variant : 'text_only',
      include_background: Boolean(prov.include_background),
      degraded: Boolean(prov.degraded),
    },
  };
}

export function validateEntriesPage(value: unknown): EntriesPage {
  const where = 'entries page';
  need(isRecord(value), where, 'not an object');
  need(Array.isArray(value.items), where, 'items missing');
  need(typeof value.total === 'number', where, 'total missing');
  return {
    items: (value.items as unknown[]).map(validateEntry),
    total: value.total as number,
    offset: typeof value.offset === 'number' ? value.offset : 0,
    limit: typeof value.limit === 'number' ? value.limit : value.items.length,
  };
}

export function validateAnswer(value: unknown): Answer {
  const where = 'answer';
  need(isRecord(value), where, 'not an object');
  need(typeof value.answer === 'string', where, 'answer text missing');
  need(Array.isArray(value.supports), where, 'supports missing');
  const supports = (value.supports as unknown[]).map((s, i) => {
    need(isRecord(s), where, `supports[${i}] is not an object`);
    need(typeof s.entry_id === 'string', where, `supports[${i}].entry_id missing`);
    need(typeof s.score === 'number', where, `supports[${i}].score missing`);
    return { entry_id: s.entry_id as string, score: s.score as number };
  });
  return {
    answer: value.answer as string,
    mode: typeof value.mode === 'string' ? value.mode : 'text_only',
    supports,
    patch_hashes: Array.isArray(value.patch_hashes) ? (value.patch_hashes as string[]) : [],
  };
}
