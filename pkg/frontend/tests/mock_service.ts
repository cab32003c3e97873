// Fetch-compatible in-memory stand-in for the annotation service,
// mirroring the backend's record semantics closely enough for session
// tests: selection resets edits, commit requires a working mask, the
// overlay is a deterministic function of the persisted record.

import type { FetchLike } from '../src/api.js';

interface MockRecord {
  version: number;
  image_id: string;
  status: string;
  polarity: string;
  selected_candidate: number;
  edits: Array<{ kind: string; sequence: number; vertices: number[][] }>;
  mask_path: string | null;
  updated_at: string | null;
}

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

export class MockService {
  records = new Map<string, MockRecord>();
  log: Array<{ method: string; path: string; body?: unknown }> = [];

  constructor(imageIds: string[]) {
    for (const id of imageIds) {
      this.records.set(id, {
        version: 1,
        image_id: id,
        status: 'untagged',
        polarity: 'normal',
        selected_candidate: 0,
        edits: [],
        mask_path: null,
        updated_at: null,
      });
    }
  }

  get fetch(): FetchLike {
    return async (url, init) => this.dispatch(url, init);
  }

  requests(method: string, pathSuffix: string): number {
    return this.log.filter((r) => r.method === method && r.path.endsWith(pathSuffix)).length;
  }

  private workingMaskExists(rec: MockRecord): boolean {
    return rec.selected_candidate >= 1 || rec.edits.length > 0;
  }

  /** stand-in for the overlay PNG: deterministic bytes derived from the
   * record state that defines the mask */
  private overlayBytes(rec: MockRecord): Uint8Array {
    const basis = JSON.stringify({
      candidate: rec.selected_candidate,
      polarity: rec.polarity,
      edits: rec.edits,
    });
    return new TextEncoder().encode(`overlay:${basis}`);
  }

  private async dispatch(url: string, init?: RequestInit): Promise<Response> {
    const method = (init?.method ?? 'GET').toUpperCase();
    const u = new URL(url, 'http://mock');
    const path = u.pathname;
    let body: unknown;
    if (init?.body) body = JSON.parse(String(init.body));
    this.log.push({ method, path, body });

    if (method === 'GET' && path === '/api/v1/images') {
      return json(
        [...this.records.values()].map((r) => ({ image_id: r.image_id, status: r.status })),
      );
    }

    const m = path.match(/^\/api\/v1\/images\/([^/]+)(?:\/(.+))?$/);
    if (!m) return json({ detail: 'not found' }, 404);
    const rec = this.records.get(decodeURIComponent(m[1]));
    if (!rec) return json({ detail: 'unknown image' }, 404);
    const tail = m[2] ?? '';

    if (method === 'GET' && tail === 'annotation') return json(rec);

    if (method === 'GET' && tail === 'bank') {
      const polarity = u.searchParams.get('polarity') ?? 'normal';
      const methods = [
        'otsu:R', 'otsu:G', 'otsu:B', 'otsu:H', 'otsu:S', 'otsu:V',
        'otsu:L', 'otsu:a', 'otsu:b',
        'cluster:{1}', 'cluster:{2}', 'cluster:{3}',
        'cluster:{1,2}', 'cluster:{1,3}', 'cluster:{2,3}',
        'rats',
      ];
      return json({
        image_id: rec.image_id,
        polarity,
        candidates: methods.map((method_, i) => ({
          index: i + 1,
          method: method_,
          degenerate: false,
          url: `/api/v1/images/${rec.image_id}/bank/${i + 1}?polarity=${polarity}`,
        })),
      });
    }

    if (method === 'GET' && tail === 'overlay') {
      if (!this.workingMaskExists(rec)) return json({ detail: 'no working mask' }, 404);
      return new Response(this.overlayBytes(rec), {
        status: 200,
        headers: { 'content-type': 'image/png' },
      });
    }

    if (method === 'POST' && tail === 'selection') {
      const { candidate, polarity } = body as { candidate: number; polarity: string };
      if (candidate < 0 || candidate > 16) return json({ detail: 'out of range' }, 422);
      if (rec.status === 'tagged') {
        rec.status = candidate >= 1 ? 'tagged' : 'untagged';
      } else {
        rec.status = 'untagged';
      }
      rec.selected_candidate = candidate;
      rec.polarity = polarity;
      rec.edits = [];
      rec.updated_at = 'mock-time';
      return json(rec);
    }

    if (method === 'POST' && tail === 'patch') {
      const { kind, vertices } = body as { kind: string; vertices: number[][] };
      if (vertices.length < 3) return json({ detail: 'degenerate polygon' }, 422);
      rec.edits = [...rec.edits, { kind, sequence: rec.edits.length + 1, vertices }];
      rec.updated_at = 'mock-time';
      return json({ record: rec, mask_url: `/api/v1/images/${rec.image_id}/mask` });
    }

    if (method === 'POST' && tail === 'commit') {
      if (!this.workingMaskExists(rec)) return json({ detail: 'nothing to save' }, 409);
      rec.status = 'tagged';
      rec.mask_path = `${rec.image_id}.mask.png`;
      rec.updated_at = 'mock-time';
      return json(rec);
    }

    if (method === 'POST' && tail === 'skip') {
      if (rec.status === 'untagged') rec.status = 'skipped';
      return json(rec);
    }

    return json({ detail: `unhandled ${method} ${path}` }, 404);
  }
}
