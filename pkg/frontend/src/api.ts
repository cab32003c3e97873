// Typed client for the /api/v1 annotation service. Every method maps to
// exactly one endpoint; the UI never talks to the backend any other way.

export interface ImageEntry {
  image_id: string;
  status: string; // untagged | skipped | tagged
}

export interface CandidateInfo {
  index: number;
  method: string;
  degenerate: boolean;
  url: string;
}

export interface BankInfo {
  image_id: string;
  polarity: string;
  candidates: CandidateInfo[];
}

export interface EditInfo {
  kind: string;
  sequence: number;
  vertices: number[][];
}

export interface AnnotationRecord {
  version: number;
  image_id: string;
  status: string;
  polarity: string;
  selected_candidate: number;
  edits: EditInfo[];
  mask_path: string | null;
  updated_at: string | null;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(message: string, public status: number) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private base: string = '',
    private fetchImpl: FetchLike = (url, init) => globalThis.fetch(url, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchImpl(this.base + path);
    if (!resp.ok) throw new ApiError(await describeFailure(resp), resp.status);
    return (await resp.json()) as T;
  }

  private async postJson<T>(path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchImpl(this.base + path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: body === undefined ? null : JSON.stringify(body),
    });
    if (!resp.ok) throw new ApiError(await describeFailure(resp), resp.status);
    return (await resp.json()) as T;
  }

  listImages(): Promise<ImageEntry[]> {
    return this.getJson('/api/v1/images');
  }

  imageUrl(imageId: string): string {
    return `${this.base}/api/v1/images/${encodeURIComponent(imageId)}`;
  }

  overlayUrl(imageId: string): string {
    return `${this.base}/api/v1/images/${encodeURIComponent(imageId)}/overlay`;
  }

  getBank(imageId: string, polarity: string): Promise<BankInfo> {
    return this.getJson(
      `/api/v1/images/${encodeURIComponent(imageId)}/bank?polarity=${polarity}`,
    );
  }

  getAnnotation(imageId: string): Promise<AnnotationRecord> {
    return this.getJson(`/api/v1/images/${encodeURIComponent(imageId)}/annotation`);
  }

  postSelection(imageId: string, candidate: number, polarity: string): Promise<AnnotationRecord> {
    return this.postJson(`/api/v1/images/${encodeURIComponent(imageId)}/selection`, {
      candidate,
      polarity,
    });
  }

  postPatch(
    imageId: string,
    kind: 'add' | 'delete',
    vertices: Array<[number, number]>,
  ): Promise<{ record: AnnotationRecord; mask_url: string }> {
    return this.postJson(`/api/v1/images/${encodeURIComponent(imageId)}/patch`, {
      kind,
      vertices,
    });
  }

  postCommit(imageId: string): Promise<AnnotationRecord> {
    return this.postJson(`/api/v1/images/${encodeURIComponent(imageId)}/commit`);
  }

  postSkip(imageId: string): Promise<AnnotationRecord> {
    return this.postJson(`/api/v1/images/${encodeURIComponent(imageId)}/skip`);
  }

  async fetchOverlayBytes(imageId: string): Promise<ArrayBuffer> {
    const resp = await this.fetchImpl(this.overlayUrl(imageId));
    if (!resp.ok) throw new ApiError(await describeFailure(resp), resp.status);
    return resp.arrayBuffer();
  }
}

async function describeFailure(resp: Response): Promise<string> {
  try {
    const body = (await resp.json()) as { detail?: string };
    if (body && typeof body.detail === 'string') return body.detail;
  } catch {
    // non-JSON error body
  }
  return `request failed with status ${resp.status}`;
}
