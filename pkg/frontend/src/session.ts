// Session state for the annotation workflow. The store mirrors the
// service: it keeps no authoritative data of its own, so reconstructing
// it (a page reload) from the same backend yields the same session.

import { AnnotationRecord, ApiClient, BankInfo, ImageEntry } from './api.js';

export type SessionEvent =
  | 'images'
  | 'record'
  | 'bank'
  | 'overlay'
  | 'warning'
  | 'position';

export interface PendingPolygon {
  kind: 'add' | 'delete';
  vertices: Array<[number, number]>;
}

export class SessionStore {
  images: ImageEntry[] = [];
  position = 0;
  record: AnnotationRecord | null = null;
  bank: BankInfo | null = null;
  polarity: string = 'normal';
  dirty = false;
  pending: PendingPolygon | null = null;
  lastWarning = '';
  overlayRevision = 0;

  // navigation guard; replaced with window.confirm in the browser
  confirmDiscard: () => boolean = () => true;

  private listeners = new Map<SessionEvent, Array<() => void>>();

  constructor(private api: ApiClient) {}

  on(event: SessionEvent, fn: () => void): void {
    const list = this.listeners.get(event) ?? [];
    list.push(fn);
    this.listeners.set(event, list);
  }

  private emit(event: SessionEvent): void {
    for (const fn of this.listeners.get(event) ?? []) fn();
  }

  get currentId(): string | null {
    return this.images.length ? this.images[this.position].image_id : null;
  }

  /** SAVE is allowed only when a mask can exist: a candidate is selected
   * or at least one patch has been applied. */
  get canSave(): boolean {
    if (!this.record) return false;
    return this.record.selected_candidate >= 1 || this.record.edits.length > 0;
  }

  get status(): string {
    return this.record?.status ?? 'untagged';
  }

  async load(): Promise<void> {
    this.images = await this.api.listImages();
    this.position = 0;
    this.emit('images');
    if (this.images.length) await this.open(0);
  }

  async open(position: number): Promise<void> {
    this.position = Math.min(Math.max(position, 0), this.images.length - 1);
    const id = this.currentId;
    if (id === null) return;
    this.record = await this.api.getAnnotation(id);
    this.polarity = this.record.polarity;
    this.dirty = false;
    this.pending = null;
    this.emit('position');
    this.emit('record');
    await this.refreshBank();
  }

  async refreshBank(): Promise<void> {
    const id = this.currentId;
    if (id === null) return;
    this.bank = await this.api.getBank(id, this.polarity);
    this.emit('bank');
  }

  /** Exactly one selection POST per keypress; 0 clears the selection. */
  async select(candidate: number): Promise<void> {
    const id = this.currentId;
    if (id === null) return;
    if (candidate < 0 || candidate > 16) {
      this.warn(`candidate ${candidate} out of range 0..16`);
      return;
    }
    this.record = await this.api.postSelection(id, candidate, this.polarity);
    this.dirty = true;
    this.bumpOverlay();
    this.emit('record');
  }

  async setPolarity(polarity: string): Promise<void> {
    this.polarity = polarity;
    await this.refreshBank();
    if (this.record && this.record.selected_candidate >= 1) {
      await this.select(this.record.selected_candidate);
    }
  }

  beginPolygon(kind: 'add' | 'delete'): void {
    this.pending = { kind, vertices: [] };
  }

  addVertex(x: number, y: number): void {
    if (!this.pending) return;
    this.pending.vertices.push([x, y]);
  }

  /** Close the polygon (double-click); posts the patch or warns and
   * discards when fewer than 3 vertices were captured. */
  async closePolygon(): Promise<boolean> {
    const id = this.currentId;
    if (!this.pending || id === null) return false;
    const { kind, vertices } = this.pending;
    if (vertices.length < 3) {
      this.pending = null;
      this.warn('polygon needs at least 3 vertices; discarded');
      return false;
    }
    const resp = await this.api.postPatch(id, kind, vertices);
    this.record = resp.record;
    this.pending = null;
    this.dirty = true;
    this.bumpOverlay();
    this.emit('record');
    return true;
  }

  async save(): Promise<void> {
    const id = this.currentId;
    if (id === null) return;
    if (!this.canSave) {
      this.warn('nothing to save: no candidate selected and no patches');
      return;
    }
    this.record = await this.api.postCommit(id);
    this.dirty = false;
    this.images = this.images.map((e) =>
      e.image_id === id ? { ...e, status: this.record!.status } : e,
    );
    this.bumpOverlay();
    this.emit('record');
    this.emit('images');
  }

  async skip(): Promise<void> {
    const id = this.currentId;
    if (id === null) return;
    this.record = await this.api.postSkip(id);
    this.images = this.images.map((e) =>
      e.image_id === id ? { ...e, status: this.record!.status } : e,
    );
    this.emit('record');
    this.emit('images');
  }

  /** RELOAD: drop local context and re-read everything from the service. */
  async reload(): Promise<void> {
    await this.open(this.position);
    this.bumpOverlay();
  }

  async next(): Promise<void> {
    await this.step(1);
  }

  async prev(): Promise<void> {
    await this.step(-1);
  }

  private async step(delta: number): Promise<void> {
    if (this.dirty && !this.confirmDiscard()) return;
    const target = Math.min(Math.max(this.position + delta, 0), this.images.length - 1);
    if (target !== this.position) await this.open(target);
  }

  overlayUrl(): string | null {
    const id = this.currentId;
    if (id === null) return null;
    return `${this.api.overlayUrl(id)}?rev=${this.overlayRevision}`;
  }

  private bumpOverlay(): void {
    this.overlayRevision += 1;
    this.emit('overlay');
  }

  private warn(message: string): void {
    this.lastWarning = message;
    this.emit('warning');
  }
}
