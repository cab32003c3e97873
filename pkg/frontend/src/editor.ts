// Polygon patch editor: click to drop vertices on the image canvas,
// double-click closes and posts the patch, then the tool asks whether to
// continue the same operation (yes restarts vertex capture, no exits).

import { SessionStore } from './session.js';

export class PolygonEditor {
  private active = false;
  private mode: 'add' | 'delete' = 'add';

  // replaceable for non-interactive use
  confirmContinue: (mode: string) => boolean = (mode) =>
    window.confirm(`Patch applied. Continue ${mode.toUpperCase()} PATCH with another polygon?`);

  constructor(
    private canvas: HTMLCanvasElement,
    private image: HTMLImageElement,
    private store: SessionStore,
  ) {
    canvas.addEventListener('click', (ev) => this.onClick(ev));
    canvas.addEventListener('dblclick', (ev) => void this.onDoubleClick(ev));
    store.on('position', () => this.exit());
  }

  begin(mode: 'add' | 'delete'): void {
    if (!this.store.canSave) {
      // patches may also start from an empty mask; that is still a
      // working mask once the first add lands
    }
    this.mode = mode;
    this.active = true;
    this.store.beginPolygon(mode);
    this.canvas.classList.add('editing');
    this.redraw();
  }

  exit(): void {
    this.active = false;
    this.canvas.classList.remove('editing');
    this.redraw();
  }

  get editing(): boolean {
    return this.active;
  }

  private toImageCoords(ev: MouseEvent): [number, number] {
    const rect = this.canvas.getBoundingClientRect();
    const scaleX = this.canvas.width / rect.width;
    const scaleY = this.canvas.height / rect.height;
    return [(ev.clientX - rect.left) * scaleX, (ev.clientY - rect.top) * scaleY];
  }

  private onClick(ev: MouseEvent): void {
    if (!this.active) return;
    const [x, y] = this.toImageCoords(ev);
    this.store.addVertex(x, y);
    this.redraw();
  }

  private async onDoubleClick(ev: MouseEvent): Promise<void> {
    if (!this.active) return;
    ev.preventDefault();
    const posted = await this.store.closePolygon();
    if (posted && this.confirmContinue(this.mode)) {
      this.store.beginPolygon(this.mode);
    } else {
      this.exit();
    }
    this.redraw();
  }

  redraw(): void {
    const ctx = this.canvas.getContext('2d');
    if (!ctx) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    if (this.image.complete && this.image.naturalWidth > 0) {
      this.canvas.width = this.image.naturalWidth;
      this.canvas.height = this.image.naturalHeight;
      ctx.drawImage(this.image, 0, 0);
    }
    const pending = this.store.pending;
    if (!pending || pending.vertices.length === 0) return;
    ctx.strokeStyle = pending.kind === 'add' ? '#00d0ff' : '#ff4040';
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    const [x0, y0] = pending.vertices[0];
    ctx.moveTo(x0, y0);
    for (const [x, y] of pending.vertices.slice(1)) ctx.lineTo(x, y);
    ctx.stroke();
    ctx.fillStyle = '#ff3333';
    for (const [x, y] of pending.vertices) {
      ctx.beginPath();
      ctx.arc(x, y, 2.5, 0, 2 * Math.PI);
      ctx.fill();
    }
  }
}
