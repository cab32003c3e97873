// The 16-candidate gallery: overlay-tinted thumbnails with method
// captions, a "degenerate" badge where applicable, and click-to-select.

import { CandidateInfo } from './api.js';
import { SessionStore } from './session.js';

const TINT: [number, number, number] = [255, 64, 64];

export class Gallery {
  constructor(
    private root: HTMLElement,
    private store: SessionStore,
  ) {
    store.on('bank', () => void this.render());
    store.on('record', () => this.highlight());
  }

  private async render(): Promise<void> {
    this.root.replaceChildren();
    const bank = this.store.bank;
    const id = this.store.currentId;
    if (!bank || id === null) return;
    const baseUrl = `/api/v1/images/${encodeURIComponent(id)}`;
    for (const cand of bank.candidates) {
      const cell = document.createElement('figure');
      cell.className = 'candidate';
      cell.dataset.index = String(cand.index);
      const canvas = document.createElement('canvas');
      cell.appendChild(canvas);
      const caption = document.createElement('figcaption');
      caption.textContent = `${cand.index}: ${cand.method}`;
      if (cand.degenerate) {
        const badge = document.createElement('span');
        badge.className = 'badge';
        badge.textContent = 'degenerate';
        caption.appendChild(badge);
      }
      cell.appendChild(caption);
      cell.addEventListener('click', () => void this.store.select(cand.index));
      this.root.appendChild(cell);
      void this.paintThumbnail(canvas, baseUrl, cand);
    }
    this.highlight();
  }

  private async paintThumbnail(
    canvas: HTMLCanvasElement,
    baseUrl: string,
    cand: CandidateInfo,
  ): Promise<void> {
    try {
      const [img, mask] = await Promise.all([loadImage(baseUrl), loadImage(cand.url)]);
      canvas.width = img.width;
      canvas.height = img.height;
      const ctx = canvas.getContext('2d');
      if (!ctx) return;
      ctx.drawImage(img, 0, 0);
      const data = ctx.getImageData(0, 0, canvas.width, canvas.height);
      const maskData = rasterToData(mask);
      for (let i = 0; i < maskData.data.length; i += 4) {
        if (maskData.data[i] > 127) {
          // candidate foreground: 50% tint
          data.data[i] = (data.data[i] + TINT[0]) >> 1;
          data.data[i + 1] = (data.data[i + 1] + TINT[1]) >> 1;
          data.data[i + 2] = (data.data[i + 2] + TINT[2]) >> 1;
        }
      }
      ctx.putImageData(data, 0, 0);
    } catch {
      canvas.classList.add('failed');
    }
  }

  private highlight(): void {
    const selected = this.store.record?.selected_candidate ?? 0;
    for (const el of this.root.querySelectorAll<HTMLElement>('.candidate')) {
      el.classList.toggle('selected', Number(el.dataset.index) === selected);
    }
  }
}

function loadImage(url: string): Promise<HTMLImageElement> {
  return new Promise((resolve, reject) => {
    const img = new Image();
    img.onload = () => resolve(img);
    img.onerror = () => reject(new Error(`cannot load ${url}`));
    img.src = url;
  });
}

function rasterToData(img: HTMLImageElement): ImageData {
  const off = document.createElement('canvas');
  off.width = img.width;
  off.height = img.height;
  const ctx = off.getContext('2d');
  if (!ctx) throw new Error('no 2d context');
  ctx.drawImage(img, 0, 0);
  return ctx.getImageData(0, 0, img.width, img.height);
}
