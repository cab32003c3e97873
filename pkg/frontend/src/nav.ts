// LOAD / PREV / NEXT / SAVE / RELOAD / VIEW MASK / SKIP controls plus the
// tagged-status chip and warning banner.

import { SessionStore } from './session.js';

export interface NavElements {
  load: HTMLButtonElement;
  prev: HTMLButtonElement;
  next: HTMLButtonElement;
  save: HTMLButtonElement;
  reload: HTMLButtonElement;
  viewMask: HTMLButtonElement;
  skip: HTMLButtonElement;
  addPatch: HTMLButtonElement;
  deletePatch: HTMLButtonElement;
  polarity: HTMLSelectElement;
  statusChip: HTMLElement;
  positionLabel: HTMLElement;
  warningBanner: HTMLElement;
}

export class NavigationBar {
  overlayVisible = false;

  constructor(
    private el: NavElements,
    private store: SessionStore,
    private onToggleOverlay: (visible: boolean) => void,
    onBeginPatch: (mode: 'add' | 'delete') => void,
  ) {
    el.load.addEventListener('click', () => void store.load());
    el.prev.addEventListener('click', () => void store.prev());
    el.next.addEventListener('click', () => void store.next());
    el.save.addEventListener('click', () => void store.save());
    el.reload.addEventListener('click', () => void store.reload());
    el.skip.addEventListener('click', () => void store.skip());
    el.viewMask.addEventListener('click', () => this.toggleOverlay());
    el.addPatch.addEventListener('click', () => onBeginPatch('add'));
    el.deletePatch.addEventListener('click', () => onBeginPatch('delete'));
    el.polarity.addEventListener('change', () => void store.setPolarity(el.polarity.value));

    store.on('record', () => this.refresh());
    store.on('images', () => this.refresh());
    store.on('position', () => this.refresh());
    store.on('warning', () => this.showWarning());
    this.refresh();
  }

  toggleOverlay(): void {
    this.overlayVisible = !this.overlayVisible;
    this.onToggleOverlay(this.overlayVisible);
  }

  refresh(): void {
    const { el, store } = this;
    el.save.disabled = !store.canSave;
    el.prev.disabled = store.position <= 0;
    el.next.disabled = store.position >= store.images.length - 1;
    const status = store.status;
    el.statusChip.textContent = status;
    el.statusChip.className = `chip chip-${status}`;
    el.positionLabel.textContent = store.images.length
      ? `${store.position + 1} / ${store.images.length} — ${store.currentId ?? ''}`
      : 'no dataset loaded';
    el.polarity.value = store.polarity;
  }

  private showWarning(): void {
    this.el.warningBanner.textContent = this.store.lastWarning;
    this.el.warningBanner.classList.add('visible');
    setTimeout(() => this.el.warningBanner.classList.remove('visible'), 4000);
  }
}
