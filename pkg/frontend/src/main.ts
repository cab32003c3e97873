import { ApiClient } from './api.js';
import { PolygonEditor } from './editor.js';
import { Gallery } from './gallery.js';
import { DigitBuffer, handleKey } from './keyboard.js';
import { NavigationBar, NavElements } from './nav.js';
import { SessionStore } from './session.js';

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

function boot(): void {
  const api = new ApiClient('');
  const store = new SessionStore(api);
  store.confirmDiscard = () =>
    window.confirm('Unsaved changes on this image. Discard and navigate?');

  const imageEl = byId<HTMLImageElement>('word-image');
  const canvas = byId<HTMLCanvasElement>('edit-canvas');
  const overlayEl = byId<HTMLImageElement>('overlay-image');
  const editor = new PolygonEditor(canvas, imageEl, store);
  new Gallery(byId('gallery'), store);

  const nav: NavElements = {
    load: byId('btn-load'),
    prev: byId('btn-prev'),
    next: byId('btn-next'),
    save: byId('btn-save'),
    reload: byId('btn-reload'),
    viewMask: byId('btn-view-mask'),
    skip: byId('btn-skip'),
    addPatch: byId('btn-add-patch'),
    deletePatch: byId('btn-delete-patch'),
    polarity: byId('polarity-select'),
    statusChip: byId('status-chip'),
    positionLabel: byId('position-label'),
    warningBanner: byId('warning-banner'),
  };
  const navBar = new NavigationBar(
    nav,
    store,
    (visible) => {
      overlayEl.classList.toggle('visible', visible);
      refreshOverlay();
    },
    (mode) => editor.begin(mode),
  );

  function refreshImage(): void {
    const id = store.currentId;
    if (id === null) return;
    imageEl.onload = () => editor.redraw();
    imageEl.src = api.imageUrl(id);
  }

  function refreshOverlay(): void {
    const url = store.overlayUrl();
    if (navBar.overlayVisible && url && store.canSave) {
      overlayEl.src = url;
    } else {
      overlayEl.removeAttribute('src');
    }
  }

  store.on('position', refreshImage);
  store.on('overlay', refreshOverlay);
  store.on('record', refreshOverlay);

  const digits = new DigitBuffer((k) => void store.select(k));
  document.addEventListener('keydown', (ev) => {
    if (ev.target instanceof HTMLInputElement || ev.target instanceof HTMLSelectElement) return;
    const handled = handleKey(
      ev.key,
      digits,
      {
        selectCandidate: (k) => void store.select(k),
        save: () => void store.save(),
        next: () => void store.next(),
        prev: () => void store.prev(),
        reload: () => void store.reload(),
        skip: () => void store.skip(),
        toggleOverlay: () => navBar.toggleOverlay(),
        beginAdd: () => editor.begin('add'),
        beginDelete: () => editor.begin('delete'),
      },
    );
    if (handled) ev.preventDefault();
  });

  void store.load();
}

document.addEventListener('DOMContentLoaded', boot);
