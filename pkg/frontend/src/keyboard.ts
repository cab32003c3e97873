// Keyboard-first candidate selection: single digits pick 0-9 directly,
// a leading "1" waits briefly for a second digit so 10-16 stay reachable.

export type CommitFn = (value: number) => void;

export class DigitBuffer {
  private buffer = '';
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private commit: CommitFn,
    private delayMs = 450,
    private schedule: (fn: () => void, ms: number) => ReturnType<typeof setTimeout> = setTimeout,
    private cancel: (t: ReturnType<typeof setTimeout>) => void = clearTimeout,
  ) {}

  press(digit: number): void {
    if (digit < 0 || digit > 9) return;
    if (this.buffer === '') {
      if (digit === 1) {
        // could become 10..16; wait for a second digit
        this.buffer = '1';
        this.timer = this.schedule(() => this.flush(), this.delayMs);
      } else {
        this.commit(digit);
      }
      return;
    }
    // buffer holds "1"
    this.clearTimer();
    if (digit <= 6) {
      this.buffer = '';
      this.commit(10 + digit);
    } else {
      this.buffer = '';
      this.commit(1);
      this.commit(digit);
    }
  }

  /** Commit a pending single "1" immediately (Enter, or the timer). */
  flush(): void {
    this.clearTimer();
    if (this.buffer === '1') {
      this.buffer = '';
      this.commit(1);
    }
  }

  abandon(): void {
    this.clearTimer();
    this.buffer = '';
  }

  get pending(): boolean {
    return this.buffer !== '';
  }

  private clearTimer(): void {
    if (this.timer !== null) {
      this.cancel(this.timer);
      this.timer = null;
    }
  }
}

export interface KeyActions {
  selectCandidate: (k: number) => void;
  save: () => void;
  next: () => void;
  prev: () => void;
  reload: () => void;
  skip: () => void;
  toggleOverlay: () => void;
  beginAdd: () => void;
  beginDelete: () => void;
}

/** Maps a key name to its action; returns true when handled. */
export function handleKey(key: string, digits: DigitBuffer, actions: KeyActions): boolean {
  if (key >= '0' && key <= '9') {
    digits.press(key.charCodeAt(0) - 48);
    return true;
  }
  switch (key) {
    case 'Enter':
      digits.flush();
      return true;
    case 'Escape':
      digits.abandon();
      return true;
    case 's':
    case 'S':
      digits.flush();
      actions.save();
      return true;
    case 'ArrowRight':
    case 'n':
      digits.flush();
      actions.next();
      return true;
    case 'ArrowLeft':
    case 'p':
      digits.flush();
      actions.prev();
      return true;
    case 'r':
    case 'R':
      actions.reload();
      return true;
    case 'k':
    case 'K':
      actions.skip();
      return true;
    case 'v':
    case 'V':
      actions.toggleOverlay();
      return true;
    case 'a':
    case 'A':
      actions.beginAdd();
      return true;
    case 'd':
    case 'D':
      actions.beginDelete();
      return true;
    default:
      return false;
  }
}
