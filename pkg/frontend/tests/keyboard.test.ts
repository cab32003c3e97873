import { describe, expect, it } from 'vitest';

import { DigitBuffer, handleKey } from '../src/keyboard.js';

function manual(commits: number[]): { buf: DigitBuffer; fireTimer: () => void } {
  let pendingTimer: (() => void) | null = null;
  const buf = new DigitBuffer(
    (v) => commits.push(v),
    450,
    (fn) => {
      pendingTimer = fn;
      return 0 as unknown as ReturnType<typeof setTimeout>;
    },
    () => {
      pendingTimer = null;
    },
  );
  return {
    buf,
    fireTimer: () => {
      pendingTimer?.();
      pendingTimer = null;
    },
  };
}

describe('DigitBuffer', () => {
  it('commits 0 and 2..9 immediately', () => {
    const commits: number[] = [];
    const { buf } = manual(commits);
    buf.press(0);
    buf.press(2);
    buf.press(9);
    expect(commits).toEqual([0, 2, 9]);
  });

  it('holds a leading 1 until the timer fires', () => {
    const commits: number[] = [];
    const { buf, fireTimer } = manual(commits);
    buf.press(1);
    expect(commits).toEqual([]);
    expect(buf.pending).toBe(true);
    fireTimer();
    expect(commits).toEqual([1]);
    expect(buf.pending).toBe(false);
  });

  it('builds 10..16 from two digits', () => {
    const commits: number[] = [];
    const { buf } = manual(commits);
    buf.press(1);
    buf.press(6);
    expect(commits).toEqual([16]);
  });

  it('splits 1 then 7..9 into two selections', () => {
    const commits: number[] = [];
    const { buf } = manual(commits);
    buf.press(1);
    buf.press(8);
    expect(commits).toEqual([1, 8]);
  });

  it('enter flushes a pending 1', () => {
    const commits: number[] = [];
    const { buf } = manual(commits);
    buf.press(1);
    buf.flush();
    expect(commits).toEqual([1]);
  });

  it('escape abandons a pending 1', () => {
    const commits: number[] = [];
    const { buf } = manual(commits);
    buf.press(1);
    buf.abandon();
    buf.flush();
    expect(commits).toEqual([]);
  });
});

describe('handleKey', () => {
  function record() {
    const calls: string[] = [];
    const actions = {
      selectCandidate: () => calls.push('select'),
      save: () => calls.push('save'),
      next: () => calls.push('next'),
      prev: () => calls.push('prev'),
      reload: () => calls.push('reload'),
      skip: () => calls.push('skip'),
      toggleOverlay: () => calls.push('overlay'),
      beginAdd: () => calls.push('add'),
      beginDelete: () => calls.push('delete'),
    };
    return { calls, actions };
  }

  it('routes action keys', () => {
    const commits: number[] = [];
    const { buf } = manual(commits);
    const { calls, actions } = record();
    for (const key of ['s', 'ArrowRight', 'ArrowLeft', 'r', 'k', 'v', 'a', 'd']) {
      expect(handleKey(key, buf, actions)).toBe(true);
    }
    expect(calls).toEqual(['save', 'next', 'prev', 'reload', 'skip', 'overlay', 'add', 'delete']);
  });

  it('digits go to the buffer', () => {
    const commits: number[] = [];
    const { buf } = manual(commits);
    const { actions } = record();
    handleKey('7', buf, actions);
    expect(commits).toEqual([7]);
  });

  it('save flushes a pending two-digit entry first', () => {
    const commits: number[] = [];
    const { buf } = manual(commits);
    const { calls, actions } = record();
    handleKey('1', buf, actions);
    handleKey('s', buf, actions);
    expect(commits).toEqual([1]);
    expect(calls).toEqual(['save']);
  });

  it('ignores unknown keys', () => {
    const commits: number[] = [];
    const { buf } = manual(commits);
    const { actions } = record();
    expect(handleKey('q', buf, actions)).toBe(false);
  });
});
