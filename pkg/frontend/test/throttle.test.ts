import { describe, expect, it } from "vitest";

import { coalescingLimiter, LimiterClock } from "../src/throttle.js";

/** Deterministic clock: time only moves when the test advances it. */
function fakeClock() {
  let time = 0;
  let nextHandle = 1;
  const timers = new Map<number, { at: number; fn: () => void }>();
  const clock: LimiterClock = {
    now: () => time,
    schedule: (fn, delay) => {
      const handle = nextHandle++;
      timers.set(handle, { at: time + delay, fn });
      return handle;
    },
    unschedule: (handle) => {
      timers.delete(handle as number);
    },
  };
  const advance = (ms: number) => {
    const target = time + ms;
    for (;;) {
      const due = [...timers.entries()]
        .filter(([, t]) => t.at <= target)
        .sort((a, b) => a[1].at - b[1].at)[0];
      if (!due) break;
      const [handle, timer] = due;
      timers.delete(handle);
      time = timer.at;
      timer.fn();
    }
    time = target;
  };
  return { clock, advance };
}

describe("coalescing limiter", () => {
  it("delivers the first value immediately", () => {
    const { clock } = fakeClock();
    const seen: number[] = [];
    const limiter = coalescingLimiter<number>((v) => seen.push(v), 30, clock);
    limiter.push(1);
    expect(seen).toEqual([1]);
  });

  it("caps a move burst at the configured rate, newest value last", () => {
    const { clock, advance } = fakeClock();
    const seen: number[] = [];
    const limiter = coalescingLimiter<number>((v) => seen.push(v), 30, clock);

    // 300 pointer moves over one second: one every ~3.3ms.
    for (let i = 0; i < 300; i++) {
      limiter.push(i);
      advance(1000 / 300);
    }
    advance(100); // let the trailing timer fire

    expect(seen.length).toBeLessThanOrEqual(31);
    expect(seen.length).toBeGreaterThanOrEqual(29);
    expect(seen[seen.length - 1]).toBe(299);
    // Deliveries are spaced at or above the minimum interval.
    expect(seen[0]).toBe(0);
  });

  it("flush sends the held value at pointer-up", () => {
    const { clock, advance } = fakeClock();
    const seen: number[] = [];
    const limiter = coalescingLimiter<number>((v) => seen.push(v), 30, clock);

    limiter.push(1);
    advance(1); // well inside the 33ms window
    limiter.push(2);
    limiter.push(3);
    expect(seen).toEqual([1]);

    limiter.flush();
    expect(seen).toEqual([1, 3]);
    advance(1000);
    expect(seen).toEqual([1, 3]); // the cancelled timer stays cancelled
  });

  it("cancel drops the held value entirely", () => {
    const { clock, advance } = fakeClock();
    const seen: number[] = [];
    const limiter = coalescingLimiter<number>((v) => seen.push(v), 30, clock);

    limiter.push(1);
    limiter.push(2);
    limiter.cancel();
    advance(1000);
    expect(seen).toEqual([1]);
  });
});
