// Drag events arrive per pointer move; the service should not. The limiter
// delivers at most maxPerSecond values, always ending on the newest one.

export interface Limiter<T> {
  push(value: T): void;
  /** Deliver any held value immediately (pointer-up). */
  flush(): void;
  cancel(): void;
}

export interface LimiterClock {
  now(): number;
  schedule(fn: () => void, delayMs: number): unknown;
  unschedule(handle: unknown): void;
}

const wallClock: LimiterClock = {
  now: () => Date.now(),
  schedule: (fn, delay) => setTimeout(fn, delay),
  unschedule: (handle) => clearTimeout(handle as Parameters<typeof clearTimeout>[0]),
};

export function coalescingLimiter<T>(
  deliver: (value: T) => void,
  maxPerSecond = 30,
  clock: LimiterClock = wallClock,
): Limiter<T> {
  const interval = 1000 / maxPerSecond;
  let lastSent = -Infinity;
  let held: { value: T } | null = null;
  let timer: unknown = null;

  const send = (value: T) => {
    lastSent = clock.now();
    deliver(value);
  };

  const onTimer = () => {
    timer = null;
    if (held) {
      const { value } = held;
      held = null;
      send(value);
    }
  };

  return {
    push(value: T) {
      const wait = lastSent + interval - clock.now();
      if (wait <= 0 && timer === null) {
        send(value);
        return;
      }
      held = { value };
      if (timer === null) timer = clock.schedule(onTimer, Math.max(wait, 0));
    },
    flush() {
      if (timer !== null) {
        clock.unschedule(timer);
        timer = null;
      }
      if (held) {
        const { value } = held;
        held = null;
        send(value);
      }
    },
    cancel() {
      if (timer !== null) {
        clock.unschedule(timer);
        timer = null;
      }
      held = null;
    },
  };
}
