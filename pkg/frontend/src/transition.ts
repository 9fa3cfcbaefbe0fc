/** Animated per-point interpolation between two coordinate sets.
 *
 * The scheduler is injectable so tests can drive frames with a fake clock;
 * the browser default uses requestAnimationFrame.
 */

export interface FrameScheduler {
  now(): number;
  request(callback: () => void): number;
  cancel(handle: number): void;
}

export const rafScheduler: FrameScheduler = {
  now: () => performance.now(),
  request: (callback) => requestAnimationFrame(() => callback()),
  cancel: (handle) => cancelAnimationFrame(handle),
};

export const TRANSITION_MS = 700;

export function easeInOutCubic(t: number): number {
  return t < 0.5 ? 4 * t * t * t : 1 - Math.pow(-2 * t + 2, 3) / 2;
}

/** Starts the animation and returns a cancel function. onFrame receives a
 * buffer that is reused between frames; the final frame is exactly `to` and is
 * followed by onDone. Zero-duration transitions complete on the first frame. */
export function transitionCoords(
  from: Float32Array,
  to: Float32Array,
  onFrame: (coords: Float32Array) => void,
  onDone: () => void,
  duration: number = TRANSITION_MS,
  scheduler: FrameScheduler = rafScheduler,
): () => void {
  if (from.length !== to.length) {
    throw new Error(`coordinate lengths differ: ${from.length} vs ${to.length}`);
  }
  const start = scheduler.now();
  const buffer = new Float32Array(from.length);
  let handle = 0;
  let cancelled = false;

  const tick = (): void => {
    if (cancelled) return;
    const elapsed = scheduler.now() - start;
    const t = duration <= 0 ? 1 : Math.min(1, elapsed / duration);
    if (t >= 1) {
      onFrame(to);
      onDone();
      return;
    }
    const e = easeInOutCubic(t);
    for (let i = 0; i < from.length; i++) {
      buffer[i] = (from[i] as number) + ((to[i] as number) - (from[i] as number)) * e;
    }
    onFrame(buffer);
    handle = scheduler.request(tick);
  };

  handle = scheduler.request(tick);
  return () => {
    cancelled = true;
    scheduler.cancel(handle);
  };
}
