import { describe, expect, it } from 'vitest';

import { Command } from '../src/protocol.js';
import { DEFAULT_SPRING, DragSession, springForce } from '../src/spring.js';

class MockService {
  sent: Command[] = [];
  sender = (command: Command): void => {
    this.sent.push(command);
  };
}

describe('springForce', () => {
  it('is zero at zero offset', () => {
    expect(springForce([0.5, 0.5], [0.5, 0.5])).toEqual([0, 0]);
  });

  it('follows the spring law under the cap', () => {
    // 0.2 m offset at 50 N/m -> 10 N, below the 30 N cap
    const force = springForce([0.7, 0.5], [0.5, 0.5]);
    expect(force[0]).toBeCloseTo(10, 12);
    expect(force[1]).toBeCloseTo(0, 12);
  });

  it('caps the magnitude and keeps the direction', () => {
    const force = springForce([0.5, 1.5], [0.5, 0.5]); // raw 50 N up
    expect(Math.hypot(...force)).toBeCloseTo(30, 12);
    expect(force[0]).toBeCloseTo(0, 12);
    expect(force[1]).toBeCloseTo(30, 12);
  });

  it('caps exactly at the boundary', () => {
    const atCap = springForce([0.6 + 1e-12, 0], [0, 0]); // raw 30+ N
    expect(Math.hypot(...atCap)).toBeLessThanOrEqual(30 + 1e-9);
  });
});

describe('DragSession', () => {
  it('produces the golden command sequence for a scripted drag', () => {
    const service = new MockService();
    const session = new DragSession('drag-force', service.sender, DEFAULT_SPRING);
    const ee = [0.5, 0.5];

    expect(session.move([0.5, 0.5], ee, 0)).toBe(true); // first frame passes
    expect(session.move([0.6, 0.5], ee, 5)).toBe(false); // throttled (<16 ms)
    expect(session.move([0.75, 0.5], ee, 20)).toBe(true); // 12.5 N
    expect(session.move([0.5, 1.5], ee, 30)).toBe(false); // throttled
    expect(session.move([0.5, 1.5], ee, 40)).toBe(true); // capped 30 N
    session.release([1.0, 1.0], ee);

    expect(service.sent).toEqual([
      { type: 'force', fx: 0, fy: 0 },
      { type: 'force', fx: 12.5, fy: 0 },
      { type: 'force', fx: 0, fy: 30 },
      { type: 'force', fx: 0, fy: 0 },
    ]);
  });

  it('release emits exactly one zero-force frame', () => {
    const service = new MockService();
    const session = new DragSession('drag-force', service.sender, DEFAULT_SPRING);
    session.move([0.7, 0.5], [0.5, 0.5], 0);
    session.release([0.7, 0.5], [0.5, 0.5]);
    session.release([0.9, 0.5], [0.5, 0.5]); // double release is inert
    expect(session.move([0.9, 0.5], [0.5, 0.5], 100)).toBe(false);
    const zeroFrames = service.sent.filter(
      (c) => c.type === 'force' && c.fx === 0 && c.fy === 0,
    );
    expect(zeroFrames).toHaveLength(1);
    expect(service.sent[service.sent.length - 1]).toEqual({
      type: 'force',
      fx: 0,
      fy: 0,
    });
  });

  it('never emits non-finite numbers', () => {
    const service = new MockService();
    const session = new DragSession('drag-force', service.sender, DEFAULT_SPRING);
    expect(session.move([Number.NaN, 0], [0, 0], 0)).toBe(false);
    expect(session.move([Infinity, 0], [0, 0], 20)).toBe(false);
    session.release([0.2, 0], [0, 0]);
    for (const command of service.sent) {
      for (const value of Object.values(command)) {
        if (typeof value === 'number') expect(Number.isFinite(value)).toBe(true);
      }
    }
  });

  it('obstacle drags emit pose frames and flush on release', () => {
    const service = new MockService();
    const session = new DragSession('drag-obstacle', service.sender, DEFAULT_SPRING);
    session.move([0.8, 0.2], [0, 0], 0);
    session.move([0.9, 0.25], [0, 0], 20);
    session.release([1.0, 0.3], [0, 0]);
    expect(service.sent).toEqual([
      { type: 'obstacle', x: 0.8, y: 0.2 },
      { type: 'obstacle', x: 0.9, y: 0.25 },
      { type: 'obstacle', x: 1.0, y: 0.3 },
    ]);
  });

  it('goal drags emit goal frames', () => {
    const service = new MockService();
    const session = new DragSession('drag-goal', service.sender, DEFAULT_SPRING);
    session.move([0.1, 0.6], [0, 0], 0);
    session.release([0.1, 0.6], [0, 0]);
    expect(service.sent[0]).toEqual({ type: 'goal', x: 0.1, y: 0.6 });
  });

  it('throttle admits at least the service rate', () => {
    const service = new MockService();
    const session = new DragSession('drag-force', service.sender, DEFAULT_SPRING);
    // 60 Hz pointer events for one second -> one command per 16 ms window
    let sentCount = 0;
    for (let k = 0; k < 60; k++) {
      if (session.move([0.7, 0.5], [0.5, 0.5], k * (1000 / 60))) sentCount++;
    }
    expect(sentCount).toBeGreaterThanOrEqual(30);
    expect(sentCount).toBeLessThanOrEqual(62);
  });
});
