import { describe, expect, it } from 'vitest';

import {
  forceCommand,
  parseHelloFrame,
  parseStateFrame,
  poseCommand,
} from '../src/protocol.js';

function stateDoc(overrides: Record<string, unknown> = {}): Record<string, unknown> {
  return {
    type: 'state',
    seq: 12,
    t_sim: 0.024,
    q: [0.1, 0.2, 0.3],
    x: [0.5, 0.6],
    x_obs: [1.0, 0.6],
    x_goal: [0.2, 0.7],
    f_e: [0.0, 0.0],
    xdot_a: [0.0, 0.0],
    xdot_opt: [0.0, 0.0],
    tank_energy_j: 1.0,
    tank_accumulated_j: 0.0,
    tank_floor_j: 0.1,
    task_names: ['position_goal', 'obstacle'],
    task_h: [-0.1, 3.2],
    task_slack: [0.0, 0.0],
    obstacle_distance_m: 0.5,
    paused: false,
    fault: '',
    ...overrides,
  };
}

describe('parseStateFrame', () => {
  it('accepts a well-formed frame', () => {
    const frame = parseStateFrame(stateDoc());
    expect(frame).not.toBeNull();
    expect(frame!.seq).toBe(12);
  });

  it('accepts null obstacle and goal', () => {
    const frame = parseStateFrame(stateDoc({ x_obs: null, x_goal: null }));
    expect(frame).not.toBeNull();
  });

  it.each([
    ['wrong type', { type: 'telemetry' }],
    ['missing seq', { seq: undefined }],
    ['NaN in joints', { q: [0.1, Number.NaN, 0.3] }],
    ['force length mismatch', { f_e: [1.0] }],
    ['task arrays mismatched', { task_h: [0.0] }],
    ['non-string fault', { fault: 7 }],
    ['non-boolean paused', { paused: 'no' }],
    ['infinite tank', { tank_energy_j: Infinity }],
  ])('rejects %s', (_label, override) => {
    expect(parseStateFrame(stateDoc(override as Record<string, unknown>))).toBeNull();
  });

  it('rejects non-objects', () => {
    expect(parseStateFrame('state')).toBeNull();
    expect(parseStateFrame(null)).toBeNull();
    expect(parseStateFrame(17)).toBeNull();
  });
});

describe('parseHelloFrame', () => {
  it('accepts the service hello', () => {
    const hello = parseHelloFrame({
      type: 'hello',
      seq: 0,
      t_sim: 0,
      protocol: 'tankbarrier-v1',
      scenario: 'x',
      dt_s: 0.002,
      broadcast_interval_s: 0.016,
      robot: { type: 'planar', link_lengths_m: [0.4, 0.35, 0.25] },
      tank_floor_j: 0.1,
      task_names: [],
      d_min_m: 0.25,
      activation_distance_m: 0.5,
      n_joints: 3,
      task_dim: 2,
    });
    expect(hello).not.toBeNull();
    expect(hello!.n_joints).toBe(3);
  });

  it('rejects frames of other types', () => {
    expect(parseHelloFrame(stateDoc())).toBeNull();
  });
});

describe('command builders', () => {
  it('builds finite force commands', () => {
    expect(forceCommand([1.5, -0.5])).toEqual({ type: 'force', fx: 1.5, fy: -0.5 });
    expect(forceCommand([1, 2, 3])).toEqual({ type: 'force', fx: 1, fy: 2, fz: 3 });
  });

  it('refuses non-finite forces', () => {
    expect(forceCommand([Number.NaN, 0])).toBeNull();
    expect(forceCommand([1, Infinity])).toBeNull();
    expect(forceCommand([1])).toBeNull();
  });

  it('builds pose commands', () => {
    expect(poseCommand('obstacle', [0.8, 0.3])).toEqual({
      type: 'obstacle',
      x: 0.8,
      y: 0.3,
    });
    expect(poseCommand('goal', [0.1, 0.2, 0.3])).toEqual({
      type: 'goal',
      x: 0.1,
      y: 0.2,
      z: 0.3,
    });
    expect(poseCommand('goal', [Number.NaN, 0])).toBeNull();
  });
});
