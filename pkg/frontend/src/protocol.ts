// Wire protocol for the tankbarrier live service: JSON text frames over
// WebSocket. Inbound state frames are validated field-by-field before
// they may touch the view; outbound command frames are checked so a
// non-finite number can never leave the client.

export interface HelloFrame {
  type: 'hello';
  seq: number;
  t_sim: number;
  protocol: string;
  scenario: string;
  dt_s: number;
  broadcast_interval_s: number;
  robot: { type: string; link_lengths_m?: number[] };
  tank_floor_j: number;
  task_names: string[];
  d_min_m: number | null;
  activation_distance_m: number | null;
  n_joints: number;
  task_dim: number;
}

export interface StateFrame {
  type: 'state';
  seq: number;
  t_sim: number;
  q: number[];
  x: number[];
  x_obs: number[] | null;
  x_goal: number[] | null;
  f_e: number[];
  xdot_a: number[];
  xdot_opt: number[];
  tank_energy_j: number;
  tank_accumulated_j: number;
  tank_floor_j: number;
  task_names: string[];
  task_h: number[];
  task_slack: number[];
  obstacle_distance_m: number | null;
  paused: boolean;
  fault: string;
}

export type ForceCommand = { type: 'force'; fx: number; fy: number; fz?: number };
export type PoseCommand = { type: 'obstacle' | 'goal'; x: number; y: number; z?: number };
export type SimpleCommand = { type: 'pause' | 'resume' | 'reset' };
export type Command = ForceCommand | PoseCommand | SimpleCommand;

function finiteNumber(v: unknown): v is number {
  return typeof v === 'number' && Number.isFinite(v);
}

function finiteVector(v: unknown, length?: number): v is number[] {
  if (!Array.isArray(v) || !v.every(finiteNumber)) return false;
  return length === undefined || v.length === length;
}

function finiteVectorOrNull(v: unknown): v is number[] | null {
  return v === null || finiteVector(v);
}

/** Parse a state frame; null for anything malformed or wrongly typed. */
export function parseStateFrame(raw: unknown): StateFrame | null {
  if (typeof raw !== 'object' || raw === null) return null;
  const f = raw as Record<string, unknown>;
  if (f.type !== 'state') return null;
  if (!finiteNumber(f.seq) || !finiteNumber(f.t_sim)) return null;
  if (!finiteVector(f.q) || !finiteVector(f.x)) return null;
  const m = (f.x as number[]).length;
  if (!finiteVector(f.f_e, m) || !finiteVector(f.xdot_a, m) || !finiteVector(f.xdot_opt, m)) {
    return null;
  }
  if (!finiteVectorOrNull(f.x_obs) || !finiteVectorOrNull(f.x_goal)) return null;
  if (!finiteNumber(f.tank_energy_j) || !finiteNumber(f.tank_floor_j)) return null;
  if (!finiteNumber(f.tank_accumulated_j)) return null;
  if (!Array.isArray(f.task_names) || !f.task_names.every((n) => typeof n === 'string')) {
    return null;
  }
  const tasks = (f.task_names as string[]).length;
  if (!finiteVector(f.task_h, tasks) || !finiteVector(f.task_slack, tasks)) return null;
  if (f.obstacle_distance_m !== null && !finiteNumber(f.obstacle_distance_m)) return null;
  if (typeof f.paused !== 'boolean') return null;
  if (typeof f.fault !== 'string') return null;
  return f as unknown as StateFrame;
}

export function parseHelloFrame(raw: unknown): HelloFrame | null {
  if (typeof raw !== 'object' || raw === null) return null;
  const f = raw as Record<string, unknown>;
  if (f.type !== 'hello') return null;
  if (!finiteNumber(f.dt_s) || !finiteNumber(f.tank_floor_j)) return null;
  if (!finiteNumber(f.n_joints) || !finiteNumber(f.task_dim)) return null;
  return f as unknown as HelloFrame;
}

/** Force command from a vector; null if any component is non-finite. */
export function forceCommand(force: number[]): ForceCommand | null {
  if (!finiteVector(force) || force.length < 2) return null;
  const cmd: ForceCommand = { type: 'force', fx: force[0], fy: force[1] };
  if (force.length > 2) cmd.fz = force[2];
  return cmd;
}

/** Obstacle/goal pose command; null if any component is non-finite. */
export function poseCommand(kind: 'obstacle' | 'goal', position: number[]): PoseCommand | null {
  if (!finiteVector(position) || position.length < 2) return null;
  const cmd: PoseCommand = { type: kind, x: position[0], y: position[1] };
  if (position.length > 2) cmd.z = position[2];
  return cmd;
}
