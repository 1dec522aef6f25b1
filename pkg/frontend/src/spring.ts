// Drag-to-force entry: the pointer pulls the end-effector through a
// virtual spring with a hard force cap, the standard haptic stand-in
// for an operator's hand. Commands are throttled to the service rate;
// releasing always emits exactly one zero-force frame.

import { Command, forceCommand, poseCommand } from './protocol.js';

export interface SpringConfig {
  stiffnessNPerM: number; // k_drag
  capN: number;
  throttleMs: number; // minimum spacing between streamed commands
}

export const DEFAULT_SPRING: SpringConfig = {
  stiffnessNPerM: 50,
  capN: 30,
  throttleMs: 16,
};

/** Capped spring law: F = k (cursor - endEffector), ||F|| <= cap. */
export function springForce(
  cursorM: number[],
  endEffectorM: number[],
  config: SpringConfig = DEFAULT_SPRING,
): number[] {
  const raw = cursorM.map((c, i) => config.stiffnessNPerM * (c - endEffectorM[i]));
  const norm = Math.hypot(...raw);
  if (norm <= config.capN || norm === 0) return raw;
  const scale = config.capN / norm;
  return raw.map((v) => v * scale);
}

export type Sender = (command: Command) => void;
export type Mode = 'drag-force' | 'drag-obstacle' | 'drag-goal';

/**
 * One pointer drag: move events stream commands at the throttle rate,
 * release flushes the final pose (or the single zero-force frame).
 * Feed it world-space pointer positions; it never emits non-finite
 * numbers (such updates are ignored).
 */
export class DragSession {
  private lastSentMs = -Infinity;
  private released = false;

  constructor(
    private readonly mode: Mode,
    private readonly send: Sender,
    private readonly config: SpringConfig = DEFAULT_SPRING,
  ) {}

  move(cursorM: number[], endEffectorM: number[], nowMs: number): boolean {
    if (this.released) return false;
    if (nowMs - this.lastSentMs < this.config.throttleMs) return false;
    const command = this.commandFor(cursorM, endEffectorM);
    if (command === null) return false;
    this.send(command);
    this.lastSentMs = nowMs;
    return true;
  }

  release(cursorM: number[], endEffectorM: number[]): void {
    if (this.released) return;
    this.released = true;
    if (this.mode === 'drag-force') {
      // exactly one zero-force frame, never throttled away
      this.send({ type: 'force', fx: 0, fy: 0 });
      return;
    }
    const command = this.commandFor(cursorM, endEffectorM);
    if (command !== null) this.send(command);
  }

  private commandFor(cursorM: number[], endEffectorM: number[]): Command | null {
    if (this.mode === 'drag-force') {
      return forceCommand(springForce(cursorM, endEffectorM, this.config));
    }
    return poseCommand(this.mode === 'drag-obstacle' ? 'obstacle' : 'goal', cursorM);
  }
}
