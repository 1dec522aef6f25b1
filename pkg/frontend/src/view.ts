// View state: the latest fully parsed frame plus intake statistics.
// Frames older than the newest seen sequence number are dropped, as are
// frames that fail validation; rendering always uses the latest frame.

import { HelloFrame, StateFrame, parseHelloFrame, parseStateFrame } from './protocol.js';

export type ConnectionStatus = 'connecting' | 'connected' | 'disconnected';

export interface FrameStats {
  received: number;
  accepted: number;
  droppedStale: number;
  droppedInvalid: number;
  renders: number;
}

const SPARK_CAPACITY = 256;

export class ViewStore {
  hello: HelloFrame | null = null;
  frame: StateFrame | null = null;
  status: ConnectionStatus = 'connecting';
  stats: FrameStats = {
    received: 0,
    accepted: 0,
    droppedStale: 0,
    droppedInvalid: 0,
    renders: 0,
  };
  // rolling histories for the sparklines, keyed by task name
  histories = new Map<string, number[]>();
  tankHistory: number[] = [];

  ingest(raw: unknown): 'hello' | 'state' | 'dropped' {
    this.stats.received += 1;
    const hello = parseHelloFrame(raw);
    if (hello !== null) {
      this.hello = hello;
      return 'hello';
    }
    const frame = parseStateFrame(raw);
    if (frame === null) {
      this.stats.droppedInvalid += 1;
      return 'dropped';
    }
    if (this.frame !== null && frame.seq <= this.frame.seq) {
      this.stats.droppedStale += 1;
      return 'dropped';
    }
    this.frame = frame;
    this.stats.accepted += 1;
    this.recordHistory(frame);
    return 'state';
  }

  private recordHistory(frame: StateFrame): void {
    frame.task_names.forEach((name, i) => {
      let series = this.histories.get(name);
      if (series === undefined) {
        series = [];
        this.histories.set(name, series);
      }
      series.push(frame.task_h[i]);
      if (series.length > SPARK_CAPACITY) series.shift();
    });
    this.tankHistory.push(frame.tank_energy_j);
    if (this.tankHistory.length > SPARK_CAPACITY) this.tankHistory.shift();
  }

  markRender(): void {
    this.stats.renders += 1;
  }

  dropRatio(): number {
    const { received, droppedStale, droppedInvalid } = this.stats;
    return received === 0 ? 0 : (droppedStale + droppedInvalid) / received;
  }

  /** True when showing old data: disconnected but a frame is on screen. */
  isStale(): boolean {
    return this.status !== 'connected' && this.frame !== null;
  }
}
