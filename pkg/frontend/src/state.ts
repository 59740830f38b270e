// Client-side session view. Renders only what the engine streamed: no local
// inference, no fabricated values. Hop indices are asserted monotone.

import type { CosmosMessage, Phase, StateMessage } from "./protocol.js";

export const TRAIL_SECONDS = 30;
export const STALE_AFTER_MS = 2000;

export interface TrailPoint {
  t: number;
  v: number;
  a: number;
}

export type Connection = "connecting" | "open" | "closed";

export class SessionView {
  connection: Connection = "connecting";
  latest: StateMessage | null = null;
  cosmos: CosmosMessage | null = null;
  lastStateAtMs: number | null = null;
  trail: TrailPoint[] = [];
  lastError: string | null = null;

  get phase(): Phase {
    return this.latest?.phase ?? "idle";
  }

  applyState(message: StateMessage, nowMs: number): void {
    if (this.latest && message.hop < this.latest.hop) {
      throw new Error(`hop went backwards: ${message.hop} < ${this.latest.hop}`);
    }
    this.latest = message;
    this.lastStateAtMs = nowMs;
    const source = message.persons[0]?.emotion ?? message.group;
    if (source) {
      this.trail.push({ t: message.t, v: source.v, a: source.a });
      const horizon = message.t - TRAIL_SECONDS;
      while (this.trail.length && this.trail[0].t < horizon) {
        this.trail.shift();
      }
    }
  }

  applyCosmos(message: CosmosMessage): void {
    this.cosmos = message;
  }

  isStale(nowMs: number): boolean {
    if (this.lastStateAtMs === null) return true;
    return nowMs - this.lastStateAtMs > STALE_AFTER_MS;
  }

  /** feedback controls mirror the engine's WrongPhase rule */
  get canFeedback(): boolean {
    return this.connection === "open" && this.phase === "exploration";
  }

  get canTeach(): boolean {
    return (
      this.connection === "open" &&
      (this.phase === "preparation" || this.phase === "teaching")
    );
  }

  reset(): void {
    this.latest = null;
    this.cosmos = null;
    this.trail = [];
    this.lastStateAtMs = null;
    this.lastError = null;
  }
}
