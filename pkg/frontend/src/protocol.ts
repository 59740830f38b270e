// Wire protocol for the engine WebSocket. Every user control maps 1:1 onto
// one of these builders; the emitted JSON is byte-exact against the engine's
// documented schema (key order matters for the conformance tests).

export type Phase = "idle" | "preparation" | "teaching" | "exploration" | "cosmos";

export interface EmotionReadout {
  dist: Record<string, number>;
  top: string;
  v: number;
  a: number;
  intensity: number;
  confidence: number;
}

export interface PersonState {
  id: number;
  kp: [number, number, number][];
  features: Record<string, number>;
  emotion: EmotionReadout;
}

export interface StateMessage {
  type: "state";
  hop: number;
  t: number;
  phase: Phase;
  persons: PersonState[];
  group: EmotionReadout | null;
  group_features: { count: number; proximity: number; synchrony: number } | null;
  audio: { tempo: number; mode: string; complexity: number; dynamics: number };
}

export interface CosmosMessage {
  type: "cosmos";
  url: string;
  summary: Record<string, unknown>;
}

export interface AckMessage {
  type: "ack";
  cmd: string;
  phase: Phase;
}

export interface ErrorMessage {
  type: "error";
  error: string;
  detail: string;
}

export type EngineMessage = StateMessage | CosmosMessage | AckMessage | ErrorMessage;

export interface FrameRecord {
  t: number;
  persons: { id: number; kp: [number, number, number][] }[];
}

// ---- client -> engine builders (byte-exact) ----

export const startMessage = (): string => JSON.stringify({ cmd: "start" });

export const teachStartMessage = (label: string): string =>
  JSON.stringify({ cmd: "teach_start", label });

export const teachEndMessage = (): string => JSON.stringify({ cmd: "teach_end" });

export const exploreMessage = (): string => JSON.stringify({ cmd: "explore" });

export const feedbackMessage = (agree: boolean): string =>
  JSON.stringify({ cmd: "feedback", agree });

export const endMessage = (): string => JSON.stringify({ cmd: "end" });

export const framesMessage = (frames: FrameRecord[]): string =>
  JSON.stringify({ frames });

export function parseEngineMessage(raw: string): EngineMessage {
  const message = JSON.parse(raw);
  if (typeof message !== "object" || message === null || !("type" in message)) {
    throw new Error("engine message must be an object with a type");
  }
  return message as EngineMessage;
}
