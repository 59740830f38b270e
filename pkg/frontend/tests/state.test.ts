import { describe, expect, it } from "vitest";

import type { StateMessage } from "../src/protocol.js";
import { SessionView, STALE_AFTER_MS, TRAIL_SECONDS } from "../src/state.js";

function stateMessage(hop: number, t: number, phase = "preparation"): StateMessage {
  return {
    type: "state",
    hop,
    t,
    phase: phase as StateMessage["phase"],
    persons: [{
      id: 0,
      kp: [],
      features: {},
      emotion: { dist: { happiness: 1 }, top: "happiness", v: 0.5, a: 0.5, intensity: 0.5, confidence: 1 },
    }],
    group: null,
    group_features: null,
    audio: { tempo: 100, mode: "major", complexity: 0, dynamics: 0 },
  };
}

describe("session view", () => {
  it("tracks the latest state and trail", () => {
    const view = new SessionView();
    view.applyState(stateMessage(0, 0.1), 1000);
    view.applyState(stateMessage(1, 0.2), 1100);
    expect(view.latest?.hop).toBe(1);
    expect(view.trail).toHaveLength(2);
  });

  it("rejects backwards hops", () => {
    const view = new SessionView();
    view.applyState(stateMessage(5, 0.5), 0);
    expect(() => view.applyState(stateMessage(4, 0.6), 1)).toThrow(/backwards/);
  });

  it("prunes the trail to the configured horizon", () => {
    const view = new SessionView();
    for (let i = 0; i < 400; i++) {
      view.applyState(stateMessage(i, i * 0.1), i);
    }
    const span = view.trail[view.trail.length - 1].t - view.trail[0].t;
    expect(span).toBeLessThanOrEqual(TRAIL_SECONDS + 1e-9);
    expect(view.trail.length).toBeGreaterThan(250);
  });

  it("reports staleness after the freshness window", () => {
    const view = new SessionView();
    expect(view.isStale(0)).toBe(true);
    view.applyState(stateMessage(0, 0.1), 1000);
    expect(view.isStale(1000 + STALE_AFTER_MS - 1)).toBe(false);
    expect(view.isStale(1000 + STALE_AFTER_MS + 1)).toBe(true);
  });

  it("gates feedback on the exploration phase", () => {
    const view = new SessionView();
    view.connection = "open";
    view.applyState(stateMessage(0, 0.1, "teaching"), 0);
    expect(view.canFeedback).toBe(false);
    view.applyState(stateMessage(1, 0.2, "exploration"), 1);
    expect(view.canFeedback).toBe(true);
    view.connection = "closed";
    expect(view.canFeedback).toBe(false);
  });

  it("keeps cosmos separate from the live stream", () => {
    const view = new SessionView();
    view.applyCosmos({ type: "cosmos", url: "https://x/c#abc", summary: {} });
    expect(view.cosmos?.url).toContain("#abc");
    expect(view.latest).toBeNull();
  });
});
