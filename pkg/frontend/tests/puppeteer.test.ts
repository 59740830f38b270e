import { describe, expect, it } from "vitest";

import { FPS, Puppeteer, PUPPET_PRESETS } from "../src/puppeteer.js";

describe("puppeteer streams", () => {
  it("emits the engine frame schema", () => {
    const puppet = new Puppeteer(PUPPET_PRESETS.happiness, 7);
    const frame = puppet.nextFrame();
    expect(frame.persons).toHaveLength(1);
    expect(frame.persons[0].id).toBe(0);
    expect(frame.persons[0].kp).toHaveLength(17);
    for (const [x, y, conf] of frame.persons[0].kp) {
      expect(x).toBeGreaterThanOrEqual(0);
      expect(x).toBeLessThanOrEqual(1);
      expect(y).toBeGreaterThanOrEqual(0);
      expect(y).toBeLessThanOrEqual(1);
      expect(conf).toBeGreaterThan(0);
      expect(conf).toBeLessThanOrEqual(1);
    }
  });

  it("timestamps are strictly monotone at 30 fps", () => {
    const puppet = new Puppeteer(PUPPET_PRESETS.sadness, 1);
    const frames = puppet.nextBatch(90);
    for (let i = 1; i < frames.length; i++) {
      expect(frames[i].t).toBeGreaterThan(frames[i - 1].t);
    }
    expect(frames[30].t).toBeCloseTo(1.0, 3);
  });

  it("same seed and params replay identically", () => {
    const a = new Puppeteer(PUPPET_PRESETS.anger, 99).nextBatch(60);
    const b = new Puppeteer(PUPPET_PRESETS.anger, 99).nextBatch(60);
    expect(JSON.stringify(a)).toBe(JSON.stringify(b));
  });

  it("frequency slider changes the oscillation rate", () => {
    const puppet = new Puppeteer({ ...PUPPET_PRESETS.relaxation, noise: 0 }, 5);
    const slow = puppet.nextBatch(5 * FPS);
    puppet.setParams({ frequency: 3.0 });
    const fast = puppet.nextBatch(5 * FPS);

    const crossings = (frames: typeof slow) => {
      const ys = frames.map((f) => f.persons[0].kp[0][1]);
      const mean = ys.reduce((s, y) => s + y, 0) / ys.length;
      let count = 0;
      for (let i = 1; i < ys.length; i++) {
        if (ys[i - 1] < mean !== ys[i] < mean) count++;
      }
      return count;
    };
    expect(crossings(fast)).toBeGreaterThan(crossings(slow) * 3);
  });

  it("drift sinks the body over time", () => {
    const puppet = new Puppeteer({ ...PUPPET_PRESETS.sadness, noise: 0, amplitude: 0 }, 2);
    const first = puppet.nextFrame();
    puppet.nextBatch(10 * FPS);
    const later = puppet.nextFrame();
    expect(later.persons[0].kp[0][1]).toBeGreaterThan(first.persons[0].kp[0][1] + 0.02);
  });

  it("parameter changes keep the stream continuous", () => {
    const puppet = new Puppeteer({ ...PUPPET_PRESETS.happiness, noise: 0, jerk: 0 }, 3);
    puppet.nextBatch(30);
    const before = puppet.nextFrame();
    puppet.setParams({ frequency: 4.5 });
    const after = puppet.nextFrame();
    // no teleport: one frame's motion stays under a plausible bound
    const dy = Math.abs(after.persons[0].kp[0][1] - before.persons[0].kp[0][1]);
    expect(dy).toBeLessThan(0.08);
  });
});
