// The TS payload decoder must agree with the engine bit for bit: fixtures
// were produced by the engine's encoder, including the hashed spiral
// positions.

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import {
  crystalPosition,
  decodePayload,
  payloadFromUrl,
  PayloadError,
  sha256,
} from "../src/payload.js";

const fixtures = JSON.parse(
  readFileSync(new URL("./fixtures/payloads.json", import.meta.url), "utf-8"),
);
const positions = JSON.parse(
  readFileSync(new URL("./fixtures/positions.json", import.meta.url), "utf-8"),
);

describe("sha256", () => {
  it("matches known vectors", () => {
    const hex = (bytes: Uint8Array) =>
      Array.from(bytes).map((b) => b.toString(16).padStart(2, "0")).join("");
    expect(hex(sha256(new Uint8Array(0)))).toBe(
      "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855",
    );
    expect(hex(sha256(new TextEncoder().encode("abc")))).toBe(
      "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad",
    );
  });
});

describe("engine fixtures decode exactly", () => {
  for (const fixture of fixtures) {
    it(fixture.name, () => {
      const got = decodePayload(fixture.payload);
      const want = fixture.expected;
      expect(got.sessionId).toBe(want.sessionId);
      expect(got.durationS).toBeCloseTo(want.durationS, 6);
      for (const [label, level] of Object.entries(want.integratedLevels)) {
        expect(got.integratedLevels[label]).toBeCloseTo(level as number, 6);
      }
      expect(got.episodes.length).toBe(want.episodes.length);
      got.episodes.forEach((ep, i) => {
        const ref = want.episodes[i];
        expect(ep.label).toBe(ref.label);
        expect(ep.onset).toBeCloseTo(ref.onset, 1);
        expect(ep.duration).toBeCloseTo(ref.duration, 1);
        expect(Math.abs(ep.intensity - ref.intensity)).toBeLessThanOrEqual(1 / 255);
        let delta = Math.abs(ep.rotation - ref.rotation);
        delta = Math.min(delta, 2 * Math.PI - delta);
        expect(delta).toBeLessThanOrEqual(Math.PI / 255 + 1e-9);
      });
      got.crystals.forEach((crystal, i) => {
        const ref = want.crystals[i];
        // size derives from quantized intensity/duration: small slack
        expect(Math.abs(crystal.size - ref.size)).toBeLessThan(0.05);
        crystal.position.forEach((coord, axis) => {
          expect(coord).toBeCloseTo(ref.position[axis], 9);
        });
      });
    });
  }
});

describe("crystal positions", () => {
  it("match the engine's hashed spiral", () => {
    for (const [key, want] of Object.entries(positions)) {
      const [sid, index] = key.split(":");
      const got = crystalPosition(sid, Number(index));
      (want as number[]).forEach((coord, axis) => {
        expect(got[axis]).toBeCloseTo(coord, 9);
      });
    }
  });
});

describe("error handling", () => {
  it("rejects wrong version", () => {
    // version byte 2, padded to header size
    const bytes = new Uint8Array(28);
    bytes[0] = 2;
    const b64 = Buffer.from(bytes).toString("base64url");
    expect(() => decodePayload(b64)).toThrow(PayloadError);
  });

  it("rejects truncated payloads", () => {
    expect(() => decodePayload("AAAA")).toThrow(PayloadError);
  });

  it("strips URL prefixes", () => {
    expect(payloadFromUrl("https://x/c#abc")).toBe("abc");
    expect(payloadFromUrl("abc")).toBe("abc");
  });
});
