// Every user control maps 1:1 to a documented wire message; the emitted
// bytes must equal the schema literally.

import { describe, expect, it } from "vitest";

import {
  endMessage,
  exploreMessage,
  feedbackMessage,
  framesMessage,
  parseEngineMessage,
  startMessage,
  teachEndMessage,
  teachStartMessage,
} from "../src/protocol.js";

describe("command messages are byte-exact", () => {
  it("start", () => {
    expect(startMessage()).toBe('{"cmd":"start"}');
  });

  it("teach_start carries the label", () => {
    expect(teachStartMessage("sadness")).toBe('{"cmd":"teach_start","label":"sadness"}');
  });

  it("teach_end", () => {
    expect(teachEndMessage()).toBe('{"cmd":"teach_end"}');
  });

  it("explore", () => {
    expect(exploreMessage()).toBe('{"cmd":"explore"}');
  });

  it("feedback carries agree/disagree", () => {
    expect(feedbackMessage(true)).toBe('{"cmd":"feedback","agree":true}');
    expect(feedbackMessage(false)).toBe('{"cmd":"feedback","agree":false}');
  });

  it("end", () => {
    expect(endMessage()).toBe('{"cmd":"end"}');
  });
});

describe("frame messages", () => {
  it("wrap recording-format frames", () => {
    const frame = {
      t: 0.1,
      persons: [{ id: 0, kp: [[0.5, 0.5, 1] as [number, number, number]] }],
    };
    expect(framesMessage([frame])).toBe(
      '{"frames":[{"t":0.1,"persons":[{"id":0,"kp":[[0.5,0.5,1]]}]}]}',
    );
  });
});

describe("engine message parsing", () => {
  it("accepts typed objects", () => {
    const message = parseEngineMessage('{"type":"ack","cmd":"start","phase":"preparation"}');
    expect(message.type).toBe("ack");
  });

  it("rejects non-objects", () => {
    expect(() => parseEngineMessage("42")).toThrow();
    expect(() => parseEngineMessage('"state"')).toThrow();
  });
});
