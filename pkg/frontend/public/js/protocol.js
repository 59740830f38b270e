// Wire protocol for the engine WebSocket. Every user control maps 1:1 onto
// one of these builders; the emitted JSON is byte-exact against the engine's
// documented schema (key order matters for the conformance tests).
// ---- client -> engine builders (byte-exact) ----
export const startMessage = () => JSON.stringify({ cmd: "start" });
export const teachStartMessage = (label) => JSON.stringify({ cmd: "teach_start", label });
export const teachEndMessage = () => JSON.stringify({ cmd: "teach_end" });
export const exploreMessage = () => JSON.stringify({ cmd: "explore" });
export const feedbackMessage = (agree) => JSON.stringify({ cmd: "feedback", agree });
export const endMessage = () => JSON.stringify({ cmd: "end" });
export const framesMessage = (frames) => JSON.stringify({ frames });
export function parseEngineMessage(raw) {
    const message = JSON.parse(raw);
    if (typeof message !== "object" || message === null || !("type" in message)) {
        throw new Error("engine message must be an object with a type");
    }
    return message;
}
