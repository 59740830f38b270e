// Client-side session view. Renders only what the engine streamed: no local
// inference, no fabricated values. Hop indices are asserted monotone.
export const TRAIL_SECONDS = 30;
export const STALE_AFTER_MS = 2000;
export class SessionView {
    constructor() {
        this.connection = "connecting";
        this.latest = null;
        this.cosmos = null;
        this.lastStateAtMs = null;
        this.trail = [];
        this.lastError = null;
    }
    get phase() {
        return this.latest?.phase ?? "idle";
    }
    applyState(message, nowMs) {
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
    applyCosmos(message) {
        this.cosmos = message;
    }
    isStale(nowMs) {
        if (this.lastStateAtMs === null)
            return true;
        return nowMs - this.lastStateAtMs > STALE_AFTER_MS;
    }
    /** feedback controls mirror the engine's WrongPhase rule */
    get canFeedback() {
        return this.connection === "open" && this.phase === "exploration";
    }
    get canTeach() {
        return (this.connection === "open" &&
            (this.phase === "preparation" || this.phase === "teaching"));
    }
    reset() {
        this.latest = null;
        this.cosmos = null;
        this.trail = [];
        this.lastStateAtMs = null;
        this.lastError = null;
    }
}
