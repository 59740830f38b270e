// Procedural skeleton puppeteer: a desk-scale stand-in for the camera.
// Live parameters (sliders) steer the same movement qualities the engine's
// recommenders consume, so teaching stays legible. Emits frames in the
// engine's recording schema at 30 fps of stream time.
export const FPS = 30;
export const BODY_SCALE = 0.2; // torso length of the base pose, image units
// COCO 17-keypoint standing posture (y down), torso length 0.2
export const BASE_POSE = [
    [0.5, 0.3], // nose
    [0.48, 0.28], [0.52, 0.28], // eyes
    [0.46, 0.29], [0.54, 0.29], // ears
    [0.44, 0.38], [0.56, 0.38], // shoulders
    [0.4, 0.48], [0.6, 0.48], // elbows
    [0.38, 0.57], [0.62, 0.57], // wrists
    [0.46, 0.58], [0.54, 0.58], // hips
    [0.45, 0.72], [0.55, 0.72], // knees
    [0.45, 0.86], [0.55, 0.86], // ankles
];
const ARM_OUT = {
    7: [0.32, 0.36],
    8: [0.68, 0.36],
    9: [0.22, 0.3],
    10: [0.78, 0.3],
};
const CROUCH_WEIGHT = [1.2, 1.2, 1.2, 1.2, 1.2, 1.1, 1.1, 1.0, 1.0, 0.9, 0.9, 0.9, 0.9, 0.5, 0.5, 0.0, 0.0];
export const PUPPET_PRESETS = {
    happiness: { amplitude: 0.35, frequency: 1.6, jerk: 0.05, drift: 0, armSpread: 0.85, sway: 0.15, noise: 0.004 },
    anger: { amplitude: 0.25, frequency: 2.6, jerk: 0.85, drift: 0, armSpread: 0.45, sway: 0.1, noise: 0.006 },
    sadness: { amplitude: 0.04, frequency: 0.3, jerk: 0, drift: 0.02, armSpread: 0.05, sway: 0.02, noise: 0.003 },
    relaxation: { amplitude: 0.12, frequency: 0.45, jerk: 0, drift: 0, armSpread: 0.5, sway: 0.12, noise: 0.003 },
};
// mulberry32: small deterministic PRNG so tests can pin streams
export function makeRng(seed) {
    let a = seed >>> 0;
    return () => {
        a |= 0;
        a = (a + 0x6d2b79f5) | 0;
        let t = Math.imul(a ^ (a >>> 15), 1 | a);
        t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
        return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
    };
}
function gaussian(rng) {
    // Box-Muller; one value per call is plenty here
    const u = Math.max(rng(), 1e-12);
    const v = rng();
    return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
}
export class Puppeteer {
    constructor(params, seed = 1) {
        this.t = 0;
        this.phase = 0; // accumulated so slider changes stay continuous
        this.crouch = 0;
        this.params = { ...params };
        this.rng = makeRng(seed);
    }
    setParams(next) {
        Object.assign(this.params, next);
    }
    get streamTime() {
        return this.t;
    }
    nextFrame() {
        const p = this.params;
        const dt = 1 / FPS;
        this.phase += 2 * Math.PI * p.frequency * dt;
        this.crouch = Math.min(1, this.crouch + p.drift * dt);
        const bob = p.amplitude * BODY_SCALE * Math.sin(this.phase);
        const swayX = p.sway * BODY_SCALE * Math.sin(this.phase / 2);
        const impulse = p.jerk > 0 && this.rng() < p.jerk * 0.2
            ? [gaussian(this.rng) * p.jerk * 0.12 * BODY_SCALE,
                gaussian(this.rng) * p.jerk * 0.12 * BODY_SCALE]
            : [0, 0];
        const kp = BASE_POSE.map(([bx, by], i) => {
            let x = bx;
            let y = by;
            const out = ARM_OUT[i];
            if (out) {
                x = (1 - p.armSpread) * x + p.armSpread * out[0];
                y = (1 - p.armSpread) * y + p.armSpread * out[1];
            }
            y += bob + this.crouch * BODY_SCALE * CROUCH_WEIGHT[i];
            x += swayX;
            if (i === 5)
                x += 0.3 * this.crouch * BODY_SCALE;
            if (i === 6)
                x -= 0.3 * this.crouch * BODY_SCALE;
            if (i < 11) {
                x += impulse[0];
                y += impulse[1];
            }
            x += gaussian(this.rng) * p.noise;
            y += gaussian(this.rng) * p.noise;
            const conf = 0.7 + 0.3 * this.rng();
            return [clamp01(x), clamp01(y), conf];
        });
        const frame = { t: round6(this.t), persons: [{ id: 0, kp }] };
        this.t += dt;
        return frame;
    }
    nextBatch(count) {
        return Array.from({ length: count }, () => this.nextFrame());
    }
}
const clamp01 = (v) => Math.min(0.99, Math.max(0.01, v));
const round6 = (v) => Math.round(v * 1e6) / 1e6;
