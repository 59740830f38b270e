// Cosmos payload decoder: the crystal scene is computed entirely from the
// URL fragment, proving the payload is self-sufficient. The binary grammar
// and the spiral placement mirror the engine exactly (version 1).
export const PREDEFINED_LABELS = ["happiness", "relaxation", "anger", "sadness"];
const HEADER_BYTES = 28;
const EPISODE_BYTES = 7;
const GOLDEN_ANGLE = Math.PI * (3 - Math.sqrt(5));
export class PayloadError extends Error {
}
function base64urlToBytes(payload) {
    const padded = payload + "=".repeat((4 - (payload.length % 4)) % 4);
    const b64 = padded.replace(/-/g, "+").replace(/_/g, "/");
    let binary;
    try {
        binary = typeof atob === "function"
            ? atob(b64)
            : Buffer.from(b64, "base64").toString("binary");
    }
    catch {
        throw new PayloadError("payload is not valid base64url");
    }
    if (typeof atob !== "function") {
        // Buffer silently drops invalid chars; verify round-trip
        const again = Buffer.from(binary, "binary").toString("base64");
        if (again.replace(/=+$/, "") !== b64.replace(/=+$/, "")) {
            throw new PayloadError("payload is not valid base64url");
        }
    }
    const bytes = new Uint8Array(binary.length);
    for (let i = 0; i < binary.length; i++)
        bytes[i] = binary.charCodeAt(i);
    return bytes;
}
// Compact synchronous SHA-256 (FIPS 180-4); needed because the crystal
// spiral is seeded by hashes and browsers only expose an async digest.
export function sha256(data) {
    const K = new Uint32Array([
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
        0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
        0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
        0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
        0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
        0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
        0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
        0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2,
    ]);
    const H = new Uint32Array([
        0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
        0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19,
    ]);
    const length = data.length;
    const bitLen = length * 8;
    const padded = new Uint8Array((((length + 8) >> 6) + 1) << 6);
    padded.set(data);
    padded[length] = 0x80;
    const dv = new DataView(padded.buffer);
    dv.setUint32(padded.length - 4, bitLen >>> 0);
    dv.setUint32(padded.length - 8, Math.floor(bitLen / 0x100000000));
    const w = new Uint32Array(64);
    const rotr = (x, n) => (x >>> n) | (x << (32 - n));
    for (let offset = 0; offset < padded.length; offset += 64) {
        for (let i = 0; i < 16; i++)
            w[i] = dv.getUint32(offset + i * 4);
        for (let i = 16; i < 64; i++) {
            const s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >>> 3);
            const s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >>> 10);
            w[i] = (w[i - 16] + s0 + w[i - 7] + s1) >>> 0;
        }
        let [a, b, c, d, e, f, g, h] = H;
        for (let i = 0; i < 64; i++) {
            const S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const ch = (e & f) ^ (~e & g);
            const t1 = (h + S1 + ch + K[i] + w[i]) >>> 0;
            const S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const maj = (a & b) ^ (a & c) ^ (b & c);
            const t2 = (S0 + maj) >>> 0;
            h = g;
            g = f;
            f = e;
            e = (d + t1) >>> 0;
            d = c;
            c = b;
            b = a;
            a = (t1 + t2) >>> 0;
        }
        H[0] = (H[0] + a) >>> 0;
        H[1] = (H[1] + b) >>> 0;
        H[2] = (H[2] + c) >>> 0;
        H[3] = (H[3] + d) >>> 0;
        H[4] = (H[4] + e) >>> 0;
        H[5] = (H[5] + f) >>> 0;
        H[6] = (H[6] + g) >>> 0;
        H[7] = (H[7] + h) >>> 0;
    }
    const out = new Uint8Array(32);
    const outView = new DataView(out.buffer);
    for (let i = 0; i < 8; i++)
        outView.setUint32(i * 4, H[i]);
    return out;
}
function hexToBytes(hex) {
    const out = new Uint8Array(hex.length / 2);
    for (let i = 0; i < out.length; i++) {
        out[i] = parseInt(hex.slice(i * 2, i * 2 + 2), 16);
    }
    return out;
}
function firstWordUnit(hash) {
    return ((hash[0] << 24) | (hash[1] << 16) | (hash[2] << 8) | hash[3]) >>> 0;
}
export function crystalPosition(sessionIdHex, index) {
    const sid = hexToBytes(sessionIdHex);
    const phase = (2 * Math.PI * firstWordUnit(sha256(sid))) / 2 ** 32;
    const seeded = new Uint8Array(sid.length + 4);
    seeded.set(sid);
    new DataView(seeded.buffer).setUint32(sid.length, index);
    const jitter = firstWordUnit(sha256(seeded)) / 2 ** 32;
    const angle = phase + index * GOLDEN_ANGLE;
    const radius = 0.5 * Math.sqrt(index + 1);
    return [radius * Math.cos(angle), (jitter - 0.5) * 0.4, radius * Math.sin(angle)];
}
export function decodePayload(payload) {
    const data = base64urlToBytes(payload);
    if (data.length < HEADER_BYTES) {
        throw new PayloadError(`payload too short: ${data.length} bytes`);
    }
    if (data[0] !== 1) {
        throw new PayloadError(`unsupported payload version ${data[0]}`);
    }
    const view = new DataView(data.buffer, data.byteOffset, data.byteLength);
    const sessionId = Array.from(data.slice(1, 17))
        .map((b) => b.toString(16).padStart(2, "0"))
        .join("");
    const durationS = view.getUint16(17) / 10;
    const integratedLevels = {};
    PREDEFINED_LABELS.forEach((label, i) => {
        integratedLevels[label] = view.getUint16(19 + 2 * i) / 10;
    });
    const count = data[27];
    if (data.length !== HEADER_BYTES + count * EPISODE_BYTES) {
        throw new PayloadError(`expected ${HEADER_BYTES + count * EPISODE_BYTES} bytes, got ${data.length}`);
    }
    const episodes = [];
    for (let i = 0; i < count; i++) {
        const base = HEADER_BYTES + i * EPISODE_BYTES;
        const labelIndex = data[base];
        episodes.push({
            label: labelIndex < PREDEFINED_LABELS.length
                ? PREDEFINED_LABELS[labelIndex]
                : `taught-${labelIndex}`,
            onset: view.getUint16(base + 1) / 10,
            duration: view.getUint16(base + 3) / 10,
            intensity: data[base + 5] / 255,
            rotation: (data[base + 6] / 255) * 2 * Math.PI - Math.PI,
        });
    }
    const crystals = episodes.map((ep, i) => ({
        label: ep.label,
        size: ep.intensity * Math.log1p(ep.duration),
        creationTime: ep.onset,
        rotation: ep.rotation,
        position: crystalPosition(sessionId, i),
    }));
    return { sessionId, durationS, integratedLevels, episodes, crystals };
}
export function payloadFromUrl(url) {
    const hash = url.lastIndexOf("#");
    return hash >= 0 ? url.slice(hash + 1) : url;
}
