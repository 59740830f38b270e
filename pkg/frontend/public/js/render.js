// Canvas renderers. Pure functions of (context, data); one color per person
// id (red/green/blue), matching the installation's tracking display.
export const PERSON_COLORS = ["#ff5252", "#4caf50", "#4f9dff"];
export const SKELETON_CONNECTIONS = [
    [5, 7], [7, 9], [6, 8], [8, 10], // arms
    [5, 6], [5, 11], [6, 12], [11, 12], // torso
    [11, 13], [13, 15], [12, 14], [14, 16], // legs
    [0, 5], [0, 6], // neck-ish
];
export function drawSkeletons(ctx, persons, width, height) {
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#101418";
    ctx.fillRect(0, 0, width, height);
    for (const person of persons) {
        const color = PERSON_COLORS[person.id % PERSON_COLORS.length];
        ctx.strokeStyle = color;
        ctx.fillStyle = color;
        ctx.lineWidth = 2;
        for (const [i, j] of SKELETON_CONNECTIONS) {
            const a = person.kp[i];
            const b = person.kp[j];
            if (!a || !b || a[2] < 1 || b[2] < 1)
                continue;
            ctx.beginPath();
            ctx.moveTo(a[0] * width, a[1] * height);
            ctx.lineTo(b[0] * width, b[1] * height);
            ctx.stroke();
        }
        for (const [x, y, ok] of person.kp) {
            if (ok < 1)
                continue;
            ctx.beginPath();
            ctx.arc(x * width, y * height, 3, 0, 2 * Math.PI);
            ctx.fill();
        }
    }
}
export function drawAffectPlot(ctx, trail, width, height) {
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#101418";
    ctx.fillRect(0, 0, width, height);
    ctx.strokeStyle = "#2a3138";
    ctx.lineWidth = 1;
    ctx.beginPath();
    ctx.moveTo(width / 2, 0);
    ctx.lineTo(width / 2, height);
    ctx.moveTo(0, height / 2);
    ctx.lineTo(width, height / 2);
    ctx.stroke();
    ctx.fillStyle = "#5a646e";
    ctx.font = "10px system-ui";
    ctx.fillText("arousal+", width / 2 + 4, 12);
    ctx.fillText("valence+", width - 52, height / 2 - 6);
    const px = (v) => ((v + 1) / 2) * width;
    const py = (a) => height - ((a + 1) / 2) * height;
    trail.forEach((point, i) => {
        const alpha = (i + 1) / trail.length;
        ctx.fillStyle = `rgba(130, 190, 255, ${0.15 + 0.85 * alpha})`;
        ctx.beginPath();
        ctx.arc(px(point.v), py(point.a), i === trail.length - 1 ? 5 : 2, 0, 2 * Math.PI);
        ctx.fill();
    });
}
export function drawDistribution(ctx, dist, width, height) {
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#101418";
    ctx.fillRect(0, 0, width, height);
    const entries = Object.entries(dist);
    const rowH = Math.min(26, height / Math.max(entries.length, 1));
    entries.forEach(([label, p], i) => {
        const y = i * rowH;
        ctx.fillStyle = "#232a31";
        ctx.fillRect(84, y + 4, width - 134, rowH - 8);
        ctx.fillStyle = "#82beff";
        ctx.fillRect(84, y + 4, (width - 134) * p, rowH - 8);
        ctx.fillStyle = "#c7d1da";
        ctx.font = "11px system-ui";
        ctx.fillText(label.slice(0, 12), 6, y + rowH / 2 + 4);
        ctx.fillText(p.toFixed(2), width - 42, y + rowH / 2 + 4);
    });
}
const GAUGE_ORDER = ["speed", "energy", "amplitude", "expansion", "jerk", "frequency", "qom", "rom"];
export function drawGauges(ctx, features, width, height) {
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#101418";
    ctx.fillRect(0, 0, width, height);
    const rowH = height / GAUGE_ORDER.length;
    GAUGE_ORDER.forEach((name, i) => {
        const value = features[name] ?? 0;
        const y = i * rowH;
        ctx.fillStyle = "#232a31";
        ctx.fillRect(84, y + 3, width - 134, rowH - 6);
        ctx.fillStyle = "#79d2a6";
        ctx.fillRect(84, y + 3, (width - 134) * Math.min(1, value), rowH - 6);
        ctx.fillStyle = "#c7d1da";
        ctx.font = "11px system-ui";
        ctx.fillText(name, 6, y + rowH / 2 + 4);
        ctx.fillText(value.toFixed(2), width - 42, y + rowH / 2 + 4);
    });
}
export function describeState(message, stale) {
    if (!message)
        return "no data";
    const phase = message.phase.toUpperCase();
    const base = `${phase} · hop ${message.hop} · t=${message.t.toFixed(1)}s`;
    return stale ? `${base} · STALE` : base;
}
