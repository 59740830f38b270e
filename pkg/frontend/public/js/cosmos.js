// Stylized 2.5D crystal scene, computed entirely from the decoded payload.
// Crystals rotate slowly around the session center; hue comes from each
// episode's circumplex angle, size from intensity x duration.
export function crystalHue(rotation) {
    return ((rotation * 180) / Math.PI + 360) % 360;
}
export function drawCosmos(ctx, cosmos, width, height, spinT = 0) {
    ctx.clearRect(0, 0, width, height);
    const gradient = ctx.createRadialGradient(width / 2, height / 2, 10, width / 2, height / 2, Math.max(width, height) / 1.4);
    gradient.addColorStop(0, "#10141f");
    gradient.addColorStop(1, "#05070c");
    ctx.fillStyle = gradient;
    ctx.fillRect(0, 0, width, height);
    const maxRadius = 0.5 * Math.sqrt(Math.max(cosmos.crystals.length, 1));
    const scale = (Math.min(width, height) * 0.42) / Math.max(maxRadius, 0.5);
    const spin = spinT * 0.15;
    const projected = cosmos.crystals.map((crystal, i) => {
        const [x, y, z] = crystal.position;
        const rx = x * Math.cos(spin) - z * Math.sin(spin);
        const rz = x * Math.sin(spin) + z * Math.cos(spin);
        return {
            crystal,
            index: i,
            sx: width / 2 + rx * scale,
            sy: height / 2 + (y * 0.9 - rz * 0.35) * scale,
            depth: rz,
        };
    });
    projected.sort((a, b) => a.depth - b.depth);
    for (const { crystal, sx, sy, depth } of projected) {
        const r = 8 + crystal.size * 16;
        const hue = crystalHue(crystal.rotation);
        const light = 55 + Math.max(-15, Math.min(15, depth * 10));
        ctx.save();
        ctx.translate(sx, sy);
        ctx.rotate(crystal.rotation + spin * 0.5);
        ctx.beginPath();
        // elongated hexagon reads as a crystal shard
        const pts = [
            [0, -1.6 * r], [0.6 * r, -0.5 * r], [0.5 * r, 0.9 * r],
            [0, 1.5 * r], [-0.5 * r, 0.9 * r], [-0.6 * r, -0.5 * r],
        ];
        pts.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
        ctx.closePath();
        ctx.fillStyle = `hsla(${hue}, 70%, ${light}%, 0.82)`;
        ctx.strokeStyle = `hsla(${hue}, 85%, ${Math.min(85, light + 22)}%, 0.95)`;
        ctx.lineWidth = 1.5;
        ctx.fill();
        ctx.stroke();
        ctx.restore();
    }
    ctx.fillStyle = "#9aa7b4";
    ctx.font = "12px system-ui";
    const levels = Object.entries(cosmos.integratedLevels)
        .map(([k, v]) => `${k} ${v.toFixed(0)}s`)
        .join("   ");
    ctx.fillText(`session ${cosmos.sessionId.slice(0, 8)}…  ·  ${cosmos.durationS.toFixed(0)}s  ·  ` +
        `${cosmos.crystals.length} crystals`, 12, height - 28);
    ctx.fillText(levels, 12, height - 10);
}
