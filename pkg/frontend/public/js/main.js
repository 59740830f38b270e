// Studio client: connect to a running engine, drive the session phases,
// stream a movement source (recording upload or the slider puppeteer), and
// end in the cosmos view rendered from the decoded payload.
import { drawCosmos } from "./cosmos.js";
import { decodePayload, payloadFromUrl } from "./payload.js";
import { endMessage, exploreMessage, feedbackMessage, framesMessage, startMessage, teachEndMessage, teachStartMessage, } from "./protocol.js";
import { Puppeteer, PUPPET_PRESETS, FPS } from "./puppeteer.js";
import { describeState, drawAffectPlot, drawDistribution, drawGauges, drawSkeletons } from "./render.js";
import { EngineSocket } from "./socket.js";
import { SessionView } from "./state.js";
const $ = (id) => {
    const el = document.getElementById(id);
    if (!el)
        throw new Error(`missing #${id}`);
    return el;
};
const params = new URLSearchParams(location.search);
const engineUrl = params.get("engine") ?? `ws://${location.hostname || "127.0.0.1"}:8765/ws`;
const view = new SessionView();
const socket = new EngineSocket(engineUrl);
let decodedCosmos = null;
socket.onStatus((status) => {
    view.connection = status;
    if (status !== "open") {
        // never present old data as live after a drop
        view.lastStateAtMs = null;
    }
});
socket.onMessage((message) => {
    if (message.type === "state") {
        view.applyState(message, performance.now());
    }
    else if (message.type === "cosmos") {
        view.applyCosmos(message);
        try {
            decodedCosmos = decodePayload(payloadFromUrl(message.url));
        }
        catch (err) {
            view.lastError = `payload decode failed: ${err}`;
        }
        $("cosmos-url").textContent = message.url;
        $("cosmos-link").href = message.url;
        $("cosmos-panel").classList.remove("hidden");
        $("live-panels").classList.add("dimmed");
    }
    else if (message.type === "error") {
        view.lastError = `${message.error}: ${message.detail}`;
    }
    else if (message.type === "ack") {
        view.lastError = null;
    }
});
socket.connect();
// ---- session controls (1:1 with the wire schema) ----
$("btn-start").onclick = () => socket.send(startMessage());
$("btn-teach").onclick = () => {
    const label = $("teach-label").value.trim() || "happiness";
    socket.send(teachStartMessage(label));
};
$("btn-teach-end").onclick = () => socket.send(teachEndMessage());
$("btn-explore").onclick = () => socket.send(exploreMessage());
$("btn-agree").onclick = () => socket.send(feedbackMessage(true));
$("btn-disagree").onclick = () => socket.send(feedbackMessage(false));
$("btn-end").onclick = () => socket.send(endMessage());
$("btn-cosmos-close").onclick = () => {
    $("cosmos-panel").classList.add("hidden");
    $("live-panels").classList.remove("dimmed");
};
let source = "none";
let puppet = new Puppeteer(PUPPET_PRESETS.relaxation, Date.now() & 0xffff);
let fileFrames = null;
let fileIndex = 0;
let feeder = null;
const sliderIds = ["amplitude", "frequency", "jerk", "drift", "armSpread", "sway"];
function syncSliders() {
    for (const key of sliderIds) {
        const slider = $(`slider-${key}`);
        slider.value = String(puppet.params[key]);
        $(`value-${key}`).textContent = Number(puppet.params[key]).toFixed(2);
    }
}
for (const key of sliderIds) {
    $(`slider-${key}`).oninput = (ev) => {
        const value = Number(ev.target.value);
        puppet.setParams({ [key]: value });
        $(`value-${key}`).textContent = value.toFixed(2);
    };
}
for (const [name] of Object.entries(PUPPET_PRESETS)) {
    $(`preset-${name}`).onclick = () => {
        puppet.setParams(PUPPET_PRESETS[name]);
        syncSliders();
    };
}
function stopFeeder() {
    if (feeder !== null) {
        clearInterval(feeder);
        feeder = null;
    }
}
function startFeeder() {
    stopFeeder();
    // 3 frames per 100 ms tick = 30 fps of stream time
    feeder = window.setInterval(() => {
        if (view.connection !== "open")
            return;
        if (source === "puppeteer") {
            socket.send(framesMessage(puppet.nextBatch(3)));
        }
        else if (source === "file" && fileFrames) {
            const batch = fileFrames.slice(fileIndex, fileIndex + 3);
            fileIndex += batch.length;
            if (batch.length)
                socket.send(framesMessage(batch));
            else
                stopFeeder();
        }
    }, 1000 / (FPS / 3));
}
$("source-select").onchange = (ev) => {
    source = ev.target.value;
    $("puppeteer-controls").classList.toggle("hidden", source !== "puppeteer");
    $("file-controls").classList.toggle("hidden", source !== "file");
    if (source === "none")
        stopFeeder();
    else
        startFeeder();
};
$("file-input").onchange = async (ev) => {
    const file = ev.target.files?.[0];
    if (!file)
        return;
    const text = await file.text();
    const frames = [];
    const lines = text.split("\n");
    for (let i = 0; i < lines.length; i++) {
        const line = lines[i].trim();
        if (!line)
            continue;
        try {
            frames.push(JSON.parse(line));
        }
        catch {
            view.lastError = `recording rejected: bad JSON on line ${i + 1}`;
            return;
        }
    }
    fileFrames = frames;
    fileIndex = 0;
    view.lastError = null;
    $("file-info").textContent = `${frames.length} frames loaded`;
    if (source === "file")
        startFeeder();
};
// ---- render loop ----
const skeletonCanvas = $("skeleton-canvas");
const plotCanvas = $("plot-canvas");
const distCanvas = $("dist-canvas");
const gaugeCanvas = $("gauge-canvas");
const cosmosCanvas = $("cosmos-canvas");
function renderFrame(nowMs) {
    const stale = view.isStale(nowMs);
    $("status-conn").textContent = view.connection;
    $("status-conn").className = `pill ${view.connection}`;
    $("status-state").textContent = describeState(view.latest, stale);
    $("status-state").classList.toggle("stale", stale);
    $("status-error").textContent = view.lastError ?? "";
    const persons = !stale && view.latest ? view.latest.persons : [];
    drawSkeletons(skeletonCanvas.getContext("2d"), persons, skeletonCanvas.width, skeletonCanvas.height);
    drawAffectPlot(plotCanvas.getContext("2d"), view.trail, plotCanvas.width, plotCanvas.height);
    const emotion = persons[0]?.emotion ?? (!stale ? view.latest?.group : null);
    drawDistribution(distCanvas.getContext("2d"), emotion?.dist ?? {}, distCanvas.width, distCanvas.height);
    drawGauges(gaugeCanvas.getContext("2d"), persons[0]?.features ?? {}, gaugeCanvas.width, gaugeCanvas.height);
    if (emotion) {
        $("emotion-line").textContent =
            `${emotion.top}  ·  v ${emotion.v.toFixed(2)}  a ${emotion.a.toFixed(2)}  ` +
                `intensity ${emotion.intensity.toFixed(2)}  confidence ${emotion.confidence.toFixed(2)}`;
    }
    $("btn-agree").disabled = !view.canFeedback;
    $("btn-disagree").disabled = !view.canFeedback;
    $("btn-teach").disabled = !view.canTeach;
    $("btn-teach-end").disabled = view.phase !== "teaching";
    $("btn-explore").disabled = view.phase !== "teaching";
    $("btn-end").disabled = view.phase !== "exploration";
    $("btn-start").disabled =
        view.connection !== "open" || (view.phase !== "idle" && view.latest !== null);
    if (decodedCosmos && !$("cosmos-panel").classList.contains("hidden")) {
        drawCosmos(cosmosCanvas.getContext("2d"), decodedCosmos, cosmosCanvas.width, cosmosCanvas.height, nowMs / 1000);
    }
    requestAnimationFrame(renderFrame);
}
syncSliders();
$("engine-url").textContent = engineUrl;
requestAnimationFrame(renderFrame);
