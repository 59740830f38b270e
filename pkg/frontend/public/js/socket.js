// Engine connection with capped-backoff reconnect. On reconnect the view is
// rebuilt from the live stream only; stale data is never presented as live.
import { parseEngineMessage } from "./protocol.js";
export class EngineSocket {
    constructor(url) {
        this.url = url;
        this.ws = null;
        this.closed = false;
        this.retryMs = 500;
        this.listeners = [];
        this.statusListeners = [];
    }
    onMessage(listener) {
        this.listeners.push(listener);
    }
    onStatus(listener) {
        this.statusListeners.push(listener);
    }
    emitStatus(status) {
        this.statusListeners.forEach((l) => l(status));
    }
    connect() {
        this.closed = false;
        this.emitStatus("connecting");
        this.ws = new WebSocket(this.url);
        this.ws.onopen = () => {
            this.retryMs = 500;
            this.emitStatus("open");
        };
        this.ws.onmessage = (ev) => {
            let message;
            try {
                message = parseEngineMessage(String(ev.data));
            }
            catch {
                return;
            }
            this.listeners.forEach((l) => l(message));
        };
        this.ws.onclose = () => {
            this.ws = null;
            this.emitStatus("closed");
            if (!this.closed) {
                setTimeout(() => this.connect(), this.retryMs);
                this.retryMs = Math.min(this.retryMs * 2, 8000);
            }
        };
        this.ws.onerror = () => {
            // onclose handles the retry
        };
    }
    send(raw) {
        if (this.ws && this.ws.readyState === WebSocket.OPEN) {
            this.ws.send(raw);
            return true;
        }
        return false;
    }
    close() {
        this.closed = true;
        this.ws?.close();
    }
}
