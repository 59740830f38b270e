// Engine connection with capped-backoff reconnect. On reconnect the view is
// rebuilt from the live stream only; stale data is never presented as live.

import { parseEngineMessage, type EngineMessage } from "./protocol.js";

export type SocketListener = (message: EngineMessage) => void;
export type StatusListener = (status: "connecting" | "open" | "closed") => void;

export class EngineSocket {
  private ws: WebSocket | null = null;
  private closed = false;
  private retryMs = 500;
  private listeners: SocketListener[] = [];
  private statusListeners: StatusListener[] = [];

  constructor(private url: string) {}

  onMessage(listener: SocketListener): void {
    this.listeners.push(listener);
  }

  onStatus(listener: StatusListener): void {
    this.statusListeners.push(listener);
  }

  private emitStatus(status: "connecting" | "open" | "closed") {
    this.statusListeners.forEach((l) => l(status));
  }

  connect(): void {
    this.closed = false;
    this.emitStatus("connecting");
    this.ws = new WebSocket(this.url);
    this.ws.onopen = () => {
      this.retryMs = 500;
      this.emitStatus("open");
    };
    this.ws.onmessage = (ev) => {
      let message: EngineMessage;
      try {
        message = parseEngineMessage(String(ev.data));
      } catch {
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

  send(raw: string): boolean {
    if (this.ws && this.ws.readyState === WebSocket.OPEN) {
      this.ws.send(raw);
      return true;
    }
    return false;
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}
