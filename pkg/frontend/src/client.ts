/**
 * Websocket session client: parses telemetry, reconnects with backoff, and
 * never feeds the UI out-of-order data (that is the CueModel's job to drop).
 */

import { parseServerMessage, ProtocolError, ServerMessage } from "./protocol.js";

export interface ClientCallbacks {
  onMessage: (msg: ServerMessage) => void;
  onStatus: (connected: boolean) => void;
}

export class SessionClient {
  private url: string;
  private ws: WebSocket | null = null;
  private backoffMs = 250;
  private closed = false;
  private readonly cb: ClientCallbacks;
  protocolErrors = 0;

  constructor(url: string, cb: ClientCallbacks) {
    this.url = url;
    this.cb = cb;
  }

  connect(): void {
    this.closed = false;
    this.open();
  }

  private open(): void {
    if (this.closed) return;
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.backoffMs = 250;
      this.cb.onStatus(true);
    };
    ws.onmessage = (ev) => {
      try {
        this.cb.onMessage(parseServerMessage(String(ev.data)));
      } catch (err) {
        if (err instanceof ProtocolError) this.protocolErrors += 1;
        else throw err;
      }
    };
    ws.onclose = () => {
      this.ws = null;
      this.cb.onStatus(false);
      if (!this.closed) {
        setTimeout(() => this.open(), this.backoffMs);
        this.backoffMs = Math.min(this.backoffMs * 2, 5000);
      }
    };
    ws.onerror = () => ws.close();
  }

  get connected(): boolean {
    return this.ws !== null && this.ws.readyState === WebSocket.OPEN;
  }

  send(raw: string): void {
    if (this.connected) this.ws!.send(raw);
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}
