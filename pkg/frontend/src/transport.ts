import { ClientMessage, ServerEvent, parseEvent } from "./protocol.js";

// A connected pipe to the server. The session assigns the callbacks before
// any event can arrive (transports are handed over already-open but unread).
export interface Transport {
    send(msg: ClientMessage): void;
    close(): void;
    onEvent: (ev: ServerEvent) => void;
    onClose: () => void;
}

export class WsTransport implements Transport {
    onEvent: (ev: ServerEvent) => void = () => {};
    onClose: () => void = () => {};

    constructor(private ws: WebSocket) {
        ws.onmessage = (msg) => {
            this.onEvent(parseEvent(String(msg.data)));
        };
        ws.onclose = () => {
            this.onClose();
        };
    }

    send(msg: ClientMessage): void {
        this.ws.send(JSON.stringify(msg));
    }

    close(): void {
        this.ws.onclose = null;
        this.ws.close();
    }
}

export function openWebSocket(url: string, timeoutMs = 5000): Promise<Transport> {
    return new Promise((resolve, reject) => {
        const ws = new WebSocket(url);
        const timer = setTimeout(() => {
            ws.close();
            reject(new Error(`timed out connecting to ${url}`));
        }, timeoutMs);
        ws.onopen = () => {
            clearTimeout(timer);
            resolve(new WsTransport(ws));
        };
        ws.onerror = () => {
            clearTimeout(timer);
            reject(new Error(`could not connect to ${url}`));
        };
    });
}

// One retry with a pause, then give up. A dead server should produce a
// visible error state, not a reconnect storm.
export async function connectWithRetry(
    open: () => Promise<Transport>,
    backoffMs = 1500,
): Promise<Transport> {
    try {
        return await open();
    } catch {
        await new Promise((r) => setTimeout(r, backoffMs));
        return open();
    }
}
