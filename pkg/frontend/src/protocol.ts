// Wire protocol spoken by the pacing server: one JSON object per message.
// Raw TCP framing is one object per line; WebSocket framing is one object
// per text frame. The payloads are identical.

export type Choice = "faster" | "slower" | "same";

export type ServerEvent =
    | { type: "hello"; session: string; mode: string; speed: number }
    | { type: "word"; text: string; seq: number }
    | { type: "rate"; wps: number }
    | { type: "pause"; options: Choice[] }
    | { type: "score"; value: number }
    | { type: "done"; final_wps: number }
    | { type: "error"; message: string };

export type ClientMessage =
    | { type: "start"; mode: "pest" | "adaptive" | "fixed"; passage_id?: string; text?: string; rate?: number }
    | { type: "feedback"; choice: Choice }
    | { type: "stop" };

const EVENT_TYPES = new Set(["hello", "word", "rate", "pause", "score", "done", "error"]);

export function parseEvent(raw: string): ServerEvent {
    const obj = JSON.parse(raw);
    if (!obj || typeof obj.type !== "string" || !EVENT_TYPES.has(obj.type)) {
        throw new Error(`not a server event: ${raw}`);
    }
    return obj as ServerEvent;
}
