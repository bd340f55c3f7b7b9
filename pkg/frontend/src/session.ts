import { Choice, ClientMessage, ServerEvent } from "./protocol.js";
import { Transport } from "./transport.js";

// Everything the page needs to draw one calibration run. Text is append
// only; buttons are live only during a pause; "same" exists only when the
// server offered it.
export type ConnectionState = "connecting" | "streaming" | "paused" | "done" | "error";

export interface UiSessionView {
    state: ConnectionState;
    sessionId: string | null;
    text: string;
    wordCount: number;
    speedWps: number | null;
    pauseOptions: Choice[];
    buttonsEnabled: boolean;
    finalWps: number | null;
    errorMessage: string | null;
}

export interface TranscriptEntry {
    ts: number;
    dir: "in" | "out";
    event: unknown;
}

export interface SessionOptions {
    passageId?: string;
    text?: string;
}

export class CalibSession {
    view: UiSessionView = {
        state: "connecting",
        sessionId: null,
        text: "",
        wordCount: 0,
        speedWps: null,
        pauseOptions: [],
        buttonsEnabled: false,
        finalWps: null,
        errorMessage: null,
    };
    transcript: TranscriptEntry[] = [];
    onChange: (view: UiSessionView) => void = () => {};

    private lastSeq = 0;

    constructor(private transport: Transport, private opts: SessionOptions) {
        transport.onEvent = (ev) => this.handleEvent(ev);
        transport.onClose = () => this.handleClose();
    }

    start(): void {
        const msg: Extract<ClientMessage, { type: "start" }> = { type: "start", mode: "pest" };
        if (this.opts.passageId) {
            msg.passage_id = this.opts.passageId;
        } else if (this.opts.text) {
            msg.text = this.opts.text;
        }
        this.sendMessage(msg);
    }

    // Returns whether the choice was sent. Refuses anything outside a pause
    // window and any "same" the server did not offer, so a miswired button
    // can never violate the protocol.
    submitChoice(choice: Choice): boolean {
        if (this.view.state !== "paused") {
            return false;
        }
        if (!this.view.pauseOptions.includes(choice)) {
            return false;
        }
        this.sendMessage({ type: "feedback", choice });
        this.view.state = "streaming";
        this.view.pauseOptions = [];
        this.view.buttonsEnabled = false;
        this.onChange(this.view);
        return true;
    }

    stop(): void {
        if (this.view.state === "streaming" || this.view.state === "paused") {
            this.sendMessage({ type: "stop" });
        }
    }

    handleEvent(ev: ServerEvent): void {
        if (this.isTerminal()) {
            return;
        }
        this.transcript.push({ ts: Date.now(), dir: "in", event: ev });
        switch (ev.type) {
            case "hello":
                this.view.sessionId = ev.session;
                this.view.speedWps = ev.speed;
                this.view.state = "streaming";
                break;
            case "word":
                if (ev.seq !== this.lastSeq + 1) {
                    this.fail(`word sequence broke: got ${ev.seq} after ${this.lastSeq}`);
                    return;
                }
                this.lastSeq = ev.seq;
                this.view.text = this.view.text === "" ? ev.text : this.view.text + " " + ev.text;
                this.view.wordCount += 1;
                break;
            case "rate":
                this.view.speedWps = ev.wps;
                break;
            case "pause":
                this.view.state = "paused";
                this.view.pauseOptions = ev.options;
                this.view.buttonsEnabled = true;
                break;
            case "score":
                break; // debug-only event, kept in the transcript
            case "done":
                this.view.state = "done";
                this.view.finalWps = ev.final_wps;
                this.view.buttonsEnabled = false;
                this.view.pauseOptions = [];
                break;
            case "error":
                this.view.state = "error";
                this.view.errorMessage = ev.message;
                this.view.buttonsEnabled = false;
                this.view.pauseOptions = [];
                break;
        }
        this.onChange(this.view);
    }

    handleClose(): void {
        if (this.isTerminal()) {
            return;
        }
        // the accumulated text and transcript survive for inspection
        this.fail("connection closed by the server");
    }

    transcriptJson(): string {
        return JSON.stringify(this.transcript, null, 2);
    }

    private isTerminal(): boolean {
        return this.view.state === "done" || this.view.state === "error";
    }

    private fail(message: string): void {
        this.view.state = "error";
        this.view.errorMessage = message;
        this.view.buttonsEnabled = false;
        this.view.pauseOptions = [];
        this.onChange(this.view);
    }

    private sendMessage(msg: ClientMessage): void {
        this.transcript.push({ ts: Date.now(), dir: "out", event: msg });
        this.transport.send(msg);
    }
}
