import { describe, expect, it } from "vitest";

import { ClientMessage, ServerEvent } from "../src/protocol.js";
import { CalibSession } from "../src/session.js";
import { Transport, connectWithRetry } from "../src/transport.js";

// A scripted stand-in for the server: the test feeds events in by hand and
// inspects everything the session tried to send out.
class FakeTransport implements Transport {
    sent: ClientMessage[] = [];
    closed = false;
    onEvent: (ev: ServerEvent) => void = () => {};
    onClose: () => void = () => {};

    send(msg: ClientMessage): void {
        this.sent.push(msg);
    }

    close(): void {
        this.closed = true;
    }

    feed(...events: ServerEvent[]): void {
        for (const ev of events) {
            this.onEvent(ev);
        }
    }
}

function started(opts = {}): [CalibSession, FakeTransport] {
    const fake = new FakeTransport();
    const session = new CalibSession(fake, { passageId: "p01", ...opts });
    session.start();
    fake.feed({ type: "hello", session: "s-1", mode: "pest", speed: 5.0 });
    return [session, fake];
}

function words(fake: FakeTransport, texts: string[], firstSeq = 1): void {
    fake.feed(...texts.map((text, i): ServerEvent => ({ type: "word", text, seq: firstSeq + i })));
}

describe("rendered text", () => {
    it("equals the word events joined with single spaces", () => {
        const [session, fake] = started();
        const texts = ["The", "quick", "brown", "fox", "jumps."];
        words(fake, texts);
        expect(session.view.text).toBe(texts.join(" "));
        expect(session.view.wordCount).toBe(5);
    });

    it("is append-only across a pause and resume", () => {
        const [session, fake] = started();
        words(fake, ["one", "two"]);
        fake.feed({ type: "pause", options: ["faster", "slower"] });
        const before = session.view.text;
        session.submitChoice("faster");
        fake.feed({ type: "rate", wps: 7.0 });
        words(fake, ["three"], 3);
        expect(session.view.text).toBe(before + " three");
    });

    it("flags a sequence gap instead of silently dropping words", () => {
        const [session, fake] = started();
        words(fake, ["one"]);
        fake.feed({ type: "word", text: "three", seq: 3 });
        expect(session.view.state).toBe("error");
        expect(session.view.errorMessage).toContain("sequence");
        expect(session.view.text).toBe("one");
    });
});

describe("feedback discipline", () => {
    it("sends nothing when a choice is made outside a pause", () => {
        const [session, fake] = started();
        words(fake, ["one"]);
        expect(session.submitChoice("faster")).toBe(false);
        expect(session.submitChoice("slower")).toBe(false);
        expect(fake.sent.filter((m) => m.type === "feedback")).toEqual([]);
    });

    it("sends exactly one feedback per pause, then locks the buttons", () => {
        const [session, fake] = started();
        words(fake, ["one", "two"]);
        fake.feed({ type: "pause", options: ["faster", "slower"] });
        expect(session.view.buttonsEnabled).toBe(true);
        expect(session.submitChoice("faster")).toBe(true);
        expect(session.view.buttonsEnabled).toBe(false);
        expect(session.submitChoice("slower")).toBe(false);
        expect(fake.sent.filter((m) => m.type === "feedback")).toEqual([
            { type: "feedback", choice: "faster" },
        ]);
    });

    it("never offers 'same' before the server does", () => {
        const [session, fake] = started();
        fake.feed({ type: "pause", options: ["faster", "slower"] });
        expect(session.view.pauseOptions).not.toContain("same");
        expect(session.submitChoice("same")).toBe(false);
        session.submitChoice("slower");
        fake.feed({ type: "pause", options: ["faster", "slower", "same"] });
        expect(session.view.pauseOptions).toContain("same");
        expect(session.submitChoice("same")).toBe(true);
        expect(fake.sent.pop()).toEqual({ type: "feedback", choice: "same" });
    });
});

describe("terminal states", () => {
    it("records the final speed on done and disables everything", () => {
        const [session, fake] = started();
        words(fake, ["one"]);
        fake.feed({ type: "done", final_wps: 6.01 });
        expect(session.view.state).toBe("done");
        expect(session.view.finalWps).toBeCloseTo(6.01);
        expect(session.view.buttonsEnabled).toBe(false);
        expect(session.submitChoice("faster")).toBe(false);
    });

    it("shows the server's error message and stops listening", () => {
        const [session, fake] = started();
        fake.feed({ type: "error", message: "BadConfig: no such mode" });
        expect(session.view.state).toBe("error");
        expect(session.view.errorMessage).toBe("BadConfig: no such mode");
        fake.feed({ type: "word", text: "ghost", seq: 1 });
        expect(session.view.text).toBe("");
    });

    it("turns a mid-stream disconnect into an error, keeping the evidence", () => {
        const [session, fake] = started();
        words(fake, ["one", "two"]);
        fake.onClose();
        expect(session.view.state).toBe("error");
        expect(session.view.text).toBe("one two");
        expect(session.transcript.length).toBeGreaterThan(0);
    });

    it("ignores the close that follows a clean done", () => {
        const [session, fake] = started();
        fake.feed({ type: "done", final_wps: 5.0 });
        fake.onClose();
        expect(session.view.state).toBe("done");
        expect(session.view.errorMessage).toBeNull();
    });
});

describe("transcript", () => {
    it("keeps both directions in arrival order", () => {
        const [session, fake] = started();
        words(fake, ["one"]);
        fake.feed({ type: "pause", options: ["faster", "slower"] });
        session.submitChoice("slower");
        const kinds = session.transcript.map((t) => [t.dir, (t.event as any).type]);
        expect(kinds).toEqual([
            ["out", "start"],
            ["in", "hello"],
            ["in", "word"],
            ["in", "pause"],
            ["out", "feedback"],
        ]);
        expect(JSON.parse(session.transcriptJson())).toHaveLength(5);
    });

    it("starts sessions by passage id when one is given", () => {
        const [, fake] = started();
        expect(fake.sent[0]).toEqual({ type: "start", mode: "pest", passage_id: "p01" });
    });
});

describe("connectWithRetry", () => {
    it("retries a failed dial exactly once", async () => {
        let attempts = 0;
        const fake = new FakeTransport();
        const transport = await connectWithRetry(async () => {
            attempts += 1;
            if (attempts === 1) {
                throw new Error("refused");
            }
            return fake;
        }, 1);
        expect(transport).toBe(fake);
        expect(attempts).toBe(2);
    });

    it("gives up after the second failure", async () => {
        let attempts = 0;
        await expect(
            connectWithRetry(async () => {
                attempts += 1;
                throw new Error("refused");
            }, 1),
        ).rejects.toThrow("refused");
        expect(attempts).toBe(2);
    });
});
