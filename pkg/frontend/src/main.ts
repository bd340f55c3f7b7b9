import { CalibSession } from "./session.js";
import { SessionRenderer } from "./ui.js";
import { connectWithRetry, openWebSocket } from "./transport.js";

// Entry point for the calibration page. Configuration comes from the URL:
//   ?server=host:port     pacing server address (default: page host, port 8787)
//   ?passage=ID           passage to stream (omit to use the built-in text)
//   ?debug=1              show the measured pace at each pause

const FALLBACK_TEXT =
    "Reading speed varies from person to person far more than interfaces " +
    "usually admit. This short calibration finds a pace that feels natural " +
    "to you by streaming text and asking, now and then, whether it should " +
    "go faster or slower. Answer honestly; there is no score to beat.";

async function boot(): Promise<void> {
    const params = new URLSearchParams(window.location.search);
    const server = params.get("server") ?? `${window.location.hostname || "127.0.0.1"}:8787`;
    const passageId = params.get("passage") ?? undefined;
    const debug = params.get("debug") === "1";

    const status = document.getElementById("status") as HTMLElement;
    try {
        const transport = await connectWithRetry(() => openWebSocket(`ws://${server}`));
        const session = new CalibSession(transport, passageId ? { passageId } : { text: FALLBACK_TEXT });
        new SessionRenderer(session, debug);
        session.start();
    } catch (err) {
        status.textContent = `Could not reach the pacing server at ${server}: ${err}`;
    }
}

boot();
