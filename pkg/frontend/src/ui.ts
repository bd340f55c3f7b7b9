import { CalibSession, UiSessionView } from "./session.js";

// Renders one session into the static skeleton in index.html. The passage
// grows as a single flowing paragraph; measured speeds stay hidden unless
// the page was loaded with debug=1, and even then only surface at a pause.

const STATUS_LABELS: Record<string, string> = {
    connecting: "Connecting...",
    streaming: "Reading",
    paused: "How was that pace?",
    done: "Calibration finished",
    error: "Something went wrong",
};

export class SessionRenderer {
    private status = document.getElementById("status") as HTMLElement;
    private passage = document.getElementById("passage") as HTMLElement;
    private controls = document.getElementById("controls") as HTMLElement;
    private banner = document.getElementById("banner") as HTMLElement;
    private result = document.getElementById("result") as HTMLElement;
    private speedLabel = document.getElementById("speed") as HTMLElement;

    constructor(private session: CalibSession, private debug: boolean) {
        session.onChange = (view) => this.render(view);
        for (const btn of Array.from(this.controls.querySelectorAll("button"))) {
            btn.addEventListener("click", () => {
                this.session.submitChoice(btn.dataset.choice as any);
            });
        }
        this.render(session.view);
    }

    render(view: UiSessionView): void {
        this.status.textContent = STATUS_LABELS[view.state];
        this.passage.textContent = view.text;

        for (const btn of Array.from(this.controls.querySelectorAll("button"))) {
            const choice = btn.dataset.choice as string;
            const offered = view.pauseOptions.includes(choice as any);
            btn.disabled = !view.buttonsEnabled || !offered;
            // "same" is a late arrival: keep it out of the page entirely
            // until the server puts it on the table.
            if (choice === "same") {
                btn.style.display = offered ? "" : "none";
            }
        }

        if (view.state === "error") {
            this.banner.textContent = view.errorMessage ?? "unknown error";
            this.banner.style.display = "";
        } else {
            this.banner.style.display = "none";
        }

        if (view.state === "done" && view.finalWps !== null) {
            this.result.innerHTML = "";
            const p = document.createElement("p");
            p.textContent = `Your comfortable pace: ${view.finalWps.toFixed(2)} words per second.`;
            this.result.appendChild(p);
            this.result.appendChild(this.transcriptLink());
            this.result.style.display = "";
        } else {
            this.result.style.display = "none";
        }

        if (this.debug && view.state === "paused" && view.speedWps !== null) {
            this.speedLabel.textContent = `current pace ${view.speedWps.toFixed(2)} wps`;
            this.speedLabel.style.display = "";
        } else {
            this.speedLabel.style.display = "none";
        }
    }

    private transcriptLink(): HTMLAnchorElement {
        const blob = new Blob([this.session.transcriptJson()], { type: "application/json" });
        const a = document.createElement("a");
        a.href = URL.createObjectURL(blob);
        a.download = "calib-transcript.json";
        a.textContent = "download transcript";
        return a;
    }
}
