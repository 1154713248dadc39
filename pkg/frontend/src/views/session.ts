import { ApiClient, nextIdempotencyKey } from "../api";
import type { TurnFlag, TurnResponse } from "../types";

interface TranscriptEntry {
  speaker: "doctor" | "patient";
  text: string;
  flags: TurnFlag[];
  pending?: boolean;
}

/**
 * The live consultation chat. The composer locks while a patient reply is
 * pending, so turn alternation holds even under rapid clicking; a failed
 * send rolls the optimistic doctor bubble back and shows a retry banner.
 */
export class SessionView {
  readonly root: HTMLElement;
  private transcript: TranscriptEntry[] = [];
  private busy = false;
  private pendingKey: string | null = null;

  constructor(
    private api: ApiClient,
    private sessionId: string,
    private mode: string,
    doc: Document = document,
  ) {
    this.root = doc.createElement("section");
    this.root.className = "session-view";
    this.root.innerHTML = `
      <span class="mode-badge">${mode}</span>
      <ol class="transcript"></ol>
      <div class="error-banner" hidden></div>
      <form class="composer">
        <input name="utterance" type="text" autocomplete="off" />
        <button type="submit">Send</button>
      </form>`;
    const form = this.root.querySelector("form")!;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.send();
    });
  }

  get composerLocked(): boolean {
    return this.busy;
  }

  get turnCount(): number {
    return this.transcript.filter((t) => !t.pending).length;
  }

  async send(): Promise<void> {
    const input = this.root.querySelector<HTMLInputElement>("input[name=utterance]")!;
    const text = input.value.trim();
    if (!text || this.busy) return;

    this.busy = true;
    // Reuse the key across retries of the same utterance; the server then
    // replays its first answer instead of creating a second turn.
    if (this.pendingKey === null) this.pendingKey = nextIdempotencyKey();
    this.setComposerEnabled(false);
    const optimistic: TranscriptEntry = {
      speaker: "doctor",
      text,
      flags: [],
      pending: true,
    };
    this.transcript.push(optimistic);
    this.render();

    let reply: TurnResponse;
    try {
      reply = await this.api.postTurn(this.sessionId, text, this.pendingKey);
    } catch (error) {
      this.transcript.pop();
      this.showError(`Could not send the message. Retry? (${String(error)})`);
      this.busy = false;
      this.setComposerEnabled(true);
      this.render();
      return;
    }

    this.transcript.pop();
    this.transcript.push({
      speaker: "doctor",
      text: reply.doctor.text,
      flags: reply.doctor.flags,
    });
    this.transcript.push({ speaker: "patient", text: reply.patient.text, flags: [] });
    this.pendingKey = null;
    this.busy = false;
    input.value = "";
    this.hideError();
    this.setComposerEnabled(true);
    this.render();
  }

  private setComposerEnabled(enabled: boolean): void {
    const button = this.root.querySelector("button")!;
    const input = this.root.querySelector("input")!;
    button.disabled = !enabled;
    input.disabled = !enabled;
  }

  private showError(message: string): void {
    const banner = this.root.querySelector<HTMLElement>(".error-banner")!;
    banner.textContent = message;
    banner.hidden = false;
  }

  private hideError(): void {
    this.root.querySelector<HTMLElement>(".error-banner")!.hidden = true;
  }

  private render(): void {
    const list = this.root.querySelector(".transcript")!;
    list.innerHTML = "";
    for (const entry of this.transcript) {
      const item = this.root.ownerDocument.createElement("li");
      item.className = `turn turn-${entry.speaker}${entry.pending ? " pending" : ""}`;
      const bubble = this.root.ownerDocument.createElement("p");
      bubble.textContent = entry.text;
      item.appendChild(bubble);
      for (const flag of entry.flags) {
        const chip = this.root.ownerDocument.createElement("span");
        chip.className = `flag flag-${flag.dimension}`;
        chip.textContent = `${flag.dimension}: ${flag.detail}`;
        item.appendChild(chip);
      }
      list.appendChild(item);
    }
  }
}
