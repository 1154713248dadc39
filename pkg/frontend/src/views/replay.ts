import type { Replay } from "../types";

/** Annotated transcript for a closed session, plus the missed-topic recap. */
export class ReplayView {
  readonly root: HTMLElement;

  constructor(replay: Replay, doc: Document = document) {
    this.root = doc.createElement("section");
    this.root.className = "replay-view";

    const heading = doc.createElement("h2");
    heading.textContent = `Replay ${replay.session_id} (${replay.mode})`;
    this.root.appendChild(heading);

    const list = doc.createElement("ol");
    list.className = "replay-turns";
    for (const turn of replay.turns) {
      const li = doc.createElement("li");
      li.className = `turn turn-${turn.speaker}`;
      const text = doc.createElement("p");
      text.textContent = turn.text;
      li.appendChild(text);
      if (turn.intent) {
        const intent = doc.createElement("span");
        intent.className = "intent-annotation";
        intent.textContent = turn.intent;
        li.appendChild(intent);
      }
      for (const flag of turn.flags) {
        const chip = doc.createElement("span");
        chip.className = `flag flag-${flag.dimension}`;
        chip.textContent = flag.detail;
        li.appendChild(chip);
      }
      list.appendChild(li);
    }
    this.root.appendChild(list);

    const missed = doc.createElement("ul");
    missed.className = "missed-topics";
    for (const topic of replay.missed_topics) {
      const li = doc.createElement("li");
      li.textContent = topic;
      missed.appendChild(li);
    }
    this.root.appendChild(missed);
  }
}

/** Shown when a replay deep link points at a session the server rejects. */
export class NotFoundView {
  readonly root: HTMLElement;

  constructor(sessionId: string, doc: Document = document) {
    this.root = doc.createElement("section");
    this.root.className = "not-found";
    this.root.textContent = `No session '${sessionId}' was found.`;
  }
}
