// Offline rendering tests: every view is driven purely from recorded API
// payloads, with no client constructed and no fetch available.

import { describe, expect, it } from "vitest";

import { ReplayView, NotFoundView } from "../src/views/replay";
import { ReportView } from "../src/views/report";
import { PrescriptionBuilder } from "../src/views/prescription";
import { DIMENSIONS } from "../src/types";
import type { Replay, EvaluationResponse, ProgressResponse, ReviewResponse } from "../src/types";

import replayFixture from "./fixtures/replay.json";
import evaluationFixture from "./fixtures/evaluation.json";
import progressFixture from "./fixtures/progress.json";
import reviewApproved from "./fixtures/review_approved.json";
import reviewBlocked from "./fixtures/review_blocked.json";

const replay = replayFixture as Replay;
const evaluation = evaluationFixture as EvaluationResponse;
const progress = progressFixture as ProgressResponse;

describe("ReplayView", () => {
  it("renders every recorded turn in order", () => {
    const view = new ReplayView(replay, document);
    const items = view.root.querySelectorAll(".replay-turns > li");
    expect(items.length).toBe(replay.turns.length);
    replay.turns.forEach((turn, i) => {
      expect(items[i].querySelector("p")!.textContent).toBe(turn.text);
      expect(items[i].className).toContain(`turn-${turn.speaker}`);
    });
  });

  it("annotates each doctor turn with its recognized intent", () => {
    const view = new ReplayView(replay, document);
    const items = view.root.querySelectorAll(".replay-turns > li");
    replay.turns.forEach((turn, i) => {
      const badge = items[i].querySelector(".intent-annotation");
      if (turn.intent) {
        expect(badge).not.toBeNull();
        expect(badge!.textContent).toBe(turn.intent);
      } else {
        expect(badge).toBeNull();
      }
    });
    const annotated = view.root.querySelectorAll(".intent-annotation");
    expect(annotated.length).toBe(replay.turns.filter((t) => t.intent).length);
    expect(annotated.length).toBeGreaterThan(0);
  });

  it("renders review flags as chips on the flagged turn", () => {
    const flagged = replay.turns.filter((t) => t.flags.length > 0);
    const view = new ReplayView(replay, document);
    const chips = view.root.querySelectorAll(".replay-turns .flag");
    const expected = flagged.reduce((n, t) => n + t.flags.length, 0);
    expect(chips.length).toBe(expected);
  });

  it("lists every missed topic", () => {
    const view = new ReplayView(replay, document);
    const topics = [...view.root.querySelectorAll(".missed-topics > li")].map(
      (li) => li.textContent,
    );
    expect(topics).toEqual(replay.missed_topics);
  });

  it("shows a not-found message for a dead deep link", () => {
    const view = new NotFoundView("sess-ghost", document);
    expect(view.root.textContent).toContain("sess-ghost");
  });
});

describe("ReportView", () => {
  it("shows exactly the four known dimensions with one-decimal scores", () => {
    const view = new ReportView(evaluation, null, document);
    const names = [...view.root.querySelectorAll("dt")].map((dt) => dt.textContent);
    expect(names).toEqual([...DIMENSIONS]);
    const scores = [...view.root.querySelectorAll("dd")].map((dd) => dd.textContent);
    DIMENSIONS.forEach((dim, i) => {
      expect(scores[i]).toBe(evaluation.dims[dim].toFixed(1));
    });
  });

  it("shows the composite and the feedback items", () => {
    const view = new ReportView(evaluation, progress, document);
    expect(view.root.querySelector(".composite")!.textContent).toBe(
      `Composite: ${evaluation.composite.toFixed(1)}`,
    );
    const feedback = view.root.querySelectorAll(".feedback > li");
    expect(feedback.length).toBe(evaluation.feedback.length);
    expect(feedback[0].textContent).toContain(evaluation.feedback[0].text);
  });

  it("hides deltas on a first report and shows them once a trend exists", () => {
    const first = new ReportView(evaluation, progress, document);
    expect(first.root.querySelectorAll(".delta").length).toBe(0);

    const trending: ProgressResponse = JSON.parse(JSON.stringify(progress));
    trending.trends.consultation_skills.delta_percent = 12.5;
    trending.trends.clinical_thinking.delta_percent = -3.0;
    const later = new ReportView(evaluation, trending, document);
    const deltas = [...later.root.querySelectorAll(".delta")].map((d) => d.textContent);
    expect(deltas).toEqual([" (+12.5%)", " (-3.0%)"]);
    expect(later.root.querySelector(".delta.down")).not.toBeNull();
  });
});

describe("PrescriptionBuilder offline review rendering", () => {
  const builder = () =>
    new PrescriptionBuilder(null as never, "rx-0001", [], document);

  it("starts with submit disabled until a review arrives", () => {
    const view = builder();
    expect(view.submitEnabled).toBe(false);
    expect(view.root.querySelector<HTMLButtonElement>(".submit")!.disabled).toBe(true);
  });

  it("an approved review enables submit and shows no banner", () => {
    const view = builder();
    view.applyReview(reviewApproved as ReviewResponse);
    expect(view.blocked).toBe(false);
    expect(view.submitEnabled).toBe(true);
    expect(view.root.querySelector<HTMLElement>(".blocking-banner")!.hidden).toBe(true);
  });

  it("a blocking finding shows the banner and disables submit", () => {
    const view = builder();
    view.applyReview(reviewBlocked as ReviewResponse);
    expect(view.blocked).toBe(true);
    expect(view.submitEnabled).toBe(false);
    const banner = view.root.querySelector<HTMLElement>(".blocking-banner")!;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("maoi_therapy");
    expect(view.root.querySelector<HTMLButtonElement>(".submit")!.disabled).toBe(true);
  });

  it("advisory findings render as chips, not blockers", () => {
    const view = builder();
    view.applyReview({
      prescription_id: "rx-0001",
      verdict: "approved",
      findings: [
        {
          kind: "timing",
          severity: "caution",
          subjects: ["sertraline", "escitalopram"],
          detail: "Both lines are scheduled with food",
        },
      ],
    });
    expect(view.root.querySelectorAll(".advisory-chip").length).toBe(1);
    expect(view.root.querySelectorAll(".finding.blocking").length).toBe(0);
    expect(view.root.querySelector<HTMLElement>(".blocking-banner")!.hidden).toBe(true);
    expect(view.submitEnabled).toBe(true);
  });
});
