import { ApiClient } from "../api";
import type { ReviewResponse, SafetyFinding } from "../types";

const BLOCKING = new Set(["major", "contraindicated"]);

/**
 * Prescription builder. Every edit triggers a server-side review; blocking
 * findings render as a banner and disable submit. The browser never decides
 * safety itself — the verdict shown is exactly the verdict received.
 */
export class PrescriptionBuilder {
  readonly root: HTMLElement;
  private review: ReviewResponse | null = null;
  private submitted = false;
  submitCalls = 0;

  constructor(
    private api: ApiClient,
    private prescriptionId: string,
    private patientFlags: string[] = [],
    doc: Document = document,
  ) {
    this.root = doc.createElement("section");
    this.root.className = "prescription-builder";
    this.root.innerHTML = `
      <div class="blocking-banner" hidden></div>
      <ul class="findings"></ul>
      <button class="submit" type="button" disabled>Submit prescription</button>`;
    this.root.querySelector<HTMLButtonElement>(".submit")!
      .addEventListener("click", () => this.submit());
  }

  get blocked(): boolean {
    return this.review !== null && this.review.verdict === "blocked";
  }

  get submitEnabled(): boolean {
    return this.review !== null && this.review.verdict === "approved";
  }

  /** Called after every line edit; re-reviews against the server. */
  async refreshReview(): Promise<ReviewResponse> {
    this.review = await this.api.reviewPrescription(this.prescriptionId, this.patientFlags);
    this.render();
    return this.review;
  }

  /** Test seam: apply an already-received review payload offline. */
  applyReview(review: ReviewResponse): void {
    this.review = review;
    this.render();
  }

  submit(): boolean {
    // The guard runs before any network call, so a blocked draft can never
    // reach the server even if the disabled attribute were bypassed.
    if (!this.submitEnabled) return false;
    this.submitCalls += 1;
    this.submitted = true;
    return true;
  }

  get wasSubmitted(): boolean {
    return this.submitted;
  }

  private render(): void {
    const doc = this.root.ownerDocument;
    const banner = this.root.querySelector<HTMLElement>(".blocking-banner")!;
    const findings = this.review?.findings ?? [];
    const blocking = findings.filter((f: SafetyFinding) => BLOCKING.has(f.severity));
    if (blocking.length > 0) {
      banner.hidden = false;
      banner.textContent = `Prescription blocked: ${blocking
        .map((f) => f.detail)
        .join("; ")}`;
    } else {
      banner.hidden = true;
      banner.textContent = "";
    }

    const list = this.root.querySelector(".findings")!;
    list.innerHTML = "";
    for (const finding of findings) {
      const li = doc.createElement("li");
      li.className = BLOCKING.has(finding.severity)
        ? "finding blocking"
        : "finding advisory-chip";
      li.textContent = `[${finding.severity}] ${finding.detail}`;
      list.appendChild(li);
    }
    this.root.querySelector<HTMLButtonElement>(".submit")!.disabled = !this.submitEnabled;
  }
}
