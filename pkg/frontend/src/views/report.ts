import { DIMENSIONS } from "../types";
import type { EvaluationResponse, ProgressResponse } from "../types";

/** Four-dimension report card with composite, feedback, and trend deltas. */
export class ReportView {
  readonly root: HTMLElement;

  constructor(
    report: EvaluationResponse,
    progress: ProgressResponse | null = null,
    doc: Document = document,
  ) {
    this.root = doc.createElement("section");
    this.root.className = "report-view";

    const dims = doc.createElement("dl");
    dims.className = "dimensions";
    for (const name of DIMENSIONS) {
      const dt = doc.createElement("dt");
      dt.textContent = name;
      const dd = doc.createElement("dd");
      dd.textContent = report.dims[name].toFixed(1);
      const trend = progress?.trends[name];
      if (trend && trend.delta_percent !== null) {
        const delta = doc.createElement("span");
        delta.className = trend.delta_percent >= 0 ? "delta up" : "delta down";
        delta.textContent = ` (${trend.delta_percent >= 0 ? "+" : ""}${trend.delta_percent.toFixed(1)}%)`;
        dd.appendChild(delta);
      }
      dims.appendChild(dt);
      dims.appendChild(dd);
    }
    this.root.appendChild(dims);

    const composite = doc.createElement("p");
    composite.className = "composite";
    composite.textContent = `Composite: ${report.composite.toFixed(1)}`;
    this.root.appendChild(composite);

    const feedback = doc.createElement("ul");
    feedback.className = "feedback";
    for (const item of report.feedback) {
      const li = doc.createElement("li");
      li.className = `feedback-${item.kind}`;
      li.textContent = `[${item.dimension}] ${item.text}`;
      feedback.appendChild(li);
    }
    this.root.appendChild(feedback);
  }
}
