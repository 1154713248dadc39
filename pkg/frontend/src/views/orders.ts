import { ApiClient } from "../api";
import type { ExamAlert, OrderResponse, Recommendation } from "../types";

interface BasketItem {
  code: string;
  name: string;
  cost: number;
}

/**
 * Exam order basket. The running total is the plain sum of the displayed
 * items; confirm stays disabled while any contraindication alert from the
 * server is unacknowledged.
 */
export class OrderBasket {
  readonly root: HTMLElement;
  private items: BasketItem[] = [];
  private alerts: ExamAlert[] = [];
  private order: OrderResponse | null = null;

  constructor(
    private api: ApiClient,
    private sessionId: string | null,
    doc: Document = document,
  ) {
    this.root = doc.createElement("section");
    this.root.className = "order-basket";
    this.root.innerHTML = `
      <ul class="basket-items"></ul>
      <p class="basket-total">Total: 0</p>
      <ul class="basket-alerts"></ul>
      <button class="confirm" type="button" disabled>Confirm order</button>`;
    this.root.querySelector<HTMLButtonElement>(".confirm")!
      .addEventListener("click", () => void this.confirm());
  }

  addItem(rec: Recommendation): void {
    if (this.items.some((i) => i.code === rec.code)) return;
    this.items.push({ code: rec.code, name: rec.name, cost: rec.cost });
    this.render();
  }

  removeItem(code: string): void {
    this.items = this.items.filter((i) => i.code !== code);
    this.render();
  }

  get total(): number {
    return this.items.reduce((sum, item) => sum + item.cost, 0);
  }

  get confirmEnabled(): boolean {
    return this.items.length > 0 && this.alerts.every((a) => a.acknowledged);
  }

  /** Place the draft order; the server decides which alerts apply. */
  async placeDraft(patientFlags: string[] = []): Promise<OrderResponse> {
    void patientFlags;
    this.order = await this.api.placeOrder(
      this.items.map((i) => i.code), this.sessionId, false);
    this.alerts = this.order.alerts.map((a) => ({ ...a }));
    this.render();
    return this.order;
  }

  acknowledge(item: string, flag: string): void {
    for (const alert of this.alerts) {
      if (alert.item === item && alert.flag === flag) alert.acknowledged = true;
    }
    this.render();
  }

  async confirm(): Promise<OrderResponse | null> {
    if (!this.confirmEnabled) return null;
    this.order = await this.api.placeOrder(
      this.items.map((i) => i.code), this.sessionId, true);
    this.render();
    return this.order;
  }

  private render(): void {
    const doc = this.root.ownerDocument;
    const list = this.root.querySelector(".basket-items")!;
    list.innerHTML = "";
    for (const item of this.items) {
      const li = doc.createElement("li");
      li.textContent = `${item.name} (${item.code}) — ${item.cost}`;
      list.appendChild(li);
    }
    this.root.querySelector(".basket-total")!.textContent = `Total: ${this.total}`;

    const alerts = this.root.querySelector(".basket-alerts")!;
    alerts.innerHTML = "";
    for (const alert of this.alerts) {
      const li = doc.createElement("li");
      li.className = alert.acknowledged ? "alert acked" : "alert open";
      li.textContent = `${alert.item}: contraindication ${alert.flag}`;
      if (!alert.acknowledged) {
        const button = doc.createElement("button");
        button.type = "button";
        button.textContent = "Acknowledge";
        button.addEventListener("click", () => this.acknowledge(alert.item, alert.flag));
        li.appendChild(button);
      }
      alerts.appendChild(li);
    }
    this.root.querySelector<HTMLButtonElement>(".confirm")!.disabled = !this.confirmEnabled;
  }
}
