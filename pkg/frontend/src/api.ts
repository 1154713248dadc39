import type {
  EvaluationResponse,
  OrderResponse,
  PrescriptionResponse,
  ProgressResponse,
  Replay,
  ReviewResponse,
  TurnResponse,
} from "./types";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

let keyCounter = 0;

export function nextIdempotencyKey(): string {
  keyCounter += 1;
  return `ui-${Date.now()}-${keyCounter}`;
}

/**
 * Thin client over /api/v1. Every mutating call carries a bearer token; turn
 * posts also carry an idempotency key so a retry can never duplicate a turn.
 */
export class ApiClient {
  constructor(
    private baseUrl: string,
    private token: string,
    private fetchFn: typeof fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}/api/v1${path}`, {
      method,
      headers: {
        "Content-Type": "application/json",
        Authorization: `Bearer ${this.token}`,
      },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      const detail = await response.text();
      throw new ApiError(response.status, detail || response.statusText);
    }
    return (await response.json()) as T;
  }

  getCase(caseId: string): Promise<Record<string, unknown>> {
    return this.request("GET", `/cases/${caseId}`);
  }

  openSession(caseId: string, mode: string, seed: number): Promise<{ session_id: string }> {
    return this.request("POST", "/sessions", { case_id: caseId, mode, seed });
  }

  postTurn(sessionId: string, text: string, idempotencyKey: string): Promise<TurnResponse> {
    return this.request("POST", `/sessions/${sessionId}/turns`, {
      text,
      idempotency_key: idempotencyKey,
    });
  }

  getReplay(sessionId: string): Promise<Replay> {
    return this.request("GET", `/sessions/${sessionId}/replay`);
  }

  placeOrder(itemCodes: string[], sessionId: string | null, acknowledgeAll: boolean): Promise<OrderResponse> {
    return this.request("POST", "/exams/orders", {
      item_codes: itemCodes,
      session_id: sessionId,
      acknowledge_all: acknowledgeAll,
    });
  }

  createPrescription(dx: string, sessionId: string | null): Promise<PrescriptionResponse> {
    return this.request("POST", "/prescriptions", { dx, session_id: sessionId });
  }

  reviewPrescription(prescriptionId: string, patientFlags: string[]): Promise<ReviewResponse> {
    return this.request("POST", `/prescriptions/${prescriptionId}/review`, {
      patient_flags: patientFlags,
    });
  }

  evaluate(sessionId: string, dxEntered: string, prescriptionId: string, userId: string): Promise<EvaluationResponse> {
    return this.request("POST", `/evaluations/${sessionId}`, {
      dx_entered: dxEntered,
      prescription_id: prescriptionId,
      user_id: userId,
    });
  }

  getProgress(userId: string): Promise<ProgressResponse> {
    return this.request("GET", `/users/${userId}/progress`);
  }
}
