import { ApiClient, ApiError } from "./api";
import { OrderBasket } from "./views/orders";
import { PrescriptionBuilder } from "./views/prescription";
import { NotFoundView, ReplayView } from "./views/replay";
import { ReportView } from "./views/report";
import { SessionView } from "./views/session";

// Minimal app shell: log in, open a session in the chosen mode, and mount
// the chat. The other views mount as the resident moves through the loop.

async function boot() {
  const params = new URLSearchParams(window.location.search);
  const baseUrl = params.get("api") ?? "";
  const caseId = params.get("case");
  const mode = params.get("mode") ?? "standard";
  const mount = document.getElementById("app");
  if (!mount) return;

  const loginResponse = await fetch(`${baseUrl}/api/v1/auth/login`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({
      login: params.get("login") ?? "trainee",
      credential: params.get("credential") ?? "",
    }),
  });
  if (!loginResponse.ok) {
    mount.textContent = "Login failed.";
    return;
  }
  const { token } = (await loginResponse.json()) as { token: string };
  const api = new ApiClient(baseUrl, token);

  const replayId = params.get("replay");
  if (replayId) {
    try {
      const replay = await api.getReplay(replayId);
      mount.appendChild(new ReplayView(replay).root);
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) {
        mount.appendChild(new NotFoundView(replayId).root);
      } else {
        throw error;
      }
    }
    return;
  }

  if (!caseId) {
    mount.textContent = "Pass ?case=<id> to start a consultation.";
    return;
  }
  const { session_id } = await api.openSession(caseId, mode, 0);
  mount.appendChild(new SessionView(api, session_id, mode).root);
  mount.appendChild(new OrderBasket(api, session_id).root);
}

void boot();

export { ApiClient, OrderBasket, PrescriptionBuilder, ReplayView, ReportView, SessionView };
