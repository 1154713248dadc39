// Wire types for /api/v1 responses. The UI renders these verbatim and never
// recomputes clinical values on its own.

export interface TurnFlag {
  dimension: string;
  detail: string;
  suggestion: string;
}

export interface DoctorTurn {
  index: number;
  text: string;
  intent: string;
  entities: string[];
  flags: TurnFlag[];
}

export interface PatientTurn {
  index: number;
  text: string;
}

export interface TurnResponse {
  doctor: DoctorTurn;
  patient: PatientTurn;
}

export interface ReplayTurn {
  index: number;
  speaker: "doctor" | "patient";
  text: string;
  intent: string | null;
  entities: string[];
  flags: TurnFlag[];
}

export interface Replay {
  session_id: string;
  case_id: string;
  mode: string;
  turns: ReplayTurn[];
  missed_topics: string[];
}

export interface ExamAlert {
  item: string;
  flag: string;
  acknowledged: boolean;
}

export interface OrderResponse {
  order_id: string;
  status: "draft" | "confirmed";
  total_cost: number;
  alerts: ExamAlert[];
}

export interface Recommendation {
  code: string;
  name: string;
  cost: number;
  priority: number;
}

export interface PrescriptionLine {
  drug_id: string;
  dose_per_day: number;
  slots: string[];
}

export interface PrescriptionResponse {
  prescription_id: string;
  round: number;
  lines: PrescriptionLine[];
  advisory: string;
}

export interface SafetyFinding {
  kind: string;
  severity: "info" | "caution" | "major" | "contraindicated";
  subjects: string[];
  detail: string;
}

export interface ReviewResponse {
  prescription_id: string;
  verdict: "approved" | "blocked";
  findings: SafetyFinding[];
}

export interface FeedbackItem {
  dimension: string;
  kind: string;
  text: string;
  evidence: Record<string, unknown>;
}

export interface EvaluationResponse {
  session_id: string;
  dims: Record<string, number>;
  composite: number;
  feedback: FeedbackItem[];
  report_count: number;
}

export interface Trend {
  first: number;
  last: number;
  delta_percent: number | null;
}

export interface ProgressResponse {
  user_id: string;
  reports: number;
  trends: Record<string, Trend>;
}

export const DIMENSIONS = [
  "consultation_skills",
  "clinical_thinking",
  "diagnostic_accuracy",
  "medication_rationality",
] as const;
