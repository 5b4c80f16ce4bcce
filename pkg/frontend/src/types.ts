/**
 * Payload types mirroring the /v1 JSON contracts. The console renders these
 * verbatim: it never recomputes safety math client-side.
 */

export interface ProfileBody {
  age_months: number;
  weight_kg: number;
  allergies?: string[];
  current_medications?: string[];
  comorbidities?: string[];
}

export interface RecordDraft {
  record_id: string;
  chief_complaint?: string;
  exam_notes?: string;
  radiographic_report?: string;
  profile: ProfileBody;
}

export type SectionName = "chief_complaint" | "exam_notes" | "radiographic_report";

export interface Mention {
  section: SectionName;
  start: number;
  end: number;
  surface: string;
  node_id: string;
  negated: boolean;
}

export interface Findings {
  mentions: Mention[];
  diagnosis_candidates: { node_id: string; score: number }[];
  tooth_sites: string[];
  prior_antibiotics: string[];
  severity: string;
}

export interface ParseResponse {
  record_id: string;
  findings: Findings;
  retrieval: {
    subgraph: { node_id: string; score: number }[];
    guideline_hits: { passage_node_id: string; similarity: number }[];
  };
}

export interface SafetyWeightsPayload {
  w_dose: number;
  w_allergy: number;
  w_interaction: number;
  tau: number;
}

export interface SafetyReportPayload {
  s_dose: number;
  s_allergy: number;
  s_interaction: number;
  s_safety: number;
  hard_violations: string[];
  classifier_unsafe_prob: number | null;
  verdict: string | null;
  weights: SafetyWeightsPayload;
}

export interface CandidatePayload {
  drug: string;
  dose_mg_per_kg_day: number;
  frequency_per_day: number;
  duration_days: number;
  rationale: string;
  evidence_node_ids: string[];
}

export interface RejectedEntry {
  candidate: CandidatePayload;
  report: SafetyReportPayload;
}

export interface RecommendationPayload {
  abstained: false;
  candidate: CandidatePayload;
  report: SafetyReportPayload;
  guideline_hits: { passage_node_id: string; similarity: number }[];
  summary: string;
  attempts: number;
  rejected: RejectedEntry[];
}

export interface AbstentionPayload {
  abstained: true;
  reason: string;
  rejected: RejectedEntry[];
  summary: string;
  attempts: number;
}

export type OutcomePayload = RecommendationPayload | AbstentionPayload;

export type RecommendResponse = { record_id: string } & OutcomePayload;

export interface DrugSubScores {
  s_dose: number;
  s_allergy: number;
  s_interaction: number;
  s_safety: number;
  hard_violations: string[];
}

export interface DeltaEntry {
  drug: string;
  baseline: DrugSubScores | null;
  modified: DrugSubScores | null;
  delta: { s_dose: number; s_allergy: number; s_interaction: number; s_safety: number } | null;
}

export interface WhatIfResponse {
  record_id: string;
  baseline: OutcomePayload;
  modified: OutcomePayload;
  deltas: DeltaEntry[];
}

export interface WhatIfOverrides {
  profile?: Partial<ProfileBody>;
  tau?: number;
  weights?: [number, number, number];
  alpha?: number;
}

export interface ApiErrorPayload {
  code: string;
  errors?: { field: string; message: string }[];
  id?: string;
}

export interface KgNodeSummary {
  id: string;
  kind: string;
  name: string;
}

/** node_id -> display name, populated from /v1/kg/nodes responses. */
export type LabelMap = Record<string, KgNodeSummary>;
