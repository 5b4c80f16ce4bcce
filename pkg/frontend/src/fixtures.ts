/**
 * Recorded /v1 responses for offline demo mode and contract tests.
 * Captured from a live service running the bundled fixture graph.
 */

import raw from "./fixtures.json";
import type {
  ApiErrorPayload,
  KgNodeSummary,
  LabelMap,
  ParseResponse,
  RecordDraft,
  RecommendResponse,
  WhatIfResponse,
} from "./types";

interface FixtureSet {
  parse_r1: ParseResponse;
  parse_empty: ParseResponse;
  recommend_abscess: RecommendResponse;
  recommend_abstention: RecommendResponse;
  whatif_allergy: WhatIfResponse;
  whatif_zero: WhatIfResponse;
  error_422: ApiErrorPayload;
  kg_nodes: Record<string, KgNodeSummary>;
}

export const FIXTURES = raw as unknown as FixtureSet;

export const LABELS: LabelMap = FIXTURES.kg_nodes;

/** The record drafts the fixture responses were captured against. */
export const DRAFTS: Record<string, RecordDraft> = {
  R1: {
    record_id: "R1",
    chief_complaint: "Swelling near tooth #85 for three days.",
    exam_notes: "Tooth pain on chewing. No fever.",
    profile: { age_months: 60, weight_kg: 20.0 },
  },
  N1: {
    record_id: "N1",
    chief_complaint: "Routine recall visit.",
    profile: { age_months: 60, weight_kg: 20.0 },
  },
  A1: {
    record_id: "A1",
    chief_complaint: "Facial swelling near tooth #85.",
    exam_notes: "Pus discharge and fever. Fistula present.",
    profile: { age_months: 72, weight_kg: 24.0 },
  },
};
