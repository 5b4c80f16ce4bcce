/**
 * Contract tests against recorded /v1 responses: documented views render,
 * the allergy what-if flips the emitted drug and surfaces the
 * AllergyConflict tag, and no displayed number is absent from the payload.
 */

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { DRAFTS, FIXTURES, LABELS } from "../src/fixtures";
import {
  renderErrorPanel,
  renderParseView,
  renderRecommendation,
  renderWhatIf,
} from "../src/render";
import { createState, submitWhatIf } from "../src/state";
import type { WhatIfResponse } from "../src/types";

// -- helpers ------------------------------------------------------------------

function textContent(html: string): string {
  return html.replace(/<[^>]*>/g, " ");
}

/** numeric tokens in visible text, ignoring digits inside identifiers */
function displayedNumbers(html: string): string[] {
  return textContent(html).match(/(?<![\w#.])-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?/g) ?? [];
}

/** every number reachable in a payload, as its canonical string form */
function payloadNumbers(payload: unknown, out = new Set<string>()): Set<string> {
  if (typeof payload === "number") {
    out.add(String(payload));
  } else if (Array.isArray(payload)) {
    payload.forEach((item) => payloadNumbers(item, out));
  } else if (payload !== null && typeof payload === "object") {
    Object.values(payload).forEach((value) => payloadNumbers(value, out));
  }
  return out;
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

// -- parse view ------------------------------------------------------------------

describe("parse view", () => {
  const html = renderParseView(DRAFTS.R1, FIXTURES.parse_r1, LABELS);

  it("highlights #85 and labels it with the tooth-site name", () => {
    expect(html).toContain('data-node="tooth_85"');
    expect(html).toMatch(/<mark[^>]*>#85<span class="entity-label">primary mandibular right second molar<\/span><\/mark>/);
  });

  it("renders negated mentions visually distinct", () => {
    expect(html).toMatch(/<mark class="mention negated"[^>]*>fever/);
    expect(html).toMatch(/<mark class="mention"[^>]*>Swelling/);
  });

  it("lists diagnosis candidates with their payload scores", () => {
    expect(html).toContain("acute pulpitis");
    expect(html).toContain('<span class="score">1</span>');
    expect(html).toContain('<span class="score">0.5</span>');
  });

  it("shows an explicit empty state when nothing was linked", () => {
    const empty = renderParseView(DRAFTS.N1, FIXTURES.parse_empty, LABELS);
    expect(empty).toContain("no entities found");
    expect(empty).toContain("no diagnosis candidates");
  });
});

// -- recommendation ladder -------------------------------------------------------

describe("candidate ladder", () => {
  it("puts the emitted candidate on top with a Pass badge", () => {
    const html = renderRecommendation(FIXTURES.recommend_abscess, LABELS);
    expect(html).toMatch(/candidate emitted" data-drug="AMX"/);
    expect(html).toContain('<span class="badge pass">Pass</span>');
    expect(html).toContain("s_safety <strong>1</strong> vs tau <strong>0.8</strong>");
  });

  it("renders abstention as a first-class card with the rejected list", () => {
    const html = renderRecommendation(FIXTURES.recommend_abstention, LABELS);
    expect(html).toContain('class="abstention-card"');
    expect(html).toContain("AllCandidatesRejected");
    expect(html).toMatch(/candidate rejected" data-drug="AMX"/);
    expect(html).toMatch(/candidate rejected" data-drug="CLI"/);
    expect(html).toContain("AllergyConflict");
  });
});

// -- what-if -----------------------------------------------------------------------

describe("what-if view", () => {
  const whatif: WhatIfResponse = FIXTURES.whatif_allergy;
  const html = renderWhatIf(whatif, LABELS);

  it("flips the emitted drug when the allergy override is applied", () => {
    expect(whatif.baseline.abstained).toBe(false);
    expect(whatif.modified.abstained).toBe(false);
    if (!whatif.baseline.abstained && !whatif.modified.abstained) {
      expect(whatif.baseline.candidate.drug).toBe("AMX");
      expect(whatif.modified.candidate.drug).toBe("CLI");
    }
    const baselineArm = html.slice(html.indexOf('class="arm baseline"'), html.indexOf('class="arm modified"'));
    const modifiedArm = html.slice(html.indexOf('class="arm modified"'));
    expect(baselineArm).toMatch(/candidate emitted" data-drug="AMX"/);
    expect(modifiedArm).toMatch(/candidate emitted" data-drug="CLI"/);
  });

  it("tags the AMX row with AllergyConflict in the delta table", () => {
    const row = html.slice(html.indexOf('<tr data-drug="AMX">'), html.indexOf('<tr data-drug="CLI">'));
    expect(row).toContain('<span class="violation-tag">AllergyConflict</span>');
  });

  it("renders zero-delta what-ifs as literal zeros", () => {
    const zero = renderWhatIf(FIXTURES.whatif_zero, LABELS);
    const amxRow = zero.slice(zero.indexOf('<tr data-drug="AMX">'), zero.indexOf('<tr data-drug="CLI">'));
    expect(amxRow).toContain("<td>0</td>");
  });
});

// -- number traceability --------------------------------------------------------------

describe("no displayed number is absent from the payload", () => {
  const cases: [string, string, unknown][] = [
    ["recommend", renderRecommendation(FIXTURES.recommend_abscess, LABELS), FIXTURES.recommend_abscess],
    ["abstention", renderRecommendation(FIXTURES.recommend_abstention, LABELS), FIXTURES.recommend_abstention],
    ["whatif", renderWhatIf(FIXTURES.whatif_allergy, LABELS), FIXTURES.whatif_allergy],
    ["whatif-zero", renderWhatIf(FIXTURES.whatif_zero, LABELS), FIXTURES.whatif_zero],
    ["parse", renderParseView(DRAFTS.R1, FIXTURES.parse_r1, LABELS), FIXTURES.parse_r1],
  ];

  it.each(cases)("%s view", (_name, html, payload) => {
    const allowed = payloadNumbers(payload);
    for (const token of displayedNumbers(html)) {
      expect(allowed, `displayed number ${token} not in payload`).toContain(token);
    }
  });
});

// -- error panel -------------------------------------------------------------------------

describe("error panel", () => {
  it("shows the server's field path verbatim", () => {
    const html = renderErrorPanel(FIXTURES.error_422);
    expect(html).toContain("invalid_request");
    expect(html).toContain('<code class="field-path">profile.age_months</code>');
    expect(html).toContain("less than or equal to 216");
  });
});

// -- deterministic rendering ------------------------------------------------------------------

describe("deterministic rendering", () => {
  it("identical payloads produce identical markup", () => {
    expect(renderWhatIf(FIXTURES.whatif_allergy, LABELS)).toBe(
      renderWhatIf(FIXTURES.whatif_allergy, LABELS),
    );
    expect(renderRecommendation(FIXTURES.recommend_abscess, LABELS)).toBe(
      renderRecommendation(FIXTURES.recommend_abscess, LABELS),
    );
    expect(renderParseView(DRAFTS.R1, FIXTURES.parse_r1, LABELS)).toBe(
      renderParseView(DRAFTS.R1, FIXTURES.parse_r1, LABELS),
    );
  });
});

// -- submission flow -----------------------------------------------------------------------------

describe("what-if submission", () => {
  it("discards stale responses: only the latest submission renders", async () => {
    const first = { ...FIXTURES.whatif_zero, record_id: "first" };
    const second = { ...FIXTURES.whatif_allergy, record_id: "second" };
    const resolvers: ((r: Response) => void)[] = [];
    const api = new ApiClient("", () => new Promise((resolve) => resolvers.push(resolve)));
    const state = createState(DRAFTS.A1);

    const p1 = submitWhatIf(state, api, {});
    const p2 = submitWhatIf(state, api, { profile: { allergies: ["penicillin_allergy"] } });
    // resolve the second (latest) submission first, then the stale one
    resolvers[1](jsonResponse(second));
    await p2;
    expect(state.whatif?.record_id).toBe("second");
    resolvers[0](jsonResponse(first));
    await p1;
    expect(state.whatif?.record_id).toBe("second"); // stale response discarded
    expect(state.inFlight).toBe(false);
  });

  it("keeps previous state and raises a banner on network failure", async () => {
    const ok = new ApiClient("", async () => jsonResponse(FIXTURES.whatif_allergy));
    const state = createState(DRAFTS.A1);
    await submitWhatIf(state, ok, {});
    expect(state.whatif).not.toBeNull();

    const down = new ApiClient("", async () => {
      throw new Error("connection refused");
    });
    await submitWhatIf(state, down, {});
    expect(state.networkError).toContain("connection refused");
    expect(state.whatif?.record_id).toBe(FIXTURES.whatif_allergy.record_id); // retained
  });

  it("renders server validation errors without clearing results", async () => {
    const api = new ApiClient("", async () => jsonResponse(FIXTURES.error_422, 422));
    const state = createState(DRAFTS.A1);
    state.whatif = FIXTURES.whatif_zero;
    await submitWhatIf(state, api, { tau: 1.5 as never });
    expect(state.serverError?.code).toBe("invalid_request");
    expect(state.whatif).toBe(FIXTURES.whatif_zero);
  });
});
