/**
 * Pure, deterministic renderers: payload in, HTML string out.
 *
 * Contract: the console performs no safety arithmetic. Every number that
 * appears in rendered text is a server payload value echoed via num();
 * bar widths are presentation-only style attributes.
 */

import type {
  ApiErrorPayload,
  DeltaEntry,
  Findings,
  LabelMap,
  Mention,
  OutcomePayload,
  ParseResponse,
  RecordDraft,
  RejectedEntry,
  SafetyReportPayload,
  SectionName,
  WhatIfResponse,
} from "./types";

const SECTIONS: SectionName[] = ["chief_complaint", "exam_notes", "radiographic_report"];

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Echo a payload number verbatim; never format or round. */
function num(value: number | null): string {
  return value === null ? "-" : String(value);
}

function label(labels: LabelMap, nodeId: string): string {
  return labels[nodeId]?.name ?? nodeId;
}

// -- parse view -------------------------------------------------------------------

function highlightSection(text: string, mentions: Mention[], labels: LabelMap): string {
  const ordered = [...mentions].sort((a, b) => a.start - b.start);
  let cursor = 0;
  let html = "";
  for (const m of ordered) {
    html += escapeHtml(text.slice(cursor, m.start));
    const cls = m.negated ? "mention negated" : "mention";
    html +=
      `<mark class="${cls}" data-node="${escapeHtml(m.node_id)}">` +
      escapeHtml(text.slice(m.start, m.end)) +
      `<span class="entity-label">${escapeHtml(label(labels, m.node_id))}</span></mark>`;
    cursor = m.end;
  }
  return html + escapeHtml(text.slice(cursor));
}

export function renderParseView(
  draft: RecordDraft,
  response: ParseResponse,
  labels: LabelMap,
): string {
  const findings: Findings = response.findings;
  const parts: string[] = [`<section class="parse-view" data-record="${escapeHtml(response.record_id)}">`];
  for (const section of SECTIONS) {
    const text = draft[section];
    if (!text) continue;
    const sectionMentions = findings.mentions.filter((m) => m.section === section);
    parts.push(
      `<div class="record-section"><h4>${escapeHtml(section)}</h4>` +
        `<p>${highlightSection(text, sectionMentions, labels)}</p></div>`,
    );
  }
  if (findings.mentions.length === 0) {
    parts.push(`<p class="empty-state">no entities found</p>`);
  }
  parts.push(`<div class="severity">severity: ${escapeHtml(findings.severity)}</div>`);
  if (findings.diagnosis_candidates.length > 0) {
    parts.push(`<ol class="diagnosis-candidates">`);
    for (const cand of findings.diagnosis_candidates) {
      parts.push(
        `<li><span class="diagnosis">${escapeHtml(label(labels, cand.node_id))}</span>` +
          ` <span class="score">${num(cand.score)}</span></li>`,
      );
    }
    parts.push(`</ol>`);
  } else {
    parts.push(`<p class="empty-state">no diagnosis candidates</p>`);
  }
  parts.push(`</section>`);
  return parts.join("");
}

// -- safety breakdown ----------------------------------------------------------------

function bar(name: string, value: number): string {
  // width is presentation-only; the displayed number is the payload value
  const width = Math.max(0, Math.min(1, value)) * 100;
  return (
    `<div class="subscore" data-name="${name}">` +
    `<span class="subscore-name">${name}</span>` +
    `<span class="bar" style="width:${width}%"></span>` +
    `<span class="subscore-value">${num(value)}</span></div>`
  );
}

export function renderSafetyBreakdown(report: SafetyReportPayload): string {
  return (
    `<div class="safety-breakdown">` +
    bar("s_dose", report.s_dose) +
    bar("s_allergy", report.s_allergy) +
    bar("s_interaction", report.s_interaction) +
    `<div class="weighted-total">s_safety <strong>${num(report.s_safety)}</strong>` +
    ` vs tau <strong>${num(report.weights.tau)}</strong></div>` +
    `</div>`
  );
}

function violationTags(violations: string[]): string {
  if (violations.length === 0) return "";
  return violations
    .map((v) => `<span class="violation-tag">${escapeHtml(v)}</span>`)
    .join("");
}

function rejectedRows(rejected: RejectedEntry[], labels: LabelMap): string {
  return rejected
    .map(
      (entry) =>
        `<li class="candidate rejected" data-drug="${escapeHtml(entry.candidate.drug)}">` +
        `<span class="drug">${escapeHtml(label(labels, entry.candidate.drug))}</span>` +
        violationTags(entry.report.hard_violations) +
        (entry.report.hard_violations.length === 0 && entry.report.verdict
          ? `<span class="violation-tag">${escapeHtml(entry.report.verdict)}</span>`
          : "") +
        renderSafetyBreakdown(entry.report) +
        `</li>`,
    )
    .join("");
}

// -- recommendation / abstention -------------------------------------------------------

export function renderRecommendation(outcome: OutcomePayload, labels: LabelMap): string {
  if (outcome.abstained) {
    return (
      `<section class="abstention-card">` +
      `<h3>No recommendation</h3>` +
      `<p class="reason">${escapeHtml(outcome.reason)}</p>` +
      `<p class="attempts">validations: ${num(outcome.attempts)}</p>` +
      `<ul class="candidate-ladder">${rejectedRows(outcome.rejected, labels)}</ul>` +
      `<p class="summary">${escapeHtml(outcome.summary)}</p>` +
      `</section>`
    );
  }
  const c = outcome.candidate;
  return (
    `<section class="recommendation">` +
    `<ul class="candidate-ladder">` +
    `<li class="candidate emitted" data-drug="${escapeHtml(c.drug)}">` +
    `<span class="drug">${escapeHtml(label(labels, c.drug))}</span>` +
    `<span class="badge pass">${escapeHtml(outcome.report.verdict ?? "")}</span>` +
    `<span class="regimen">${num(c.dose_mg_per_kg_day)} mg/kg/day, ` +
    `${num(c.frequency_per_day)} doses/day, ${num(c.duration_days)} days</span>` +
    renderSafetyBreakdown(outcome.report) +
    `</li>` +
    rejectedRows(outcome.rejected, labels) +
    `</ul>` +
    `<p class="attempts">validations: ${num(outcome.attempts)}</p>` +
    `<p class="summary">${escapeHtml(outcome.summary)}</p>` +
    `</section>`
  );
}

// -- what-if side-by-side -----------------------------------------------------------------

function deltaRow(entry: DeltaEntry): string {
  const cells: string[] = [`<td class="drug">${escapeHtml(entry.drug)}</td>`];
  cells.push(`<td>${entry.baseline ? num(entry.baseline.s_safety) : "-"}</td>`);
  cells.push(`<td>${entry.modified ? num(entry.modified.s_safety) : "-"}</td>`);
  cells.push(`<td>${entry.delta ? num(entry.delta.s_safety) : "-"}</td>`);
  cells.push(
    `<td>${entry.modified ? violationTags(entry.modified.hard_violations) : ""}</td>`,
  );
  return `<tr data-drug="${escapeHtml(entry.drug)}">${cells.join("")}</tr>`;
}

export function renderWhatIf(response: WhatIfResponse, labels: LabelMap): string {
  return (
    `<section class="whatif" data-record="${escapeHtml(response.record_id)}">` +
    `<div class="arms">` +
    `<div class="arm baseline"><h3>baseline</h3>${renderRecommendation(response.baseline, labels)}</div>` +
    `<div class="arm modified"><h3>modified</h3>${renderRecommendation(response.modified, labels)}</div>` +
    `</div>` +
    `<table class="deltas"><thead><tr>` +
    `<th>drug</th><th>s_safety (baseline)</th><th>s_safety (modified)</th>` +
    `<th>delta</th><th>violations</th>` +
    `</tr></thead><tbody>` +
    response.deltas.map(deltaRow).join("") +
    `</tbody></table>` +
    `</section>`
  );
}

// -- errors -----------------------------------------------------------------------------------

export function renderErrorPanel(error: ApiErrorPayload): string {
  const rows = (error.errors ?? [])
    .map(
      (e) =>
        `<li><code class="field-path">${escapeHtml(e.field)}</code> ` +
        `<span class="message">${escapeHtml(e.message)}</span></li>`,
    )
    .join("");
  return (
    `<section class="error-panel">` +
    `<h3>${escapeHtml(error.code)}</h3>` +
    (rows ? `<ul>${rows}</ul>` : "") +
    `</section>`
  );
}

export function renderNetworkBanner(message: string): string {
  return `<div class="banner network-error">server unreachable: ${escapeHtml(message)}</div>`;
}
