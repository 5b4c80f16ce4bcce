/**
 * Browser entry point: wires the fixture picker, the what-if form, and the
 * render pipeline. Falls back to offline demo mode (recorded responses)
 * when the service is unreachable.
 */

import { ApiClient } from "./api";
import { DRAFTS, FIXTURES, LABELS } from "./fixtures";
import {
  renderErrorPanel,
  renderNetworkBanner,
  renderParseView,
  renderRecommendation,
  renderWhatIf,
} from "./render";
import {
  ConsoleState,
  createState,
  submitParse,
  submitRecommend,
  submitWhatIf,
} from "./state";
import type { WhatIfOverrides } from "./types";

const api = new ApiClient("");
const state: ConsoleState = createState(DRAFTS.A1);
let offline = false;

function el(id: string): HTMLElement {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found;
}

function paint(): void {
  el("status").innerHTML = offline
    ? `<div class="banner">offline demo mode: recorded responses</div>`
    : state.networkError
      ? renderNetworkBanner(state.networkError)
      : state.inFlight
        ? `<div class="banner">what-if in flight ...</div>`
        : "";
  el("errors").innerHTML = state.serverError ? renderErrorPanel(state.serverError) : "";
  el("parse").innerHTML = state.parse
    ? renderParseView(state.draft, state.parse, LABELS)
    : "";
  el("recommendation").innerHTML = state.recommend
    ? renderRecommendation(state.recommend, LABELS)
    : "";
  el("whatif").innerHTML = state.whatif ? renderWhatIf(state.whatif, LABELS) : "";
}

function currentOverrides(): WhatIfOverrides {
  const overrides: WhatIfOverrides = { profile: {} };
  const allergy = el("allergy-toggle") as HTMLInputElement;
  if (allergy.checked) overrides.profile!.allergies = ["penicillin_allergy"];
  const weight = (el("weight-override") as HTMLInputElement).value;
  if (weight) overrides.profile!.weight_kg = Number(weight);
  const tau = (el("tau-override") as HTMLInputElement).value;
  if (tau) overrides.tau = Number(tau);
  return overrides;
}

async function refresh(): Promise<void> {
  if (offline) {
    state.parse = FIXTURES.parse_r1;
    state.recommend = FIXTURES.recommend_abscess;
    state.whatif = FIXTURES.whatif_allergy;
    paint();
    return;
  }
  await submitParse(state, api);
  await submitRecommend(state, api);
  paint();
}

async function init(): Promise<void> {
  const health = await api.health();
  offline = !health.ok;

  el("record-select").addEventListener("change", (event) => {
    const id = (event.target as HTMLSelectElement).value;
    state.draft = DRAFTS[id] ?? DRAFTS.A1;
    void refresh();
  });

  el("whatif-submit").addEventListener("click", () => {
    if (offline) {
      state.whatif = FIXTURES.whatif_allergy;
      paint();
      return;
    }
    void submitWhatIf(state, api, currentOverrides()).then(paint);
    paint(); // show the in-flight indicator immediately
  });

  await refresh();
}

if (typeof document !== "undefined") {
  void init();
}
