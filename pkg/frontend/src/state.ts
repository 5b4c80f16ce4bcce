/**
 * Console state and the what-if submission flow.
 *
 * Invariants:
 *  - rendered numbers always come from the most recent server response;
 *  - at most one in-flight what-if is honored: responses that were
 *    superseded by a newer submission are discarded (latest wins);
 *  - network failure keeps the previous state and raises an error banner.
 */

import type { ApiClient } from "./api";
import type {
  ApiErrorPayload,
  ParseResponse,
  RecordDraft,
  RecommendResponse,
  WhatIfOverrides,
  WhatIfResponse,
} from "./types";

export interface ConsoleState {
  draft: RecordDraft;
  selectedFixtureId: string | null;
  parse: ParseResponse | null;
  recommend: RecommendResponse | null;
  whatif: WhatIfResponse | null;
  pendingOverrides: WhatIfOverrides;
  serverError: ApiErrorPayload | null;
  networkError: string | null;
  inFlight: boolean;
  /** monotone id of the newest submission; only its response is rendered */
  latestSubmission: number;
}

export function createState(draft: RecordDraft): ConsoleState {
  return {
    draft,
    selectedFixtureId: null,
    parse: null,
    recommend: null,
    whatif: null,
    pendingOverrides: {},
    serverError: null,
    networkError: null,
    inFlight: false,
    latestSubmission: 0,
  };
}

/**
 * Submit the pending overrides. Resolves after the state settles; stale
 * responses (a newer submission started meanwhile) leave the state alone.
 */
export async function submitWhatIf(
  state: ConsoleState,
  api: ApiClient,
  overrides: WhatIfOverrides,
): Promise<void> {
  const submission = ++state.latestSubmission;
  state.pendingOverrides = overrides;
  state.inFlight = true;
  const result = await api.whatif(state.draft, overrides);
  if (submission !== state.latestSubmission) {
    return; // superseded while in flight; discard
  }
  state.inFlight = false;
  if (result.ok) {
    state.whatif = result.data;
    state.serverError = null;
    state.networkError = null;
  } else if (result.error !== null) {
    state.serverError = result.error; // previous whatif view retained
  } else {
    state.networkError = result.message;
  }
}

export async function submitParse(state: ConsoleState, api: ApiClient): Promise<void> {
  const result = await api.parse(state.draft);
  if (result.ok) {
    state.parse = result.data;
    state.serverError = null;
    state.networkError = null;
  } else if (result.error !== null) {
    state.serverError = result.error;
  } else {
    state.networkError = result.message;
  }
}

export async function submitRecommend(state: ConsoleState, api: ApiClient): Promise<void> {
  const result = await api.recommend(state.draft);
  if (result.ok) {
    state.recommend = result.data;
    state.serverError = null;
    state.networkError = null;
  } else if (result.error !== null) {
    state.serverError = result.error;
  } else {
    state.networkError = result.message;
  }
}
