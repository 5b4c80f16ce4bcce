/**
 * Thin client for the /v1 endpoints. Every method resolves to a result
 * object instead of throwing, so callers can render server error payloads
 * verbatim and keep prior state on network failure.
 */

import type {
  ApiErrorPayload,
  KgNodeSummary,
  ParseResponse,
  RecordDraft,
  RecommendResponse,
  WhatIfOverrides,
  WhatIfResponse,
} from "./types";

export type ApiResult<T> =
  | { ok: true; data: T }
  | { ok: false; error: ApiErrorPayload; status: number }
  | { ok: false; error: null; status: 0; message: string };

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<ApiResult<T>> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      return { ok: false, error: null, status: 0, message: String(err) };
    }
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      return {
        ok: false,
        error: (body as ApiErrorPayload) ?? { code: "unknown_error" },
        status: response.status,
      };
    }
    return { ok: true, data: body as T };
  }

  private post<T>(path: string, payload: unknown): Promise<ApiResult<T>> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  parse(record: RecordDraft): Promise<ApiResult<ParseResponse>> {
    return this.post("/v1/parse", record);
  }

  recommend(record: RecordDraft): Promise<ApiResult<RecommendResponse>> {
    return this.post("/v1/recommend", record);
  }

  whatif(record: RecordDraft, overrides: WhatIfOverrides): Promise<ApiResult<WhatIfResponse>> {
    return this.post("/v1/whatif", { record, overrides });
  }

  node(id: string): Promise<ApiResult<KgNodeSummary>> {
    return this.request(`/v1/kg/nodes/${encodeURIComponent(id)}`);
  }

  health(): Promise<ApiResult<{ status: string }>> {
    return this.request("/v1/health");
  }
}
