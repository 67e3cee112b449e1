/** Query-API client: the dashboard's only data path.
 *
 * Every byte displayed comes from these calls under the user's bearer
 * token; permission rejections surface as PermissionDeniedError so panels
 * can render explicit access-denied placeholders.
 */

import type {
  BoardsDoc,
  CatalogDoc,
  DrilldownResponse,
  SeriesResponse,
  SeriesResult,
} from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

export class PermissionDeniedError extends ApiError {
  constructor(message: string) {
    super(403, message);
    this.name = "PermissionDeniedError";
  }
}

export class AuthRequiredError extends ApiError {
  constructor(message: string) {
    super(401, message);
    this.name = "AuthRequiredError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface SeriesQuery {
  scope: string;
  granularity?: string;
  from?: string;
  to?: string;
}

async function failureMessage(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string };
    return body.detail ?? response.statusText;
  } catch {
    return response.statusText;
  }
}

export class QueryApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
    private readonly fetchFn: FetchLike = (url, init) => globalThis.fetch(url, init),
  ) {}

  private async get(path: string): Promise<Response> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      headers: { Authorization: `Bearer ${this.token}` },
    });
    if (response.status === 401) {
      throw new AuthRequiredError(await failureMessage(response));
    }
    if (response.status === 403) {
      throw new PermissionDeniedError(await failureMessage(response));
    }
    if (!response.ok) {
      throw new ApiError(response.status, await failureMessage(response));
    }
    return response;
  }

  async series(metricId: string, query: SeriesQuery): Promise<SeriesResult> {
    const params = new URLSearchParams({ scope: query.scope });
    params.set("granularity", query.granularity ?? "daily");
    if (query.from) params.set("from", query.from);
    if (query.to) params.set("to", query.to);
    const response = await this.get(`/metrics/${metricId}?${params.toString()}`);
    const body = (await response.json()) as SeriesResponse;
    return {
      body,
      lastUpdated: response.headers.get("X-Last-Updated"),
      cache: response.headers.get("X-Cache"),
    };
  }

  async drilldown(
    metricId: string,
    scope: string,
    windowStart: string,
    granularity = "daily",
  ): Promise<DrilldownResponse> {
    const params = new URLSearchParams({
      scope,
      granularity,
      "window-start": windowStart,
    });
    const response = await this.get(`/metrics/${metricId}/drilldown?${params.toString()}`);
    return (await response.json()) as DrilldownResponse;
  }

  async catalog(): Promise<CatalogDoc> {
    const response = await this.get("/catalog");
    return (await response.json()) as CatalogDoc;
  }

  async boards(): Promise<BoardsDoc> {
    const response = await this.get("/boards");
    return (await response.json()) as BoardsDoc;
  }
}
