import { ApiError, KspParams, Overrides, RouteCollection } from "./types";

export class RequestFailed extends Error {
  readonly status: number;
  readonly field?: string;

  constructor(status: number, message: string, field?: string) {
    super(message);
    this.status = status;
    this.field = field;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the planning service HTTP API. */
export class PlannerClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(base = "", fetchFn: FetchLike = (...a) => fetch(...a)) {
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  private async parseError(res: Response): Promise<never> {
    let err: ApiError | null = null;
    try {
      err = (await res.json()) as ApiError;
    } catch {
      // non-JSON body: fall through to the status line
    }
    throw new RequestFailed(
      res.status,
      err?.message ?? `request failed with status ${res.status}`,
      err?.field,
    );
  }

  async uploadScenario(scenario: File, grids: File[]): Promise<string> {
    const form = new FormData();
    form.append("scenario", scenario);
    for (const g of grids) form.append(g.name, g, g.name);
    const res = await this.fetchFn(`${this.base}/api/scenario`, {
      method: "POST",
      body: form,
    });
    if (!res.ok) await this.parseError(res);
    const body = (await res.json()) as { scenario_id: string };
    return body.scenario_id;
  }

  async computeRoute(
    scenarioId: string,
    overrides: Overrides,
  ): Promise<RouteCollection> {
    return this.post("/api/route", { scenario_id: scenarioId, overrides });
  }

  async computeKsp(
    scenarioId: string,
    params: KspParams,
    overrides: Overrides,
  ): Promise<RouteCollection> {
    return this.post("/api/ksp", {
      scenario_id: scenarioId,
      ...params,
      overrides,
    });
  }

  rasterUrl(scenarioId: string): string {
    return `${this.base}/api/raster/${scenarioId}.png`;
  }

  private async post(
    path: string,
    body: unknown,
  ): Promise<RouteCollection> {
    const res = await this.fetchFn(`${this.base}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) await this.parseError(res);
    return (await res.json()) as RouteCollection;
  }
}
