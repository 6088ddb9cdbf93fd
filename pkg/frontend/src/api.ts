/**
 * Typed client for the makeup transfer service REST API.
 *
 * Every call goes through one base URL; errors arrive as the server's
 * {category, message, detail} envelope and are rethrown as ApiError so
 * callers can branch on the category instead of parsing strings.
 */

export type PatternSource = "reference" | "reference2";

/** Region names the server accepts; "full" means the whole face. */
export const REGION_CHOICES = new Set(["lips", "eyes", "skin", "full"]);

export interface HealthReport {
  ready: boolean;
  models: { color: boolean; pattern: boolean };
  geometry: string;
  styles: number;
  version: string;
}

export interface StyleEntry {
  id: string;
  name: string;
  created: string;
  sha256: Record<string, string>;
}

/** One transfer request, client-side view of the server's form fields. */
export interface TransferParams {
  styleId?: string | null;
  styleId2?: string | null;
  alpha: number;
  /** Non-empty list of region names; ["full"] applies everywhere. */
  regions: string[];
  useColor: boolean;
  usePattern: boolean;
  patternSource: PatternSource;
  seed?: number | null;
}

export interface TransferRecord {
  request_id: string;
  params: Record<string, unknown>;
  metadata: Record<string, unknown>;
  artifacts: string[];
  sha256: Record<string, string>;
}

export interface TransferResponse extends TransferRecord {
  image_base64: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly category: string,
    message: string,
    readonly detail: Record<string, unknown> = {},
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function toApiError(res: Response): Promise<ApiError> {
  let body: unknown = null;
  try {
    body = await res.json();
  } catch {
    // non-JSON body, fall through to the generic shape
  }
  if (body && typeof body === "object" && "category" in body) {
    const env = body as { category: string; message?: unknown; detail?: unknown };
    return new ApiError(
      res.status,
      String(env.category),
      String(env.message ?? res.statusText),
      (env.detail ?? {}) as Record<string, unknown>,
    );
  }
  return new ApiError(res.status, "http", `${res.status} ${res.statusText}`);
}

/**
 * Check a parameter set against the same rules the server enforces, so a
 * bad request never leaves the browser. Returns human-readable problems;
 * empty means submittable.
 */
export function validateParams(
  params: TransferParams,
  have: { source: boolean; reference: boolean; reference2: boolean },
): string[] {
  const problems: string[] = [];
  if (!have.source) problems.push("Choose a source photo first.");
  if (!have.reference) problems.push("Pick a style to apply.");
  if (params.regions.length === 0) {
    problems.push("Select at least one region to transfer.");
  }
  for (const region of params.regions) {
    if (!REGION_CHOICES.has(region)) problems.push(`Unknown region "${region}".`);
  }
  if (!(params.alpha >= 0 && params.alpha <= 1)) {
    problems.push("The blend amount must be between 0 and 1.");
  }
  if (params.patternSource === "reference2" && !have.reference2) {
    problems.push("Taking the pattern from the second style requires selecting one.");
  }
  if (params.seed !== undefined && params.seed !== null && !Number.isInteger(params.seed)) {
    problems.push("Seed must be a whole number.");
  }
  return problems;
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class TryOnClient {
  private readonly fetchImpl: FetchLike;

  constructor(readonly baseUrl: string, fetchImpl?: FetchLike) {
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private url(path: string): string {
    return this.baseUrl.replace(/\/+$/, "") + path;
  }

  private async getJson<T>(path: string): Promise<T> {
    const res = await this.fetchImpl(this.url(path));
    if (!res.ok) throw await toApiError(res);
    return (await res.json()) as T;
  }

  health(): Promise<HealthReport> {
    return this.getJson("/api/health");
  }

  async styles(): Promise<StyleEntry[]> {
    const body = await this.getJson<{ styles: StyleEntry[] }>("/api/styles");
    return body.styles;
  }

  /** Upload a reference photo; the server extracts its texture and pattern mask once. */
  async addStyle(image: Blob, name?: string): Promise<StyleEntry> {
    const form = new FormData();
    form.append("image", image, "style.png");
    if (name !== undefined) form.append("name", name);
    const res = await this.fetchImpl(this.url("/api/styles"), { method: "POST", body: form });
    if (!res.ok) throw await toApiError(res);
    return (await res.json()) as StyleEntry;
  }

  styleArtifactUrl(styleId: string, artifact: string): string {
    return this.url(`/api/styles/${styleId}/${artifact}`);
  }

  /**
   * Run one transfer. References come either from stored styles (ids in
   * params) or as raw uploads; the server rejects giving both for a side.
   */
  async transfer(
    source: Blob,
    params: TransferParams,
    opts: { reference?: Blob; reference2?: Blob; signal?: AbortSignal } = {},
  ): Promise<TransferResponse> {
    const form = new FormData();
    form.append("source", source, "source.png");
    if (opts.reference) form.append("reference", opts.reference, "reference.png");
    if (params.styleId) form.append("style_id", params.styleId);
    if (opts.reference2) form.append("reference2", opts.reference2, "reference2.png");
    if (params.styleId2) form.append("style_id2", params.styleId2);
    form.append("alpha", String(params.alpha));
    form.append("regions", params.regions.join(","));
    form.append("use_color", params.useColor ? "true" : "false");
    form.append("use_pattern", params.usePattern ? "true" : "false");
    form.append("pattern_source", params.patternSource);
    if (params.seed !== undefined && params.seed !== null) {
      form.append("seed", String(params.seed));
    }
    const res = await this.fetchImpl(this.url("/api/transfer"), {
      method: "POST",
      body: form,
      signal: opts.signal,
    });
    if (!res.ok) throw await toApiError(res);
    return (await res.json()) as TransferResponse;
  }

  result(requestId: string): Promise<TransferRecord> {
    return this.getJson(`/api/result/${requestId}`);
  }

  resultArtifactUrl(requestId: string, artifact: string): string {
    return this.url(`/api/result/${requestId}/${artifact}`);
  }

  async resultArtifact(requestId: string, artifact: string): Promise<Uint8Array> {
    const res = await this.fetchImpl(this.resultArtifactUrl(requestId, artifact));
    if (!res.ok) throw await toApiError(res);
    return new Uint8Array(await res.arrayBuffer());
  }
}
