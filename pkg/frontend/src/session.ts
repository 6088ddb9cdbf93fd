import type { PatternSource, TransferParams, TransferResponse } from "./api.js";
import { validateParams } from "./api.js";
import { guidanceFor } from "./guidance.js";

/** Slider input coalesces for this long before a request goes out. */
export const DEBOUNCE_MS = 150;

export const REGION_TOGGLES = ["lips", "eyes", "skin"] as const;
export type RegionToggle = (typeof REGION_TOGGLES)[number];

/** Everything kept per completed transfer; enough to replay it exactly. */
export interface HistoryEntry {
  requestId: string;
  params: TransferParams;
  imageBase64: string;
  sha256: Record<string, string>;
  at: number;
}

export interface SessionEvents {
  onResult?(entry: HistoryEntry): void;
  onBlocked?(problems: string[]): void;
  onFailure?(message: string, err: unknown): void;
  onBusy?(busy: boolean): void;
}

/** The one client capability the session needs; TryOnClient satisfies it. */
export interface TransferPort {
  transfer(
    source: Blob,
    params: TransferParams,
    opts?: { signal?: AbortSignal },
  ): Promise<TransferResponse>;
}

/**
 * Interactive try-on state: one source photo, one or two selected styles,
 * a blend slider, per-region toggles, and the pattern/color switches.
 *
 * Mutators only record state. UI event handlers call schedule(), which
 * debounces and then submits; submit() runs immediately. At most one
 * request is in flight: a newer submit aborts the older one, and a
 * response that arrives after being superseded is dropped. Every result
 * the server returns lands in history with its request id, so any past
 * look can be replayed or compared.
 */
export class TryOnSession {
  source: Blob | null = null;
  styleId: string | null = null;
  styleId2: string | null = null;
  alpha = 1;
  readonly regionOn: Record<RegionToggle, boolean> = { lips: true, eyes: true, skin: true };
  useColor = true;
  usePattern = true;
  patternSource: PatternSource = "reference";
  seed: number | null = null;

  history: HistoryEntry[] = [];
  /** Validation problems from the last blocked submit; empty when clean. */
  problems: string[] = [];
  /** Guidance for the last server/network failure, null after a success. */
  failure: string | null = null;

  private timer: ReturnType<typeof setTimeout> | null = null;
  private inflight: AbortController | null = null;
  private generation = 0;

  constructor(
    private readonly client: TransferPort,
    private readonly events: SessionEvents = {},
  ) {}

  get latest(): HistoryEntry | null {
    return this.history.length > 0 ? this.history[this.history.length - 1] : null;
  }

  setSource(blob: Blob | null): void {
    this.source = blob;
  }

  setStyle(id: string | null): void {
    this.styleId = id;
  }

  setSecondStyle(id: string | null): void {
    this.styleId2 = id;
    // the pattern cannot come from a style that is no longer selected
    if (id === null && this.patternSource === "reference2") this.patternSource = "reference";
  }

  setAlpha(value: number): void {
    if (Number.isNaN(value)) return;
    this.alpha = Math.min(1, Math.max(0, value));
  }

  toggleRegion(name: RegionToggle): void {
    this.regionOn[name] = !this.regionOn[name];
  }

  setColor(on: boolean): void {
    this.useColor = on;
  }

  setPattern(on: boolean): void {
    this.usePattern = on;
  }

  setPatternSource(src: PatternSource): void {
    this.patternSource = src;
  }

  setSeed(seed: number | null): void {
    this.seed = seed;
  }

  /** All three toggles on collapse to "full": the whole face, not just the union. */
  regionsParam(): string[] {
    const on = REGION_TOGGLES.filter((name) => this.regionOn[name]);
    return on.length === REGION_TOGGLES.length ? ["full"] : on;
  }

  snapshotParams(): TransferParams {
    return {
      styleId: this.styleId,
      styleId2: this.styleId2,
      alpha: this.alpha,
      regions: this.regionsParam(),
      useColor: this.useColor,
      usePattern: this.usePattern,
      patternSource: this.patternSource,
      seed: this.seed,
    };
  }

  validate(): string[] {
    return this.validateFor(this.snapshotParams());
  }

  /** Debounced submit for input handlers; rapid calls coalesce into one request. */
  schedule(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.submit();
    }, DEBOUNCE_MS);
  }

  /**
   * Run one transfer with the current settings. Resolves to the stored
   * history entry, or null when validation blocked the request, it was
   * superseded by a newer one, or it failed (see problems / failure).
   */
  submit(): Promise<HistoryEntry | null> {
    return this.run(this.snapshotParams());
  }

  /**
   * Reissue a past request with its stored parameters, unchanged. With
   * the same source photo the server's determinism returns the identical
   * image under a fresh request id.
   */
  replay(entry: HistoryEntry): Promise<HistoryEntry | null> {
    return this.run(structuredClone(entry.params));
  }

  cancel(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.inflight?.abort();
    this.inflight = null;
  }

  private validateFor(params: TransferParams): string[] {
    return validateParams(params, {
      source: this.source !== null,
      reference: params.styleId != null,
      reference2: params.styleId2 != null,
    });
  }

  private async run(params: TransferParams): Promise<HistoryEntry | null> {
    this.problems = this.validateFor(params);
    if (this.problems.length > 0) {
      this.events.onBlocked?.(this.problems);
      return null; // blocked client-side, nothing leaves the browser
    }
    const source = this.source;
    if (source === null) return null; // validateFor already reported this

    this.inflight?.abort(); // newer settings win
    const controller = new AbortController();
    this.inflight = controller;
    const gen = ++this.generation;
    this.events.onBusy?.(true);
    try {
      const res = await this.client.transfer(source, params, { signal: controller.signal });
      if (gen !== this.generation) return null; // superseded while in flight
      const entry: HistoryEntry = {
        requestId: res.request_id,
        params: structuredClone(params),
        imageBase64: res.image_base64,
        sha256: res.sha256,
        at: Date.now(),
      };
      this.history.push(entry);
      this.failure = null;
      this.events.onResult?.(entry);
      return entry;
    } catch (err) {
      if (controller.signal.aborted || gen !== this.generation) return null;
      this.failure = guidanceFor(err);
      this.events.onFailure?.(this.failure, err);
      return null;
    } finally {
      if (this.inflight === controller) {
        this.inflight = null;
        this.events.onBusy?.(false);
      }
    }
  }
}
