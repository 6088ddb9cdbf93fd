import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { ApiError, TransferParams, TransferResponse } from "../src/api.js";
import { DEBOUNCE_MS, TryOnSession } from "../src/session.js";

class Deferred<T> {
  promise: Promise<T>;
  resolve!: (value: T) => void;
  reject!: (err: unknown) => void;
  constructor() {
    this.promise = new Promise((resolve, reject) => {
      this.resolve = resolve;
      this.reject = reject;
    });
  }
}

function response(id: string): TransferResponse {
  return {
    request_id: id,
    image_base64: `img-${id}`,
    params: {},
    metadata: {},
    artifacts: ["output.png"],
    sha256: { "output.png": `sha-${id}` },
  };
}

interface Call {
  params: TransferParams;
  signal?: AbortSignal;
  deferred: Deferred<TransferResponse>;
}

/** Test double: resolves immediately in auto mode, by hand in manual mode. */
class FakePort {
  calls: Call[] = [];
  mode: "auto" | "manual" = "auto";
  honorAbort = true;
  private counter = 0;

  transfer(
    _source: Blob,
    params: TransferParams,
    opts?: { signal?: AbortSignal },
  ): Promise<TransferResponse> {
    const deferred = new Deferred<TransferResponse>();
    this.calls.push({ params: structuredClone(params), signal: opts?.signal, deferred });
    if (this.honorAbort && opts?.signal) {
      opts.signal.addEventListener("abort", () =>
        deferred.reject(new DOMException("aborted", "AbortError")),
      );
    }
    if (this.mode === "auto") deferred.resolve(response(`req-${++this.counter}`));
    return deferred.promise;
  }
}

const PNG = new Blob([new Uint8Array([137, 80, 78, 71])], { type: "image/png" });

function readySession(port: FakePort, events = {}) {
  const session = new TryOnSession(port, events);
  session.setSource(PNG);
  session.setStyle("style-a");
  return session;
}

describe("debounced scheduling", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("coalesces rapid slider input into one request carrying the last value", async () => {
    const port = new FakePort();
    const session = readySession(port);
    session.setAlpha(0.2);
    session.schedule();
    session.setAlpha(0.4);
    session.schedule();
    session.setAlpha(0.9);
    session.schedule();
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS - 1);
    expect(port.calls).toHaveLength(0);
    await vi.advanceTimersByTimeAsync(1);
    expect(port.calls).toHaveLength(1);
    expect(port.calls[0].params.alpha).toBe(0.9);
  });

  it("cancel() drops a pending scheduled submit", async () => {
    const port = new FakePort();
    const session = readySession(port);
    session.schedule();
    session.cancel();
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS * 2);
    expect(port.calls).toHaveLength(0);
  });
});

describe("single in-flight request", () => {
  it("a newer submit aborts the one in flight and wins", async () => {
    const port = new FakePort();
    port.mode = "manual";
    const session = readySession(port);
    session.setAlpha(0.1);
    const first = session.submit();
    session.setAlpha(0.9);
    const second = session.submit();
    expect(port.calls[0].signal?.aborted).toBe(true);
    port.calls[1].deferred.resolve(response("winner"));
    expect(await second).not.toBeNull();
    expect(await first).toBeNull();
    expect(session.history).toHaveLength(1);
    expect(session.history[0].requestId).toBe("winner");
    expect(session.failure).toBeNull();
  });

  it("a stale response that still resolves is dropped", async () => {
    const port = new FakePort();
    port.mode = "manual";
    port.honorAbort = false; // simulate a transport that ignores the abort
    const session = readySession(port);
    const first = session.submit();
    const second = session.submit();
    port.calls[1].deferred.resolve(response("fresh"));
    await second;
    port.calls[0].deferred.resolve(response("stale"));
    expect(await first).toBeNull();
    expect(session.history.map((h) => h.requestId)).toEqual(["fresh"]);
  });
});

describe("client-side validation", () => {
  it("blocks an empty region selection with an inline message, no request sent", async () => {
    const blocked: string[][] = [];
    const port = new FakePort();
    const session = readySession(port, { onBlocked: (p: string[]) => blocked.push(p) });
    session.toggleRegion("lips");
    session.toggleRegion("eyes");
    session.toggleRegion("skin");
    expect(session.regionsParam()).toEqual([]);
    const entry = await session.submit();
    expect(entry).toBeNull();
    expect(port.calls).toHaveLength(0);
    expect(session.problems.some((p) => p.includes("at least one region"))).toBe(true);
    expect(blocked).toHaveLength(1);
  });

  it("blocks submits without a style", async () => {
    const port = new FakePort();
    const session = new TryOnSession(port);
    session.setSource(PNG);
    expect(await session.submit()).toBeNull();
    expect(port.calls).toHaveLength(0);
    expect(session.problems.some((p) => p.includes("style"))).toBe(true);
  });

  it("clamps the alpha slider to [0, 1] and ignores NaN", () => {
    const session = readySession(new FakePort());
    session.setAlpha(3);
    expect(session.alpha).toBe(1);
    session.setAlpha(-2);
    expect(session.alpha).toBe(0);
    session.setAlpha(0.25);
    session.setAlpha(Number.NaN);
    expect(session.alpha).toBe(0.25);
  });

  it("clearing the second style resets a dangling pattern source", () => {
    const session = readySession(new FakePort());
    session.setSecondStyle("style-b");
    session.setPatternSource("reference2");
    session.setSecondStyle(null);
    expect(session.patternSource).toBe("reference");
  });
});

describe("region toggles", () => {
  it("all toggles on collapse to full, subsets stay explicit", () => {
    const session = readySession(new FakePort());
    expect(session.regionsParam()).toEqual(["full"]);
    session.toggleRegion("skin");
    expect(session.regionsParam()).toEqual(["lips", "eyes"]);
    session.toggleRegion("eyes");
    expect(session.regionsParam()).toEqual(["lips"]);
  });
});

describe("history and replay", () => {
  it("stores an isolated parameter snapshot per result", async () => {
    const port = new FakePort();
    const session = readySession(port);
    session.setAlpha(0.5);
    const entry = await session.submit();
    session.setAlpha(0.9);
    session.toggleRegion("lips");
    expect(entry?.params.alpha).toBe(0.5);
    expect(entry?.params.regions).toEqual(["full"]);
  });

  it("replay reissues the stored parameters exactly and appends a new entry", async () => {
    const port = new FakePort();
    const session = readySession(port);
    session.setAlpha(0.3);
    session.toggleRegion("skin");
    const entry = await session.submit();
    session.setAlpha(0.8);
    session.toggleRegion("eyes");
    const again = await session.replay(entry!);
    expect(port.calls).toHaveLength(2);
    expect(port.calls[1].params).toEqual(port.calls[0].params);
    expect(again?.requestId).not.toBe(entry!.requestId);
    expect(session.history).toHaveLength(2);
    expect(session.latest?.params).toEqual(entry!.params);
  });
});

describe("failure reporting", () => {
  it("maps server errors to guidance and leaves history untouched", async () => {
    const failures: string[] = [];
    const port = new FakePort();
    port.mode = "manual";
    const session = readySession(port, {
      onFailure: (message: string) => failures.push(message),
    });
    const pending = session.submit();
    port.calls[0].deferred.reject(new ApiError(422, "geometry", "no face", { input: "source" }));
    expect(await pending).toBeNull();
    expect(session.history).toHaveLength(0);
    expect(session.failure).toContain("No face was detected in the source");
    expect(failures).toHaveLength(1);
  });

  it("a success clears the previous failure", async () => {
    const port = new FakePort();
    port.mode = "manual";
    const session = readySession(port);
    const failing = session.submit();
    port.calls[0].deferred.reject(new ApiError(503, "model", "missing", {}));
    await failing;
    expect(session.failure).not.toBeNull();
    port.mode = "auto";
    await session.submit();
    expect(session.failure).toBeNull();
  });
});
