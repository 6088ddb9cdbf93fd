import { TryOnClient, StyleEntry } from "./api.js";
import { HistoryEntry, REGION_TOGGLES, TryOnSession } from "./session.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) node.append(child);
  return node;
}

function dataUrl(entry: HistoryEntry): string {
  return `data:image/png;base64,${entry.imageBase64}`;
}

class App {
  private readonly client: TryOnClient;
  private readonly session: TryOnSession;

  private status = el("div", { class: "status" });
  private healthBadge = el("span", { class: "badge" }, ["checking..."]);
  private styleStrip = el("div", { class: "styles" });
  private sourcePreview = el("img", { class: "pane-img" }) as HTMLImageElement;
  private resultImg = el("img", { class: "pane-img" }) as HTMLImageElement;
  private revealPane = el("div", { class: "reveal" });
  private divider = el("div", { class: "divider" });
  private historyStrip = el("div", { class: "history" });
  private compareBox = el("div", { class: "compare" });
  private compareSlots: HistoryEntry[] = [];
  private sourceUrl: string | null = null;

  constructor(private readonly rootEl: HTMLElement, baseUrl: string) {
    this.client = new TryOnClient(baseUrl);
    this.session = new TryOnSession(this.client, {
      onResult: (entry) => this.showResult(entry),
      onBlocked: (problems) => this.setStatus(problems.join(" "), "warn"),
      onFailure: (message) => this.setStatus(message, "error"),
      onBusy: (busy) => this.rootEl.classList.toggle("busy", busy),
    });
  }

  async start(): Promise<void> {
    this.render();
    try {
      const health = await this.client.health();
      this.healthBadge.textContent = health.ready
        ? `ready (v${health.version})`
        : "models missing";
      this.healthBadge.classList.add(health.ready ? "ok" : "bad");
    } catch {
      this.healthBadge.textContent = "unreachable";
      this.healthBadge.classList.add("bad");
    }
    await this.refreshStyles();
  }

  private setStatus(text: string, kind: "info" | "warn" | "error" = "info"): void {
    this.status.textContent = text;
    this.status.className = `status ${kind}`;
  }

  private render(): void {
    const sourceInput = el("input", { type: "file", accept: "image/*" }) as HTMLInputElement;
    sourceInput.addEventListener("change", () => {
      const file = sourceInput.files?.[0] ?? null;
      this.session.setSource(file);
      if (this.sourceUrl) URL.revokeObjectURL(this.sourceUrl);
      this.sourceUrl = file ? URL.createObjectURL(file) : null;
      this.sourcePreview.src = this.sourceUrl ?? "";
      this.session.schedule();
    });

    const styleInput = el("input", { type: "file", accept: "image/*" }) as HTMLInputElement;
    styleInput.addEventListener("change", async () => {
      const file = styleInput.files?.[0];
      if (!file) return;
      this.setStatus("Uploading style...");
      try {
        const entry = await this.client.addStyle(file, file.name);
        this.setStatus(`Style "${entry.name}" added.`);
        await this.refreshStyles();
      } catch (err) {
        this.setStatus(err instanceof Error ? err.message : String(err), "error");
      }
      styleInput.value = "";
    });

    const alphaSlider = el("input", {
      type: "range", min: "0", max: "1", step: "0.01", value: "1",
    }) as HTMLInputElement;
    const alphaLabel = el("span", {}, ["1.00"]);
    alphaSlider.addEventListener("input", () => {
      this.session.setAlpha(parseFloat(alphaSlider.value));
      alphaLabel.textContent = this.session.alpha.toFixed(2);
      this.session.schedule();
    });

    const regionBoxes = REGION_TOGGLES.map((name) => {
      const box = el("input", { type: "checkbox" }) as HTMLInputElement;
      box.checked = true;
      box.addEventListener("change", () => {
        this.session.toggleRegion(name);
        this.session.schedule();
      });
      return el("label", { class: "toggle" }, [box, name]);
    });

    const patternBox = el("input", { type: "checkbox" }) as HTMLInputElement;
    patternBox.checked = true;
    patternBox.addEventListener("change", () => {
      this.session.setPattern(patternBox.checked);
      this.session.schedule();
    });

    const colorBox = el("input", { type: "checkbox" }) as HTMLInputElement;
    colorBox.checked = true;
    colorBox.addEventListener("change", () => {
      this.session.setColor(colorBox.checked);
      this.session.schedule();
    });

    const patternFrom = el("select", {}, [
      el("option", { value: "reference" }, ["first style"]),
      el("option", { value: "reference2" }, ["second style"]),
    ]) as HTMLSelectElement;
    patternFrom.addEventListener("change", () => {
      this.session.setPatternSource(patternFrom.value as "reference" | "reference2");
      this.session.schedule();
    });

    // before/after reveal: dragging the divider clips the result pane
    this.revealPane.append(this.resultImg);
    const pane = el("div", { class: "pane" }, [this.sourcePreview, this.revealPane, this.divider]);
    let dragging = false;
    this.divider.addEventListener("pointerdown", (ev) => {
      dragging = true;
      this.divider.setPointerCapture(ev.pointerId);
    });
    this.divider.addEventListener("pointerup", () => {
      dragging = false;
    });
    this.divider.addEventListener("pointermove", (ev) => {
      if (!dragging) return;
      const rect = pane.getBoundingClientRect();
      const frac = Math.min(1, Math.max(0, (ev.clientX - rect.left) / rect.width));
      this.setReveal(frac);
    });

    this.rootEl.append(
      el("header", {}, [el("h1", {}, ["uvmakeup try-on"]), this.healthBadge]),
      el("section", { class: "row" }, [
        el("div", { class: "col" }, [
          el("h2", {}, ["Source"]),
          sourceInput,
        ]),
        el("div", { class: "col" }, [
          el("h2", {}, ["Styles"]),
          styleInput,
          this.styleStrip,
        ]),
      ]),
      el("section", { class: "controls" }, [
        el("label", {}, ["blend ", alphaSlider, alphaLabel]),
        el("div", { class: "toggles" }, [
          ...regionBoxes,
          el("label", { class: "toggle" }, [patternBox, "pattern"]),
          el("label", { class: "toggle" }, [colorBox, "color"]),
          el("label", { class: "toggle" }, ["pattern from ", patternFrom]),
        ]),
      ]),
      this.status,
      pane,
      el("h2", {}, ["History"]),
      this.historyStrip,
      this.compareBox,
    );
    this.setReveal(0.5);
  }

  private setReveal(frac: number): void {
    this.revealPane.style.width = `${(frac * 100).toFixed(1)}%`;
    this.divider.style.left = `${(frac * 100).toFixed(1)}%`;
  }

  private async refreshStyles(): Promise<void> {
    const styles = await this.client.styles().catch(() => [] as StyleEntry[]);
    this.styleStrip.replaceChildren();
    for (const style of styles) {
      const thumb = el("img", {
        src: this.client.styleArtifactUrl(style.id, "thumbnail.png"),
        title: style.name,
        class: "thumb",
      });
      const use = el("button", {}, ["use"]);
      use.addEventListener("click", () => {
        this.session.setStyle(style.id);
        this.setStatus(`Style: ${style.name}`);
        this.session.schedule();
      });
      const mix = el("button", {}, ["mix"]);
      mix.addEventListener("click", () => {
        this.session.setSecondStyle(this.session.styleId2 === style.id ? null : style.id);
        this.setStatus(this.session.styleId2 ? `Mixing in: ${style.name}` : "Mix cleared");
        this.session.schedule();
      });
      this.styleStrip.append(el("div", { class: "style-card" }, [thumb, use, mix]));
    }
  }

  private showResult(entry: HistoryEntry): void {
    this.resultImg.src = dataUrl(entry);
    this.setStatus(`Result ${entry.requestId}`);
    const thumb = el("img", { src: dataUrl(entry), class: "thumb", title: entry.requestId });
    thumb.addEventListener("click", () => this.pickCompare(entry));
    const replay = el("button", {}, ["replay"]);
    replay.addEventListener("click", () => void this.session.replay(entry));
    this.historyStrip.append(el("div", { class: "hist-card" }, [thumb, replay]));
  }

  /** Any two past results can sit side by side for comparison. */
  private pickCompare(entry: HistoryEntry): void {
    this.compareSlots = [...this.compareSlots, entry].slice(-2);
    this.compareBox.replaceChildren(
      ...this.compareSlots.map((slot) =>
        el("figure", {}, [
          el("img", { src: dataUrl(slot), class: "pane-img" }),
          el("figcaption", {}, [`${slot.requestId} (blend ${slot.params.alpha})`]),
        ]),
      ),
    );
  }
}

const root = document.getElementById("app");
if (root) {
  const app = new App(root, window.location.origin);
  void app.start();
}
