/** DOM wiring: search page, event page with seeking transcript, trends page. */

import { ApiClient } from "./api.js";
import { EventCardView, toCard, totalCountLabel } from "./cards.js";
import { chartModel, renderChartSVG } from "./chart.js";
import { currentSentenceIndex, seekOffset } from "./player.js";
import { DEFAULT_STATE, SearchState, buildQueryString, parseQueryState } from "./state.js";
import type { ApiSentence } from "./types.js";

const PAGE_SIZE = 10;

export class App {
  private state: SearchState = { ...DEFAULT_STATE };
  private errors: string[] = [];

  constructor(
    private root: HTMLElement,
    private api: ApiClient = new ApiClient(),
  ) {}

  start(): void {
    window.addEventListener("popstate", () => this.route());
    void this.route();
  }

  private async route(): Promise<void> {
    const hash = window.location.hash;
    const eventMatch = /^#\/event\/([^/]+)/.exec(hash);
    if (eventMatch) {
      await this.renderEventPage(decodeURIComponent(eventMatch[1]));
      return;
    }
    if (hash.startsWith("#/trends")) {
      await this.renderTrendsPage();
      return;
    }
    await this.renderSearchPage();
  }

  private navigate(path: string): void {
    window.history.pushState(null, "", path);
    void this.route();
  }

  // --- search page -------------------------------------------------------

  private async renderSearchPage(): Promise<void> {
    this.state = parseQueryState(window.location.search);
    this.root.innerHTML = `
      <header>
        <h1>Council meeting search</h1>
        <nav><a href="#/trends">n-gram trends</a></nav>
      </header>
      <form id="search-form">
        <input id="q" type="search" placeholder="e.g. missing middle housing"
               value="${escapeHtml(this.state.q)}" aria-label="Search query"/>
        <select id="facet-body" aria-label="Committee filter"></select>
        <input id="facet-from" type="date" value="${this.state.from ?? ""}"/>
        <input id="facet-to" type="date" value="${this.state.to ?? ""}"/>
        <select id="sort" aria-label="Sort order">
          <option value="relevance">Most relevant first</option>
          <option value="date">Most recent first</option>
        </select>
        <button type="submit">Search</button>
      </form>
      <p id="total-count" role="status"></p>
      <div id="results"></div>
      <div id="pager"></div>
      <pre id="console-panel" class="console-panel" hidden></pre>
    `;
    const sortSelect = this.root.querySelector<HTMLSelectElement>("#sort")!;
    sortSelect.value = this.state.sort;

    void this.populateBodyFacet();

    this.root.querySelector<HTMLFormElement>("#search-form")!.addEventListener("submit", (e) => {
      e.preventDefault();
      this.state = {
        ...this.state,
        q: this.root.querySelector<HTMLInputElement>("#q")!.value,
        body: this.root.querySelector<HTMLSelectElement>("#facet-body")!.value || null,
        from: this.root.querySelector<HTMLInputElement>("#facet-from")!.value || null,
        to: this.root.querySelector<HTMLInputElement>("#facet-to")!.value || null,
        sort: sortSelect.value === "date" ? "date" : "relevance",
        offset: 0,
      };
      this.navigate(buildQueryString(this.state) || "?");
    });

    if (this.state.q) {
      await this.runSearch();
    }
  }

  private async populateBodyFacet(): Promise<void> {
    const select = this.root.querySelector<HTMLSelectElement>("#facet-body");
    if (!select) return;
    const bodies = new Set<string>();
    try {
      const listing = await this.api.events({ limit: 100 });
      for (const event of listing.events) bodies.add(event.body.name);
    } catch {
      // facet stays query-only when listing fails
    }
    select.innerHTML =
      `<option value="">All committees</option>` +
      [...bodies]
        .sort()
        .map((b) => `<option value="${escapeHtml(b)}">${escapeHtml(b)}</option>`)
        .join("");
    if (this.state.body) select.value = this.state.body;
  }

  private async runSearch(): Promise<void> {
    const results = this.root.querySelector<HTMLElement>("#results")!;
    const totalLabel = this.root.querySelector<HTMLElement>("#total-count")!;
    let payload;
    try {
      payload = await this.api.search(this.state, PAGE_SIZE);
    } catch (err) {
      this.reportError(String(err));
      return;
    }
    if (payload === null) {
      return; // superseded; never mutate previously rendered results
    }
    totalLabel.textContent = totalCountLabel(payload.total_count);
    results.innerHTML = "";
    for (const raw of payload.results) {
      const card = toCard(raw);
      if (card === null) {
        this.reportError(`malformed search result suppressed: ${JSON.stringify(raw)}`);
        continue;
      }
      results.appendChild(this.cardElement(card));
    }
    this.renderPager(payload.total_count);
  }

  private cardElement(card: EventCardView): HTMLElement {
    const element = document.createElement("article");
    element.className = "event-card";
    const thumb = card.thumbnailRef
      ? `<img class="thumb" src="${escapeHtml(card.thumbnailRef)}" alt=""/>`
      : `<div class="thumb placeholder" aria-hidden="true"></div>`;
    const snippet = card.snippetSpans
      .map((span) =>
        span.highlight
          ? `<mark>${escapeHtml(span.text)}</mark>`
          : escapeHtml(span.text),
      )
      .join("");
    const keywords = card.keywords.length
      ? `<p class="keywords">Keywords: ${card.keywords.map(escapeHtml).join(" • ")}</p>`
      : "";
    element.innerHTML = `
      ${thumb}
      <div class="card-body">
        <p class="date">${escapeHtml(card.dateLabel)}</p>
        <h2><a href="#/event/${encodeURIComponent(card.eventId)}">${escapeHtml(card.committeeName)}</a></h2>
        ${snippet ? `<p class="snippet">“${snippet}”</p>` : ""}
        ${keywords}
      </div>
    `;
    return element;
  }

  private renderPager(total: number): void {
    const pager = this.root.querySelector<HTMLElement>("#pager")!;
    pager.innerHTML = "";
    const makeButton = (label: string, offset: number, enabled: boolean) => {
      const button = document.createElement("button");
      button.textContent = label;
      button.disabled = !enabled;
      button.addEventListener("click", () => {
        this.state = { ...this.state, offset };
        this.navigate(buildQueryString(this.state));
      });
      pager.appendChild(button);
    };
    makeButton("← newer", Math.max(0, this.state.offset - PAGE_SIZE), this.state.offset > 0);
    makeButton("older →", this.state.offset + PAGE_SIZE, this.state.offset + PAGE_SIZE < total);
  }

  private reportError(message: string): void {
    this.errors.push(message);
    const panel = this.root.querySelector<HTMLElement>("#console-panel");
    if (panel) {
      panel.hidden = false;
      panel.textContent = this.errors.join("\n");
    }
  }

  // --- event page -------------------------------------------------------------

  private async renderEventPage(eventId: string): Promise<void> {
    let event, transcript, minutes;
    try {
      [event, transcript, minutes] = await Promise.all([
        this.api.event(eventId),
        this.api.transcript(eventId).catch(() => null),
        this.api.minutes(eventId).catch(() => null),
      ]);
    } catch (err) {
      this.root.innerHTML = `<p class="error">Event not found.</p><p><a href="?">Back to search</a></p>`;
      return;
    }
    this.root.innerHTML = `
      <header>
        <a href="?">← search</a>
        <h1>${escapeHtml(event.body.name)}</h1>
        <p class="date">${escapeHtml(event.session_datetime)}</p>
      </header>
      <video id="player" controls preload="none" src="${escapeHtml(event.video_uri)}"></video>
      <section id="transcript"><h2>Transcript</h2><ol class="sentences"></ol></section>
      <section id="minutes"><h2>Minutes</h2></section>
    `;
    const player = this.root.querySelector<HTMLVideoElement>("#player")!;
    const list = this.root.querySelector<HTMLOListElement>(".sentences")!;
    const sentences: ApiSentence[] = transcript?.sentences ?? [];
    for (const sentence of sentences) {
      const item = document.createElement("li");
      item.dataset.index = String(sentence.index);
      const speaker = sentence.speaker_name ? `<b>${escapeHtml(sentence.speaker_name)}:</b> ` : "";
      item.innerHTML = `<button class="seek" data-start="${sentence.start_time}">▶ ${formatClock(sentence.start_time)}</button> ${speaker}${escapeHtml(sentence.text)}`;
      item.querySelector("button")!.addEventListener("click", () => {
        player.currentTime = seekOffset(sentence);
        void player.play();
      });
      list.appendChild(item);
    }
    player.addEventListener("timeupdate", () => {
      const active = currentSentenceIndex(sentences, player.currentTime);
      list.querySelectorAll("li").forEach((item) => {
        item.classList.toggle("active", Number(item.dataset.index) === active);
      });
    });

    const minutesSection = this.root.querySelector<HTMLElement>("#minutes")!;
    if (minutes && minutes.minutes_items.length > 0) {
      const rows = minutes.minutes_items
        .map((item) => {
          const votes = item.votes
            .map((v) => `${escapeHtml(v.person_name)}: ${escapeHtml(v.decision)}`)
            .join(", ");
          return `<li>${escapeHtml(item.name)}${item.decision ? ` — <i>${escapeHtml(item.decision)}</i>` : ""}${votes ? `<br/><small>${votes}</small>` : ""}</li>`;
        })
        .join("");
      minutesSection.innerHTML = `<h2>Minutes</h2><ol>${rows}</ol>`;
    } else {
      minutesSection.innerHTML = `<h2>Minutes</h2><p>No minutes recorded.</p>`;
    }
  }

  // --- trends page ----------------------------------------------------------------

  private async renderTrendsPage(): Promise<void> {
    this.root.innerHTML = `
      <header>
        <a href="?">← search</a>
        <h1>N-gram usage trends</h1>
      </header>
      <form id="trends-form">
        <input id="grams" placeholder="grams, comma-separated" value="housing, police"/>
        <input id="trend-from" type="date" value="2021-01-01"/>
        <input id="trend-to" type="date" value="2022-03-31"/>
        <label><input id="facet-mode" type="checkbox"/> facet grid</label>
        <label><input id="pool-mode" type="checkbox"/> pool instances</label>
        <button type="submit">Plot</button>
      </form>
      <div id="chart"><p class="empty">Pick grams and press Plot.</p></div>
    `;
    this.root.querySelector<HTMLFormElement>("#trends-form")!.addEventListener("submit", (e) => {
      e.preventDefault();
      void this.drawChart();
    });
  }

  private async drawChart(): Promise<void> {
    const grams = this.root
      .querySelector<HTMLInputElement>("#grams")!
      .value.split(",")
      .map((g) => g.trim())
      .filter(Boolean);
    const from = this.root.querySelector<HTMLInputElement>("#trend-from")!.value;
    const to = this.root.querySelector<HTMLInputElement>("#trend-to")!.value;
    const facet = this.root.querySelector<HTMLInputElement>("#facet-mode")!.checked;
    const pool = this.root.querySelector<HTMLInputElement>("#pool-mode")!.checked;
    const container = this.root.querySelector<HTMLElement>("#chart")!;
    if (grams.length === 0 || !from || !to) {
      container.innerHTML = `<p class="empty">Pick grams and a date range.</p>`;
      return;
    }
    let payload;
    try {
      payload = await this.api.ngrams({ grams, from, to, pool });
    } catch (err) {
      container.innerHTML = `<p class="error">${escapeHtml(String(err))}</p>`;
      return;
    }
    const model = chartModel(payload.series, facet);
    if (model.mode === "empty") {
      container.innerHTML = `<p class="empty">No usage data for that query.</p>`;
      return;
    }
    container.innerHTML = renderChartSVG(model);
  }
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function formatClock(seconds: number): string {
  const total = Math.floor(seconds);
  const h = Math.floor(total / 3600);
  const m = Math.floor((total % 3600) / 60);
  const s = total % 60;
  const mm = String(m).padStart(2, "0");
  const ss = String(s).padStart(2, "0");
  return h > 0 ? `${h}:${mm}:${ss}` : `${m}:${ss}`;
}
