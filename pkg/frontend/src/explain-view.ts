/** The tabbed explanation window.
 *
 * Thin-client rule: every number and string shown comes verbatim from the
 * served PageContent; this module performs no arithmetic. Tabs are the
 * three why-pages; how-pages are reachable only through the transitions
 * the server lists. Page dwell is the visible interval, paused while the
 * window lacks focus, and is reported when a page closes or is replaced.
 */
import type { PageContent, PageName } from "./types.js";
import { TAB_PAGES } from "./types.js";

const TAB_TITLES: Record<string, string> = {
  WhyHint: "Why am I delivered this hint?",
  WhyLow: "Why am I predicted to be lower learning?",
  WhyRules: "Why are the rules used for classification?",
};

const CHILD_BUTTON_LABELS: Partial<Record<PageName, string>> = {
  HowScore: "How was my score for each group computed?",
  HowHint: "How was my hint chosen?",
  HowRank: "How was my hint's rank calculated?",
};

export class DwellTimer {
  private openedAt: number | null = null;
  private accumulated = 0;

  constructor(private now: () => number = () => Date.now()) {}

  start(): void {
    this.accumulated = 0;
    this.openedAt = this.now();
  }

  pause(): void {
    if (this.openedAt !== null) {
      this.accumulated += this.now() - this.openedAt;
      this.openedAt = null;
    }
  }

  resume(): void {
    if (this.openedAt === null) {
      this.openedAt = this.now();
    }
  }

  /** Total visible milliseconds; stops the clock. */
  stop(): number {
    this.pause();
    const total = this.accumulated;
    this.accumulated = 0;
    return total;
  }
}

export interface ExplainCallbacks {
  fetchPage: (page: PageName) => Promise<PageContent>;
  pageClosed: (page: PageName, dwellMs: number) => void;
  feedback: (page: PageName) => void;
}

export class ExplanationWindow {
  private current: PageContent | null = null;
  private timer: DwellTimer;

  constructor(private root: HTMLElement, private callbacks: ExplainCallbacks,
              now?: () => number) {
    this.timer = new DwellTimer(now);
    window.addEventListener("blur", () => this.timer.pause());
    window.addEventListener("focus", () => this.timer.resume());
  }

  async open(page: PageName = "WhyHint"): Promise<void> {
    await this.show(page);
    this.root.classList.add("open");
  }

  async show(page: PageName): Promise<void> {
    const content = await this.callbacks.fetchPage(page);
    this.reportCurrent();
    this.current = content;
    this.timer.start();
    this.render(content);
  }

  close(): void {
    this.reportCurrent();
    this.current = null;
    this.root.classList.remove("open");
    this.root.replaceChildren();
  }

  private reportCurrent(): void {
    if (this.current !== null) {
      this.callbacks.pageClosed(this.current.page, this.timer.stop());
    }
  }

  private render(content: PageContent): void {
    this.root.replaceChildren();

    const tabs = document.createElement("nav");
    tabs.className = "explain-tabs";
    for (const tab of TAB_PAGES) {
      const button = document.createElement("button");
      button.className = "tab" + (content.page === tab ? " active" : "");
      button.dataset.page = tab;
      button.textContent = TAB_TITLES[tab];
      // The active tab is not a transition; every other tab always is.
      if (tab !== content.page) {
        button.addEventListener("click", () => void this.show(tab));
      } else {
        button.disabled = true;
      }
      tabs.appendChild(button);
    }
    this.root.appendChild(tabs);

    const body = document.createElement("section");
    body.className = "explain-body";
    const heading = document.createElement("h2");
    heading.textContent = content.title;
    body.appendChild(heading);

    for (const block of content.blocks) {
      body.appendChild(this.renderBlock(block));
    }
    this.root.appendChild(body);

    const footer = document.createElement("footer");
    footer.className = "explain-footer";
    if (content.back !== null) {
      const back = document.createElement("button");
      back.className = "back";
      back.dataset.page = content.back;
      back.textContent = "back";
      const target = content.back;
      back.addEventListener("click", () => void this.show(target));
      footer.appendChild(back);
    }
    for (const target of content.transitions) {
      // Non-tab transitions (the how-pages) surface as labeled buttons.
      if ((TAB_PAGES as string[]).includes(target) || target === content.back) {
        continue;
      }
      const button = document.createElement("button");
      button.className = "how-link";
      button.dataset.page = target;
      button.textContent = CHILD_BUTTON_LABELS[target] ?? target;
      button.addEventListener("click", () => void this.show(target));
      footer.appendChild(button);
    }
    const feedback = document.createElement("button");
    feedback.className = "feedback";
    feedback.textContent = content.feedback_label;
    feedback.addEventListener("click", () =>
      this.callbacks.feedback(content.page));
    footer.appendChild(feedback);

    const close = document.createElement("button");
    close.className = "close-window";
    close.textContent = "Close";
    close.addEventListener("click", () => this.close());
    footer.appendChild(close);
    this.root.appendChild(footer);
  }

  private renderBlock(block: PageContent["blocks"][number]): HTMLElement {
    switch (block.kind) {
      case "text": {
        const p = document.createElement("p");
        p.className = "block-text";
        p.textContent = block.text;
        return p;
      }
      case "diagram": {
        const figure = document.createElement("figure");
        figure.className = "block-diagram";
        figure.dataset.ref = block.ref;
        figure.textContent =
          "your interaction data → prediction → your hint";
        return figure;
      }
      case "score_arithmetic": {
        const div = document.createElement("div");
        div.className = "block-score";
        div.dataset.cluster = block.cluster;
        for (const line of block.lines) {
          const p = document.createElement("p");
          p.className = "score-line";
          p.textContent = line;
          div.appendChild(p);
        }
        return div;
      }
      case "rule_list": {
        const ul = document.createElement("ul");
        ul.className = "block-rules";
        for (const rule of block.rules) {
          const li = document.createElement("li");
          li.textContent = rule.display;
          ul.appendChild(li);
        }
        return ul;
      }
      case "hint_list": {
        const ul = document.createElement("ul");
        ul.className = "block-hints";
        for (const item of block.items) {
          const li = document.createElement("li");
          li.textContent = item.display;
          if (item.item === block.chosen) {
            li.classList.add("chosen");
          }
          ul.appendChild(li);
        }
        return ul;
      }
      case "sum_arithmetic": {
        const p = document.createElement("p");
        p.className = "block-sum";
        p.textContent = block.text;
        return p;
      }
    }
  }
}
