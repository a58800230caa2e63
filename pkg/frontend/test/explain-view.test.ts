/** Conformance of the explanation window against served PageContent. */
import { beforeEach, describe, expect, it } from "vitest";

import { DwellTimer, ExplanationWindow } from "../src/explain-view.js";
import type { PageContent, PageName } from "../src/types.js";
import fixtures from "./fixtures.json";

const PAGES = fixtures.pages as unknown as Record<PageName, PageContent>;

interface Recorded {
  closed: { page: PageName; dwellMs: number }[];
  feedback: PageName[];
  fetched: PageName[];
}

function mount(now?: () => number): {
  root: HTMLElement; view: ExplanationWindow; recorded: Recorded;
} {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const recorded: Recorded = { closed: [], feedback: [], fetched: [] };
  const view = new ExplanationWindow(root, {
    fetchPage: (page) => {
      recorded.fetched.push(page);
      return Promise.resolve(PAGES[page]);
    },
    pageClosed: (page, dwellMs) => recorded.closed.push({ page, dwellMs }),
    feedback: (page) => recorded.feedback.push(page),
  }, now);
  return { root, view, recorded };
}

beforeEach(() => {
  document.body.replaceChildren();
});

describe("tab structure", () => {
  it("shows exactly the three why tabs on every page", async () => {
    for (const page of Object.keys(PAGES) as PageName[]) {
      const { root, view } = mount();
      await view.open(page);
      const tabs = [...root.querySelectorAll(".explain-tabs .tab")];
      expect(tabs.map((t) => (t as HTMLElement).dataset.page)).toEqual(
        ["WhyHint", "WhyLow", "WhyRules"]);
    }
  });

  it("opens on WhyHint by default", async () => {
    const { root, view } = mount();
    await view.open();
    expect(root.querySelector(".tab.active")?.textContent).toBe(
      "Why am I delivered this hint?");
  });
});

describe("HowRank gating", () => {
  const linkTargets = (root: HTMLElement) =>
    [...root.querySelectorAll<HTMLElement>(".how-link, .back")]
      .map((b) => b.dataset.page);

  it("is linked from HowHint", async () => {
    const { root, view } = mount();
    await view.open("HowHint");
    expect(linkTargets(root)).toContain("HowRank");
  });

  it("is not linked from any other page", async () => {
    for (const page of ["WhyHint", "WhyLow", "WhyRules", "HowScore"] as PageName[]) {
      const { root, view } = mount();
      await view.open(page);
      expect(linkTargets(root)).not.toContain("HowRank");
      const tabTargets = [...root.querySelectorAll<HTMLElement>(".tab")]
        .map((t) => t.dataset.page);
      expect(tabTargets).not.toContain("HowRank");
    }
  });

  it("offers back to HowHint from HowRank", async () => {
    const { root, view } = mount();
    await view.open("HowRank");
    const back = root.querySelector<HTMLElement>(".back");
    expect(back?.dataset.page).toBe("HowHint");
  });
});

describe("thin-client rule: numerals verbatim from PageContent", () => {
  it("renders the HowScore arithmetic lines exactly as served", async () => {
    const { root, view } = mount();
    await view.open("HowScore");
    const served = PAGES.HowScore.blocks
      .filter((b) => b.kind === "score_arithmetic")
      .flatMap((b) => (b as { lines: string[] }).lines);
    const shown = [...root.querySelectorAll(".score-line")]
      .map((el) => el.textContent);
    expect(shown).toEqual(served);
    expect(shown.join(" ")).toContain("432/1383 = .313");
    expect(shown.join(" ")).toContain("0/376 = 0");
  });

  it("renders the HowRank summation exactly as served", async () => {
    const { root, view } = mount();
    await view.open("HowRank");
    const served = PAGES.HowRank.blocks
      .find((b) => b.kind === "sum_arithmetic") as { text: string };
    expect(root.querySelector(".block-sum")?.textContent).toBe(served.text);
    expect(served.text).toContain("18 + 21 + 19 + 40 = 98");
  });

  it("every numeral on every page appears in the served payload", async () => {
    for (const page of Object.keys(PAGES) as PageName[]) {
      const { root, view } = mount();
      await view.open(page);
      const payloadText = JSON.stringify(PAGES[page]);
      const shown = root.querySelector(".explain-body")!.textContent ?? "";
      for (const numeral of shown.match(/\d+(?:\.\d+)?|\.\d+/g) ?? []) {
        expect(payloadText, `${page}: numeral ${numeral}`).toContain(numeral);
      }
    }
  });

  it("renders hint list entries via their served display strings", async () => {
    const { root, view } = mount();
    await view.open("HowHint");
    const served = PAGES.HowHint.blocks
      .find((b) => b.kind === "hint_list") as {
        items: { display: string }[] };
    const shown = [...root.querySelectorAll(".block-hints li")]
      .map((el) => el.textContent);
    expect(shown).toEqual(served.items.map((i) => i.display));
    expect(shown[0]).toBe("Using Reset less frequently (ranking: 98)");
  });
});

describe("feedback and dwell", () => {
  it("every page carries the served feedback control", async () => {
    for (const page of Object.keys(PAGES) as PageName[]) {
      const { root, view } = mount();
      await view.open(page);
      expect(root.querySelector(".feedback")?.textContent).toBe(
        "I would have liked to know more");
    }
  });

  it("feedback presses report the current page", async () => {
    const { root, view, recorded } = mount();
    await view.open("WhyLow");
    (root.querySelector(".feedback") as HTMLButtonElement).click();
    expect(recorded.feedback).toEqual(["WhyLow"]);
  });

  it("switching pages reports dwell for the replaced page", async () => {
    let t = 1000;
    const { view, recorded } = mount(() => t);
    await view.open("WhyHint");
    t += 2500;
    await view.show("WhyLow");
    t += 700;
    view.close();
    expect(recorded.closed).toEqual([
      { page: "WhyHint", dwellMs: 2500 },
      { page: "WhyLow", dwellMs: 700 },
    ]);
  });
});

describe("DwellTimer", () => {
  it("pauses while the window lacks focus", () => {
    let t = 0;
    const timer = new DwellTimer(() => t);
    timer.start();
    t += 1000;
    timer.pause();   // window blurred
    t += 5000;
    timer.resume();  // focus back
    t += 250;
    expect(timer.stop()).toBe(1250);
  });
});
