/** Entry point: session setup form, then the tutoring workspace. */
import { ApiClient } from "./api.js";
import { App, AppElements } from "./app.js";

const DEFAULT_BASE = `${location.protocol}//${location.hostname}:8400`;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

async function boot(): Promise<void> {
  const baseInput = el<HTMLInputElement>("service-base");
  baseInput.value = DEFAULT_BASE;
  const problemSelect = el<HTMLSelectElement>("problem-select");
  const modelSelect = el<HTMLSelectElement>("model-select");
  const startButton = el<HTMLButtonElement>("start-session");
  const setupError = el<HTMLElement>("setup-error");

  const loadLists = async () => {
    const api = new ApiClient(baseInput.value);
    try {
      const [problems, models] = await Promise.all(
        [api.listProblems(), api.listModels()]);
      problemSelect.replaceChildren(...problems.problems.map((p) =>
        new Option(p, p)));
      modelSelect.replaceChildren(...models.models.map((m) =>
        new Option(m, m)));
      setupError.textContent = "";
    } catch (err) {
      setupError.textContent = `cannot reach service: ${err}`;
    }
  };
  baseInput.addEventListener("change", () => void loadLists());
  await loadLists();

  startButton.addEventListener("click", async () => {
    const api = new ApiClient(baseInput.value);
    const elements: AppElements = {
      canvas: el<HTMLElement>("canvas") as unknown as SVGSVGElement,
      toolbar: el("toolbar"),
      splitPicker: el("split-picker"),
      hintDialog: el("hint-dialog"),
      explainWindow: el("explain-window"),
      statusBar: el("status-bar"),
      domainsPanel: el("domains-panel"),
    };
    const app = new App(api, elements);
    try {
      await app.start(problemSelect.value, modelSelect.value);
      el("setup").classList.add("hidden");
      el("workspace").classList.remove("hidden");
    } catch (err) {
      setupError.textContent = `could not start session: ${err}`;
    }
  });
}

document.addEventListener("DOMContentLoaded", () => void boot());
