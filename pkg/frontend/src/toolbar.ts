/** The six tool buttons with status-driven enablement, plus the split picker. */
import type { NetworkView } from "./types.js";

export type ToolName = "FineStep" | "AutoAC" | "DomainSplit" | "Backtrack" | "Reset";

const TOOL_LABELS: Record<ToolName, string> = {
  FineStep: "Fine Step",
  AutoAC: "Auto AC",
  DomainSplit: "Domain Split",
  Backtrack: "Backtrack",
  Reset: "Reset",
};

export function toolEnabled(tool: ToolName, network: NetworkView): boolean {
  const splittable = Object.values(network.domains).some((d) => d.length >= 2);
  switch (network.status) {
    case "InProgress":
      return tool === "FineStep" || tool === "AutoAC" || tool === "Reset"
        || (tool === "Backtrack" && network.split_depth > 0);
    case "Consistent":
      return tool === "Reset"
        || (tool === "DomainSplit" && splittable)
        || (tool === "Backtrack" && network.split_depth > 0);
    case "DomainWipeout":
      return tool === "Reset"
        || (tool === "Backtrack" && network.split_depth > 0);
  }
}

export class Toolbar {
  private buttons = new Map<ToolName, HTMLButtonElement>();

  constructor(root: HTMLElement, onTool: (tool: ToolName) => void) {
    for (const tool of Object.keys(TOOL_LABELS) as ToolName[]) {
      const button = document.createElement("button");
      button.id = `toolbar.${tool.toLowerCase().replace("autoac", "auto-ac")}`;
      button.textContent = TOOL_LABELS[tool];
      button.dataset.tool = tool;
      button.addEventListener("click", () => onTool(tool));
      root.appendChild(button);
      this.buttons.set(tool, button);
    }
  }

  update(network: NetworkView, highlights: string[]): void {
    for (const [tool, button] of this.buttons) {
      button.disabled = !toolEnabled(tool, network);
      button.classList.toggle("highlighted", highlights.includes(button.id));
    }
  }

  button(tool: ToolName): HTMLButtonElement {
    return this.buttons.get(tool)!;
  }
}

/** Maps the hint catalog's highlight ids onto toolbar button element ids. */
export const HIGHLIGHT_IDS = [
  "toolbar.fine-step", "toolbar.auto-ac", "toolbar.domain-split",
  "toolbar.backtrack", "toolbar.reset", "canvas.arcs", "panel.domains",
];

export interface SplitChoice {
  variable: string;
  subset: number[];
}

/** Pop-up subset picker; empty and full subsets never submit. */
export class SplitPicker {
  constructor(private root: HTMLElement,
              private onSubmit: (choice: SplitChoice) => void) {}

  open(domains: Record<string, number[]>): void {
    const candidates = Object.entries(domains)
      .filter(([, domain]) => domain.length >= 2);
    this.root.replaceChildren();
    this.root.classList.add("open");

    const heading = document.createElement("h3");
    heading.textContent = "Domain split";
    this.root.appendChild(heading);

    const select = document.createElement("select");
    select.id = "split-variable";
    for (const [name] of candidates) {
      const option = document.createElement("option");
      option.value = name;
      option.textContent = name;
      select.appendChild(option);
    }
    this.root.appendChild(select);

    const valueBox = document.createElement("div");
    valueBox.id = "split-values";
    this.root.appendChild(valueBox);

    const submit = document.createElement("button");
    submit.id = "split-submit";
    submit.textContent = "Split";
    const cancel = document.createElement("button");
    cancel.id = "split-cancel";
    cancel.textContent = "Cancel";
    this.root.append(submit, cancel);

    const renderValues = () => {
      const domain = domains[select.value] ?? [];
      valueBox.replaceChildren();
      for (const value of domain) {
        const label = document.createElement("label");
        const checkbox = document.createElement("input");
        checkbox.type = "checkbox";
        checkbox.value = String(value);
        checkbox.addEventListener("change", updateEnablement);
        label.append(checkbox, document.createTextNode(String(value)));
        valueBox.appendChild(label);
      }
      updateEnablement();
    };

    const chosen = (): number[] =>
      [...valueBox.querySelectorAll<HTMLInputElement>("input:checked")]
        .map((input) => Number(input.value));

    const updateEnablement = () => {
      const count = chosen().length;
      const size = (domains[select.value] ?? []).length;
      submit.disabled = count === 0 || count >= size;
    };

    select.addEventListener("change", renderValues);
    submit.addEventListener("click", () => {
      const subset = chosen();
      const size = (domains[select.value] ?? []).length;
      if (subset.length === 0 || subset.length >= size) {
        return; // proper non-empty subsets only, mirroring the server
      }
      this.close();
      this.onSubmit({ variable: select.value, subset });
    });
    cancel.addEventListener("click", () => this.close());
    renderValues();
  }

  close(): void {
    this.root.classList.remove("open");
    this.root.replaceChildren();
  }
}
