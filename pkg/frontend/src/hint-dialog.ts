/** The hint dialog: message text plus the explanation entry point. */
import type { HintPayload } from "./types.js";

export class HintDialog {
  constructor(private root: HTMLElement,
              private onExplain: (hint: HintPayload) => void) {}

  show(hint: HintPayload): void {
    this.root.replaceChildren();
    this.root.classList.add("open");
    this.root.dataset.stage = hint.stage;

    const title = document.createElement("h3");
    title.className = "hint-title";
    title.textContent = hint.title;

    const message = document.createElement("p");
    message.className = "hint-message";
    message.textContent = hint.message;

    const explain = document.createElement("button");
    explain.className = "hint-explain";
    explain.textContent = hint.explain_label;
    explain.addEventListener("click", () => this.onExplain(hint));

    const dismiss = document.createElement("button");
    dismiss.className = "hint-dismiss";
    dismiss.textContent = "Close Hint";
    dismiss.addEventListener("click", () => this.hide());

    this.root.append(title, message, explain, dismiss);
  }

  hide(): void {
    this.root.classList.remove("open");
    this.root.replaceChildren();
  }
}
