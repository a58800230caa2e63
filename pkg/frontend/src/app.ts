/** Wires the widgets to one tutoring session.
 *
 * The client keeps no model state of its own: every render is a projection
 * of the latest service response, and every number shown in explanations
 * arrives pre-rendered from the server.
 */
import { ApiClient, ServiceError } from "./api.js";
import { ExplanationWindow } from "./explain-view.js";
import { HintDialog } from "./hint-dialog.js";
import { NetworkRenderer } from "./network-view.js";
import { SplitPicker, Toolbar, ToolName } from "./toolbar.js";
import type {
  ActionRequest,
  HintPayload,
  NetworkView,
  PageName,
  ProblemView,
} from "./types.js";

export interface AppElements {
  canvas: SVGSVGElement;
  toolbar: HTMLElement;
  splitPicker: HTMLElement;
  hintDialog: HTMLElement;
  explainWindow: HTMLElement;
  statusBar: HTMLElement;
  domainsPanel: HTMLElement;
}

export class App {
  private network!: NetworkView;
  private problem!: ProblemView;
  private session = "";
  private highlights: string[] = [];
  private renderer: NetworkRenderer;
  private toolbar: Toolbar;
  private splitPicker: SplitPicker;
  private hintDialog: HintDialog;
  private explain: ExplanationWindow;

  constructor(private api: ApiClient, private el: AppElements,
              now?: () => number) {
    this.renderer = new NetworkRenderer(el.canvas,
      { onArcClick: (arc) => void this.onArcClick(arc) });
    this.toolbar = new Toolbar(el.toolbar, (tool) => void this.onTool(tool));
    this.splitPicker = new SplitPicker(el.splitPicker,
      (choice) => void this.act({
        action: "DomainSplit", target: choice.variable, subset: choice.subset,
      }));
    this.hintDialog = new HintDialog(el.hintDialog,
      (hint) => void this.openExplanation(hint));
    this.explain = new ExplanationWindow(el.explainWindow, {
      fetchPage: (page: PageName) => this.api.getPage(this.session, page),
      pageClosed: (page, dwellMs) =>
        void this.api.postPageClosed(this.session, page, dwellMs),
      feedback: (page) => void this.api.postFeedback(this.session, page),
    }, now);
  }

  async start(problemId: string, modelId: string): Promise<void> {
    const created = await this.api.createSession(problemId, modelId);
    this.session = created.session;
    this.problem = created.problem;
    this.network = created.network;
    this.highlights = [];
    this.renderAll();
  }

  private renderAll(): void {
    this.renderer.render(this.problem, this.network,
      this.highlights.includes("canvas.arcs"));
    this.toolbar.update(this.network, this.highlights);
    this.el.domainsPanel.classList.toggle(
      "highlighted", this.highlights.includes("panel.domains"));
    this.el.statusBar.textContent =
      `${this.problem.name} - ${this.network.status}`
      + (this.network.split_depth > 0
        ? ` (split depth ${this.network.split_depth})` : "");
  }

  private async onTool(tool: ToolName): Promise<void> {
    if (tool === "DomainSplit") {
      this.splitPicker.open(this.network.domains);
      return;
    }
    await this.act({ action: tool });
  }

  private async onArcClick(arc: number): Promise<void> {
    if (this.network.arc_states[arc] === "Consistent") {
      return; // clicking a consistent arc would only earn a 409
    }
    await this.act({ action: "DirectArcClick", target: String(arc) });
  }

  private async act(request: ActionRequest): Promise<void> {
    try {
      const response = await this.api.postAction(this.session, request);
      this.network = response.network;
      if (response.hint !== null) {
        this.highlights = response.hint.stage === "Strong"
          ? response.hint.highlights : [];
        this.hintDialog.show(response.hint);
      }
      this.renderAll();
    } catch (err) {
      if (err instanceof ServiceError) {
        this.el.statusBar.textContent = `${err.code}: ${err.message}`;
        return;
      }
      throw err;
    }
  }

  private async openExplanation(_hint: HintPayload): Promise<void> {
    this.hintDialog.hide();
    await this.explain.open("WhyHint");
  }
}
