/** SVG rendering of the constraint network.
 *
 * Pure projection of the last service response: variable nodes on a circle
 * with their domains (removed values struck out), one line per constraint,
 * and two clickable arrow markers per constraint, one per directed arc,
 * colored by arc state.
 */
import type { NetworkView, ProblemView } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const ARC_COLORS: Record<string, string> = {
  Untested: "#8a8f98",
  Consistent: "#2e9e44",
  Stale: "#e08a00",
};

export interface NetworkCallbacks {
  onArcClick: (arc: number) => void;
}

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K, attrs: Record<string, string>): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, value);
  }
  return el;
}

function layout(problem: ProblemView, width: number, height: number) {
  const cx = width / 2;
  const cy = height / 2;
  const radius = Math.min(width, height) / 2 - 70;
  const pos = new Map<string, { x: number; y: number }>();
  problem.variables.forEach((variable, i) => {
    const angle = (2 * Math.PI * i) / problem.variables.length - Math.PI / 2;
    pos.set(variable.name, {
      x: cx + radius * Math.cos(angle),
      y: cy + radius * Math.sin(angle),
    });
  });
  return pos;
}

export class NetworkRenderer {
  constructor(private root: SVGSVGElement,
              private callbacks: NetworkCallbacks) {}

  render(problem: ProblemView, network: NetworkView,
         highlightArcs: boolean): void {
    const box = (this.root.getAttribute("viewBox") ?? "0 0 640 480")
      .split(/\s+/).map(Number);
    const width = box[2] || 640;
    const height = box[3] || 480;
    const pos = layout(problem, width, height);
    this.root.replaceChildren();

    problem.constraints.forEach((constraint, ci) => {
      const [a, b] = constraint.scope;
      const pa = pos.get(a)!;
      const pb = pos.get(b)!;
      this.root.appendChild(svgEl("line", {
        x1: String(pa.x), y1: String(pa.y),
        x2: String(pb.x), y2: String(pb.y),
        stroke: "#c3c7ce", "stroke-width": "2",
      }));
      const label = svgEl("text", {
        x: String((pa.x + pb.x) / 2),
        y: String((pa.y + pb.y) / 2 - 8),
        class: "constraint-label",
        "text-anchor": "middle",
      });
      label.textContent = constraint.text;
      this.root.appendChild(label);
    });

    problem.arcs.forEach((arc, ai) => {
      const constraint = problem.constraints[arc.constraint];
      const from = pos.get(arc.variable)!;
      const other = constraint.scope[0] === arc.variable
        ? constraint.scope[1] : constraint.scope[0];
      const to = pos.get(other)!;
      // Arrow marker sits a third of the way toward the other endpoint and
      // points back at the arc's variable (the endpoint being revised).
      const mx = from.x + (to.x - from.x) * 0.33;
      const my = from.y + (to.y - from.y) * 0.33;
      const angle = Math.atan2(from.y - my, from.x - mx);
      const state = network.arc_states[ai];
      const marker = svgEl("polygon", {
        points: trianglePoints(mx, my, angle),
        fill: ARC_COLORS[state] ?? "#8a8f98",
        class: `arc arc-${state.toLowerCase()}`
          + (highlightArcs ? " highlighted" : ""),
        "data-arc": String(ai),
        "data-state": state,
      });
      const title = svgEl("title", {});
      title.textContent =
        `arc ${ai}: revise ${arc.variable} against ${other} (${constraint.text}) - ${state}`;
      marker.appendChild(title);
      marker.addEventListener("click", () => this.callbacks.onArcClick(ai));
      this.root.appendChild(marker);
    });

    problem.variables.forEach((variable) => {
      const p = pos.get(variable.name)!;
      const group = svgEl("g", { class: "node", "data-variable": variable.name });
      group.appendChild(svgEl("circle", {
        cx: String(p.x), cy: String(p.y), r: "24",
        fill: "#ffffff", stroke: "#39414e", "stroke-width": "2",
      }));
      const name = svgEl("text", {
        x: String(p.x), y: String(p.y + 5),
        "text-anchor": "middle", class: "node-name",
      });
      name.textContent = variable.name;
      group.appendChild(name);

      const current = new Set(network.domains[variable.name] ?? []);
      const values = svgEl("text", {
        x: String(p.x), y: String(p.y + 42),
        "text-anchor": "middle", class: "node-domain",
      });
      variable.domain.forEach((value, i) => {
        const span = document.createElementNS(SVG_NS, "tspan");
        span.textContent = (i > 0 ? " " : "") + String(value);
        span.setAttribute("data-value", String(value));
        if (!current.has(value)) {
          span.setAttribute("class", "removed");
          span.setAttribute("text-decoration", "line-through");
        }
        values.appendChild(span);
      });
      group.appendChild(values);
      this.root.appendChild(group);
    });
  }
}

function trianglePoints(x: number, y: number, angle: number): string {
  const size = 11;
  const tips = [
    [x + size * Math.cos(angle), y + size * Math.sin(angle)],
    [x + size * Math.cos(angle + 2.5), y + size * Math.sin(angle + 2.5)],
    [x + size * Math.cos(angle - 2.5), y + size * Math.sin(angle - 2.5)],
  ];
  return tips.map(([px, py]) => `${px.toFixed(1)},${py.toFixed(1)}`).join(" ");
}
