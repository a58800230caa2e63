/** Wire payloads of the session service, mirrored verbatim. */

export type NetworkStatus = "InProgress" | "Consistent" | "DomainWipeout";
export type ArcStateName = "Untested" | "Consistent" | "Stale";

export interface NetworkView {
  status: NetworkStatus;
  domains: Record<string, number[]>;
  arc_states: ArcStateName[];
  queue: number[];
  split_depth: number;
  phase: number;
  splits: string[];
}

export interface ProblemView {
  name: string;
  variables: { name: string; domain: number[] }[];
  constraints: { scope: [string, string]; text: string }[];
  arcs: { variable: string; constraint: number }[];
}

export interface HintPayload {
  hint: number;
  item: string;
  title: string;
  message: string;
  stage: "Text" | "Strong";
  highlights: string[];
  explain_label: string;
  rank: number;
}

export interface ActionResponse {
  session: string;
  seq: number;
  network: NetworkView;
  outcome: { kind: string; arc: number | null; removed: [string, number][] };
  classification: unknown;
  hint: HintPayload | null;
}

export interface SessionCreated {
  session: string;
  problem: ProblemView;
  network: NetworkView;
}

export type PageName =
  | "WhyHint" | "WhyLow" | "WhyRules" | "HowScore" | "HowHint" | "HowRank";

export const TAB_PAGES: PageName[] = ["WhyHint", "WhyLow", "WhyRules"];

export interface TextBlock { kind: "text"; text: string }
export interface DiagramBlock { kind: "diagram"; ref: string }
export interface ScoreArithmeticBlock {
  kind: "score_arithmetic";
  cluster: string;
  satisfied: number;
  total: number;
  quotient: string;
  lines: string[];
}
export interface RuleListBlock {
  kind: "rule_list";
  rules: { rule: number; text: string; weight: number; display: string;
           action_counts?: Record<string, number> }[];
}
export interface HintListBlock {
  kind: "hint_list";
  items: { item: string; text: string; rank: number; display: string }[];
  chosen: string;
}
export interface SumArithmeticBlock {
  kind: "sum_arithmetic";
  addends: number[];
  total: number;
  text: string;
}

export type PageBlock =
  | TextBlock | DiagramBlock | ScoreArithmeticBlock
  | RuleListBlock | HintListBlock | SumArithmeticBlock;

export interface PageContent {
  page: PageName;
  title: string;
  hint: number;
  blocks: PageBlock[];
  transitions: PageName[];
  back: PageName | null;
  feedback_label: string;
}

export interface ActionRequest {
  action: "FineStep" | "DirectArcClick" | "AutoAC" | "DomainSplit"
        | "Backtrack" | "Reset";
  target?: string;
  subset?: number[];
  t_ms?: number;
}

export interface UsageStats {
  hints_received: number;
  initiations: number;
  page_accesses: number;
  feedback_presses: number;
  types_accessed: number;
  [key: string]: number | Record<string, number>;
}
