"""Command-line driver: gen, train, eval, replay, stats, serve.

Every subcommand is deterministic given its seed and inputs. Errors print
one machine-parsable line `ERROR <Code>: <message>` and exit 1; usage
errors exit 2 (argparse).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .classifier import evaluate_accuracy, load_model
from .discovery import cluster_users, export_model, mine_rules
from .explain import PageTemplates
from .hints import load_catalog
from .problems import load_problem
from .service import HubConfig, SessionHub, SessionRuntime, replay_log, serve
from .simulate import (
    corpus_from_json,
    corpus_to_json,
    default_archetypes,
    eval_pairs,
    generate_corpus,
)


def _write_json(path: str, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def _read_json(path: str) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def cmd_gen(args: argparse.Namespace) -> int:
    archetypes = default_archetypes(plg_gap=args.gap)
    users = generate_corpus(archetypes, args.users, args.seed)
    doc = corpus_to_json(users, archetypes, args.seed)
    _write_json(args.out, doc)
    print(f"wrote {len(users)} users to {args.out}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    users = corpus_from_json(_read_json(args.corpus))
    labeled = [u.labeled() for u in users]
    model = cluster_users(labeled, k=2, seed=args.seed)
    rules = mine_rules(model, labeled, min_support=args.min_support,
                       min_confidence=args.min_confidence, max_len=args.max_len)
    doc = export_model(model, rules, meta={
        "users": len(users),
        "seed": args.seed,
        "min_support": args.min_support,
        "min_confidence": args.min_confidence,
        "max_len": args.max_len,
    })
    _write_json(args.out, doc)

    # Cluster purity against the planted archetypes, when present.
    matches = sum(1 for u in users if model.assign(u.labeled().features) == u.label())
    purity = max(matches, len(users) - matches) / len(users)
    report = {
        "users": len(users),
        "cluster_sizes": model.sizes,
        "mean_plg": model.mean_plg,
        "separated": model.separated,
        "rules": {
            label: len([r for r in rules.rules if r.consequent == label])
            for label in ("HLG", "LLG")
        },
        "total_weight": {
            label: rules.total_weight(label) for label in ("HLG", "LLG")
        },
        "archetype_purity": purity,
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    report_path = args.report or (str(Path(args.out).with_suffix("")) + ".report.json")
    _write_json(report_path, report)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    model = load_model(_read_json(args.model))
    users = corpus_from_json(_read_json(args.corpus))
    pairs = eval_pairs(users)
    fractions = [float(f) for f in args.prefixes.split(",") if f]
    table = {}
    for fraction in fractions:
        table[f"{fraction:g}"] = evaluate_accuracy(model, pairs, fraction)
    print(json.dumps({"accuracy": table}, indent=2, sort_keys=True))
    if args.out:
        _write_json(args.out, {"accuracy": table})
    return 0


def _fresh_runtime(problem_path: str, model_path: str,
                   catalog_path: str | None) -> SessionRuntime:
    spec = load_problem(Path(problem_path).read_text(encoding="utf-8"))
    model = load_model(_read_json(model_path))
    return SessionRuntime(
        problem_name=Path(problem_path).stem, spec=spec, model=model,
        catalog=load_catalog(catalog_path), templates=PageTemplates.load(),
        session_id="replay")


def cmd_replay(args: argparse.Namespace) -> int:
    lines = Path(args.log).read_text(encoding="utf-8").splitlines()
    runtime = _fresh_runtime(args.problem, args.model, args.catalog)
    trace: list = []
    replay_log(lines, runtime, trace=trace)
    if args.trace:
        Path(args.trace).write_text(
            "\n".join(json.dumps(t, sort_keys=True) for t in trace) + "\n",
            encoding="utf-8")
    print(json.dumps({"digest": runtime.digest(),
                      "events": sum(1 for t in trace if "seq" in t),
                      "pages": sum(1 for t in trace if "page" in t),
                      "hints": runtime.delivery.state.hints_received()},
                     indent=2, sort_keys=True))
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    lines = Path(args.log).read_text(encoding="utf-8").splitlines()
    runtime = _fresh_runtime(args.problem, args.model, args.catalog)
    replay_log(lines, runtime)
    print(json.dumps(runtime.stats(), indent=2, sort_keys=True))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    def pick(flag, env_name):
        return flag if flag is not None else os.environ.get(env_name)

    config = HubConfig(
        problem_dir=pick(args.problems, "ARCTUTOR_PROBLEMS"),
        model_dir=pick(args.models, "ARCTUTOR_MODELS"),
        catalog_path=pick(args.catalog, "ARCTUTOR_CATALOG"),
        templates_path=pick(args.templates, "ARCTUTOR_TEMPLATES"),
        log_dir=pick(args.logs, "ARCTUTOR_LOGS"),
    )
    host = pick(args.host, "ARCTUTOR_HOST") or "127.0.0.1"
    port = int(pick(args.port, "ARCTUTOR_PORT") or 8400)
    httpd = serve(SessionHub(config), host=host, port=port)
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arctutor",
        description="AC-3 tutoring engine: synthetic corpora, model training, "
                    "replay, and the session service")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic labeled corpus")
    p.add_argument("--users", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--gap", type=float, default=0.3,
                   help="gap between archetype mean learning gains")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("train", help="cluster a corpus and mine weighted rules")
    p.add_argument("--corpus", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-support", type=float, default=0.3)
    p.add_argument("--min-confidence", type=float, default=0.8)
    p.add_argument("--max-len", type=int, default=3)
    p.add_argument("--out", required=True)
    p.add_argument("--report", default=None)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("eval", help="classification accuracy on a held-out corpus")
    p.add_argument("--model", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--prefixes", default="0.25,0.5,0.75,1",
                   help="comma-separated stream prefix fractions")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("replay", help="replay an exported session log")
    p.add_argument("--log", required=True)
    p.add_argument("--problem", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--catalog", default=None)
    p.add_argument("--trace", default=None,
                   help="write the per-event snapshot trace here (JSON Lines)")
    p.set_defaults(fn=cmd_replay)

    p = sub.add_parser("stats", help="usage report for an exported session log")
    p.add_argument("--log", required=True)
    p.add_argument("--problem", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--catalog", default=None)
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("serve", help="run the session service")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--problems", default=None, help="problem directory")
    p.add_argument("--models", default=None, help="model directory")
    p.add_argument("--catalog", default=None, help="hint catalog file")
    p.add_argument("--templates", default=None, help="page templates file")
    p.add_argument("--logs", default=None, help="session log directory")
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:  # noqa: BLE001 - single machine-parsable exit point
        code = getattr(exc, "code", exc.__class__.__name__)
        print(f"ERROR {code}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
