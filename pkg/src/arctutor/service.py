"""Session service: hosts tutoring sessions over HTTP with JSON bodies.

Each session owns a constraint network, an append-only action log, the
online classifier, hint delivery state, and explanation telemetry. Every
action request runs the whole pipeline synchronously and the response
carries the new network view plus an optional hint; hints never arrive out
of band. Failed actions leave no trace. The JSON Lines log a session
accumulates is the durable truth: replaying it through a fresh runtime
reproduces every snapshot, hint, and page byte for byte.
"""
from __future__ import annotations

import hashlib
import json
import threading
import uuid
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional, Sequence
from urllib.parse import urlparse

from . import csp
from .classifier import ClassifierState, RuleModel, load_model
from .events import ActionEvent, ActionType
from .explain import (
    ExplanationContext,
    NoActiveHint,
    PageId,
    PageTemplates,
    Telemetry,
    UnknownPage,
    compute_usage_stats,
    generate_page,
)
from .hints import DeliveryEngine, HintItem, load_catalog, render_hint
from .problems import ProblemSpec, compile_network, problem_view, snapshot

DEFAULT_PAUSE_MS = 1000


class ServiceError(Exception):
    code = "ServiceError"
    http_status = 400


class SessionNotFound(ServiceError):
    code = "SessionNotFound"
    http_status = 404


class UnknownProblem(ServiceError):
    code = "UnknownProblem"
    http_status = 404


class UnknownModel(ServiceError):
    code = "UnknownModel"
    http_status = 404


class BadRequest(ServiceError):
    code = "BadRequest"
    http_status = 400


class RouteNotFound(ServiceError):
    code = "NotFound"
    http_status = 404


# Engine errors that indicate illegal state rather than a bad request.
_CONFLICT_CODES = {
    "NotInProgress", "ArcAlreadyConsistent", "NotConsistent", "EmptyStack",
    "NoActiveHint",
}


def network_view(net: csp.Network) -> dict:
    view = snapshot(net)
    view["status"] = net.status.value
    view["phase"] = net.phase
    view["splits"] = [s.description for s in net.split_stack]
    return view


class SessionRuntime:
    """Single-session pipeline; callers serialize access per session."""

    def __init__(self, problem_name: str, spec: ProblemSpec, model: RuleModel,
                 catalog: Sequence[HintItem], templates: PageTemplates,
                 session_id: str, model_name: str = "") -> None:
        self.session_id = session_id
        self.problem_name = problem_name
        self.model_name = model_name
        self.spec = spec
        self.network = compile_network(spec)
        self.model = model
        self.catalog = list(catalog)
        self.templates = templates
        self.classifier = ClassifierState(model, session_id)
        self.delivery = DeliveryEngine(catalog, model.binning)
        self.telemetry = Telemetry()
        self.context: Optional[ExplanationContext] = None
        self.log_lines: list[str] = []

    # -- actions -----------------------------------------------------------

    def _apply_tool(self, action: ActionType, target: Optional[str],
                    subset: Optional[list[int]]) -> tuple[dict, Optional[str]]:
        net = self.network
        if action is ActionType.FINE_STEP:
            return net.fine_step().to_json(), None
        if action is ActionType.DIRECT_ARC_CLICK:
            if target is None:
                raise BadRequest("DirectArcClick needs a target arc index")
            try:
                arc = int(target)
            except ValueError:
                raise BadRequest(f"arc index must be an integer, got {target!r}")
            return net.direct_arc_click(arc).to_json(), str(arc)
        if action is ActionType.AUTO_AC:
            removed = net.auto_ac()
            return {"kind": "QueueEmpty",
                    "arc": None,
                    "removed": [[v, x] for v, x in removed]}, None
        if action is ActionType.DOMAIN_SPLIT:
            if target is None or subset is None:
                raise BadRequest("DomainSplit needs a variable and a subset")
            description = net.domain_split(target, set(subset))
            encoded = f"{target}={','.join(str(v) for v in sorted(set(subset)))}"
            return {"kind": "Split", "arc": None, "removed": [],
                    "description": description}, encoded
        if action is ActionType.BACKTRACK:
            description = net.backtrack()
            return {"kind": "Backtrack", "arc": None, "removed": [],
                    "description": description}, None
        if action is ActionType.RESET:
            net.reset()
            return {"kind": "Reset", "arc": None, "removed": []}, None
        raise BadRequest(f"unsupported action {action!r}")

    def post_action(self, action_name: str, target: Optional[str] = None,
                    subset: Optional[list[int]] = None,
                    t_ms: Optional[int] = None) -> dict:
        try:
            action = ActionType(action_name)
        except ValueError:
            raise BadRequest(f"unknown action {action_name!r}")
        if action is ActionType.DOMAIN_SPLIT and subset is None and target:
            target, subset = _decode_split_target(target)
        outcome, logged_target = self._apply_tool(action, target, subset)

        events = self.classifier.events
        if t_ms is None:
            t_ms = events[-1].t_ms + DEFAULT_PAUSE_MS if events else 0
        event = ActionEvent(session=self.session_id, seq=len(events) + 1,
                            t_ms=int(t_ms), action=action, target=logged_target)
        snapshot_now = self.classifier.update(event)
        self.log_lines.append(json.dumps(event.to_record(), sort_keys=True))

        delivered = self.delivery.on_event(event.seq, snapshot_now,
                                           self.classifier.events)
        hint_payload = None
        if delivered is not None:
            self.context = ExplanationContext(
                ordinal=delivered.ordinal, item=delivered.hint.item,
                stage=delivered.stage, rank=delivered.hint.rank,
                contributing=delivered.hint.contributing_rules,
                ranked=delivered.ranking, snapshot=snapshot_now)
            hint_payload = render_hint(delivered.hint.item, delivered.stage,
                                       delivered.ordinal)
            hint_payload["rank"] = delivered.hint.rank

        return {
            "session": self.session_id,
            "seq": event.seq,
            "network": network_view(self.network),
            "outcome": outcome,
            "classification": snapshot_now.to_json(),
            "hint": hint_payload,
        }

    # -- explanations ------------------------------------------------------

    def _page_id(self, page_name: str) -> PageId:
        try:
            return PageId(page_name)
        except ValueError:
            raise UnknownPage(f"unknown explanation page {page_name!r}")

    def get_explanation(self, page_name: str) -> dict:
        page = self._page_id(page_name)
        if self.context is None:
            raise NoActiveHint("no hint has been delivered in this session")
        at_ms = (self.classifier.events[-1].t_ms if self.classifier.events else 0)
        self.telemetry.page_access(page, self.context.ordinal, at_ms=at_ms)
        self.log_lines.append(json.dumps(
            {"session": self.session_id, "page": page.value,
             "hint": self.context.ordinal}, sort_keys=True))
        return generate_page(page, self.context, self.model, self.templates)

    def post_page_closed(self, page_name: str, dwell_ms: int) -> dict:
        page = self._page_id(page_name)
        if self.context is None:
            raise NoActiveHint("no hint has been delivered in this session")
        self.telemetry.page_closed(page, self.context.ordinal, int(dwell_ms))
        self.log_lines.append(json.dumps(
            {"session": self.session_id, "page_closed": page.value,
             "hint": self.context.ordinal, "dwell_ms": int(dwell_ms)},
            sort_keys=True))
        return {"ok": True}

    def post_feedback(self, page_name: str) -> dict:
        page = self._page_id(page_name)
        if self.context is None:
            raise NoActiveHint("no hint has been delivered in this session")
        self.telemetry.feedback(page, self.context.ordinal)
        self.log_lines.append(json.dumps(
            {"session": self.session_id, "feedback": page.value,
             "hint": self.context.ordinal}, sort_keys=True))
        return {"ok": True}

    # -- reports -----------------------------------------------------------

    def stats(self) -> dict:
        return compute_usage_stats(self.telemetry,
                                   self.delivery.state.hints_received())

    def export_log(self) -> str:
        return "\n".join(self.log_lines) + ("\n" if self.log_lines else "")

    def digest(self) -> str:
        """Stable fingerprint over log, final state, and usage stats."""
        material = json.dumps({
            "log": self.log_lines,
            "network": network_view(self.network),
            "classification": self.classifier.current.to_json(),
            "stats": self.stats(),
        }, sort_keys=True)
        return hashlib.sha256(material.encode("utf-8")).hexdigest()


def _decode_split_target(encoded: str) -> tuple[str, list[int]]:
    if "=" not in encoded:
        raise BadRequest(f"malformed split target {encoded!r}")
    name, _, values = encoded.partition("=")
    try:
        subset = [int(v) for v in values.split(",") if v != ""]
    except ValueError:
        raise BadRequest(f"malformed split subset in {encoded!r}")
    return name, subset


def replay_log(lines: Sequence[str], runtime: SessionRuntime,
               trace: Optional[list] = None) -> SessionRuntime:
    """Feed exported log lines through a fresh runtime.

    Raises ValueError naming the offending line on corrupt input. When
    `trace` is a list, a per-event state record is appended for each action.
    """
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            if not isinstance(record, dict):
                raise ValueError("record must be an object")
        except ValueError as exc:
            raise ValueError(f"line {lineno}: not a JSON record ({exc})") from None
        if not runtime.log_lines and "session" in record:
            # Adopt the exported session's identity so the replayed log is
            # byte-identical to the original.
            runtime.session_id = str(record["session"])
        try:
            if "action" in record:
                response = runtime.post_action(
                    record["action"], record.get("target"), None,
                    record.get("t_ms"))
                if trace is not None:
                    trace.append({
                        "seq": response["seq"],
                        "network": response["network"],
                        "outcome": response["outcome"],
                        "classification": response["classification"],
                        "hint": response["hint"],
                    })
            elif "page" in record:
                content = runtime.get_explanation(record["page"])
                if trace is not None:
                    trace.append({"page": record["page"], "content": content})
            elif "page_closed" in record:
                runtime.post_page_closed(record["page_closed"], record["dwell_ms"])
            elif "feedback" in record:
                runtime.post_feedback(record["feedback"])
            else:
                raise ValueError(f"line {lineno}: unrecognized record")
        except (ServiceError, csp.CspError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    return runtime


@dataclass
class HubConfig:
    problem_dir: Optional[str] = None
    model_dir: Optional[str] = None
    catalog_path: Optional[str] = None
    templates_path: Optional[str] = None
    log_dir: Optional[str] = None


class SessionHub:
    """Thread-safe session store; requests serialize per session."""

    def __init__(self, config: HubConfig) -> None:
        self.config = config
        self._lock = threading.Lock()
        self._sessions: dict[str, SessionRuntime] = {}
        self._session_locks: dict[str, threading.Lock] = {}
        self.catalog = load_catalog(config.catalog_path)
        self.templates = PageTemplates.load(config.templates_path)

    # -- catalog of problems/models -----------------------------------------

    def _problem_files(self) -> dict[str, Path]:
        if self.config.problem_dir is None:
            from importlib import resources
            base = resources.files("arctutor.data").joinpath("problems")
            return {p.name.removesuffix(".json"): p
                    for p in sorted(base.iterdir(), key=lambda p: p.name)
                    if p.name.endswith(".json")}
        base = Path(self.config.problem_dir)
        return {p.stem: p for p in sorted(base.glob("*.json"))}

    def _model_files(self) -> dict[str, Path]:
        if self.config.model_dir is None:
            return {}
        base = Path(self.config.model_dir)
        return {p.stem: p for p in sorted(base.glob("*.json"))}

    def list_problems(self) -> list[str]:
        return sorted(self._problem_files())

    def list_models(self) -> list[str]:
        return sorted(self._model_files())

    def load_problem_spec(self, name: str) -> ProblemSpec:
        from .problems import load_problem
        files = self._problem_files()
        if name not in files:
            raise UnknownProblem(f"unknown problem {name!r}")
        return load_problem(files[name].read_text())

    def load_rule_model(self, name: str) -> RuleModel:
        files = self._model_files()
        if name not in files:
            raise UnknownModel(f"unknown model {name!r}")
        return load_model(json.loads(files[name].read_text()))

    # -- sessions ------------------------------------------------------------

    def create_session(self, problem: str, model: str) -> dict:
        spec = self.load_problem_spec(problem)
        rule_model = self.load_rule_model(model)
        session_id = uuid.uuid4().hex[:12]
        runtime = SessionRuntime(
            problem_name=problem, spec=spec, model=rule_model,
            catalog=self.catalog, templates=self.templates,
            session_id=session_id, model_name=model)
        with self._lock:
            self._sessions[session_id] = runtime
            self._session_locks[session_id] = threading.Lock()
        return {
            "session": session_id,
            "problem": problem_view(spec, runtime.network),
            "network": network_view(runtime.network),
        }

    def _runtime(self, session_id: str) -> tuple[SessionRuntime, threading.Lock]:
        with self._lock:
            if session_id not in self._sessions:
                raise SessionNotFound(f"unknown session {session_id!r}")
            return self._sessions[session_id], self._session_locks[session_id]

    def with_session(self, session_id: str, fn) -> dict:
        runtime, lock = self._runtime(session_id)
        with lock:
            result = fn(runtime)
            self._persist(runtime)
            return result

    def _persist(self, runtime: SessionRuntime) -> None:
        if self.config.log_dir is None:
            return
        path = Path(self.config.log_dir) / f"{runtime.session_id}.jsonl"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(runtime.export_log(), encoding="utf-8")


def error_body(code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message}}


def _status_for(exc: Exception) -> int:
    if isinstance(exc, ServiceError):
        return exc.http_status
    code = getattr(exc, "code", "")
    if isinstance(exc, UnknownPage):
        return 404
    if code in _CONFLICT_CODES:
        return 409
    return 400


def make_handler(hub: SessionHub):
    class Handler(BaseHTTPRequestHandler):
        server_version = "arctutor"

        def _send(self, status: int, payload, content_type="application/json") -> None:
            if isinstance(payload, (dict, list)):
                body = json.dumps(payload).encode("utf-8")
            elif isinstance(payload, str):
                body = payload.encode("utf-8")
            else:
                body = payload
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Access-Control-Allow-Methods",
                             "GET, POST, OPTIONS")
            self.end_headers()
            self.wfile.write(body)

        def _json_body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b"{}"
            try:
                doc = json.loads(raw or b"{}")
            except json.JSONDecodeError:
                raise BadRequest("request body is not valid JSON")
            if not isinstance(doc, dict):
                raise BadRequest("request body must be a JSON object")
            return doc

        def _dispatch(self, method: str) -> None:
            path = urlparse(self.path).path.rstrip("/")
            parts = [p for p in path.split("/") if p]
            try:
                result = self._route(method, parts)
            except Exception as exc:  # noqa: BLE001 - mapped to wire errors
                code = getattr(exc, "code", exc.__class__.__name__)
                self._send(_status_for(exc), error_body(code, str(exc)))
                return
            status = 201 if (method == "POST" and parts == ["sessions"]) else 200
            if isinstance(result, str):
                self._send(status, result, content_type="application/x-ndjson")
            else:
                self._send(status, result)

        def _route(self, method: str, parts: list[str]):
            if method == "GET" and parts == ["problems"]:
                return {"problems": hub.list_problems()}
            if method == "GET" and parts == ["models"]:
                return {"models": hub.list_models()}
            if method == "POST" and parts == ["sessions"]:
                body = self._json_body()
                if "problem" not in body or "model" not in body:
                    raise BadRequest("body needs problem and model ids")
                return hub.create_session(str(body["problem"]), str(body["model"]))
            if len(parts) >= 2 and parts[0] == "sessions":
                sid = parts[1]
                rest = parts[2:]
                if method == "POST" and rest == ["actions"]:
                    body = self._json_body()
                    if "action" not in body:
                        raise BadRequest("body needs an action")
                    subset = body.get("subset")
                    if subset is not None and not isinstance(subset, list):
                        raise BadRequest("subset must be an array of integers")
                    return hub.with_session(sid, lambda rt: rt.post_action(
                        str(body["action"]),
                        None if body.get("target") is None else str(body["target"]),
                        subset, body.get("t_ms")))
                if method == "GET" and len(rest) == 2 and rest[0] == "explanations":
                    return hub.with_session(
                        sid, lambda rt: rt.get_explanation(rest[1]))
                if (method == "POST" and len(rest) == 3
                        and rest[0] == "explanations" and rest[2] == "closed"):
                    body = self._json_body()
                    if "dwell_ms" not in body:
                        raise BadRequest("body needs dwell_ms")
                    return hub.with_session(sid, lambda rt: rt.post_page_closed(
                        rest[1], int(body["dwell_ms"])))
                if (method == "POST" and len(rest) == 3
                        and rest[0] == "explanations" and rest[2] == "feedback"):
                    return hub.with_session(
                        sid, lambda rt: rt.post_feedback(rest[1]))
                if method == "GET" and rest == ["stats"]:
                    return hub.with_session(sid, lambda rt: rt.stats())
                if method == "GET" and rest == ["log"]:
                    return hub.with_session(sid, lambda rt: rt.export_log())
                if method == "GET" and rest == ["digest"]:
                    return hub.with_session(sid, lambda rt: {"digest": rt.digest()})
            raise RouteNotFound(f"no route for {method} /{'/'.join(parts)}")

        def do_GET(self):  # noqa: N802 - stdlib name
            self._dispatch("GET")

        def do_POST(self):  # noqa: N802
            self._dispatch("POST")

        def do_OPTIONS(self):  # noqa: N802
            self._send(204, b"", content_type="text/plain")

        def log_message(self, fmt, *args):  # silence default request logging
            return

    return Handler


def serve(hub: SessionHub, host: str = "127.0.0.1", port: int = 8400,
          announce: bool = True) -> ThreadingHTTPServer:
    httpd = ThreadingHTTPServer((host, port), make_handler(hub))
    if announce:
        print(f"arctutor session service on http://{host}:{httpd.server_address[1]}")
    return httpd
