"""Problem files, constraint expressions, and network snapshots.

Problem documents are JSON: top-level `name`, `variables` (array of
`{name, domain}`), and `constraints` (array of `{expr}` or
`{scope, pairs}`). Expression constraints use the grammar
`VAR op VAR (("+"|"-") INT)?` with op one of < <= > >= = !=.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from itertools import product
from typing import Union

from .csp import ArcState, Constraint, Network


class ProblemError(Exception):
    code = "ProblemError"


class ExpressionSyntaxError(ProblemError):
    code = "SyntaxError"

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownOperator(ProblemError):
    code = "UnknownOperator"


class SelfReference(ProblemError):
    code = "SelfReference"


class DuplicateVariable(ProblemError):
    code = "DuplicateVariable"


class UnknownVariable(ProblemError):
    code = "UnknownVariable"


class EmptyDomain(ProblemError):
    code = "EmptyDomain"


class MalformedDocument(ProblemError):
    code = "MalformedDocument"


_OPERATORS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_]\w*)|(?P<op>[<>!=]=|[<>=])"
                    r"|(?P<sign>[+-])|(?P<int>\d+))")


@dataclass(frozen=True)
class ConstraintExpr:
    """`lhs op (rhs + offset)` over two distinct variables."""

    lhs: str
    op: str
    rhs: str
    offset: int = 0

    def holds(self, lhs_value: int, rhs_value: int) -> bool:
        return _OPERATORS[self.op](lhs_value, rhs_value + self.offset)

    def text(self) -> str:
        if self.offset == 0:
            return f"{self.lhs} {self.op} {self.rhs}"
        sign = "+" if self.offset > 0 else "-"
        return f"{self.lhs} {self.op} {self.rhs} {sign} {abs(self.offset)}"


ConstraintSpec = Union[ConstraintExpr, tuple[tuple[str, str], list[tuple[int, int]]]]


@dataclass
class ProblemSpec:
    name: str
    variables: list[tuple[str, list[int]]]
    constraints: list[ConstraintSpec] = field(default_factory=list)


def _scan(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            rest = text[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise ExpressionSyntaxError(f"unexpected character {text[bad]!r}", bad)
        for kind in ("ident", "op", "sign", "int"):
            if m.group(kind) is not None:
                tokens.append((kind, m.group(kind), m.start(kind)))
                break
        pos = m.end()
    return tokens


def parse_expression(text: str) -> ConstraintExpr:
    """Parse `VAR op VAR (("+"|"-") INT)?`, whitespace-insensitive."""
    tokens = _scan(text)
    if not tokens:
        raise ExpressionSyntaxError("empty expression", 0)

    def expect(i: int, kind: str, what: str) -> tuple[str, str, int]:
        if i >= len(tokens):
            raise ExpressionSyntaxError(f"expected {what}", len(text))
        if tokens[i][0] != kind:
            raise ExpressionSyntaxError(f"expected {what}", tokens[i][2])
        return tokens[i]

    _, lhs, _ = expect(0, "ident", "variable name")
    kind, op, op_at = tokens[1] if len(tokens) > 1 else ("", "", len(text))
    if kind != "op":
        raise ExpressionSyntaxError("expected comparison operator", op_at)
    if op not in _OPERATORS:
        raise UnknownOperator(f"unknown operator {op!r}")
    _, rhs, _ = expect(2, "ident", "variable name")
    offset = 0
    if len(tokens) > 3:
        _, sign, _ = expect(3, "sign", "'+' or '-'")
        _, digits, _ = expect(4, "int", "integer offset")
        if len(tokens) > 5:
            raise ExpressionSyntaxError("trailing input", tokens[5][2])
        offset = int(digits) if sign == "+" else -int(digits)
    if lhs == rhs:
        raise SelfReference(f"{lhs!r} compared with itself")
    return ConstraintExpr(lhs=lhs, op=op, rhs=rhs, offset=offset)


def load_problem(text: str) -> ProblemSpec:
    """Parse and validate a problem document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise MalformedDocument("top level must be an object")
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise MalformedDocument("missing problem name")
    raw_vars = doc.get("variables")
    if not isinstance(raw_vars, list) or not raw_vars:
        raise MalformedDocument("missing variables array")
    variables: list[tuple[str, list[int]]] = []
    declared: dict[str, list[int]] = {}
    for entry in raw_vars:
        if not isinstance(entry, dict) or "name" not in entry or "domain" not in entry:
            raise MalformedDocument("variable entries need name and domain")
        vname, domain = entry["name"], entry["domain"]
        if not isinstance(vname, str) or not vname:
            raise MalformedDocument("variable name must be a non-empty string")
        if vname in declared:
            raise DuplicateVariable(f"variable {vname!r} declared twice")
        if not isinstance(domain, list) or not domain:
            raise EmptyDomain(f"variable {vname!r} has an empty domain")
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in domain):
            raise MalformedDocument(f"domain of {vname!r} must be integers")
        values = sorted(set(domain))
        declared[vname] = values
        variables.append((vname, values))

    raw_cons = doc.get("constraints", [])
    if not isinstance(raw_cons, list):
        raise MalformedDocument("constraints must be an array")
    constraints: list[ConstraintSpec] = []
    for entry in raw_cons:
        if not isinstance(entry, dict):
            raise MalformedDocument("constraint entries must be objects")
        if "expr" in entry:
            expr = parse_expression(str(entry["expr"]))
            for side in (expr.lhs, expr.rhs):
                if side not in declared:
                    raise UnknownVariable(f"constraint names undeclared variable {side!r}")
            constraints.append(expr)
        elif "pairs" in entry:
            scope = entry.get("scope")
            if (not isinstance(scope, list) or len(scope) != 2
                    or not all(isinstance(s, str) for s in scope)):
                raise MalformedDocument("extensional constraint needs a two-name scope")
            a, b = scope
            if a == b:
                raise MalformedDocument(f"scope names must be distinct, got {a!r} twice")
            for side in (a, b):
                if side not in declared:
                    raise UnknownVariable(f"constraint names undeclared variable {side!r}")
            pairs: list[tuple[int, int]] = []
            for pair in entry["pairs"]:
                if not (isinstance(pair, list) and len(pair) == 2
                        and all(isinstance(v, int) and not isinstance(v, bool) for v in pair)):
                    raise MalformedDocument("pairs must be two-integer arrays")
                if pair[0] not in declared[a] or pair[1] not in declared[b]:
                    raise MalformedDocument(
                        f"pair {pair} outside declared domains of {a!r}x{b!r}")
                pairs.append((pair[0], pair[1]))
            constraints.append(((a, b), pairs))
        else:
            raise MalformedDocument("constraint entries need expr or pairs")
    return ProblemSpec(name=name, variables=variables, constraints=constraints)


def compile_network(spec: ProblemSpec) -> Network:
    """Lower a validated problem to a network with extensional constraints."""
    domains = dict(spec.variables)
    constraints: list[Constraint] = []
    for con in spec.constraints:
        if isinstance(con, ConstraintExpr):
            scope = (con.lhs, con.rhs)
            pairs = frozenset(
                (a, b)
                for a, b in product(domains[con.lhs], domains[con.rhs])
                if con.holds(a, b)
            )
            constraints.append(Constraint(scope=scope, pairs=pairs, text=con.text()))
        else:
            scope, pair_list = con
            constraints.append(Constraint(
                scope=scope, pairs=frozenset(pair_list), text="pairs"))
    return Network(spec.variables, constraints)


def load_and_compile(text: str) -> Network:
    return compile_network(load_problem(text))


def snapshot(net: Network) -> dict:
    """State snapshot: domains, arc states, queue order, split depth."""
    return {
        "domains": {name: list(net.domains[name]) for name in net.variable_names},
        "arc_states": [s.value for s in net.arc_states],
        "queue": list(net.queue),
        "split_depth": net.split_depth(),
    }


def restore(spec: ProblemSpec, snap: dict) -> Network:
    """Rebuild a network from a problem plus a snapshot.

    Split branches are not part of the snapshot format, so the restored
    network starts with an empty split stack.
    """
    net = compile_network(spec)
    for name in net.variable_names:
        if name not in snap["domains"]:
            raise MalformedDocument(f"snapshot missing domain for {name!r}")
        net.domains[name] = sorted(int(v) for v in snap["domains"][name])
    states = snap["arc_states"]
    if len(states) != len(net.arcs):
        raise MalformedDocument("snapshot arc_states length mismatch")
    net.arc_states = [ArcState(s) for s in states]
    net.queue.clear()
    net.queue.extend(int(i) for i in snap["queue"])
    if any(not d for d in net.domains.values()):
        net.status = net.status.DOMAIN_WIPEOUT
    elif not net.queue:
        net.status = net.status.CONSISTENT
    return net


def problem_view(spec: ProblemSpec, net: Network) -> dict:
    """Static structure served once per session for rendering."""
    return {
        "name": spec.name,
        "variables": [{"name": n, "domain": list(d)} for n, d in spec.variables],
        "constraints": [
            {"scope": list(c.scope), "text": c.text} for c in net.constraints
        ],
        "arcs": [
            {"variable": a.variable, "constraint": a.constraint} for a in net.arcs
        ],
    }
