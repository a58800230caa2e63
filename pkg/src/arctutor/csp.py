"""AC-3 stepping engine over binary constraint networks.

The network exposes the six interaction tools of the tutoring interface:
fine step (one micro-phase of select/test/revise at a time), direct arc
click (all three phases on a chosen arc), auto arc consistency (run to the
fixpoint), domain split, backtrack, and reset.
"""
from __future__ import annotations

import copy
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional


class NetworkStatus(str, Enum):
    IN_PROGRESS = "InProgress"
    CONSISTENT = "Consistent"
    DOMAIN_WIPEOUT = "DomainWipeout"


class ArcState(str, Enum):
    UNTESTED = "Untested"
    CONSISTENT = "Consistent"
    STALE = "Stale"


class StepKind(str, Enum):
    ARC_SELECTED = "ArcSelected"
    ARC_TESTED = "ArcTested"
    VALUES_REMOVED = "ValuesRemoved"
    QUEUE_EMPTY = "QueueEmpty"


class CspError(Exception):
    """Base class for engine errors; `code` is stable for wire responses."""

    code = "CspError"


class InvalidArc(CspError):
    code = "InvalidArc"


class NotInProgress(CspError):
    code = "NotInProgress"


class ArcAlreadyConsistent(CspError):
    code = "ArcAlreadyConsistent"


class InvalidSubset(CspError):
    code = "InvalidSubset"


class NotConsistent(CspError):
    code = "NotConsistent"


class EmptyStack(CspError):
    code = "EmptyStack"


@dataclass(frozen=True)
class Constraint:
    """Binary constraint as an extensional set of allowed value pairs.

    `pairs` is ordered like `scope`; `text` keeps the source expression (or
    "pairs") for display.
    """

    scope: tuple[str, str]
    pairs: frozenset[tuple[int, int]]
    text: str

    def allows(self, variable: str, value: int, other_value: int) -> bool:
        if variable == self.scope[0]:
            return (value, other_value) in self.pairs
        return (other_value, value) in self.pairs

    def other(self, variable: str) -> str:
        return self.scope[1] if variable == self.scope[0] else self.scope[0]


@dataclass(frozen=True)
class Arc:
    variable: str
    constraint: int


@dataclass
class StepOutcome:
    kind: StepKind
    arc: Optional[int] = None
    removed: list[tuple[str, int]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "arc": self.arc,
            "removed": [[v, x] for v, x in self.removed],
        }


# Micro-phases of a fine step on the queue head.
_PHASE_SELECT, _PHASE_TEST, _PHASE_REVISE = 0, 1, 2


@dataclass
class _Snapshot:
    """Alternative branch kept for backtracking (stackless network copy)."""

    domains: dict[str, list[int]]
    arc_states: list[ArcState]
    queue: deque[int]
    phase: int
    status: NetworkStatus
    description: str


class Network:
    """Mutable AC-3 network; one instance per tutoring session.

    Constraints and arcs are immutable after construction; domains, arc
    states, the worklist queue, and the split stack evolve with the tools.
    """

    def __init__(self, variables: list[tuple[str, list[int]]],
                 constraints: list[Constraint]) -> None:
        self.variable_names = [name for name, _ in variables]
        self.initial_domains = {name: sorted(set(dom)) for name, dom in variables}
        self.constraints = list(constraints)
        # Two arcs per constraint, lexicographically smaller endpoint first.
        self.arcs: list[Arc] = []
        for ci, con in enumerate(self.constraints):
            a, b = sorted(con.scope)
            self.arcs.append(Arc(a, ci))
            self.arcs.append(Arc(b, ci))
        self._arcs_by_variable: dict[str, list[int]] = {n: [] for n in self.variable_names}
        for ai, arc in enumerate(self.arcs):
            con = self.constraints[arc.constraint]
            for name in con.scope:
                self._arcs_by_variable[name].append(ai)
        self.domains: dict[str, list[int]] = {}
        self.arc_states: list[ArcState] = []
        self.queue: deque[int] = deque()
        self.phase = _PHASE_SELECT
        self.status = NetworkStatus.IN_PROGRESS
        self.split_stack: list[_Snapshot] = []
        self.reset()

    # -- queries ----------------------------------------------------------

    def domain(self, variable: str) -> list[int]:
        return list(self.domains[variable])

    def arc_state(self, arc: int) -> ArcState:
        return self.arc_states[arc]

    def split_depth(self) -> int:
        return len(self.split_stack)

    def is_arc_consistent(self) -> bool:
        """True when every remaining value has support on every arc."""
        for ai, arc in enumerate(self.arcs):
            con = self.constraints[arc.constraint]
            other = con.other(arc.variable)
            for v in self.domains[arc.variable]:
                if not any(con.allows(arc.variable, v, w) for w in self.domains[other]):
                    return False
        return True

    # -- tools -------------------------------------------------------------

    def revise(self, arc_index: int) -> list[tuple[str, int]]:
        """Remove unsupported values of the arc's variable; returns removals.

        Marks the arc Consistent and re-enqueues arcs that may have lost
        support when values were pruned.
        """
        if not 0 <= arc_index < len(self.arcs):
            raise InvalidArc(f"arc index {arc_index} out of range")
        arc = self.arcs[arc_index]
        con = self.constraints[arc.constraint]
        other = con.other(arc.variable)
        other_domain = self.domains[other]
        kept, removed = [], []
        for v in self.domains[arc.variable]:
            if any(con.allows(arc.variable, v, w) for w in other_domain):
                kept.append(v)
            else:
                removed.append((arc.variable, v))
        self.arc_states[arc_index] = ArcState.CONSISTENT
        if removed:
            self.domains[arc.variable] = kept
            self._requeue_neighbors(arc.variable, arc.constraint)
            if not kept:
                self.status = NetworkStatus.DOMAIN_WIPEOUT
        return removed

    def _requeue_neighbors(self, variable: str, via_constraint: int) -> None:
        # Arcs on the other endpoint of every other constraint touching
        # `variable` may have lost support; values pruned here never
        # supported anything on `via_constraint` itself.
        for ai in self._arcs_by_variable[variable]:
            arc = self.arcs[ai]
            if arc.constraint == via_constraint or arc.variable == variable:
                continue
            if ai not in self.queue:
                self.arc_states[ai] = ArcState.STALE
                self.queue.append(ai)

    def fine_step(self) -> StepOutcome:
        """Advance one micro-phase (select, test, or revise) of AC-3."""
        if self.status is not NetworkStatus.IN_PROGRESS:
            raise NotInProgress(f"network is {self.status.value}")
        if not self.queue:
            self.status = (NetworkStatus.DOMAIN_WIPEOUT
                           if any(not d for d in self.domains.values())
                           else NetworkStatus.CONSISTENT)
            return StepOutcome(StepKind.QUEUE_EMPTY)
        head = self.queue[0]
        if self.phase == _PHASE_SELECT:
            self.phase = _PHASE_TEST
            return StepOutcome(StepKind.ARC_SELECTED, arc=head)
        if self.phase == _PHASE_TEST:
            self.phase = _PHASE_REVISE
            return StepOutcome(StepKind.ARC_TESTED, arc=head)
        self.phase = _PHASE_SELECT
        self.queue.popleft()
        removed = self.revise(head)
        if removed:
            return StepOutcome(StepKind.VALUES_REMOVED, arc=head, removed=removed)
        return StepOutcome(StepKind.ARC_TESTED, arc=head)

    def direct_arc_click(self, arc_index: int) -> StepOutcome:
        """Run all three fine-step phases on one chosen arc."""
        if not 0 <= arc_index < len(self.arcs):
            raise InvalidArc(f"arc index {arc_index} out of range")
        if self.status is not NetworkStatus.IN_PROGRESS:
            raise NotInProgress(f"network is {self.status.value}")
        if self.arc_states[arc_index] is ArcState.CONSISTENT:
            raise ArcAlreadyConsistent(f"arc {arc_index} is already consistent")
        try:
            self.queue.remove(arc_index)
        except ValueError:
            pass
        self.phase = _PHASE_SELECT
        removed = self.revise(arc_index)
        if removed:
            return StepOutcome(StepKind.VALUES_REMOVED, arc=arc_index, removed=removed)
        return StepOutcome(StepKind.ARC_TESTED, arc=arc_index)

    def auto_ac_steps(self) -> Iterator[StepOutcome]:
        """Fine step everything, yielding each micro-phase outcome."""
        while True:
            outcome = self.fine_step()
            yield outcome
            if outcome.kind is StepKind.QUEUE_EMPTY:
                return
            if self.status is not NetworkStatus.IN_PROGRESS:
                return

    def auto_ac(self) -> list[tuple[str, int]]:
        """Run to the arc-consistency fixpoint; returns all removals."""
        removed: list[tuple[str, int]] = []
        for outcome in self.auto_ac_steps():
            removed.extend(outcome.removed)
        return removed

    def domain_split(self, variable: str, subset: set[int]) -> str:
        """Narrow a variable to `subset`, stashing the complement branch.

        Returns a short description of the kept case.
        """
        if self.status is not NetworkStatus.CONSISTENT:
            raise NotConsistent(f"network is {self.status.value}")
        if variable not in self.domains:
            raise InvalidSubset(f"unknown variable {variable!r}")
        current = set(self.domains[variable])
        chosen = set(subset)
        if not chosen or chosen == current or not chosen <= current:
            raise InvalidSubset(
                f"subset must be a proper non-empty subset of {sorted(current)}")
        complement = sorted(current - chosen)
        snapshot = self._branch_snapshot(variable, complement)
        self.split_stack.append(snapshot)
        self.domains[variable] = sorted(chosen)
        self._enqueue_touching(variable)
        self.phase = _PHASE_SELECT
        self.status = NetworkStatus.IN_PROGRESS
        return f"{variable} in {{{', '.join(map(str, sorted(chosen)))}}}"

    def _branch_snapshot(self, variable: str, branch_domain: list[int]) -> _Snapshot:
        domains = {n: list(d) for n, d in self.domains.items()}
        domains[variable] = list(branch_domain)
        states = list(self.arc_states)
        queue: deque[int] = deque()
        for ai in self._touching(variable):
            states[ai] = ArcState.STALE
            queue.append(ai)
        return _Snapshot(
            domains=domains,
            arc_states=states,
            queue=queue,
            phase=_PHASE_SELECT,
            status=NetworkStatus.IN_PROGRESS,
            description=f"{variable} in {{{', '.join(map(str, branch_domain))}}}",
        )

    def _touching(self, variable: str) -> list[int]:
        seen: list[int] = []
        for ai in self._arcs_by_variable[variable]:
            if ai not in seen:
                seen.append(ai)
        return sorted(seen)

    def _enqueue_touching(self, variable: str) -> None:
        for ai in self._touching(variable):
            self.arc_states[ai] = ArcState.STALE
            if ai not in self.queue:
                self.queue.append(ai)

    def backtrack(self) -> str:
        """Pop the most recent split branch and make it active."""
        if not self.split_stack:
            raise EmptyStack("no split to backtrack to")
        snap = self.split_stack.pop()
        self.domains = {n: list(d) for n, d in snap.domains.items()}
        self.arc_states = list(snap.arc_states)
        self.queue = deque(snap.queue)
        self.phase = snap.phase
        self.status = snap.status
        return snap.description

    def reset(self) -> None:
        """Return to the freshly loaded problem."""
        self.domains = {n: list(d) for n, d in self.initial_domains.items()}
        self.arc_states = [ArcState.UNTESTED] * len(self.arcs)
        self.queue = deque(range(len(self.arcs)))
        self.phase = _PHASE_SELECT
        self.status = NetworkStatus.IN_PROGRESS
        self.split_stack = []

    # -- copies ------------------------------------------------------------

    def clone(self) -> "Network":
        dup = Network.__new__(Network)
        dup.variable_names = list(self.variable_names)
        dup.initial_domains = {n: list(d) for n, d in self.initial_domains.items()}
        dup.constraints = self.constraints
        dup.arcs = self.arcs
        dup._arcs_by_variable = self._arcs_by_variable
        dup.domains = {n: list(d) for n, d in self.domains.items()}
        dup.arc_states = list(self.arc_states)
        dup.queue = deque(self.queue)
        dup.phase = self.phase
        dup.status = self.status
        dup.split_stack = copy.deepcopy(self.split_stack)
        return dup


def solutions(variables: list[tuple[str, list[int]]],
              constraints: list[Constraint]) -> list[dict[str, int]]:
    """Exhaustively enumerate complete solutions (test oracle; desk scale)."""
    names = [n for n, _ in variables]
    out: list[dict[str, int]] = []

    def extend(i: int, partial: dict[str, int]) -> None:
        if i == len(names):
            out.append(dict(partial))
            return
        name = names[i]
        for v in variables[i][1]:
            partial[name] = v
            if all(_holds(con, partial) for con in constraints):
                extend(i + 1, partial)
        partial.pop(name, None)

    def _holds(con: Constraint, partial: dict[str, int]) -> bool:
        a, b = con.scope
        if a not in partial or b not in partial:
            return True
        return (partial[a], partial[b]) in con.pairs

    extend(0, {})
    return out
