"""Prefix-free Turing machines: text format, canonical input enumeration,
and step-bounded execution on a one-way-infinite tape.

Machines are deterministic, use the alphabet {0, 1, blank}, and live on a
single right-infinite tape filled with blanks beyond the input.  Budgets
are explicit everywhere: a bounded run can certify halting, never
non-halting (two provably-infinite loop shapes are short-circuited, which
changes nothing observable).
"""

from __future__ import annotations

from dataclasses import dataclass

from .dyadic import BitString

__all__ = [
    "BLANK",
    "MOVES",
    "MachineSpec",
    "MachineParseError",
    "ExecutionResult",
    "parse_machine",
    "load_machine",
    "format_machine",
    "enumerate_input",
    "input_index",
    "run_bounded",
    "check_prefix_free_up_to",
]

BLANK = "_"
SYMBOLS = ("0", "1", BLANK)
MOVES = ("L", "R", "S")

Rule = tuple[str, str, str, str, str]  # state, read, next_state, write, move


class MachineParseError(ValueError):
    """Raised on malformed machine files; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MachineSpec:
    """A deterministic machine: states, start/halt, and a total rule table.

    Immutable after construction and hashable, so results keyed on a
    machine (e.g. cached halting-probability stages) stay coherent.
    """

    __slots__ = ("name", "start", "halt", "rules", "_rule_map", "_hash")

    def __init__(self, name: str, start: str, halt: str, rules: tuple[Rule, ...]):
        rule_map: dict[tuple[str, str], tuple[str, str, str]] = {}
        for state, read, nxt, write, move in rules:
            key = (state, read)
            if key in rule_map:
                raise MachineParseError(f"duplicate rule for {state} {read}")
            rule_map[key] = (nxt, write, move)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "halt", halt)
        object.__setattr__(self, "rules", tuple(sorted(rules)))
        object.__setattr__(self, "_rule_map", rule_map)
        object.__setattr__(self, "_hash", hash((name, start, halt, self.rules)))
        self._validate()

    def __setattr__(self, name: str, value: object) -> None:  # pragma: no cover
        raise AttributeError("MachineSpec is immutable")

    def _validate(self) -> None:
        states = self.states
        for state, read, nxt, write, move in self.rules:
            if read not in SYMBOLS or write not in SYMBOLS:
                raise MachineParseError(f"bad symbol in rule {state} {read}")
            if move not in MOVES:
                raise MachineParseError(f"bad move {move!r} in rule {state} {read}")
            if state == self.halt:
                raise MachineParseError("halt state must have no outgoing rules")
        if self.start not in states:
            raise MachineParseError(f"start state {self.start!r} has no rules")
        for state in states:
            if state == self.halt:
                continue
            for sym in SYMBOLS:
                if (state, sym) not in self._rule_map:
                    raise MachineParseError(
                        f"transition table not total: missing {state} {sym}"
                    )

    @property
    def states(self) -> frozenset[str]:
        found = {self.start, self.halt}
        for state, _, nxt, _, _ in self.rules:
            found.add(state)
            found.add(nxt)
        return frozenset(found)

    def step(self, state: str, read: str) -> tuple[str, str, str]:
        return self._rule_map[(state, read)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MachineSpec):
            return NotImplemented
        return (self.name, self.start, self.halt, self.rules) == (
            other.name,
            other.start,
            other.halt,
            other.rules,
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"MachineSpec({self.name!r}, states={len(self.states)})"


def parse_machine(text: str, name: str = "unnamed") -> MachineSpec:
    """Parse the line-oriented machine format.

    Headers ``start: <state>`` and ``halt: <state>`` (plus optional
    ``name:``), then one rule per line::

        state symbol -> state symbol move

    Symbols are 0, 1, or ``_`` for blank; moves are L, R, S.  Duplicate
    rules, unknown symbols, and missing headers are rejected with the
    offending line number.
    """
    start = halt = None
    rules: list[Rule] = []
    seen: dict[tuple[str, str], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" in line and "->" not in line:
            key, _, value = line.partition(":")
            key, value = key.strip(), value.strip()
            if key == "name":
                name = value
            elif key == "start":
                start = value
            elif key == "halt":
                halt = value
            else:
                raise MachineParseError(f"unknown header {key!r}", lineno)
            continue
        if "->" not in line:
            raise MachineParseError(f"expected 'state symbol -> state symbol move'", lineno)
        lhs, _, rhs = line.partition("->")
        lhs_parts = lhs.split()
        rhs_parts = rhs.split()
        if len(lhs_parts) != 2 or len(rhs_parts) != 3:
            raise MachineParseError(f"malformed rule {line!r}", lineno)
        state, read = lhs_parts
        nxt, write, move = rhs_parts
        if read not in SYMBOLS or write not in SYMBOLS:
            raise MachineParseError(f"symbol must be one of 0, 1, _", lineno)
        if move not in MOVES:
            raise MachineParseError(f"move must be one of L, R, S", lineno)
        if (state, read) in seen:
            raise MachineParseError(
                f"duplicate rule for ({state}, {read}); first at line {seen[(state, read)]}",
                lineno,
            )
        seen[(state, read)] = lineno
        rules.append((state, read, nxt, write, move))
    if start is None:
        raise MachineParseError("missing 'start:' header")
    if halt is None:
        raise MachineParseError("missing 'halt:' header")
    return MachineSpec(name, start, halt, tuple(rules))


def load_machine(path) -> MachineSpec:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    name = str(path).rsplit("/", 1)[-1].removesuffix(".tm")
    return parse_machine(text, name=name)


def format_machine(spec: MachineSpec) -> str:
    lines = [f"name: {spec.name}", f"start: {spec.start}", f"halt: {spec.halt}"]
    for state, read, nxt, write, move in spec.rules:
        lines.append(f"{state} {read} -> {nxt} {write} {move}")
    return "\n".join(lines) + "\n"


def enumerate_input(i: int) -> BitString:
    """The i-th word (i >= 1) in length-then-lexicographic order.

    x_1 is the empty word, x_2 = "0", x_3 = "1", x_4 = "00", ...; this is
    the bijection stripping the leading 1 from the binary form of i.
    """
    if i < 1:
        raise ValueError(f"input index must be >= 1, got {i}")
    return BitString(bin(i)[3:])


def input_index(word: BitString) -> int:
    """Inverse of :func:`enumerate_input`."""
    return int("1" + str(word), 2)


@dataclass(frozen=True)
class ExecutionResult:
    halted: bool
    steps_used: int
    cells_used: int


def run_bounded(spec: MachineSpec, word: BitString, budget: int) -> ExecutionResult:
    """Run ``spec`` on ``word`` for at most ``budget`` steps.

    Applying one transition costs one step; the run reports halted=True
    iff the halt state is entered within the budget.  Two provably
    non-terminating shapes (a stay-in-place self loop, and running right
    forever over fresh blanks) are detected and short-circuited; the
    reported step/cell counts equal those of the full simulation.

    A left move at cell 0 leaves the head in place (one-way tape).
    """
    if budget < 0:
        raise ValueError(f"step budget must be >= 0, got {budget}")
    tape = list(str(word))
    head = 0
    state = spec.start
    max_visited = 0
    steps = 0
    frontier = len(tape)  # cells >= frontier were never written
    while steps < budget and state != spec.halt:
        read = tape[head] if head < len(tape) else BLANK
        nxt, write, move = spec.step(state, read)
        if nxt == state and move == "S" and write == read:
            # self loop: identical configuration next step, never halts
            return ExecutionResult(False, budget, max_visited + 1)
        if (
            nxt == state
            and move == "R"
            and read == BLANK
            and head >= frontier
        ):
            # runs right over fresh blanks forever; one new cell per step
            last_cell = head + (budget - steps)
            return ExecutionResult(False, budget, max(max_visited, last_cell) + 1)
        while head >= len(tape):
            tape.append(BLANK)
        tape[head] = write
        if write != BLANK:
            frontier = max(frontier, head + 1)
        if move == "R":
            head += 1
        elif move == "L":
            head = max(0, head - 1)
        max_visited = max(max_visited, head)
        steps += 1
        state = nxt
    return ExecutionResult(state == spec.halt, steps, max_visited + 1)


def check_prefix_free_up_to(
    spec: MachineSpec, budget: int, max_branches: int = 200_000
) -> list[tuple[str, str]]:
    """Search for prefix violations among inputs halting within ``budget``.

    Considers every input of length <= budget by exploring the machine's
    input-reading decision tree (cells are fixed lazily as the head first
    visits them, with an extra branch for "the input ends here"), so no
    2^budget enumeration happens.  Returns all pairs (x, y) with x a
    proper prefix of y among the discovered halting inputs; if a run
    halts without ever reading past its fixed prefix w, every extension
    of w also halts and the canonical witness (w, w + "0") is reported.

    An empty list means no violation was detected within the budget; it
    is not a proof of prefix-freeness.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")

    # config: (state, head, steps, tape overlay, fixed input prefix, input_end)
    start = (spec.start, 0, 0, {}, "", None)
    stack = [start]
    halting_exact: set[str] = set()
    halting_cylinder: set[str] = set()
    branches = 0

    while stack:
        branches += 1
        if branches > max_branches:
            raise RuntimeError(
                f"input decision tree exceeded {max_branches} branches; "
                "machine reads too much input for this budget"
            )
        state, head, steps, tape, prefix, end = stack.pop()
        while True:
            if state == spec.halt:
                if end is None:
                    halting_cylinder.add(prefix)
                else:
                    halting_exact.add(prefix)
                break
            if steps >= budget:
                break
            if head in tape:
                read = tape[head]
            elif end is not None and head >= end:
                read = BLANK
            elif head < len(prefix):
                read = prefix[head]
            else:
                # fresh input cell: branch on its contents / end of input
                assert head == len(prefix)
                if head < budget:  # inputs longer than the budget are out of scope
                    stack.append((state, head, steps, dict(tape), prefix + "0", None))
                    stack.append((state, head, steps, dict(tape), prefix + "1", None))
                stack.append((state, head, steps, dict(tape), prefix, head))
                break
            nxt, write, move = spec.step(state, read)
            if nxt == state and move == "S" and write == read:
                break  # provable loop
            new_tape = dict(tape)
            new_tape[head] = write
            tape = new_tape
            if move == "R":
                head += 1
            elif move == "L":
                head = max(0, head - 1)
            steps += 1
            state = nxt

    violations: set[tuple[str, str]] = set()
    found = sorted(halting_exact | halting_cylinder, key=lambda w: (len(w), w))
    for i, x in enumerate(found):
        for y in found[i + 1 :]:
            if len(x) < len(y) and y.startswith(x):
                violations.add((x, y))
    for w in halting_cylinder:
        if len(w) < budget:
            violations.add((w, w + "0"))
    return sorted(violations, key=lambda p: (len(p[0]), p[0], len(p[1]), p[1]))
