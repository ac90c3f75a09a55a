"""Reversible-gate IR: typed qubits, gates with control polarities, circuits.

The gate set is deliberately small. X/CX/CCX are the usual reversible
primitives. AND / AND_DAGGER are Toffolis onto a known-zero clean ancilla
and their measurement-assisted uncompute; they are distinct kinds because
their cost and simulation contracts differ from CCX. MCX_REF and QROM_REF
are single-gate reference oracles used only for equivalence checking, never
for costing.
"""
from __future__ import annotations

from dataclasses import dataclass, field

# Qubit roles.
SYSTEM = "system"
TARGET = "target"
CLEAN = "clean_ancilla"
DIRTY = "dirty_ancilla"
ROLES = (SYSTEM, TARGET, CLEAN, DIRTY)

# Gate kinds.
X = "X"
CX = "CX"
CCX = "CCX"
AND = "AND"
AND_DAGGER = "AND_DAGGER"
MCX_REF = "MCX_REF"
QROM_REF = "QROM_REF"
KINDS = (X, CX, CCX, AND, AND_DAGGER, MCX_REF, QROM_REF)

_CONTROL_ARITY = {X: 0, CX: 1, CCX: 2, AND: 2, AND_DAGGER: 2}


class CircuitError(ValueError):
    """Raised for malformed gates, circuits or circuit text."""


@dataclass(frozen=True)
class QubitRef:
    """A qubit identified by its position in the circuit's global ordering.

    ``index`` 0 is the least significant bit of simulator enumeration
    integers. ``role`` is declarative metadata consumed by the verifier:
    clean ancillae must start and end at 0, dirty ancillae are enumerated
    over both initial values and must be restored.
    """

    index: int
    role: str = SYSTEM

    def __post_init__(self):
        if self.index < 0:
            raise CircuitError(f"negative qubit index {self.index}")
        if self.role not in ROLES:
            raise CircuitError(f"unknown role {self.role!r}")


@dataclass(frozen=True)
class Gate:
    """One reversible gate.

    ``controls`` is a tuple of (QubitRef, positive) pairs; ``positive``
    False marks an open (negated) control. ``payload`` carries the data
    words for QROM_REF and is None otherwise.
    """

    kind: str
    controls: tuple = ()
    targets: tuple = ()
    payload: tuple | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        arity = _CONTROL_ARITY.get(self.kind)
        if arity is not None and len(self.controls) != arity:
            raise CircuitError(
                f"{self.kind} takes {arity} controls, got {len(self.controls)}")
        if self.kind == MCX_REF and not self.controls:
            raise CircuitError("MCX_REF needs at least one control")
        n_targets = len(self.targets)
        if self.kind == QROM_REF:
            if not self.targets:
                raise CircuitError("QROM_REF needs target qubits")
            if self.payload is None or len(self.payload) != 2 ** len(self.controls):
                raise CircuitError("QROM_REF payload must hold 2^n_sel words")
            if any(not p for _, p in self.controls):
                raise CircuitError("QROM_REF selection controls must be positive")
        elif n_targets != 1:
            raise CircuitError(f"{self.kind} takes exactly one target")
        if self.kind in (AND, AND_DAGGER):
            if self.targets[0].role != CLEAN:
                raise CircuitError(f"{self.kind} target must be a clean ancilla")
        ctrl_idx = [q.index for q, _ in self.controls]
        tgt_idx = [q.index for q in self.targets]
        if len(set(ctrl_idx + tgt_idx)) != len(ctrl_idx) + len(tgt_idx):
            raise CircuitError("controls and targets must be pairwise disjoint")

    @property
    def support(self) -> frozenset[int]:
        return frozenset(q.index for q, _ in self.controls) | frozenset(
            q.index for q in self.targets)


def gate(kind, controls=(), target=None, targets=None, payload=None) -> Gate:
    """Convenience constructor; bare QubitRefs in ``controls`` mean positive."""
    ctl = tuple((c, True) if isinstance(c, QubitRef) else (c[0], c[1])
                for c in controls)
    if targets is None:
        targets = (target,) if target is not None else ()
    return Gate(kind, ctl, tuple(targets), payload)


@dataclass
class Circuit:
    """An ordered gate list over a registered qubit table.

    Circuits are immutable by convention once built: builders append via
    ``add`` during construction and nothing mutates afterwards, so instances
    are safe to share across threads.
    """

    name: str = ""
    qubits: dict[int, QubitRef] = field(default_factory=dict)
    gates: list[Gate] = field(default_factory=list)

    def add_qubit(self, q: QubitRef) -> QubitRef:
        prev = self.qubits.get(q.index)
        if prev is not None and prev.role != q.role:
            raise CircuitError(
                f"qubit {q.index} registered as {prev.role}, redeclared {q.role}")
        self.qubits[q.index] = q
        return q

    def new_qubit(self, role: str) -> QubitRef:
        idx = max(self.qubits) + 1 if self.qubits else 0
        return self.add_qubit(QubitRef(idx, role))

    def add(self, g: Gate) -> None:
        for q in [c for c, _ in g.controls] + list(g.targets):
            known = self.qubits.get(q.index)
            if known is None:
                raise CircuitError(f"gate uses unregistered qubit {q.index}")
            if known.role != q.role:
                raise CircuitError(
                    f"gate uses qubit {q.index} as {q.role}, registered {known.role}")
        self.gates.append(g)

    @property
    def width(self) -> int:
        return max(self.qubits) + 1 if self.qubits else 0

    def qubits_by_role(self, role: str) -> list[QubitRef]:
        return [q for _, q in sorted(self.qubits.items()) if q.role == role]

    def __len__(self) -> int:
        return len(self.gates)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Circuit) and self.qubits == other.qubits
                and self.gates == other.gates)


def compose(a: Circuit, b: Circuit, name: str = "") -> Circuit:
    """Concatenate gate lists; register tables merge and must agree on roles."""
    out = Circuit(name or a.name)
    for src in (a, b):
        for _, q in sorted(src.qubits.items()):
            out.add_qubit(q)
    out.gates = list(a.gates) + list(b.gates)
    return out


_INVERSE_KIND = {AND: AND_DAGGER, AND_DAGGER: AND}


def inverse(c: Circuit) -> Circuit:
    """Reverse gate order; X/CX/CCX/MCX_REF/QROM_REF are self-inverse,
    AND and AND_DAGGER swap."""
    out = Circuit(c.name + "^-1" if c.name else "")
    out.qubits = dict(c.qubits)
    out.gates = [
        Gate(_INVERSE_KIND.get(g.kind, g.kind), g.controls, g.targets, g.payload)
        for g in reversed(c.gates)
    ]
    return out


def emit_text(c: Circuit) -> str:
    """Serialize to the line format.

    One ``QUBIT <index> <role>`` line per qubit, then one line per gate:
    ``KIND c c~ ; t t`` with ``~`` marking an open control. QROM_REF carries
    its payload as hex words after a ``|``.
    """
    lines = []
    if c.name:
        lines.append(f"# {c.name}")
    for idx, q in sorted(c.qubits.items()):
        lines.append(f"QUBIT {idx} {q.role}")
    for g in c.gates:
        ctl = " ".join(f"{q.index}{'' if pos else '~'}" for q, pos in g.controls)
        tgt = " ".join(str(q.index) for q in g.targets)
        line = f"{g.kind} {ctl} ; {tgt}" if ctl else f"{g.kind} ; {tgt}"
        if g.kind == QROM_REF:
            line += " | " + " ".join(f"{w:x}" for w in g.payload)
        lines.append(line)
    return "\n".join(lines) + "\n"


def parse_text(text: str) -> Circuit:
    """Parse the emit_text format back into a Circuit."""
    c = Circuit()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            c_or_g = _parse_line(line, c)
        except CircuitError as e:
            raise CircuitError(f"line {lineno}: {e}") from None
        if isinstance(c_or_g, Gate):
            c.add(c_or_g)
    return c


def _parse_line(line: str, c: Circuit):
    parts = line.split()
    if parts[0] == "QUBIT":
        if len(parts) != 3:
            raise CircuitError("QUBIT line needs index and role")
        idx = int(parts[1])
        if idx in c.qubits:
            raise CircuitError(f"duplicate qubit index {idx}")
        return c.add_qubit(QubitRef(idx, parts[2]))
    kind = parts[0]
    if kind not in KINDS:
        raise CircuitError(f"unknown gate kind {kind!r}")
    payload = None
    body = line[len(kind):]
    if "|" in body:
        body, _, tail = body.partition("|")
        payload = tuple(int(w, 16) for w in tail.split())
    if ";" not in body:
        raise CircuitError("missing ';' separator")
    ctl_part, _, tgt_part = body.partition(";")

    def ref(tok: str) -> QubitRef:
        idx = int(tok)
        if idx not in c.qubits:
            raise CircuitError(f"gate uses unregistered qubit {idx}")
        return c.qubits[idx]

    controls = []
    for tok in ctl_part.split():
        if tok.endswith("~"):
            controls.append((ref(tok[:-1]), False))
        else:
            controls.append((ref(tok), True))
    targets = tuple(ref(tok) for tok in tgt_part.split())
    return Gate(kind, tuple(controls), targets, payload)
