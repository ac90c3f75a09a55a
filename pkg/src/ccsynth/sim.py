"""Exhaustive basis-state simulation and ancilla-contract verification.

Every gate in the IR permutes computational basis states, so circuits are
simulated as classical bit operations, vectorized with numpy across the
whole enumerated state space at once. ``verify`` enumerates every
system/target input combined with every dirty-ancilla assignment (clean
ancillae start at 0) and checks: no AND/AND_DAGGER contract faults, the
system output matches the oracle, clean ancillae end at 0 and dirty
ancillae are restored.

Bit order: QubitRef.index 0 is the least significant bit of enumeration
integers.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .circuit import (AND, AND_DAGGER, CCX, CLEAN, CX, DIRTY, MCX_REF,
                      QROM_REF, SYSTEM, TARGET, X, Circuit, Gate)

DEFAULT_MAX_STATES = 2 ** 24
_CHUNK = 2 ** 20

FAULT_DIRTY_AND_TARGET = "dirty_and_target"
FAULT_UNCOMPUTE_MISMATCH = "uncompute_mismatch"
FAULT_ORACLE_MISMATCH = "oracle_mismatch"
FAULT_CLEAN_NOT_RESTORED = "clean_not_restored"
FAULT_DIRTY_NOT_RESTORED = "dirty_not_restored"


class EnumerationLimit(RuntimeError):
    """State space exceeds the configured enumeration limit."""


class SimFault(RuntimeError):
    """A gate contract violation hit during scalar simulation."""

    def __init__(self, kind: str, gate_index: int, state: "BasisState"):
        super().__init__(f"{kind} at gate {gate_index}, state {state.bits()}")
        self.kind = kind
        self.gate_index = gate_index
        self.state = state


@dataclass(frozen=True)
class BasisState:
    """A computational basis state of ``width`` qubits, packed little-endian."""

    value: int
    width: int

    def bit(self, index: int) -> int:
        return (self.value >> index) & 1

    def with_bit(self, index: int, b: int) -> "BasisState":
        v = (self.value & ~(1 << index)) | ((b & 1) << index)
        return BasisState(v, self.width)

    def bits(self) -> str:
        return format(self.value, f"0{self.width}b")


@dataclass
class VerificationSpec:
    """What ``verify`` must hold a circuit to.

    ``oracle`` maps the packed value of the oracle register (system and
    target qubits, ascending index, index order = bit order) to its expected
    output value; it is called with a numpy uint64 vector. ``dirty_universal``
    enumerates every dirty-ancilla initial assignment; otherwise dirty
    ancillae start at 0 (restore is still checked).
    """

    oracle: Callable[[np.ndarray], np.ndarray]
    dirty_universal: bool = True
    restore: bool = True


@dataclass(frozen=True)
class Counterexample:
    state: BasisState
    gate_index: int
    fault: str

    def __str__(self) -> str:
        return f"state={self.state.bits()} gate={self.gate_index} fault={self.fault}"


@dataclass(frozen=True)
class Verdict:
    ok: bool
    states_checked: int
    counterexample: Counterexample | None = None

    def __str__(self) -> str:
        if self.ok:
            return f"pass states={self.states_checked}"
        return f"fail {self.counterexample}"


def _ctrl_bits(cols, q, positive):
    v = cols[q.index]
    return v if positive else ~v


def _conjunction(cols, controls):
    acc = None
    for q, positive in controls:
        v = _ctrl_bits(cols, q, positive)
        acc = v if acc is None else acc & v
    return acc


def apply_gate_vector(g: Gate, cols: dict[int, np.ndarray],
                      check: bool = False):
    """Apply one gate across all states in ``cols`` (index -> bool vector).

    Returns a fault (kind, mask) pair when ``check`` is set and the gate's
    precondition is violated somewhere, else None. AND/AND_DAGGER act as a
    Toffoli on the full space; the contract checks are what distinguishes
    them.
    """
    fault = None
    if g.kind == X:
        t = g.targets[0].index
        cols[t] = ~cols[t]
        return None
    if g.kind == QROM_REF:
        sel = None
        for j, (q, _) in enumerate(g.controls):
            contrib = cols[q.index].astype(np.uint32) << np.uint32(j)
            sel = contrib if sel is None else sel | contrib
        words = np.take(np.asarray(g.payload, dtype=np.uint64), sel)
        for k, tq in enumerate(g.targets):
            cols[tq.index] ^= (words >> np.uint64(k)) & np.uint64(1) != 0
        return None
    conj = _conjunction(cols, g.controls)
    t = g.targets[0].index
    if check and g.kind == AND:
        bad = cols[t]
        if bad.any():
            fault = (FAULT_DIRTY_AND_TARGET, bad.copy())
    elif check and g.kind == AND_DAGGER:
        bad = cols[t] ^ conj
        if bad.any():
            fault = (FAULT_UNCOMPUTE_MISMATCH, bad.copy())
    if g.kind in (CX, CCX, AND, AND_DAGGER, MCX_REF):
        cols[t] = cols[t] ^ conj
    return fault


def apply_gate(g: Gate, s: BasisState) -> BasisState:
    """Scalar single-state semantics; raises SimFault(gate_index=-1) on
    contract violation."""
    cols = {i: np.array([bool((s.value >> i) & 1)]) for i in range(s.width)}
    fault = apply_gate_vector(g, cols, check=True)
    if fault is not None:
        raise SimFault(fault[0], -1, s)
    v = sum(int(cols[i][0]) << i for i in range(s.width))
    return BasisState(v, s.width)


def run(c: Circuit, s0: BasisState) -> BasisState:
    """Fold apply_gate over the circuit; faults carry the gate index."""
    s = s0
    for i, g in enumerate(c.gates):
        try:
            s = apply_gate(g, s)
        except SimFault as f:
            raise SimFault(f.kind, i, f.state) from None
    return s


def _enumeration_plan(c: Circuit):
    free = [q for _, q in sorted(c.qubits.items()) if q.role != CLEAN]
    oracle_reg = [q for _, q in sorted(c.qubits.items())
                  if q.role in (SYSTEM, TARGET)]
    clean = c.qubits_by_role(CLEAN)
    dirty = c.qubits_by_role(DIRTY)
    return free, oracle_reg, clean, dirty


def verify(c: Circuit, spec: VerificationSpec,
           max_states: int = DEFAULT_MAX_STATES,
           jobs: int = 1) -> Verdict:
    """Exhaustively check ``c`` against ``spec``.

    Enumeration is chunked; ``jobs`` only sizes the chunking (results are
    merged by lowest state index, so the outcome is independent of it).
    """
    free, oracle_reg, clean, dirty = _enumeration_plan(c)
    enum_bits = [q for q in free if q.role != DIRTY or spec.dirty_universal]
    n_states = 1 << len(enum_bits)
    if n_states > max_states:
        raise EnumerationLimit(
            f"2^{len(enum_bits)} states exceeds limit {max_states}")
    chunk = max(64, min(_CHUNK, -(-n_states // max(jobs, 1))))
    best: Counterexample | None = None
    for start in range(0, n_states, chunk):
        stop = min(start + chunk, n_states)
        cx = _verify_chunk(c, spec, enum_bits, oracle_reg, clean, dirty,
                           start, stop)
        if cx is not None:
            best = cx
            break
    return Verdict(best is None, n_states, best)


def _verify_chunk(c, spec, enum_bits, oracle_reg, clean, dirty, start, stop):
    lanes = np.arange(start, stop, dtype=np.uint64)
    cols: dict[int, np.ndarray] = {}
    for i in range(c.width):
        cols[i] = np.zeros(len(lanes), dtype=bool)
    for pos, q in enumerate(enum_bits):
        cols[q.index] = (lanes >> np.uint64(pos)) & np.uint64(1) != 0
    initial = {i: v.copy() for i, v in cols.items()}

    first_gate = np.full(len(lanes), -1, dtype=np.int64)
    first_kind: dict[int, str] = {}
    for i, g in enumerate(c.gates):
        fault = apply_gate_vector(g, cols, check=True)
        if fault is not None:
            kind, bad = fault
            newly = bad & (first_gate < 0)
            if newly.any():
                first_gate[newly] = i
                first_kind[i] = kind

    end_gate = len(c.gates)
    end_fail = np.zeros(len(lanes), dtype=bool)
    end_kind = np.full(len(lanes), "", dtype=object)

    in_val = np.zeros(len(lanes), dtype=np.uint64)
    out_val = np.zeros(len(lanes), dtype=np.uint64)
    for j, q in enumerate(oracle_reg):
        in_val |= initial[q.index].astype(np.uint64) << np.uint64(j)
        out_val |= cols[q.index].astype(np.uint64) << np.uint64(j)
    expect = spec.oracle(in_val)
    mism = out_val != np.asarray(expect, dtype=np.uint64)
    end_kind[mism & ~end_fail] = FAULT_ORACLE_MISMATCH
    end_fail |= mism
    if spec.restore:
        for q in dirty:
            bad = cols[q.index] ^ initial[q.index]
            end_kind[bad & ~end_fail] = FAULT_DIRTY_NOT_RESTORED
            end_fail |= bad
        for q in clean:
            bad = cols[q.index]
            end_kind[bad & ~end_fail] = FAULT_CLEAN_NOT_RESTORED
            end_fail |= bad

    any_fail = (first_gate >= 0) | end_fail
    if not any_fail.any():
        return None
    lane = int(np.argmax(any_fail))
    if first_gate[lane] >= 0:
        gate_i = int(first_gate[lane])
        kind = first_kind[gate_i]
    else:
        gate_i = end_gate
        kind = str(end_kind[lane])
    value = sum(int(initial[i][lane]) << i for i in range(c.width))
    return Counterexample(BasisState(value, c.width), gate_i, kind)


def truth_permutation(c: Circuit, max_width: int = 20) -> np.ndarray:
    """Full 2^w permutation table of the circuit (AND acting as Toffoli)."""
    w = c.width
    if w > max_width:
        raise EnumerationLimit(f"width {w} exceeds permutation limit {max_width}")
    lanes = np.arange(1 << w, dtype=np.uint64)
    cols = {i: (lanes >> np.uint64(i)) & np.uint64(1) != 0 for i in range(w)}
    for g in c.gates:
        apply_gate_vector(g, cols, check=False)
    out = np.zeros(len(lanes), dtype=np.uint64)
    for i in range(w):
        out |= cols[i].astype(np.uint64) << np.uint64(i)
    return out
