"""The array-marking game behind the ancilla-reuse ladders.

An array of n+1 slots starts as [1, 0, ..., 0]. A move picks t < x < y with
A[t]=1, A[x]=A[y]=0 and flips all three. Marked slots model workspace that
is clean conditionally on values accumulated so far; unmarked slots hold
live partial products. Schedules translate to circuits: a move targeting
slot 0 is an AND onto the clean ancilla, any other move is a Toffoli
followed by an X on the move's target.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .circuit import AND, CCX, CLEAN, SYSTEM, Circuit, QubitRef, X, gate


class ScheduleError(ValueError):
    """A schedule op violates the game rules at replay time."""


@dataclass(frozen=True)
class MarkingOp:
    t: int
    x: int
    y: int

    def __post_init__(self):
        if not self.t < self.x < self.y:
            raise ScheduleError(f"op needs t < x < y, got {self}")

    def __iter__(self):
        return iter((self.t, self.x, self.y))


@dataclass(frozen=True)
class Stats:
    unmarked: int  # K
    ops: int       # T
    depth: int     # D


@dataclass
class MarkingSchedule:
    n: int
    ops: list[MarkingOp]

    def stats(self) -> Stats:
        return verify_schedule(self)

    def emit_text(self) -> str:
        lines = [f"N {self.n}"]
        lines += [f"OP {t} {x} {y}" for t, x, y in self.ops]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse_text(cls, text: str) -> "MarkingSchedule":
        n = None
        ops = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if parts[0] == "N":
                n = int(parts[1])
            elif parts[0] == "OP":
                ops.append(MarkingOp(*map(int, parts[1:4])))
            else:
                raise ScheduleError(f"bad schedule line {line!r}")
        if n is None:
            raise ScheduleError("missing N header")
        return cls(n, ops)


def replay(n: int, ops, marked=(0,)):
    """Yield the marked-set after each op, checking legality."""
    a = [False] * (n + 1)
    for s in marked:
        a[s] = True
    for i, (t, x, y) in enumerate(ops):
        if y > n:
            raise ScheduleError(f"op {i}: slot {y} out of range for n={n}")
        if not (a[t] and not a[x] and not a[y]):
            raise ScheduleError(
                f"op {i}: needs A[{t}]=1, A[{x}]=A[{y}]=0, got "
                f"A[{t}]={int(a[t])}, A[{x}]={int(a[x])}, A[{y}]={int(a[y])}")
        a[t], a[x], a[y] = False, True, True
        yield a


def verify_schedule(s: MarkingSchedule, marked=(0,)) -> Stats:
    """Replay the schedule and recompute (K, T, D).

    D is greedy ASAP layering: an op lands in the earliest layer after all
    previous ops sharing any of its three slots.
    """
    a = [False] * (s.n + 1)
    for m in marked:
        a[m] = True
    for a in replay(s.n, s.ops, marked):
        pass
    layer_of_slot: dict[int, int] = {}
    depth = 0
    for t, x, y in s.ops:
        layer = 1 + max(layer_of_slot.get(q, 0) for q in (t, x, y))
        for q in (t, x, y):
            layer_of_slot[q] = layer
        depth = max(depth, layer)
    k = sum(1 for v in a if not v)
    return Stats(unmarked=k, ops=len(s.ops), depth=depth)


def final_unmarked(s: MarkingSchedule, marked=(0,)) -> list[int]:
    a = [False] * (s.n + 1)
    for m in marked:
        a[m] = True
    for a in replay(s.n, s.ops, marked):
        pass
    return [i for i, v in enumerate(a) if not v]


def greedy_ops(n: int, marked) -> list[MarkingOp]:
    """Literal greedy rule: take the rightmost marked t that still has two
    unmarked slots to its right, pair it with the leftmost such pair."""
    a = [False] * (n + 1)
    for m in marked:
        a[m] = True
    ops = []
    while True:
        move = None
        for t in range(n, -1, -1):
            if not a[t]:
                continue
            zeros = [i for i in range(t + 1, n + 1) if not a[i]]
            if len(zeros) >= 2:
                move = MarkingOp(t, zeros[0], zeros[1])
                break
        if move is None:
            return ops
        a[move.t] = False
        a[move.x] = a[move.y] = True
        ops.append(move)


def greedy_schedule(n: int) -> MarkingSchedule:
    """Greedy strategy; reaches K=2 with T = D = n-2."""
    if n < 3:
        raise ScheduleError("greedy schedule needs n >= 3")
    return MarkingSchedule(n, greedy_ops(n, (0,)))


def _tree_ops(values: list[int], workspace: list[int],
              freed_layer: dict[int, int]) -> list[MarkingOp]:
    """Reduce ``values`` (live slots, ascending) pairwise onto workspace
    slots, using len(values)-1 of them.

    Target choice drives the circuit depth: each level prefers the least
    recently freed slot (so consecutive batches pipeline instead of
    serializing) with low slots as a tie-break sinking to the deepest
    level, which keeps the surviving accumulators packed to the left.
    Every pick stays below the partials it combines, preserving t < x < y.
    """
    ops = []
    cur = list(values)
    free = sorted(workspace)
    while len(cur) > 1:
        pairs = len(cur) // 2
        level = free[-pairs:]
        del free[-pairs:]
        nxt = []
        for j in range(pairs):
            x, y = cur[2 * j], cur[2 * j + 1]
            legal = [s for s in level if s < x]
            t = min(legal, key=lambda s: (freed_layer.get(s, 0), -s))
            level.remove(t)
            ops.append(MarkingOp(t, x, y))
            nxt.append(t)
        if len(cur) % 2:
            nxt.append(cur[-1])
        cur = sorted(nxt)
    return ops


def log_schedule(n: int) -> MarkingSchedule:
    """Batched doubling strategy: batch i reduces the next marked-count+1
    fresh slots through a balanced tree onto the current workspace, leaving
    one live accumulator per batch. K grows as the batch count (about
    log2 n); consecutive batches pipeline, so the circuit image has
    logarithmic Toffoli depth.
    """
    if n < 3:
        raise ScheduleError("log schedule needs n >= 3")
    ops: list[MarkingOp] = []
    marked: list[int] = [0]
    freed_layer: dict[int, int] = {}
    layer_of_slot: dict[int, int] = {}
    next_slot = 1
    while next_slot <= n:
        size = min(len(marked) + 1, n + 1 - next_slot)
        values = list(range(next_slot, next_slot + size))
        next_slot += size
        if size == 1:
            continue
        block = _tree_ops(values, marked, freed_layer)
        ops.extend(block)
        a = set(marked)
        for op in block:
            t, x, y = op
            layer = 1 + max(layer_of_slot.get(q, 0) for q in (t, x, y))
            for q in (t, x, y):
                layer_of_slot[q] = layer
                freed_layer[q] = layer
            a.discard(t)
            a.update((x, y))
        marked = sorted(a)
    return MarkingSchedule(n, ops)


def optimal_search(n: int, objective: str = "ktd") -> MarkingSchedule:
    """Exhaustive baseline for tiny n: minimal K (every op nets one more
    marked slot, so minimal K also fixes T = n - K), deterministic
    lexicographically-smallest op sequence among the K-optimal ones. The D
    tier of the objective is reported as computed for that sequence.
    """
    if n > 8:
        raise ScheduleError("exhaustive search is limited to n <= 8")
    if objective.lower() not in ("k", "kt", "ktd"):
        raise ScheduleError(f"unknown objective {objective!r}")

    @lru_cache(maxsize=None)
    def best(marked: frozenset) -> tuple[int, tuple]:
        choices = []
        slots = sorted(marked)
        for t in slots:
            zeros = [i for i in range(t + 1, n + 1) if i not in marked]
            for xi in range(len(zeros)):
                for yi in range(xi + 1, len(zeros)):
                    choices.append((t, zeros[xi], zeros[yi]))
        result = (0, ())
        for t, x, y in sorted(choices):
            nxt = frozenset(marked - {t} | {x, y})
            sub_t, sub_ops = best(nxt)
            cand = (1 + sub_t, ((t, x, y),) + sub_ops)
            if cand[0] > result[0]:
                result = cand
        return result

    _, ops = best(frozenset({0}))
    return MarkingSchedule(n, [MarkingOp(*o) for o in ops])


def emit_ops(circ: Circuit, ops, slot_qubit) -> None:
    """Append the circuit image of game ops. ``slot_qubit`` maps slot
    numbers to QubitRefs; slot 0 maps to the clean ancilla (AND gate),
    other targets get the Toffoli-then-X pair."""
    for t, x, y in ops:
        qx, qy, qt = slot_qubit(x), slot_qubit(y), slot_qubit(t)
        if t == 0:
            circ.add(gate(AND, [qx, qy], target=qt))
        else:
            circ.add(gate(X, target=qt))
            circ.add(gate(CCX, [qx, qy], target=qt))


def schedule_to_circuit(s: MarkingSchedule) -> Circuit:
    """Map a schedule to gates: control qubits 0..n-1 carry slots 1..n, the
    clean ancilla at index n carries slot 0. Consumption of the surviving
    live slots and the uncompute half are left to the caller."""
    verify_schedule(s)
    c = Circuit(name=f"schedule_n{s.n}")
    ctrls = [c.add_qubit(QubitRef(i, SYSTEM)) for i in range(s.n)]
    anc = c.add_qubit(QubitRef(s.n, CLEAN))
    emit_ops(c, s.ops, lambda slot: anc if slot == 0 else ctrls[slot - 1])
    return c
