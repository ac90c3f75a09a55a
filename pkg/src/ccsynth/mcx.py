"""Multi-controlled NOT decompositions in the low-ancilla regime.

All builders share one register layout: controls at indices 0..n-1, the
target at n, ancillae from n+1 up. Counts (Toffoli-equivalents under the
free-AND-uncompute convention):

    one clean ancilla          2n-4, linear depth
    two clean ancillae         2n-5, log depth
    one dirty ancilla          4n-8, linear depth
    two dirty ancillae         4n-8, log depth
    n-2 borrowed dirty         4n-8, linear depth
"""
from __future__ import annotations

import numpy as np

from .circuit import (AND, AND_DAGGER, CCX, CLEAN, CX, DIRTY, MCX_REF, SYSTEM,
                      TARGET, X, Circuit, CircuitError, Gate, QubitRef,
                      compose, gate, inverse)
from .marking import (MarkingOp, MarkingSchedule, final_unmarked, greedy_ops,
                      log_schedule)
from .sim import truth_permutation


def mcx_registers(n: int, clean: int = 0, dirty: int = 0) -> Circuit:
    c = Circuit()
    for i in range(n):
        c.add_qubit(QubitRef(i, SYSTEM))
    c.add_qubit(QubitRef(n, TARGET))
    for j in range(clean):
        c.add_qubit(QubitRef(n + 1 + j, CLEAN))
    for j in range(dirty):
        c.add_qubit(QubitRef(n + 1 + clean + j, DIRTY))
    return c


def mcx_reference(n: int, clean: int = 0, dirty: int = 0) -> Circuit:
    """Single MCX_REF oracle gate over the same register layout."""
    c = mcx_registers(n, clean, dirty)
    c.name = f"mcx_ref_n{n}"
    c.add(gate(MCX_REF, [c.qubits[i] for i in range(n)], target=c.qubits[n]))
    return c


def mcx_oracle(n: int):
    """Vectorized truth oracle over the packed (controls, target) register."""
    mask = np.uint64((1 << n) - 1)

    def oracle(vals: np.ndarray) -> np.ndarray:
        vals = np.asarray(vals, dtype=np.uint64)
        fire = (vals & mask) == mask
        return vals ^ (fire.astype(np.uint64) << np.uint64(n))

    return oracle


def _emit_game(circ: Circuit, ops, slot_qubit, and_slot: int | None = 0,
               plain_slots: frozenset = frozenset()) -> list:
    """Append the circuit image of marking-game ops and return the gates.

    ``and_slot`` is the clean-ancilla slot realized as an AND gate. Slots in
    ``plain_slots`` are borrowed qubits in unknown states: they get a bare
    Toffoli with no X dance, relying on the surrounding toggle detection to
    cancel their initial value.
    """
    emitted = []

    def put(g):
        circ.add(g)
        emitted.append(g)

    for t, x, y in ops:
        qx, qy, qt = slot_qubit(x), slot_qubit(y), slot_qubit(t)
        if t == and_slot:
            put(gate(AND, [qx, qy], target=qt))
        elif t in plain_slots:
            put(gate(CCX, [qx, qy], target=qt))
        else:
            # X and Toffoli on the same target commute; X-first keeps the
            # free gate off the critical path of the next ladder rank.
            put(gate(X, target=qt))
            put(gate(CCX, [qx, qy], target=qt))
    return emitted


def _append_inverse(circ: Circuit, gates_list) -> None:
    swap = {AND: AND_DAGGER, AND_DAGGER: AND}
    for g in reversed(gates_list):
        circ.add(Gate(swap.get(g.kind, g.kind), g.controls, g.targets, g.payload))


def mcx_one_clean(n: int) -> Circuit:
    """Greedy ladder: up over control pairs, down to accumulate everything
    on the first control, one Toffoli to the target, uncompute."""
    if n < 3:
        raise CircuitError("one-clean MCX needs n >= 3")
    c = mcx_registers(n, clean=1)
    c.name = f"mcx_one_clean_n{n}"
    anc = c.qubits[n + 1]
    ops = greedy_ops(n, (0,))
    sched = MarkingSchedule(n, ops)
    live = final_unmarked(sched)
    assert len(live) == 2
    slot_q = lambda s: anc if s == 0 else c.qubits[s - 1]
    body = _emit_game(c, ops, slot_q)
    c.add(gate(CCX, [slot_q(live[0]), slot_q(live[1])], target=c.qubits[n]))
    _append_inverse(c, body)
    return c


def _k_fold_mcx(circ: Circuit, root_qubits, anc, target,
                anc_plain: bool) -> None:
    """Accumulate the AND of ``root_qubits`` onto ``target`` using one extra
    qubit ``anc``: a clean ancilla (AND gate) or, with ``anc_plain``, a
    borrowed conditionally clean qubit handled with a bare Toffoli."""
    k = len(root_qubits)
    if k == 1:
        circ.add(gate(CX, [root_qubits[0]], target=target))
        return
    if k == 2:
        circ.add(gate(CCX, root_qubits, target=target))
        return
    ops = greedy_ops(k, (0,))
    live = final_unmarked(MarkingSchedule(k, ops))
    slot_q = lambda s: anc if s == 0 else root_qubits[s - 1]
    body = _emit_game(circ, ops, slot_q,
                      and_slot=None if anc_plain else 0,
                      plain_slots=frozenset({0}) if anc_plain else frozenset())
    circ.add(gate(CCX, [slot_q(live[0]), slot_q(live[1])], target=target))
    _append_inverse(circ, body)


def mcx_two_clean_logdepth(n: int) -> Circuit:
    """Batched doubling ladder in log depth; the surviving accumulators are
    folded onto the target by a linear-depth ladder over the second clean
    ancilla."""
    if n < 4:
        raise CircuitError("two-clean MCX needs n >= 4")
    c = mcx_registers(n, clean=2)
    c.name = f"mcx_two_clean_n{n}"
    anc1, anc2 = c.qubits[n + 1], c.qubits[n + 2]
    sched = log_schedule(n)
    live = final_unmarked(sched)
    slot_q = lambda s: anc1 if s == 0 else c.qubits[s - 1]
    body = _emit_game(c, sched.ops, slot_q)
    _k_fold_mcx(c, [slot_q(s) for s in live], anc2, c.qubits[n],
                anc_plain=False)
    _append_inverse(c, body)
    return c


def laddered_toggle_detection(builder, dirty, toggle_controls,
                              self_inverse_check_width: int = 16) -> Circuit:
    """Wrap a controlled self-inverse subcircuit so every borrowed qubit may
    start in an unknown state.

    ``builder(control, as_clean)`` must return the controlled operation
    rooted at ``control`` (the first dirty qubit); the remaining dirty
    qubits are passed through ``as_clean`` and may be used inside as if
    clean, with no further repetition. The wrapper repeats the subcircuit
    around a Toffoli that toggles the root on ``toggle_controls``, so the
    root's initial value cancels.
    """
    d0, rest = dirty[0], tuple(dirty[1:])
    cu = builder(d0, rest)
    a, b = toggle_controls
    if {a.index, b.index} & {q.index for q in dirty}:
        raise CircuitError(
            "toggle-detection controls cannot also serve as borrowed ancillae")
    if cu.width <= self_inverse_check_width:
        perm = truth_permutation(compose(cu, cu))
        if not np.array_equal(perm, np.arange(len(perm), dtype=np.uint64)):
            raise CircuitError("wrapped subcircuit is not self-inverse")
    out = Circuit(name=cu.name)
    for _, q in sorted(cu.qubits.items()):
        out.add_qubit(q)
    for q in (a, b):
        out.add_qubit(q)
    toggle = gate(CCX, [a, b], target=d0)
    out.gates = list(cu.gates) + [toggle] + list(cu.gates) + [toggle]
    return out


def mcx_one_dirty(n: int) -> Circuit:
    """Toggle-detection sandwich around a greedy ladder over the last n-2
    controls; 4n-8 Toffolis, any initial ancilla value."""
    if n < 4:
        raise CircuitError("one-dirty MCX needs n >= 4")
    c = mcx_registers(n, dirty=1)
    c.name = f"mcx_one_dirty_n{n}"
    target, anc = c.qubits[n], c.qubits[n + 1]

    def build(root, as_clean):
        # Game over the controls alone: slots 0..n-1 are c0..c(n-1); c0 and
        # c1 start marked because the root stores their conjunction.
        u = Circuit()
        for i in range(n):
            u.add_qubit(c.qubits[i])
        u.add_qubit(target)
        u.add_qubit(root)
        ops = greedy_ops(n - 1, (0, 1))
        live = final_unmarked(MarkingSchedule(n - 1, ops), (0, 1))
        assert len(live) == 1
        body = _emit_game(u, ops, lambda s: c.qubits[s], and_slot=None)
        u.add(gate(CCX, [root, c.qubits[live[0]]], target=target))
        _append_inverse(u, body)
        return u

    return _with_sandwich(c, build, [anc], (c.qubits[0], c.qubits[1]))


def _with_sandwich(shell: Circuit, builder, dirty, toggle_controls) -> Circuit:
    wrapped = laddered_toggle_detection(builder, dirty, toggle_controls)
    for _, q in sorted(shell.qubits.items()):
        wrapped.add_qubit(q)
    wrapped.name = shell.name
    return wrapped


def mcx_two_dirty_logdepth(n: int) -> Circuit:
    """Outer toggle detection on the first borrowed qubit; the inner
    (n-1)-control MCX treats the second borrowed qubit as clean via the
    laddered trick and reuses the log-depth batched ladder."""
    if n < 5:
        raise CircuitError("two-dirty MCX needs n >= 5")
    c = mcx_registers(n, dirty=2)
    c.name = f"mcx_two_dirty_n{n}"
    target, d1, d2 = c.qubits[n], c.qubits[n + 1], c.qubits[n + 2]

    def build(root, as_clean):
        # Inner MCX over root (= d1) and c2..c(n-1). The root's value enters
        # the subcircuit exactly once, through the Toffoli seeding d2; the
        # remaining controls reduce through the batched log-depth ladder
        # (c2, already absorbed into d2, is its first workspace slot).
        # The surviving accumulators are folded by a chain that threads
        # d2's stored value through every link, so the unknown initial
        # values of d2 and of the chain workspace all cancel when the
        # sandwich repeats the subcircuit.
        (anc_like,) = as_clean
        u = Circuit()
        for i in range(2, n):
            u.add_qubit(c.qubits[i])
        u.add_qubit(target)
        u.add_qubit(root)
        u.add_qubit(anc_like)
        seed = gate(CCX, [root, c.qubits[2]], target=anc_like)
        u.add(seed)
        rest = [c.qubits[i] for i in range(2, n)]
        m_b = n - 3
        if m_b >= 3:
            sched = log_schedule(m_b)
        else:
            sched = MarkingSchedule(m_b, [MarkingOp(0, 1, 2)] if m_b == 2 else [])
        live = final_unmarked(sched)
        slot_q = lambda s: rest[s]
        body = [seed] + _emit_game(u, sched.ops, slot_q, and_slot=None)
        accumulators = [slot_q(s) for s in sorted(live)]
        spare = [slot_q(s) for s in sorted(
            set(range(m_b + 1)) - set(live), reverse=True)]
        cur = anc_like
        chain = []
        for b in accumulators[:-1]:
            w = spare.pop(0)
            g = gate(CCX, [cur, b], target=w)
            u.add(g)
            chain.append(g)
            cur = w
        u.add(gate(CCX, [cur, accumulators[-1]], target=target))
        _append_inverse(u, chain)
        _append_inverse(u, body)
        return u

    return _with_sandwich(c, build, [d1, d2], (c.qubits[0], c.qubits[1]))


def mcx_borrowed_ladder(n: int) -> Circuit:
    """Toggle-detecting V-chain through n-2 borrowed qubits, arrow pointing
    at the target; 4n-8 Toffolis."""
    if n < 3:
        raise CircuitError("borrowed-ladder MCX needs n >= 3")
    c = mcx_registers(n, dirty=n - 2)
    c.name = f"mcx_borrowed_n{n}"
    target = c.qubits[n]
    d = [c.qubits[n + 1 + j] for j in range(n - 2)]

    def build(root, as_clean):
        u = Circuit()
        for i in range(2, n):
            u.add_qubit(c.qubits[i])
        u.add_qubit(target)
        for q in (root, *as_clean):
            u.add_qubit(q)
        chain = [root] + list(as_clean)
        up = []
        for i in range(n - 3):
            up.append(gate(CCX, [c.qubits[i + 2], chain[i]], target=chain[i + 1]))
        for g in up:
            u.add(g)
        u.add(gate(CCX, [c.qubits[n - 1], chain[-1]], target=target))
        for g in reversed(up):
            u.add(g)
        return u

    return _with_sandwich(c, build, d, (c.qubits[0], c.qubits[1]))
