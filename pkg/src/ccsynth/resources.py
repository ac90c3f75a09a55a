"""Resource accounting under the fixed fault-tolerant cost convention.

A CCX and an AND each cost one Toffoli-equivalent; AND_DAGGER is free
(measurement-assisted uncompute) and Cliffords (X, CX) are free. T-count is
exactly 4x the Toffoli count. Depth is greedy ASAP layering over qubit
support, counting only layers that contain a costed gate.
"""
from __future__ import annotations

from dataclasses import dataclass

from .circuit import AND, AND_DAGGER, CCX, CLEAN, DIRTY, Circuit, CircuitError, MCX_REF, QROM_REF

COSTED = (CCX, AND)
T_PER_TOFFOLI = 4


@dataclass(frozen=True)
class ResourceReport:
    name: str
    toffoli_count: int
    t_count: int
    toffoli_depth: int
    qubit_counts: dict

    def record(self) -> dict:
        """Flat fixed-key record used by the CLI table output."""
        return {
            "name": self.name,
            "toffoli": self.toffoli_count,
            "t": self.t_count,
            "depth": self.toffoli_depth,
            "clean": self.qubit_counts.get(CLEAN, 0),
            "dirty": self.qubit_counts.get(DIRTY, 0),
        }


def count_resources(c: Circuit) -> ResourceReport:
    """Count Toffoli-equivalents, T-count and Toffoli-depth of ``c``.

    Reference gates (MCX_REF/QROM_REF) are uncosted oracles and are
    rejected here.
    """
    toffoli = 0
    layer_of_qubit: dict[int, int] = {}
    costed_layers: set[int] = set()
    for i, g in enumerate(c.gates):
        if g.kind in (MCX_REF, QROM_REF):
            raise CircuitError(f"reference gate {g.kind} at position {i} is uncosted")
        support = g.support
        layer = 1 + max((layer_of_qubit.get(q, 0) for q in support), default=0)
        for q in support:
            layer_of_qubit[q] = layer
        if g.kind in COSTED:
            toffoli += 1
            costed_layers.add(layer)
    counts: dict[str, int] = {}
    for q in c.qubits.values():
        counts[q.role] = counts.get(q.role, 0) + 1
    return ResourceReport(
        name=c.name,
        toffoli_count=toffoli,
        t_count=T_PER_TOFFOLI * toffoli,
        toffoli_depth=len(costed_layers),
        qubit_counts=counts,
    )


def toffoli_depth_bound_check(c: Circuit, bound: int) -> bool:
    return count_resources(c).toffoli_depth <= bound
