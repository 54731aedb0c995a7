"""Compile and execute the deterministic emitter sequence for one RGS half.

A half is an anchor qubit plus m arms. Each arm is one outer photon and a
tree of photons with branching vector b (level k holds prod(b[:k]) photons,
levels run 1..len(b)). Non-leaf tree photons are produced by pushing an
emitter out into a fresh photon and Z-measuring the emitter, which leaves a
Z side effect on the photon half the time. Leaf and outer photons are plain
emissions whose H side effect is removed by an optical Hadamard right away.
The arm ends by entangling the outer-photon emitter and the tree-host
emitter with the anchor and X-measuring both, which joins the outer photon
and the anchor onto the tree's first level.

Emitters form a line; line index e may be used many times, and every use
gets a fresh tableau qubit (a measured emitter is reinitialized, which is
the same thing).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import prod

from .graphstate import GraphState
from .tableau import Tableau


def branching_vector(b) -> tuple[int, ...]:
    """Validated branching vector: non-empty, all entries >= 1."""
    vec = tuple(int(x) for x in b)
    if not vec:
        raise ValueError("branching vector must be non-empty")
    if any(x < 1 for x in vec):
        raise ValueError("branching vector entries must be >= 1")
    return vec


def tree_size(b) -> int:
    b = branching_vector(b)
    return sum(prod(b[: k + 1]) for k in range(len(b)))


def photons_per_arm(b) -> int:
    return 1 + tree_size(b)


# -- schedule events ------------------------------------------------------


@dataclass(frozen=True)
class Emit:
    emitter: int  # tableau qubit of the emitting incarnation
    photon: int
    line: int  # logical emitter index along the line


@dataclass(frozen=True)
class Gate:
    name: str  # H or CZ
    targets: tuple[int, ...]
    lines: tuple[int, ...]


@dataclass(frozen=True)
class Measure:
    qubit: int
    basis: str  # X or Z
    line: int
    # Qubits whose recorded Z bit flips when this outcome is -1.
    toggles_on_minus: tuple[int, ...] = ()


@dataclass(frozen=True)
class Optical:
    photon: int


@dataclass(frozen=True)
class EmissionSchedule:
    events: tuple
    anchor: int
    photons: tuple  # emission order


# -- layout ----------------------------------------------------------------


@dataclass(frozen=True)
class ArmLayout:
    index: int
    outer: int
    levels: tuple[tuple[int, ...], ...]  # levels[k] = photon ids at level k+1
    parent: dict  # photon id -> parent photon id (level-1 nodes map to None)
    children: dict  # photon id -> tuple of child photon ids

    @property
    def first_level(self) -> tuple[int, ...]:
        return self.levels[0]

    @property
    def tree_photons(self) -> tuple[int, ...]:
        return tuple(p for lvl in self.levels for p in lvl)


@dataclass(frozen=True)
class HalfRgsLayout:
    m: int
    b: tuple[int, ...]
    anchor: int
    arms: tuple[ArmLayout, ...]
    transmission_order: tuple[int, ...]  # emission order; outers lead their arm
    emitter_uses: dict  # line index -> number of incarnations
    first_qubit: int
    qubit_count: int  # anchor + photons + emitter incarnations

    @property
    def photons(self) -> tuple[int, ...]:
        return self.transmission_order

    @property
    def depth(self) -> int:
        return len(self.b)

    @property
    def line_length(self) -> int:
        return len(self.b) + 2

    def first_level_photons(self) -> tuple[int, ...]:
        return tuple(p for arm in self.arms for p in arm.first_level)


class _Compiler:
    def __init__(self, m, b, first_qubit):
        self.m = m
        self.b = b
        self.next_qubit = first_qubit
        self.events = []
        self.order = []
        self.uses = {}

    def fresh(self):
        q = self.next_qubit
        self.next_qubit += 1
        return q

    def new_emitter(self, line):
        q = self.fresh()
        self.uses[line] = self.uses.get(line, 0) + 1
        self.events.append(Gate("H", (q,), (line,)))
        return q

    def emit_photon(self, emitter, line):
        p = self.fresh()
        self.events.append(Emit(emitter, p, line))
        self.order.append(p)
        return p

    def deliver_node(self, level, attach_host, host_line, arm_levels, parent_of, children_of):
        """Create one tree node of the given level attached to attach_host.

        Returns the node's photon id. Leaves (level == depth) are plain
        emissions; anything shallower is a push-out of a deeper emitter.
        """
        depth = len(self.b)
        if level == depth:
            p = self.emit_photon(attach_host, host_line)
            self.events.append(Optical(p))
            arm_levels[level - 1].append(p)
            children_of[p] = ()
            return p
        line = level + 2
        host = self.new_emitter(line)
        kids = [
            self.deliver_node(level + 1, host, line, arm_levels, parent_of, children_of)
            for _ in range(self.b[level])
        ]
        self.events.append(Gate("CZ", (attach_host, host), (line - 1, line)))
        p = self.emit_photon(host, line)
        self.events.append(Gate("H", (host,), (line,)))
        self.events.append(Measure(host, "Z", line, toggles_on_minus=(p,)))
        arm_levels[level - 1].append(p)
        for k in kids:
            parent_of[k] = p
        children_of[p] = tuple(kids)
        return p

    def compile(self):
        anchor = self.fresh()
        self.uses[0] = 1
        self.events.append(Gate("H", (anchor,), (0,)))
        arms = []
        for arm_index in range(self.m):
            q1 = self.new_emitter(1)
            outer = self.emit_photon(q1, 1)
            self.events.append(Optical(outer))
            q2 = self.new_emitter(2)
            arm_levels = [[] for _ in self.b]
            parent_of = {}
            children_of = {}
            for _ in range(self.b[0]):
                node = self.deliver_node(1, q2, 2, arm_levels, parent_of, children_of)
                parent_of[node] = None
            self.events.append(Gate("CZ", (q1, q2), (1, 2)))
            self.events.append(Gate("CZ", (anchor, q1), (0, 1)))
            first_level = tuple(arm_levels[0])
            self.events.append(
                Measure(q2, "X", 2, toggles_on_minus=(outer, anchor))
            )
            self.events.append(Measure(q1, "X", 1, toggles_on_minus=first_level))
            arms.append(
                ArmLayout(
                    index=arm_index,
                    outer=outer,
                    levels=tuple(tuple(lvl) for lvl in arm_levels),
                    parent=parent_of,
                    children=children_of,
                )
            )
        return anchor, arms


@lru_cache(maxsize=None)
def _compile_cached(m, b, first_qubit):
    comp = _Compiler(m, b, first_qubit)
    anchor, arms = comp.compile()
    layout = HalfRgsLayout(
        m=m,
        b=b,
        anchor=anchor,
        arms=tuple(arms),
        transmission_order=tuple(comp.order),
        emitter_uses=dict(comp.uses),
        first_qubit=first_qubit,
        qubit_count=comp.next_qubit - first_qubit,
    )
    schedule = EmissionSchedule(tuple(comp.events), anchor, tuple(comp.order))
    return layout, schedule


def compile_half_rgs(m: int, b, first_qubit: int = 0):
    """Event schedule and photon layout for one half with m arms.

    Qubit ids start at first_qubit; the anchor comes first, then photons
    and emitter incarnations in creation order.
    """
    if m < 1:
        raise ValueError("arm count must be >= 1")
    return _compile_cached(m, branching_vector(b), first_qubit)


# -- execution ---------------------------------------------------------------


@dataclass
class SideEffectRecord:
    """Z side-effect bit per photon of one half, plus the anchor's bit."""

    bits: dict  # photon id -> 0/1
    anchor: int
    anchor_bit: int = 0
    anchor_live: bool = True
    outcome_log: list = field(default_factory=list)

    def bit(self, photon: int) -> int:
        return self.bits[photon]

    def toggle(self, qubit: int):
        if qubit == self.anchor:
            self.anchor_bit ^= 1
        else:
            self.bits[qubit] ^= 1


def execute_schedule(schedule: EmissionSchedule, t: Tableau, rng) -> SideEffectRecord:
    """Apply schedule events in order, drawing outcomes from the tableau.

    Push-out measurements land a Z bit on their photon when the outcome is
    -1; the closing X measurements of each arm toggle the outer/anchor and
    first-level bits the same way.
    """
    bits = {p: 0 for p in schedule.photons}
    anchor_bit = 0
    log = []
    for ev in schedule.events:
        if isinstance(ev, Gate):
            t.apply(ev.name, *ev.targets)
        elif isinstance(ev, Emit):
            if ev.photon >= t.n or ev.emitter >= t.n:
                raise ValueError("schedule does not fit the tableau")
            t.cnot(ev.emitter, ev.photon)
        elif isinstance(ev, Optical):
            t.h(ev.photon)
        elif isinstance(ev, Measure):
            res = t.measure(ev.basis, ev.qubit, rng)
            log.append((ev.qubit, ev.basis, res.sign, res.deterministic))
            if res.sign < 0:
                for q in ev.toggles_on_minus:
                    if q == schedule.anchor:
                        anchor_bit ^= 1
                    else:
                        bits[q] ^= 1
        else:  # pragma: no cover - schedule is closed over these types
            raise TypeError(f"unknown event {ev!r}")
    return SideEffectRecord(
        bits=bits, anchor=schedule.anchor, anchor_bit=anchor_bit, outcome_log=log
    )


@dataclass
class ExecutedHalf:
    layout: HalfRgsLayout
    record: SideEffectRecord


@dataclass(frozen=True)
class JoinResult:
    raw_a: int
    raw_b: int
    folded_a: int
    folded_b: int


def join_halves(t: Tableau, half_a: ExecutedHalf, half_b: ExecutedHalf, rng) -> JoinResult:
    """CZ the two anchors together and X-measure both.

    This is the step that turns two halves into one RGS (and, with one side
    being a memory, the step that hands a half to a memory qubit). Each
    side's first-level photons pick up a Z bit when the other anchor's
    folded outcome is -1.
    """
    ra, rb = half_a.record, half_b.record
    if not ra.anchor_live or not rb.anchor_live:
        raise ValueError("anchor already consumed")
    t.cz(ra.anchor, rb.anchor)
    raw_a = t.measure("X", ra.anchor, rng).sign
    raw_b = t.measure("X", rb.anchor, rng).sign
    folded_a = raw_a * (-1 if ra.anchor_bit else 1)
    folded_b = raw_b * (-1 if rb.anchor_bit else 1)
    if folded_b < 0:
        for p in half_a.layout.first_level_photons():
            ra.bits[p] ^= 1
    if folded_a < 0:
        for p in half_b.layout.first_level_photons():
            rb.bits[p] ^= 1
    ra.anchor_live = False
    rb.anchor_live = False
    return JoinResult(raw_a, raw_b, folded_a, folded_b)


# -- ideal reference graphs ---------------------------------------------------


def ideal_half_graph(layout: HalfRgsLayout) -> GraphState:
    """Tag-free graph the generation sequence targets: anchor joined to every
    first-level photon, each outer joined to its own arm's first level, plus
    the parent-child tree edges."""
    g = GraphState()
    g.add_vertex(layout.anchor)
    for arm in layout.arms:
        g.add_vertex(arm.outer)
        for lvl in arm.levels:
            for p in lvl:
                g.add_vertex(p)
        for p in arm.first_level:
            g.add_edge(layout.anchor, p)
            g.add_edge(arm.outer, p)
        for p, kids in arm.children.items():
            for k in kids:
                g.add_edge(p, k)
    return g


def ideal_rgs_graph(layout_a: HalfRgsLayout, layout_b: HalfRgsLayout) -> GraphState:
    """Two joined halves: both trees plus the complete bipartite join
    between the halves' first levels (anchors are gone)."""
    g = GraphState()
    for layout in (layout_a, layout_b):
        for arm in layout.arms:
            g.add_vertex(arm.outer)
            for lvl in arm.levels:
                for p in lvl:
                    g.add_vertex(p)
            for p in arm.first_level:
                g.add_edge(arm.outer, p)
            for p, kids in arm.children.items():
                for k in kids:
                    g.add_edge(p, k)
    for pa in layout_a.first_level_photons():
        for pb in layout_b.first_level_photons():
            g.add_edge(pa, pb)
    return g


# -- resource accounting ------------------------------------------------------


def resource_report(m: int, b, r: int) -> dict:
    """Memory/emitter counts for both end-node architectures.

    `r` is the ratio of the farthest correction round-trip to the
    generation time, which sizes the reserve of parked memories. The prior
    architecture parks r*m emissive memories on top of the m working ones;
    anchoring a half on an emitter line needs len(b)+1 emitters plus r
    plain memories (total r+len(b)+1). The emitter line as scheduled is
    len(b)+2 long (one extra for the outer photons); both numbers are
    reported.
    """
    b = branching_vector(b)
    if m < 1 or r < 0:
        raise ValueError("need m >= 1 and r >= 0")
    return {
        "arms": m,
        "branching": list(b),
        "round_trip_ratio": r,
        "photons_per_arm": photons_per_arm(b),
        "photons_per_half": m * photons_per_arm(b),
        "photons_per_rgs": 2 * m * photons_per_arm(b),
        "emitter_line_length": len(b) + 2,
        "prior_art_working_memories": m,
        "prior_art_reserve_memories": r * m,
        "prior_art_total_memories": m * (r + 1),
        "proposed_emitters": len(b) + 1,
        "proposed_reserve_memories": r,
        "proposed_total": r + len(b) + 1,
    }
