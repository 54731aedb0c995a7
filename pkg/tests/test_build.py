"""Generation-sequence tests: layout arithmetic, schedule shape, and oracle
equivalence of the executed state with the decorated ideal graph."""

import numpy as np
import pytest

from rgsim.build import (
    Emit,
    ExecutedHalf,
    Gate,
    Measure,
    Optical,
    branching_vector,
    compile_half_rgs,
    execute_schedule,
    ideal_half_graph,
    ideal_rgs_graph,
    join_halves,
    photons_per_arm,
    resource_report,
    tree_size,
)
from rgsim.clifford1 import C_Z
from rgsim.tableau import Tableau

GRID = [
    (m, b)
    for m in (1, 2, 3, 4)
    for b in [(1,), (2,), (3,), (2, 2), (2, 3), (3, 3), (2, 2, 2), (1, 2, 3)]
]


class ForcedPlus:
    """Coin stream that makes every random outcome come out +1."""

    def integers(self, *args, **kwargs):
        return 0


def decorated_ideal(layout, record):
    g = ideal_half_graph(layout)
    for p, bit in record.bits.items():
        if bit:
            g.set_tag(p, C_Z)
    if record.anchor_bit:
        g.set_tag(layout.anchor, C_Z)
    return g


def run_half(m, b, rng):
    layout, sched = compile_half_rgs(m, b)
    t = Tableau(layout.qubit_count)
    record = execute_schedule(sched, t, rng)
    return layout, t, record


class TestVectors:
    def test_validation(self):
        with pytest.raises(ValueError):
            branching_vector(())
        with pytest.raises(ValueError):
            branching_vector((2, 0))
        assert branching_vector([2, 3]) == (2, 3)

    def test_tree_size(self):
        assert tree_size((1,)) == 1
        assert tree_size((2, 3)) == 8
        assert photons_per_arm((2, 3)) == 9
        assert photons_per_arm((1,)) == 2


class TestLayout:
    @pytest.mark.parametrize("m,b", GRID)
    def test_photon_count_matches_emissions(self, m, b):
        layout, sched = compile_half_rgs(m, b)
        emits = [e for e in sched.events if isinstance(e, Emit)]
        assert len(emits) == m * photons_per_arm(b)
        assert len(layout.transmission_order) == len(emits)
        assert [e.photon for e in emits] == list(layout.transmission_order)

    @pytest.mark.parametrize("m,b", GRID)
    def test_outer_transmitted_before_its_tree(self, m, b):
        layout, _ = compile_half_rgs(m, b)
        pos = {p: i for i, p in enumerate(layout.transmission_order)}
        for arm in layout.arms:
            assert all(pos[arm.outer] < pos[p] for p in arm.tree_photons)

    @pytest.mark.parametrize("m,b", GRID)
    def test_level_sizes(self, m, b):
        layout, _ = compile_half_rgs(m, b)
        for arm in layout.arms:
            expect = 1
            for level0, width in enumerate(b):
                expect *= width
                assert len(arm.levels[level0]) == expect

    def test_emitter_line(self):
        layout, sched = compile_half_rgs(2, (2, 3))
        assert layout.line_length == 4
        lines = set()
        for ev in sched.events:
            if isinstance(ev, (Gate,)):
                lines.update(ev.lines)
            elif isinstance(ev, (Emit, Measure)):
                lines.add(ev.line)
        assert lines == {0, 1, 2, 3}
        for ev in sched.events:
            if isinstance(ev, Gate) and ev.name == "CZ":
                a, b_ = sorted(ev.lines)
                assert b_ - a == 1

    def test_measurements_preceded_by_their_cz(self):
        _, sched = compile_half_rgs(1, (2,))
        seen_cz = set()
        for ev in sched.events:
            if isinstance(ev, Gate) and ev.name == "CZ":
                seen_cz.update(ev.targets)
            if isinstance(ev, Measure):
                assert ev.qubit in seen_cz

    def test_invalid_arm_count(self):
        with pytest.raises(ValueError):
            compile_half_rgs(0, (1,))


class TestExecution:
    @pytest.mark.parametrize("m,b", [(1, (1,)), (2, (2,)), (1, (2, 2)), (2, (2, 3))])
    def test_forced_outcomes_give_ideal_state(self, m, b):
        layout, sched = compile_half_rgs(m, b)
        t = Tableau(layout.qubit_count)
        record = execute_schedule(sched, t, ForcedPlus())
        assert all(v == 0 for v in record.bits.values())
        assert record.anchor_bit == 0
        g = ideal_half_graph(layout)
        tg, _ = g.to_tableau()
        assert tg.canonical_stabilizers() == t.canonical_stabilizers(g.vertices())

    @pytest.mark.parametrize("m,b", [(1, (1,)), (2, (2,)), (1, (2, 2)), (2, (2, 3)), (3, (1, 2))])
    def test_random_outcomes_match_recorded_decoration(self, m, b):
        rng = np.random.default_rng(hash((m, b)) % 2**32)
        for _ in range(4):
            layout, t, record = run_half(m, b, rng)
            g = decorated_ideal(layout, record)
            tg, _ = g.to_tableau()
            assert tg.canonical_stabilizers() == t.canonical_stabilizers(g.vertices())

    def test_direct_construction_matches_when_coins_match(self):
        # Building the ideal graph as a circuit and inserting Z gates at the
        # recorded positions reproduces the executed state exactly.
        rng = np.random.default_rng(77)
        layout, t, record = run_half(2, (2, 2), rng)
        g = ideal_half_graph(layout)
        order = g.vertices()
        direct = Tableau(len(order))
        qubit_of, gates = g.to_circuit(order)
        for gate in gates:
            direct.apply(*gate)
        for p, bit in record.bits.items():
            if bit:
                direct.z(qubit_of[p])
        if record.anchor_bit:
            direct.z(qubit_of[layout.anchor])
        assert direct.canonical_stabilizers() == t.canonical_stabilizers(order)

    def test_pushout_z_bits_are_fair_coins(self):
        # Non-leaf tree photons take their Z bit from a push-out
        # measurement; pooled over many runs the bit is 1 half the time.
        rng = np.random.default_rng(123)
        layout, sched = compile_half_rgs(1, (2, 2))
        inner = [p for arm in layout.arms for p in arm.levels[0]]
        ones = total = 0
        for _ in range(1100):
            t = Tableau(layout.qubit_count)
            record = execute_schedule(sched, t, rng)
            for p in inner:
                ones += record.bits[p]
                total += 1
        assert total >= 2000
        assert abs(ones / total - 0.5) < 0.03

    def test_schedule_too_big_for_tableau(self):
        layout, sched = compile_half_rgs(1, (1,))
        t = Tableau(2)
        with pytest.raises(ValueError):
            execute_schedule(sched, t, np.random.default_rng(0))


class TestJoin:
    def _joined(self, m, b, rng):
        la, sa = compile_half_rgs(m, b, first_qubit=0)
        lb, sb = compile_half_rgs(m, b, first_qubit=la.qubit_count)
        t = Tableau(la.qubit_count + lb.qubit_count)
        ha = ExecutedHalf(la, execute_schedule(sa, t, rng))
        hb = ExecutedHalf(lb, execute_schedule(sb, t, rng))
        return t, ha, hb

    def test_forced_join_gives_ideal_rgs(self):
        t, ha, hb = self._joined(1, (1,), ForcedPlus())
        join_halves(t, ha, hb, ForcedPlus())
        g = ideal_rgs_graph(ha.layout, hb.layout)
        tg, _ = g.to_tableau()
        assert tg.canonical_stabilizers() == t.canonical_stabilizers(g.vertices())

    @pytest.mark.parametrize("m,b", [(1, (1,)), (2, (2,)), (2, (2, 2))])
    def test_random_join_matches_decorated_rgs(self, m, b):
        rng = np.random.default_rng(5)
        for _ in range(4):
            t, ha, hb = self._joined(m, b, rng)
            join_halves(t, ha, hb, rng)
            g = ideal_rgs_graph(ha.layout, hb.layout)
            for half in (ha, hb):
                for p, bit in half.record.bits.items():
                    if bit:
                        g.set_tag(p, C_Z)
            tg, _ = g.to_tableau()
            assert tg.canonical_stabilizers() == t.canonical_stabilizers(g.vertices())

    def test_join_outcome_toggles_first_level(self):
        # A -1 folded outcome on one anchor flips the other half's
        # first-level bits relative to the pre-join record.
        rng = np.random.default_rng(9)
        for _ in range(20):
            t, ha, hb = self._joined(2, (2,), rng)
            before_a = dict(ha.record.bits)
            before_b = dict(hb.record.bits)
            res = join_halves(t, ha, hb, rng)
            for p in ha.layout.first_level_photons():
                expect = before_a[p] ^ (1 if res.folded_b < 0 else 0)
                assert ha.record.bits[p] == expect
            for p in hb.layout.first_level_photons():
                expect = before_b[p] ^ (1 if res.folded_a < 0 else 0)
                assert hb.record.bits[p] == expect

    def test_join_symmetry(self):
        # Swapping the anchor roles produces the same canonical state when
        # the outcomes come out the same way.
        t1, ha1, hb1 = self._joined(1, (2,), ForcedPlus())
        join_halves(t1, ha1, hb1, ForcedPlus())
        t2, ha2, hb2 = self._joined(1, (2,), ForcedPlus())
        join_halves(t2, hb2, ha2, ForcedPlus())
        g = ideal_rgs_graph(ha1.layout, hb1.layout)
        live = g.vertices()
        assert t1.canonical_stabilizers(live) == t2.canonical_stabilizers(live)

    def test_dead_anchor_rejected(self):
        rng = np.random.default_rng(1)
        t, ha, hb = self._joined(1, (1,), rng)
        join_halves(t, ha, hb, rng)
        with pytest.raises(ValueError):
            join_halves(t, ha, hb, rng)


class TestResources:
    def test_long_haul_scale_numbers(self):
        rep = resource_report(15, (2, 3), 10)
        assert rep["prior_art_reserve_memories"] == 150
        assert rep["prior_art_total_memories"] == 165
        assert rep["proposed_total"] == 13
        assert rep["proposed_emitters"] == 3
        assert rep["emitter_line_length"] == 4

    def test_zero_ratio_needs_no_reserve(self):
        rep = resource_report(1, (1,), 0)
        assert rep["proposed_reserve_memories"] == 0
        assert rep["proposed_total"] == 2
        assert rep["photons_per_arm"] == 2

    def test_counts(self):
        rep = resource_report(2, (2, 3), 1)
        assert rep["photons_per_half"] == 18
        assert rep["photons_per_rgs"] == 36

    def test_validation(self):
        with pytest.raises(ValueError):
            resource_report(0, (1,), 1)
        with pytest.raises(ValueError):
            resource_report(1, (0,), 1)
