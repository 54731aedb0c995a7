"""Named invariant suites behind the `verify` subcommand.

Each suite returns a SuiteResult; the acceptance tests drive the same
functions at their full sizes, so the CLI and the test suite cannot
drift apart.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import build, decoder
from .clifford1 import C_I, C_Z
from .graphstate import GraphState
from .netsim import ChainConfig, run_batch, run_trial
from .tableau import Tableau

ACCEPTANCE_GRID = tuple(
    (hops, m, b)
    for hops in (0, 1, 2)
    for m in (1, 2, 3)
    for b in ((1,), (2,), (2, 2), (2, 3))
)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _random_graph(rng, n, p=0.5):
    g = GraphState(vertices=range(n))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                g.add_edge(i, j)
    return g


def _states_match(g, t, qubit_of):
    live = g.vertices()
    if not live:
        return True
    tg, _ = g.to_tableau()
    return tg.canonical_stabilizers() == t.canonical_stabilizers(
        [qubit_of[v] for v in live]
    )


def backend_equivalence(n_graphs: int = 500, seed: int = 20_24) -> SuiteResult:
    """Random graphs x random rule sequences: the graph backend must stay
    canonically equal to direct tableau simulation."""
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(n_graphs):
        n = int(rng.integers(2, 9))
        g = _random_graph(rng, n)
        t, qubit_of = g.to_tableau()
        for _ in range(int(rng.integers(1, 7))):
            live = g.vertices()
            if not live:
                break
            op = int(rng.integers(3))
            if op == 0:
                g.local_complement(live[int(rng.integers(len(live)))])
            elif op == 1:
                ok = [v for v in live if g.tag(v) in (C_I, C_Z)]
                if not ok:
                    continue
                v = ok[int(rng.integers(len(ok)))]
                res = t.measure("Z", qubit_of[v], rng)
                g.measure_z(v, res.sign)
            else:
                pairs = [
                    (a, b)
                    for a, b in g.edges()
                    if g.tag(a) in (C_I, C_Z) and g.tag(b) in (C_I, C_Z)
                ]
                if not pairs:
                    continue
                a, b = pairs[int(rng.integers(len(pairs)))]
                sa = t.measure("X", qubit_of[a], rng).sign
                sb = t.measure("X", qubit_of[b], rng).sign
                sa *= -1 if g.tag(a) == C_Z else 1
                sb *= -1 if g.tag(b) == C_Z else 1
                g.set_tag(a, C_I)
                g.set_tag(b, C_I)
                g.fuse_xx(a, b, sa, sb)
        if not _states_match(g, t, qubit_of):
            failures += 1
    return SuiteResult(
        "backend-equivalence",
        failures == 0,
        f"{n_graphs - failures}/{n_graphs} graph-rule sequences match the tableau",
    )


def generation_soundness(seed: int = 7, runs: int = 4) -> SuiteResult:
    """Executed halves must equal the ideal layout graph decorated with
    exactly the recorded side-effect bits."""
    rng = np.random.default_rng(seed)
    checked = failures = 0
    for m in (1, 2):
        for b in ((1,), (2,), (2, 2), (2, 3)):
            layout, sched = build.compile_half_rgs(m, b)
            for _ in range(runs):
                t = Tableau(layout.qubit_count)
                record = build.execute_schedule(sched, t, rng)
                g = build.ideal_half_graph(layout)
                for p, bit in record.bits.items():
                    if bit:
                        g.set_tag(p, C_Z)
                if record.anchor_bit:
                    g.set_tag(layout.anchor, C_Z)
                tg, _ = g.to_tableau()
                checked += 1
                if tg.canonical_stabilizers() != t.canonical_stabilizers(g.vertices()):
                    failures += 1
    return SuiteResult(
        "generation-oracle",
        failures == 0,
        f"{checked - failures}/{checked} executed halves match their decorated layout graph",
    )


def decoder_soundness(trees_per_b: int = 500, seed: int = 11,
                      branchings=((2,), (2, 2), (2, 3))) -> SuiteResult:
    """Forked-oracle equality of every resolved indirect Z, plus uniform
    lossless logical-X candidate sets."""
    rng = np.random.default_rng(seed)
    indirect_checked = mismatches = 0
    uniform_checked = uniform_failures = 0
    for b in branchings:
        layout, _ = build.compile_half_rgs(1, b)
        arm = layout.arms[0]
        g = GraphState()
        for lvl in arm.levels:
            for p in lvl:
                g.add_vertex(p)
        for p, kids in arm.children.items():
            for k in kids:
                g.add_edge(p, k)
        for i in range(trees_per_b):
            logical = "Z" if i % 2 == 0 else "X"
            t, qubit_of = g.to_tableau()
            lost = {p for p in arm.tree_photons if rng.random() < 0.25}
            raw = {}
            for level0, photons in enumerate(arm.levels):
                basis = decoder.physical_basis(logical, level0 + 1)
                for p in photons:
                    if p in lost:
                        raw[p] = decoder.LOST
                    else:
                        raw[p] = t.measure(basis, qubit_of[p], rng).sign
            tree = decoder.build_tree(arm, logical, raw, {})
            for p in arm.tree_photons:
                if tree.node(p).basis != "Z" or not tree.node(p).lost:
                    continue
                value = decoder.indirect_z(tree, p)
                if value is None:
                    continue
                fork = t.copy()
                res = fork.measure("Z", qubit_of[p], rng)
                indirect_checked += 1
                if not res.deterministic or res.sign != value:
                    mismatches += 1
        for _ in range(max(20, trees_per_b // 10)):
            t, qubit_of = g.to_tableau()
            raw = {}
            for level0, photons in enumerate(arm.levels):
                basis = decoder.physical_basis("X", level0 + 1)
                for p in photons:
                    raw[p] = t.measure(basis, qubit_of[p], rng).sign
            votes = decoder.logical_x_candidates(decoder.build_tree(arm, "X", raw, {}))
            uniform_checked += 1
            if len(set(votes)) != 1 or len(votes) != len(arm.first_level):
                uniform_failures += 1
    passed = mismatches == 0 and uniform_failures == 0
    return SuiteResult(
        "decoder-soundness",
        passed,
        f"{indirect_checked} indirect values checked, {mismatches} mismatches; "
        f"{uniform_failures}/{uniform_checked} lossless candidate sets non-uniform",
    )


def frame_grid(trials_per_config: int = 1000, seed: int = 101,
               p_survive: float = 1.0, grid=ACCEPTANCE_GRID,
               workers: int = 1):
    """Oracle soundness over the whole chain grid at one survival level.

    Returns (SuiteResult, per-config stats rows)."""
    rows = []
    bad = 0
    claimed = 0
    for hops, m, b in grid:
        cfg = ChainConfig(hops=hops, arms=m, branching=b, p_survive=p_survive)
        batch = run_batch(cfg, trials_per_config, seed=seed, workers=workers)
        claimed += batch.successes
        bad += batch.oracle_failures
        rows.append(
            {
                "hops": hops,
                "arms": m,
                "branching": list(b),
                "p_survive": p_survive,
                "trials": batch.n_trials,
                "successes": batch.successes,
                "oracle_failures": batch.oracle_failures,
            }
        )
    name = f"frame-grid(p={p_survive})"
    result = SuiteResult(
        name,
        bad == 0,
        f"{claimed} claimed successes across {len(rows)} configs, {bad} oracle failures",
    )
    return result, rows


def propagation_equivalence(trials: int = 1000, seed: int = 31, hops: int = 3) -> SuiteResult:
    """Hop-by-hop frame propagation must equal the one-shot XOR on every
    successful trial of a multi-source chain."""
    cfg = ChainConfig(hops=hops, arms=2, branching=(2,), p_survive=0.97)
    mismatches = 0
    seen = 0
    for tid in range(trials):
        rec = run_trial(cfg, trial_id=tid, seed=seed)
        if not rec.success:
            continue
        seen += 1
        one = (
            decoder.end_node_frame(rec.reports, "left", rec.local_bits["left"]).parity_bit,
            decoder.end_node_frame(rec.reports, "right", rec.local_bits["right"]).parity_bit,
        )
        seq = decoder.sequential_frame_bits(
            rec.details, rec.local_bits["left"], rec.local_bits["right"]
        )
        if one != seq:
            mismatches += 1
    return SuiteResult(
        "propagation-equivalence",
        seen > 0 and mismatches == 0,
        f"{seen} successful {hops}-source trials, {mismatches} view mismatches",
    )


def statistical_anchors(seed: int = 5) -> SuiteResult:
    """Push-out Z bits and analyzer successes are fair coins (+-0.03)."""
    rng = np.random.default_rng(seed)
    layout, sched = build.compile_half_rgs(1, (2, 2))
    inner = [p for arm in layout.arms for p in arm.levels[0]]
    ones = total = 0
    while total < 2000:
        t = Tableau(layout.qubit_count)
        record = build.execute_schedule(sched, t, rng)
        for p in inner:
            ones += record.bits[p]
            total += 1
    z_freq = ones / total

    hits = 0
    n_pairs = 2000
    for _ in range(n_pairs):
        t = Tableau(2)
        t.h(0)
        t.h(1)
        hits += decoder.run_bsm(t, 0, 1, rng, 0.5).success
    bsm_rate = hits / n_pairs
    passed = abs(z_freq - 0.5) < 0.03 and abs(bsm_rate - 0.5) < 0.03
    return SuiteResult(
        "statistical-anchors",
        passed,
        f"Z-bit frequency {z_freq:.4f} over {total}, analyzer rate {bsm_rate:.4f} over {n_pairs}",
    )


def resource_arithmetic() -> SuiteResult:
    rep = build.resource_report(15, (2, 3), 10)
    checks = [
        rep["prior_art_reserve_memories"] == 150,
        rep["prior_art_total_memories"] == 15 * 11,
        rep["proposed_total"] == 13,
        rep["emitter_line_length"] == 4,
        build.resource_report(1, (1,), 0)["proposed_reserve_memories"] == 0,
    ]
    return SuiteResult(
        "resource-arithmetic",
        all(checks),
        f"{sum(checks)}/{len(checks)} count identities hold",
    )


def determinism(trials: int = 200, seed: int = 77) -> SuiteResult:
    cfg = ChainConfig(hops=1, arms=2, branching=(2, 2), p_survive=0.9)
    one = run_batch(cfg, trials, seed=seed, workers=1)
    four = run_batch(cfg, trials, seed=seed, workers=4)
    same = (
        one.records_jsonl() == four.records_jsonl()
        and one.summary_json() == four.summary_json()
    )
    return SuiteResult(
        "determinism",
        same,
        f"{trials} trials byte-identical at 1 and 4 workers" if same else "outputs differ",
    )


def run_all(quick: bool = False, workers: int = 1):
    """Every suite, at reduced sizes when quick is set."""
    results = [
        backend_equivalence(60 if quick else 500),
        generation_soundness(runs=2 if quick else 4),
        decoder_soundness(40 if quick else 500),
        statistical_anchors(),
        resource_arithmetic(),
        propagation_equivalence(60 if quick else 1000),
        determinism(24 if quick else 200),
    ]
    grid = ACCEPTANCE_GRID[:6] if quick else ACCEPTANCE_GRID
    trials = 40 if quick else 1000
    for p in (1.0, 0.95, 0.9):
        res, _ = frame_grid(trials, p_survive=p, grid=grid, workers=workers)
        results.append(res)
    return results
