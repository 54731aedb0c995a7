"""Trial orchestration: chain topology, lossy channels, ABSA processing,
end-node corrections, and oracle verification of every claimed success.

A chain has two memory-equipped end nodes, `hops` source nodes between
them, and hops+1 ABSAs (hops=0 means the two end nodes meet at a single
ABSA). One tableau holds every qubit of a trial; trials are independent
and reproducible from (config, seed, trial_id).
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import build, decoder
from .decoder import LOST
from .pauli import PauliString
from .tableau import Tableau

TRIAL_SCHEMA = "rgsim.trial/1"
SUMMARY_SCHEMA = "rgsim.batch-summary/1"


def survival_from_length(length_km: float, loss_db_per_km: float = 0.2) -> float:
    """Per-photon survival probability of a fiber span."""
    if length_km < 0 or loss_db_per_km < 0:
        raise ValueError("length and attenuation must be non-negative")
    return 10.0 ** (-loss_db_per_km * length_km / 10.0)


@dataclass(frozen=True)
class ChainConfig:
    """Immutable description of one chain experiment."""

    hops: int = 0  # number of source nodes between the end nodes
    arms: int = 1
    branching: tuple = (1,)
    p_survive: float = 1.0
    measure_error: float = 0.0
    bsm_success: float = 0.5
    round_trip_ratio: int = 0  # informational; sizes memory reserves only
    indirect_majority: bool | None = None  # None: on iff measure_error > 0

    def __post_init__(self):
        object.__setattr__(self, "branching", build.branching_vector(self.branching))
        if self.hops < 0:
            raise ValueError("hops must be >= 0")
        if self.arms < 1:
            raise ValueError("arms must be >= 1")
        for name in ("p_survive", "measure_error", "bsm_success"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.round_trip_ratio < 0:
            raise ValueError("round_trip_ratio must be >= 0")

    @property
    def use_majority(self) -> bool:
        if self.indirect_majority is None:
            return self.measure_error > 0
        return self.indirect_majority

    def to_obj(self) -> dict:
        return {
            "hops": self.hops,
            "arms": self.arms,
            "branching": list(self.branching),
            "p_survive": self.p_survive,
            "measure_error": self.measure_error,
            "bsm_success": self.bsm_success,
            "round_trip_ratio": self.round_trip_ratio,
            "indirect_majority": self.indirect_majority,
        }


@dataclass(frozen=True)
class _Blueprint:
    """Per-config wiring shared by every trial: half layouts and schedules
    at fixed qubit offsets, ABSA pairings, and the two memory qubits."""

    cfg: ChainConfig
    halves: tuple  # (node, side, layout, schedule) in execution order
    absa_sides: tuple  # per ABSA: (left half index, right half index)
    join_pairs: tuple  # per source node: (left half index, right half index)
    memory_left: int
    memory_right: int
    total_qubits: int
    photon_count: int


@lru_cache(maxsize=None)
def _blueprint(cfg: ChainConfig) -> _Blueprint:
    halves = []
    offset = 0

    def add_half(node, side):
        nonlocal offset
        layout, schedule = build.compile_half_rgs(cfg.arms, cfg.branching, offset)
        offset += layout.qubit_count
        halves.append((node, side, layout, schedule))
        return len(halves) - 1

    k = cfg.hops
    right_half_of = {}
    left_half_of = {}
    join_pairs = []
    right_half_of[0] = add_half(0, "R")
    for node in range(1, k + 1):
        li = add_half(node, "L")
        ri = add_half(node, "R")
        left_half_of[node] = li
        right_half_of[node] = ri
        join_pairs.append((li, ri))
    left_half_of[k + 1] = add_half(k + 1, "L")

    absa_sides = tuple(
        (right_half_of[j], left_half_of[j + 1]) for j in range(k + 1)
    )
    photon_count = sum(len(h[2].photons) for h in halves)
    return _Blueprint(
        cfg=cfg,
        halves=tuple(halves),
        absa_sides=absa_sides,
        join_pairs=tuple(join_pairs),
        memory_left=halves[right_half_of[0]][2].anchor,
        memory_right=halves[left_half_of[k + 1]][2].anchor,
        total_qubits=offset,
        photon_count=photon_count,
    )


def trial_rng(seed: int, trial_id: int):
    """Counter-based per-trial stream; independent of worker scheduling."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, trial_id))))


def transmit(photons, p_survive: float, t: Tableau, rng) -> set:
    """Send photons through a lossy channel.

    Each photon is independently lost with probability 1 - p_survive; a
    lost photon gets a uniformly random Pauli applied in the tableau and is
    flagged. The receiver sees the flags deterministically.
    """
    if not 0.0 <= p_survive <= 1.0:
        raise ValueError("p_survive must be in [0, 1]")
    lost = set()
    for p in photons:
        if rng.random() >= p_survive:
            lost.add(p)
            pauli = ("x", "y", "z")[int(rng.integers(3))]
            getattr(t, pauli)(p)
    return lost


def verify_final(t: Tableau, qubit_a: int, qubit_b: int) -> bool:
    """True iff +X_a Z_b and +Z_a X_b both stabilize the state."""
    return t.is_stabilized_by(
        PauliString.from_ops(t.n, {qubit_a: "X", qubit_b: "Z"})
    ) and t.is_stabilized_by(
        PauliString.from_ops(t.n, {qubit_a: "Z", qubit_b: "X"})
    )


@dataclass
class AbsaTrialData:
    report: decoder.AbsaReport
    detail: decoder.AbsaDetail


@dataclass
class TrialRecord:
    trial_id: int
    success: bool
    oracle_pass: bool | None
    reports: list
    details: list
    chosen_arms: list
    photons_created: int
    photons_lost: int
    corrections: dict | None
    local_bits: dict

    @property
    def photons_measured(self) -> int:
        return self.photons_created - self.photons_lost

    def to_obj(self) -> dict:
        return {
            "schema": TRIAL_SCHEMA,
            "trial": self.trial_id,
            "success": self.success,
            "oracle_pass": self.oracle_pass,
            "absas": [
                {
                    "absa": j,
                    "success": rep.success,
                    "parity_left": rep.z_parity_left,
                    "parity_right": rep.z_parity_right,
                    "chosen_arm": det.chosen_arm,
                    "bsm_success": det.bsm_success,
                }
                for j, (rep, det) in enumerate(zip(self.reports, self.details))
            ],
            "loss": {
                "created": self.photons_created,
                "lost": self.photons_lost,
                "measured": self.photons_measured,
            },
            "corrections": self.corrections,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), sort_keys=True, separators=(",", ":"))


def _measure_photon(t, basis, photon, lost, raw, e_meas, rng):
    res = t.measure(basis, photon, rng)
    if photon in lost:
        raw[photon] = LOST
        return
    sign = res.sign
    if e_meas > 0 and rng.random() < e_meas:
        sign = -sign
    raw[photon] = sign


def run_trial(cfg: ChainConfig, trial_id: int = 0, seed: int = 0, rng=None) -> TrialRecord:
    """Execute one full trial: generate, join, transmit, analyze, correct.

    The oracle verdict is computed exactly when end-to-end success is
    claimed: the corrected memory pair must be the two-vertex graph state.
    """
    bp = _blueprint(cfg)
    if rng is None:
        rng = trial_rng(seed, trial_id)
    t = Tableau(bp.total_qubits)

    executed = []
    for node, side, layout, schedule in bp.halves:
        record = build.execute_schedule(schedule, t, rng)
        executed.append(build.ExecutedHalf(layout, record))
    for li, ri in bp.join_pairs:
        build.join_halves(t, executed[li], executed[ri], rng)

    lost = set()
    for half in executed:
        lost |= transmit(half.layout.photons, cfg.p_survive, t, rng)

    e_meas = cfg.measure_error
    reports = []
    details = []
    for li, ri in bp.absa_sides:
        left, right = executed[li], executed[ri]
        outcomes = []
        for i in range(cfg.arms):
            ol = left.layout.arms[i].outer
            orr = right.layout.arms[i].outer
            if ol in lost or orr in lost:
                for p in (ol, orr):
                    t.measure("Z", p, rng)
                outcomes.append(decoder.BsmOutcome(i, False))
                continue
            out = decoder.run_bsm(t, ol, orr, rng, cfg.bsm_success, pair_index=i)
            if out.success and e_meas > 0:
                sl = -out.sign_left if rng.random() < e_meas else out.sign_left
                sr = -out.sign_right if rng.random() < e_meas else out.sign_right
                out = decoder.BsmOutcome(i, True, sl, sr)
            outcomes.append(out)
        chosen = decoder.select_arm(outcomes)

        raw_left = {}
        raw_right = {}
        for group, raw in ((left, raw_left), (right, raw_right)):
            for i, arm in enumerate(group.layout.arms):
                logical = "X" if i == chosen else "Z"
                for level0, photons in enumerate(arm.levels):
                    basis = decoder.physical_basis(logical, level0 + 1)
                    for p in photons:
                        _measure_photon(t, basis, p, lost, raw, e_meas, rng)

        report, detail = decoder.absa_process(
            left.layout.arms,
            right.layout.arms,
            left.record.bits,
            right.record.bits,
            raw_left,
            raw_right,
            outcomes,
            use_majority=cfg.use_majority,
        )
        reports.append(report)
        details.append(detail)

    success = all(rep.success for rep in reports)
    local_left = executed[bp.absa_sides[0][0]].record.anchor_bit
    local_right = executed[bp.absa_sides[-1][1]].record.anchor_bit
    oracle_pass = None
    corrections = None
    if success:
        frame_left = decoder.end_node_frame(reports, "left", local_left)
        frame_right = decoder.end_node_frame(reports, "right", local_right)
        if frame_left.parity_bit:
            t.z(bp.memory_left)
        if frame_right.parity_bit:
            t.z(bp.memory_right)
        corrections = {
            "left": frame_left.correction,
            "right": frame_right.correction,
        }
        oracle_pass = verify_final(t, bp.memory_left, bp.memory_right)

    return TrialRecord(
        trial_id=trial_id,
        success=success,
        oracle_pass=oracle_pass,
        reports=reports,
        details=details,
        chosen_arms=[d.chosen_arm for d in details],
        photons_created=bp.photon_count,
        photons_lost=len(lost),
        corrections=corrections,
        local_bits={"left": local_left, "right": local_right},
    )


# -- batches -----------------------------------------------------------------


@dataclass
class BatchResult:
    cfg: ChainConfig
    seed: int
    records: list = field(default_factory=list)

    @property
    def n_trials(self) -> int:
        return len(self.records)

    @property
    def successes(self) -> int:
        return sum(r.success for r in self.records)

    @property
    def oracle_failures(self) -> int:
        return sum(1 for r in self.records if r.success and not r.oracle_pass)

    def summary_obj(self) -> dict:
        n = self.n_trials
        succ = self.successes
        checked = sum(1 for r in self.records if r.oracle_pass is not None)
        passes = sum(1 for r in self.records if r.oracle_pass)
        hist = {}
        for r in self.records:
            hist[r.photons_lost] = hist.get(r.photons_lost, 0) + 1
        absa_counts = [0] * (self.cfg.hops + 1)
        for r in self.records:
            for j, rep in enumerate(r.reports):
                absa_counts[j] += rep.success
        return {
            "schema": SUMMARY_SCHEMA,
            "config": self.cfg.to_obj(),
            "seed": self.seed,
            "trials": n,
            "successes": succ,
            "success_rate": round(succ / n, 6) if n else None,
            "oracle_checked": checked,
            "oracle_passes": passes,
            "oracle_pass_rate": round(passes / checked, 6) if checked else None,
            "loss_histogram": {str(k): v for k, v in sorted(hist.items())},
            "absa_success_counts": absa_counts,
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary_obj(), sort_keys=True, indent=2)

    def records_jsonl(self) -> str:
        return "\n".join(r.to_json() for r in self.records) + "\n"


def _run_span(args):
    cfg, seed, lo, hi = args
    return [run_trial(cfg, trial_id=i, seed=seed) for i in range(lo, hi)]


def run_batch(cfg: ChainConfig, n_trials: int, seed: int = 0, workers: int = 1) -> BatchResult:
    """Run n_trials independent trials; output depends only on (cfg, seed).

    Trials are seeded individually, so any worker count gives byte-identical
    records; aggregation merges by trial id.
    """
    if n_trials < 1:
        raise ValueError("need at least one trial")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    result = BatchResult(cfg=cfg, seed=seed)
    if workers == 1:
        result.records = _run_span((cfg, seed, 0, n_trials))
        return result
    spans = []
    step = max(1, (n_trials + workers - 1) // workers)
    for lo in range(0, n_trials, step):
        spans.append((cfg, seed, lo, min(lo + step, n_trials)))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunks = list(pool.map(_run_span, spans))
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=lambda r: r.trial_id)
    result.records = records
    return result
