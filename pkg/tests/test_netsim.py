"""Trial/batch orchestration tests: loss model, determinism, claim
soundness, conservation, and record schemas."""

import json

import numpy as np
import pytest

from rgsim.decoder import end_node_frame, sequential_frame_bits
from rgsim.netsim import (
    ChainConfig,
    run_batch,
    run_trial,
    survival_from_length,
    transmit,
    trial_rng,
    verify_final,
)
from rgsim.tableau import Tableau


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            ChainConfig(hops=-1)
        with pytest.raises(ValueError):
            ChainConfig(arms=0)
        with pytest.raises(ValueError):
            ChainConfig(p_survive=1.5)
        with pytest.raises(ValueError):
            ChainConfig(branching=(0,))

    def test_survival_from_length(self):
        assert survival_from_length(0) == 1.0
        assert survival_from_length(50, 0.2) == pytest.approx(10 ** -1.0)
        with pytest.raises(ValueError):
            survival_from_length(-1)

    def test_majority_default_follows_error_rate(self):
        assert not ChainConfig().use_majority
        assert ChainConfig(measure_error=0.01).use_majority
        assert not ChainConfig(measure_error=0.01, indirect_majority=False).use_majority


class TestTransmit:
    def test_no_loss(self):
        t = Tableau(4)
        assert transmit(range(4), 1.0, t, np.random.default_rng(0)) == set()

    def test_total_loss(self):
        t = Tableau(4)
        assert transmit(range(4), 0.0, t, np.random.default_rng(0)) == {0, 1, 2, 3}

    def test_binomial_bound(self):
        t = Tableau(100)
        rng = np.random.default_rng(0)
        losses = 0
        for _ in range(10):
            losses += len(transmit(range(100), 0.9, t, rng))
        # 1000 photons at 10% loss: 3 sigma is about 28
        assert abs(losses - 100) < 30


class TestVerifyFinal:
    def test_graph_state_passes(self):
        t = Tableau(2)
        t.h(0)
        t.h(1)
        t.cz(0, 1)
        assert verify_final(t, 0, 1)

    def test_stray_z_fails(self):
        t = Tableau(2)
        t.h(0)
        t.h(1)
        t.cz(0, 1)
        t.z(0)
        assert not verify_final(t, 0, 1)


class TestRunTrial:
    def test_lossless_success_and_oracle(self):
        cfg = ChainConfig(hops=1, arms=2, branching=(2,), bsm_success=1.0)
        rec = run_trial(cfg, trial_id=0, seed=42)
        assert rec.success
        assert rec.oracle_pass
        assert rec.corrections is not None

    def test_total_loss_fails_every_absa(self):
        cfg = ChainConfig(hops=1, arms=2, branching=(1,), p_survive=0.0)
        rec = run_trial(cfg, trial_id=0, seed=0)
        assert not rec.success
        assert rec.oracle_pass is None
        assert all(not rep.success for rep in rec.reports)
        assert all(not any(det.bsm_success) for det in rec.details)
        assert rec.photons_lost == rec.photons_created

    def test_success_iff_all_absas_succeed(self):
        cfg = ChainConfig(hops=2, arms=2, branching=(2, 2), p_survive=0.93)
        for tid in range(60):
            rec = run_trial(cfg, trial_id=tid, seed=5)
            assert rec.success == all(rep.success for rep in rec.reports)
            if rec.success:
                assert all(any(det.bsm_success) for det in rec.details)

    def test_conservation(self):
        cfg = ChainConfig(hops=1, arms=2, branching=(2, 2), p_survive=0.9)
        for tid in range(20):
            rec = run_trial(cfg, trial_id=tid, seed=9)
            assert rec.photons_created == rec.photons_measured + rec.photons_lost

    def test_reproducible_from_seed_and_id(self):
        cfg = ChainConfig(hops=1, arms=2, branching=(2,), p_survive=0.95)
        a = run_trial(cfg, trial_id=3, seed=17)
        b = run_trial(cfg, trial_id=3, seed=17)
        assert a.to_json() == b.to_json()
        c = run_trial(cfg, trial_id=4, seed=17)
        assert c.to_json() != a.to_json()

    def test_claim_soundness_under_loss(self):
        cfg = ChainConfig(hops=1, arms=3, branching=(2, 2), p_survive=0.9)
        checked = 0
        for tid in range(150):
            rec = run_trial(cfg, trial_id=tid, seed=2)
            if rec.success:
                checked += 1
                assert rec.oracle_pass
        assert checked > 0

    def test_sequential_equals_oneshot(self):
        cfg = ChainConfig(hops=3, arms=2, branching=(2,), p_survive=0.97)
        seen = 0
        for tid in range(80):
            rec = run_trial(cfg, trial_id=tid, seed=13)
            if not rec.success:
                continue
            seen += 1
            one = (
                end_node_frame(rec.reports, "left", rec.local_bits["left"]).parity_bit,
                end_node_frame(rec.reports, "right", rec.local_bits["right"]).parity_bit,
            )
            seq = sequential_frame_bits(
                rec.details, rec.local_bits["left"], rec.local_bits["right"]
            )
            assert one == seq
        assert seen > 0

    def test_single_absa_rate_tracks_bsm_parameter(self):
        cfg = ChainConfig(hops=0, arms=1, branching=(1,))
        n = 2000
        wins = sum(run_trial(cfg, trial_id=i, seed=0).success for i in range(n))
        # success requires the single pair's analyzer to fire (p = 0.5)
        assert abs(wins / n - 0.5) < 0.03


class TestRunBatch:
    def test_single_trial_matches_run_trial(self):
        cfg = ChainConfig(hops=0, arms=1, branching=(1,))
        batch = run_batch(cfg, 1, seed=8)
        assert batch.records[0].to_json() == run_trial(cfg, 0, seed=8).to_json()

    def test_worker_count_invariance(self):
        cfg = ChainConfig(hops=1, arms=2, branching=(2,), p_survive=0.95)
        one = run_batch(cfg, 24, seed=6, workers=1)
        four = run_batch(cfg, 24, seed=6, workers=4)
        assert one.records_jsonl() == four.records_jsonl()
        assert one.summary_json() == four.summary_json()

    def test_summary_shape(self):
        cfg = ChainConfig(hops=1, arms=2, branching=(2,), p_survive=0.9)
        batch = run_batch(cfg, 30, seed=1)
        summary = batch.summary_obj()
        assert summary["trials"] == 30
        assert summary["successes"] == sum(r.success for r in batch.records)
        assert sum(summary["loss_histogram"].values()) == 30
        assert len(summary["absa_success_counts"]) == cfg.hops + 1

    def test_records_round_trip(self):
        cfg = ChainConfig(hops=0, arms=2, branching=(2,), p_survive=0.95)
        batch = run_batch(cfg, 10, seed=4)
        for line in batch.records_jsonl().strip().splitlines():
            obj = json.loads(line)
            assert json.dumps(obj, sort_keys=True, separators=(",", ":")) == line

    def test_validation(self):
        cfg = ChainConfig()
        with pytest.raises(ValueError):
            run_batch(cfg, 0)
        with pytest.raises(ValueError):
            run_batch(cfg, 1, workers=0)


def test_trial_rng_streams_are_stable():
    a = trial_rng(5, 7).integers(0, 2**31, 4).tolist()
    b = trial_rng(5, 7).integers(0, 2**31, 4).tolist()
    c = trial_rng(5, 8).integers(0, 2**31, 4).tolist()
    assert a == b
    assert a != c


def test_measure_error_runs_complete():
    # With reported-outcome flips the trial still always terminates with an
    # explicit verdict; claimed successes may legitimately fail the oracle.
    cfg = ChainConfig(hops=1, arms=2, branching=(2, 2), measure_error=0.05)
    outcomes = [run_trial(cfg, trial_id=i, seed=11) for i in range(20)]
    assert all(r.oracle_pass is not None for r in outcomes if r.success)
