"""Acceptance gate: every criterion runs at its stated tolerance and prints
one pass/fail line (run with ``pytest -v tests/test_acceptance.py -s``)."""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from ppv import (
    Ballot,
    GParams,
    NoConvergence,
    SimulationConfig,
    VoterProfile,
    build_matrix,
    ces_gradient,
    ces_value,
    compare_with_ld,
    influence_report,
    limit_by_fundamental,
    limit_by_squaring,
    make_registry,
    net_proxy_vote,
    net_proxy_vote_rank_one,
    run_simulation,
    tally,
)
from ppv.synthetic import random_session, workshop_session

ORACLE_SESSIONS = 500
LEMMA_PAIRS = 200

# dispersion observed in the original 69-participant workshop, shown for
# context only; random fixtures need not and do not reproduce it
REFERENCE_STD_FRACTIONAL = 0.6417
REFERENCE_STD_WHOLE_VOTE = 4.2007


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name}")


def test_oracle_equivalence_and_conservation_500_sessions():
    with criterion(
        f"oracle equivalence + conservation over {ORACLE_SESSIONS} random sessions (3-200 nodes, < 60 s)"
    ):
        start = time.perf_counter()
        worst_gap = 0.0
        worst_conservation = 0.0
        for seed in range(ORACLE_SESSIONS):
            registry, ballots = random_session(seed, min_nodes=3, max_nodes=200)
            vm = build_matrix(registry, ballots)
            by_squaring = limit_by_squaring(vm)
            by_fundamental = limit_by_fundamental(vm)
            gap = float(np.max(np.abs(by_squaring.entries - by_fundamental.entries)))
            worst_gap = max(worst_gap, gap)
            assert gap <= 1e-9, f"seed {seed}: cross-method gap {gap:.3e}"

            result = tally(by_squaring, registry)
            balance = result.total_delivered + sum(result.undelivered.values())
            drift = abs(balance - result.voters_counted)
            worst_conservation = max(worst_conservation, drift)
            assert drift <= 1e-9, f"seed {seed}: conservation drift {drift:.3e}"
        elapsed = time.perf_counter() - start
        assert elapsed < 60.0, f"took {elapsed:.1f}s"
        print(
            f"  {ORACLE_SESSIONS} sessions in {elapsed:.1f}s, worst gap {worst_gap:.2e}, "
            f"worst conservation drift {worst_conservation:.2e}"
        )


def test_workshop_fixture_conserves_69_votes_under_a_second():
    with criterion("workshop fixture: 69 voters / 10 teams / 4 categories / 20 policies sum to 69.0 in < 1 s"):
        registry, ballots = workshop_session(seed=2023)
        start = time.perf_counter()
        vm = build_matrix(registry, ballots)
        result = tally(limit_by_squaring(vm), registry)
        elapsed = time.perf_counter() - start
        total = result.total_delivered + sum(result.undelivered.values())
        assert total == pytest.approx(69.0, abs=1e-9)
        assert elapsed < 1.0, f"compute took {elapsed:.3f}s"
        print(f"  sum of votes {total:.12f} in {elapsed * 1000:.0f} ms")


def test_influence_floor():
    with criterion("influence floor: every score >= 1 - 1e-12, exactly 1.0 without incoming delegation"):
        checked_nodes = 0
        exact_floor_nodes = 0
        for seed in range(60):
            registry, ballots = random_session(seed, min_nodes=3, max_nodes=80)
            vm = build_matrix(registry, ballots)
            report = influence_report(vm, registry)
            q = vm.transient_block()
            locals_of = {registry.ids[t]: i for i, t in enumerate(vm.block.transient)}
            for node_id, score in report.scores.items():
                assert score >= 1.0 - 1e-12, f"seed {seed}: {node_id} scored {score}"
                checked_nodes += 1
                i = locals_of[node_id]
                incoming = q[i, :].sum() - q[i, i]
                if incoming == 0.0:
                    assert score == pytest.approx(1.0, abs=1e-12)
                    exact_floor_nodes += 1
                else:
                    # any incoming delegation strictly lifts the score
                    assert score > 1.0
        assert exact_floor_nodes > 0
        print(f"  {checked_nodes} scores checked, {exact_floor_nodes} at the exact floor")


def test_lemma_parallelism_and_rank_one_agreement():
    with criterion(
        f"rank-one lemma on {LEMMA_PAIRS} (matrix, node) pairs: parallel rows, scale 1/self-return, both scores agree"
    ):
        rng = np.random.default_rng(424242)
        pairs = 0
        while pairs < LEMMA_PAIRS:
            registry, ballots = random_session(int(rng.integers(0, 10_000)), min_nodes=3, max_nodes=60)
            vm = build_matrix(registry, ballots)
            transient = list(vm.block.transient)
            if not transient:
                continue
            idx = int(transient[int(rng.integers(0, len(transient)))])
            node_id = registry.ids[idx]

            q = vm.transient_block()
            local = transient.index(idx)
            identity = np.eye(q.shape[0])
            e = np.zeros(q.shape[0])
            e[local] = 1.0
            w = np.linalg.solve((identity - q).T, e)
            q_zeroed = q.copy()
            q_zeroed[:, local] = 0.0
            w_prime = np.linalg.solve((identity - q_zeroed).T, e)

            scale = 1.0 / w[local]  # (f.g)/(w.g) with f.g = 1
            assert np.max(np.abs(w_prime - scale * w)) <= 1e-9
            unit_w = w / np.linalg.norm(w)
            unit_wp = w_prime / np.linalg.norm(w_prime)
            assert np.linalg.norm(unit_w - unit_wp) <= 1e-9  # angle deviation

            p_fundamental = net_proxy_vote(vm, node_id)
            p_rank_one = net_proxy_vote_rank_one(vm, node_id)
            assert abs(p_fundamental - p_rank_one) <= 1e-9
            pairs += 1
        print(f"  {pairs} pairs verified")


def test_liquid_democracy_special_case():
    with criterion("whole-vote ballots tally identically through both pipelines; worked example pins 1.0 / 1.5"):
        rng = np.random.default_rng(99)
        for trial in range(20):
            n_voters = int(rng.integers(2, 12))
            n_policies = int(rng.integers(1, 5))
            voters = [f"v{i}" for i in range(n_voters)]
            policies = [f"p{i}" for i in range(n_policies)]
            registry = make_registry(voters=voters, policies=policies)
            ballots = []
            for j, v in enumerate(voters):
                # whole vote on one target; guarantee reachability by
                # pointing the first voter at a policy and later voters at
                # a policy or an earlier voter
                if j == 0 or rng.random() < 0.6:
                    target = policies[int(rng.integers(0, n_policies))]
                else:
                    target = voters[int(rng.integers(0, j))]
                ballots.append(Ballot(v, {target: 1.0}))
            comparison = compare_with_ld(ballots, registry)
            assert comparison.ppv.policy_votes == comparison.ld.policy_votes  # exact

        registry = make_registry(voters=["a", "b"], policies=["p1", "p2"])
        ballots = [Ballot("a", {"b": 0.5, "p1": 0.5}), Ballot("b", {"a": 0.5, "p2": 0.5})]
        vm = build_matrix(registry, ballots)
        result = tally(limit_by_squaring(vm), registry)
        assert result.policy_votes["p1"] == pytest.approx(1.0, abs=1e-12)
        assert result.policy_votes["p2"] == pytest.approx(1.0, abs=1e-12)
        assert net_proxy_vote(vm, "a") == pytest.approx(1.5, abs=1e-12)
        assert net_proxy_vote(vm, "b") == pytest.approx(1.5, abs=1e-12)


def test_convergence_behavior():
    with criterion("squaring hits 1e-12 within 64 squarings when reachable; a pure 2-cycle is reported, not absorbed"):
        max_squarings_seen = 0
        for seed in range(60):
            registry, ballots = random_session(seed, min_nodes=3, max_nodes=120)
            limit = limit_by_squaring(build_matrix(registry, ballots))
            assert limit.residual <= 1e-12
            assert limit.iterations_used <= 64
            max_squarings_seen = max(max_squarings_seen, limit.iterations_used)

        registry = make_registry(voters=["a", "b"], policies=["p"])
        ballots = [Ballot("a", {"b": 1.0}), Ballot("b", {"a": 1.0})]
        limit = limit_by_squaring(build_matrix(registry, ballots))
        assert not limit.fully_absorbed()
        result = tally(limit, registry)
        assert result.undelivered == {
            "a": pytest.approx(1.0, abs=1e-12),
            "b": pytest.approx(1.0, abs=1e-12),
        }
        assert result.policy_votes["p"] == 0.0

        # odd-period closed cycle: the subsequence itself cannot settle
        registry3 = make_registry(voters=["a", "b", "c"], policies=["p"])
        cycle3 = [Ballot("a", {"b": 1.0}), Ballot("b", {"c": 1.0}), Ballot("c", {"a": 1.0})]
        with pytest.raises(NoConvergence):
            limit_by_squaring(build_matrix(registry3, cycle3))
        print(f"  deepest squaring chain on random fixtures: {max_squarings_seen}")


def test_ces_suite():
    with criterion("CES suite: static/dynamic equality, stochastic columns, budget bound, gradient check"):
        registry = make_registry(voters=["v1", "v2", "v3"], policies=["p1", "p2"])
        rng = np.random.default_rng(31)
        profiles = {
            v.id: VoterProfile(
                preference=rng.random(2) * 3,
                expertise={u.id: float(rng.random()) for u in registry.voters},
                rho=0.5,
                beta=1.0,
                gamma=0.0,
            )
            for v in registry.voters
        }
        config = SimulationConfig(
            periods=4, profiles=profiles, g_params=GParams(momentum=0.25)
        )
        result = run_simulation(config, registry)
        for state in result.states:
            for j, voter in enumerate(result.voters):
                static = ces_value(state.weights[:, j], state.delegations[:, j], 0.5)
                assert abs(state.utilities[voter] - static) <= 1e-12
            np.testing.assert_allclose(state.delegations.sum(axis=0), 1.0, atol=1e-9)
            outgoing = state.delegations.sum(axis=0)
            incoming = state.delegations.sum(axis=1)
            assert np.all(outgoing <= 1.0 + incoming + 1e-9)

        for _ in range(40):
            n = int(rng.integers(2, 7))
            weights = rng.random(n) + 0.1
            weights /= weights.sum()
            allocation = rng.random(n) * 0.9 + 0.05
            rho = float(rng.choice([-1.5, -0.5, 0.3, 0.7, 1.5, 2.0]))
            analytic = ces_gradient(weights, allocation, rho)
            h = 1e-7
            for i in range(n):
                up, down = allocation.copy(), allocation.copy()
                up[i] += h
                down[i] -= h
                numeric = (ces_value(weights, up, rho) - ces_value(weights, down, rho)) / (2 * h)
                assert abs(analytic[i] - numeric) <= 1e-6 * max(1.0, abs(numeric))


def test_dispersion_report_emitted():
    with criterion("dispersion report: both standard deviations emitted (reference values shown, not asserted)"):
        registry, ballots = workshop_session(seed=2023)
        comparison = compare_with_ld(ballots, registry)
        assert math.isfinite(comparison.ppv_std)
        assert math.isfinite(comparison.ld_std)
        assert comparison.ppv_std >= 0.0 and comparison.ld_std >= 0.0
        print(
            f"  fractional std {comparison.ppv_std:.4f} vs whole-vote std {comparison.ld_std:.4f} "
            f"(live-workshop reference: {REFERENCE_STD_FRACTIONAL} / {REFERENCE_STD_WHOLE_VOTE})"
        )
