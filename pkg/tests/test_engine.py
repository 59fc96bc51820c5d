import numpy as np
import pytest

from iabandit import channel, engine, ia
from iabandit.errors import ConfigError, DomainError, ScenarioMismatchError


@pytest.fixture(scope="module")
def toy():
    """Small P=2 scenario shared by engine tests."""
    cfg = channel.ScenarioConfig(n_states=2, n_samples=50, seed=77)
    pool = channel.generate_pool(cfg)
    tables = ia.evaluate_pool(pool)
    ctx = engine.make_reward_context(tables, "sumrate", 100.0, 2)
    return cfg, pool, tables, ctx


def test_derive_seed_distinct_and_stable():
    seeds = {engine.derive_seed(42, r, p, a) for r in range(50) for p in range(5) for a in range(3)}
    assert len(seeds) == 50 * 5 * 3
    assert engine.derive_seed(42, 1, 2, 0) == engine.derive_seed(42, 1, 2, 0)


def test_true_means_brute_force(toy):
    cfg, pool, tables, ctx = toy
    means = engine.true_means_from_context(ctx)
    for arm in range(cfg.n_arms):
        combo = channel.decode_arm(arm, 2)
        vals = []
        for s in range(pool.n_samples):
            h = channel.combo_channels(pool, combo, s)
            sol = ia.solve_ia(h)
            total = sum(ia.user_rate(h[k, k], sol, k, 100.0) for k in range(3))
            vals.append(total / ctx.r_max_total)
        assert means.mu[arm] == pytest.approx(np.mean(vals), abs=1e-12)
    assert means.mu_star == means.mu.max()
    assert means.best_arm == int(np.argmax(means.mu))


def test_scaled_uniform_pool_has_equal_means():
    cfg = channel.ScenarioConfig(
        n_states=2, state_powers=np.ones((2, 2)), n_samples=30, channel_model="scaled"
    )
    means = engine.precompute_true_means(channel.generate_pool(cfg), p_tx=100.0)
    assert np.all(np.abs(means.mu - means.mu[0]) < 1e-12)


def test_scaled_uniform_pool_fixed_arms_interchangeable():
    # with identical states every fixed arm sees the same reward sequence
    cfg = channel.ScenarioConfig(
        n_states=2, state_powers=np.ones((2, 2)), n_samples=25, channel_model="scaled"
    )
    pool = channel.generate_pool(cfg)
    tables = ia.evaluate_pool(pool)
    a = engine.run_combinational(
        pool, engine.Policy("fixed", fixed_state=0), 120, run_seed=3, tables=tables
    )
    b = engine.run_combinational(
        pool, engine.Policy("fixed", fixed_state=1), 120, run_seed=3, tables=tables
    )
    assert np.allclose(a.arm_reward, b.arm_reward, atol=1e-12)


def test_default_profile_best_arm_uses_strongest_state():
    means = engine.precompute_true_means(
        channel.generate_pool(channel.ScenarioConfig(n_samples=200)), p_tx=100.0
    )
    assert means.best_arm == channel.arm_index((3, 3, 3), 4)


def test_run_combinational_conservation(toy):
    cfg, pool, tables, ctx = toy
    trace = engine.run_combinational(
        pool, engine.Policy("klucb"), 400, p_tx=100.0, run_seed=9, tables=tables
    )
    assert trace.horizon == 400
    assert trace.pull_counts.sum() == 400
    assert trace.cumulative_reward[-1] == pytest.approx(trace.arm_reward.sum(), rel=1e-15)
    assert np.all((trace.arm_reward >= 0) & (trace.arm_reward <= 1))
    counted = np.bincount(trace.arms, minlength=cfg.n_arms)
    assert np.array_equal(counted, trace.pull_counts)
    # rewards match the table cells slot by slot
    assert np.array_equal(trace.arm_reward, ctx.arm_reward[trace.arms, trace.samples])


def test_run_combinational_deterministic(toy):
    _, pool, tables, _ = toy
    a = engine.run_combinational(pool, engine.Policy("ucb1"), 300, run_seed=4, tables=tables)
    b = engine.run_combinational(pool, engine.Policy("ucb1"), 300, run_seed=4, tables=tables)
    assert np.array_equal(a.arms, b.arms)
    assert np.array_equal(a.arm_reward, b.arm_reward)


def test_run_combinational_oracle_and_fixed(toy):
    _, pool, tables, ctx = toy
    means = engine.true_means_from_context(ctx)
    oracle = engine.run_combinational(pool, engine.Policy("oracle"), 100, run_seed=1, tables=tables)
    assert np.all(oracle.arms == means.best_arm)
    fixed = engine.run_combinational(
        pool, engine.Policy("fixed", fixed_state=1), 100, run_seed=1, tables=tables
    )
    assert np.all(fixed.arms == channel.arm_index((1, 1, 1), 2))


def test_run_combinational_needs_room_for_init(toy):
    _, pool, tables, _ = toy
    with pytest.raises(ConfigError):
        engine.run_combinational(pool, engine.Policy("ucb1"), 5, tables=tables)


def test_partial_information_contract(toy):
    # only the chosen arm's statistics move: replaying the trace through
    # scalar updates reproduces the final counts and means
    _, pool, tables, ctx = toy
    trace = engine.run_combinational(pool, engine.Policy("ucb1"), 300, run_seed=3, tables=tables)
    m = np.zeros(8, dtype=int)
    cum = np.zeros(8)
    for arm, r in zip(trace.arms, trace.arm_reward):
        m[arm] += 1
        cum[arm] += r
    assert np.array_equal(m, trace.pull_counts)


def test_regret_trace_oracle_near_zero(toy):
    _, pool, tables, ctx = toy
    means = engine.true_means_from_context(ctx)
    regs = []
    for r in range(20):
        tr = engine.run_combinational(
            pool, engine.Policy("oracle"), 500, run_seed=100 + r, tables=tables, means=means
        )
        regs.append(engine.regret_trace(tr, means)[-1])
    stderr = np.std(regs, ddof=1) / np.sqrt(len(regs))
    assert abs(np.mean(regs)) < 4 * stderr + 1e-9


def test_regret_trace_random_slope(toy):
    _, pool, tables, ctx = toy
    means = engine.true_means_from_context(ctx)
    finals = []
    for r in range(30):
        tr = engine.run_combinational(
            pool, engine.Policy("random"), 2000, run_seed=r, tables=tables, means=means
        )
        finals.append(engine.regret_trace(tr, means)[-1])
    expected_slope = means.mu_star - means.mu.mean()
    assert np.mean(finals) / 2000 == pytest.approx(expected_slope, rel=0.10)


def test_regret_trace_worst_arm_bound(toy):
    _, pool, tables, ctx = toy
    means = engine.true_means_from_context(ctx)
    tr = engine.run_combinational(pool, engine.Policy("random"), 1000, run_seed=8, tables=tables)
    reg = engine.regret_trace(tr, means)
    n = np.arange(1, 1001)
    # pointwise bound up to reward noise around the worst mean
    assert np.all(reg <= n * (means.mu_star - means.mu.min()) + 3.0)


def test_regret_trace_scenario_mismatch(toy):
    _, pool, tables, _ = toy
    means = engine.precompute_true_means(pool, p_tx=10.0, tables=tables)
    tr = engine.run_combinational(pool, engine.Policy("random"), 50, p_tx=100.0, tables=tables)
    with pytest.raises(ScenarioMismatchError):
        engine.regret_trace(tr, means)


def test_ucb1_regret_bound_example():
    means = engine.TrueMeans(
        mu=np.array([0.9, 0.8]), best_arm=0, mu_star=0.9, r_max=1.0,
        reward_kind="sumrate", p_tx=1.0,
    )
    bound = engine.ucb1_regret_bound(means, n=int(np.e) + 1)
    # evaluate at exactly n = e via the formula: 8 * ln(e)/0.1 + (1 + pi^2/3) * 0.1
    exact = engine.ucb1_regret_bound(means, n=np.e)
    assert exact.value == pytest.approx(80.42898681336964, abs=1e-10)
    assert not bound.degenerate


def test_ucb1_regret_bound_degenerate():
    means = engine.TrueMeans(
        mu=np.array([0.5, 0.5]), best_arm=0, mu_star=0.5, r_max=1.0,
        reward_kind="sumrate", p_tx=1.0,
    )
    bound = engine.ucb1_regret_bound(means, 1000)
    assert bound.degenerate and bound.value == 0.0


def test_lai_robbins_rows():
    means = engine.TrueMeans(
        mu=np.array([0.8, 0.4]), best_arm=0, mu_star=0.8, r_max=1.0,
        reward_kind="sumrate", p_tx=1.0,
    )
    pulls = np.array([[900, 100], [880, 120]])
    rows = engine.lai_robbins_diag(means, pulls, n=1000)
    assert len(rows) == 1
    row = rows[0]
    assert row.arm == 1
    assert row.divergence_to_best == pytest.approx(0.1931471805599453, abs=1e-12)
    assert row.bound_coefficient == pytest.approx(1.0 / 0.1931471805599453, rel=1e-12)
    assert row.empirical_coefficient == pytest.approx(110 / np.log(1000), rel=1e-12)

    bad = engine.TrueMeans(
        mu=np.array([1.0, 0.4]), best_arm=0, mu_star=1.0, r_max=1.0,
        reward_kind="sumrate", p_tx=1.0,
    )
    with pytest.raises(DomainError):
        engine.lai_robbins_diag(bad, pulls, n=1000)


def test_lai_robbins_simulation_diagnostic():
    # KL-UCB's empirical pull coefficient tracks 1/D on a two-arm instance
    means = np.array([0.9, 0.8])
    _, _, pulls = engine.run_bernoulli_batch(means, engine.Policy("klucb"), 10_000, 20, 42)
    tm = engine.TrueMeans(mu=means.copy(), best_arm=0, mu_star=0.9, r_max=1.0,
                          reward_kind="sumrate", p_tx=1.0)
    row = engine.lai_robbins_diag(tm, pulls, n=10_000, divergence="exp")[0]
    ratio = row.empirical_coefficient / row.bound_coefficient
    assert 1 / 3 < ratio < 3


def test_batch_equals_single_runs(toy):
    _, pool, tables, ctx = toy
    means = engine.true_means_from_context(ctx)
    pol = engine.Policy("klucb")
    cell_seeds = [engine.derive_seed(42, r, pol.policy_id, 0) for r in range(3)]
    chosen, rewards, samples, _, _ = engine._simulate_pool_batch(ctx, pol, 200, cell_seeds, means)
    for r, seed in enumerate(cell_seeds):
        tr = engine.run_combinational(
            pool, pol, 200, run_seed=seed, tables=tables, means=means
        )
        assert np.array_equal(tr.arms, chosen[r])
        assert np.array_equal(tr.arm_reward, rewards[r])


def test_workers_bit_identical(toy):
    _, pool, tables, ctx = toy
    for pol in (engine.Policy("ucb1"), engine.Policy("klucb"), engine.Policy("random")):
        a = engine.run_cell(ctx, pol, 300, 8, 42, keep_curves=True, workers=1)
        b = engine.run_cell(ctx, pol, 300, 8, 42, keep_curves=True, workers=4)
        assert np.array_equal(a.regret_curve, b.regret_curve)
        assert a.mean_sum_rate == b.mean_sum_rate


def test_distributed_single_state_equals_fixed():
    cfg = channel.ScenarioConfig(n_states=1, n_samples=30, seed=3)
    pool = channel.generate_pool(cfg)
    tables = ia.evaluate_pool(pool)
    dist = engine.run_distributed(pool, engine.Policy("klucb"), 50, run_seed=5, tables=tables)
    assert np.all(dist.arms == 0)
    fixed = engine.run_combinational(
        pool, engine.Policy("fixed"), 50, reward_kind="chordal", run_seed=5, tables=tables
    )
    assert np.array_equal(dist.arms, fixed.arms)
    assert np.array_equal(dist.samples, fixed.samples)


def test_distributed_oracle_locks_states(toy):
    _, pool, tables, _ = toy
    tr = engine.run_distributed(pool, engine.Policy("oracle"), 60, run_seed=2, tables=tables)
    assert np.all(tr.arms == tr.arms[0])
    ctx = engine.make_reward_context(tables, "chordal", 100.0, 2)
    marginals = engine.per_receiver_state_means(ctx)
    states = channel.decode_arm(int(tr.arms[0]), 2)
    assert states == tuple(int(np.argmax(marginals[k])) for k in range(3))


def test_distributed_rejects_fixed_policy(toy):
    _, pool, tables, _ = toy
    with pytest.raises(ConfigError):
        engine.run_distributed(pool, engine.Policy("fixed"), 50, tables=tables)


def test_distributed_updates_only_own_receiver(toy):
    _, pool, tables, _ = toy
    tr = engine.run_distributed(pool, engine.Policy("klucb"), 300, run_seed=11, tables=tables)
    assert tr.pull_counts.sum() == 300
    assert np.all((tr.arm_reward >= 0) & (tr.arm_reward <= 1))


def test_bernoulli_batch_statistics():
    means = np.array([0.9, 0.5])
    chosen, rewards, pulls = engine.run_bernoulli_batch(
        means, engine.Policy("oracle"), 2000, 10, 42
    )
    assert np.all(chosen == 0)
    assert rewards.mean() == pytest.approx(0.9, abs=0.02)
    assert np.all(pulls.sum(axis=1) == 2000)


def test_resampling_on_degenerate_cells(toy):
    cfg, pool, tables, _ = toy
    h = pool.h.copy()
    h[2, 0, 0, 7] = np.array([[1.0, 2.0], [2.0, 4.0]])
    doctored = channel.ChannelPool(config=cfg, h=h)
    bad_tables = ia.evaluate_pool(doctored)
    assert bad_tables.n_degenerate > 0
    pol = engine.Policy("fixed")  # arm (0,0,0) hits the degenerate sample
    tr1 = engine.run_combinational(doctored, pol, 500, run_seed=1, tables=bad_tables)
    tr2 = engine.run_combinational(doctored, pol, 500, run_seed=1, tables=bad_tables)
    assert tr1.n_resampled > 0
    assert np.isfinite(tr1.arm_reward).all()
    assert np.array_equal(tr1.samples, tr2.samples)  # redraws are seeded too
    assert not np.any((tr1.arms == 0) & (tr1.samples == 7))


def test_sweep_single_cell_matches_run(toy):
    cfg, pool, tables, ctx = toy
    res = engine.sweep(
        cfg, "power_db", [20.0], [engine.Policy("fixed")], runs=1, n_slots=100,
        master_seed=7,
    )
    assert len(res.cells) == 1
    cell = res.cells[0]
    seed = engine.derive_seed(7, 0, engine.Policy("fixed").policy_id, 0)
    tr = engine.run_combinational(pool, engine.Policy("fixed"), 100, run_seed=seed, tables=tables)
    reg = engine.regret_trace(tr, res.true_means[20.0])
    assert cell.mean_final_regret == pytest.approx(reg[-1], rel=1e-12)
    assert cell.stderr_final_regret == 0.0


def test_sweep_states_axis_random_regret_grows(toy):
    cfg, _, _, _ = toy
    res = engine.sweep(
        cfg, "states", [2, 4], [engine.Policy("random")], runs=20, n_slots=1500,
        master_seed=11,
    )
    r2, r4 = (c.mean_final_regret for c in res.cells)
    assert r4 > r2


def test_sweep_validation(toy):
    cfg, _, _, _ = toy
    with pytest.raises(ConfigError):
        engine.sweep(cfg, "snr", [1], [engine.Policy("random")], 1, 10)
    with pytest.raises(ConfigError):
        engine.sweep(cfg, "power_db", [], [engine.Policy("random")], 1, 10)
    with pytest.raises(ConfigError):
        engine.sweep(cfg, "power_db", [10.0], [engine.Policy("random")], 0, 10)


def test_policy_validation():
    with pytest.raises(ConfigError):
        engine.Policy("greedy")
    with pytest.raises(ConfigError):
        engine.Policy("klucb", a=-1.0)
    with pytest.raises(ConfigError):
        engine.Policy("klucb", divergence="gaussian")
    assert engine.Policy("fixed").label == "conventional"
