"""Experiment orchestration: true-mean precomputation, bandit runs over the
channel pool, regret analytics and multi-run sweeps.

Execution model
---------------
Alignment is solved once per (arm, sample) cell of the pool
(:func:`iabandit.ia.evaluate_pool`); every run then draws sample indices
and reads rewards from that table, which is exactly equivalent to solving
per slot because the pool is fixed and the solver is deterministic.

Runs are executed in lockstep batches: policy state lives in (runs, arms)
arrays and every slot advances all runs with elementwise operations. All
per-run randomness is pre-drawn from per-run generators (seeded via a
splitmix64 mix of master seed, run index, policy id and sweep-axis index),
so results are bit-identical however runs are grouped or ordered - a
single run is just a batch of one.

The controller's reward for a slot is the total over receivers, scaled
into [0, 1] by its largest achievable value: for rate rewards the largest
total rate observed anywhere in the pool, for chordal rewards the
structural maximum K. Per-receiver values are additionally tracked with
the per-user normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import bandit
from .channel import ChannelPool, ScenarioConfig, arm_index, generate_pool
from .errors import ConfigError, DomainError, ScenarioMismatchError
from .ia import PoolTables, evaluate_pool

REWARD_KINDS = ("sumrate", "chordal")
POLICY_KINDS = ("oracle", "ucb1", "klucb", "random", "fixed")
_POLICY_IDS = {name: i for i, name in enumerate(POLICY_KINDS)}

_MASK64 = (1 << 64) - 1
_STREAM_SAMPLES = 0
_STREAM_POLICY = 1
_STREAM_RESAMPLE = 2


def splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(master: int, run: int, policy_id: int, axis_index: int = 0) -> int:
    """Deterministic per-run seed; parallel-safe by construction."""
    h = splitmix64(master & _MASK64)
    h = splitmix64(h ^ ((run + 1) & _MASK64))
    h = splitmix64(h ^ (((policy_id + 1) << 32) & _MASK64))
    h = splitmix64(h ^ (((axis_index + 1) << 16) & _MASK64))
    return h


def _stream(seed: int, stream_id: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=(seed, stream_id)))


@dataclass(frozen=True)
class Policy:
    """Selection policy: which index rule plus its parameters."""

    kind: str
    a: float = 0.0  # KL-UCB budget parameter; the usual choice is 0
    divergence: str = "exp"
    fixed_state: int = 0  # for 'fixed': the state every receiver is stuck on

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ConfigError(f"policy kind must be one of {POLICY_KINDS}")
        if self.a < 0:
            raise ConfigError("klucb parameter a must be >= 0")
        if self.divergence not in bandit.DIVERGENCES:
            raise ConfigError(f"divergence must be one of {bandit.DIVERGENCES}")

    @property
    def policy_id(self) -> int:
        return _POLICY_IDS[self.kind]

    @property
    def label(self) -> str:
        return "conventional" if self.kind == "fixed" else self.kind


@dataclass(frozen=True)
class RewardContext:
    """Reward tables for one (pool, reward kind, transmit power).

    ``per_receiver`` holds the per-receiver rewards X_i in [0, 1] (rates
    normalized by the largest observed per-user rate; chordal distances as
    is). ``arm_reward`` is what the controller ingests: the total reward
    of the combination normalized by the largest total observed anywhere
    in the pool, so it also lives in [0, 1].
    """

    reward_kind: str
    p_tx: float
    per_receiver: np.ndarray  # (C, S, K) normalized rewards in [0, 1]
    arm_reward: np.ndarray  # (C, S) normalized total reward in [0, 1]
    sum_rate_bits: np.ndarray  # (C, S) unnormalized network sum rate
    ok: np.ndarray  # (C, S)
    r_max: float  # largest observed per-user rate (1.0 for chordal)
    r_max_total: float  # normalizer of the total reward (K for chordal)
    n_states: int

    def __post_init__(self):
        for arr in (self.per_receiver, self.arm_reward, self.sum_rate_bits, self.ok):
            arr.setflags(write=False)


def make_reward_context(tables: PoolTables, reward_kind: str, p_tx: float, n_states: int) -> RewardContext:
    if reward_kind not in REWARD_KINDS:
        raise ConfigError(f"reward_kind must be one of {REWARD_KINDS}")
    if p_tx < 0:
        raise ConfigError("transmit power must be >= 0")
    rates = np.log2(1.0 + p_tx * tables.gain)  # (C, S, K)
    if reward_kind == "sumrate":
        any_ok = bool(np.any(tables.ok))
        r_max = float(np.nanmax(rates)) if any_ok else 1.0
        totals = rates.sum(axis=2)
        r_max_total = float(np.nanmax(totals)) if any_ok else 1.0
        per_receiver = rates / r_max if r_max > 0 else rates
        arm_reward = totals / r_max_total if r_max_total > 0 else totals
    else:
        r_max = 1.0
        r_max_total = 3.0
        per_receiver = tables.chordal
        arm_reward = tables.chordal.sum(axis=2) / r_max_total
    return RewardContext(
        reward_kind=reward_kind,
        p_tx=float(p_tx),
        per_receiver=per_receiver,
        arm_reward=arm_reward,
        sum_rate_bits=rates.sum(axis=2),
        ok=tables.ok,
        r_max=r_max,
        r_max_total=r_max_total,
        n_states=n_states,
    )


@dataclass(frozen=True)
class TrueMeans:
    """Exact per-arm mean rewards over the pool distribution."""

    mu: np.ndarray  # (C,)
    best_arm: int
    mu_star: float
    r_max: float
    reward_kind: str
    p_tx: float

    def __post_init__(self):
        self.mu.setflags(write=False)


def true_means_from_context(ctx: RewardContext) -> TrueMeans:
    masked = np.where(ctx.ok, ctx.arm_reward, np.nan)
    mu = np.nanmean(masked, axis=1)
    best = int(np.argmax(mu))
    return TrueMeans(
        mu=mu,
        best_arm=best,
        mu_star=float(mu[best]),
        r_max=ctx.r_max,
        reward_kind=ctx.reward_kind,
        p_tx=ctx.p_tx,
    )


def precompute_true_means(
    pool: ChannelPool,
    p_tx: float,
    reward_kind: str = "sumrate",
    tables: PoolTables | None = None,
) -> TrueMeans:
    """Per-arm mean rewards, best arm and the normalization constant.

    ``tables`` may carry a previously computed :func:`evaluate_pool` result
    to avoid re-solving alignment for every cell.
    """
    if tables is None:
        tables = evaluate_pool(pool)
    ctx = make_reward_context(tables, reward_kind, p_tx, pool.n_states)
    return true_means_from_context(ctx)


# --------------------------------------------------------------------------
# lockstep simulation core


def _draw_samples(seeds, n_slots, n_samples):
    out = np.empty((len(seeds), n_slots), dtype=np.int64)
    for r, seed in enumerate(seeds):
        out[r] = _stream(seed, _STREAM_SAMPLES).integers(0, n_samples, size=n_slots)
    return out


def _fix_degenerate(samples, chosen, ok, seeds, resample_counts, t):
    """Redraw sample indices landing on degenerate (arm, sample) cells."""
    s = samples[:, t]
    bad = ~ok[chosen, s]
    for r in np.nonzero(bad)[0]:
        rng = _stream(seeds[r], _STREAM_RESAMPLE)
        # skip draws consumed by earlier slots of this run
        for _ in range(resample_counts[r]):
            rng.integers(0, ok.shape[1])
        while not ok[chosen[r], s[r]]:
            s[r] = rng.integers(0, ok.shape[1])
            resample_counts[r] += 1
    return s


def _simulate_pool_batch(ctx: RewardContext, policy: Policy, n_slots: int, seeds, means: TrueMeans | None):
    """Advance all runs of one policy in lockstep over the reward tables.

    Returns (chosen (R, n), rewards (R, n), samples (R, n), resamples (R,),
    pull_counts (R, C)).
    """
    n_arms, n_samples = ctx.arm_reward.shape
    n_runs = len(seeds)
    if policy.kind in ("ucb1", "klucb") and n_slots < n_arms:
        raise ConfigError(f"horizon {n_slots} leaves no room to initialize {n_arms} arms")

    samples = _draw_samples(seeds, n_slots, n_samples)
    resamples = np.zeros(n_runs, dtype=np.int64)
    rows = np.arange(n_runs)

    if policy.kind in ("oracle", "random", "fixed"):
        if policy.kind == "oracle":
            if means is None:
                raise ConfigError("oracle policy needs precomputed true means")
            chosen = np.full((n_runs, n_slots), means.best_arm, dtype=np.int64)
        elif policy.kind == "fixed":
            arm = arm_index((policy.fixed_state,) * 3, ctx.n_states)
            chosen = np.full((n_runs, n_slots), arm, dtype=np.int64)
        else:
            chosen = np.empty((n_runs, n_slots), dtype=np.int64)
            for r, seed in enumerate(seeds):
                chosen[r] = _stream(seed, _STREAM_POLICY).integers(0, n_arms, size=n_slots)
        if not ctx.ok.all():
            for t in range(n_slots):
                samples[:, t] = _fix_degenerate(samples, chosen[:, t], ctx.ok, seeds, resamples, t)
        rewards = ctx.arm_reward[chosen, samples]
        counts = np.zeros((n_runs, n_arms), dtype=np.int64)
        np.add.at(counts, (rows[:, None], chosen), 1)
        return chosen, rewards, samples, resamples, counts

    # index policies: per-arm statistics per run
    m = np.zeros((n_runs, n_arms), dtype=np.int64)
    cum = np.zeros((n_runs, n_arms))
    chosen = np.empty((n_runs, n_slots), dtype=np.int64)
    rewards = np.empty((n_runs, n_slots))
    clean = ctx.ok.all()

    for t in range(n_slots):
        if t < n_arms:
            arm = np.full(n_runs, t, dtype=np.int64)
        else:
            r_bar = cum / m
            if policy.kind == "ucb1":
                idx = r_bar + np.sqrt(2.0 * np.log(t) / m)
            else:
                idx = bandit.klucb_index_fast(r_bar, m, bandit.klucb_budget(t, policy.a)) \
                    if policy.divergence == "exp" \
                    else bandit.klucb_index(r_bar, m, t, policy.a, policy.divergence)
            arm = np.argmax(idx, axis=1)
        s = samples[:, t] if clean else _fix_degenerate(samples, arm, ctx.ok, seeds, resamples, t)
        r = ctx.arm_reward[arm, s]
        chosen[:, t] = arm
        rewards[:, t] = r
        m[rows, arm] += 1
        cum[rows, arm] += r
    return chosen, rewards, samples, resamples, m


@dataclass(frozen=True)
class RunTrace:
    """Everything one run produced, slot by slot."""

    policy: Policy
    reward_kind: str
    p_tx: float
    arms: np.ndarray  # (n,) chosen arm per slot
    samples: np.ndarray  # (n,) pool sample per slot
    per_receiver: np.ndarray  # (n, K) normalized rewards
    arm_reward: np.ndarray  # (n,) reward fed to the policy
    pull_counts: np.ndarray  # (C,)
    n_resampled: int

    @property
    def cumulative_reward(self) -> np.ndarray:
        return np.cumsum(self.arm_reward)

    @property
    def horizon(self) -> int:
        return self.arms.shape[0]


def run_combinational(
    pool: ChannelPool,
    policy: Policy,
    n_slots: int,
    reward_kind: str = "sumrate",
    p_tx: float = 100.0,
    run_seed: int = 0,
    tables: PoolTables | None = None,
    means: TrueMeans | None = None,
) -> RunTrace:
    """One bandit run over the joint state-combination arms.

    Per slot the policy picks an arm, a pool sample is drawn, the
    (pre-solved) alignment rewards for that cell are observed and only the
    chosen arm's statistics are updated.
    """
    if tables is None:
        tables = evaluate_pool(pool)
    ctx = make_reward_context(tables, reward_kind, p_tx, pool.n_states)
    if policy.kind == "oracle" and means is None:
        means = true_means_from_context(ctx)
    chosen, rewards, samples, resamples, counts = _simulate_pool_batch(
        ctx, policy, n_slots, [run_seed], means
    )
    return RunTrace(
        policy=policy,
        reward_kind=reward_kind,
        p_tx=float(p_tx),
        arms=chosen[0],
        samples=samples[0],
        per_receiver=ctx.per_receiver[chosen[0], samples[0]],
        arm_reward=rewards[0],
        pull_counts=counts[0],
        n_resampled=int(resamples[0]),
    )


# --------------------------------------------------------------------------
# distributed mode: one controller per receiver, chordal rewards

_DISTRIBUTED_POLICIES = ("ucb1", "klucb", "random", "oracle")


def per_receiver_state_means(ctx: RewardContext) -> np.ndarray:
    """Marginal mean chordal reward of receiver k using state p, averaged
    over the other receivers' states and the pool. Shape (K, P)."""
    n_arms = ctx.arm_reward.shape[0]
    p = ctx.n_states
    digits = np.empty((n_arms, 3), dtype=np.int64)
    idx = np.arange(n_arms)
    digits[:, 2] = idx % p
    digits[:, 1] = (idx // p) % p
    digits[:, 0] = idx // (p * p)
    masked = np.where(ctx.ok[:, :, None], ctx.per_receiver, np.nan)
    out = np.empty((3, p))
    for k in range(3):
        for state in range(p):
            out[k, state] = np.nanmean(masked[digits[:, k] == state, :, k])
    return out


def _simulate_distributed_batch(ctx: RewardContext, policy: Policy, n_slots: int, seeds):
    """K independent controllers, each over its receiver's P states; the
    joint selection feeds alignment and each controller sees only its own
    receiver's chordal reward."""
    n_arms, n_samples = ctx.arm_reward.shape
    p = ctx.n_states
    n_runs = len(seeds)
    if policy.kind in ("ucb1", "klucb") and n_slots < p:
        raise ConfigError("horizon leaves no room to initialize the per-receiver arms")

    samples = _draw_samples(seeds, n_slots, n_samples)
    resamples = np.zeros(n_runs, dtype=np.int64)
    rows = np.arange(n_runs)[:, None]
    cols = np.arange(3)[None, :]

    state_draws = None
    if policy.kind == "random":
        state_draws = np.empty((n_runs, n_slots, 3), dtype=np.int64)
        for r, seed in enumerate(seeds):
            state_draws[r] = _stream(seed, _STREAM_POLICY).integers(0, p, size=(n_slots, 3))
    greedy = None
    if policy.kind == "oracle":
        greedy = np.argmax(per_receiver_state_means(ctx), axis=1)  # (K,)

    m = np.zeros((n_runs, 3, p), dtype=np.int64)
    cum = np.zeros((n_runs, 3, p))
    chosen = np.empty((n_runs, n_slots), dtype=np.int64)
    rewards = np.empty((n_runs, n_slots))
    clean = ctx.ok.all()

    for t in range(n_slots):
        if policy.kind == "random":
            states = state_draws[:, t]
        elif policy.kind == "oracle":
            states = np.broadcast_to(greedy, (n_runs, 3))
        elif t < p:
            states = np.full((n_runs, 3), t, dtype=np.int64)
        else:
            r_bar = cum / m
            if policy.kind == "ucb1":
                idx = r_bar + np.sqrt(2.0 * np.log(t) / m)
            else:
                idx = bandit.klucb_index_fast(r_bar, m, bandit.klucb_budget(t, policy.a)) \
                    if policy.divergence == "exp" \
                    else bandit.klucb_index(r_bar, m, t, policy.a, policy.divergence)
            states = np.argmax(idx, axis=2)
        arm = (states[:, 0] * p + states[:, 1]) * p + states[:, 2]
        s = samples[:, t] if clean else _fix_degenerate(samples, arm, ctx.ok, seeds, resamples, t)
        x = ctx.per_receiver[arm, s]  # (R, K)
        chosen[:, t] = arm
        rewards[:, t] = x.mean(axis=1)
        if policy.kind in ("ucb1", "klucb"):
            m[rows, cols, states] += 1
            cum[rows, cols, states] += x
    return chosen, rewards, samples, resamples


def run_distributed(
    pool: ChannelPool,
    policy: Policy,
    n_slots: int,
    p_tx: float = 100.0,
    run_seed: int = 0,
    tables: PoolTables | None = None,
) -> RunTrace:
    """One distributed run: per-receiver controllers with chordal rewards."""
    if policy.kind not in _DISTRIBUTED_POLICIES:
        raise ConfigError(f"distributed mode supports policies {_DISTRIBUTED_POLICIES}")
    if tables is None:
        tables = evaluate_pool(pool)
    ctx = make_reward_context(tables, "chordal", p_tx, pool.n_states)
    chosen, rewards, samples, resamples = _simulate_distributed_batch(ctx, policy, n_slots, [run_seed])
    counts = np.zeros((1, ctx.arm_reward.shape[0]), dtype=np.int64)
    np.add.at(counts, (np.zeros(n_slots, dtype=np.int64), chosen[0]), 1)
    return RunTrace(
        policy=policy,
        reward_kind="chordal",
        p_tx=float(p_tx),
        arms=chosen[0],
        samples=samples[0],
        per_receiver=ctx.per_receiver[chosen[0], samples[0]],
        arm_reward=rewards[0],
        pull_counts=counts[0],
        n_resampled=int(resamples[0]),
    )


# --------------------------------------------------------------------------
# regret analytics


def regret_trace(trace: RunTrace, means: TrueMeans) -> np.ndarray:
    """Cumulative regret r(n) = n mu* - cumulative reward, per slot."""
    if (trace.reward_kind, trace.p_tx) != (means.reward_kind, means.p_tx):
        raise ScenarioMismatchError("trace and means come from different scenarios")
    n = np.arange(1, trace.horizon + 1)
    return n * means.mu_star - trace.cumulative_reward


@dataclass(frozen=True)
class RegretBound:
    value: float
    degenerate: bool


def ucb1_regret_bound(means: TrueMeans, n: int) -> RegretBound:
    """Logarithmic UCB1 regret budget: 8 sum(ln n / gap) + (1 + pi^2/3) sum(gap)."""
    gaps = means.mu_star - means.mu
    gaps = gaps[gaps > 0]
    if gaps.size == 0:
        return RegretBound(value=0.0, degenerate=True)
    value = 8.0 * np.sum(np.log(n) / gaps) + (1.0 + np.pi**2 / 3.0) * np.sum(gaps)
    return RegretBound(value=float(value), degenerate=False)


@dataclass(frozen=True)
class LaiRobbinsRow:
    arm: int
    mu: float
    divergence_to_best: float
    bound_coefficient: float  # 1 / D(mu_i || mu*), inf when mu_i == mu*
    empirical_coefficient: float  # E[T_i(n)] / ln(n)


def lai_robbins_diag(
    means: TrueMeans,
    pull_counts: np.ndarray,
    n: int,
    divergence: str = "exp",
) -> list[LaiRobbinsRow]:
    """Empirical pull counts against the asymptotic per-arm budget.

    ``pull_counts`` has shape (runs, C). Diagnostic only: the bound is
    asymptotic, so no pass/fail semantics here.
    """
    mu = means.mu
    if np.any(mu <= 0) or np.any(mu >= 1):
        raise DomainError("per-arm means must lie strictly inside (0, 1)")
    d = bandit.klucb_divergence if divergence == "exp" else bandit.bernoulli_divergence
    mean_pulls = np.asarray(pull_counts, dtype=float).mean(axis=0)
    rows = []
    for i in range(mu.size):
        if i == means.best_arm:
            continue
        div = float(d(mu[i], means.mu_star))
        rows.append(
            LaiRobbinsRow(
                arm=i,
                mu=float(mu[i]),
                divergence_to_best=div,
                bound_coefficient=float(1.0 / div) if div > 0 else float("inf"),
                empirical_coefficient=float(mean_pulls[i] / np.log(n)),
            )
        )
    return rows


# --------------------------------------------------------------------------
# synthetic instances (policy validation without the channel machinery)


def run_bernoulli_batch(means, policy: Policy, n_slots: int, runs: int, master_seed: int):
    """Lockstep runs on a synthetic Bernoulli bandit. Returns (chosen,
    rewards, pull_counts) with shapes ((R, n), (R, n), (R, C))."""
    means = np.asarray(means, dtype=float)
    n_arms = means.size
    seeds = [derive_seed(master_seed, r, policy.policy_id) for r in range(runs)]
    u = np.empty((runs, n_slots))
    for r, seed in enumerate(seeds):
        u[r] = _stream(seed, _STREAM_SAMPLES).random(n_slots)

    rows = np.arange(runs)
    m = np.zeros((runs, n_arms), dtype=np.int64)
    cum = np.zeros((runs, n_arms))
    chosen = np.empty((runs, n_slots), dtype=np.int64)
    rewards = np.empty((runs, n_slots))

    random_arms = None
    if policy.kind == "random":
        random_arms = np.empty((runs, n_slots), dtype=np.int64)
        for r, seed in enumerate(seeds):
            random_arms[r] = _stream(seed, _STREAM_POLICY).integers(0, n_arms, size=n_slots)

    for t in range(n_slots):
        if policy.kind == "oracle":
            arm = np.full(runs, int(np.argmax(means)), dtype=np.int64)
        elif policy.kind == "fixed":
            arm = np.zeros(runs, dtype=np.int64)
        elif policy.kind == "random":
            arm = random_arms[:, t]
        elif t < n_arms:
            arm = np.full(runs, t, dtype=np.int64)
        else:
            r_bar = cum / m
            if policy.kind == "ucb1":
                idx = r_bar + np.sqrt(2.0 * np.log(t) / m)
            else:
                idx = bandit.klucb_index_fast(r_bar, m, bandit.klucb_budget(t, policy.a)) \
                    if policy.divergence == "exp" \
                    else bandit.klucb_index(r_bar, m, t, policy.a, policy.divergence)
            arm = np.argmax(idx, axis=1)
        r = (u[:, t] < means[arm]).astype(float)
        chosen[:, t] = arm
        rewards[:, t] = r
        m[rows, arm] += 1
        cum[rows, arm] += r
    return chosen, rewards, m


# --------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class CellStats:
    """Aggregates of one (axis value, policy) sweep cell."""

    policy_label: str
    axis_value: float
    runs: int
    n_slots: int
    n_resampled: int
    mean_final_regret: float
    stderr_final_regret: float
    mean_sum_rate: float
    stderr_sum_rate: float
    regret_curve: np.ndarray | None = None  # (n,) mean cumulative regret
    regret_curve_stderr: np.ndarray | None = None
    chordal_values: np.ndarray | None = None  # (R, n) per-slot totals
    mean_pull_counts: np.ndarray | None = None  # (C,)


def _stderr(values: np.ndarray, axis=0):
    values = np.asarray(values, dtype=float)
    r = values.shape[axis]
    if r < 2:
        return np.zeros_like(values.mean(axis=axis))
    return values.std(axis=axis, ddof=1) / np.sqrt(r)


def _chunked(seq, n_chunks):
    size = (len(seq) + n_chunks - 1) // n_chunks
    return [seq[i : i + size] for i in range(0, len(seq), size)]


def run_cell(
    ctx: RewardContext,
    policy: Policy,
    n_slots: int,
    runs: int,
    master_seed: int,
    axis_index: int = 0,
    axis_value: float = 0.0,
    means: TrueMeans | None = None,
    mode: str = "combinational",
    keep_curves: bool = False,
    keep_chordal: bool = False,
    workers: int = 1,
) -> CellStats:
    """Run one policy for ``runs`` seeded runs and aggregate.

    ``workers`` splits the batch into chunks executed on a thread pool.
    Every run is seeded independently and the update rules are elementwise
    per run, so results are bit-identical for any worker count.
    """
    if means is None:
        means = true_means_from_context(ctx)
    seeds = [derive_seed(master_seed, r, policy.policy_id, axis_index) for r in range(runs)]
    if mode == "combinational":
        simulate = lambda s: _simulate_pool_batch(ctx, policy, n_slots, s, means)
    elif mode == "distributed":
        if ctx.reward_kind != "chordal":
            raise ConfigError("distributed mode learns from chordal rewards")
        simulate = lambda s: _simulate_distributed_batch(ctx, policy, n_slots, s) + (None,)
    else:
        raise ConfigError("mode must be 'combinational' or 'distributed'")

    if workers <= 1 or len(seeds) == 1:
        parts = [simulate(seeds)]
    else:
        from concurrent.futures import ThreadPoolExecutor

        chunks = _chunked(seeds, min(workers, len(seeds)))
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            parts = list(pool.map(simulate, chunks))
    chosen = np.concatenate([p[0] for p in parts], axis=0)
    rewards = np.concatenate([p[1] for p in parts], axis=0)
    samples = np.concatenate([p[2] for p in parts], axis=0)
    resamples = np.concatenate([p[3] for p in parts], axis=0)
    counts = None
    if parts[0][4] is not None:
        counts = np.concatenate([p[4] for p in parts], axis=0)

    cum = np.cumsum(rewards, axis=1)
    regret = np.arange(1, n_slots + 1) * means.mu_star - cum
    sum_rates = ctx.sum_rate_bits[chosen, samples].mean(axis=1)  # (R,) time-averaged
    chordal_vals = None
    if keep_chordal and ctx.reward_kind == "chordal":
        chordal_vals = rewards * 3.0  # mean over receivers -> total
    return CellStats(
        policy_label=policy.label,
        axis_value=axis_value,
        runs=runs,
        n_slots=n_slots,
        n_resampled=int(resamples.sum()),
        mean_final_regret=float(regret[:, -1].mean()),
        stderr_final_regret=float(_stderr(regret[:, -1])),
        mean_sum_rate=float(sum_rates.mean()),
        stderr_sum_rate=float(_stderr(sum_rates)),
        regret_curve=regret.mean(axis=0) if keep_curves else None,
        regret_curve_stderr=_stderr(regret) if keep_curves else None,
        chordal_values=chordal_vals,
        mean_pull_counts=counts.mean(axis=0) if (counts is not None and keep_curves) else None,
    )


SWEEP_AXES = ("power_db", "states", "horizon")


@dataclass(frozen=True)
class SweepResult:
    axis: str
    values: tuple
    cells: list[CellStats] = field(default_factory=list)
    true_means: dict = field(default_factory=dict)  # axis value -> TrueMeans
    n_degenerate: int = 0


def sweep(
    cfg: ScenarioConfig,
    axis: str,
    values,
    policies,
    runs: int,
    n_slots: int,
    reward_kind: str = "sumrate",
    p_tx: float = 100.0,
    master_seed: int = 42,
    mode: str = "combinational",
    keep_curves: bool = False,
    keep_chordal: bool = False,
    workers: int = 1,
) -> SweepResult:
    """Run every (axis value, policy) cell with derived per-run seeds.

    ``axis`` selects what varies: transmit power in dB, the number of
    antenna states P (pool regenerated per value), or the horizon.
    """
    values = list(values)
    if axis not in SWEEP_AXES:
        raise ConfigError(f"axis must be one of {SWEEP_AXES}")
    if not values:
        raise ConfigError("sweep needs at least one axis value")
    if runs < 1:
        raise ConfigError("runs must be >= 1")

    cells: list[CellStats] = []
    means_by_value: dict = {}
    n_degenerate = 0

    if axis in ("power_db", "horizon"):
        pool = generate_pool(cfg)
        tables = evaluate_pool(pool)
        n_degenerate = tables.n_degenerate
        for vi, value in enumerate(values):
            p_lin = 10.0 ** (value / 10.0) if axis == "power_db" else p_tx
            slots = int(value) if axis == "horizon" else n_slots
            ctx = make_reward_context(tables, reward_kind, p_lin, cfg.n_states)
            means = true_means_from_context(ctx)
            means_by_value[value] = means
            for pol in policies:
                cells.append(
                    run_cell(
                        ctx, pol, slots, runs, master_seed,
                        axis_index=vi, axis_value=value, means=means, mode=mode,
                        keep_curves=keep_curves, keep_chordal=keep_chordal,
                        workers=workers,
                    )
                )
    else:  # states axis: regenerate the pool per P
        for vi, value in enumerate(values):
            p_states = int(value)
            sub_cfg = ScenarioConfig(
                n_states=p_states,
                n_samples=cfg.n_samples,
                seed=cfg.seed,
                channel_model=cfg.channel_model,
            )
            pool = generate_pool(sub_cfg)
            tables = evaluate_pool(pool)
            n_degenerate += tables.n_degenerate
            ctx = make_reward_context(tables, reward_kind, p_tx, p_states)
            means = true_means_from_context(ctx)
            means_by_value[value] = means
            for pol in policies:
                cells.append(
                    run_cell(
                        ctx, pol, n_slots, runs, master_seed,
                        axis_index=vi, axis_value=value, means=means, mode=mode,
                        keep_curves=keep_curves, keep_chordal=keep_chordal,
                        workers=workers,
                    )
                )
    return SweepResult(
        axis=axis,
        values=tuple(values),
        cells=cells,
        true_means=means_by_value,
        n_degenerate=n_degenerate,
    )
