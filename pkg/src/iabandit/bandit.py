"""Index policies over arm statistics: UCB1, KL-UCB and baselines.

All selection functions work on plain arrays of per-arm statistics
(``r_bar``: empirical mean reward in [0, 1], ``m``: pull counts) so the
same code serves single runs and batched sweeps. Ties in every argmax
break to the lowest arm id, which keeps runs reproducible.

The KL-UCB index uses the divergence d(x, y) = x/y - 1 - ln(x/y) by
default; the Bernoulli KL is available behind the ``divergence`` flag for
sensitivity checks since rewards are bounded in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RewardRangeError, UninitializedArmError

# Empirical means are clamped away from {0, 1} inside divergence
# evaluations; d has a log singularity at x = 0.
EPS_FLOOR = 1e-6
# Upper-confidence values are capped here; the bracket for the KL solve
# grows geometrically and gives up at this value.
INDEX_CAP = 1e9
REWARD_SLACK = 1e-9

DIVERGENCES = ("exp", "bernoulli")


@dataclass(frozen=True)
class ArmState:
    """Statistics of a single arm."""

    m: int = 0
    cum_reward: float = 0.0

    @property
    def r_bar(self) -> float:
        return self.cum_reward / self.m if self.m > 0 else 0.0


def update(arm: ArmState, reward: float) -> ArmState:
    """Fold one observed reward into an arm's statistics."""
    if not -REWARD_SLACK <= reward <= 1.0 + REWARD_SLACK:
        raise RewardRangeError(f"reward {reward} outside [0, 1]")
    return ArmState(m=arm.m + 1, cum_reward=arm.cum_reward + float(reward))


def ucb1_index(r_bar, m, n):
    """UCB1 index r_bar + sqrt(2 ln(n) / m); elementwise over arrays."""
    return np.asarray(r_bar, dtype=float) + np.sqrt(2.0 * np.log(n) / np.asarray(m, dtype=float))


def ucb1_select(r_bar, m, n: int) -> int:
    """Arm maximizing the UCB1 index after every arm was pulled once.

    ``n`` is the number of slots played so far (= sum of pull counts).
    """
    m = np.asarray(m)
    if np.any(m == 0):
        raise UninitializedArmError("ucb1_select requires every arm pulled at least once")
    return int(np.argmax(ucb1_index(r_bar, m, n)))


def klucb_divergence(x, y):
    """d(x, y) = x/y - 1 - ln(x/y); nonnegative, zero iff x == y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("klucb_divergence requires positive arguments")
    ratio = x / y
    return ratio - 1.0 - np.log(ratio)


def bernoulli_divergence(x, y):
    """Bernoulli KL divergence with means clamped away from {0, 1}."""
    x = np.clip(np.asarray(x, dtype=float), EPS_FLOOR, 1.0 - EPS_FLOOR)
    y = np.clip(np.asarray(y, dtype=float), EPS_FLOOR, 1.0 - EPS_FLOOR)
    return x * np.log(x / y) + (1.0 - x) * np.log((1.0 - x) / (1.0 - y))


def klucb_budget(n, a: float = 0.0) -> float:
    """Exploration budget ln(n) + a ln(ln(n)); the a-term applies once
    ln(n) > 1 so the budget is well defined at small n."""
    ln_n = np.log(float(n))
    if a > 0.0 and ln_n > 1.0:
        return float(ln_n + a * np.log(ln_n))
    return float(max(ln_n, 0.0))


def _div_of(divergence: str):
    if divergence == "exp":
        return lambda x, y: x / y - 1.0 - np.log(x / y)
    if divergence == "bernoulli":
        return lambda x, y: x * np.log(x / y) + (1.0 - x) * np.log((1.0 - x) / (1.0 - y))
    raise DomainError(f"divergence must be one of {DIVERGENCES}")


def klucb_index(r_bar, m, n, a: float = 0.0, divergence: str = "exp"):
    """Upper-confidence value: the largest q >= r_bar with
    m * d(r_bar, q) <= ln(n) + a ln(ln(n)).

    Solved by bisection on q with the empirical mean clamped to
    [EPS_FLOOR, 1 - EPS_FLOOR] inside the divergence. The bracket's upper
    end grows geometrically until the constraint is violated and is capped
    at INDEX_CAP (the Bernoulli form caps at 1). The bisection runs to
    bracket collapse, comfortably below the 1e-9 contract tolerance.
    Broadcasts over ``r_bar`` and ``m``.
    """
    d = _div_of(divergence)
    r_bar = np.asarray(r_bar, dtype=float)
    m = np.asarray(m, dtype=float)
    if np.any(m < 1):
        raise UninitializedArmError("klucb_index requires m >= 1")
    scalar = r_bar.ndim == 0 and m.ndim == 0
    x = np.atleast_1d(np.clip(r_bar, EPS_FLOOR, 1.0 - EPS_FLOOR))
    m = np.atleast_1d(m)
    x, m = np.broadcast_arrays(x, m)
    budget = klucb_budget(n, a)

    cap = INDEX_CAP if divergence == "exp" else 1.0 - 1e-12
    lo = x.astype(float).copy()
    hi = np.maximum(2.0 * x, x + 1.0) if divergence == "exp" else np.full_like(lo, cap)
    if divergence == "exp":
        # geometric bracket growth until the budget constraint is violated
        growing = (m * d(x, np.minimum(hi, cap)) <= budget) & (hi < cap)
        while np.any(growing):
            hi[growing] = np.minimum(hi[growing] * 2.0, cap)
            growing = (m * d(x, hi) <= budget) & (hi < cap)
    at_cap = m * d(x, hi) <= budget
    lo = np.where(at_cap, hi, lo)

    active = ~at_cap
    while np.any(active):
        mid = 0.5 * (lo + hi)
        progress = (mid > lo) & (mid < hi) & active
        if not np.any(progress):
            break
        feasible = m * d(x, np.where(progress, mid, 0.5)) <= budget
        lo = np.where(progress & feasible, mid, lo)
        hi = np.where(progress & ~feasible, mid, hi)
        active = progress

    out = np.maximum(lo, np.atleast_1d(r_bar))
    return float(out[0]) if scalar else out


def _phi(t):
    """ln t + 1/t - 1, the scale-free form of the exp divergence."""
    return np.log(t) + 1.0 / t - 1.0


def _solve_phi(b):
    """Root of phi(t) = b for t >= 1, elementwise; safeguarded Newton.

    Converged entries are frozen so the result for each value is
    independent of what else sits in the batch (bit-reproducible across
    batch shapes).
    """
    b = np.asarray(b, dtype=float)
    t = 1.0 + np.sqrt(2.0 * b) + 0.5 * b  # exact as b -> 0
    lo = np.ones_like(t)
    hi = np.exp(np.minimum(b, 700.0) + 1.0)  # phi(e^(b+1)) >= b
    tol = 1e-13 * np.maximum(1.0, b)
    for _ in range(100):
        f = _phi(t) - b
        active = np.abs(f) > tol
        if not np.any(active):
            break
        lo = np.where(active & (f < 0.0), t, lo)
        hi = np.where(active & (f > 0.0), t, hi)
        fp = (t - 1.0) / (t * t)
        safe = fp > 1e-300
        t_new = np.where(safe, t - f / np.where(safe, fp, 1.0), 0.5 * (lo + hi))
        outside = (t_new <= lo) | (t_new >= hi)
        t_new = np.where(outside, 0.5 * (lo + hi), t_new)
        t = np.where(active, t_new, t)
    return t


def klucb_index_fast(r_bar, m, budget):
    """Fast evaluation of the exp-divergence KL-UCB index.

    Mathematically the same root as :func:`klucb_index` (exp divergence):
    d is scale free, so q = x * t where phi(t) = budget / m, and t is
    solved by safeguarded Newton instead of bisection. Used on hot paths;
    agreement with the bisection version is tested to < 1e-8. Elementwise
    over arrays; large batches are deduplicated on budget/m (many arms
    share a pull count, and t depends on nothing else).
    """
    r_bar = np.asarray(r_bar, dtype=float)
    x = np.clip(r_bar, EPS_FLOOR, 1.0 - EPS_FLOOR)
    m = np.asarray(m, dtype=float)
    b = np.maximum(budget / m, 0.0)
    b, x = np.broadcast_arrays(b, x)
    if b.size >= 256:
        uniq, inverse = np.unique(b, return_inverse=True)
        t = _solve_phi(uniq)[inverse].reshape(b.shape)
    else:
        t = _solve_phi(b)
    q = np.minimum(x * t, INDEX_CAP)
    return np.maximum(q, r_bar)


def klucb_select(r_bar, m, n: int, a: float = 0.0, divergence: str = "exp") -> int:
    """Arm maximizing the KL-UCB index; init contract as in ucb1_select."""
    m = np.asarray(m)
    if np.any(m == 0):
        raise UninitializedArmError("klucb_select requires every arm pulled at least once")
    return int(np.argmax(klucb_index(r_bar, m, n, a, divergence)))


def oracle_select(true_means) -> int:
    """Best arm under known means; lowest id on ties."""
    return int(np.argmax(true_means))


def random_select(n_arms: int, rng: np.random.Generator) -> int:
    return int(rng.integers(0, n_arms))


def fixed_select(arm: int = 0) -> int:
    """The no-reconfiguration baseline: a constant arm (default: every
    receiver stuck on state 0)."""
    return arm
