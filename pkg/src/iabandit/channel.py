"""Channel pool generation and antenna-state indexing.

A scenario fixes K=3 users with M=N=2 antennas; each receiver owns a
reconfigurable antenna with P states. For every directed link (rx i, tx k),
state p and sample s the pool stores one 2x2 complex channel draw, so a
whole experiment works from a finite, reproducible set of realizations and
per-slot rewards are i.i.d. draws from it.

Two generation models:

* ``independent`` (default): every state gets fresh i.i.d. circular complex
  Gaussian entries, row n scaled to mean power sigma2[p, n]. States are
  uncorrelated realizations.
* ``scaled``: one base draw per (i, k, s) shared by all states, left-scaled
  by diag(sigma[p, 1], sigma[p, 2]) on the receive side. With uniform unit
  powers all states collapse to the conventional single-state channel.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

CHANNEL_MODELS = ("independent", "scaled")

# Default per-state mean powers sigma2[p, n] (rows: state, cols: rx antenna).
# Calibrated so the arm landscape exercises the selection policies: state 0
# (the no-reconfiguration baseline) is a deeply attenuated pattern with a
# skewed per-antenna split, which also makes its subspace geometry the
# worst; the middle states are attenuated but isotropic; the last state is
# full power. Mean powers ascend with the state index, so the best arm
# puts every receiver on the last state.
DEFAULT_STATE_POWERS = {
    1: [(1.0, 1.0)],
    2: [(0.45, 0.45), (1.0, 1.0)],
    3: [(0.0009, 0.0003), (0.002, 0.002), (1.0, 1.0)],
    4: [(0.0009, 0.0003), (0.001, 0.001), (0.002, 0.002), (1.0, 1.0)],
}


def default_state_powers(n_states: int) -> np.ndarray:
    """Default sigma2[p, n] table for P states (shape (P, 2))."""
    if n_states in DEFAULT_STATE_POWERS:
        return np.asarray(DEFAULT_STATE_POWERS[n_states], dtype=float)
    if n_states < 1:
        raise ConfigError("n_states must be >= 1")
    # beyond the calibrated tables: the skewed baseline state plus a
    # geometric ladder of isotropic power levels
    levels = np.geomspace(1e-3, 1.0, n_states - 1)
    iso = np.stack([levels, levels], axis=1)
    return np.concatenate([[(0.0009, 0.0003)], iso], axis=0)


@dataclass(frozen=True)
class ScenarioConfig:
    """Immutable description of one simulated network scenario."""

    n_states: int = 4
    state_powers: np.ndarray | None = None  # (P, N) mean powers, > 0
    n_samples: int = 1000
    seed: int = 42
    channel_model: str = "independent"
    n_users: int = 3
    n_tx_antennas: int = 2
    n_rx_antennas: int = 2

    def __post_init__(self):
        if (self.n_users, self.n_tx_antennas, self.n_rx_antennas) != (3, 2, 2):
            raise ConfigError("closed-form alignment requires K=3, M=N=2")
        if self.n_states < 1:
            raise ConfigError("n_states must be >= 1")
        if self.n_samples < 1:
            raise ConfigError("n_samples must be >= 1")
        if self.channel_model not in CHANNEL_MODELS:
            raise ConfigError(f"channel_model must be one of {CHANNEL_MODELS}")
        powers = self.state_powers
        if powers is None:
            powers = default_state_powers(self.n_states)
        powers = np.atleast_2d(np.asarray(powers, dtype=float))
        if powers.shape == (1, self.n_states):  # accept a flat per-state list
            powers = np.repeat(powers.T, self.n_rx_antennas, axis=1)
        if powers.shape != (self.n_states, self.n_rx_antennas):
            raise ConfigError(
                f"state_powers must have shape ({self.n_states}, {self.n_rx_antennas}),"
                f" got {powers.shape}"
            )
        if not np.all(powers > 0):
            raise ConfigError("all state powers must be > 0")
        powers.setflags(write=False)
        object.__setattr__(self, "state_powers", powers)

    @property
    def n_arms(self) -> int:
        return self.n_states**self.n_users


@dataclass(frozen=True)
class ChannelPool:
    """All pre-generated draws, indexed [rx, tx, state, sample] -> 2x2 matrix."""

    config: ScenarioConfig
    h: np.ndarray = field(repr=False)  # (K, K, P, S, N, M) complex128

    def __post_init__(self):
        self.h.setflags(write=False)

    @property
    def n_samples(self) -> int:
        return self.config.n_samples

    @property
    def n_states(self) -> int:
        return self.config.n_states


def generate_pool(cfg: ScenarioConfig) -> ChannelPool:
    """Draw the full channel pool for a scenario; bit-reproducible per seed."""
    k, n, m = cfg.n_users, cfg.n_rx_antennas, cfg.n_tx_antennas
    p, s = cfg.n_states, cfg.n_samples
    rng = np.random.default_rng(cfg.seed)
    sigma = np.sqrt(cfg.state_powers)  # amplitude scale per (state, rx antenna)

    if cfg.channel_model == "independent":
        shape = (k, k, p, s, n, m)
        h = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
        h *= sigma[None, None, :, None, :, None]
    else:  # scaled: one base draw per (rx, tx, sample), shared by all states
        shape = (k, k, s, n, m)
        base = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
        h = base[:, :, None] * sigma[None, None, :, None, :, None]
    return ChannelPool(config=cfg, h=h)


def arm_index(combo, n_states: int) -> int:
    """Mixed-radix index of a per-receiver state combination.

    Receiver 0 is the most significant digit; states are 0-based, so
    (0, 0, 0) -> 0 and (P-1,)*K -> P**K - 1.
    """
    idx = 0
    for p in combo:
        if not 0 <= p < n_states:
            raise IndexError(f"state {p} out of range [0, {n_states})")
        idx = idx * n_states + int(p)
    return idx


def decode_arm(idx: int, n_states: int, n_users: int = 3) -> tuple[int, ...]:
    """Inverse of :func:`arm_index`."""
    if not 0 <= idx < n_states**n_users:
        raise IndexError(f"arm {idx} out of range [0, {n_states ** n_users})")
    combo = []
    for _ in range(n_users):
        combo.append(idx % n_states)
        idx //= n_states
    return tuple(reversed(combo))


def channel_at(pool: ChannelPool, rx: int, tx: int, combo, sample: int) -> np.ndarray:
    """Channel seen on link (rx, tx) when receivers use states ``combo``.

    The state in effect is the one selected by the *receiver*, identical
    for every transmitter it listens to.
    """
    k = pool.config.n_users
    if not (0 <= rx < k and 0 <= tx < k):
        raise IndexError("rx/tx out of range")
    if not 0 <= sample < pool.n_samples:
        raise IndexError("sample out of range")
    state = combo[rx]
    if not 0 <= state < pool.n_states:
        raise IndexError("state out of range")
    return pool.h[rx, tx, state, sample]


def combo_channels(pool: ChannelPool, combo, sample: int) -> np.ndarray:
    """The (K, K, N, M) channel set induced by one state combination."""
    k = pool.config.n_users
    out = np.empty((k, k, 2, 2), dtype=np.complex128)
    for i in range(k):
        out[i] = pool.h[i, :, combo[i], sample]
    return out
