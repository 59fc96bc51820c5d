import numpy as np
import pytest

from iabandit import channel
from iabandit.errors import ConfigError


def test_config_rejects_bad_values():
    with pytest.raises(ConfigError):
        channel.ScenarioConfig(n_states=0)
    with pytest.raises(ConfigError):
        channel.ScenarioConfig(n_samples=0)
    with pytest.raises(ConfigError):
        channel.ScenarioConfig(channel_model="rician")
    with pytest.raises(ConfigError):
        channel.ScenarioConfig(n_users=4)
    with pytest.raises(ConfigError):
        channel.ScenarioConfig(n_states=2, state_powers=np.array([[1.0, -1.0], [1.0, 1.0]]))
    with pytest.raises(ConfigError):
        channel.ScenarioConfig(n_states=2, state_powers=np.ones((3, 2)))


def test_flat_power_list_broadcasts_over_antennas():
    cfg = channel.ScenarioConfig(n_states=2, state_powers=np.array([0.5, 1.0]))
    assert cfg.state_powers.shape == (2, 2)
    assert np.allclose(cfg.state_powers, [[0.5, 0.5], [1.0, 1.0]])


def test_generation_is_deterministic():
    cfg = channel.ScenarioConfig(n_states=2, n_samples=20, seed=5)
    a = channel.generate_pool(cfg)
    b = channel.generate_pool(cfg)
    assert np.array_equal(a.h, b.h)
    c = channel.generate_pool(channel.ScenarioConfig(n_states=2, n_samples=20, seed=6))
    assert not np.array_equal(a.h, c.h)


def test_pool_is_immutable():
    pool = channel.generate_pool(channel.ScenarioConfig(n_states=2, n_samples=5))
    with pytest.raises(ValueError):
        pool.h[0, 0, 0, 0, 0, 0] = 0.0


def test_scaled_mode_uniform_powers_degenerates():
    cfg = channel.ScenarioConfig(
        n_states=3, state_powers=np.ones((3, 2)), n_samples=10, channel_model="scaled"
    )
    pool = channel.generate_pool(cfg)
    for p in range(1, 3):
        assert np.array_equal(pool.h[:, :, p], pool.h[:, :, 0])


def test_scaled_mode_scales_rows_on_receive_side():
    cfg = channel.ScenarioConfig(
        n_states=2, state_powers=np.array([[1.0, 1.0], [4.0, 1.0]]),
        n_samples=8, channel_model="scaled",
    )
    pool = channel.generate_pool(cfg)
    base = pool.h[:, :, 0]
    assert np.allclose(pool.h[:, :, 1, :, 0, :], 2.0 * base[:, :, :, 0, :])
    assert np.allclose(pool.h[:, :, 1, :, 1, :], base[:, :, :, 1, :])


def test_sample_moments_match_state_powers():
    powers = np.array([[1.0, 0.25], [0.5, 2.0]])
    cfg = channel.ScenarioConfig(n_states=2, state_powers=powers, n_samples=10_000, seed=9)
    pool = channel.generate_pool(cfg)
    measured = np.mean(np.abs(pool.h) ** 2, axis=(0, 1, 3, 5))  # (P, N)
    assert np.all(np.abs(measured / powers - 1.0) < 0.05)


def test_arm_index_examples():
    assert channel.arm_index((0, 0, 0), 4) == 0
    assert channel.arm_index((3, 3, 3), 4) == 63
    assert channel.arm_index((0, 1, 2), 4) == 6
    with pytest.raises(IndexError):
        channel.arm_index((0, 0, 4), 4)
    with pytest.raises(IndexError):
        channel.decode_arm(64, 4)


def test_arm_index_bijection():
    for p in (2, 4):
        seen = set()
        for idx in range(p**3):
            combo = channel.decode_arm(idx, p)
            assert channel.arm_index(combo, p) == idx
            seen.add(combo)
        assert len(seen) == p**3


def test_channel_at_uses_receiver_state():
    pool = channel.generate_pool(channel.ScenarioConfig(n_states=3, n_samples=4, seed=2))
    combo = (0, 1, 2)
    for i in range(3):
        for k in range(3):
            for s in range(4):
                expect = pool.h[i, k, combo[i], s]
                assert np.array_equal(channel.channel_at(pool, i, k, combo, s), expect)


def test_channel_at_exhaustive_against_pool():
    pool = channel.generate_pool(channel.ScenarioConfig(n_states=2, n_samples=3, seed=3))
    for arm in range(8):
        combo = channel.decode_arm(arm, 2)
        hs = channel.combo_channels(pool, combo, 1)
        for i in range(3):
            for k in range(3):
                assert np.array_equal(hs[i, k], pool.h[i, k, combo[i], 1])


def test_channel_at_range_checks():
    pool = channel.generate_pool(channel.ScenarioConfig(n_states=2, n_samples=3))
    with pytest.raises(IndexError):
        channel.channel_at(pool, 3, 0, (0, 0, 0), 0)
    with pytest.raises(IndexError):
        channel.channel_at(pool, 0, 0, (0, 0, 0), 3)
    with pytest.raises(IndexError):
        channel.channel_at(pool, 0, 0, (2, 0, 0), 0)


def test_default_state_powers_shapes():
    for p in (1, 2, 3, 4, 6):
        powers = channel.default_state_powers(p)
        assert powers.shape == (p, 2)
        assert np.all(powers > 0)
    # mean powers ascend so the last state is the strongest
    for p in (2, 3, 4):
        means = channel.default_state_powers(p).mean(axis=1)
        assert np.all(np.diff(means) > 0)
