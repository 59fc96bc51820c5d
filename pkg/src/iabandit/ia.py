"""Closed-form interference alignment and the two reward metrics.

For the 3-user 2x2 channel with one stream per user the aligned precoders
have a closed form: v1 is an eigenvector of the chain matrix

    E = inv(H[2,0]) H[2,1] inv(H[0,1]) H[0,2] inv(H[1,2]) H[1,0]

(0-based receiver/transmitter indices), v2 and v3 follow by propagating v1
through the cross links, and each decoder u_i is the unit orthogonal
complement of the (single) aligned interference direction at receiver i.

Metrics: per-user rate log2(1 + P |u^H H v|^2) with unit noise power, and
the chordal distance between desired-signal and interference directions on
the Grassmannian of lines in C^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import cxmat
from .channel import ChannelPool, decode_arm
from .errors import ZeroVectorError


@dataclass(frozen=True)
class IASolution:
    """Aligned precoders/decoders for one channel realization."""

    v: np.ndarray  # (3, 2) unit precoders
    u: np.ndarray  # (3, 2) unit decoders
    eig_choice: int  # which chain-matrix eigenvector seeded v[0]


@dataclass(frozen=True)
class LinkMetrics:
    per_user_rate: np.ndarray  # (3,) bits/channel use
    sum_rate: float
    per_rx_chordal: np.ndarray  # (3,) each in [0, 1]
    total_chordal: float

# Interferer used to build u_i and the chordal reference at receiver i:
# the lowest-index transmitter j != i. Post-alignment both choices agree.
_REF_INTERFERER = (1, 0, 0)


def _chain_matrix(inv20, h21, inv01, h02, inv12, h10):
    """Left-to-right product of the alignment chain; shared by all paths."""
    e = cxmat.matmul2(inv20, h21)
    e = cxmat.matmul2(e, inv01)
    e = cxmat.matmul2(e, h02)
    e = cxmat.matmul2(e, inv12)
    return cxmat.matmul2(e, h10)


def solve_ia(h: np.ndarray, eig_choice: int = 0) -> IASolution:
    """Solve alignment for one (3, 3, 2, 2) channel set.

    Parameters
    ----------
    h : array, shape (3, 3, 2, 2)
        h[i, k] is the channel from transmitter k to receiver i.
    eig_choice : 0 or 1
        Which eigenvector of the chain matrix seeds v1. 0 (default) is the
        eigenvalue of larger modulus under the :func:`cxmat.eig2` ordering.

    Raises
    ------
    SingularMatrixError, DefectiveMatrixError
        On degenerate draws; the caller resamples.
    """
    h = np.asarray(h, dtype=np.complex128)
    if eig_choice not in (0, 1):
        raise ValueError("eig_choice must be 0 or 1")
    inv20 = cxmat.mat_inv(h[2, 0])
    inv01 = cxmat.mat_inv(h[0, 1])
    inv12 = cxmat.mat_inv(h[1, 2])
    inv21 = cxmat.mat_inv(h[2, 1])
    e = _chain_matrix(inv20, h[2, 1], inv01, h[0, 2], inv12, h[1, 0])

    _, vecs = cxmat.eig2(e)
    v1 = vecs[:, eig_choice]
    v2 = cxmat.canonical_unit(cxmat.matvec2(cxmat.matmul2(inv21, h[2, 0]), v1))
    v3 = cxmat.canonical_unit(cxmat.matvec2(cxmat.matmul2(inv12, h[1, 0]), v1))
    v = np.stack([v1, v2, v3])

    u = np.empty_like(v)
    for i in range(3):
        j = _REF_INTERFERER[i]
        u[i] = cxmat.unit_orth_complement(cxmat.matvec2(h[i, j], v[j]))
    return IASolution(v=v, u=u, eig_choice=eig_choice)


def alignment_residual(h: np.ndarray, sol: IASolution) -> float:
    """max over i != j of |u_i^H H[i,j] v_j| (zero under perfect alignment)."""
    worst = 0.0
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            leak = abs(cxmat.vdot2(sol.u[i], cxmat.matvec2(h[i, j], sol.v[j])))
            worst = max(worst, float(leak))
    return worst


def effective_gain(h_dd: np.ndarray, sol: IASolution, k: int) -> float:
    """|u_k^H H[k,k] v_k|^2, the post-alignment desired-channel power."""
    return float(np.abs(cxmat.vdot2(sol.u[k], cxmat.matvec2(h_dd, sol.v[k]))) ** 2)


def user_rate(h_dd: np.ndarray, sol: IASolution, k: int, p_tx: float) -> float:
    """Achievable rate (bits/channel use) of user k at transmit power p_tx.

    Single-stream form of the aligned-rate determinant with unit noise
    power: log2(1 + p_tx |u^H H v|^2).
    """
    if p_tx < 0:
        raise ValueError("p_tx must be >= 0")
    return float(np.log2(1.0 + p_tx * effective_gain(h_dd, sol, k)))


def sum_rate(h: np.ndarray, sol: IASolution, p_tx: float) -> float:
    return float(sum(user_rate(h[k, k], sol, k, p_tx) for k in range(3)))


def chordal_distance(x: np.ndarray, y: np.ndarray) -> float:
    """Chordal distance between the lines spanned by x and y in C^2.

    For one-dimensional subspaces this reduces to sqrt(1 - |<x̂, ŷ>|^2),
    clamped into [0, 1] against rounding. Invariant to nonzero complex
    scaling of either argument.
    """
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    nx, ny = cxmat.vec_norm(x), cxmat.vec_norm(y)
    if nx <= cxmat.ZERO_VEC_TOL or ny <= cxmat.ZERO_VEC_TOL:
        raise ZeroVectorError("chordal distance of a zero vector is undefined")
    overlap = np.abs(cxmat.vdot2(x / nx, y / ny)) ** 2
    return float(np.sqrt(np.clip(1.0 - overlap, 0.0, 1.0)))


def receiver_chordal(h: np.ndarray, sol: IASolution, i: int) -> float:
    """Distance between desired and aligned-interference directions at rx i."""
    j = _REF_INTERFERER[i]
    desired = cxmat.matvec2(h[i, i], sol.v[i])
    interference = cxmat.matvec2(h[i, j], sol.v[j])
    return chordal_distance(desired, interference)


def evaluate_metrics(h: np.ndarray, sol: IASolution, p_tx: float) -> LinkMetrics:
    rates = np.array([user_rate(h[k, k], sol, k, p_tx) for k in range(3)])
    chordals = np.array([receiver_chordal(h, sol, i) for i in range(3)])
    return LinkMetrics(
        per_user_rate=rates,
        sum_rate=float(rates.sum()),
        per_rx_chordal=chordals,
        total_chordal=float(chordals.sum()),
    )


@dataclass(frozen=True)
class PoolTables:
    """Per-(arm, sample) alignment outcomes for a whole channel pool.

    ``gain[c, s, k]`` is the effective desired-channel power of user k and
    ``chordal[c, s, k]`` the per-receiver chordal distance, both under the
    state combination decoded from arm c at pool sample s. Cells where the
    solve was degenerate are NaN with ``ok[c, s]`` False. Gains are
    power-independent, so rate rewards at any transmit power derive from
    this table without re-solving.
    """

    gain: np.ndarray  # (C, S, 3)
    chordal: np.ndarray  # (C, S, 3)
    ok: np.ndarray  # (C, S) bool
    n_degenerate: int

    def __post_init__(self):
        for arr in (self.gain, self.chordal, self.ok):
            arr.setflags(write=False)


def _batch_unit(vec, ok):
    n = cxmat.vec_norm(vec)
    good = n > cxmat.ZERO_VEC_TOL
    ok &= good
    safe = np.where(good, n, 1.0)
    return cxmat._phase_canon(vec / safe[..., None])


def evaluate_pool(pool: ChannelPool, eig_choice: int = 0) -> PoolTables:
    """Solve alignment for every (arm, sample) cell of the pool, vectorized
    over samples. Shares the elementwise formula helpers with
    :func:`solve_ia`, so scalar and batched results agree to rounding on
    non-degenerate cells."""
    cfg = pool.config
    n_arms, s = cfg.n_arms, cfg.n_samples
    gain = np.full((n_arms, s, 3), np.nan)
    chordal = np.full((n_arms, s, 3), np.nan)
    ok_all = np.zeros((n_arms, s), dtype=bool)

    # degenerate cells propagate inf/NaN freely and are masked at the end
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        _evaluate_arms(pool, eig_choice, gain, chordal, ok_all)

    return PoolTables(
        gain=gain,
        chordal=chordal,
        ok=ok_all,
        n_degenerate=int((~ok_all).sum()),
    )


def _evaluate_arms(pool, eig_choice, gain, chordal, ok_all):
    cfg = pool.config
    n_arms, s = cfg.n_arms, cfg.n_samples
    for arm in range(n_arms):
        combo = decode_arm(arm, cfg.n_states, cfg.n_users)
        hh = {(i, k): pool.h[i, k, combo[i]] for i in range(3) for k in range(3)}

        ok = np.ones(s, dtype=bool)
        invs = {}
        for link in ((2, 0), (0, 1), (1, 2), (2, 1)):
            inv, det = cxmat._inv2_core(hh[link])
            ok &= np.abs(det) > cxmat.SINGULAR_REL * cxmat.frob_norm(hh[link]) ** 2
            invs[link] = inv

        e = _chain_matrix(invs[2, 0], hh[2, 1], invs[0, 1], hh[0, 2], invs[1, 2], hh[1, 0])
        l0, l1 = cxmat._eig2_core(e)
        scale = np.maximum(cxmat.frob_norm(e), 1.0)
        ok &= np.abs(l0 - l1) > cxmat.EIG_COINCIDE_REL * scale
        lam = l0 if eig_choice == 0 else l1
        cand = cxmat._eigvec_core(e, lam)
        ok &= np.sqrt(np.sum(np.abs(cand) ** 2, axis=-1)) > cxmat.EIG_COINCIDE_REL * scale

        v1 = _batch_unit(cand, ok)
        v2 = _batch_unit(cxmat.matvec2(cxmat.matmul2(invs[2, 1], hh[2, 0]), v1), ok)
        v3 = _batch_unit(cxmat.matvec2(cxmat.matmul2(invs[1, 2], hh[1, 0]), v1), ok)
        v = (v1, v2, v3)

        for i in range(3):
            j = _REF_INTERFERER[i]
            interference = cxmat.matvec2(hh[i, j], v[j])
            u_i = _batch_unit(cxmat._orth2_core(interference), ok)
            desired = cxmat.matvec2(hh[i, i], v[i])
            gain[arm, :, i] = np.abs(cxmat.vdot2(u_i, desired)) ** 2

            dn = cxmat.vec_norm(desired)
            fn = cxmat.vec_norm(interference)
            good = (dn > cxmat.ZERO_VEC_TOL) & (fn > cxmat.ZERO_VEC_TOL)
            ok &= good
            d_hat = desired / np.where(good, dn, 1.0)[..., None]
            f_hat = interference / np.where(good, fn, 1.0)[..., None]
            overlap = np.abs(cxmat.vdot2(d_hat, f_hat)) ** 2
            chordal[arm, :, i] = np.sqrt(np.clip(1.0 - overlap, 0.0, 1.0))

        gain[arm, ~ok] = np.nan
        chordal[arm, ~ok] = np.nan
        ok_all[arm] = ok
