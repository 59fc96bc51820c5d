"""Closed-form complex 2x2 linear algebra.

Everything here is evaluated analytically (cofactor inverse, characteristic
quadratic for the eigendecomposition) rather than through an iterative
LAPACK routine, so results are deterministic down to the last bit and the
functions broadcast over stacked inputs of shape (..., 2, 2) / (..., 2).

Returned unit vectors are phase-canonicalized: the first component with
magnitude above ``PHASE_TOL`` is made real and positive, which keeps runs
reproducible and lets tests compare vectors directly.
"""

from __future__ import annotations

import numpy as np

from .errors import DefectiveMatrixError, SingularMatrixError, ZeroVectorError

# |det A| must exceed SINGULAR_REL * ||A||_F^2 for the inverse to be trusted.
SINGULAR_REL = 1e-12
# Eigenvalues closer than EIG_COINCIDE_REL * max(1, ||A||_F) count as repeated.
EIG_COINCIDE_REL = 1e-10
PHASE_TOL = 1e-12
ZERO_VEC_TOL = 1e-12


def det2(a):
    """Determinant of (..., 2, 2) stacks."""
    return a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]


def trace2(a):
    return a[..., 0, 0] + a[..., 1, 1]


def frob_norm(a):
    """Frobenius norm over the trailing matrix axes."""
    return np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1)))


def _inv2_core(a):
    """Cofactor inverse. Returns (inverse, det); no conditioning check."""
    det = det2(a)
    out = np.empty_like(a)
    out[..., 0, 0] = a[..., 1, 1]
    out[..., 0, 1] = -a[..., 0, 1]
    out[..., 1, 0] = -a[..., 1, 0]
    out[..., 1, 1] = a[..., 0, 0]
    return out / det[..., None, None], det


def mat_inv(a: np.ndarray) -> np.ndarray:
    """Inverse of a single well-conditioned 2x2 complex matrix.

    Raises
    ------
    SingularMatrixError
        If |det a| <= SINGULAR_REL * ||a||_F^2, signalling a degenerate
        draw that the caller should resample.
    """
    a = np.asarray(a, dtype=np.complex128)
    det = det2(a)
    if np.abs(det) <= SINGULAR_REL * frob_norm(a) ** 2:
        raise SingularMatrixError(f"|det|={np.abs(det):.3e} below conditioning threshold")
    return _inv2_core(a)[0]


def _phase_canon(v):
    """Rotate (..., 2) vectors so the first non-negligible entry is real-positive."""
    use_second = np.abs(v[..., 0]) <= PHASE_TOL
    ref = np.where(use_second, v[..., 1], v[..., 0])
    mag = np.abs(ref)
    # zero vectors pass through unchanged; callers guard against them
    phase = np.where(mag > 0, np.conj(ref) / np.where(mag > 0, mag, 1.0), 1.0)
    return v * phase[..., None]


def vec_norm(v):
    """Euclidean norm over the trailing axis of (..., 2) vectors."""
    return np.sqrt(np.abs(v[..., 0]) ** 2 + np.abs(v[..., 1]) ** 2)


def canonical_unit(v: np.ndarray) -> np.ndarray:
    """Unit-normalize (..., 2) vectors and canonicalize the phase."""
    v = np.asarray(v, dtype=np.complex128)
    n = vec_norm(v)
    if np.any(n <= ZERO_VEC_TOL):
        raise ZeroVectorError("cannot normalize a zero vector")
    return _phase_canon(v / n[..., None])


def _eig2_core(a):
    """Eigenvalues of (..., 2, 2) stacks, ordered per the module contract.

    Order: descending modulus, ties by descending real part, then
    descending imaginary part. Returns (lam0, lam1).
    """
    tr = trace2(a)
    det = det2(a)
    disc = np.sqrt(tr * tr - 4.0 * det)
    l0 = 0.5 * (tr + disc)
    l1 = 0.5 * (tr - disc)
    a0, a1 = np.abs(l0), np.abs(l1)
    swap = (a1 > a0) | ((a1 == a0) & ((l1.real > l0.real) | ((l1.real == l0.real) & (l1.imag > l0.imag))))
    return np.where(swap, l1, l0), np.where(swap, l0, l1)


def _eigvec_core(a, lam):
    """Eigenvector candidate for eigenvalue ``lam`` of (..., 2, 2) stacks.

    Of the two analytic null-space candidates (b, lam-a11) and (lam-a22, c),
    keeps the one with the larger norm. Not normalized; may be ~zero when
    a is (close to) lam * I.
    """
    c1 = np.stack([a[..., 0, 1], lam - a[..., 0, 0]], axis=-1)
    c2 = np.stack([lam - a[..., 1, 1], a[..., 1, 0]], axis=-1)
    n1 = np.sum(np.abs(c1) ** 2, axis=-1)
    n2 = np.sum(np.abs(c2) ** 2, axis=-1)
    return np.where((n1 >= n2)[..., None], c1, c2)


def eig2(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Analytic eigendecomposition of a single 2x2 complex matrix.

    Returns
    -------
    (eigvals, eigvecs)
        ``eigvals`` has shape (2,), ordered by descending modulus with
        ties broken by descending real then imaginary part. Column
        ``eigvecs[:, k]`` is the unit, phase-canonicalized eigenvector
        of ``eigvals[k]``.

    Raises
    ------
    DefectiveMatrixError
        If the eigenvalues coincide (within EIG_COINCIDE_REL relative to
        the matrix scale) and no second independent eigenvector exists.
    """
    a = np.asarray(a, dtype=np.complex128)
    l0, l1 = _eig2_core(a)
    scale = max(frob_norm(a), 1.0)
    lam = np.array([l0, l1])

    if np.abs(l0 - l1) <= EIG_COINCIDE_REL * scale:
        # repeated eigenvalue: either a ~ lam*I (any basis works) or a
        # Jordan block (defective)
        off = max(np.abs(a[0, 1]), np.abs(a[1, 0]), np.abs(a[0, 0] - l0), np.abs(a[1, 1] - l0))
        if off <= EIG_COINCIDE_REL * scale:
            return lam, np.eye(2, dtype=np.complex128)
        raise DefectiveMatrixError("repeated eigenvalue with a one-dimensional eigenspace")

    vecs = np.empty((2, 2), dtype=np.complex128)
    for k in (0, 1):
        cand = _eigvec_core(a, lam[k])
        if np.linalg.norm(cand) <= EIG_COINCIDE_REL * scale:
            raise DefectiveMatrixError("eigenvector candidates degenerate")
        vecs[:, k] = canonical_unit(cand)
    return lam, vecs


def matmul2(a, b):
    """Explicit (..., 2, 2) @ (..., 2, 2).

    Written out so scalar and stacked evaluations share the exact same
    floating-point operations (BLAS-free, bit-reproducible).
    """
    out = np.empty(np.broadcast_shapes(a.shape, b.shape), dtype=np.complex128)
    out[..., 0, 0] = a[..., 0, 0] * b[..., 0, 0] + a[..., 0, 1] * b[..., 1, 0]
    out[..., 0, 1] = a[..., 0, 0] * b[..., 0, 1] + a[..., 0, 1] * b[..., 1, 1]
    out[..., 1, 0] = a[..., 1, 0] * b[..., 0, 0] + a[..., 1, 1] * b[..., 1, 0]
    out[..., 1, 1] = a[..., 1, 0] * b[..., 0, 1] + a[..., 1, 1] * b[..., 1, 1]
    return out


def matvec2(a, v):
    """Explicit (..., 2, 2) @ (..., 2)."""
    return np.stack(
        [
            a[..., 0, 0] * v[..., 0] + a[..., 0, 1] * v[..., 1],
            a[..., 1, 0] * v[..., 0] + a[..., 1, 1] * v[..., 1],
        ],
        axis=-1,
    )


def vdot2(x, y):
    """Hermitian inner product <x, y> = conj(x)^T y over the last axis."""
    return np.conj(x[..., 0]) * y[..., 0] + np.conj(x[..., 1]) * y[..., 1]


def _orth2_core(w):
    """(..., 2) -> orthogonal direction (-conj(w1), conj(w0)); not normalized."""
    return np.stack([-np.conj(w[..., 1]), np.conj(w[..., 0])], axis=-1)


def unit_orth_complement(w: np.ndarray) -> np.ndarray:
    """Unit vector orthogonal (Hermitian inner product) to ``w`` in C^2.

    Raises ZeroVectorError when ||w|| <= ZERO_VEC_TOL.
    """
    w = np.asarray(w, dtype=np.complex128)
    if np.linalg.norm(w) <= ZERO_VEC_TOL:
        raise ZeroVectorError("orthogonal complement of a zero vector is undefined")
    return canonical_unit(_orth2_core(w))
